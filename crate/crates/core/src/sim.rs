//! Simulator front end: scheduler, queue executor and seeded measurement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::gate::{GateOp, Lowered};
use crate::label::{mask_of, BasisLabel};
use crate::queue::{ExecStats, Executor, ParallelConfig, PhasePermQueue};
use crate::scheduler::{Scheduler, SchedulerStats};
use crate::state::{Amplitude, MeasurementOutcome, SparseWavefunction};

/// Anything that can run gate programs: the sparse simulator and the dense oracle.
pub trait Backend {
    fn num_qubits(&self) -> usize;
    /// Applies a unitary gate. Measurement ops are routed to [`measure`](Self::measure).
    fn apply(&mut self, op: &GateOp) -> Result<()>;
    /// Joint Z-product measurement; `true` means odd parity.
    fn measure(&mut self, qubits: &[usize]) -> Result<bool>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub parallel: ParallelConfig,
    /// Route gates through the commutation scheduler. When off, every gate
    /// is applied to the state as soon as it arrives.
    pub scheduling: bool,
    pub prune_eps: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            parallel: ParallelConfig::default(),
            scheduling: true,
            prune_eps: crate::state::DEFAULT_PRUNE_EPS,
        }
    }
}

impl SimConfig {
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.parallel.threads = threads.max(1);
        self
    }

    pub fn with_scheduling(mut self, on: bool) -> Self {
        self.scheduling = on;
        self
    }
}

/// Statistics reported for a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub qubits_used: usize,
    pub max_state_size: usize,
    pub gate_count: u64,
    pub flush_count: u64,
    pub wall_time_ms: u64,
    pub success: bool,
}

/// Sparse simulator with seeded measurements.
#[derive(Clone, Debug)]
pub struct Simulator {
    state: SparseWavefunction,
    scheduler: Scheduler,
    exec: Executor,
    rng: ChaCha8Rng,
    scheduling: bool,
    max_state_size: usize,
    gate_count: u64,
    op_peaks: Option<Vec<usize>>,
}

impl Simulator {
    pub fn new(num_qubits: usize, config: SimConfig, seed: u64) -> Result<Self> {
        let state = SparseWavefunction::new(num_qubits)?.with_prune_eps(config.prune_eps);
        Ok(Self::with_state(state, config, seed))
    }

    /// Starts from an arbitrary prepared state.
    pub fn with_state(state: SparseWavefunction, config: SimConfig, seed: u64) -> Self {
        let n = state.num_qubits();
        let size = state.state_size();
        Simulator {
            state,
            scheduler: Scheduler::new(n),
            exec: Executor::new(config.parallel),
            rng: ChaCha8Rng::seed_from_u64(seed),
            scheduling: config.scheduling,
            max_state_size: size,
            gate_count: 0,
            op_peaks: None,
        }
    }

    /// Records the peak state size of every subsequent op and flush.
    pub fn record_op_peaks(&mut self) {
        self.op_peaks = Some(Vec::new());
    }

    pub fn op_peaks(&self) -> Option<&[usize]> {
        self.op_peaks.as_deref()
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// Underlying state. Pending scheduler work is not reflected until
    /// [`flush`](Self::flush) is called.
    pub fn state(&self) -> &SparseWavefunction {
        &self.state
    }

    pub fn scheduler(&self) -> &Scheduler {
        &self.scheduler
    }

    pub fn exec_stats(&self) -> &ExecStats {
        self.exec.stats()
    }

    pub fn scheduler_stats(&self) -> &SchedulerStats {
        self.scheduler.stats()
    }

    pub fn max_state_size(&self) -> usize {
        self.max_state_size
    }

    pub fn gate_count(&self) -> u64 {
        self.gate_count
    }

    pub fn flush_count(&self) -> u64 {
        self.scheduler.stats().flushes
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        if op.is_measurement() {
            return self.measure(&op.targets).map(|_| ());
        }
        op.validate(self.num_qubits())?;
        self.state.reset_peak();
        if self.scheduling {
            self.scheduler.dispatch(op, &mut self.state, &mut self.exec)?;
        } else {
            match op.lower() {
                Lowered::Record(r) => {
                    let mut q = PhasePermQueue::new();
                    q.enqueue(r);
                    self.exec.execute(&mut q, &mut self.state);
                }
                Lowered::Pairwise(block, cm) => self.state.apply_pairwise(&block, cm)?,
                Lowered::Measure => unreachable!("measurements handled above"),
            }
        }
        self.gate_count += 1;
        self.note_peak();
        Ok(())
    }

    /// Measures with a fresh draw from the seeded stream.
    pub fn measure(&mut self, qubits: &[usize]) -> Result<bool> {
        self.measure_outcome(qubits).map(|o| o.result)
    }

    pub fn measure_outcome(&mut self, qubits: &[usize]) -> Result<MeasurementOutcome> {
        let u: f64 = self.rng.gen();
        self.measure_with_draw(qubits, u)
    }

    /// Measures using the supplied uniform draw instead of the RNG.
    pub fn measure_with_draw(&mut self, qubits: &[usize], u: f64) -> Result<MeasurementOutcome> {
        GateOp::measure(qubits).validate(self.num_qubits())?;
        if !(0.0..1.0).contains(&u) {
            return Err(SimError::InvalidArgument(format!("draw {u} outside [0, 1)")));
        }
        self.state.reset_peak();
        if self.scheduling {
            self.scheduler
                .pre_measure_flush(qubits, &mut self.state, &mut self.exec)?;
        }
        let outcome = self.state.measure(mask_of(qubits), u)?;
        self.gate_count += 1;
        self.note_peak();
        Ok(outcome)
    }

    /// Executes all pending scheduler work.
    pub fn flush(&mut self) -> Result<()> {
        self.state.reset_peak();
        self.scheduler.flush_all(&mut self.state, &mut self.exec)?;
        self.note_peak();
        Ok(())
    }

    /// Flushes, then returns the entries sorted by label.
    pub fn dump(&mut self) -> Result<Vec<(BasisLabel, Amplitude)>> {
        self.flush()?;
        Ok(self.state.dump())
    }

    /// Consumes the simulator, returning the flushed state.
    pub fn into_state(mut self) -> Result<SparseWavefunction> {
        self.flush()?;
        Ok(self.state)
    }

    fn note_peak(&mut self) {
        let peak = self.state.peak_size();
        self.max_state_size = self.max_state_size.max(peak);
        if let Some(p) = &mut self.op_peaks {
            p.push(peak);
        }
    }
}

impl Backend for Simulator {
    fn num_qubits(&self) -> usize {
        Simulator::num_qubits(self)
    }

    fn apply(&mut self, op: &GateOp) -> Result<()> {
        Simulator::apply(self, op)
    }

    fn measure(&mut self, qubits: &[usize]) -> Result<bool> {
        Simulator::measure(self, qubits)
    }
}
