//! Queued phase/permutation gates.
//!
//! Every gate with a single nonzero entry per row acts as
//! `alpha_b |b> -> f(b) alpha_b |g(b)>`. A queue of such records is folded per
//! label and applied to the whole state in one pass, optionally split across
//! worker threads.

use std::thread;

use num_complex::Complex64;

use crate::error::{Result, SimError};
use crate::label::BasisLabel;
use crate::state::{new_map, SparseWavefunction};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Action of a phase/permutation record on labels that satisfy its controls.
#[derive(Clone, Debug, PartialEq)]
pub enum PhasePermAction {
    /// `b -> b ^ mask`.
    FlipMask(u128),
    /// Multiply by `e^{i theta}`.
    PhaseConst(f64),
    /// Multiply by `e^{-i theta/2}` on even parity of `b & z_mask`, by
    /// `e^{+i theta/2}` on odd parity.
    ZParityPhase { z_mask: u128, theta: f64 },
    /// Pauli Y on one qubit: `+i` if the bit was 0, `-i` if 1, then flip.
    PauliY(usize),
    /// Exchange two bits.
    BitSwap(usize, usize),
}

/// One queued gate: an action applied only to labels with every control bit set.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePermRecord {
    pub control_mask: u128,
    pub action: PhasePermAction,
}

impl PhasePermRecord {
    pub fn new(control_mask: u128, action: PhasePermAction) -> Result<Self> {
        let record = PhasePermRecord {
            control_mask,
            action,
        };
        if record.target_mask() & control_mask != 0 {
            return Err(SimError::InvalidArgument(
                "record controls overlap its targets".into(),
            ));
        }
        if let PhasePermAction::BitSwap(i, j) = record.action {
            if i == j {
                return Err(SimError::InvalidArgument("swap of a qubit with itself".into()));
            }
        }
        Ok(record)
    }

    pub fn flip(control_mask: u128, mask: u128) -> Result<Self> {
        Self::new(control_mask, PhasePermAction::FlipMask(mask))
    }

    pub fn phase(control_mask: u128, theta: f64) -> Result<Self> {
        Self::new(control_mask, PhasePermAction::PhaseConst(theta))
    }

    pub fn z_parity(control_mask: u128, z_mask: u128, theta: f64) -> Result<Self> {
        Self::new(control_mask, PhasePermAction::ZParityPhase { z_mask, theta })
    }

    pub fn pauli_y(control_mask: u128, qubit: usize) -> Result<Self> {
        Self::new(control_mask, PhasePermAction::PauliY(qubit))
    }

    pub fn swap(control_mask: u128, a: usize, b: usize) -> Result<Self> {
        Self::new(control_mask, PhasePermAction::BitSwap(a, b))
    }

    /// Bits the action reads or writes (excluding controls).
    pub fn target_mask(&self) -> u128 {
        match self.action {
            PhasePermAction::FlipMask(m) => m,
            PhasePermAction::PhaseConst(_) => 0,
            PhasePermAction::ZParityPhase { z_mask, .. } => z_mask,
            PhasePermAction::PauliY(q) => 1u128 << q,
            PhasePermAction::BitSwap(i, j) => (1u128 << i) | (1u128 << j),
        }
    }

    fn compile(&self) -> Compiled {
        let step = match self.action {
            PhasePermAction::FlipMask(m) => Step::Flip(m),
            PhasePermAction::PhaseConst(theta) => Step::Phase(unit_phase(theta)),
            PhasePermAction::ZParityPhase { z_mask, theta } => Step::ZParity {
                mask: z_mask,
                even: unit_phase(-theta / 2.0),
                odd: unit_phase(theta / 2.0),
            },
            PhasePermAction::PauliY(q) => Step::Y(1u128 << q),
            PhasePermAction::BitSwap(i, j) => Step::Swap(1u128 << i, 1u128 << j),
        };
        Compiled {
            controls: self.control_mask,
            step,
        }
    }
}

/// `e^{i theta}`, exact for multiples of a quarter turn.
pub(crate) fn unit_phase(theta: f64) -> Complex64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    if theta == 0.0 {
        ONE
    } else if theta == PI || theta == -PI {
        -ONE
    } else if theta == FRAC_PI_2 || theta == -3.0 * FRAC_PI_2 {
        I
    } else if theta == -FRAC_PI_2 || theta == 3.0 * FRAC_PI_2 {
        -I
    } else {
        Complex64::from_polar(1.0, theta)
    }
}

#[derive(Clone, Copy, Debug)]
enum Step {
    Flip(u128),
    Phase(Complex64),
    ZParity {
        mask: u128,
        even: Complex64,
        odd: Complex64,
    },
    Y(u128),
    Swap(u128, u128),
}

#[derive(Clone, Copy, Debug)]
struct Compiled {
    controls: u128,
    step: Step,
}

impl Compiled {
    #[inline(always)]
    fn apply(&self, b: u128, phase: &mut Complex64) -> u128 {
        if b & self.controls != self.controls {
            return b;
        }
        match self.step {
            Step::Flip(m) => b ^ m,
            Step::Phase(p) => {
                *phase *= p;
                b
            }
            Step::ZParity { mask, even, odd } => {
                *phase *= if (b & mask).count_ones() & 1 == 1 { odd } else { even };
                b
            }
            Step::Y(m) => {
                *phase *= if b & m == 0 { I } else { -I };
                b ^ m
            }
            Step::Swap(mi, mj) => {
                if (b & mi == 0) != (b & mj == 0) {
                    b ^ (mi | mj)
                } else {
                    b
                }
            }
        }
    }
}

/// Ordered list of pending phase/permutation records.
#[derive(Clone, Debug, Default)]
pub struct PhasePermQueue {
    records: Vec<PhasePermRecord>,
    compiled: Vec<Compiled>,
}

impl PhasePermQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enqueue(&mut self, record: PhasePermRecord) {
        self.compiled.push(record.compile());
        self.records.push(record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PhasePermRecord] {
        &self.records
    }

    pub fn clear(&mut self) {
        self.records.clear();
        self.compiled.clear();
    }

    /// Folds every record over `b` in order: returns the accumulated phase
    /// `f(b)` and the final label `g(b)`.
    pub fn eval_chain(&self, b: BasisLabel) -> (Complex64, BasisLabel) {
        let (phase, bits) = fold(&self.compiled, b.bits());
        (phase, BasisLabel::new(bits))
    }
}

#[inline]
fn fold(steps: &[Compiled], mut b: u128) -> (Complex64, u128) {
    let mut phase = ONE;
    for s in steps {
        b = s.apply(b, &mut phase);
    }
    (phase, b)
}

/// Thread budget and thresholds for parallel queue execution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParallelConfig {
    pub threads: usize,
    /// The queue must be strictly longer than this to run in parallel.
    pub min_queue: usize,
    /// The state must hold strictly more entries than this to run in parallel.
    pub min_states: usize,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        ParallelConfig {
            threads: 1,
            min_queue: 64,
            min_states: 4096,
        }
    }
}

impl ParallelConfig {
    pub fn with_threads(threads: usize) -> Self {
        ParallelConfig {
            threads: threads.max(1),
            ..Self::default()
        }
    }

    /// Worker count for a pass over `state_size` entries with `queue_len` records.
    pub fn workers_for(&self, queue_len: usize, state_size: usize) -> usize {
        if self.threads > 1 && queue_len > self.min_queue && state_size > self.min_states {
            self.threads
        } else {
            1
        }
    }
}

/// Instrumentation for queue passes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecStats {
    pub serial_passes: u64,
    pub parallel_passes: u64,
    pub records_executed: u64,
    /// Smallest queue length among parallel passes.
    pub min_parallel_queue: Option<usize>,
    /// Smallest state size among parallel passes.
    pub min_parallel_states: Option<usize>,
    pub max_workers: usize,
}

/// Runs queues against a state under a [`ParallelConfig`], keeping stats.
#[derive(Clone, Debug, Default)]
pub struct Executor {
    config: ParallelConfig,
    stats: ExecStats,
}

impl Executor {
    pub fn new(config: ParallelConfig) -> Self {
        Executor {
            config,
            stats: ExecStats::default(),
        }
    }

    pub fn config(&self) -> &ParallelConfig {
        &self.config
    }

    pub fn stats(&self) -> &ExecStats {
        &self.stats
    }

    /// Applies and clears `queue`. Returns the number of workers used
    /// (0 if the queue was empty).
    pub fn execute(&mut self, queue: &mut PhasePermQueue, state: &mut SparseWavefunction) -> usize {
        if queue.is_empty() {
            return 0;
        }
        let size = state.state_size();
        let workers = self.config.workers_for(queue.len(), size);
        if workers > 1 {
            execute_parallel(&queue.compiled, state, workers);
            self.stats.parallel_passes += 1;
            self.stats.min_parallel_queue =
                Some(self.stats.min_parallel_queue.map_or(queue.len(), |m| m.min(queue.len())));
            self.stats.min_parallel_states =
                Some(self.stats.min_parallel_states.map_or(size, |m| m.min(size)));
        } else {
            execute_serial(&queue.compiled, state);
            self.stats.serial_passes += 1;
        }
        self.stats.max_workers = self.stats.max_workers.max(workers);
        self.stats.records_executed += queue.len() as u64;
        queue.clear();
        workers
    }
}

/// Applies `queue` once with the given configuration and clears it.
pub fn execute(
    queue: &mut PhasePermQueue,
    state: &mut SparseWavefunction,
    config: &ParallelConfig,
) -> usize {
    Executor::new(*config).execute(queue, state)
}

fn execute_serial(steps: &[Compiled], state: &mut SparseWavefunction) {
    let src = state.entries();
    let mut out = new_map(src.len());
    for (b, a) in src {
        let (phase, g) = fold(steps, b.bits());
        out.insert(BasisLabel::new(g), *a * phase);
    }
    state.replace_entries(out);
}

// Workers transform disjoint contiguous chunks of the source entries in
// private buffers; one finalizer inserts the chunks in source order, so the
// destination map sees the same insertion sequence as the serial path.
fn execute_parallel(steps: &[Compiled], state: &mut SparseWavefunction, workers: usize) {
    let src = state.entries();
    let mut items: Vec<(u128, Complex64)> = src.iter().map(|(b, a)| (b.bits(), *a)).collect();
    let chunk = items.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        for part in items.chunks_mut(chunk) {
            scope.spawn(move || {
                for (b, a) in part.iter_mut() {
                    let (phase, g) = fold(steps, *b);
                    *b = g;
                    *a *= phase;
                }
            });
        }
    });
    let mut out = new_map(items.len());
    out.extend(items.into_iter().map(|(b, a)| (BasisLabel::new(b), a)));
    state.replace_entries(out);
}
