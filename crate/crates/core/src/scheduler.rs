//! Gate-commuting frontend.
//!
//! Each qubit carries pending `Ry`, `Rx` and `H` slots. The pending operator on
//! a qubit is `Ry(ry) Rx(rx) H^h`, applied after the phase/permutation queue.
//! Incoming gates are rewritten through the slots of the qubits they touch
//! (Ry first, then Rx, then H); whatever comes out either merges into a slot
//! or joins the queue. A gate with no rewrite forces a flush of the queue
//! and of the touched qubits' slots.
//!
//! Rewrite table (anything absent flushes):
//!
//! | incoming            | Ry(t) slot       | Rx(t) slot       | H slot            |
//! |---------------------|------------------|------------------|-------------------|
//! | H                   | Ry(-t), continue | flush            | cancel            |
//! | X                   | Ry(-t)           | commutes         | becomes Z         |
//! | Y                   | commutes         | Rx(-t)           | Y with phase -1   |
//! | Z                   | Ry(-t)           | Rx(-t)           | becomes X         |
//! | Rx                  | flush            | angles add       | (merges above H)  |
//! | Ry                  | angles add       |                  |                   |
//! | controlled X target | flush            | commutes         | controlled Z      |
//! | controlled Y target | commutes         | flush            | controlled Y, -1  |
//! | controlled Z target | flush            | flush            | controlled X      |
//! | SWAP (uncontrolled) | slots exchange between the two qubits                   |
//!
//! Any nonempty slot on a control qubit flushes. Diagonal non-Pauli gates
//! (S, T, R1, Rz, Z-only Pauli exponentials) enqueue only past empty slots.

use std::f64::consts::PI;

use crate::error::{Result, SimError};
use crate::gate::{GateKind, GateOp, Lowered, Pauli};
use crate::queue::{Executor, PhasePermQueue, PhasePermRecord};
use crate::state::{PairwiseBlock, SparseWavefunction};

/// Pending single-qubit rotations for one qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QubitSlots {
    pub ry: Option<f64>,
    pub rx: Option<f64>,
    pub h: bool,
}

impl QubitSlots {
    pub fn is_empty(&self) -> bool {
        self.ry.is_none() && self.rx.is_none() && !self.h
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CommuteResult {
    /// The gate was rewritten into these records, now on the queue.
    Transformed(Vec<PhasePermRecord>),
    /// The gate merged into (or cancelled against) a slot.
    Absorbed,
    /// A pairwise gate that passes every slot and finds the queue empty; the
    /// caller applies it to the state right away.
    Direct(PairwiseBlock, u128),
    /// No rewrite exists; nothing was changed.
    FlushRequired,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SchedulerStats {
    pub flushes: u64,
    pub absorbed: u64,
    pub enqueued: u64,
    pub direct: u64,
}

enum Plan {
    Enqueue(Vec<(usize, QubitSlots)>, Vec<PhasePermRecord>),
    Merge(usize, QubitSlots),
    Direct(PairwiseBlock, u128),
    Flush,
}

/// Per-qubit slots plus the shared phase/permutation queue.
#[derive(Clone, Debug)]
pub struct Scheduler {
    slots: Vec<QubitSlots>,
    queue: PhasePermQueue,
    stats: SchedulerStats,
}

impl Scheduler {
    pub fn new(num_qubits: usize) -> Self {
        Scheduler {
            slots: vec![QubitSlots::default(); num_qubits],
            queue: PhasePermQueue::new(),
            stats: SchedulerStats::default(),
        }
    }

    pub fn slots(&self, qubit: usize) -> &QubitSlots {
        &self.slots[qubit]
    }

    pub fn slots_mut(&mut self, qubit: usize) -> &mut QubitSlots {
        &mut self.slots[qubit]
    }

    pub fn queue(&self) -> &PhasePermQueue {
        &self.queue
    }

    pub fn queue_mut(&mut self) -> &mut PhasePermQueue {
        &mut self.queue
    }

    pub fn stats(&self) -> &SchedulerStats {
        &self.stats
    }

    /// True when no slot is set and the queue is empty.
    pub fn is_idle(&self) -> bool {
        self.queue.is_empty() && self.slots.iter().all(QubitSlots::is_empty)
    }

    /// Tries to move `op` past the pending slots without touching the state.
    /// On success the slots and queue are updated; on `FlushRequired` they are
    /// left as they were.
    pub fn commute(&mut self, op: &GateOp) -> CommuteResult {
        match self.plan(op) {
            Plan::Flush => CommuteResult::FlushRequired,
            Plan::Merge(q, s) => {
                self.slots[q] = s;
                self.stats.absorbed += 1;
                CommuteResult::Absorbed
            }
            Plan::Direct(block, cm) => {
                if !self.queue.is_empty() {
                    return CommuteResult::FlushRequired;
                }
                self.stats.direct += 1;
                CommuteResult::Direct(block, cm)
            }
            Plan::Enqueue(updates, records) => {
                for (q, s) in updates {
                    self.slots[q] = s;
                }
                for r in &records {
                    self.queue.enqueue(r.clone());
                }
                self.stats.enqueued += records.len() as u64;
                CommuteResult::Transformed(records)
            }
        }
    }

    fn plan(&self, op: &GateOp) -> Plan {
        if op.is_measurement() || op.controls.iter().any(|&c| !self.slots[c].is_empty()) {
            return Plan::Flush;
        }
        let cm = op.control_mask();
        let controlled = cm != 0;
        let t = op.targets[0];
        let slot = self.slots[t];
        match &op.kind {
            GateKind::X | GateKind::Y | GateKind::Z => {
                let p = match op.kind {
                    GateKind::X => Pauli::X,
                    GateKind::Y => Pauli::Y,
                    _ => Pauli::Z,
                };
                match push_pauli(slot, p, controlled) {
                    Some((s, p, negate)) => {
                        let mut records = vec![pauli_record(cm, t, p)];
                        if negate {
                            records.push(PhasePermRecord::phase(cm, PI).expect("no targets"));
                        }
                        Plan::Enqueue(vec![(t, s)], records)
                    }
                    None => Plan::Flush,
                }
            }
            GateKind::H | GateKind::Rx(_) | GateKind::Ry(_) if controlled => {
                if slot.is_empty() {
                    match op.lower() {
                        Lowered::Pairwise(block, cm) => Plan::Direct(block, cm),
                        _ => unreachable!("rotation lowers to a pairwise block"),
                    }
                } else {
                    Plan::Flush
                }
            }
            GateKind::H => {
                if slot.rx.is_some() {
                    return Plan::Flush;
                }
                let s = QubitSlots {
                    ry: slot.ry.map(|a| -a),
                    rx: None,
                    h: !slot.h,
                };
                Plan::Merge(t, s)
            }
            GateKind::Rx(phi) => {
                if slot.ry.is_some() {
                    return Plan::Flush;
                }
                Plan::Merge(
                    t,
                    QubitSlots {
                        rx: Some(slot.rx.unwrap_or(0.0) + phi),
                        ..slot
                    },
                )
            }
            GateKind::Ry(theta) => Plan::Merge(
                t,
                QubitSlots {
                    ry: Some(slot.ry.unwrap_or(0.0) + theta),
                    ..slot
                },
            ),
            GateKind::Swap if !controlled => {
                let u = op.targets[1];
                let record = PhasePermRecord::swap(0, t, u).expect("validated swap");
                Plan::Enqueue(vec![(t, self.slots[u]), (u, slot)], vec![record])
            }
            _ => {
                if op.targets.iter().any(|&q| !self.slots[q].is_empty()) {
                    return Plan::Flush;
                }
                match op.lower() {
                    Lowered::Record(r) => Plan::Enqueue(Vec::new(), vec![r]),
                    Lowered::Pairwise(block, cm) => Plan::Direct(block, cm),
                    Lowered::Measure => Plan::Flush,
                }
            }
        }
    }

    /// Routes one unitary gate through the slots, flushing when required.
    pub fn dispatch(
        &mut self,
        op: &GateOp,
        state: &mut SparseWavefunction,
        exec: &mut Executor,
    ) -> Result<()> {
        op.validate(state.num_qubits())?;
        if op.is_measurement() {
            return Err(SimError::InvalidArgument(
                "measurements go through the measurement path".into(),
            ));
        }
        match self.commute(op) {
            CommuteResult::Direct(block, cm) => state.apply_pairwise(&block, cm),
            CommuteResult::Transformed(_) | CommuteResult::Absorbed => Ok(()),
            CommuteResult::FlushRequired => {
                self.flush_qubits(&op.qubits(), state, exec)?;
                self.stats.flushes += 1;
                match self.commute(op) {
                    CommuteResult::Direct(block, cm) => state.apply_pairwise(&block, cm),
                    CommuteResult::FlushRequired => Err(SimError::Internal(format!(
                        "gate {op} still blocked after flush"
                    ))),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Executes the queue, then the slots of `qubits` (H, Rx, Ry per qubit).
    pub fn flush_qubits(
        &mut self,
        qubits: &[usize],
        state: &mut SparseWavefunction,
        exec: &mut Executor,
    ) -> Result<()> {
        exec.execute(&mut self.queue, state);
        for &q in qubits {
            self.apply_slots(q, state)?;
        }
        Ok(())
    }

    /// Executes everything pending; afterwards [`is_idle`](Self::is_idle) holds.
    pub fn flush_all(&mut self, state: &mut SparseWavefunction, exec: &mut Executor) -> Result<()> {
        exec.execute(&mut self.queue, state);
        for q in 0..self.slots.len() {
            self.apply_slots(q, state)?;
        }
        Ok(())
    }

    /// Executes the whole queue and the slots of the measured qubits only.
    pub fn pre_measure_flush(
        &mut self,
        qubits: &[usize],
        state: &mut SparseWavefunction,
        exec: &mut Executor,
    ) -> Result<()> {
        let pending = !self.queue.is_empty() || qubits.iter().any(|&q| !self.slots[q].is_empty());
        if pending {
            self.stats.flushes += 1;
            self.flush_qubits(qubits, state, exec)?;
        }
        Ok(())
    }

    fn apply_slots(&mut self, q: usize, state: &mut SparseWavefunction) -> Result<()> {
        let slot = std::mem::take(&mut self.slots[q]);
        if slot.h {
            state.apply_pairwise(&PairwiseBlock::hadamard(q), 0)?;
        }
        if let Some(phi) = slot.rx {
            if phi != 0.0 {
                state.apply_pairwise(&PairwiseBlock::rx(q, phi), 0)?;
            }
        }
        if let Some(theta) = slot.ry {
            if theta != 0.0 {
                state.apply_pairwise(&PairwiseBlock::ry(q, theta), 0)?;
            }
        }
        Ok(())
    }
}

/// Pushes a Pauli on one qubit through its Ry, Rx and H slots. A controlled
/// Pauli cannot negate a rotation angle (the rewrite would only hold on the
/// control subspace), so anticommuting rotations block it.
fn push_pauli(slot: QubitSlots, p: Pauli, controlled: bool) -> Option<(QubitSlots, Pauli, bool)> {
    let mut s = slot;
    if let Some(theta) = s.ry {
        if p != Pauli::Y {
            if controlled {
                return None;
            }
            s.ry = Some(-theta);
        }
    }
    if let Some(phi) = s.rx {
        if p != Pauli::X {
            if controlled {
                return None;
            }
            s.rx = Some(-phi);
        }
    }
    if !s.h {
        return Some((s, p, false));
    }
    Some(match p {
        Pauli::X => (s, Pauli::Z, false),
        Pauli::Z => (s, Pauli::X, false),
        Pauli::Y => (s, Pauli::Y, true),
    })
}

fn pauli_record(cm: u128, t: usize, p: Pauli) -> PhasePermRecord {
    let r = match p {
        Pauli::X => PhasePermRecord::flip(cm, 1u128 << t),
        Pauli::Y => PhasePermRecord::pauli_y(cm, t),
        Pauli::Z => PhasePermRecord::phase(cm | (1u128 << t), PI),
    };
    r.expect("validated gate")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::{ParallelConfig, PhasePermAction};
    use crate::label::BasisLabel;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn setup(n: usize) -> (Scheduler, SparseWavefunction, Executor) {
        (
            Scheduler::new(n),
            SparseWavefunction::new(n).unwrap(),
            Executor::new(ParallelConfig::default()),
        )
    }

    #[test]
    fn hadamard_cancels_in_slot() {
        let (mut s, mut st, mut ex) = setup(2);
        s.slots_mut(1).h = true;
        s.dispatch(&GateOp::h(1), &mut st, &mut ex).unwrap();
        assert!(s.slots(1).is_empty());
        assert_eq!(st.state_size(), 1);
        assert_eq!(s.stats().absorbed, 1);
    }

    #[test]
    fn hadamard_negates_ry_slot() {
        let (mut s, _, _) = setup(2);
        s.slots_mut(1).ry = Some(0.6);
        assert_eq!(s.commute(&GateOp::h(1)), CommuteResult::Absorbed);
        assert_eq!(*s.slots(1), QubitSlots { ry: Some(-0.6), rx: None, h: true });
    }

    #[test]
    fn x_through_h_becomes_z() {
        let (mut s, mut st, mut ex) = setup(3);
        s.slots_mut(2).h = true;
        s.dispatch(&GateOp::x(2), &mut st, &mut ex).unwrap();
        assert_eq!(s.queue().len(), 1);
        let r = &s.queue().records()[0];
        assert_eq!(r.action, PhasePermAction::PhaseConst(PI));
        assert_eq!(r.control_mask, 1 << 2);
        assert!(s.slots(2).h);
    }

    #[test]
    fn toffoli_blocked_by_rx_flushes_in_order() {
        // Qubits 3 and 4 control, 5 is the target; qubit 4 carries H then Rx.
        let (mut s, mut st, mut ex) = setup(8);
        s.slots_mut(3).h = true;
        s.slots_mut(4).h = true;
        s.slots_mut(4).rx = Some(0.75);
        s.slots_mut(6).rx = Some(-PI / 4.0);
        s.queue_mut().enqueue(PhasePermRecord::phase(1 << 2, PI).unwrap());
        let op = GateOp::mcx(&[3, 4], 5);
        assert_eq!(s.commute(&op), CommuteResult::FlushRequired);
        s.dispatch(&op, &mut st, &mut ex).unwrap();
        assert_eq!(s.stats().flushes, 1);
        assert!(s.slots(3).is_empty() && s.slots(4).is_empty());
        assert_eq!(s.slots(6).rx, Some(-PI / 4.0));
        assert_eq!(s.queue().len(), 1);
        assert_eq!(s.queue().records()[0].action, PhasePermAction::FlipMask(1 << 5));
        // H on 3, H then Rx(0.75) on 4 applied to |0...0>.
        assert_eq!(st.state_size(), 4);
        let (sn, cs) = (0.375f64.sin(), 0.375f64.cos());
        let a0 = Complex64::new(FRAC_1_SQRT_2 * FRAC_1_SQRT_2, 0.0);
        let expect_q4_0 = a0 * Complex64::new(cs, -sn);
        assert!((st.amplitude(BasisLabel::new(0)) - expect_q4_0).norm() < 1e-12);
    }

    #[test]
    fn flush_all_applies_queue_before_hadamard() {
        let (mut s, mut st, mut ex) = setup(1);
        s.flush_all(&mut st, &mut ex).unwrap();
        assert_eq!(st.dump(), vec![(BasisLabel::new(0), Complex64::new(1.0, 0.0))]);

        let (mut s, mut st, mut ex) = setup(1);
        s.slots_mut(0).h = true;
        s.flush_all(&mut st, &mut ex).unwrap();
        assert!((st.amplitude(BasisLabel::new(1)).re - FRAC_1_SQRT_2).abs() < 1e-15);

        let (mut s, mut st, mut ex) = setup(1);
        s.queue_mut().enqueue(PhasePermRecord::flip(0, 1).unwrap());
        s.slots_mut(0).h = true;
        s.flush_all(&mut st, &mut ex).unwrap();
        assert!((st.amplitude(BasisLabel::new(0)).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((st.amplitude(BasisLabel::new(1)).re + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(s.is_idle());
    }

    #[test]
    fn pre_measure_flush_keeps_other_slots() {
        let (mut s, mut st, mut ex) = setup(2);
        s.slots_mut(1).h = true;
        s.pre_measure_flush(&[0], &mut st, &mut ex).unwrap();
        assert!(s.slots(1).h);
        assert_eq!(st.state_size(), 1);
        assert_eq!(s.stats().flushes, 0);

        s.slots_mut(0).h = true;
        s.pre_measure_flush(&[0], &mut st, &mut ex).unwrap();
        assert_eq!(st.state_size(), 2);
        assert!(s.slots(1).h);
    }

    #[test]
    fn swap_exchanges_slots() {
        let (mut s, _, _) = setup(2);
        s.slots_mut(0).rx = Some(0.2);
        s.slots_mut(1).h = true;
        let r = s.commute(&GateOp::swap(0, 1));
        assert!(matches!(r, CommuteResult::Transformed(_)));
        assert!(s.slots(0).h && s.slots(0).rx.is_none());
        assert_eq!(s.slots(1).rx, Some(0.2));
    }

    #[test]
    fn controlled_rotation_goes_direct_only_on_empty_queue() {
        let (mut s, _, _) = setup(2);
        let op = GateOp::h(1).controlled_by(&[0]);
        assert!(matches!(s.commute(&op), CommuteResult::Direct(..)));
        s.queue_mut().enqueue(PhasePermRecord::flip(0, 1).unwrap());
        assert_eq!(s.commute(&op), CommuteResult::FlushRequired);
    }
}
