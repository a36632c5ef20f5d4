//! Gate instruction set.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;

use crate::error::{Result, SimError};
use crate::label::{mask_of, LABEL_BITS};
use crate::queue::PhasePermRecord;
use crate::state::PairwiseBlock;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    /// `diag(1, e^{i theta})`.
    R1(f64),
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Swap,
    /// `exp(-i theta/2 P)`; one Pauli per target, in target order.
    PauliExp { paulis: Vec<Pauli>, theta: f64 },
    /// Joint Z-product measurement over all targets.
    MeasureZ,
}

impl GateKind {
    pub fn mnemonic(&self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::R1(_) => "r1",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Swap => "swap",
            GateKind::PauliExp { .. } => "pexp",
            GateKind::MeasureZ => "mz",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            GateKind::R1(t) | GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) => Some(*t),
            GateKind::PauliExp { theta, .. } => Some(*theta),
            _ => None,
        }
    }

    fn expected_targets(&self) -> Option<usize> {
        match self {
            GateKind::Swap => Some(2),
            GateKind::PauliExp { paulis, .. } => Some(paulis.len()),
            GateKind::MeasureZ => None,
            _ => Some(1),
        }
    }
}

/// One instruction: a gate kind with its target and control qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        GateOp {
            kind,
            targets,
            controls: Vec::new(),
        }
    }

    pub fn single(kind: GateKind, target: usize) -> Self {
        Self::new(kind, vec![target])
    }

    pub fn x(target: usize) -> Self {
        Self::single(GateKind::X, target)
    }

    pub fn h(target: usize) -> Self {
        Self::single(GateKind::H, target)
    }

    pub fn z(target: usize) -> Self {
        Self::single(GateKind::Z, target)
    }

    pub fn r1(theta: f64, target: usize) -> Self {
        Self::single(GateKind::R1(theta), target)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::x(target).controlled_by(&[control])
    }

    pub fn mcx(controls: &[usize], target: usize) -> Self {
        Self::x(target).controlled_by(controls)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b])
    }

    pub fn pauli_exp(paulis: &[(usize, Pauli)], theta: f64) -> Self {
        Self::new(
            GateKind::PauliExp {
                paulis: paulis.iter().map(|&(_, p)| p).collect(),
                theta,
            },
            paulis.iter().map(|&(q, _)| q).collect(),
        )
    }

    pub fn measure(qubits: &[usize]) -> Self {
        Self::new(GateKind::MeasureZ, qubits.to_vec())
    }

    /// Adds `controls` to the existing control list.
    pub fn controlled_by(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn is_measurement(&self) -> bool {
        self.kind == GateKind::MeasureZ
    }

    pub fn control_mask(&self) -> u128 {
        mask_of(&self.controls)
    }

    pub fn target_mask(&self) -> u128 {
        mask_of(&self.targets)
    }

    /// All qubits the op touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        self.controls.iter().chain(&self.targets).copied().collect()
    }

    /// Pauli string as `(qubit, pauli)` pairs, for `PauliExp` gates.
    pub fn pauli_terms(&self) -> Option<Vec<(usize, Pauli)>> {
        match &self.kind {
            GateKind::PauliExp { paulis, .. } => {
                Some(self.targets.iter().copied().zip(paulis.iter().copied()).collect())
            }
            _ => None,
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let bad = |msg: String| Err(SimError::InvalidArgument(format!("{}: {msg}", self.kind.mnemonic())));
        match self.kind.expected_targets() {
            Some(n) if self.targets.len() != n => {
                return bad(format!("expected {n} target(s), got {}", self.targets.len()))
            }
            None if self.targets.is_empty() => return bad("no qubits to measure".into()),
            _ => {}
        }
        if let GateKind::PauliExp { paulis, .. } = &self.kind {
            if paulis.is_empty() {
                return bad("empty Pauli string".into());
            }
        }
        if self.is_measurement() && !self.controls.is_empty() {
            return bad("measurements cannot be controlled".into());
        }
        if let Some(a) = self.kind.angle() {
            if !a.is_finite() {
                return bad("non-finite angle".into());
            }
        }
        let all = self.qubits();
        for (i, &q) in all.iter().enumerate() {
            if q >= num_qubits || q >= LABEL_BITS {
                return bad(format!("qubit {q} out of range (have {num_qubits})"));
            }
            if all[..i].contains(&q) {
                return bad(format!("qubit {q} used twice"));
            }
        }
        Ok(())
    }

    /// Inverse gate; `None` for measurements.
    pub fn adjoint(&self) -> Option<GateOp> {
        let kind = match &self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::R1(t) => GateKind::R1(-t),
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::PauliExp { paulis, theta } => GateKind::PauliExp {
                paulis: paulis.clone(),
                theta: -theta,
            },
            GateKind::MeasureZ => return None,
            k => k.clone(),
        };
        Some(GateOp {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
        })
    }

    /// Sparse-path form of the gate. Assumes the op has been validated.
    pub(crate) fn lower(&self) -> Lowered {
        let cm = self.control_mask();
        let t = self.targets.first().copied().unwrap_or(0);
        let tb = 1u128 << t;
        let record = |r: Result<PhasePermRecord>| Lowered::Record(r.expect("validated gate"));
        match &self.kind {
            GateKind::X => record(PhasePermRecord::flip(cm, tb)),
            GateKind::Y => record(PhasePermRecord::pauli_y(cm, t)),
            GateKind::Z => record(PhasePermRecord::phase(cm | tb, PI)),
            GateKind::S => record(PhasePermRecord::phase(cm | tb, FRAC_PI_2)),
            GateKind::Sdg => record(PhasePermRecord::phase(cm | tb, -FRAC_PI_2)),
            GateKind::T => record(PhasePermRecord::phase(cm | tb, FRAC_PI_4)),
            GateKind::Tdg => record(PhasePermRecord::phase(cm | tb, -FRAC_PI_4)),
            GateKind::R1(theta) => record(PhasePermRecord::phase(cm | tb, *theta)),
            GateKind::Rz(theta) => record(PhasePermRecord::z_parity(cm, tb, *theta)),
            GateKind::Swap => record(PhasePermRecord::swap(cm, self.targets[0], self.targets[1])),
            GateKind::H => Lowered::Pairwise(PairwiseBlock::hadamard(t), cm),
            GateKind::Rx(theta) => Lowered::Pairwise(PairwiseBlock::rx(t, *theta), cm),
            GateKind::Ry(theta) => Lowered::Pairwise(PairwiseBlock::ry(t, *theta), cm),
            GateKind::PauliExp { theta, .. } => {
                let terms = self.pauli_terms().expect("pauli gate");
                match PairwiseBlock::pauli_exp(&terms, *theta) {
                    Some(block) => Lowered::Pairwise(block, cm),
                    None => record(PhasePermRecord::z_parity(cm, self.target_mask(), *theta)),
                }
            }
            GateKind::MeasureZ => Lowered::Measure,
        }
    }
}

pub(crate) enum Lowered {
    Record(PhasePermRecord),
    Pairwise(PairwiseBlock, u128),
    Measure,
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in &self.controls {
            f.write_str("c")?;
        }
        f.write_str(self.kind.mnemonic())?;
        if let Some(angle) = self.kind.angle() {
            write!(f, " {angle:?}")?;
        }
        if let GateKind::PauliExp { paulis, .. } = &self.kind {
            let s: String = paulis.iter().map(|p| p.symbol()).collect();
            write!(f, " {s}")?;
        }
        for q in self.controls.iter().chain(&self.targets) {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(GateOp::cx(0, 1).validate(2).is_ok());
        assert!(GateOp::cx(0, 0).validate(2).is_err());
        assert!(GateOp::h(2).validate(2).is_err());
        assert!(GateOp::new(GateKind::Swap, vec![0]).validate(2).is_err());
        assert!(GateOp::measure(&[0]).controlled_by(&[1]).validate(2).is_err());
        assert!(GateOp::measure(&[]).validate(2).is_err());
        assert!(GateOp::pauli_exp(&[], 1.0).validate(2).is_err());
        assert!(GateOp::single(GateKind::Rx(f64::NAN), 0).validate(1).is_err());
    }

    #[test]
    fn display_uses_control_prefix() {
        let op = GateOp::single(GateKind::Rz(0.5), 2).controlled_by(&[0, 1]);
        assert_eq!(op.to_string(), "ccrz 0.5 0 1 2");
        let op = GateOp::pauli_exp(&[(0, Pauli::X), (3, Pauli::Z)], -1.25);
        assert_eq!(op.to_string(), "pexp -1.25 XZ 0 3");
    }

    #[test]
    fn adjoint_negates_angles() {
        assert_eq!(GateOp::single(GateKind::S, 0).adjoint().unwrap().kind, GateKind::Sdg);
        assert_eq!(
            GateOp::single(GateKind::Rx(0.3), 0).adjoint().unwrap().kind,
            GateKind::Rx(-0.3)
        );
        assert!(GateOp::measure(&[0]).adjoint().is_none());
    }
}
