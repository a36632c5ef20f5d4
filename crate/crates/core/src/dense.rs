//! Full state-vector reference simulator.
//!
//! Deliberately naive: every gate is a textbook 2x2 (or permutation) action
//! over all `2^n` amplitudes. Used as the oracle for the sparse path.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::gate::{GateKind, GateOp, Pauli};
use crate::label::{mask_of, BasisLabel};
use crate::program::{run_on, Program};
use crate::sim::Backend;
use crate::state::{MeasurementOutcome, SparseWavefunction};

pub const MAX_DENSE_QUBITS: usize = 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

type Mat2 = [[Complex64; 2]; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_DENSE_QUBITS {
            return Err(SimError::Config(format!(
                "dense oracle supports 1..={MAX_DENSE_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[0] = ONE;
        Ok(DenseState { num_qubits, amps })
    }

    pub fn from_sparse(sparse: &SparseWavefunction) -> Result<Self> {
        let mut d = Self::new(sparse.num_qubits())?;
        d.amps[0] = ZERO;
        for (b, a) in sparse.iter() {
            d.amps[b.bits() as usize] = a;
        }
        Ok(d)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.num_qubits)?;
        let cm = op.control_mask() as usize;
        let t = op.targets[0];
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phase = |theta: f64| Complex64::from_polar(1.0, theta);
        let m: Mat2 = match &op.kind {
            GateKind::X => pauli_matrix(Pauli::X),
            GateKind::Y => pauli_matrix(Pauli::Y),
            GateKind::Z => pauli_matrix(Pauli::Z),
            GateKind::H => [[ONE * h, ONE * h], [ONE * h, -ONE * h]],
            GateKind::S => [[ONE, ZERO], [ZERO, I]],
            GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
            GateKind::T => [[ONE, ZERO], [ZERO, phase(std::f64::consts::FRAC_PI_4)]],
            GateKind::Tdg => [[ONE, ZERO], [ZERO, phase(-std::f64::consts::FRAC_PI_4)]],
            GateKind::R1(th) => [[ONE, ZERO], [ZERO, phase(*th)]],
            GateKind::Rx(th) => {
                let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
                [[ONE * c, -I * s], [-I * s, ONE * c]]
            }
            GateKind::Ry(th) => {
                let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
                [[ONE * c, -ONE * s], [ONE * s, ONE * c]]
            }
            GateKind::Rz(th) => [[phase(-th / 2.0), ZERO], [ZERO, phase(th / 2.0)]],
            GateKind::Swap => {
                self.apply_swap(cm, t, op.targets[1]);
                return Ok(());
            }
            GateKind::PauliExp { theta, .. } => {
                self.apply_pauli_exp(cm, &op.pauli_terms().expect("pauli gate"), *theta);
                return Ok(());
            }
            GateKind::MeasureZ => {
                return Err(SimError::InvalidArgument(
                    "use measure() for measurements".into(),
                ))
            }
        };
        self.apply_single(cm, t, &m);
        Ok(())
    }

    fn apply_single(&mut self, cm: usize, t: usize, m: &Mat2) {
        let tb = 1usize << t;
        for i in 0..self.amps.len() {
            if i & tb != 0 || i & cm != cm {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | tb]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | tb] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn apply_swap(&mut self, cm: usize, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & cm == cm && i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ab ^ bb);
            }
        }
    }

    /// `cos(theta/2) psi - i sin(theta/2) P psi` on the control subspace.
    fn apply_pauli_exp(&mut self, cm: usize, terms: &[(usize, Pauli)], theta: f64) {
        let mut p_psi = self.amps.clone();
        for &(q, p) in terms {
            let m = pauli_matrix(p);
            let tb = 1usize << q;
            for i in 0..p_psi.len() {
                if i & tb == 0 {
                    let (a0, a1) = (p_psi[i], p_psi[i | tb]);
                    p_psi[i] = m[0][0] * a0 + m[0][1] * a1;
                    p_psi[i | tb] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
        }
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & cm == cm {
                *a = *a * c - I * s * p_psi[i];
            }
        }
    }

    /// Z-product measurement with the same branch rule as the sparse path:
    /// even parity iff `u < p_even / (p_even + p_odd)`.
    pub fn measure(&mut self, qubits: &[usize], u: f64) -> Result<MeasurementOutcome> {
        GateOp::measure(qubits).validate(self.num_qubits)?;
        let mask = mask_of(qubits);
        let odd = |i: usize| BasisLabel::new(i as u128).parity(mask);
        let (mut p_even, mut p_odd) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if odd(i) {
                p_odd += a.norm_sqr();
            } else {
                p_even += a.norm_sqr();
            }
        }
        let total = p_even + p_odd;
        let result = u >= p_even / total;
        let p = if result { p_odd } else { p_even };
        if p <= 0.0 {
            return Err(SimError::Internal(
                "selected measurement branch has zero probability".into(),
            ));
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a = if odd(i) == result { *a * scale } else { ZERO };
        }
        Ok(MeasurementOutcome {
            result,
            probability: p / total,
        })
    }
}

fn pauli_matrix(p: Pauli) -> Mat2 {
    match p {
        Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
        Pauli::Y => [[ZERO, -I], [I, ZERO]],
        Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

/// Largest per-amplitude deviation, treating absent sparse entries as zero.
pub fn compare(dense: &DenseState, sparse: &SparseWavefunction) -> Result<f64> {
    if dense.num_qubits != sparse.num_qubits() {
        return Err(SimError::InvalidArgument(format!(
            "dimension mismatch: dense {} qubits, sparse {}",
            dense.num_qubits,
            sparse.num_qubits()
        )));
    }
    Ok(dense
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| (a - sparse.amplitude(BasisLabel::new(i as u128))).norm())
        .fold(0.0, f64::max))
}

/// Dense backend drawing measurement randomness from the same seeded
/// stream as [`Simulator`](crate::sim::Simulator).
#[derive(Clone, Debug)]
pub struct DenseSimulator {
    state: DenseState,
    rng: ChaCha8Rng,
}

impl DenseSimulator {
    pub fn new(num_qubits: usize, seed: u64) -> Result<Self> {
        Ok(DenseSimulator {
            state: DenseState::new(num_qubits)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }
}

impl Backend for DenseSimulator {
    fn num_qubits(&self) -> usize {
        self.state.num_qubits
    }

    fn apply(&mut self, op: &GateOp) -> Result<()> {
        if op.is_measurement() {
            return self.measure(&op.targets).map(|_| ());
        }
        self.state.apply(op)
    }

    fn measure(&mut self, qubits: &[usize]) -> Result<bool> {
        let u: f64 = self.rng.gen();
        self.state.measure(qubits, u).map(|o| o.result)
    }
}

/// Runs `program` on the dense oracle.
pub fn run_dense(program: &Program, seed: u64) -> Result<(DenseState, Vec<bool>)> {
    let mut sim = DenseSimulator::new(program.num_qubits, seed)?;
    let record = run_on(program, &mut sim)?;
    Ok((sim.state, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn hadamard_and_x() {
        let mut d = DenseState::new(1).unwrap();
        d.apply(&GateOp::h(0)).unwrap();
        assert!((d.amplitudes()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d.amplitudes()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        let mut d = DenseState::new(1).unwrap();
        d.apply(&GateOp::x(0)).unwrap();
        assert_eq!(d.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn rz_convention_matches_sparse() {
        let theta = 0.9;
        let mut d = DenseState::new(1).unwrap();
        d.apply(&GateOp::h(0)).unwrap();
        d.apply(&GateOp::single(GateKind::Rz(theta), 0)).unwrap();

        let mut s = crate::sim::Simulator::new(1, Default::default(), 0).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::single(GateKind::Rz(theta), 0)).unwrap();
        let s = s.into_state().unwrap();
        assert!(compare(&d, &s).unwrap() < 1e-15);
        let expect = Complex64::from_polar(FRAC_1_SQRT_2, -theta / 2.0);
        assert!((d.amplitudes()[0] - expect).norm() < 1e-15);
    }

    #[test]
    fn compare_counts_missing_entries() {
        let d = DenseState::new(2).unwrap();
        let s = SparseWavefunction::new(2).unwrap();
        assert_eq!(compare(&d, &s).unwrap(), 0.0);

        let mut d = DenseState::new(2).unwrap();
        d.amps[3] = Complex64::new(0.1, 0.0);
        assert!((compare(&d, &s).unwrap() - 0.1).abs() < 1e-15);
        assert!(compare(&d, &SparseWavefunction::new(3).unwrap()).is_err());
    }

    #[test]
    fn capped_at_twenty_qubits() {
        assert!(DenseState::new(MAX_DENSE_QUBITS + 1).is_err());
    }

    #[test]
    fn controlled_pauli_exp_only_acts_on_controls() {
        let mut d = DenseState::new(2).unwrap();
        d.apply(&GateOp::pauli_exp(&[(1, Pauli::X)], 1.0).controlled_by(&[0]))
            .unwrap();
        assert_eq!(d.amplitudes()[0], ONE);
    }
}
