//! Sparse wavefunction storage and direct (unqueued) gate application.
//!
//! A state is kept as an unordered map from basis label to amplitude holding
//! only entries with magnitude above a pruning threshold. Every gate pass
//! builds a fresh map from a single iteration over the current one.

use num_complex::Complex64;
use rustc_hash::FxHashMap;

use crate::error::{Result, SimError};
use crate::gate::Pauli;
use crate::label::{BasisLabel, LABEL_BITS};

pub type Amplitude = Complex64;

pub(crate) type AmpMap = FxHashMap<BasisLabel, Amplitude>;

/// Amplitudes at or below this magnitude are dropped.
pub const DEFAULT_PRUNE_EPS: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn new_map(capacity: usize) -> AmpMap {
    FxHashMap::with_capacity_and_hasher(capacity, Default::default())
}

/// Outcome of a Z-product measurement. `result` is true for odd parity
/// (bit value 1, eigenvalue -1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementOutcome {
    pub result: bool,
    pub probability: f64,
}

/// A gate that couples each label `b` with exactly one partner `b'`.
///
/// For a label `b`, [`PairwiseBlock::row`] returns `(a, c)` such that the new
/// amplitude of `b` is `a * alpha_b + c * alpha_{b'}`.
#[derive(Clone, Debug, PartialEq)]
pub enum PairwiseBlock {
    /// A 2x2 unitary on one target qubit, indexed by the target bit value.
    SingleQubit {
        target: usize,
        matrix: [[Complex64; 2]; 2],
    },
    /// `exp(-i theta/2 P)` for a Pauli string with at least one X or Y.
    PauliExp {
        flip: u128,
        phase_mask: u128,
        y_phase: Complex64,
        cos: f64,
        sin: f64,
    },
}

impl PairwiseBlock {
    pub fn single(target: usize, matrix: [[Complex64; 2]; 2]) -> Self {
        PairwiseBlock::SingleQubit { target, matrix }
    }

    pub fn hadamard(target: usize) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::single(target, [[h, h], [h, -h]])
    }

    pub fn rx(target: usize, theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let c = Complex64::new(c, 0.0);
        let ms = Complex64::new(0.0, -s);
        Self::single(target, [[c, ms], [ms, c]])
    }

    pub fn ry(target: usize, theta: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        Self::single(
            target,
            [
                [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
                [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
            ],
        )
    }

    /// Block for `exp(-i theta/2 P)`; `None` when the string is pure Z
    /// (diagonal, handled as a phase record instead).
    pub fn pauli_exp(paulis: &[(usize, Pauli)], theta: f64) -> Option<Self> {
        let mut flip = 0u128;
        let mut phase_mask = 0u128;
        let mut num_y = 0u32;
        for &(q, p) in paulis {
            let bit = 1u128 << q;
            match p {
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    phase_mask |= bit;
                    num_y += 1;
                }
                Pauli::Z => phase_mask |= bit,
            }
        }
        if flip == 0 {
            return None;
        }
        let y_phase = match num_y % 4 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        let (sin, cos) = (theta / 2.0).sin_cos();
        Some(PairwiseBlock::PauliExp {
            flip,
            phase_mask,
            y_phase,
            cos,
            sin,
        })
    }

    /// Mask of qubits the block acts on.
    pub fn support(&self) -> u128 {
        match self {
            PairwiseBlock::SingleQubit { target, .. } => 1u128 << target,
            PairwiseBlock::PauliExp {
                flip, phase_mask, ..
            } => flip | phase_mask,
        }
    }

    /// The bits flipped between a label and its partner.
    #[inline]
    pub fn flip_mask(&self) -> u128 {
        match self {
            PairwiseBlock::SingleQubit { target, .. } => 1u128 << target,
            PairwiseBlock::PauliExp { flip, .. } => *flip,
        }
    }

    #[inline]
    pub fn partner(&self, b: BasisLabel) -> BasisLabel {
        b.flip(self.flip_mask())
    }

    #[inline]
    pub fn row(&self, b: BasisLabel) -> (Complex64, Complex64) {
        match self {
            PairwiseBlock::SingleQubit { target, matrix } => {
                if b.bit(*target) {
                    (matrix[1][1], matrix[1][0])
                } else {
                    (matrix[0][0], matrix[0][1])
                }
            }
            PairwiseBlock::PauliExp {
                flip,
                phase_mask,
                y_phase,
                cos,
                sin,
            } => {
                // <b| P |b'> = omega(b') with P|c> = omega(c)|c ^ flip>.
                let partner = b.flip(*flip);
                let omega = if partner.parity(*phase_mask) {
                    -*y_phase
                } else {
                    *y_phase
                };
                (Complex64::new(*cos, 0.0), Complex64::new(0.0, -*sin) * omega)
            }
        }
    }
}

/// Sparse map from basis label to amplitude.
#[derive(Clone, Debug)]
pub struct SparseWavefunction {
    num_qubits: usize,
    entries: AmpMap,
    prune_eps: f64,
    peak: usize,
}

impl SparseWavefunction {
    /// The all-zeros state on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > LABEL_BITS {
            return Err(SimError::Config(format!(
                "qubit count {num_qubits} outside 1..={LABEL_BITS}"
            )));
        }
        let mut entries = new_map(1);
        entries.insert(BasisLabel::ZERO, ONE);
        Ok(SparseWavefunction {
            num_qubits,
            entries,
            prune_eps: DEFAULT_PRUNE_EPS,
            peak: 1,
        })
    }

    /// Builds a state from explicit entries. Entries at or below the pruning
    /// threshold are dropped; the caller is responsible for normalization.
    pub fn from_entries<I>(num_qubits: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisLabel, Amplitude)>,
    {
        let mut state = Self::new(num_qubits)?;
        let range = state.range_mask();
        let mut map = new_map(0);
        for (b, a) in entries {
            if b.bits() & !range != 0 {
                return Err(SimError::InvalidArgument(format!(
                    "label {b} has bits beyond qubit {}",
                    num_qubits - 1
                )));
            }
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(SimError::InvalidArgument(format!(
                    "non-finite amplitude for label {b}"
                )));
            }
            if a.norm() > state.prune_eps {
                map.insert(b, a);
            }
        }
        state.replace_entries(map);
        state.peak = state.entries.len();
        Ok(state)
    }

    pub fn with_prune_eps(mut self, eps: f64) -> Self {
        self.prune_eps = eps;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn prune_eps(&self) -> f64 {
        self.prune_eps
    }

    /// Number of stored entries.
    pub fn state_size(&self) -> usize {
        self.entries.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, b: BasisLabel) -> Amplitude {
        self.entries.get(&b).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisLabel, Amplitude)> + '_ {
        self.entries.iter().map(|(b, a)| (*b, *a))
    }

    /// Entries sorted ascending by label.
    pub fn dump(&self) -> Vec<(BasisLabel, Amplitude)> {
        let mut out: Vec<_> = self.iter().collect();
        out.sort_unstable_by_key(|(b, _)| *b);
        out
    }

    /// Largest state size seen since the last [`reset_peak`](Self::reset_peak).
    pub fn peak_size(&self) -> usize {
        self.peak
    }

    pub fn reset_peak(&mut self) {
        self.peak = self.entries.len();
    }

    pub(crate) fn entries(&self) -> &AmpMap {
        &self.entries
    }

    pub(crate) fn replace_entries(&mut self, map: AmpMap) {
        self.entries = map;
        self.peak = self.peak.max(self.entries.len());
    }

    pub(crate) fn range_mask(&self) -> u128 {
        if self.num_qubits == LABEL_BITS {
            u128::MAX
        } else {
            (1u128 << self.num_qubits) - 1
        }
    }

    fn check_mask(&self, mask: u128, what: &str) -> Result<()> {
        if mask & !self.range_mask() != 0 {
            return Err(SimError::InvalidArgument(format!(
                "{what} reference qubits beyond {}",
                self.num_qubits - 1
            )));
        }
        Ok(())
    }

    /// Applies a pairwise gate, optionally controlled on every bit of
    /// `controls` being set, in one pass over the current map.
    pub fn apply_pairwise(&mut self, block: &PairwiseBlock, controls: u128) -> Result<()> {
        let support = block.support();
        self.check_mask(support, "gate targets")?;
        self.check_mask(controls, "controls")?;
        if support & controls != 0 {
            return Err(SimError::InvalidArgument(
                "controls overlap gate targets".into(),
            ));
        }
        let eps = self.prune_eps;
        let flip = block.flip_mask();
        let mut out = new_map(self.entries.len());
        let mut put = |b: BasisLabel, a: Amplitude| {
            if a.norm() > eps {
                out.insert(b, a);
            }
        };
        for (&b, &alpha) in &self.entries {
            if !b.has_all(controls) {
                put(b, alpha);
                continue;
            }
            let partner = b.flip(flip);
            let (a11, a12) = block.row(b);
            let (a22, a21) = block.row(partner);
            match self.entries.get(&partner) {
                Some(&beta) => {
                    // Both present: only the label holding a 1 at the lowest
                    // differing bit emits the pair.
                    let lowest = flip & flip.wrapping_neg();
                    if b.bits() & lowest != 0 {
                        put(b, a11 * alpha + a12 * beta);
                        put(partner, a21 * alpha + a22 * beta);
                    }
                }
                None => {
                    put(b, a11 * alpha);
                    put(partner, a21 * alpha);
                }
            }
        }
        self.replace_entries(out);
        Ok(())
    }

    /// Applies `exp(-i theta/2 P)` for the Pauli string `paulis`, controlled
    /// on `controls`.
    pub fn apply_pauli_exponential(
        &mut self,
        paulis: &[(usize, Pauli)],
        theta: f64,
        controls: u128,
    ) -> Result<()> {
        if paulis.is_empty() {
            return Err(SimError::InvalidArgument("empty Pauli string".into()));
        }
        let qubits: Vec<usize> = paulis.iter().map(|&(q, _)| q).collect();
        check_distinct(&qubits)?;
        match PairwiseBlock::pauli_exp(paulis, theta) {
            Some(block) => self.apply_pairwise(&block, controls),
            None => {
                let z_mask = crate::label::mask_of(&qubits);
                self.check_mask(z_mask, "Pauli string")?;
                self.check_mask(controls, "controls")?;
                if z_mask & controls != 0 {
                    return Err(SimError::InvalidArgument(
                        "controls overlap Pauli string".into(),
                    ));
                }
                let (s, c) = (theta / 2.0).sin_cos();
                let even = Complex64::new(c, -s);
                let odd = Complex64::new(c, s);
                for (b, a) in self.entries.iter_mut() {
                    if b.has_all(controls) {
                        *a *= if b.parity(z_mask) { odd } else { even };
                    }
                }
                Ok(())
            }
        }
    }

    /// Measures the Z-product on `mask` using the uniform draw `u` in [0, 1).
    /// The even-parity branch is selected iff `u < p_even`.
    pub fn measure(&mut self, mask: u128, u: f64) -> Result<MeasurementOutcome> {
        self.check_mask(mask, "measured qubits")?;
        if mask == 0 {
            return Err(SimError::InvalidArgument("nothing to measure".into()));
        }
        let (mut p_even, mut p_odd) = (0.0f64, 0.0f64);
        for (b, a) in &self.entries {
            if b.parity(mask) {
                p_odd += a.norm_sqr();
            } else {
                p_even += a.norm_sqr();
            }
        }
        let total = p_even + p_odd;
        let result = u >= p_even / total;
        let p_branch = if result { p_odd } else { p_even };
        if p_branch <= 0.0 {
            return Err(SimError::Internal(
                "selected measurement branch has zero probability".into(),
            ));
        }
        let scale = 1.0 / p_branch.sqrt();
        self.entries.retain(|b, _| b.parity(mask) == result);
        for a in self.entries.values_mut() {
            *a *= scale;
        }
        Ok(MeasurementOutcome {
            result,
            probability: p_branch / total,
        })
    }
}

pub(crate) fn check_distinct(qubits: &[usize]) -> Result<()> {
    for (i, q) in qubits.iter().enumerate() {
        if qubits[..i].contains(q) {
            return Err(SimError::InvalidArgument(format!(
                "qubit {q} listed twice"
            )));
        }
    }
    Ok(())
}
