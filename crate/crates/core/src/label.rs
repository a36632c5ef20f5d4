//! Fixed-width computational basis labels.

use std::fmt;

/// Number of qubits a [`BasisLabel`] can address.
pub const LABEL_BITS: usize = 128;

/// A computational basis state; qubit `k` lives at bit position `k`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel(u128);

impl BasisLabel {
    pub const ZERO: BasisLabel = BasisLabel(0);

    #[inline]
    pub const fn new(bits: u128) -> Self {
        BasisLabel(bits)
    }

    #[inline]
    pub const fn bits(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn bit(self, qubit: usize) -> bool {
        (self.0 >> qubit) & 1 == 1
    }

    #[inline]
    pub fn flip(self, mask: u128) -> Self {
        BasisLabel(self.0 ^ mask)
    }

    /// True when an odd number of the bits selected by `mask` are set.
    #[inline]
    pub fn parity(self, mask: u128) -> bool {
        (self.0 & mask).count_ones() & 1 == 1
    }

    #[inline]
    pub fn has_all(self, mask: u128) -> bool {
        self.0 & mask == mask
    }

    /// Bitstring with qubit `num_qubits - 1` on the left.
    pub fn to_bitstring(self, num_qubits: usize) -> String {
        (0..num_qubits)
            .rev()
            .map(|q| if self.bit(q) { '1' } else { '0' })
            .collect()
    }
}

impl From<u128> for BasisLabel {
    fn from(bits: u128) -> Self {
        BasisLabel(bits)
    }
}

impl fmt::Debug for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BasisLabel({:#x})", self.0)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// Bit mask with one bit set per listed qubit.
pub fn mask_of(qubits: &[usize]) -> u128 {
    qubits.iter().fold(0u128, |m, &q| m | (1u128 << q))
}
