//! Shor's algorithm on the sparse simulator: reversible modular arithmetic
//! (ripple-carry and Fourier-basis adders), semi-classical phase estimation
//! with a single control qubit, and drivers for factoring and integer
//! discrete logarithms.

use std::fmt;
use std::str::FromStr;

use sparsim_core::{Backend, Result};

pub mod cdkm;
pub mod dlog;
pub mod factoring;
pub mod numtheory;
pub mod phase;
pub mod qft;

pub use dlog::{dlog, run_dlog, DlogInstance, DlogOutcome, DlogRun};
pub use factoring::{factor, run_factoring, FactoringInstance, FactoringOutcome, FactoringRun};

/// How the comparison flag of a modular addition is cleared.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Uncompute {
    /// Recompute the comparison and XOR it away.
    #[default]
    Coherent,
    /// Hadamard and measure the flag, then fix the phase classically. The
    /// state briefly doubles in size.
    Measurement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Adder {
    #[default]
    Cdkm,
    Qft,
}

impl fmt::Display for Adder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Adder::Cdkm => "cdkm",
            Adder::Qft => "qft",
        })
    }
}

impl FromStr for Adder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cdkm" => Ok(Adder::Cdkm),
            "qft" => Ok(Adder::Qft),
            _ => Err(format!("unknown adder `{s}` (expected cdkm or qft)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ShorError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Sim(#[from] sparsim_core::SimError),
}

/// Controlled modular multiplier over either adder.
#[derive(Clone, Debug)]
pub enum Arithmetic {
    Cdkm(cdkm::CdkmArithmetic),
    Qft(qft::QftArithmetic),
}

impl Arithmetic {
    pub fn new(adder: Adder, bits: usize, modulus: u64, uncompute: Uncompute) -> Self {
        match adder {
            Adder::Cdkm => Arithmetic::Cdkm(cdkm::CdkmArithmetic::new(bits, modulus, uncompute)),
            Adder::Qft => Arithmetic::Qft(qft::QftArithmetic::new(bits, modulus, uncompute)),
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            Arithmetic::Cdkm(a) => a.layout.num_qubits(),
            Arithmetic::Qft(a) => a.layout.num_qubits(),
        }
    }

    pub fn ctrl(&self) -> usize {
        match self {
            Arithmetic::Cdkm(a) => a.layout.ctrl,
            Arithmetic::Qft(a) => a.layout.ctrl,
        }
    }

    pub fn x(&self) -> &[usize] {
        match self {
            Arithmetic::Cdkm(a) => &a.layout.x,
            Arithmetic::Qft(a) => &a.layout.x,
        }
    }

    /// `x <- c x mod N` when the control qubit is set.
    pub fn ctrl_modmul<B: Backend>(&self, sim: &mut B, c: u64) -> Result<()> {
        match self {
            Arithmetic::Cdkm(a) => a.ctrl_modmul(sim, c),
            Arithmetic::Qft(a) => a.ctrl_modmul(sim, c),
        }
    }
}

/// Bit length of `v`.
pub fn bit_length(v: u64) -> usize {
    (u64::BITS - v.leading_zeros()) as usize
}
