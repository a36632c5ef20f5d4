//! Fourier-basis arithmetic.
//!
//! Register layout for an `n`-bit modulus uses `2n + 3` qubits: `ctrl`, the
//! multiplicand `x` (n), the accumulator `b` (n + 1, kept in the Fourier
//! basis during additions) and one ancilla for the overflow test.
//!
//! The transform omits the final bit reversal: after [`qft`], qubit `j` of
//! a register holding `y` is `|0> + e^(2 pi i y / 2^(j+1)) |1>`.

use std::f64::consts::PI;

use sparsim_core::{Backend, GateOp, Result};

use crate::cdkm::mod_pow2;
use crate::numtheory::{mod_inv, mod_mul};
use crate::Uncompute;

/// Fourier transform of `reg` (little-endian) without the final swaps.
pub fn qft(reg: &[usize]) -> Vec<GateOp> {
    let mut ops = Vec::new();
    for j in (0..reg.len()).rev() {
        ops.push(GateOp::h(reg[j]));
        for l in (0..j).rev() {
            let theta = PI / f64::from(1u32 << (j - l));
            ops.push(GateOp::r1(theta, reg[j]).controlled_by(&[reg[l]]));
        }
    }
    ops
}

pub fn iqft(reg: &[usize]) -> Vec<GateOp> {
    qft(reg)
        .iter()
        .rev()
        .map(|g| g.adjoint().expect("unitary"))
        .collect()
}

/// Adds the constant `a` (mod `2^len`) to a register in the Fourier basis,
/// controlled on `controls`. Only phase rotations are used.
pub fn qft_add(reg: &[usize], a: u64, controls: &[usize]) -> Vec<GateOp> {
    reg.iter()
        .enumerate()
        .filter_map(|(j, &q)| {
            let modulus = 1u128 << (j + 1);
            let k = (a as u128) % modulus;
            (k != 0).then(|| {
                let theta = 2.0 * PI * k as f64 / modulus as f64;
                GateOp::r1(theta, q).controlled_by(controls)
            })
        })
        .collect()
}

fn apply_all<B: Backend>(sim: &mut B, ops: &[GateOp]) -> Result<()> {
    ops.iter().try_for_each(|op| sim.apply(op))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QftLayout {
    pub n: usize,
    pub ctrl: usize,
    pub x: Vec<usize>,
    pub b: Vec<usize>,
    pub anc: usize,
}

impl QftLayout {
    pub fn new(n: usize) -> Self {
        QftLayout {
            n,
            ctrl: 0,
            x: (1..=n).collect(),
            b: (n + 1..2 * n + 2).collect(),
            anc: 2 * n + 2,
        }
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.n + 3
    }

    fn msb(&self) -> usize {
        self.b[self.n]
    }
}

/// Modular arithmetic with the Fourier-basis adder.
#[derive(Clone, Debug)]
pub struct QftArithmetic {
    pub layout: QftLayout,
    pub modulus: u64,
    pub uncompute: Uncompute,
}

impl QftArithmetic {
    /// # Panics
    /// If `modulus` does not fit in `n` bits.
    pub fn new(n: usize, modulus: u64, uncompute: Uncompute) -> Self {
        assert!(modulus > 0 && modulus < (1 << n), "modulus must fit n bits");
        QftArithmetic {
            layout: QftLayout::new(n),
            modulus,
            uncompute,
        }
    }

    /// `b <- b + a mod N` on a Fourier-basis `b` when all `controls` are set.
    /// Requires `b < N`, `a < N`; the ancilla returns to zero.
    pub fn modadd<B: Backend>(&self, sim: &mut B, a: u64, controls: &[usize]) -> Result<()> {
        let l = &self.layout;
        let n_mod = self.modulus;
        let a = a % n_mod;
        if a == 0 {
            return Ok(());
        }
        let width = 1u64 << (l.n + 1);
        apply_all(sim, &qft_add(&l.b, a, controls))?;
        apply_all(sim, &qft_add(&l.b, width - n_mod, &[]))?;
        apply_all(sim, &iqft(&l.b))?;
        sim.apply(&GateOp::cx(l.msb(), l.anc))?;
        apply_all(sim, &qft(&l.b))?;
        apply_all(sim, &qft_add(&l.b, n_mod, &[l.anc]))?;
        // The ancilla is set iff no reduction happened, which is exactly
        // when the result is at least a.
        apply_all(sim, &qft_add(&l.b, width - a, controls))?;
        apply_all(sim, &iqft(&l.b))?;
        match self.uncompute {
            Uncompute::Coherent => {
                sim.apply(&GateOp::x(l.msb()))?;
                sim.apply(&GateOp::cx(l.msb(), l.anc))?;
                sim.apply(&GateOp::x(l.msb()))?;
            }
            Uncompute::Measurement => {
                sim.apply(&GateOp::h(l.anc))?;
                if sim.measure(&[l.anc])? {
                    // Undo the phase (-1)^anc, where anc = NOT msb.
                    sim.apply(&GateOp::x(l.msb()))?;
                    sim.apply(&GateOp::z(l.msb()))?;
                    sim.apply(&GateOp::x(l.msb()))?;
                    sim.apply(&GateOp::x(l.anc))?;
                }
            }
        }
        apply_all(sim, &qft(&l.b))?;
        apply_all(sim, &qft_add(&l.b, a, controls))
    }

    /// `x <- c x mod N` when `ctrl` is set; `b` must start and ends at zero.
    ///
    /// # Panics
    /// If `c` is not invertible modulo `N`.
    pub fn ctrl_modmul<B: Backend>(&self, sim: &mut B, c: u64) -> Result<()> {
        let l = &self.layout;
        let n_mod = self.modulus;
        let c_inv = mod_inv(c, n_mod).expect("multiplier must be invertible");
        apply_all(sim, &qft(&l.b))?;
        for (i, &xi) in l.x.iter().enumerate() {
            self.modadd(sim, mod_mul(c, mod_pow2(i, n_mod), n_mod), &[l.ctrl, xi])?;
        }
        apply_all(sim, &iqft(&l.b))?;
        for (&xi, &bi) in l.x.iter().zip(&l.b) {
            sim.apply(&GateOp::swap(xi, bi).controlled_by(&[l.ctrl]))?;
        }
        apply_all(sim, &qft(&l.b))?;
        for (i, &xi) in l.x.iter().enumerate() {
            let term = mod_mul(c_inv, mod_pow2(i, n_mod), n_mod);
            self.modadd(sim, n_mod - term, &[l.ctrl, xi])?;
        }
        apply_all(sim, &iqft(&l.b))
    }
}
