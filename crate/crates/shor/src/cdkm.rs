//! Ripple-carry arithmetic on computational-basis registers.
//!
//! Register layout for an `n`-bit modulus uses `5n + 2` qubits:
//!
//! | register   | width | role                                               |
//! |------------|-------|----------------------------------------------------|
//! | `ctrl`     | 1     | phase-estimation control                           |
//! | `x`        | n     | multiplicand, holds the running power              |
//! | `acc`      | n + 1 | accumulator; the top qubit catches overflow        |
//! | `addend`   | n     | a classical constant loaded under control          |
//! | `modulus`  | n     | `N`, loaded only when a reduction is needed        |
//! | `scratch`  | n     | adder ancilla, comparator carries; the comparison  |
//! |            |       | flag lives in its top qubit                        |

use sparsim_core::{Backend, GateOp, Result};

use crate::numtheory::{mod_inv, mod_mul};
use crate::Uncompute;

/// `MAJ(c, b, a)`: leaves the carry-out in `a`.
fn maj(c: usize, b: usize, a: usize) -> [GateOp; 3] {
    [GateOp::cx(a, b), GateOp::cx(a, c), GateOp::mcx(&[c, b], a)]
}

/// `UMA(c, b, a)`: undoes [`maj`] and writes the sum bit into `b`.
fn uma(c: usize, b: usize, a: usize) -> [GateOp; 3] {
    [GateOp::mcx(&[c, b], a), GateOp::cx(a, c), GateOp::cx(c, b)]
}

/// In-place addition `|a>|b>|0> -> |a>|a + b mod 2^n>|0>` with an optional
/// carry-out qubit that is XORed with the final carry.
///
/// # Panics
/// If the registers differ in width or are empty.
pub fn cdkm_add(a: &[usize], b: &[usize], ancilla: usize, carry_out: Option<usize>) -> Vec<GateOp> {
    assert!(!a.is_empty() && a.len() == b.len(), "register widths differ");
    let n = a.len();
    let mut ops = Vec::with_capacity(6 * n + 1);
    ops.extend(maj(ancilla, b[0], a[0]));
    for i in 1..n {
        ops.extend(maj(a[i - 1], b[i], a[i]));
    }
    if let Some(z) = carry_out {
        ops.push(GateOp::cx(a[n - 1], z));
    }
    for i in (1..n).rev() {
        ops.extend(uma(a[i - 1], b[i], a[i]));
    }
    ops.extend(uma(ancilla, b[0], a[0]));
    ops
}

/// Inverse of [`cdkm_add`]: `|a>|b> -> |a>|b - a>`, borrow XORed into `carry_out`.
pub fn cdkm_sub(a: &[usize], b: &[usize], ancilla: usize, carry_out: Option<usize>) -> Vec<GateOp> {
    let mut ops = cdkm_add(a, b, ancilla, carry_out);
    ops.reverse();
    ops
}

/// Computes `[s >= modulus]` into `carries[n - 1]` for the `(n+1)`-bit value
/// in `s`, using `carries[..n - 1]` as clean workspace. The comparison is the
/// carry-out of `s + (2^(n+1) - modulus)`, where the constant is classical.
/// Self-inverse.
pub fn compare_geq(s: &[usize], carries: &[usize], modulus: u64) -> Vec<GateOp> {
    let n = carries.len();
    assert_eq!(s.len(), n + 1, "comparator needs an n+1 bit value");
    assert!(modulus > 0 && modulus < 1 << n, "modulus must fit n bits");
    let k = (1u64 << (n + 1)) - modulus;
    // Below the lowest set bit z of k no carry can arise, and the carry into
    // bit z + 1 is s_z itself.
    let z = k.trailing_zeros() as usize;
    let carry_in = |i: usize| if i == z + 1 { s[z] } else { carries[i - 2] };
    let step = |i: usize| -> Vec<GateOp> {
        let (si, c, t) = (s[i], carry_in(i), carries[i - 1]);
        if (k >> i) & 1 == 1 {
            // t ^= s_i OR c
            vec![
                GateOp::x(si),
                GateOp::x(c),
                GateOp::mcx(&[si, c], t),
                GateOp::x(si),
                GateOp::x(c),
                GateOp::x(t),
            ]
        } else {
            vec![GateOp::mcx(&[si, c], t)]
        }
    };
    let mut ops: Vec<GateOp> = (z + 1..=n).flat_map(step).collect();
    for i in (z + 1..n).rev() {
        ops.extend(step(i));
    }
    ops
}

/// Loads the bits of `value` into `reg` with X gates controlled on `controls`.
fn load_constant(reg: &[usize], value: u64, controls: &[usize]) -> Vec<GateOp> {
    reg.iter()
        .enumerate()
        .filter(|(i, _)| (value >> i) & 1 == 1)
        .map(|(_, &q)| GateOp::mcx(controls, q))
        .collect()
}

fn apply_all<B: Backend>(sim: &mut B, ops: &[GateOp]) -> Result<()> {
    ops.iter().try_for_each(|op| sim.apply(op))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdkmLayout {
    pub n: usize,
    pub ctrl: usize,
    pub x: Vec<usize>,
    pub acc: Vec<usize>,
    pub addend: Vec<usize>,
    pub modulus: Vec<usize>,
    pub scratch: Vec<usize>,
}

impl CdkmLayout {
    pub fn new(n: usize) -> Self {
        let range = |start: usize, len: usize| (start..start + len).collect::<Vec<_>>();
        CdkmLayout {
            n,
            ctrl: 0,
            x: range(1, n),
            acc: range(1 + n, n + 1),
            addend: range(2 + 2 * n, n),
            modulus: range(2 + 3 * n, n),
            scratch: range(2 + 4 * n, n),
        }
    }

    pub fn num_qubits(&self) -> usize {
        5 * self.n + 2
    }

    fn flag(&self) -> usize {
        self.scratch[self.n - 1]
    }

    fn overflow(&self) -> usize {
        self.acc[self.n]
    }
}

/// Modular arithmetic with the ripple-carry adder.
#[derive(Clone, Debug)]
pub struct CdkmArithmetic {
    pub layout: CdkmLayout,
    pub modulus: u64,
    pub uncompute: Uncompute,
}

impl CdkmArithmetic {
    /// # Panics
    /// If `n < 2` or `modulus` is zero or does not fit in `n` bits.
    pub fn new(n: usize, modulus: u64, uncompute: Uncompute) -> Self {
        assert!(n >= 2, "need at least two bits of workspace");
        assert!(modulus > 0 && modulus < (1 << n), "modulus must fit n bits");
        CdkmArithmetic {
            layout: CdkmLayout::new(n),
            modulus,
            uncompute,
        }
    }

    fn add_addend(&self) -> Vec<GateOp> {
        let l = &self.layout;
        cdkm_add(&l.addend, &l.acc[..l.n], l.scratch[0], Some(l.overflow()))
    }

    fn sub_addend(&self) -> Vec<GateOp> {
        let l = &self.layout;
        cdkm_sub(&l.addend, &l.acc[..l.n], l.scratch[0], Some(l.overflow()))
    }

    /// `acc <- acc + a mod N` when every qubit in `controls` is set.
    /// Requires `acc < N` and `a < N`; all workspace returns to zero.
    pub fn modadd<B: Backend>(&self, sim: &mut B, a: u64, controls: &[usize]) -> Result<()> {
        let l = &self.layout;
        let n_mod = self.modulus;
        let a = a % n_mod;
        if a == 0 {
            return Ok(());
        }
        let load = load_constant(&l.addend, a, controls);
        let compare = compare_geq(&l.acc, &l.scratch, n_mod);
        let load_modulus = load_constant(&l.modulus, n_mod, &[l.flag()]);
        let sub_modulus = cdkm_sub(&l.modulus, &l.acc[..l.n], l.scratch[0], Some(l.overflow()));

        apply_all(sim, &load)?;
        apply_all(sim, &self.add_addend())?;
        apply_all(sim, &compare)?;
        apply_all(sim, &load_modulus)?;
        apply_all(sim, &sub_modulus)?;
        apply_all(sim, &load_modulus)?;
        // The flag equals [result < a]: after subtracting the addend again
        // the overflow qubit holds exactly that sign.
        match self.uncompute {
            Uncompute::Coherent => {
                apply_all(sim, &self.sub_addend())?;
                sim.apply(&GateOp::cx(l.overflow(), l.flag()))?;
                apply_all(sim, &self.add_addend())?;
            }
            Uncompute::Measurement => {
                sim.apply(&GateOp::h(l.flag()))?;
                if sim.measure(&[l.flag()])? {
                    apply_all(sim, &self.sub_addend())?;
                    sim.apply(&GateOp::z(l.overflow()))?;
                    apply_all(sim, &self.add_addend())?;
                    sim.apply(&GateOp::x(l.flag()))?;
                }
            }
        }
        apply_all(sim, &load)
    }

    /// `x <- c x mod N` when `ctrl` is set; `acc` must start and ends at zero.
    ///
    /// # Panics
    /// If `c` is not invertible modulo `N`.
    pub fn ctrl_modmul<B: Backend>(&self, sim: &mut B, c: u64) -> Result<()> {
        let l = &self.layout;
        let n_mod = self.modulus;
        let c_inv = mod_inv(c, n_mod).expect("multiplier must be invertible");
        for (i, &xi) in l.x.iter().enumerate() {
            let term = mod_mul(c, mod_pow2(i, n_mod), n_mod);
            self.modadd(sim, term, &[l.ctrl, xi])?;
        }
        for (&xi, &ai) in l.x.iter().zip(&l.acc) {
            sim.apply(&GateOp::swap(xi, ai).controlled_by(&[l.ctrl]))?;
        }
        for (i, &xi) in l.x.iter().enumerate() {
            let term = mod_mul(c_inv, mod_pow2(i, n_mod), n_mod);
            self.modadd(sim, n_mod - term, &[l.ctrl, xi])?;
        }
        Ok(())
    }
}

pub(crate) fn mod_pow2(i: usize, n: u64) -> u64 {
    crate::numtheory::mod_pow(2, i as u64, n)
}
