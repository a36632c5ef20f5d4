//! Semi-classical phase estimation with one recycled control qubit.

use std::f64::consts::PI;

use sparsim_core::{Backend, GateOp, Result, SimConfig, Simulator};

use crate::numtheory::mod_pow;
use crate::Arithmetic;

/// Wraps a backend and keeps every measurement outcome, in order.
#[derive(Debug)]
pub struct Recorder<B> {
    pub inner: B,
    pub record: Vec<bool>,
}

impl<B: Backend> Recorder<B> {
    pub fn new(inner: B) -> Self {
        Recorder {
            inner,
            record: Vec::new(),
        }
    }
}

impl<B: Backend> Backend for Recorder<B> {
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn apply(&mut self, op: &GateOp) -> Result<()> {
        if op.is_measurement() {
            return self.measure(&op.targets).map(|_| ());
        }
        self.inner.apply(op)
    }

    fn measure(&mut self, qubits: &[usize]) -> Result<bool> {
        let r = self.inner.measure(qubits)?;
        self.record.push(r);
        Ok(r)
    }
}

/// Estimates the phase of multiplication by `base` modulo the arithmetic's
/// modulus to `m` bits. Bit `i` of the result comes from the multiplication
/// by `base^(2^(m-1-i))`; earlier bits feed a phase correction before the
/// final Hadamard. Controlled multiplications by 1 are skipped.
pub fn estimate_phase<B: Backend>(
    sim: &mut B,
    arith: &Arithmetic,
    base: u64,
    modulus: u64,
    m: u32,
) -> Result<u64> {
    let ctrl = arith.ctrl();
    let mut j = 0u64;
    for i in 0..m {
        let k = m - 1 - i;
        sim.apply(&GateOp::h(ctrl))?;
        let c = mod_pow(base, 1u64 << k, modulus);
        if c != 1 {
            arith.ctrl_modmul(sim, c)?;
        }
        let correction: f64 = (0..i)
            .filter(|&l| (j >> l) & 1 == 1)
            .map(|l| -2.0 * PI / f64::from(1u32 << (i - l + 1)))
            .sum();
        if correction != 0.0 {
            sim.apply(&GateOp::r1(correction, ctrl))?;
        }
        sim.apply(&GateOp::h(ctrl))?;
        if sim.measure(&[ctrl])? {
            j |= 1 << i;
            sim.apply(&GateOp::x(ctrl))?;
        }
    }
    Ok(j)
}

/// Fresh simulator for `arith` with `x = 1`.
pub(crate) fn prepared(arith: &Arithmetic, config: SimConfig, seed: u64) -> Result<Recorder<Simulator>> {
    let mut sim = Simulator::new(arith.num_qubits(), config, seed)?;
    sim.apply(&GateOp::x(arith.x()[0]))?;
    Ok(Recorder::new(sim))
}
