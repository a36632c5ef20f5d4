//! Discrete logarithms in the multiplicative group modulo a prime.
//!
//! Two phase estimations share one work register: the first multiplies by
//! powers of the generator `g`, the second by powers of `h = g^d`. For the
//! eigenvector with index `s`, the phases are `s/r` and `s d/r`, so the
//! rounded readings `s`, `t` satisfy `s d = t (mod r)`.

use std::time::Instant;

use sparsim_core::{RunStats, SimConfig};

use crate::numtheory::{is_prime, mod_pow, multiplicative_order, primitive_root, round_phase, solve_linear_congruence};
use crate::phase::{estimate_phase, prepared};
use crate::{bit_length, Adder, Arithmetic, ShorError, Uncompute};

/// Largest number of solutions of `s d = t (mod r)` that are tried.
const MAX_CANDIDATES: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogInstance {
    pub prime: u64,
    pub bits: usize,
    pub generator: u64,
    pub target: u64,
    /// Group order `p - 1`.
    pub order: u64,
    pub phase_bits: u32,
    pub adder: Adder,
    pub uncompute: Uncompute,
}

impl DlogInstance {
    pub fn new(
        prime: u64,
        generator: Option<u64>,
        target: u64,
        adder: Adder,
        uncompute: Uncompute,
    ) -> Result<Self, ShorError> {
        let bad = |m: String| Err(ShorError::InvalidInstance(m));
        if prime < 5 || !is_prime(prime) {
            return bad(format!("{prime} is not an odd prime of at least 5"));
        }
        if prime >= 1 << 20 {
            return bad(format!("{prime} is beyond the supported 20-bit range"));
        }
        let generator = match generator {
            Some(g) if multiplicative_order(g, prime) == Some(prime - 1) => g,
            Some(g) => return bad(format!("{g} does not generate the group modulo {prime}")),
            None => primitive_root(prime).expect("primes have primitive roots"),
        };
        if target == 0 || target >= prime {
            return bad(format!("target {target} is not a unit modulo {prime}"));
        }
        let bits = bit_length(prime);
        Ok(DlogInstance {
            prime,
            bits,
            generator,
            target,
            order: prime - 1,
            phase_bits: 2 * bits as u32 + 1,
            adder,
            uncompute,
        })
    }

    pub fn arithmetic(&self) -> Arithmetic {
        Arithmetic::new(self.adder, self.bits, self.prime, self.uncompute)
    }

    pub fn num_qubits(&self) -> usize {
        self.arithmetic().num_qubits()
    }

    /// Recovers `d` from the phase pair, checking candidates classically.
    pub fn recover(&self, j: u64, k: u64) -> Option<u64> {
        let r = self.order;
        let s = round_phase(j, self.phase_bits, r);
        let t = round_phase(k, self.phase_bits, r);
        solve_linear_congruence(s, t, r, MAX_CANDIDATES)
            .into_iter()
            .find(|&d| mod_pow(self.generator, d, self.prime) == self.target)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogRun {
    pub seed: u64,
    pub j: u64,
    pub k: u64,
    pub exponent: Option<u64>,
    pub measurements: Vec<bool>,
    pub stats: RunStats,
}

pub fn run_dlog(inst: &DlogInstance, seed: u64, config: SimConfig) -> Result<DlogRun, ShorError> {
    let start = Instant::now();
    let arith = inst.arithmetic();
    let mut sim = prepared(&arith, config, seed)?;
    let m = inst.phase_bits;
    let j = estimate_phase(&mut sim, &arith, inst.generator, inst.prime, m)?;
    let k = estimate_phase(&mut sim, &arith, inst.target, inst.prime, m)?;
    sim.inner.flush()?;
    let exponent = inst.recover(j, k);
    let stats = RunStats {
        qubits_used: arith.num_qubits(),
        max_state_size: sim.inner.max_state_size(),
        gate_count: sim.inner.gate_count(),
        flush_count: sim.inner.flush_count(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        success: exponent.is_some(),
    };
    Ok(DlogRun {
        seed,
        j,
        k,
        exponent,
        measurements: sim.record,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogOutcome {
    pub exponent: Option<u64>,
    pub runs: Vec<DlogRun>,
}

impl DlogOutcome {
    /// Stats of the deciding run: the first success, else the last attempt.
    pub fn stats(&self) -> RunStats {
        let run = self
            .runs
            .iter()
            .find(|r| r.stats.success)
            .or(self.runs.last())
            .expect("at least one run");
        run.stats
    }
}

/// Runs up to `trials` attempts with seeds `seed, seed + 1, ...`.
pub fn dlog(
    inst: &DlogInstance,
    seed: u64,
    trials: u32,
    config: SimConfig,
) -> Result<DlogOutcome, ShorError> {
    let mut runs = Vec::new();
    for t in 0..trials {
        let run = run_dlog(inst, seed.wrapping_add(u64::from(t)), config)?;
        let exponent = run.exponent;
        runs.push(run);
        if exponent.is_some() {
            return Ok(DlogOutcome { exponent, runs });
        }
    }
    Ok(DlogOutcome {
        exponent: None,
        runs,
    })
}
