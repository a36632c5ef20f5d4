//! Order finding and factoring.

use std::time::Instant;

use sparsim_core::{RunStats, SimConfig};

use crate::numtheory::{
    carmichael, continued_fraction_order, convergent_denominators, factorize,
    factors_from_order, find_factoring_generator, gcd, is_prime_power, lcm, mod_pow,
    multiplicative_order,
};
use crate::phase::{estimate_phase, prepared};
use crate::{bit_length, Adder, Arithmetic, ShorError, Uncompute};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoringInstance {
    pub modulus: u64,
    pub bits: usize,
    pub generator: u64,
    /// Multiplicative order of the generator.
    pub order: u64,
    pub phase_bits: u32,
    pub adder: Adder,
    pub uncompute: Uncompute,
}

impl FactoringInstance {
    /// Validates `modulus` and picks (or checks) a generator of maximal order.
    pub fn new(
        modulus: u64,
        adder: Adder,
        uncompute: Uncompute,
        generator: Option<u64>,
    ) -> Result<Self, ShorError> {
        let bad = |m: String| Err(ShorError::InvalidInstance(m));
        if modulus < 15 || modulus.is_multiple_of(2) {
            return bad(format!("{modulus} is not an odd composite of at least 15"));
        }
        if is_prime_power(modulus) {
            return bad(format!("{modulus} is a prime power"));
        }
        if modulus >= 1 << 20 {
            return bad(format!("{modulus} is beyond the supported 20-bit range"));
        }
        let lambda = carmichael(modulus);
        let generator = match generator {
            Some(g) => {
                if gcd(g, modulus) != 1 || multiplicative_order(g, modulus) != Some(lambda) {
                    return bad(format!(
                        "generator {g} does not have maximal order {lambda} modulo {modulus}"
                    ));
                }
                g
            }
            None => find_factoring_generator(modulus)
                .ok_or_else(|| ShorError::InvalidInstance(format!("no usable generator for {modulus}")))?,
        };
        let bits = bit_length(modulus);
        Ok(FactoringInstance {
            modulus,
            bits,
            generator,
            order: lambda,
            phase_bits: 2 * bits as u32 + 1,
            adder,
            uncompute,
        })
    }

    pub fn arithmetic(&self) -> Arithmetic {
        Arithmetic::new(self.adder, self.bits, self.modulus, self.uncompute)
    }

    pub fn num_qubits(&self) -> usize {
        self.arithmetic().num_qubits()
    }
}

/// One simulated order-finding attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoringRun {
    pub seed: u64,
    /// Measured phase numerator over `2^phase_bits`.
    pub phase: u64,
    pub order: Option<u64>,
    pub factors: Option<(u64, u64)>,
    /// Every measurement outcome in order, including uncomputation flags.
    pub measurements: Vec<bool>,
    pub stats: RunStats,
}

pub fn run_factoring(
    inst: &FactoringInstance,
    seed: u64,
    config: SimConfig,
) -> Result<FactoringRun, ShorError> {
    let start = Instant::now();
    let arith = inst.arithmetic();
    let mut sim = prepared(&arith, config, seed)?;
    let phase = estimate_phase(&mut sim, &arith, inst.generator, inst.modulus, inst.phase_bits)?;
    sim.inner.flush()?;
    let order = continued_fraction_order(phase, inst.phase_bits, inst.modulus, inst.generator);
    let factors = order.and_then(|r| factors_from_order(inst.generator, r, inst.modulus));
    let stats = RunStats {
        qubits_used: arith.num_qubits(),
        max_state_size: sim.inner.max_state_size(),
        gate_count: sim.inner.gate_count(),
        flush_count: sim.inner.flush_count(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        success: factors.is_some(),
    };
    Ok(FactoringRun {
        seed,
        phase,
        order,
        factors,
        measurements: sim.record,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoringOutcome {
    pub factors: Option<(u64, u64)>,
    pub runs: Vec<FactoringRun>,
}

impl FactoringOutcome {
    /// Stats of the deciding run: the first success, else the last attempt.
    pub fn stats(&self) -> RunStats {
        let run = self
            .runs
            .iter()
            .find(|r| r.stats.success)
            .or(self.runs.last())
            .expect("at least one run");
        RunStats {
            success: self.factors.is_some(),
            ..run.stats
        }
    }
}

/// Strips factors from a multiple of the order while `g^(r/p) = 1`.
fn reduce_order(g: u64, mut r: u64, n: u64) -> u64 {
    for (p, _) in factorize(r) {
        while r.is_multiple_of(p) && mod_pow(g, r / p, n) == 1 {
            r /= p;
        }
    }
    r
}

/// Runs up to `trials` attempts with seeds `seed, seed + 1, ...`. A failed
/// attempt still contributes its convergent denominators: the least common
/// multiple of denominators from two attempts often recovers the order.
pub fn factor(
    inst: &FactoringInstance,
    seed: u64,
    trials: u32,
    config: SimConfig,
) -> Result<FactoringOutcome, ShorError> {
    let mut runs = Vec::new();
    let mut denominators: Vec<u64> = Vec::new();
    let (g, n) = (inst.generator, inst.modulus);
    for t in 0..trials {
        let mut run = run_factoring(inst, seed.wrapping_add(u64::from(t)), config)?;
        if let Some(f) = run.factors {
            runs.push(run);
            return Ok(FactoringOutcome {
                factors: Some(f),
                runs,
            });
        }
        let fresh = convergent_denominators(run.phase, inst.phase_bits, n);
        let combined = fresh.iter().find_map(|&a| {
            denominators.iter().find_map(|&b| {
                let r = lcm(a, b);
                (mod_pow(g, r, n) == 1)
                    .then(|| reduce_order(g, r, n))
                    .and_then(|r| factors_from_order(g, r, n).map(|f| (r, f)))
            })
        });
        denominators.extend(fresh);
        if let Some((r, f)) = combined {
            run.order = Some(r);
            run.factors = Some(f);
            run.stats.success = true;
            runs.push(run);
            return Ok(FactoringOutcome {
                factors: Some(f),
                runs,
            });
        }
        runs.push(run);
    }
    Ok(FactoringOutcome {
        factors: None,
        runs,
    })
}
