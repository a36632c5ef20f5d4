//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p sparsim-shor --test acceptance`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sparsim_core::dense::{compare, run_dense};
use sparsim_core::program::run_on;
use sparsim_core::random::{random_program, RandomProgramConfig};
use sparsim_core::{
    run_program, GateOp, ParallelConfig, Program, SimConfig, Simulator, SparseWavefunction,
};
use sparsim_shor::numtheory::mod_pow;
use sparsim_shor::{
    dlog, factor, Adder, Arithmetic, DlogInstance, FactoringInstance, Uncompute,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

const PROGRAMS: u64 = 10_000;

fn program(seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    use rand::Rng;
    let n = rng.gen_range(1..=12);
    let ops = rng.gen_range(1..=200);
    random_program(&mut rng, n, ops, &RandomProgramConfig::default())
}

fn oracle_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..PROGRAMS {
        let p = program(seed);
        let (dense, dense_record) = run_dense(&p, seed).unwrap();
        let mut sim = Simulator::new(p.num_qubits, SimConfig::default(), seed).unwrap();
        let record = run_on(&p, &mut sim).unwrap();
        if record != dense_record {
            return outcome(false, format!("program {seed}: measurement records differ"));
        }
        let dev = compare(&dense, &sim.into_state().unwrap()).unwrap();
        worst = worst.max(dev);
        if dev > 1e-10 {
            return outcome(false, format!("program {seed}: deviation {dev:e}"));
        }
    }
    outcome(true, format!("{PROGRAMS} programs, max deviation {worst:.2e}"))
}

fn scheduler_transparency() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..PROGRAMS {
        let p = program(seed);
        let on = run_program(&p, seed, SimConfig::default()).unwrap();
        let off = run_program(&p, seed, SimConfig::default().with_scheduling(false)).unwrap();
        if on.measurements != off.measurements {
            return outcome(false, format!("program {seed}: measurement records differ"));
        }
        let a = SparseWavefunction::from_entries(p.num_qubits, on.dump.iter().copied()).unwrap();
        let b = SparseWavefunction::from_entries(p.num_qubits, off.dump.iter().copied()).unwrap();
        for (label, _) in on.dump.iter().chain(&off.dump) {
            worst = worst.max((a.amplitude(*label) - b.amplitude(*label)).norm());
        }
        if worst > 1e-10 {
            return outcome(false, format!("program {seed}: deviation {worst:e}"));
        }
    }
    outcome(true, format!("{PROGRAMS} programs, max deviation {worst:.2e}"))
}

struct FactoringRow {
    modulus: u64,
    factors: Option<(u64, u64)>,
    qubits: usize,
    max_state: u64,
    order: u64,
    millis: u128,
}

fn factoring_table(uncompute: Uncompute) -> Vec<FactoringRow> {
    [15u64, 35, 143]
        .into_iter()
        .map(|modulus| {
            let inst = FactoringInstance::new(modulus, Adder::Cdkm, uncompute, None).unwrap();
            let start = Instant::now();
            let out = factor(&inst, 1, 5, SimConfig::default()).unwrap();
            let max_state = out.runs.iter().map(|r| r.stats.max_state_size).max().unwrap();
            FactoringRow {
                modulus,
                factors: out.factors,
                qubits: out.stats().qubits_used,
                max_state: max_state as u64,
                order: inst.order,
                millis: start.elapsed().as_millis(),
            }
        })
        .collect()
}

fn factoring_correctness() -> Outcome {
    let expect = [((3u64, 5u64), 22usize), ((5, 7), 32), ((11, 13), 42)];
    let mut detail = Vec::new();
    let mut pass = true;
    for (row, (want, want_q)) in factoring_table(Uncompute::Coherent).iter().zip(expect) {
        pass &= row.factors == Some(want) && row.qubits == want_q && row.millis < 30_000;
        detail.push(format!(
            "N={} factors={:?} qubits={} {}ms",
            row.modulus, row.factors, row.qubits, row.millis
        ));
    }
    outcome(pass, detail.join("; "))
}

fn factoring_state_size() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for row in factoring_table(Uncompute::Measurement) {
        pass &= row.max_state == 2 * row.order;
        detail.push(format!("mbu N={} max_state={} (2r={})", row.modulus, row.max_state, 2 * row.order));
    }
    for row in factoring_table(Uncompute::Coherent) {
        pass &= row.order <= row.max_state && row.max_state <= 2 * row.order;
        detail.push(format!(
            "coherent N={} max_state={} in [{},{}]",
            row.modulus,
            row.max_state,
            row.order,
            2 * row.order
        ));
    }
    outcome(pass, detail.join("; "))
}

fn qft_factoring() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (n, want_q, reference) in [(15u64, 11usize, 128usize), (35, 15, 1536)] {
        let inst = FactoringInstance::new(n, Adder::Qft, Uncompute::Measurement, None).unwrap();
        let out = factor(&inst, 1, 5, SimConfig::default()).unwrap();
        let stats = out.stats();
        let max_state = out.runs.iter().map(|r| r.stats.max_state_size).max().unwrap();
        let within = max_state * 4 >= reference && max_state <= reference * 4;
        // Completion is the requirement here; recovery is probabilistic and
        // reported for inspection.
        pass &= !out.runs.is_empty() && stats.qubits_used == want_q && within;
        detail.push(format!(
            "N={n} factors={:?} qubits={} max_state={max_state} (reference {reference})",
            out.factors, stats.qubits_used
        ));
    }
    outcome(pass, detail.join("; "))
}

fn integer_dlog() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for (p, want_q, want_state) in [(11u64, 22usize, 40usize), (19, 27, 72)] {
        for uncompute in [Uncompute::Measurement, Uncompute::Coherent] {
            let g = sparsim_shor::numtheory::primitive_root(p).unwrap();
            let inst = DlogInstance::new(p, Some(g), mod_pow(g, 7, p), Adder::Cdkm, uncompute).unwrap();
            let out = dlog(&inst, 1, 5, SimConfig::default()).unwrap();
            let stats = out.stats();
            let max_state = out.runs.iter().map(|r| r.stats.max_state_size).max().unwrap();
            let state_ok = match uncompute {
                Uncompute::Measurement => max_state == want_state,
                Uncompute::Coherent => max_state * 2 >= want_state && max_state <= want_state * 2,
            };
            pass &= out.exponent == Some(7) && stats.qubits_used == want_q && state_ok;
            detail.push(format!(
                "p={p} {uncompute:?} d={:?} qubits={} max_state={max_state}",
                out.exponent, stats.qubits_used
            ));
        }
    }
    outcome(pass, detail.join("; "))
}

fn parallel_determinism() -> Outcome {
    let inst = FactoringInstance::new(143, Adder::Cdkm, Uncompute::Measurement, None).unwrap();
    let mut reference = None;
    let mut detail = Vec::new();
    // Default thresholds, then thresholds at zero so every pass is split.
    for (label, min_queue, min_states) in [("default", 64, 4096), ("forced", 0, 0)] {
        for threads in [1usize, 2, 4, 8] {
            let cfg = SimConfig {
                parallel: ParallelConfig { threads, min_queue, min_states },
                ..SimConfig::default()
            };
            let out = factor(&inst, 1, 5, cfg).unwrap();
            let key = (
                out.factors,
                out.runs.iter().map(|r| r.stats.max_state_size).collect::<Vec<_>>(),
                out.runs.iter().map(|r| r.measurements.clone()).collect::<Vec<_>>(),
            );
            match &reference {
                None => reference = Some(key),
                Some(r) if *r != key => {
                    return outcome(false, format!("{label} threads={threads} diverged"))
                }
                Some(_) => {}
            }
        }
        detail.push(format!("{label} thresholds: threads 1/2/4/8 identical"));
    }
    let (factors, states, _) = reference.unwrap();
    detail.push(format!("factors={factors:?} max_state={states:?}"));
    outcome(true, detail.join("; "))
}

fn parallel_gating() -> Outcome {
    // A workload that crosses both thresholds: 14 qubits in full superposition
    // with long runs of permutation gates between Hadamards.
    let n = 14;
    let mut p = Program::new(n);
    for q in 0..n {
        p.push(GateOp::h(q));
    }
    for round in 0..6 {
        for k in 0..(20 + 30 * round) {
            let t = (k + round) % n;
            p.push(GateOp::cx((t + 1) % n, t));
        }
        p.push(GateOp::h(round % n));
    }
    let mut detail = Vec::new();
    let mut pass = true;
    let mut serial_ms = 0.0;
    for threads in [1usize, 2, 4, 8] {
        let mut sim = Simulator::new(n, SimConfig::default().with_threads(threads), 0).unwrap();
        let start = Instant::now();
        run_on(&p, &mut sim).unwrap();
        sim.flush().unwrap();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        if threads == 1 {
            serial_ms = ms;
        }
        let s = *sim.exec_stats();
        let gated = s.min_parallel_queue.is_none_or(|q| q > 64)
            && s.min_parallel_states.is_none_or(|m| m > 4096);
        let used = if threads == 1 { s.parallel_passes == 0 } else { s.parallel_passes > 0 };
        pass &= gated && used;
        detail.push(format!(
            "threads={threads} parallel={} serial={} speedup={:.2}",
            s.parallel_passes,
            s.serial_passes,
            serial_ms / ms
        ));
    }
    // Small states must never be split, however long the queue.
    let inst = FactoringInstance::new(143, Adder::Cdkm, Uncompute::Measurement, None).unwrap();
    let arith = inst.arithmetic();
    let mut sim = Simulator::new(arith.num_qubits(), SimConfig::default().with_threads(8), 1).unwrap();
    sim.apply(&GateOp::x(arith.x()[0])).unwrap();
    sim.apply(&GateOp::h(arith.ctrl())).unwrap();
    arith.ctrl_modmul(&mut sim, inst.generator).unwrap();
    sim.flush().unwrap();
    pass &= sim.exec_stats().parallel_passes == 0;
    detail.push(format!("N=143 modmul parallel={}", sim.exec_stats().parallel_passes));
    outcome(pass, detail.join("; "))
}

fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn scale_smoke() -> Outcome {
    let inst = FactoringInstance::new(3599, Adder::Cdkm, Uncompute::Measurement, None).unwrap();
    let start = Instant::now();
    let out = factor(&inst, 1, 5, SimConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let stats = out.stats();
    let max_state = out.runs.iter().map(|r| r.stats.max_state_size).max().unwrap();
    let rss = peak_rss_mb();
    let pass = secs < 600.0
        && rss.is_some_and(|m| m < 1024.0)
        && stats.qubits_used == 62
        && max_state * 2 >= 3480
        && max_state <= 3480 * 2;
    outcome(
        pass,
        format!(
            "N=3599 factors={:?} runs={} qubits={} max_state={max_state} {secs:.1}s peak_rss={:.0}MB",
            out.factors,
            out.runs.len(),
            stats.qubits_used,
            rss.unwrap_or(f64::NAN)
        ),
    )
}

fn exhaustive_arithmetic() -> Outcome {
    use sparsim_shor::cdkm::cdkm_add;
    use sparsim_shor::numtheory::{gcd, mod_mul};
    use sparsim_shor::qft::{iqft, qft, qft_add};

    let read = |label: u128, reg: &[usize]| -> u64 {
        reg.iter().enumerate().map(|(i, &q)| (((label >> q) & 1) as u64) << i).sum()
    };
    let run = |n: usize, init: &[usize], ops: &[GateOp]| -> Option<u128> {
        let mut sim = Simulator::new(n, SimConfig::default(), 0).unwrap();
        for &q in init {
            sim.apply(&GateOp::x(q)).unwrap();
        }
        for op in ops {
            sim.apply(op).unwrap();
        }
        let dump = sim.dump().unwrap();
        (dump.len() == 1).then(|| dump[0].0.bits())
    };
    let bits_of = |reg: &[usize], v: u64| -> Vec<usize> {
        reg.iter().enumerate().filter(|(i, _)| (v >> i) & 1 == 1).map(|(_, &q)| q).collect()
    };
    let mut checked = 0u64;

    let (a, b) = ([0, 1, 2], [3, 4, 5]);
    let add = cdkm_add(&a, &b, 6, Some(7));
    for x in 0..8 {
        for y in 0..8 {
            let init = [bits_of(&a, x), bits_of(&b, y)].concat();
            let Some(l) = run(8, &init, &add) else {
                return outcome(false, "cdkm output not a basis state");
            };
            if read(l, &b) + 8 * read(l, &[7]) != x + y || read(l, &a) != x {
                return outcome(false, format!("cdkm {x}+{y}"));
            }
            checked += 1;
        }
    }
    let reg = [0, 1, 2];
    for c in 0..8 {
        let ops: Vec<GateOp> = qft(&reg).into_iter().chain(qft_add(&reg, c, &[])).chain(iqft(&reg)).collect();
        for y in 0..8 {
            match run(3, &bits_of(&reg, y), &ops) {
                Some(l) if read(l, &reg) == (y + c) % 8 => checked += 1,
                _ => return outcome(false, format!("qft {y}+{c}")),
            }
        }
    }
    for n_mod in 2..=31u64 {
        let bits = sparsim_shor::bit_length(n_mod).max(2);
        for adder in [Adder::Cdkm, Adder::Qft] {
            let arith = Arithmetic::new(adder, bits, n_mod, Uncompute::Coherent);
            for c in (1..n_mod).filter(|&c| gcd(c, n_mod) == 1) {
                for x in 0..n_mod {
                    let mut sim = Simulator::new(arith.num_qubits(), SimConfig::default(), 0).unwrap();
                    sim.apply(&GateOp::x(arith.ctrl())).unwrap();
                    for q in bits_of(arith.x(), x) {
                        sim.apply(&GateOp::x(q)).unwrap();
                    }
                    arith.ctrl_modmul(&mut sim, c).unwrap();
                    let dump = sim.dump().unwrap();
                    let mut expect = 1u128 << arith.ctrl();
                    for q in bits_of(arith.x(), mod_mul(c, x, n_mod)) {
                        expect |= 1 << q;
                    }
                    if dump.len() != 1 || dump[0].0.bits() != expect {
                        return outcome(false, format!("{adder:?} {c}*{x} mod {n_mod}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(true, format!("{checked} basis inputs checked"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("scheduler transparency", scheduler_transparency),
        ("factoring correctness and qubit counts", factoring_correctness),
        ("factoring max state size", factoring_state_size),
        ("QFT-adder factoring", qft_factoring),
        ("integer discrete log", integer_dlog),
        ("parallel determinism", parallel_determinism),
        ("parallel gating", parallel_gating),
        ("scale smoke test", scale_smoke),
        ("exhaustive arithmetic", exhaustive_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!(
            "[{verdict}] {:>2}. {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
