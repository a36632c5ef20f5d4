//! Programs, the circuit text format, and program execution.
//!
//! ```text
//! # Bell pair
//! qubits 2
//! h 0
//! cx 0 1          # controls come first
//! rz pi/2 1
//! pexp 0.25 XIZ 0 1 2
//! mz 0 1          # joint Z0 Z1 parity, one result bit
//! if c0 == 1 x 0
//! ```

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::error::{Result, SimError};
use crate::gate::{GateKind, GateOp, Pauli};
use crate::label::BasisLabel;
use crate::sim::{Backend, RunStats, SimConfig, Simulator};
use crate::state::Amplitude;

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Gate(GateOp),
    /// Applies `gate` only if measurement `bit` (counted from 0 in program
    /// order) produced `value`.
    Conditional { bit: usize, value: bool, gate: GateOp },
}

impl Instruction {
    pub fn gate(&self) -> &GateOp {
        match self {
            Instruction::Gate(g) | Instruction::Conditional { gate: g, .. } => g,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub num_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(num_qubits: usize) -> Self {
        Program {
            num_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> &mut Self {
        self.instructions.push(Instruction::Gate(op));
        self
    }

    pub fn push_if(&mut self, bit: usize, value: bool, op: GateOp) -> &mut Self {
        self.instructions.push(Instruction::Conditional { bit, value, gate: op });
        self
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Gate(g) if g.is_measurement()))
            .count()
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = 0;
        for (i, ins) in self.instructions.iter().enumerate() {
            ins.gate().validate(self.num_qubits)?;
            match ins {
                Instruction::Gate(g) if g.is_measurement() => seen += 1,
                Instruction::Gate(_) => {}
                Instruction::Conditional { bit, gate, .. } => {
                    if gate.is_measurement() {
                        return Err(SimError::InvalidArgument(format!(
                            "instruction {i}: measurements cannot be conditional"
                        )));
                    }
                    if *bit >= seen {
                        return Err(SimError::InvalidArgument(format!(
                            "instruction {i}: c{bit} refers to a later measurement"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Gate(g) => write!(f, "{g}"),
            Instruction::Conditional { bit, value, gate } => {
                write!(f, "if c{bit} == {} {gate}", u8::from(*value))
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("qubit {qubit} out of range for {num_qubits} qubits")]
    OutOfRange { qubit: usize, num_qubits: usize },
    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn syntax<T>(msg: impl Into<String>) -> std::result::Result<T, ParseErrorKind> {
    Err(ParseErrorKind::Syntax(msg.into()))
}

pub fn parse_circuit(text: &str) -> std::result::Result<Program, ParseError> {
    let mut program: Option<Program> = None;
    let mut measurements = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |kind| ParseError { line, kind };
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(prog) = program.as_mut() else {
            program = Some(parse_header(&tokens).map_err(err)?);
            continue;
        };
        let ins = parse_instruction(&tokens, prog.num_qubits, measurements).map_err(err)?;
        if matches!(&ins, Instruction::Gate(g) if g.is_measurement()) {
            measurements += 1;
        }
        prog.instructions.push(ins);
    }
    program.ok_or(ParseError {
        line: text.lines().count().max(1),
        kind: ParseErrorKind::Syntax("missing `qubits N` header".into()),
    })
}

fn parse_header(tokens: &[&str]) -> std::result::Result<Program, ParseErrorKind> {
    match tokens {
        ["qubits", n] => match n.parse::<usize>() {
            Ok(n) if (1..=crate::label::LABEL_BITS).contains(&n) => Ok(Program::new(n)),
            _ => syntax(format!("invalid qubit count `{n}`")),
        },
        _ => syntax("expected `qubits N` as the first instruction"),
    }
}

fn parse_instruction(
    tokens: &[&str],
    num_qubits: usize,
    measurements: usize,
) -> std::result::Result<Instruction, ParseErrorKind> {
    if tokens[0] != "if" {
        return parse_gate(tokens, num_qubits).map(Instruction::Gate);
    }
    let [_, bit, eq, value, rest @ ..] = tokens else {
        return syntax("expected `if c<k> == <0|1> <gate>`");
    };
    let bit = match bit.strip_prefix('c').map(str::parse::<usize>) {
        Some(Ok(k)) => k,
        _ => return syntax(format!("expected measurement reference c<k>, got `{bit}`")),
    };
    if *eq != "==" {
        return syntax(format!("expected `==`, got `{eq}`"));
    }
    let value = match *value {
        "0" => false,
        "1" => true,
        v => return syntax(format!("condition value must be 0 or 1, got `{v}`")),
    };
    if bit >= measurements {
        return syntax(format!("c{bit} does not refer to an earlier measurement"));
    }
    if rest.is_empty() {
        return syntax("missing gate after condition");
    }
    let gate = parse_gate(rest, num_qubits)?;
    if gate.is_measurement() {
        return syntax("measurements cannot be conditional");
    }
    Ok(Instruction::Conditional { bit, value, gate })
}

fn parse_gate(tokens: &[&str], num_qubits: usize) -> std::result::Result<GateOp, ParseErrorKind> {
    let word = tokens[0];
    let base = word.trim_start_matches('c');
    let n_controls = word.len() - base.len();
    let mut kind = match base {
        "x" => GateKind::X,
        "y" => GateKind::Y,
        "z" => GateKind::Z,
        "h" => GateKind::H,
        "s" => GateKind::S,
        "sdg" => GateKind::Sdg,
        "t" => GateKind::T,
        "tdg" => GateKind::Tdg,
        "r1" => GateKind::R1(0.0),
        "rx" => GateKind::Rx(0.0),
        "ry" => GateKind::Ry(0.0),
        "rz" => GateKind::Rz(0.0),
        "swap" => GateKind::Swap,
        "pexp" => GateKind::PauliExp {
            paulis: Vec::new(),
            theta: 0.0,
        },
        "mz" => GateKind::MeasureZ,
        _ => return Err(ParseErrorKind::UnknownMnemonic(word.to_string())),
    };
    if n_controls > 0 && kind == GateKind::MeasureZ {
        return syntax("measurements cannot be controlled");
    }
    let mut rest = &tokens[1..];
    let mut take = |what: &str| -> std::result::Result<&str, ParseErrorKind> {
        let (first, tail) = rest
            .split_first()
            .ok_or_else(|| ParseErrorKind::Syntax(format!("{word}: missing {what}")))?;
        rest = tail;
        Ok(*first)
    };
    // Positions of non-identity letters in a Pauli string.
    let mut keep: Option<Vec<bool>> = None;
    match &mut kind {
        GateKind::R1(t) | GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) => {
            *t = parse_angle(take("angle")?)?;
        }
        GateKind::PauliExp { paulis, theta } => {
            *theta = parse_angle(take("angle")?)?;
            let s = take("Pauli string")?;
            let mut mask = Vec::with_capacity(s.len());
            for ch in s.chars() {
                match ch.to_ascii_uppercase() {
                    'I' => mask.push(false),
                    'X' => paulis.push(Pauli::X),
                    'Y' => paulis.push(Pauli::Y),
                    'Z' => paulis.push(Pauli::Z),
                    _ => return syntax(format!("invalid Pauli letter `{ch}` in `{s}`")),
                }
                if !ch.eq_ignore_ascii_case(&'I') {
                    mask.push(true);
                }
            }
            if paulis.is_empty() {
                return syntax("Pauli string has no X, Y or Z");
            }
            keep = Some(mask);
        }
        _ => {}
    }
    let operands = rest
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| ParseErrorKind::Syntax(format!("invalid qubit index `{t}`")))
        })
        .collect::<std::result::Result<Vec<usize>, _>>()?;
    if let Some(&qubit) = operands.iter().find(|&&q| q >= num_qubits) {
        return Err(ParseErrorKind::OutOfRange { qubit, num_qubits });
    }
    let n_targets = match (&kind, &keep) {
        (GateKind::MeasureZ, _) => operands.len().max(1),
        (GateKind::Swap, _) => 2,
        (_, Some(mask)) => mask.len(),
        _ => 1,
    };
    if operands.len() != n_controls + n_targets {
        return syntax(format!(
            "{word} takes {} qubit operand(s), got {}",
            n_controls + n_targets,
            operands.len()
        ));
    }
    let (controls, targets) = operands.split_at(n_controls);
    let targets: Vec<usize> = match &keep {
        Some(mask) => targets
            .iter()
            .zip(mask)
            .filter(|(_, k)| **k)
            .map(|(q, _)| *q)
            .collect(),
        None => targets.to_vec(),
    };
    let op = GateOp::new(kind, targets).controlled_by(controls);
    op.validate(num_qubits)
        .map_err(|e| ParseErrorKind::Syntax(e.to_string()))?;
    Ok(op)
}

/// Parses radians: a decimal, or a rational multiple of pi such as `pi`,
/// `-pi/4`, `3*pi/8`, `3pi/8`.
pub fn parse_angle(s: &str) -> std::result::Result<f64, ParseErrorKind> {
    let bad = || ParseErrorKind::Syntax(format!("invalid angle `{s}`"));
    let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(bad()) };
    let Some(pos) = s.find("pi") else {
        if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            return Err(bad());
        }
        return finite(s.parse::<f64>().map_err(|_| bad())?);
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let coef = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    finite(coef * PI / denom)
}

/// Runs `program` on any backend, returning the measurement record.
pub fn run_on<B: Backend>(program: &Program, backend: &mut B) -> Result<Vec<bool>> {
    if backend.num_qubits() != program.num_qubits {
        return Err(SimError::InvalidArgument(format!(
            "program needs {} qubits, backend has {}",
            program.num_qubits,
            backend.num_qubits()
        )));
    }
    program.validate()?;
    let mut record = Vec::with_capacity(program.measurement_count());
    for ins in &program.instructions {
        let gate = match ins {
            Instruction::Gate(g) => g,
            Instruction::Conditional { bit, value, gate } => {
                if record[*bit] != *value {
                    continue;
                }
                gate
            }
        };
        if gate.is_measurement() {
            record.push(backend.measure(&gate.targets)?);
        } else {
            backend.apply(gate)?;
        }
    }
    Ok(record)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub dump: Vec<(BasisLabel, Amplitude)>,
    pub measurements: Vec<bool>,
    pub stats: RunStats,
}

/// Runs `program` on the sparse simulator, flushes, and dumps the final state.
pub fn run_program(program: &Program, seed: u64, config: SimConfig) -> Result<RunOutput> {
    run_program_traced(program, seed, config).map(|(out, _)| out)
}

/// Like [`run_program`], also returning the peak state size of every op.
pub fn run_program_traced(
    program: &Program,
    seed: u64,
    config: SimConfig,
) -> Result<(RunOutput, Vec<usize>)> {
    let start = Instant::now();
    let mut sim = Simulator::new(program.num_qubits, config, seed)?;
    sim.record_op_peaks();
    let measurements = run_on(program, &mut sim)?;
    let dump = sim.dump()?;
    let stats = RunStats {
        qubits_used: program.num_qubits,
        max_state_size: sim.max_state_size(),
        gate_count: sim.gate_count(),
        flush_count: sim.flush_count(),
        wall_time_ms: start.elapsed().as_millis() as u64,
        success: true,
    };
    let peaks = sim.op_peaks().unwrap_or_default().to_vec();
    Ok((
        RunOutput {
            dump,
            measurements,
            stats,
        },
        peaks,
    ))
}
