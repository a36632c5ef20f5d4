//! Random gate programs for differential testing.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::gate::{GateKind, GateOp, Pauli};
use crate::program::{Instruction, Program};

/// Knobs for [`random_program`].
#[derive(Clone, Copy, Debug)]
pub struct RandomProgramConfig {
    pub max_controls: usize,
    /// Probability that an instruction is a measurement.
    pub measure_prob: f64,
    /// Probability that a gate is conditioned on an earlier measurement.
    pub conditional_prob: f64,
}

impl Default for RandomProgramConfig {
    fn default() -> Self {
        RandomProgramConfig {
            max_controls: 3,
            measure_prob: 0.04,
            conditional_prob: 0.1,
        }
    }
}

fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    // Mix exact quarter turns with generic angles.
    if rng.gen_bool(0.3) {
        f64::from(rng.gen_range(-4..=4)) * PI / 2.0
    } else {
        rng.gen_range(-2.0 * PI..2.0 * PI)
    }
}

/// Draws a gate over the full instruction set (no measurements).
pub fn random_gate<R: Rng>(rng: &mut R, num_qubits: usize, max_controls: usize) -> GateOp {
    let mut qubits: Vec<usize> = (0..num_qubits).collect();
    qubits.shuffle(rng);
    let kind = match rng.gen_range(0..15) {
        0 => GateKind::X,
        1 => GateKind::Y,
        2 => GateKind::Z,
        3 | 4 => GateKind::H,
        5 => GateKind::S,
        6 => GateKind::Sdg,
        7 => GateKind::T,
        8 => GateKind::Tdg,
        9 => GateKind::R1(random_angle(rng)),
        10 => GateKind::Rx(random_angle(rng)),
        11 => GateKind::Ry(random_angle(rng)),
        12 => GateKind::Rz(random_angle(rng)),
        13 if num_qubits >= 2 => GateKind::Swap,
        13 => GateKind::X,
        _ => {
            let len = rng.gen_range(1..=num_qubits.min(4));
            let paulis = (0..len)
                .map(|_| *[Pauli::X, Pauli::Y, Pauli::Z].choose(rng).unwrap())
                .collect();
            GateKind::PauliExp {
                paulis,
                theta: random_angle(rng),
            }
        }
    };
    let n_targets = match &kind {
        GateKind::Swap => 2,
        GateKind::PauliExp { paulis, .. } => paulis.len(),
        _ => 1,
    };
    let free = num_qubits - n_targets;
    let n_controls = if free == 0 || rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(1..=max_controls.min(free).max(1))
    };
    let targets = qubits[..n_targets].to_vec();
    let controls = &qubits[n_targets..n_targets + n_controls];
    GateOp::new(kind, targets).controlled_by(controls)
}

/// A random program of exactly `num_ops` instructions, including joint
/// measurements and classically conditioned gates.
pub fn random_program<R: Rng>(
    rng: &mut R,
    num_qubits: usize,
    num_ops: usize,
    config: &RandomProgramConfig,
) -> Program {
    let mut program = Program::new(num_qubits);
    let mut measured = 0usize;
    for _ in 0..num_ops {
        if rng.gen_bool(config.measure_prob) {
            let mut qubits: Vec<usize> = (0..num_qubits).collect();
            qubits.shuffle(rng);
            let k = rng.gen_range(1..=num_qubits.min(3));
            program.push(GateOp::measure(&qubits[..k]));
            measured += 1;
            continue;
        }
        let gate = random_gate(rng, num_qubits, config.max_controls);
        if measured > 0 && rng.gen_bool(config.conditional_prob) {
            let bit = rng.gen_range(0..measured);
            program.instructions.push(Instruction::Conditional {
                bit,
                value: rng.gen(),
                gate,
            });
        } else {
            program.push(gate);
        }
    }
    program
}
