//! Sparse state-vector quantum circuit simulator.
//!
//! The state is a hash map from basis label to amplitude. Phase and
//! permutation gates are batched in a queue and applied in one pass; `H`,
//! `Rx` and `Ry` are held in per-qubit slots and commuted past later gates
//! where a rewrite exists, so the map is rebuilt as rarely as possible.
//!
//! ```
//! use sparsim_core::{parse_circuit, run_program, SimConfig};
//!
//! let program = parse_circuit("qubits 2\nh 0\ncx 0 1\nmz 0\nmz 1").unwrap();
//! let out = run_program(&program, 7, SimConfig::default()).unwrap();
//! assert_eq!(out.measurements[0], out.measurements[1]);
//! ```

pub mod dense;
pub mod error;
pub mod gate;
pub mod label;
pub mod program;
pub mod queue;
pub mod random;
pub mod scheduler;
pub mod sim;
pub mod state;

pub use error::{Result, SimError};
pub use gate::{GateKind, GateOp, Pauli};
pub use label::{mask_of, BasisLabel};
pub use program::{parse_circuit, run_program, Instruction, ParseError, Program, RunOutput};
pub use queue::{ExecStats, Executor, ParallelConfig, PhasePermAction, PhasePermQueue, PhasePermRecord};
pub use scheduler::{CommuteResult, QubitSlots, Scheduler, SchedulerStats};
pub use sim::{Backend, RunStats, SimConfig, Simulator};
pub use state::{Amplitude, MeasurementOutcome, PairwiseBlock, SparseWavefunction};
