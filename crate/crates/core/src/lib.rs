//! Realizability and synthesis for linear temporal logic over finite
//! words when some inputs are invisible to the controller.
//!
//! The pipeline: formulas are parsed into a shared arena and reduced to
//! canonical representatives modulo propositional equivalence; one-step
//! transition functions are compiled into multi-terminal decision
//! diagrams whose terminals carry a successor formula and an acceptance
//! flag; universally quantifying the unobservable variables turns those
//! diagrams into belief transitions over what the controller can see;
//! and a reachability game over belief states decides realizability and
//! yields a finite-state controller.
//!
//! Everything here is deterministic: identical inputs produce identical
//! automata, statistics, and controllers, byte for byte.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod context;
pub mod controller;
pub mod error;
pub mod game;
pub mod logic;
pub mod mtbdd;
pub mod progression;
pub mod translate;
pub mod verify;

pub use context::{Context, Semantics, VarId, VarKind};
pub use controller::{
    build_controller, controller_dot, export_controller, verify_controller, Controller,
    ControllerState, ControllerTransition, Target, VerifyBudget,
};
pub use error::{Error, Limit};
pub use game::{
    eval3, extract_strategy, solve_full, solve_otf, GameAnalysis, GameResult, GameStatus, Stats,
    StatusMap, StratNode, Strategy,
};
pub use logic::{all_assignments, all_traces, Assignment, FormulaId, PropKey, Trace};
pub use mtbdd::{MtbddNode, NodeId, Terminal};
pub use progression::ProgResult;
pub use translate::{accepts, build_full, Limits, Mtdfa};
pub use verify::{
    corpus_instance, enumerate_formulas, oracle_belief_language, oracle_realizable,
    sweep_controller_soundness, sweep_full_observability, sweep_language_equivalence,
    sweep_mode_agreement, sweep_progression, sweep_transition_oracle, OracleBudget,
    SweepOutcome,
};
