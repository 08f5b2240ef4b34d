//! Symbolic timing analysis for gate-level circuits.
//!
//! Given a netlist, a declared total order of signal transitions, and
//! per-gate analytic delay templates δ(T, Δ) — where `T` is the time since
//! the gate's previous output transition and `Δ` the time between its two
//! most recent input transitions — this crate computes closed-form symbolic
//! expressions for every gate-output transition time, instead of single
//! numbers. The expressions can then be instantiated numerically, checked
//! for consistency with the declared order, differentiated for sensitivity
//! analysis, swept over parameter grids, and exported as SMT-LIB2
//! constraints describing the parameter region in which the declared order
//! holds.
//!
//! Architecture (bottom-up):
//! * [`expr`] — exact symbolic expression kernel (canonical forms, exact
//!   rational arithmetic, substitution, differentiation, parsing/printing);
//! * [`model`] — transition-case taxonomy and delay-template library;
//! * [`netlist`] — circuit representation, parsing, and topology;
//! * [`schedule`] — declared transition orders, cause attribution, and
//!   case-sequence derivation;
//! * [`engine`] — symbolic propagation producing per-event time
//!   expressions;
//! * [`analysis`] — consistency checking, sensitivity, parameter sweeps,
//!   ordering regions, and SMT-LIB2 export.

pub mod analysis;
pub mod engine;
pub mod expr;
pub mod model;
pub mod netlist;
pub mod schedule;

pub use analysis::{
    assert_physical, check_consistency, export_smt, ordering_constraints, parse_bindings,
    parse_rational, sensitivity, sweep, sweep_csv, sweep_expr, AnalysisError, Binding,
    ConsistencyReport, ValidityWarning, Verdict, Violation,
};
pub use engine::{propagate, DelayDetail, DelayKind, EngineError, PairRecord, TimingSolution};
pub use expr::{Expr, ExprError, Symbol};
pub use model::{CaseLabel, CasePair, Direction, GateType, ModelError, ModelLibrary};
pub use netlist::{Gate, Netlist, NetlistError};
pub use schedule::{AttributedSchedule, Schedule, ScheduleError, TransitionEvent};
