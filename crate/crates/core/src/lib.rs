//! Quantitative semantics for Signal Temporal Logic.
//!
//! The crate evaluates STL formulas over uniformly sampled traces under
//! interchangeable robustness metrics, each defined by its conjunction
//! operator: the classical `min`, the arithmetic-geometric mean operator,
//! and a smooth scale-invariant operator with sharpness `ν`. Around that core
//! sit a numerical lab that checks algebraic properties of any conjunction
//! operator, a single-integrator robot simulator with funnel guidance, and a
//! guided PI² policy search used to compare the metrics as learning rewards.
//!
//! Module map:
//!
//! - [`formula`]: syntax tree, parser and printer.
//! - [`trace`]: sampled signals and CSV I/O.
//! - [`semantics`]: metrics, robustness and Boolean satisfaction.
//! - [`lab`]: property checks for conjunction operators.
//! - [`dynamics`]: robot model, goal regions, funnels and guidance.
//! - [`pi2`]: episodic policy search.
//! - [`experiments`]: the two-goal case study.
//! - [`cli`]: the `stlrob` command-line front end.

pub mod cli;
pub mod dynamics;
pub mod experiments;
pub mod formula;
pub mod lab;
pub mod pi2;
pub mod semantics;
pub mod trace;
