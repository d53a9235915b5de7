//! Finite-difference laboratory for a 1-d chemotaxis model with logistic
//! growth on the unit interval.
//!
//! The crate is organised in layers: [`grid`] holds the lattice, ghost-slot
//! fields and difference stencils; [`dynamics`] the explicit Euler stepper
//! for the coupled (u, v) system; [`diagnostics`] the scalar observables,
//! time-scale detector and decay fits; [`transform`] the initial data and
//! the v <-> c change of variables; [`experiments`] the reproducible
//! sweep/comparison drivers with CSV persistence.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod transform;

pub use diagnostics::{
    detect_time_scales, fit_decay, sample, DecayFit, DiagnosticsSample, Regime, TimeScaleReport,
    DEFAULT_THRESHOLD,
};
pub use dynamics::{
    default_mesh, integrate, stable_dt, step_euler, Interrupted, ModelParams, State, StepControl,
    Stepper,
};
pub use error::Error;
pub use experiments::{
    convergence_study, decay_study, parse_config, run_case, run_sweep, write_csv,
    ConvergenceRecord, RunRegime, SweepConfig, TableRecord,
};
pub use grid::{d1, d2, h1_sq, l2_sq, linf, trapezoid, Field, Grid1D};
pub use transform::{c_from_v, v_from_c, InitialCondition};
