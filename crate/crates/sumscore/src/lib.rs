//! Equal-variance calibration, auditing, scoring, and seeded simulation for
//! summated questionnaires that mix dichotomous items with a single shared
//! Likert scale.
//!
//! When every item of a questionnaire uses the same k-point scale, plain
//! summing hands each item the same share of the sum's variance. Mixing in
//! two-point items breaks that balance unless their upper value c is chosen
//! so the two-point variance (c-1)^2/4 matches the k-point variance
//! (k^2-1)/12 — and the intuitive choice c = k almost always overweights
//! the two-point items. This crate solves for the optimal c exactly, audits
//! arbitrary designs, recodes and scores response files, and verifies the
//! arithmetic empirically with reproducible Monte Carlo sampling.
//!
//! The `sumscore` binary exposes the same operations over files; see the
//! [`cli`] module.

pub mod calibration;
pub mod cli;
pub mod design;
pub mod error;
pub mod io;
pub mod moments;
pub mod scoring;
pub mod simulate;

pub use calibration::{
    calibrate, calibration_table, calibration_table_with_cap, optimal_range, CalibrationResult,
    DEFAULT_MAX_SCALE,
};
pub use design::{
    audit_design, contribution_profile, dichotomous_share, likert_share, ContributionReport,
    DesignAudit, DesignItem, ItemContribution, QuestionnaireDesign, RawMapping,
};
pub use error::{Error, ResponseViolation, Result};
pub use moments::{
    dichotomous_moments, likert_moments, rational_to_f64, symmetric_deviation_sum, Moments,
    Rational, ScaleSpec, MIN_SCALE,
};
pub use scoring::{recode_dichotomous, score_sheet, RawAnswer, RespondentScore, ResponseSheet};
pub use simulate::{
    convergence_sweep, run_simulation, ItemSimulation, Scenario, SimulationConfig,
    SimulationReport,
};
