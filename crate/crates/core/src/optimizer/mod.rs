//! Measure search: isotropic-system solving on a fixed support, seeded
//! heuristic minimization of `s`, spherical-design conversion for tori, and
//! a persistent cache of best-known measures.

mod cache;
mod design;
mod isotropic;
mod search;

pub use cache::ResultsCache;
pub use design::{
    check_design_moments, design_from_json, design_to_measure, read_design, DesignFile, DesignInput, DesignPoints,
    MomentIdentity, MomentKind, MomentReport, MomentValue,
};
pub use isotropic::{
    solve_isotropic_system, solve_isotropic_system_with, IsotropicOptions, IsotropicSolution, IsotropicWeights,
};
pub use search::{grid_support, minimize_s, SearchConfig, SearchOutcome};
