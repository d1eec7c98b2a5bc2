//! Popularity in roommate diversity games.
//!
//! Red and blue agents are split into rooms of equal size; every agent only
//! cares about the fraction of red agents in its room.

pub mod counterexample;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod matching;
pub mod mixed;
pub mod model;
pub mod popularity;
pub mod reductions;
pub mod x3c;

mod flow;
mod lp;
mod table;

pub use counterexample::{
    counterexample_game, rotation_challenger, top_type_choice, top_type_outcome, top_type_outcomes,
};
pub use enumerate::{
    enumerate_outcomes, enumerate_signatures, expand_orbit, labeled_count, orbit_key,
    EnumerationMode, OrbitKey, DEFAULT_CAP,
};
pub use error::{Error, Result};
pub use format::{game_to_json, parse_game, parse_json, schemas};
pub use matching::{
    classify_s2, happy_count, matching_weight, max_weight_matching, pair_weight, solve_s2, S2Class,
    S2Kind, WeightedMatching,
};
pub use mixed::{
    build_game_matrix, mixed_margin, parse_ratio, ratio_string, solve_mixed, verify_mixed,
    GameMatrix, MixedOutcome,
};
pub use model::*;
pub use popularity::{
    best_challenger, find_popular, is_popular, is_strictly_popular, popularity_margin, Challenger,
    MarginReport, PopularityVerdict, Search, Status, Strategy,
};
pub use reductions::{
    all_approve_outcomes, build_mixed_reduction, build_popularity_reduction,
    build_strict_reduction, default_choice, monolithic_outcome, reduced_outcome,
    reduced_rotation, BundleSidecar, ReductionBundle, Variant,
};
pub use x3c::{x3c_all_solutions, x3c_solve, X3CInstance};
