//! Evaluation toolkit for gisting as decision support.
//!
//! Subjects categorize items under different conditions (full-information
//! control, gisted experimental, random baseline). How useful a gist is
//! shows up as how close the experimental subjects' categorization behavior
//! stays to the control group:
//!
//! * per item, two subjects are at distance 0 if they chose the same
//!   category and 2 otherwise;
//! * the distance between two subjects is the average over all items;
//! * a subject's headline number is the average distance to the control
//!   subjects, excluding self-comparison for controls themselves.
//!
//! The toolkit adds seeded uniform-random synthetic subjects as a lower
//! bound, percentile-bootstrap confidence intervals over items, and Cohen's
//! kappa as an alternative agreement measure. Input is a flat CSV
//! (`subject,condition,item,category`), so materials produced by any
//! gisting method can be scored against the same data.
//!
//! Everything is pure computation over an immutable [`JudgmentSet`];
//! resampling derives an independent RNG stream per index, so results
//! depend only on the seed.

mod baseline;
mod bootstrap;
mod data;
mod distance;
mod kappa;
mod report;

pub use baseline::random_baseline;
pub use bootstrap::{bootstrap_ci, percentile_interval};
pub use data::{Category, Condition, DataError, JudgmentSet, Subject};
pub use distance::{
    distance_matrix, item_distance, mean_distance_to_control, pairwise_distance,
    per_item_control_distance,
};
pub use kappa::{cohen_kappa, Kappa};
pub use report::{report, DistanceReport, ReportConfig, ReportRow};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("analysis requires at least one control subject")]
    NoControls,
    #[error("subject `{0}` is the sole control; self-excluded mean is undefined")]
    SoleControl(String),
    #[error("need at least {min} bootstrap resamples, got {got}")]
    TooFewResamples { min: usize, got: usize },
    #[error("confidence level must be strictly between 0 and 100, got {0}")]
    BadLevel(f64),
    #[error("category universe must have at least 2 choices, got {0}")]
    BadCategoryCount(u32),
    #[error("runs must be at least 1")]
    NoRuns,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// RNG for one derived stream: results are a function of (seed, stream)
/// only, never of evaluation order.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed) ^ splitmix64(stream.wrapping_add(0xA5A5_A5A5)))
}
