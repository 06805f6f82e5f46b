//! Seeded uniform-random baseline subjects.

use rand::Rng;

use crate::data::{Category, Condition, JudgmentSet};
use crate::{stream_rng, EvalError};

/// Returns a copy of the judgment set augmented with `runs` synthetic
/// subjects (`random-1`, `random-2`, ...) in the random condition.
///
/// `categories` is the size of the category universe including the
/// none-of-the-above choice, so `categories = 7` draws uniformly over the
/// numbered piles 1..=6 plus `none`. With `forced_choice` the
/// none-of-the-above choice is excluded from the draw. Each run derives its
/// own RNG stream from the seed, so a given (seed, run) pair always
/// produces the same assignments.
pub fn random_baseline(
    set: &JudgmentSet,
    categories: u32,
    runs: usize,
    seed: u64,
    forced_choice: bool,
) -> Result<JudgmentSet, EvalError> {
    if categories < 2 {
        return Err(EvalError::BadCategoryCount(categories));
    }
    if runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let mut out = set.clone();
    let items: Vec<String> = set.items().to_vec();
    for run in 1..=runs {
        let mut id = format!("random-{run}");
        let mut dedup = 1;
        while out.subject_index(&id).is_some() {
            id = format!("random-{run}.{dedup}");
            dedup += 1;
        }
        let mut rng = stream_rng(seed, run as u64);
        for item in &items {
            let universe = if forced_choice {
                categories - 1
            } else {
                categories
            };
            let draw = rng.random_range(0..universe);
            let category = if !forced_choice && draw == categories - 1 {
                Category::NoneOfTheAbove
            } else {
                Category::Numbered(draw + 1)
            };
            out.add_judgment(&id, Condition::Random, item, category)
                .map_err(EvalError::Data)?;
        }
    }
    Ok(out)
}
