//! Percentile bootstrap confidence intervals over items.

use rand::Rng;

use crate::data::JudgmentSet;
use crate::distance::per_item_control_distance;
use crate::{stream_rng, EvalError};

/// Minimum resample count accepted by [`bootstrap_ci`].
pub const MIN_RESAMPLES: usize = 100;

/// Linear-interpolation quantile (the common "type 7" definition) of an
/// ascending-sorted slice; `q` in [0, 1].
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Central interval spanning `level` percent of the given statistics:
/// the (α/2, 1−α/2) percentiles with α = 1 − level/100.
pub fn percentile_interval(stats: &[f64], level: f64) -> Result<(f64, f64), EvalError> {
    if !(level > 0.0 && level < 100.0) {
        return Err(EvalError::BadLevel(level));
    }
    if stats.is_empty() {
        return Err(EvalError::TooFewResamples { min: 1, got: 0 });
    }
    let mut sorted = stats.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let alpha = 1.0 - level / 100.0;
    Ok((
        quantile_sorted(&sorted, alpha / 2.0),
        quantile_sorted(&sorted, 1.0 - alpha / 2.0),
    ))
}

/// Percentile-bootstrap confidence interval for subject `k`'s mean distance
/// to the control group: items are resampled with replacement, the mean
/// distance recomputed per resample, and the level-spanning percentiles
/// taken. Each resample index derives its own RNG stream from the seed, so
/// the result is reproducible and independent of evaluation order.
pub fn bootstrap_ci(
    set: &JudgmentSet,
    k: usize,
    controls: &[usize],
    level: f64,
    resamples: usize,
    seed: u64,
) -> Result<(f64, f64), EvalError> {
    if resamples < MIN_RESAMPLES {
        return Err(EvalError::TooFewResamples {
            min: MIN_RESAMPLES,
            got: resamples,
        });
    }
    let per_item = per_item_control_distance(set, k, controls)?;
    let n = per_item.len();
    if n == 0 {
        return Err(EvalError::Data(crate::data::DataError::Empty));
    }
    let mut stats = Vec::with_capacity(resamples);
    for r in 0..resamples {
        let mut rng = stream_rng(seed, 0x8000_0000_0000_0000 | r as u64);
        let mut sum = 0.0;
        for _ in 0..n {
            sum += per_item[rng.random_range(0..n)];
        }
        stats.push(sum / n as f64);
    }
    percentile_interval(&stats, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Category, Condition};
    use crate::distance::mean_distance_to_control;

    fn set_with_distances(e_cats: &[u32]) -> JudgmentSet {
        let mut set = JudgmentSet::new();
        for (i, &c) in e_cats.iter().enumerate() {
            let item = format!("i{i}");
            set.add_judgment("c1", Condition::Control, &item, Category::Numbered(1))
                .unwrap();
            set.add_judgment("e", Condition::Experimental, &item, Category::Numbered(c))
                .unwrap();
        }
        set
    }

    #[test]
    fn constant_distances_give_a_degenerate_interval() {
        // e agrees with the control on every item → every resample mean 0.
        let set = set_with_distances(&[1, 1, 1, 1, 1, 1]);
        let controls = set.controls();
        let e = set.subject_index("e").unwrap();
        let (lo, hi) = bootstrap_ci(&set, e, &controls, 95.0, 200, 9).unwrap();
        let point = mean_distance_to_control(&set, e, &controls).unwrap();
        assert_eq!(lo, point);
        assert_eq!(hi, point);
    }

    #[test]
    fn interval_contains_the_point_estimate() {
        for seed in 0..5u64 {
            let set = set_with_distances(&[1, 2, 1, 2, 1, 1, 2, 1]);
            let controls = set.controls();
            let e = set.subject_index("e").unwrap();
            let point = mean_distance_to_control(&set, e, &controls).unwrap();
            let (lo, hi) = bootstrap_ci(&set, e, &controls, 95.0, 500, seed).unwrap();
            assert!(lo <= point && point <= hi, "[{lo}, {hi}] vs {point}");
            assert!(lo >= 0.0 && hi <= 2.0);
        }
    }

    #[test]
    fn bootstrap_is_deterministic_for_a_seed() {
        let set = set_with_distances(&[1, 2, 2, 1, 1, 2]);
        let controls = set.controls();
        let e = set.subject_index("e").unwrap();
        let a = bootstrap_ci(&set, e, &controls, 90.0, 300, 123).unwrap();
        let b = bootstrap_ci(&set, e, &controls, 90.0, 300, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn percentiles_match_exhaustive_enumeration() {
        // Four items at distances [0, 0, 2, 2] from the (single-control)
        // group: all 4^4 = 256 equally likely resamples enumerated by hand.
        // The resample mean is (number of 2s drawn) / 2, with counts
        // 16, 64, 96, 64, 16 for k = 0..4. Hand-derived percentiles:
        //   95%: lo at h=6.375 → 0.0;  hi at h=248.625 → 2.0
        //   50%: lo at h=63.75 → 0.5;  hi at h=191.25 → 1.5
        let per_item = [0.0, 0.0, 2.0, 2.0];
        let mut stats = Vec::with_capacity(256);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let sum: f64 = per_item[a] + per_item[b] + per_item[c] + per_item[d];
                        stats.push(sum / 4.0);
                    }
                }
            }
        }
        assert_eq!(stats.len(), 256);
        let (lo95, hi95) = percentile_interval(&stats, 95.0).unwrap();
        assert_eq!((lo95, hi95), (0.0, 2.0));
        let (lo50, hi50) = percentile_interval(&stats, 50.0).unwrap();
        assert_eq!((lo50, hi50), (0.5, 1.5));
    }

    #[test]
    fn bad_parameters_are_refused() {
        let set = set_with_distances(&[1, 2]);
        let controls = set.controls();
        let e = set.subject_index("e").unwrap();
        assert!(matches!(
            bootstrap_ci(&set, e, &controls, 95.0, 10, 0),
            Err(EvalError::TooFewResamples { .. })
        ));
        assert!(matches!(
            percentile_interval(&[1.0], 0.0),
            Err(EvalError::BadLevel(_))
        ));
        assert!(matches!(
            percentile_interval(&[1.0], 100.0),
            Err(EvalError::BadLevel(_))
        ));
    }
}
