//! Categorization distances between subjects.

use crate::data::{Category, DataError, JudgmentSet};
use crate::EvalError;

/// Distance between two category choices for one item: 0 when equal, 2
/// otherwise. None-of-the-above is an ordinary category here.
pub fn item_distance(a: Category, b: Category) -> f64 {
    if a == b {
        0.0
    } else {
        2.0
    }
}

/// Average item distance between subjects `j` and `k`; both must have
/// judged every item. Symmetric, in [0, 2].
pub fn pairwise_distance(set: &JudgmentSet, j: usize, k: usize) -> Result<f64, DataError> {
    let n = set.items().len();
    if n == 0 {
        return Err(DataError::Empty);
    }
    let mut sum = 0.0;
    for item in 0..n {
        sum += item_distance(set.category(j, item)?, set.category(k, item)?);
    }
    Ok(sum / n as f64)
}

/// Full pairwise distance matrix, indexed like `set.subjects()`.
pub fn distance_matrix(set: &JudgmentSet) -> Result<Vec<Vec<f64>>, DataError> {
    let n = set.subjects().len();
    let mut m = vec![vec![0.0; n]; n];
    for j in 0..n {
        for k in (j + 1)..n {
            let d = pairwise_distance(set, j, k)?;
            m[j][k] = d;
            m[k][j] = d;
        }
    }
    Ok(m)
}

/// Mean distance from subject `k` to the control group. When `k` is itself
/// a control the average excludes the self-comparison and divides by the
/// remaining J−1 controls; a sole control is refused.
pub fn mean_distance_to_control(
    set: &JudgmentSet,
    k: usize,
    controls: &[usize],
) -> Result<f64, EvalError> {
    let others: Vec<usize> = controls.iter().copied().filter(|&j| j != k).collect();
    if controls.is_empty() {
        return Err(EvalError::NoControls);
    }
    if others.is_empty() {
        let id = set
            .subjects()
            .get(k)
            .map(|s| s.id.clone())
            .unwrap_or_else(|| format!("#{k}"));
        return Err(EvalError::SoleControl(id));
    }
    let mut sum = 0.0;
    for &j in &others {
        sum += pairwise_distance(set, j, k)?;
    }
    Ok(sum / others.len() as f64)
}

/// Per-item mean distance from subject `k` to the control group (self
/// excluded); averaging this vector over items gives
/// [`mean_distance_to_control`]. This is the statistic the bootstrap
/// resamples.
pub fn per_item_control_distance(
    set: &JudgmentSet,
    k: usize,
    controls: &[usize],
) -> Result<Vec<f64>, EvalError> {
    let others: Vec<usize> = controls.iter().copied().filter(|&j| j != k).collect();
    if controls.is_empty() {
        return Err(EvalError::NoControls);
    }
    if others.is_empty() {
        let id = set
            .subjects()
            .get(k)
            .map(|s| s.id.clone())
            .unwrap_or_else(|| format!("#{k}"));
        return Err(EvalError::SoleControl(id));
    }
    let mut v = Vec::with_capacity(set.items().len());
    for item in 0..set.items().len() {
        let mut sum = 0.0;
        for &j in &others {
            sum += item_distance(
                set.category(j, item).map_err(EvalError::Data)?,
                set.category(k, item).map_err(EvalError::Data)?,
            );
        }
        v.push(sum / others.len() as f64);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Condition;

    fn set_from(rows: &[(&str, Condition, &[u32])]) -> JudgmentSet {
        let mut set = JudgmentSet::new();
        for (subject, condition, cats) in rows {
            for (i, &c) in cats.iter().enumerate() {
                let cat = if c == 0 {
                    Category::NoneOfTheAbove
                } else {
                    Category::Numbered(c)
                };
                set.add_judgment(subject, *condition, &format!("i{i}"), cat)
                    .unwrap();
            }
        }
        set
    }

    #[test]
    fn item_distance_is_zero_or_two() {
        assert_eq!(
            item_distance(Category::Numbered(3), Category::Numbered(3)),
            0.0
        );
        assert_eq!(
            item_distance(Category::Numbered(3), Category::Numbered(5)),
            2.0
        );
        assert_eq!(
            item_distance(Category::NoneOfTheAbove, Category::NoneOfTheAbove),
            0.0
        );
        assert_eq!(
            item_distance(Category::Numbered(1), Category::NoneOfTheAbove),
            2.0
        );
    }

    #[test]
    fn identical_subjects_are_at_distance_zero() {
        let set = set_from(&[
            ("a", Condition::Control, &[1, 2, 0, 3]),
            ("b", Condition::Control, &[1, 2, 0, 3]),
        ]);
        assert_eq!(pairwise_distance(&set, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn total_disagreement_is_distance_two() {
        let set = set_from(&[
            ("a", Condition::Control, &[1, 1, 1, 1]),
            ("b", Condition::Control, &[2, 2, 2, 2]),
        ]);
        assert_eq!(pairwise_distance(&set, 0, 1).unwrap(), 2.0);
    }

    #[test]
    fn one_disagreement_in_four_items_is_half() {
        // Oracle by hand: (0 + 0 + 0 + 2) / 4 = 0.5
        let set = set_from(&[
            ("a", Condition::Control, &[1, 2, 3, 1]),
            ("b", Condition::Control, &[1, 2, 3, 2]),
        ]);
        assert_eq!(pairwise_distance(&set, 0, 1).unwrap(), 0.5);
    }

    #[test]
    fn pairwise_is_symmetric() {
        let set = set_from(&[
            ("a", Condition::Control, &[1, 2, 3, 0, 2]),
            ("b", Condition::Experimental, &[2, 2, 1, 0, 1]),
        ]);
        assert_eq!(
            pairwise_distance(&set, 0, 1).unwrap(),
            pairwise_distance(&set, 1, 0).unwrap()
        );
    }

    #[test]
    fn experimental_subject_mean_is_the_plain_average() {
        // d(e, c1) = 0.4 and d(e, c2) = 0.8 → mean 0.6
        let set = set_from(&[
            ("c1", Condition::Control, &[1, 1, 1, 1, 2]),
            ("c2", Condition::Control, &[1, 1, 1, 2, 2]),
            ("e", Condition::Experimental, &[1, 1, 1, 1, 1]),
        ]);
        let controls = set.controls();
        let e = set.subject_index("e").unwrap();
        assert!((pairwise_distance(&set, 0, e).unwrap() - 0.4).abs() < 1e-12);
        assert!((pairwise_distance(&set, 1, e).unwrap() - 0.8).abs() < 1e-12);
        assert!((mean_distance_to_control(&set, e, &controls).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn identical_to_all_controls_gives_zero() {
        let set = set_from(&[
            ("c1", Condition::Control, &[1, 2, 3]),
            ("c2", Condition::Control, &[1, 2, 3]),
            ("c3", Condition::Control, &[1, 2, 3]),
            ("k", Condition::Experimental, &[1, 2, 3]),
        ]);
        let controls = set.controls();
        let k = set.subject_index("k").unwrap();
        assert_eq!(mean_distance_to_control(&set, k, &controls).unwrap(), 0.0);
    }

    #[test]
    fn control_subjects_exclude_themselves_with_j_minus_1_divisor() {
        // Hand-computed pairwise matrix:
        //   d(c1,c2) = 1.0, d(c1,c3) = 1.5, d(c2,c3) = 0.5
        // Eq. 3 means: c1 → 1.25, c2 → 0.75, c3 → 1.0.
        // Including the self-distance (J divisor) would give 0.833... for
        // c1, so the divisor is observable.
        let set = set_from(&[
            ("c1", Condition::Control, &[1, 1, 1, 1]),
            ("c2", Condition::Control, &[1, 1, 2, 2]),
            ("c3", Condition::Control, &[1, 2, 2, 2]),
        ]);
        let controls = set.controls();
        let d = |id: &str| {
            mean_distance_to_control(&set, set.subject_index(id).unwrap(), &controls).unwrap()
        };
        assert!((d("c1") - 1.25).abs() < 1e-12);
        assert!((d("c2") - 0.75).abs() < 1e-12);
        assert!((d("c3") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sole_control_is_refused() {
        let set = set_from(&[("c1", Condition::Control, &[1, 2])]);
        let err = mean_distance_to_control(&set, 0, &set.controls()).unwrap_err();
        assert!(matches!(err, EvalError::SoleControl(ref s) if s == "c1"));
    }

    #[test]
    fn missing_assignments_surface_as_data_errors() {
        let mut set = JudgmentSet::new();
        set.add_judgment("a", Condition::Control, "i1", Category::Numbered(1))
            .unwrap();
        set.add_judgment("a", Condition::Control, "i2", Category::Numbered(1))
            .unwrap();
        set.add_judgment("b", Condition::Control, "i1", Category::Numbered(1))
            .unwrap();
        let err = pairwise_distance(&set, 0, 1).unwrap_err();
        assert!(matches!(err, DataError::MissingAssignment { .. }));
    }

    #[test]
    fn per_item_vector_averages_to_the_mean() {
        let set = set_from(&[
            ("c1", Condition::Control, &[1, 1, 2, 2, 3]),
            ("c2", Condition::Control, &[1, 2, 2, 3, 3]),
            ("e", Condition::Experimental, &[1, 1, 1, 3, 3]),
        ]);
        let controls = set.controls();
        let e = set.subject_index("e").unwrap();
        let v = per_item_control_distance(&set, e, &controls).unwrap();
        let mean: f64 = v.iter().sum::<f64>() / v.len() as f64;
        let direct = mean_distance_to_control(&set, e, &controls).unwrap();
        assert!((mean - direct).abs() < 1e-12);
    }
}
