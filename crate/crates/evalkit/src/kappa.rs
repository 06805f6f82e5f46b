//! Cohen's kappa between two subjects.

use std::collections::HashMap;

use crate::data::{Category, DataError, JudgmentSet};

/// Chance-corrected agreement. When chance agreement is 1 (both subjects
/// use a single identical category for everything) the statistic is
/// undefined; by convention it is 1 for perfect observed agreement and 0
/// otherwise, with `degenerate` set so reports can flag it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub value: f64,
    pub degenerate: bool,
}

/// κ = (p_o − p_e) / (1 − p_e), with observed agreement p_o and chance
/// agreement p_e from the two subjects' marginal category frequencies.
pub fn cohen_kappa(set: &JudgmentSet, a: usize, b: usize) -> Result<Kappa, DataError> {
    let n = set.items().len();
    if n == 0 {
        return Err(DataError::Empty);
    }
    let mut agree = 0usize;
    let mut marg_a: HashMap<Category, usize> = HashMap::new();
    let mut marg_b: HashMap<Category, usize> = HashMap::new();
    for item in 0..n {
        let ca = set.category(a, item)?;
        let cb = set.category(b, item)?;
        if ca == cb {
            agree += 1;
        }
        *marg_a.entry(ca).or_insert(0) += 1;
        *marg_b.entry(cb).or_insert(0) += 1;
    }
    let nf = n as f64;
    let p_o = agree as f64 / nf;
    let mut p_e = 0.0;
    for (cat, &count_a) in &marg_a {
        if let Some(&count_b) = marg_b.get(cat) {
            p_e += (count_a as f64 / nf) * (count_b as f64 / nf);
        }
    }
    if (1.0 - p_e).abs() < 1e-12 {
        return Ok(Kappa {
            value: if (1.0 - p_o).abs() < 1e-12 { 1.0 } else { 0.0 },
            degenerate: true,
        });
    }
    Ok(Kappa {
        value: (p_o - p_e) / (1.0 - p_e),
        degenerate: false,
    })
}
