//! Distance report assembly and formatting.

use std::fmt::Write as _;

use crate::bootstrap::bootstrap_ci;
use crate::data::{Condition, JudgmentSet};
use crate::distance::{distance_matrix, mean_distance_to_control};
use crate::kappa::{cohen_kappa, Kappa};
use crate::EvalError;

#[derive(Debug, Clone)]
pub struct ReportConfig {
    /// Confidence level in percent.
    pub ci_level: f64,
    pub resamples: usize,
    pub seed: u64,
    /// Also compute the full pairwise κ matrix.
    pub include_kappa: bool,
}

impl Default for ReportConfig {
    fn default() -> ReportConfig {
        ReportConfig {
            ci_level: 95.0,
            resamples: 2000,
            seed: 0,
            include_kappa: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub subject: String,
    pub condition: Condition,
    /// Mean distance to the control group (self excluded for controls).
    pub mean_distance: f64,
    pub ci: (f64, f64),
}

/// The full analysis: one row per subject grouped by condition (control,
/// then experimental, then random), sorted ascending by mean distance
/// within each condition, plus the pairwise distance matrix and optionally
/// a pairwise κ matrix.
#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub rows: Vec<ReportRow>,
    pub ci_level: f64,
    /// Subject ids in matrix order.
    pub subject_ids: Vec<String>,
    pub pairwise: Vec<Vec<f64>>,
    pub kappa: Option<Vec<Vec<Kappa>>>,
}

pub fn report(set: &JudgmentSet, config: &ReportConfig) -> Result<DistanceReport, EvalError> {
    let controls = set.controls();
    if controls.is_empty() {
        return Err(EvalError::NoControls);
    }
    let mut rows = Vec::with_capacity(set.subjects().len());
    for (idx, subject) in set.subjects().iter().enumerate() {
        let mean = mean_distance_to_control(set, idx, &controls)?;
        let ci = bootstrap_ci(
            set,
            idx,
            &controls,
            config.ci_level,
            config.resamples,
            config.seed,
        )?;
        rows.push(ReportRow {
            subject: subject.id.clone(),
            condition: subject.condition,
            mean_distance: mean,
            ci,
        });
    }
    let condition_rank = |c: Condition| match c {
        Condition::Control => 0,
        Condition::Experimental => 1,
        Condition::Random => 2,
    };
    rows.sort_by(|a, b| {
        condition_rank(a.condition)
            .cmp(&condition_rank(b.condition))
            .then(
                a.mean_distance
                    .partial_cmp(&b.mean_distance)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then_with(|| a.subject.cmp(&b.subject))
    });
    let pairwise = distance_matrix(set).map_err(EvalError::Data)?;
    let kappa = if config.include_kappa {
        let n = set.subjects().len();
        let mut m = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                row.push(cohen_kappa(set, a, b).map_err(EvalError::Data)?);
            }
            m.push(row);
        }
        Some(m)
    } else {
        None
    };
    Ok(DistanceReport {
        rows,
        ci_level: config.ci_level,
        subject_ids: set.subjects().iter().map(|s| s.id.clone()).collect(),
        pairwise,
        kappa,
    })
}

impl DistanceReport {
    /// Aligned plain-text table, one row per subject.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let id_width = self
            .rows
            .iter()
            .map(|r| r.subject.len())
            .chain(["subject".len()])
            .max()
            .unwrap_or(7);
        let level = format_level(self.ci_level);
        let _ = writeln!(
            out,
            "{:<12} {:<id_width$} {:>10} {:>9} {:>9}",
            "condition",
            "subject",
            "mean_dist",
            format!("ci{level}_lo"),
            format!("ci{level}_hi"),
        );
        let mut last_condition = None;
        for row in &self.rows {
            if last_condition.is_some() && last_condition != Some(row.condition) {
                let _ = writeln!(out);
            }
            last_condition = Some(row.condition);
            let _ = writeln!(
                out,
                "{:<12} {:<id_width$} {:>10.3} {:>9.3} {:>9.3}",
                row.condition.label(),
                row.subject,
                row.mean_distance,
                row.ci.0,
                row.ci.1,
            );
        }
        if let Some(kappa) = &self.kappa {
            let _ = writeln!(out);
            let _ = writeln!(out, "pairwise Cohen's kappa (rows/columns in input order):");
            let _ = write!(out, "{:<id_width$}", "");
            for id in &self.subject_ids {
                let _ = write!(out, " {id:>8.8}");
            }
            let _ = writeln!(out);
            for (a, id) in self.subject_ids.iter().enumerate() {
                let _ = write!(out, "{id:<id_width$}");
                for b in 0..self.subject_ids.len() {
                    let k = &kappa[a][b];
                    let mark = if k.degenerate { "*" } else { "" };
                    let _ = write!(out, " {:>8}", format!("{:.3}{mark}", k.value));
                }
                let _ = writeln!(out);
            }
            if kappa.iter().any(|row| row.iter().any(|k| k.degenerate)) {
                let _ = writeln!(out, "(* degenerate marginals: kappa set by convention)");
            }
        }
        out
    }

    /// Machine-readable CSV of the per-subject rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subject,condition,mean_distance,ci_lo,ci_hi\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6}",
                row.subject, row.condition, row.mean_distance, row.ci.0, row.ci.1
            );
        }
        out
    }
}

fn format_level(level: f64) -> String {
    if (level - level.round()).abs() < 1e-9 {
        format!("{}", level.round() as i64)
    } else {
        format!("{level}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Category, Condition};
    use crate::random_baseline;

    fn demo_set() -> JudgmentSet {
        let mut set = JudgmentSet::new();
        let rows: [(&str, Condition, [u32; 6]); 5] = [
            ("c2", Condition::Control, [1, 1, 2, 2, 3, 3]),
            ("c1", Condition::Control, [1, 1, 2, 2, 3, 1]),
            ("e2", Condition::Experimental, [1, 2, 2, 1, 3, 3]),
            ("e1", Condition::Experimental, [1, 1, 2, 2, 1, 3]),
            ("c3", Condition::Control, [1, 1, 2, 2, 3, 3]),
        ];
        for (id, cond, cats) in rows {
            for (i, c) in cats.iter().enumerate() {
                set.add_judgment(id, cond, &format!("i{i}"), Category::Numbered(*c))
                    .unwrap();
            }
        }
        set
    }

    #[test]
    fn rows_are_grouped_and_sorted() {
        let set = random_baseline(&demo_set(), 4, 2, 3, false).unwrap();
        let rep = report(&set, &ReportConfig::default()).unwrap();
        let conditions: Vec<Condition> = rep.rows.iter().map(|r| r.condition).collect();
        let mut expected = conditions.clone();
        expected.sort_by_key(|c| match c {
            Condition::Control => 0,
            Condition::Experimental => 1,
            Condition::Random => 2,
        });
        assert_eq!(conditions, expected, "grouped by condition");
        for pair in rep.rows.windows(2) {
            if pair[0].condition == pair[1].condition {
                assert!(pair[0].mean_distance <= pair[1].mean_distance);
            }
        }
        for row in &rep.rows {
            assert!(row.ci.0 <= row.mean_distance + 1e-12);
            assert!(row.ci.1 >= row.mean_distance - 1e-12);
        }
    }

    #[test]
    fn report_without_controls_is_refused() {
        let mut set = JudgmentSet::new();
        set.add_judgment("e", Condition::Experimental, "i", Category::Numbered(1))
            .unwrap();
        assert!(matches!(
            report(&set, &ReportConfig::default()),
            Err(EvalError::NoControls)
        ));
    }

    #[test]
    fn csv_and_table_have_one_line_per_subject() {
        let set = demo_set();
        let rep = report(&set, &ReportConfig::default()).unwrap();
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 1 + set.subjects().len());
        assert!(csv.starts_with("subject,condition,mean_distance,ci_lo,ci_hi\n"));
        let table = rep.render_table();
        assert!(table.contains("ci95_lo"));
        for s in set.subjects() {
            assert!(table.contains(&s.id));
        }
    }

    #[test]
    fn kappa_matrix_is_optional_and_symmetric_diagonal_one() {
        let set = demo_set();
        let config = ReportConfig {
            include_kappa: true,
            ..ReportConfig::default()
        };
        let rep = report(&set, &config).unwrap();
        let kappa = rep.kappa.as_ref().unwrap();
        let n = rep.subject_ids.len();
        for a in 0..n {
            assert!((kappa[a][a].value - 1.0).abs() < 1e-12);
            for b in 0..n {
                assert!((kappa[a][b].value - kappa[b][a].value).abs() < 1e-12);
            }
        }
    }
}
