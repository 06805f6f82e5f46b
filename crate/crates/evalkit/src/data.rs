//! Judgment data model and CSV ingestion.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Control,
    Experimental,
    Random,
}

impl Condition {
    pub fn parse(s: &str) -> Option<Condition> {
        match s.trim().to_ascii_lowercase().as_str() {
            "control" => Some(Condition::Control),
            "experimental" => Some(Condition::Experimental),
            "random" => Some(Condition::Random),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Condition::Control => "control",
            Condition::Experimental => "experimental",
            Condition::Random => "random",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A category assignment: one of the numbered piles, or the extra
/// "none of the above" pile. For distance purposes none-of-the-above is an
/// ordinary category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Numbered(u32),
    NoneOfTheAbove,
}

impl Category {
    pub fn parse(s: &str) -> Option<Category> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Some(Category::NoneOfTheAbove);
        }
        s.parse::<u32>()
            .ok()
            .filter(|&n| n >= 1)
            .map(Category::Numbered)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::Numbered(n) => write!(f, "{n}"),
            Category::NoneOfTheAbove => f.write_str("none"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subject {
    pub id: String,
    pub condition: Condition,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("judgments i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("judgments csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("duplicate assignment for subject `{subject}`, item `{item}`")]
    DuplicateAssignment { subject: String, item: String },
    #[error("subject `{subject}` appears under two conditions")]
    ConflictingCondition { subject: String },
    #[error("missing assignment for subject `{subject}`, item `{item}`")]
    MissingAssignment { subject: String, item: String },
    #[error("no such subject `{0}`")]
    UnknownSubject(String),
    #[error("judgment set is empty")]
    Empty,
}

/// Subjects × items category assignments. Items and subjects keep first
/// appearance order so reports are stable.
#[derive(Debug, Clone, Default)]
pub struct JudgmentSet {
    items: Vec<String>,
    subjects: Vec<Subject>,
    item_index: HashMap<String, usize>,
    subject_index: HashMap<String, usize>,
    /// assignments[subject][item]
    assignments: Vec<Vec<Option<Category>>>,
}

impl JudgmentSet {
    pub fn new() -> JudgmentSet {
        JudgmentSet::default()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn subject_index(&self, id: &str) -> Option<usize> {
        self.subject_index.get(id).copied()
    }

    /// Indices of subjects in the given condition, in first-appearance order.
    pub fn subjects_in(&self, condition: Condition) -> Vec<usize> {
        self.subjects
            .iter()
            .enumerate()
            .filter(|(_, s)| s.condition == condition)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn controls(&self) -> Vec<usize> {
        self.subjects_in(Condition::Control)
    }

    pub fn category(&self, subject: usize, item: usize) -> Result<Category, DataError> {
        self.assignments
            .get(subject)
            .and_then(|row| row.get(item))
            .copied()
            .flatten()
            .ok_or_else(|| DataError::MissingAssignment {
                subject: self
                    .subjects
                    .get(subject)
                    .map(|s| s.id.clone())
                    .unwrap_or_else(|| format!("#{subject}")),
                item: self
                    .items
                    .get(item)
                    .cloned()
                    .unwrap_or_else(|| format!("#{item}")),
            })
    }

    pub fn add_judgment(
        &mut self,
        subject: &str,
        condition: Condition,
        item: &str,
        category: Category,
    ) -> Result<(), DataError> {
        let s_idx = match self.subject_index.get(subject) {
            Some(&i) => {
                if self.subjects[i].condition != condition {
                    return Err(DataError::ConflictingCondition {
                        subject: subject.to_string(),
                    });
                }
                i
            }
            None => {
                self.subjects.push(Subject {
                    id: subject.to_string(),
                    condition,
                });
                self.subject_index
                    .insert(subject.to_string(), self.subjects.len() - 1);
                self.assignments.push(vec![None; self.items.len()]);
                self.subjects.len() - 1
            }
        };
        let i_idx = match self.item_index.get(item) {
            Some(&i) => i,
            None => {
                self.items.push(item.to_string());
                self.item_index
                    .insert(item.to_string(), self.items.len() - 1);
                for row in &mut self.assignments {
                    row.push(None);
                }
                self.items.len() - 1
            }
        };
        let slot = &mut self.assignments[s_idx][i_idx];
        if slot.is_some() {
            return Err(DataError::DuplicateAssignment {
                subject: subject.to_string(),
                item: item.to_string(),
            });
        }
        *slot = Some(category);
        Ok(())
    }

    /// Parses the flat CSV format. Header must be
    /// `subject,condition,item,category`; the category column is an integer
    /// from 1 up or the literal `none`. No quoting is supported.
    pub fn from_csv_str(src: &str) -> Result<JudgmentSet, DataError> {
        let mut set = JudgmentSet::new();
        let mut lines = src.lines().enumerate();
        let (_, header) = lines.next().ok_or(DataError::Empty)?;
        let header_fields: Vec<String> = header
            .split(',')
            .map(|f| f.trim().to_ascii_lowercase())
            .collect();
        if header_fields != ["subject", "condition", "item", "category"] {
            return Err(DataError::Csv {
                line: 1,
                msg: "header must be `subject,condition,item,category`".into(),
            });
        }
        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(DataError::Csv {
                    line: lineno,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let condition = Condition::parse(fields[1]).ok_or_else(|| DataError::Csv {
                line: lineno,
                msg: format!("unknown condition `{}`", fields[1]),
            })?;
            let category = Category::parse(fields[3]).ok_or_else(|| DataError::Csv {
                line: lineno,
                msg: format!(
                    "bad category `{}` (want an integer >= 1 or `none`)",
                    fields[3]
                ),
            })?;
            if fields[0].is_empty() || fields[2].is_empty() {
                return Err(DataError::Csv {
                    line: lineno,
                    msg: "subject and item must be non-empty".into(),
                });
            }
            set.add_judgment(fields[0], condition, fields[2], category)?;
        }
        if set.subjects.is_empty() {
            return Err(DataError::Empty);
        }
        Ok(set)
    }

    pub fn from_csv_path(path: &Path) -> Result<JudgmentSet, DataError> {
        JudgmentSet::from_csv_str(&std::fs::read_to_string(path)?)
    }

    /// Largest numbered category present, if any.
    pub fn max_numbered_category(&self) -> Option<u32> {
        self.assignments
            .iter()
            .flatten()
            .flatten()
            .filter_map(|c| match c {
                Category::Numbered(n) => Some(*n),
                Category::NoneOfTheAbove => None,
            })
            .max()
    }
}
