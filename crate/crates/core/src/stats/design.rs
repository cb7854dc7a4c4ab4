//! Design matrices with dummy-coded fixed effects.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::linalg::independent_columns;
use super::StatsError;

pub const INTERCEPT: &str = "(intercept)";

/// Named numeric columns of equal length. Column 0 is the intercept when one
/// is present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignMatrix {
    names: Vec<String>,
    #[serde(skip)]
    columns: Vec<Vec<f64>>,
    n_rows: usize,
    /// Dropped (reference) level of each categorical field.
    reference_levels: BTreeMap<String, String>,
    /// Columns removed because they were collinear with earlier ones.
    pruned: Vec<String>,
}

impl DesignMatrix {
    /// Wraps the given columns as-is, without pruning.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        if names.len() != columns.len() {
            return Err(StatsError::InvalidInput("one name per column required".into()));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(StatsError::InvalidInput("columns differ in length".into()));
        }
        let unique: BTreeSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(StatsError::InvalidInput("duplicate column names".into()));
        }
        Ok(Self {
            names,
            columns,
            n_rows,
            reference_levels: BTreeMap::new(),
            pruned: Vec::new(),
        })
    }

    /// Intercept followed by the given columns, without pruning.
    pub fn with_intercept(numeric: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        let n = numeric.first().map(|(_, c)| c.len()).unwrap_or(0);
        let mut names = vec![INTERCEPT.to_string()];
        let mut columns = vec![vec![1.0; n]];
        for (name, col) in numeric {
            names.push(name);
            columns.push(col);
        }
        Self::from_columns(names, columns)
    }

    pub fn intercept_only(n_rows: usize) -> Self {
        Self::from_columns(vec![INTERCEPT.to_string()], vec![vec![1.0; n_rows]]).expect("single column")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn has_intercept(&self) -> bool {
        self.names.first().is_some_and(|n| n == INTERCEPT)
    }

    pub fn reference_levels(&self) -> &BTreeMap<String, String> {
        &self.reference_levels
    }

    pub fn pruned(&self) -> &[String] {
        &self.pruned
    }

    /// Copy without column `name`.
    pub fn without(&self, name: &str) -> Self {
        let mut out = self.clone();
        if let Some(i) = out.names.iter().position(|n| n == name) {
            out.names.remove(i);
            out.columns.remove(i);
        }
        out
    }
}

/// Builds `[intercept | numeric | dummies]`. Each categorical contributes one
/// indicator per level except its lexicographically smallest, which becomes the
/// reference. Columns in the span of earlier ones are pruned and listed in
/// [`DesignMatrix::pruned`].
pub fn encode_fixed_effects(
    outcome: &[f64],
    numeric: Vec<(String, Vec<f64>)>,
    categorical: Vec<(String, Vec<String>)>,
) -> Result<DesignMatrix, StatsError> {
    let n = outcome.len();
    if n == 0 {
        return Err(StatsError::InvalidInput("no observations".into()));
    }
    let first = outcome[0];
    if outcome.iter().all(|&y| y == first) {
        return Err(StatsError::Degenerate(format!("outcome is constant ({first})")));
    }
    let mut names = vec![INTERCEPT.to_string()];
    let mut columns = vec![vec![1.0; n]];
    for (name, col) in numeric {
        if col.len() != n {
            return Err(StatsError::InvalidInput(format!("column {name} has {} rows, expected {n}", col.len())));
        }
        names.push(name);
        columns.push(col);
    }
    let mut reference_levels = BTreeMap::new();
    for (field, values) in categorical {
        if values.len() != n {
            return Err(StatsError::InvalidInput(format!(
                "categorical {field} has {} rows, expected {n}",
                values.len()
            )));
        }
        let levels: BTreeSet<&str> = values.iter().map(String::as_str).collect();
        let mut levels = levels.into_iter();
        let reference = levels.next().expect("n > 0 so at least one level");
        reference_levels.insert(field.clone(), reference.to_string());
        for level in levels {
            names.push(format!("{field}[{level}]"));
            columns.push(values.iter().map(|v| if v == level { 1.0 } else { 0.0 }).collect());
        }
    }
    let keep = independent_columns(&columns);
    let mut pruned = Vec::new();
    let (mut kept_names, mut kept_cols) = (Vec::new(), Vec::new());
    for ((name, col), k) in names.into_iter().zip(columns).zip(keep) {
        if k {
            kept_names.push(name);
            kept_cols.push(col);
        } else {
            pruned.push(name);
        }
    }
    let mut design = DesignMatrix::from_columns(kept_names, kept_cols)?;
    design.reference_levels = reference_levels;
    design.pruned = pruned;
    Ok(design)
}
