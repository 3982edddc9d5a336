use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A categorical variable and its state labels, in index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, states: Vec<String>) -> Self {
        Variable {
            name: name.into(),
            states,
        }
    }

    /// A variable whose states are labelled `"0"`, `"1"`, ...
    pub fn with_cardinality(name: impl Into<String>, cardinality: usize) -> Self {
        Variable::new(name, (0..cardinality).map(|s| s.to_string()).collect())
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }
}

/// Column-oriented table of categorical observations.
///
/// Cell `(row, i)` is a state index below `cardinality(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDataset {
    variables: Vec<Variable>,
    columns: Vec<Vec<u16>>,
    rows: usize,
}

impl DiscreteDataset {
    /// Builds a dataset from row-major state indices.
    pub fn from_rows(variables: Vec<Variable>, rows: &[Vec<usize>]) -> Result<Self> {
        let n = variables.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::domain(format!(
                    "row {r} has {} cells, expected {n}",
                    row.len()
                )));
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                col.push(u16::try_from(v).map_err(|_| Error::domain("state index too large"))?);
            }
        }
        Self::from_columns(variables, columns)
    }

    pub fn from_columns(variables: Vec<Variable>, columns: Vec<Vec<u16>>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::domain("dataset needs at least one variable"));
        }
        if columns.len() != variables.len() {
            return Err(Error::domain("column count does not match variable count"));
        }
        let rows = columns[0].len();
        if rows == 0 {
            return Err(Error::domain("dataset needs at least one row"));
        }
        for (var, col) in variables.iter().zip(&columns) {
            if var.cardinality() < 2 {
                return Err(Error::domain(format!(
                    "variable `{}` has {} state(s), at least 2 required",
                    var.name,
                    var.cardinality()
                )));
            }
            if col.len() != rows {
                return Err(Error::domain("columns have different lengths"));
            }
            if let Some(&bad) = col.iter().find(|&&v| v as usize >= var.cardinality()) {
                return Err(Error::domain(format!(
                    "value {bad} out of range for `{}` (cardinality {})",
                    var.name,
                    var.cardinality()
                )));
            }
        }
        Ok(DiscreteDataset {
            variables,
            columns,
            rows,
        })
    }

    /// Reads comma-separated text with a header row of variable names.
    ///
    /// State labels are assigned indices in order of first appearance.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let n = names.len();
        let mut lookup: Vec<HashMap<String, u16>> = vec![HashMap::new(); n];
        let mut states: Vec<Vec<String>> = vec![Vec::new(); n];
        let mut columns: Vec<Vec<u16>> = vec![Vec::new(); n];
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != n {
                return Err(Error::parse(format!(
                    "line {}: expected {n} fields, found {}",
                    rec.position().map_or(0, |p| p.line()),
                    rec.len()
                )));
            }
            for (i, field) in rec.iter().enumerate() {
                let label = field.trim();
                let idx = match lookup[i].get(label) {
                    Some(&k) => k,
                    None => {
                        let k = states[i].len() as u16;
                        lookup[i].insert(label.to_string(), k);
                        states[i].push(label.to_string());
                        k
                    }
                };
                columns[i].push(idx);
            }
        }
        let variables = names
            .into_iter()
            .zip(states)
            .map(|(name, s)| Variable::new(name, s))
            .collect();
        Self::from_columns(variables, columns)
    }

    /// Reads comma-separated text whose labels must come from `variables`.
    ///
    /// Columns are matched to variables by header name, so a dataset may
    /// list them in any order. State indices follow the declared labels.
    pub fn read_csv_with_variables<R: Read>(reader: R, variables: &[Variable]) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut order = Vec::with_capacity(variables.len());
        for var in variables {
            let pos = headers
                .iter()
                .position(|h| *h == var.name)
                .ok_or_else(|| Error::parse(format!("column `{}` missing", var.name)))?;
            order.push(pos);
        }
        let mut columns: Vec<Vec<u16>> = vec![Vec::new(); variables.len()];
        for rec in rdr.records() {
            let rec = rec?;
            for (i, (&pos, var)) in order.iter().zip(variables).enumerate() {
                let label = rec
                    .get(pos)
                    .ok_or_else(|| Error::parse("short record"))?
                    .trim();
                let k = var.states.iter().position(|s| s == label).ok_or_else(|| {
                    Error::parse(format!("unknown state `{label}` for `{}`", var.name))
                })?;
                columns[i].push(k as u16);
            }
        }
        Self::from_columns(variables.to_vec(), columns)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.variables.iter().map(|v| v.name.as_str()))?;
        for r in 0..self.rows {
            w.write_record(
                self.variables
                    .iter()
                    .zip(&self.columns)
                    .map(|(v, c)| v.states[c[r] as usize].as_str()),
            )?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn cardinality(&self, i: usize) -> usize {
        self.variables[i].cardinality()
    }

    pub fn column(&self, i: usize) -> &[u16] {
        &self.columns[i]
    }

    pub fn value(&self, row: usize, i: usize) -> usize {
        self.columns[i][row] as usize
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Keeps only the listed columns, in the listed order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.num_vars()) {
            return Err(Error::domain(format!("column {bad} out of range")));
        }
        Self::from_columns(
            indices.iter().map(|&i| self.variables[i].clone()).collect(),
            indices.iter().map(|&i| self.columns[i].clone()).collect(),
        )
    }
}
