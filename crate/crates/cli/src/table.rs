//! Comma-separated result tables.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// One aggregated cell: an algorithm at fixed hyperparameters, summarised
/// over its restarts. Costs are penalised Hamiltonian values, so the score
/// of a penalty-free solution is the negated cost.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub algorithm: String,
    pub p: Option<usize>,
    pub alpha: Option<f64>,
    pub shots: Option<u64>,
    pub noise: Option<String>,
    pub omega: Option<f64>,
    pub restarts: usize,
    pub mean_best_cost: f64,
    pub std_best_cost: f64,
    pub min_best_cost: f64,
    pub mean_iterations: f64,
    pub std_iterations: f64,
    /// Mean Shannon entropy (bits) of the final measurement histograms.
    pub mean_entropy: Option<f64>,
    /// Mean CVaR objective at the final parameters.
    pub mean_objective: Option<f64>,
    /// Restarts whose best cost reached the exhaustive optimum.
    pub optimum_hits: Option<usize>,
    /// Cost of the exhaustive optimum.
    pub optimum_cost: Option<f64>,
    /// Structural Hamming distance of the best graph to the generating one.
    pub shd: Option<usize>,
    /// Arcs of the best graph as `i->j` separated by `;`.
    pub best_arcs: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if self.rows.is_empty() {
            w.write_record(HEADER).map_err(|e| CliError::data("<table>", e))?;
        }
        for row in &self.rows {
            w.serialize(row).map_err(|e| CliError::data("<table>", e))?;
        }
        w.flush().map_err(|e| CliError::io("<table>", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ResultRow>, _>>()
            .map_err(|e| CliError::data("<table>", e))?;
        Ok(ResultTable { rows })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read_csv(file).map_err(|e| match e {
            CliError::Data { message, .. } => CliError::data(path, message),
            other => other,
        })
    }

    /// The config hash shared by every row, if the table has rows.
    pub fn config_hash(&self) -> Option<&str> {
        self.rows.first().map(|r| r.config_hash.as_str())
    }

    pub fn find<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a ResultRow> {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }
}

const HEADER: [&str; 20] = [
    "experiment_id",
    "algorithm",
    "p",
    "alpha",
    "shots",
    "noise",
    "omega",
    "restarts",
    "mean_best_cost",
    "std_best_cost",
    "min_best_cost",
    "mean_iterations",
    "std_iterations",
    "mean_entropy",
    "mean_objective",
    "optimum_hits",
    "optimum_cost",
    "shd",
    "best_arcs",
    "config_hash",
];

/// `0->2;1->2`.
pub fn format_arcs(arcs: &[(usize, usize)]) -> String {
    arcs.iter().map(|(i, j)| format!("{i}->{j}")).collect::<Vec<_>>().join(";")
}

pub fn parse_arcs(text: &str) -> Option<Vec<(usize, usize)>> {
    if text.is_empty() {
        return Some(Vec::new());
    }
    text.split(';')
        .map(|a| {
            let (i, j) = a.split_once("->")?;
            Some((i.parse().ok()?, j.parse().ok()?))
        })
        .collect()
}
