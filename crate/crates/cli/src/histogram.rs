//! Measurement histograms as comma-separated rows.

use std::io::{Read, Write};
use std::path::Path;

use qbnsl::qaoa::{PenalizedCost, QaoaResult};
use qbnsl::sim::ShotHistogram;
use qbnsl::Bitstring;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::table::format_arcs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub bitstring: Bitstring,
    pub count: u64,
    pub cost: f64,
    /// Arcs of the adjacency block, cyclic or not.
    pub arcs: String,
}

/// Rows sorted by count, most frequent first (ties by bitstring).
pub fn histogram_rows(hist: &ShotHistogram, cost: &PenalizedCost) -> Result<Vec<HistogramRow>> {
    let layout = cost.layout();
    hist.sorted_by_count()
        .into_iter()
        .map(|(bits, count)| {
            Ok(HistogramRow {
                bitstring: bits,
                count,
                cost: cost.cost(bits.index()),
                arcs: format_arcs(&layout.decode(bits)?.arcs()),
            })
        })
        .collect()
}

pub fn write_histogram<W: Write>(hist: &ShotHistogram, cost: &PenalizedCost, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in histogram_rows(hist, cost)? {
        w.serialize(row).map_err(|e| CliError::data("<histogram>", e))?;
    }
    w.flush().map_err(|e| CliError::io("<histogram>", e))?;
    Ok(())
}

/// Writes the final histogram of `result` to `path`.
pub fn emit_histogram(result: &QaoaResult, cost: &PenalizedCost, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_histogram(&result.final_histogram, cost, std::io::BufWriter::new(file))
}

pub fn read_histogram<R: Read>(reader: R) -> Result<ShotHistogram> {
    let mut r = csv::Reader::from_reader(reader);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<HistogramRow>, _>>()
        .map_err(|e| CliError::data("<histogram>", e))?;
    let width = rows.first().map_or(0, |r| r.bitstring.len());
    Ok(ShotHistogram::from_counts(width, rows.into_iter().map(|r| (r.bitstring, r.count)))?)
}

pub fn read_histogram_path(path: impl AsRef<Path>) -> Result<ShotHistogram> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_histogram(file).map_err(|e| match e {
        CliError::Data { message, .. } => CliError::data(path, message),
        other => other,
    })
}
