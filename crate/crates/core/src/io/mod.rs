//! File formats: fact files, columnar TSV, Prolog export and metrics CSV.

mod csv;
mod facts;
mod prolog;
mod tsv;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

pub use csv::{read_metrics_csv, write_csv_row, write_metrics_csv, BenchRow, CsvError, CSV_HEADER};
pub use facts::{load_facts, save_facts, FactSchema, LoadError, Predicate};
pub use prolog::{export_prolog, ExportError, PrologStyle};
pub use tsv::{load_tsv, save_tsv, TsvError, TSV_MAGIC};

use crate::graph::{GraphStore, Schema, ValidationReport};

#[derive(Debug, thiserror::Error)]
pub enum GraphFileError {
    #[error(transparent)]
    Facts(#[from] LoadError),
    #[error(transparent)]
    Tsv(#[from] TsvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn is_tsv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "tsv")
}

/// Loads a graph file: TSV when the extension is `.tsv`, facts otherwise.
pub fn read_graph(path: &Path) -> Result<(GraphStore, ValidationReport), GraphFileError> {
    let r = BufReader::new(File::open(path)?);
    if is_tsv(path) {
        let g = load_tsv(r, &Schema::default())?;
        let report = g.validate();
        Ok((g, report))
    } else {
        Ok(load_facts(r, &FactSchema::default())?)
    }
}

/// Writes a graph file, choosing the format as [`read_graph`] does.
pub fn write_graph(g: &GraphStore, path: &Path) -> std::io::Result<()> {
    let w = BufWriter::new(File::create(path)?);
    if is_tsv(path) {
        save_tsv(g, w)
    } else {
        save_facts(g, w)
    }
}
