//! Block-explorer style transaction table.

use std::str::FromStr;

use crate::canonical::hex0x;
use crate::ledger::TxRow;
use crate::telemetry::{decode_value, EncodingPolicy};

pub const COLUMNS: [&str; 5] = ["Tx Hash", "Block", "From", "To", "Value"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Tsv,
    Csv,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(TableFormat::Tsv),
            "csv" => Ok(TableFormat::Csv),
            other => Err(format!("unknown table format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExplorerOptions {
    pub format: TableFormat,
    /// Print base units instead of decoded degrees.
    pub raw: bool,
    pub encoding: EncodingPolicy,
}

/// Render rows with a header line. Output depends only on the rows and
/// options.
pub fn render_table(rows: &[TxRow], options: &ExplorerOptions) -> String {
    let delimiter = match options.format {
        TableFormat::Tsv => b'\t',
        TableFormat::Csv => b',',
    };
    let mut out = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    out.write_record(COLUMNS).expect("writing to memory");
    for row in rows {
        let value = if options.raw {
            row.value.to_string()
        } else {
            decode_value(row.value, &options.encoding).to_string()
        };
        out.write_record([
            hex0x::encode(&row.tx_hash),
            row.height.to_string(),
            row.from.to_string(),
            row.to.to_string(),
            value,
        ])
        .expect("writing to memory");
    }
    String::from_utf8(out.into_inner().expect("flushing to memory")).expect("fields are utf-8")
}
