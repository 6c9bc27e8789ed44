use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::{BerRecord, PrecoderTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    /// Whitespace-separated `snr_db ber` blocks, one per precoder.
    Plotdat,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "plotdat" => Ok(OutputFormat::Plotdat),
            other => Err(Error::InvalidParams(format!("unknown format '{other}'"))),
        }
    }
}

/// Serializes records into the bytes [`emit_results`] would write.
pub fn render(records: &[BerRecord], format: OutputFormat) -> Result<Vec<u8>> {
    if records.is_empty() {
        return Err(Error::InvalidParams("no records to write".into()));
    }
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r)?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        OutputFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(records)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        OutputFormat::Plotdat => Ok(plotdat(records).into_bytes()),
    }
}

fn plotdat(records: &[BerRecord]) -> String {
    let mut order: Vec<PrecoderTag> = Vec::new();
    for r in records {
        if !order.contains(&r.precoder) {
            order.push(r.precoder);
        }
    }
    let mut out = String::new();
    for (b, tag) in order.iter().enumerate() {
        if b > 0 {
            out.push('\n');
        }
        let first = records.iter().find(|r| r.precoder == *tag).expect("tag came from records");
        let _ = writeln!(
            out,
            "# {tag} nt={} nu={} mod={} L={} V={} K={} C_f={}",
            first.nt, first.nu, first.mod_order, first.l, first.v, first.k, first.complexity_factor
        );
        let _ = writeln!(out, "# snr_db ber");
        for r in records.iter().filter(|r| r.precoder == *tag) {
            let _ = writeln!(out, "{} {}", r.snr_db, r.ber);
        }
    }
    out
}

/// Writes `records` to `path`, replacing any existing file.
pub fn emit_results(records: &[BerRecord], path: &Path, format: OutputFormat) -> Result<()> {
    let bytes = render(records, format)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn parse_csv(bytes: &[u8]) -> Result<Vec<BerRecord>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<BerRecord>> {
    parse_csv(&fs::read(path)?)
}
