use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

use super::codec::Temperature;
use super::TelemetryError;

pub const CSV_HEADER: [&str; 3] = ["sensor_id", "timestamp", "temperature_c"];

/// One temperature sample as recorded by a sensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorReading {
    pub sensor_id: String,
    /// ISO-8601, kept verbatim; only the value goes on chain.
    pub timestamp: String,
    pub temperature: Temperature,
}

fn valid_timestamp(text: &str) -> bool {
    DateTime::parse_from_rfc3339(text).is_ok()
        || NaiveDateTime::parse_from_str(text, "%Y-%m-%dT%H:%M:%S%.f").is_ok()
}

fn parse_row(fields: &csv::StringRecord) -> Result<SensorReading, String> {
    if fields.len() != 3 {
        return Err(format!("expected 3 fields, found {}", fields.len()));
    }
    let sensor_id = &fields[0];
    if sensor_id.is_empty() {
        return Err("empty sensor_id".into());
    }
    let timestamp = &fields[1];
    if !valid_timestamp(timestamp) {
        return Err(format!("bad timestamp {timestamp:?}"));
    }
    let temperature: Temperature = fields[2]
        .parse()
        .map_err(|_| format!("bad temperature {:?}", &fields[2]))?;
    if !temperature.is_admissible() {
        return Err(format!("temperature {temperature} out of range"));
    }
    Ok(SensorReading {
        sensor_id: sensor_id.to_string(),
        timestamp: timestamp.to_string(),
        temperature,
    })
}

/// Read `sensor_id,timestamp,temperature_c` records in order. Any bad row
/// fails the whole ingest.
pub fn ingest_csv<R: Read>(input: R) -> Result<Vec<SensorReading>, TelemetryError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(TelemetryError::MissingHeader),
        Some(Err(_)) => return Err(TelemetryError::MissingHeader),
        Some(Ok(h)) => h,
    };
    if header.iter().ne(CSV_HEADER) {
        return Err(TelemetryError::MissingHeader);
    }

    let mut out = Vec::new();
    for record in records {
        let record = record.map_err(|e| TelemetryError::BadRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        out.push(parse_row(&record).map_err(|reason| TelemetryError::BadRow { line, reason })?);
    }
    Ok(out)
}

pub fn ingest_csv_path(path: &Path) -> Result<Vec<SensorReading>, TelemetryError> {
    ingest_csv(std::fs::File::open(path)?)
}
