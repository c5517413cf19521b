//! Ingestion of FAF-style region-to-region freight flow tables.
//!
//! Records are informational (scenario presets); the router never reads them.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FAF_HEADER: [&str; 6] = ["origin_region", "destination_region", "commodity", "tons", "mode", "year"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandRecord {
    pub origin_region: String,
    pub destination_region: String,
    pub commodity: String,
    pub tons: f64,
    pub mode: String,
    pub year: i32,
}

/// `row` is the 1-based line number, header included, so the first data
/// row is row 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("faf parse error at row {row}, column {column}: {reason}")]
pub struct FafError {
    pub row: u64,
    pub column: String,
    pub reason: String,
}

pub fn ingest_faf_flows(document: &str) -> Result<Vec<DemandRecord>, FafError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(document.as_bytes());

    let header = reader.headers().map_err(|e| FafError {
        row: 1,
        column: "<header>".into(),
        reason: e.to_string(),
    })?;
    let names: Vec<&str> = header.iter().collect();
    if names != FAF_HEADER {
        return Err(FafError {
            row: 1,
            column: "<header>".into(),
            reason: format!("expected header {:?}, found {:?}", FAF_HEADER.join(","), names.join(",")),
        });
    }

    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i as u64 + 2;
        let rec = rec.map_err(|e| FafError { row, column: "<row>".into(), reason: e.to_string() })?;
        let err = |column: &str, reason: String| FafError { row, column: column.to_string(), reason };

        let text = |idx: usize| -> Result<String, FafError> {
            let value = rec.get(idx).unwrap_or_default();
            if value.trim().is_empty() {
                Err(err(FAF_HEADER[idx], "empty field".into()))
            } else {
                Ok(value.to_string())
            }
        };

        let tons_raw = text(3)?;
        let tons: f64 = tons_raw
            .trim()
            .parse()
            .map_err(|_| err("tons", format!("not a number: {tons_raw:?}")))?;
        if !tons.is_finite() || tons < 0.0 {
            return Err(err("tons", format!("must be a finite non-negative number, got {tons_raw:?}")));
        }
        let year_raw = text(5)?;
        let year: i32 = year_raw
            .trim()
            .parse()
            .map_err(|_| err("year", format!("not an integer: {year_raw:?}")))?;

        out.push(DemandRecord {
            origin_region: text(0)?,
            destination_region: text(1)?,
            commodity: text(2)?,
            tons,
            mode: text(4)?,
            year,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "origin_region,destination_region,commodity,tons,mode,year\n";

    #[test]
    fn header_only() {
        assert!(ingest_faf_flows(HEADER).unwrap().is_empty());
    }

    #[test]
    fn three_rows_preserved() {
        let doc = format!(
            "{HEADER}Seattle WA,Orlando FL,Electronics,1234.5,Truck,2022\n\
             Seattle WA,Orlando FL,Machinery,0.125,Rail,2022\n\
             Tacoma WA,Jacksonville FL,Grain,98765.4321,Multiple modes,2023\n"
        );
        let recs = ingest_faf_flows(&doc).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].tons, 1234.5);
        assert_eq!(recs[1].tons, 0.125);
        assert_eq!(recs[2].tons, 98765.4321);
        assert_eq!(recs[2].mode, "Multiple modes");
        assert_eq!(recs[2].year, 2023);
    }

    #[test]
    fn bad_tons_reports_row_and_column() {
        let doc = format!("{HEADER}Seattle WA,Orlando FL,Electronics,abc,Truck,2022\n");
        let e = ingest_faf_flows(&doc).unwrap_err();
        assert_eq!((e.row, e.column.as_str()), (2, "tons"));
    }

    #[test]
    fn negative_tons_rejected() {
        let doc = format!("{HEADER}a,b,c,1,Rail,2020\na,b,c,-3,Rail,2020\n");
        let e = ingest_faf_flows(&doc).unwrap_err();
        assert_eq!((e.row, e.column.as_str()), (3, "tons"));
    }

    #[test]
    fn wrong_header() {
        let e = ingest_faf_flows("origin,destination,tons\n").unwrap_err();
        assert_eq!(e.row, 1);
    }

    #[test]
    fn empty_text_field_rejected() {
        let doc = format!("{HEADER}a,,c,1,Rail,2020\n");
        let e = ingest_faf_flows(&doc).unwrap_err();
        assert_eq!(e.column, "destination_region");
    }

    #[test]
    fn bad_year() {
        let doc = format!("{HEADER}a,b,c,1,Rail,20x0\n");
        assert_eq!(ingest_faf_flows(&doc).unwrap_err().column, "year");
    }
}
