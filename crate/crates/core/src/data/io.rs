use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{DataError, SurvivalDataset, SurvivalRecord};

/// Which columns hold the covariates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureColumns {
    Named(Vec<String>),
    /// Every column other than the time and event columns, in file order.
    Rest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub time_col: String,
    pub event_col: String,
    pub features: FeatureColumns,
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            time_col: "time".into(),
            event_col: "event".into(),
            features: FeatureColumns::Rest,
        }
    }
}

const MISSING_TOKEN: &str = "NA";

fn is_missing(cell: &str) -> bool {
    let cell = cell.trim();
    cell.is_empty() || cell == MISSING_TOKEN
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize, DataError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| DataError::MissingColumn(name.to_string()))
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<SurvivalDataset, DataError> {
    read_csv(File::open(path)?, schema)
}

/// Parses a headed CSV. Row numbers in errors count data rows from 1.
pub fn read_csv<R: Read>(reader: R, schema: &Schema) -> Result<SurvivalDataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let time_idx = column_index(&headers, &schema.time_col)?;
    let event_idx = column_index(&headers, &schema.event_col)?;
    let feature_idx: Vec<usize> = match &schema.features {
        FeatureColumns::Named(names) => names
            .iter()
            .map(|n| column_index(&headers, n))
            .collect::<Result<_, _>>()?,
        FeatureColumns::Rest => (0..headers.len())
            .filter(|&i| i != time_idx && i != event_idx)
            .collect(),
    };
    if feature_idx.is_empty() {
        return Err(DataError::NoFeatures);
    }
    let feature_names: Vec<String> = feature_idx
        .iter()
        .map(|&i| headers[i].trim().to_string())
        .collect();

    let parse_f64 = |row: usize, col: usize, cell: &str| -> Result<f64, DataError> {
        let v: f64 = cell.trim().parse().map_err(|_| DataError::Parse {
            row,
            column: headers[col].to_string(),
            message: format!("'{cell}' is not a number"),
        })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DataError::Parse {
                row,
                column: headers[col].to_string(),
                message: format!("'{cell}' is not finite"),
            })
        }
    };

    let mut records = Vec::new();
    for (i, result) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = result?;
        let cell = |col: usize| rec.get(col).unwrap_or("");

        let time_cell = cell(time_idx);
        if is_missing(time_cell) {
            return Err(DataError::Parse {
                row,
                column: schema.time_col.clone(),
                message: "time must not be missing".into(),
            });
        }
        let time = parse_f64(row, time_idx, time_cell)?;
        if time <= 0.0 {
            return Err(DataError::NonPositiveTime { row, time });
        }

        let event = match cell(event_idx).trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(DataError::BadEvent {
                    row,
                    value: other.to_string(),
                })
            }
        };

        let covariates = feature_idx
            .iter()
            .map(|&col| {
                let c = cell(col);
                if is_missing(c) {
                    Ok(None)
                } else {
                    parse_f64(row, col, c).map(Some)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        records.push(SurvivalRecord::new(covariates, time, event));
    }
    SurvivalDataset::new(records, feature_names)
}

pub fn save_csv(path: impl AsRef<Path>, data: &SurvivalDataset) -> Result<(), DataError> {
    write_csv(File::create(path)?, data)
}

/// Writes `time,event,<features...>`; missing cells are left empty.
/// Numbers use the shortest representation that parses back exactly.
pub fn write_csv<W: Write>(writer: W, data: &SurvivalDataset) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["time".to_string(), "event".to_string()];
    header.extend(data.feature_names().iter().cloned());
    w.write_record(&header)?;
    for r in data.records() {
        let mut row = vec![
            r.time.to_string(),
            if r.event { "1" } else { "0" }.to_string(),
        ];
        row.extend(
            r.covariates
                .iter()
                .map(|c| c.map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
