use std::path::Path;

use qridge_core::linalg::{RealMatrix, RealVector};

use crate::error::CliError;

/// Training set read from CSV: features `X` (M × N) and responses `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: RealMatrix,
    pub y: RealVector,
    pub feature_names: Vec<String>,
    pub y_norm: f64,
    /// Per-feature `(mean, scale)` when standardized; applied to queries too.
    pub standardization: Option<Vec<(f64, f64)>>,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn features(&self) -> usize {
        self.x.cols()
    }

    /// Centres each feature and divides by its standard deviation. Constant
    /// columns are centred only.
    pub fn standardized(&self) -> Result<Self, CliError> {
        let (m, n) = (self.rows(), self.features());
        let mut params = Vec::with_capacity(n);
        for c in 0..n {
            let col = self.x.column(c);
            let mean = col.iter().sum::<f64>() / m as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
            let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
            params.push((mean, scale));
        }
        let data = (0..m)
            .flat_map(|r| {
                let params = &params;
                self.x.row(r).iter().zip(params).map(|(v, (mu, s))| (v - mu) / s)
            })
            .collect();
        Ok(Self {
            x: RealMatrix::new(m, n, data)?,
            standardization: Some(params),
            ..self.clone()
        })
    }

    /// A query in the same feature space as `x`.
    pub fn query(&self, values: &[f64]) -> Result<RealVector, CliError> {
        if values.len() != self.features() {
            return Err(CliError::Usage(format!(
                "x_new has {} entries, dataset has {} features",
                values.len(),
                self.features()
            )));
        }
        let mapped = match &self.standardization {
            Some(params) => values
                .iter()
                .zip(params)
                .map(|(v, (mu, s))| (v - mu) / s)
                .collect(),
            None => values.to_vec(),
        };
        Ok(RealVector::new(mapped)?)
    }
}

/// Reads a header row, feature columns and a final `y` column.
pub fn load_csv(path: &Path) -> Result<Dataset, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_error(path, 1, None, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(parse_error(path, 1, None, "empty file".into()));
    }
    if header.last().map(String::as_str) != Some("y") {
        return Err(parse_error(path, 1, None, "last column must be named `y`".into()));
    }
    if header.len() < 2 {
        return Err(parse_error(path, 1, None, "no feature columns".into()));
    }
    let n = header.len() - 1;

    let mut features = Vec::new();
    let mut responses = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, None, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    parse_error(path, line, Some(&header[c]), format!("`{cell}` is not a finite number"))
                })?;
            if c < n {
                features.push(value);
            } else {
                responses.push(value);
            }
        }
    }
    if responses.is_empty() {
        return Err(parse_error(path, 2, None, "no data rows".into()));
    }
    let y = RealVector::new(responses)?;
    Ok(Dataset {
        x: RealMatrix::new(y.len(), n, features)?,
        y_norm: y.norm(),
        y,
        feature_names: header[..n].to_vec(),
        standardization: None,
    })
}

fn parse_error(path: &Path, line: usize, column: Option<&str>, message: String) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line,
        column: column.map(str::to_string),
        message,
    }
}
