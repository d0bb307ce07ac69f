use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::PhaseField;

/// Decimal text with 17 significant digits, enough to round-trip an `f64`.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// `field_<name>_<time>.csv`, time with six decimals.
pub fn field_file_name(name: &str, t: f64) -> String {
    format!("field_{name}_{t:.6}.csv")
}

/// Dense dump: header `q,p,value`, one row per grid point, q-major.
pub fn emit_field_csv(w: &PhaseField, path: &Path) -> Result<()> {
    let g = w.grid;
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(["q", "p", "value"])?;
    for i in 0..g.n_q {
        let q = format_number(g.q(i));
        for (j, v) in w.row(i).iter().enumerate() {
            out.write_record([q.as_str(), &format_number(g.p(j)), &format_number(*v)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a dump written by [`emit_field_csv`] as `(q, p, value)` rows.
pub fn read_field_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["q", "p", "value"] {
        return Err(Error::Io(format!(
            "{}: unexpected header {:?}",
            path.display(),
            header
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parse = |k: usize| -> Result<f64> {
            record
                .get(k)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Io(format!("{}: bad row {:?}", path.display(), record)))
        };
        rows.push((parse(0)?, parse(1)?, parse(2)?));
    }
    Ok(rows)
}

/// A rectangular table with a header row, written as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row of a label, an index and numbers.
    pub fn push(&mut self, label: &str, index: usize, values: &[f64]) {
        let mut row = vec![label.to_string(), index.to_string()];
        row.extend(values.iter().map(|v| format_number(*v)));
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = csv::Writer::from_path(path)?;
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn zero_field_dump() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(4, 0.5, 4, 0.5).unwrap();
        let path = dir.path().join(field_file_name("zero", 0.0));
        emit_field_csv(&PhaseField::zeros(g), &path).unwrap();
        let rows = read_field_csv(&path).unwrap();
        assert_eq!(rows.len(), 16);
        assert!(rows.iter().all(|r| r.2 == 0.0));
        assert_eq!((rows[0].0, rows[1].0, rows[1].1), (g.q(0), g.q(0), g.p(1)));
        assert!(path.ends_with("field_zero_0.000000.csv"));
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 6.02e23, 1e-300, 0.0] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }
}
