//! CSV output. Floats are written with `{:.16e}` so files round-trip exactly.

use std::path::Path;

use crate::error::Result;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header row and numeric rows.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|x| fmt_f64(*x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Like [`write_table`] with a leading text column.
pub fn write_labeled(path: &Path, header: &[&str], rows: impl IntoIterator<Item = (String, Vec<f64>)>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for (label, row) in rows {
        let mut rec = vec![label];
        rec.extend(row.iter().map(|x| fmt_f64(*x)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Read back a table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().unwrap_or(f64::NAN))
            .collect();
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let xs = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23];
        write_table(&p, &["x", "y"], xs.iter().map(|&x| vec![x, x * 2.0])).unwrap();
        let (h, rows) = read_table(&p).unwrap();
        assert_eq!(h, ["x", "y"]);
        for (row, &x) in rows.iter().zip(&xs) {
            assert_eq!(row[0], x);
            assert_eq!(row[1], x * 2.0);
        }
    }
}
