//! Plain CSV tables with `#` metadata lines.

use std::io::Write;

use crate::error::Result;

/// Seventeen significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Writes `# key: value` lines, then the header row and the data.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &[(String, String)]) -> Result<()> {
        for (key, value) in meta {
            writeln!(out, "# {key}: {value}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, meta: &[(String, String)]) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, meta)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_doubles() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn header_then_rows() {
        let mut table = Table::new(&["n", "e"]);
        table.push(vec!["1".into(), fmt_f64(0.25)]);
        let text = table.to_csv_string(&[("seed".into(), "7".into())]).unwrap();
        assert_eq!(text, "# seed: 7\nn,e\n1,2.5000000000000000e-1\n");
    }
}
