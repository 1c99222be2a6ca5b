//! Numeric tables and their CSV form: header row, 17 significant digits,
//! LF line endings.

use crate::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Csv(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(|e| Error::Csv(e.to_string()))?;
        }
        w.into_inner().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self, Error> {
        let mut r = csv::Reader::from_reader(bytes);
        let columns = r.headers().map_err(|e| Error::Csv(e.to_string()))?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Csv(e.to_string()))?;
            let row = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| Error::Csv(format!("bad number `{f}`: {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut t = Table::new(&["x", "y"]);
        t.push(vec![0.1, -1.0 / 3.0]);
        t.push(vec![1e-300, f64::MAX]);
        t.push(vec![0.0, 2f64.sqrt()]);
        let bytes = t.to_csv().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("x,y\n") && !text.contains('\r'));
        assert_eq!(Table::from_csv(&bytes).unwrap(), t);
    }
}
