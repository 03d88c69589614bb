use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stats::median;

/// `n x p` matrix of finite observations, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    columns: Vec<Vec<f64>>,
    names: Option<Vec<String>>,
}

impl DataMatrix {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidInput("data matrix needs at least one column".into()));
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("data matrix needs at least one row".into()));
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::InvalidInput(format!(
                    "column {j} has {} rows, expected {n}",
                    c.len()
                )));
            }
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite value at row {i}, column {j}")));
            }
        }
        Ok(Self { columns, names: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidInput(format!("row {i} has the wrong length")));
        }
        let columns = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(columns)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.p() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} columns",
                names.len(),
                self.p()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vec<f64>> {
        self.columns
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Column name, or `X{j+1}` when the matrix is unnamed.
    pub fn name(&self, j: usize) -> String {
        match &self.names {
            Some(names) => names[j].clone(),
            None => format!("X{}", j + 1),
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col][row]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    /// Copy with every column shifted by its median.
    pub fn median_centered(&self) -> Self {
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let m = median(c);
                c.iter().map(|v| v - m).collect()
            })
            .collect();
        Self {
            columns,
            names: self.names.clone(),
        }
    }

    /// Copy with the given `(column, value)` cells of `row` overwritten.
    pub fn inject_outlier(&self, row: usize, values: &[(usize, f64)]) -> Result<Self> {
        if row >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: row,
                len: self.n(),
            });
        }
        let mut out = self.clone();
        for &(col, value) in values {
            if col >= self.p() {
                return Err(Error::IndexOutOfRange {
                    index: col,
                    len: self.p(),
                });
            }
            if !value.is_finite() {
                return Err(Error::InvalidInput("outlier value must be finite".into()));
            }
            out.columns[col][row] = value;
        }
        Ok(out)
    }

    /// Reads CSV. The first record is a header when none of its fields parse
    /// as numbers.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut names = None;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                row: line + 1,
                column: 0,
                message: e.to_string(),
            })?;
            if line == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) {
                names = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
                continue;
            }
            let mut row = Vec::with_capacity(record.len());
            for (col, field) in record.iter().enumerate() {
                let value = field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::Parse {
                        row: line + 1,
                        column: col + 1,
                        message: format!("'{field}' is not a finite number"),
                    }
                })?;
                row.push(value);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        row: line + 1,
                        column: row.len().min(first.len()) + 1,
                        message: format!("expected {} fields, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                row: 1,
                column: 0,
                message: "no data rows".into(),
            });
        }
        let data = Self::from_rows(&rows)?;
        match names {
            Some(names) if names.len() == data.p() => data.with_names(names),
            Some(names) => Err(Error::Parse {
                row: 1,
                column: 0,
                message: format!("header has {} fields, data has {}", names.len(), data.p()),
            }),
            None => Ok(data),
        }
    }

    pub fn read_csv_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    /// Writes CSV with shortest round-trip float formatting; includes a header
    /// iff the matrix has names.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if let Some(names) = &self.names {
            w.write_record(names)?;
        }
        for i in 0..self.n() {
            w.write_record(self.columns.iter().map(|c| format!("{:?}", c[i])))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outlier_touches_only_its_row() {
        let d = DataMatrix::from_columns(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let o = d.inject_outlier(0, &[(0, 1024.0), (1, -1024.0)]).unwrap();
        assert_eq!(o.row(0), vec![1024.0, -1024.0]);
        assert_eq!(o.row(1), d.row(1));
        assert_eq!(o.row(2), d.row(2));
        let back = o.inject_outlier(0, &[(0, 1.0), (1, 4.0)]).unwrap();
        assert_eq!(back, d);
        assert!(matches!(d.inject_outlier(3, &[]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(d.inject_outlier(0, &[(2, 0.0)]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn csv_header_detection_and_errors() {
        let d = DataMatrix::read_csv("a,b\n1,2\n3,4.5\n".as_bytes()).unwrap();
        assert_eq!(d.names().unwrap(), ["a", "b"]);
        assert_eq!(d.column(1), [2.0, 4.5]);
        let d = DataMatrix::read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert!(d.names().is_none());
        assert_eq!(d.n(), 2);

        match DataMatrix::read_csv("a,b\n1,2\n3,oops\n".as_bytes()) {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 2)),
            other => panic!("{other:?}"),
        }
        match DataMatrix::read_csv("1,2\n3\n".as_bytes()) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        assert!(DataMatrix::read_csv("1,nan\n".as_bytes()).is_err());
        assert!(DataMatrix::read_csv("".as_bytes()).is_err());
    }

    #[test]
    fn median_centering() {
        let d = DataMatrix::from_columns(vec![vec![1.0, 5.0, 2.0, 10.0]]).unwrap();
        assert_eq!(d.median_centered().column(0), [-2.5, 1.5, -1.5, 6.5]);
    }
}
