//! Named time series of scalar functionals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Unit annotation written into the CSV header, e.g. `M` or `1`.
    pub unit: String,
    pub values: Vec<f64>,
}

/// Column-oriented table; every column has the same length.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ledger {
    pub name: String,
    pub columns: Vec<Column>,
    pub metadata: BTreeMap<String, String>,
}

impl Ledger {
    pub fn new(name: impl Into<String>) -> Self {
        Ledger { name: name.into(), ..Default::default() }
    }

    /// Declares an empty column; rows are then added with [`Ledger::push_row`].
    pub fn with_column(mut self, name: &str, unit: &str) -> Self {
        self.columns.push(Column { name: name.into(), unit: unit.into(), values: Vec::new() });
        self
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match ledger {}", self.name);
        for (c, &v) in self.columns.iter_mut().zip(row) {
            c.values.push(v);
        }
    }

    /// Adds or replaces a whole column. Panics on a length mismatch.
    pub fn set_column(&mut self, name: &str, unit: &str, values: Vec<f64>) {
        if !self.columns.is_empty() {
            assert_eq!(values.len(), self.len(), "column {name} has the wrong length");
        }
        match self.columns.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                c.unit = unit.into();
                c.values = values;
            }
            None => self.columns.push(Column { name: name.into(), unit: unit.into(), values }),
        }
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    /// Largest `|v - v[0]| / scale` over a column.
    pub fn drift(&self, name: &str, scale: f64) -> Option<f64> {
        let v = self.column(name)?;
        let first = *v.first()?;
        Some(v.iter().fold(0.0_f64, |m, x| m.max((x - first).abs())) / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns() {
        let mut l = Ledger::new("x").with_column("t", "M").with_column("e", "1");
        l.push_row(&[0.0, 2.0]);
        l.push_row(&[1.0, 2.5]);
        assert_eq!(l.len(), 2);
        assert_eq!(l.column("e"), Some(&[2.0, 2.5][..]));
        assert_eq!(l.drift("e", 2.0), Some(0.25));
        l.set_column("e", "1", vec![1.0, 1.0]);
        assert_eq!(l.columns.len(), 2);
    }

    #[test]
    #[should_panic]
    fn ragged_row_panics() {
        let mut l = Ledger::new("x").with_column("t", "M");
        l.push_row(&[0.0, 1.0]);
    }
}
