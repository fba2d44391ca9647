//! Columnar sweep tables and their CSV form.
//!
//! CSV layout: `# key=value` metadata lines, one header line of column
//! names, then one line per row. Numbers carry 17 significant digits so a
//! reader recovers every `f64` exactly. Lines end with `\n`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column {
            name: name.to_string(),
            unit: unit.to_string(),
        }
    }
}

/// A parameter sweep: the first column is the grid and must increase strictly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    pub scenario: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub params: BTreeMap<String, f64>,
}

impl SweepTable {
    pub fn new(scenario: &str, columns: Vec<Column>) -> Self {
        SweepTable {
            scenario: scenario.to_string(),
            columns,
            rows: Vec::new(),
            params: BTreeMap::new(),
        }
    }

    pub fn set_param(&mut self, key: &str, value: f64) {
        self.params.insert(key.to_string(), value);
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidTable(format!(
                "row has {} entries, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        if let Some(last) = self.rows.last() {
            if !(row[0] > last[0]) {
                return Err(Error::InvalidTable(format!(
                    "grid column not strictly increasing: {} after {}",
                    row[0], last[0]
                )));
            }
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Row whose grid value is within `tol` of `x`.
    pub fn row_at(&self, x: f64, tol: f64) -> Option<&[f64]> {
        self.rows
            .iter()
            .find(|r| (r[0] - x).abs() <= tol)
            .map(|r| r.as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# scenario={}\n", self.scenario));
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}={}\n", format_number(*v)));
        }
        let units: Vec<&str> = self.columns.iter().map(|c| c.unit.as_str()).collect();
        out.push_str(&format!("# units={}\n", units.join(",")));
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`SweepTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut scenario = String::new();
        let mut params = BTreeMap::new();
        let mut units: Vec<String> = Vec::new();
        let mut table: Option<SweepTable> = None;
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidTable(format!("bad metadata line: {line}")))?;
                match k {
                    "scenario" => scenario = v.to_string(),
                    "units" => units = v.split(',').map(str::to_string).collect(),
                    _ => {
                        params.insert(k.to_string(), parse_number(v)?);
                    }
                }
            } else if let Some(t) = table.as_mut() {
                let row = line
                    .split(',')
                    .map(parse_number)
                    .collect::<Result<Vec<_>>>()?;
                t.push_row(row)?;
            } else {
                let columns = line
                    .split(',')
                    .enumerate()
                    .map(|(i, name)| {
                        Column::new(name, units.get(i).map(String::as_str).unwrap_or(""))
                    })
                    .collect();
                let mut t = SweepTable::new(&scenario, columns);
                t.params = std::mem::take(&mut params);
                table = Some(t);
            }
        }
        table.ok_or_else(|| Error::InvalidTable("missing header".into()))
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidTable(format!("not a number: {s:?}")))
}

/// Parses `start:stop:step`, or several such ranges separated by commas.
///
/// Points are `start + i·step` up to and including `stop` (within a relative
/// slack of 1e-9 steps).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        let nums = fields
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| Error::InvalidGrid(format!("not a number in {part:?}")))?;
        match nums.as_slice() {
            [x] => out.push(*x),
            [start, stop, step] => {
                if !(*step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err(Error::InvalidGrid(format!("bad range {part:?}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| start + i as f64 * step));
            }
            _ => {
                return Err(Error::InvalidGrid(format!(
                    "expected start:stop:step, got {part:?}"
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if out.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(out)
}
