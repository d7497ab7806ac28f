//! Reading single series from delimited text and conditioning them.

use std::fs;
use std::path::Path;

use esscorr::TimeSeries;

use crate::error::{HarnessError, Result};

/// Which column of a multi-column file holds the series.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Column {
    #[default]
    First,
    Index(usize),
    /// Requires a header row.
    Name(String),
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    /// Digits select by zero-based index, anything else by header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_owned()),
        })
    }
}

fn fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Reads one numeric column from a comma- or whitespace-delimited file.
///
/// A first row that does not parse as numbers is taken as a header. Blank
/// lines are skipped; row numbers in errors are 1-based file lines.
pub fn read_series_csv(path: &Path, column: &Column) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let parse_err = |row, message: String| HarnessError::Parse { path: path.into(), row, message };

    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();

    let mut index = match column {
        Column::First => Some(0),
        Column::Index(i) => Some(*i),
        Column::Name(_) => None,
    };
    if let Some(&(row, first)) = lines.peek() {
        let cells = fields(first);
        let is_header = cells.iter().any(|c| c.parse::<f64>().is_err());
        if is_header {
            if let Column::Name(name) = column {
                let pos = cells.iter().position(|c| c.trim_matches('"') == name);
                index =
                    Some(pos.ok_or_else(|| parse_err(row, format!("no column named {name:?}")))?);
            }
            lines.next();
        }
    }
    let Some(index) = index else {
        let Column::Name(name) = column else { unreachable!() };
        return Err(HarnessError::Config(format!(
            "column {name:?} requested but {} has no header",
            path.display()
        )));
    };

    let mut values = Vec::new();
    for (row, line) in lines {
        let cells = fields(line);
        let cell =
            cells.get(index).ok_or_else(|| parse_err(row, format!("missing column {index}")))?;
        let v: f64 = cell.parse().map_err(|_| parse_err(row, format!("not a number: {cell:?}")))?;
        if !v.is_finite() {
            return Err(parse_err(row, format!("non-finite value {cell:?}")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(HarnessError::Empty(path.into()));
    }
    Ok(TimeSeries::new(values)?)
}

/// Writes one value per line under a `value` header.
pub fn write_series_csv(ts: &TimeSeries, path: &Path) -> Result<()> {
    fs::write(path, series_csv_string(ts)).map_err(|e| HarnessError::io(path, e))
}

pub fn series_csv_string(ts: &TimeSeries) -> String {
    let mut out = String::with_capacity(24 * (ts.len() + 1));
    out.push_str("value\n");
    for v in ts.values() {
        out.push_str(&crate::table::format_float(*v));
        out.push('\n');
    }
    out
}

/// Removes the least-squares line through `(i, x_i)`.
pub fn detrend_linear(ts: &TimeSeries) -> Result<TimeSeries> {
    let n = ts.len();
    if n < 2 {
        return Err(esscorr::Error::Degenerate("linear detrend needs 2 samples".into()).into());
    }
    let t_mean = (n - 1) as f64 / 2.0;
    let y_mean = ts.mean();
    let (mut sty, mut stt) = (0.0, 0.0);
    for (i, y) in ts.values().iter().enumerate() {
        let t = i as f64 - t_mean;
        sty += t * (y - y_mean);
        stt += t * t;
    }
    let slope = sty / stt;
    let values = ts
        .values()
        .iter()
        .enumerate()
        .map(|(i, y)| y - y_mean - slope * (i as f64 - t_mean))
        .collect();
    let out = TimeSeries::new(values)?.with_dt(ts.dt())?;
    Ok(match ts.label() {
        Some(l) => out.with_label(l),
        None => out,
    })
}
