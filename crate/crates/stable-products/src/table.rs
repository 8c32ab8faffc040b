//! Density tables over x-grids with CSV and JSON output.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::DensityEval;

/// Version of the JSON layout written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Evenly spaced grid of `points` values from `xmin` to `xmax`.
pub fn grid(xmin: f64, xmax: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::InvalidParameter(
            "--points must be at least 1".into(),
        ));
    }
    if !xmin.is_finite() || !xmax.is_finite() {
        return Err(Error::InvalidParameter("grid bounds must be finite".into()));
    }
    if points == 1 {
        if xmin != xmax {
            return Err(Error::InvalidParameter(
                "a single grid point needs xmin = xmax".into(),
            ));
        }
        return Ok(vec![xmin]);
    }
    if xmax <= xmin {
        return Err(Error::InvalidParameter(format!(
            "grid needs xmin < xmax, got [{xmin}, {xmax}]"
        )));
    }
    let step = (xmax - xmin) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i + 1 == points {
                xmax
            } else {
                xmin + step * i as f64
            }
        })
        .collect())
}

/// One row: a density value, or the reason the point is not supported.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRow {
    pub x: f64,
    pub result: std::result::Result<DensityEval, String>,
    /// Extra numeric columns, aligned with [`DensityTable::extra_columns`].
    pub extra: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    rows: Vec<DensityRow>,
    extra_columns: Vec<String>,
    summary: Vec<(String, f64)>,
}

impl DensityTable {
    /// Evaluates `f` at every grid point in parallel. Errors for which
    /// `unsupported` returns true become marked rows; others abort.
    pub fn tabulate<F, U>(xs: &[f64], f: F, unsupported: U) -> Result<Self>
    where
        F: Fn(f64) -> Result<DensityEval> + Sync,
        U: Fn(&Error) -> bool + Sync,
    {
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "x grid must be strictly increasing".into(),
            ));
        }
        let rows = xs
            .par_iter()
            .map(|&x| match f(x) {
                Ok(e) => Ok(DensityRow {
                    x,
                    result: Ok(DensityEval {
                        error_estimate: e.error_estimate.abs(),
                        ..e
                    }),
                    extra: Vec::new(),
                }),
                Err(e) if unsupported(&e) => Ok(DensityRow {
                    x,
                    result: Err(e.to_string()),
                    extra: Vec::new(),
                }),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            rows,
            extra_columns: Vec::new(),
            summary: Vec::new(),
        })
    }

    /// Adds a column computed in parallel from each row's x; rows marked
    /// unsupported get an empty cell.
    pub fn add_column<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let cells = self
            .rows
            .par_iter()
            .map(|r| match r.result {
                Ok(_) => f(r.x).map(Some),
                Err(_) => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        for (row, cell) in self.rows.iter_mut().zip(cells) {
            row.extra.push(cell);
        }
        self.extra_columns.push(name.to_string());
        Ok(())
    }

    pub fn add_summary(&mut self, name: &str, value: f64) {
        self.summary.push((name.to_string(), value));
    }

    pub fn rows(&self) -> &[DensityRow] {
        &self.rows
    }

    pub fn extra_columns(&self) -> &[String] {
        &self.extra_columns
    }

    pub fn summary(&self) -> &[(String, f64)] {
        &self.summary
    }

    /// Column `x,value,method,error_estimate[,extra…]`; unsupported rows carry
    /// `unsupported` in the method column and empty numeric cells. Summary
    /// values follow as `# name=value` lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["x", "value", "method", "error_estimate"];
        header.extend(self.extra_columns.iter().map(String::as_str));
        w.write_record(&header).map_err(io_error)?;
        for row in &self.rows {
            let mut rec = vec![row.x.to_string()];
            match &row.result {
                Ok(e) => {
                    rec.push(e.value.to_string());
                    rec.push(e.method.as_str().to_string());
                    rec.push(e.error_estimate.to_string());
                }
                Err(_) => rec.extend([String::new(), "unsupported".into(), String::new()]),
            }
            rec.extend(
                row.extra
                    .iter()
                    .map(|c| c.map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&rec).map_err(io_error)?;
        }
        let mut out = w.into_inner().map_err(|e| io_error(e.into_error()))?;
        for (name, value) in &self.summary {
            writeln!(out, "# {name}={value}").map_err(io_error)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                m.insert("x".into(), json!(row.x));
                match &row.result {
                    Ok(e) => {
                        m.insert("value".into(), json!(e.value));
                        m.insert("method".into(), json!(e.method));
                        m.insert("error_estimate".into(), json!(e.error_estimate));
                    }
                    Err(msg) => {
                        m.insert("value".into(), Value::Null);
                        m.insert("method".into(), json!("unsupported"));
                        m.insert("error_estimate".into(), Value::Null);
                        m.insert("reason".into(), json!(msg));
                    }
                }
                for (name, cell) in self.extra_columns.iter().zip(&row.extra) {
                    m.insert(name.clone(), json!(cell));
                }
                Value::Object(m)
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        json!({ "schema": SCHEMA_VERSION, "rows": rows, "summary": summary })
    }
}

fn io_error<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(e.to_string())
}

/// Largest pairwise gap between the value column and the extra columns.
pub fn max_discrepancy(table: &DensityTable) -> f64 {
    table
        .rows
        .iter()
        .filter_map(|r| {
            let v = r.result.as_ref().ok()?.value;
            let cells = std::iter::once(v).chain(r.extra.iter().flatten().copied());
            let (lo, hi) = cells.fold((v, v), |(lo, hi), c| (lo.min(c), hi.max(c)));
            Some(hi - lo)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Method;

    fn eval(v: f64) -> DensityEval {
        DensityEval {
            value: v,
            method: Method::Series,
            error_estimate: 1e-16,
        }
    }

    #[test]
    fn grid_shapes() {
        assert_eq!(grid(0.0, 0.0, 1).unwrap(), vec![0.0]);
        assert_eq!(grid(-1.0, 1.0, 3).unwrap(), vec![-1.0, 0.0, 1.0]);
        assert!(grid(1.0, 0.0, 3).is_err());
        assert!(grid(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let xs = grid(-1.0, 1.0, 3).unwrap();
        let mut t = DensityTable::tabulate(
            &xs,
            |x| {
                if x == 0.0 {
                    Err(Error::Origin)
                } else {
                    Ok(eval(x * x))
                }
            },
            |e| matches!(e, Error::Origin),
        )
        .unwrap();
        t.add_column("twice", |x| Ok(2.0 * x * x)).unwrap();
        t.add_summary("max_discrepancy", max_discrepancy(&t));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,value,method,error_estimate,twice");
        assert_eq!(lines[1], "-1,1,series,0.0000000000000001,2");
        assert_eq!(lines[2], "0,,unsupported,,");
        assert_eq!(lines[4], "# max_discrepancy=1");
        let j = t.to_json();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["rows"][1]["method"], "unsupported");
    }

    #[test]
    fn numeric_failures_abort() {
        let r = DensityTable::tabulate(&[1.0], |_| Err(Error::Accuracy("x".into())), |_| false);
        assert!(r.is_err());
        assert!(DensityTable::tabulate(&[1.0, 1.0], |x| Ok(eval(x)), |_| false).is_err());
    }
}
