//! Column tables, CSV with 17 significant digits, and plot-data text files.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    /// Equation tag for bound columns, e.g. "Eq.76".
    pub tag: Option<String>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    /// Config echo, artifact version, bound inputs.
    pub metadata: serde_json::Map<String, serde_json::Value>,
}

/// Shortest exact-enough form: 17 significant digits, `.` decimal.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn parse_value(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::Table(format!("not a number: `{s}`")))
}

impl ResultTable {
    pub fn new(names: &[(&str, Option<&str>)]) -> Self {
        let columns = names
            .iter()
            .map(|(n, t)| Column { name: n.to_string(), tag: t.map(str::to_string), values: Vec::new() })
            .collect();
        Self { columns, metadata: Default::default() }
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (c, v) in self.columns.iter_mut().zip(row) {
            c.values.push(*v);
        }
    }

    pub fn column(&self, name: &str) -> Result<&Column, CliError> {
        self.columns.iter().find(|c| c.name == name).ok_or_else(|| CliError::UnknownColumn(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn tags(&self) -> serde_json::Value {
        self.columns
            .iter()
            .filter_map(|c| c.tag.as_ref().map(|t| (c.name.clone(), serde_json::Value::String(t.clone()))))
            .collect::<serde_json::Map<_, _>>()
            .into()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.names())?;
        for i in 0..self.n_rows() {
            out.write_record(self.columns.iter().map(|c| format_value(c.values[i])))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, CliError> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut table = ResultTable {
            columns: headers.into_iter().map(|name| Column { name, tag: None, values: Vec::new() }).collect(),
            metadata: Default::default(),
        };
        for rec in rdr.records() {
            let rec = rec?;
            let row = rec.iter().map(parse_value).collect::<Result<Vec<_>, _>>()?;
            if row.len() != table.columns.len() {
                return Err(CliError::Table("ragged row".into()));
            }
            table.push_row(&row);
        }
        Ok(table)
    }

    pub fn metadata_json(&self) -> serde_json::Value {
        let mut meta = self.metadata.clone();
        meta.insert("columns".into(), serde_json::to_value(self.names()).expect("strings"));
        meta.insert("equation_tags".into(), self.tags());
        meta.into()
    }
}

/// Whitespace-separated columns under a `# x y1 y2 …` header.
pub fn emit_plotdata<W: Write>(table: &ResultTable, x: &str, ys: &[&str], mut w: W) -> Result<(), CliError> {
    let mut cols = vec![table.column(x)?];
    for y in ys {
        cols.push(table.column(y)?);
    }
    let header: Vec<&str> = cols.iter().map(|c| c.name.as_str()).collect();
    writeln!(w, "# {}", header.join(" "))?;
    for i in 0..table.n_rows() {
        let line: Vec<String> = cols.iter().map(|c| format_value(c.values[i])).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads a file written by [`emit_plotdata`].
pub fn parse_plotdata(text: &str) -> Result<ResultTable, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| CliError::Table("missing `#` header".into()))?;
    let names: Vec<&str> = header.split_whitespace().collect();
    let mut table = ResultTable::new(&names.iter().map(|n| (*n, None)).collect::<Vec<_>>());
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row = line.split_whitespace().map(parse_value).collect::<Result<Vec<_>, _>>()?;
        if row.len() != names.len() {
            return Err(CliError::Table("ragged row".into()));
        }
        table.push_row(&row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(&[("t", None), ("trace_distance", None), ("eq10_bound", Some("Eq.10"))]);
        t.push_row(&[0.0, 1.0 / 3.0, std::f64::consts::PI]);
        t.push_row(&[0.5, 1e-300, 2.0f64.sqrt()]);
        t
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::E, 0.1 + 0.2] {
            assert_eq!(parse_value(&format_value(v)).unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(format_value(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_round_trip() {
        let t = sample();
        let back = ResultTable::read_csv(t.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back.names(), t.names());
        assert_eq!(back.columns[2].values, t.columns[2].values);
    }

    #[test]
    fn plotdata_format() {
        let t = sample();
        let mut buf = Vec::new();
        emit_plotdata(&t, "t", &["trace_distance", "eq10_bound"], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "# t trace_distance eq10_bound");
        let back = parse_plotdata(&text).unwrap();
        for (a, b) in back.columns.iter().zip(&t.columns) {
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
            }
        }
        assert!(matches!(emit_plotdata(&t, "t", &["nope"], Vec::new()), Err(CliError::UnknownColumn(_))));
    }

    #[test]
    fn single_row_single_line() {
        let mut t = ResultTable::new(&[("x", None), ("y", None)]);
        t.push_row(&[1.0, 2.0]);
        let mut buf = Vec::new();
        emit_plotdata(&t, "x", &["y"], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
    }
}
