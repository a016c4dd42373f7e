//! Tabular reports and their CSV / JSON renderings.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// CSV text: 17 significant digits for floats.
    pub fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf".into() } else { "-inf".into() },
            Cell::Num(x) => format!("{:.16e}", x + 0.0),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.into())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Num(x) if x.is_finite() => s.serialize_f64(*x + 0.0),
            Cell::Num(_) => s.serialize_str(&self.csv()),
            Cell::Int(i) => s.serialize_u64(*i),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Text(t) => s.serialize_str(t),
        }
    }
}

/// Rows of named columns. The schema is fixed per experiment kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the schema");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

struct Row<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// Run metadata; appears in JSON output and the summary, never in CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub kind: &'static str,
    pub seed: u64,
    pub version: &'static str,
    pub config_sha256: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub table: Table,
    /// `key=value` lines for standard output.
    pub summary: Vec<(String, String)>,
    pub metadata: Metadata,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            metadata: &'a Metadata,
            summary: serde_json::Map<String, serde_json::Value>,
            columns: &'a [&'static str],
            rows: Vec<Row<'a>>,
        }
        let summary = self.summary.iter().map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone()))).collect();
        let doc = Doc {
            metadata: &self.metadata,
            summary,
            columns: &self.table.columns,
            rows: self.table.rows.iter().map(|r| Row(&self.table.columns, r)).collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.summary {
            out.push_str(&format!("{k}={v}\n"));
        }
        let m = &self.metadata;
        out.push_str(&format!(
            "kind={}\nseed={}\nversion={}\nconfig_sha256={}\nwall_time_s={:.3}\n",
            m.kind, m.seed, m.version, m.config_sha256, m.wall_time_s
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format_is_stable() {
        let mut t = Table::new(&["a", "b", "c", "d"]);
        t.push(vec![0.1.into(), 3u64.into(), true.into(), f64::INFINITY.into()]);
        t.push(vec![(-2.5e-300).into(), 0u64.into(), false.into(), "x,y".into()]);
        assert_eq!(
            t.to_csv(),
            "a,b,c,d\n1.0000000000000001e-1,3,true,inf\n-2.5000000000000000e-300,0,false,\"x,y\"\n"
        );
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(&["x", "flag"]);
        t.push(vec![f64::NAN.into(), true.into()]);
        let r = ExperimentReport {
            table: t,
            summary: vec![("mu_err".into(), "0.250000".into())],
            metadata: Metadata { kind: "nfl", seed: 1, version: "0", config_sha256: "ab".into(), wall_time_s: 0.0 },
        };
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0]["x"], "nan");
        assert_eq!(v["rows"][0]["flag"], true);
        assert_eq!(v["summary"]["mu_err"], "0.250000");
        assert!(r.summary_text().starts_with("mu_err=0.250000\n"));
    }
}
