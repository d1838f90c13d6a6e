use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Rounds to 9 significant digits; every number in a report goes through here.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Text rendering of [`sig9`], identical to its JSON rendering.
pub fn fmt9(x: f64) -> String {
    let v = sig9(x);
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite float serializes")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Cell {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Cell {
        Cell::Text(k.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt9(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(sig9(*x)),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Outcome of one invariant check.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `measured > floor`; the floor is reported as the tolerance.
    pub fn above(name: &str, measured: f64, floor: f64, detail: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            passed: measured > floor,
            measured,
            tolerance: floor,
            detail: detail.into(),
        }
    }

    /// Passes when `measured ≥ floor`.
    pub fn at_least(name: &str, measured: f64, floor: f64, detail: impl Into<String>) -> Check {
        Check {
            name: name.to_string(),
            passed: measured >= floor,
            measured,
            tolerance: floor,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub rng: Option<(String, u64)>,
    pub values: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Result<Report> {
        Ok(Report {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            rng: None,
            values: Vec::new(),
            tables: Vec::new(),
            checks: Vec::new(),
        })
    }

    pub fn value(&mut self, name: &str, v: impl Into<Cell>) {
        self.values.push((name.to_string(), v.into()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let values: serde_json::Map<String, Value> = self.values.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "columns": t.columns,
                    "rows": t.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "measured": Cell::Num(c.measured).json(),
                    "tolerance": Cell::Num(c.tolerance).json(),
                    "detail": c.detail,
                })
            })
            .collect();
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "rng": self.rng.as_ref().map(|(alg, seed)| json!({"algorithm": alg, "seed": seed})),
            "values": values,
            "tables": tables,
            "checks": checks,
            "passed": self.passed(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "dissent {} (version {})", self.command, env!("CARGO_PKG_VERSION"));
        if let Some((alg, seed)) = &self.rng {
            let _ = writeln!(s, "rng: {alg}, seed {seed}");
        }
        let _ = writeln!(s, "config: {}", self.config);
        if !self.values.is_empty() {
            s.push('\n');
            let width = self.values.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &self.values {
                let _ = writeln!(s, "{k:<width$}  {}", v.render());
            }
        }
        for t in &self.tables {
            let _ = writeln!(s, "\n[{}]", t.name);
            let cells: Vec<Vec<String>> = std::iter::once(t.columns.clone())
                .chain(t.rows.iter().map(|r| r.iter().map(Cell::render).collect()))
                .collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| cells.iter().map(|r| r[j].len()).max().unwrap_or(0))
                .collect();
            for row in &cells {
                let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                let _ = writeln!(s, "{}", line.join("  ").trim_end());
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "\n[checks]");
            for c in &self.checks {
                let _ = writeln!(
                    s,
                    "{} {}  measured={} tolerance={}  {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    fmt9(c.measured),
                    fmt9(c.tolerance),
                    c.detail
                );
            }
            let failed = self.checks.iter().filter(|c| !c.passed).count();
            let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), failed);
        }
        s
    }

    /// Writes `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let json = serde_json::to_string_pretty(&self.to_json())? + "\n";
        fs::write(dir.join("report.json"), json)?;
        fs::write(dir.join("report.txt"), self.to_text())?;
        Ok(())
    }
}
