//! Files written by the commands. Floats use `{:e}` (shortest round-trip)
//! so identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mixbem::geometry::Point3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Collects the files a run writes below its output directory.
pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::config(format!("cannot create output dir {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn note(&mut self, name: impl Into<String>) {
        self.written.push(name.into());
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn text(&mut self, name: &str, body: &str) -> CliResult<()> {
        std::fs::write(self.dir.join(name), body)?;
        self.note(name);
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::config(e.to_string()))?;
        s.push('\n');
        self.text(name, &s)
    }

    /// `x,y,z,re,im` per point.
    pub fn point_values(&mut self, name: &str, points: &[Point3], values: &[Complex64]) -> CliResult<()> {
        let mut s = String::from("x,y,z,re,im\n");
        for (p, v) in points.iter().zip(values) {
            writeln!(s, "{:e},{:e},{:e},{:e},{:e}", p.x, p.y, p.z, v.re, v.im).unwrap();
        }
        self.text(name, &s)
    }

    /// `index,re,im` per coefficient.
    pub fn coefficients(&mut self, name: &str, dofs: &[usize], values: &[Complex64]) -> CliResult<()> {
        let mut s = String::from("index,re,im\n");
        for (i, v) in dofs.iter().zip(values) {
            writeln!(s, "{i},{:e},{:e}", v.re, v.im).unwrap();
        }
        self.text(name, &s)
    }

    /// A table with a header line and numeric or text cells.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<Cell>]) -> CliResult<()> {
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.text(name, &s)
    }
}

pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }
}

/// Wall-clock seconds per phase, in order.
#[derive(Default)]
pub struct Timings {
    phases: Vec<(String, f64)>,
    verbose: bool,
}

impl Timings {
    pub fn new(verbose: bool) -> Self {
        Self {
            phases: Vec::new(),
            verbose,
        }
    }

    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        if self.verbose {
            eprintln!("mixbem: {phase} ...");
        }
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        if self.verbose {
            eprintln!("mixbem: {phase} done in {secs:.3} s");
        }
        self.phases.push((phase.to_string(), secs));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> =
            self.phases.iter().map(|(k, v)| (k.clone(), (*v).into())).collect();
        map.into()
    }
}

pub fn complex_pair(v: Complex64) -> [f64; 2] {
    [v.re, v.im]
}
