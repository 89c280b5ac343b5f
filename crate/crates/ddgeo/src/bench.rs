//! Partial versus naive matching on the same figures: identical closures
//! are required, then timings are compared.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ddgeo_core::engine::{Budget, Engine, EngineConfig, MatchMode, NoClock, RuleSet};
use ddgeo_core::figure::Figure;
use ddgeo_core::numeric::Tolerances;

use crate::inputs::{CliError, FigureSource, Inputs};
use crate::pool::Pool;

/// Rounds per run in the bundled benchmark.
pub const DEFAULT_ROUNDS: u32 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub points: usize,
    pub facts: usize,
    pub partial_micros: u64,
    pub naive_micros: u64,
    pub equal: bool,
}

impl BenchRow {
    pub fn speedup(&self) -> f64 {
        self.naive_micros.max(1) as f64 / self.partial_micros.max(1) as f64
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    /// None when any closure differs or there are no rows.
    pub fn geomean(&self) -> Option<f64> {
        if self.rows.is_empty() || self.rows.iter().any(|r| !r.equal) {
            return None;
        }
        let s: f64 = self.rows.iter().map(|r| r.speedup().ln()).sum();
        Some((s / self.rows.len() as f64).exp())
    }

    pub fn mismatches(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.equal)
            .map(|r| r.name.as_str())
            .collect()
    }

    /// Aligned text table with a geomean line and a hardware line.
    pub fn table(&self) -> String {
        let w = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(0)
            .max(6);
        let mut s = format!(
            "{:<w$} {:>6} {:>7} {:>11} {:>11} {:>8} {:>5}\n",
            "figure", "points", "facts", "partial_ms", "naive_ms", "speedup", "equal"
        );
        for r in &self.rows {
            let speedup = if r.equal {
                format!("{:.1}x", r.speedup())
            } else {
                "-".to_string()
            };
            let _ = writeln!(
                s,
                "{:<w$} {:>6} {:>7} {:>11.1} {:>11.1} {:>8} {:>5}",
                r.name,
                r.points,
                r.facts,
                r.partial_micros as f64 / 1e3,
                r.naive_micros as f64 / 1e3,
                speedup,
                r.equal
            );
        }
        match self.geomean() {
            Some(g) => {
                let _ = writeln!(s, "geomean speedup {g:.2}x");
            }
            None => s.push_str("geomean speedup none\n"),
        }
        let _ = writeln!(s, "hardware {}", hardware());
        s
    }

    /// Tab-separated rows for plotting; speedup is empty on a mismatch.
    pub fn structured(&self) -> String {
        let mut s = String::from("figure\tpoints\tfacts\tpartial_us\tnaive_us\tspeedup\tequal\n");
        for r in &self.rows {
            let speedup = if r.equal {
                format!("{:.3}", r.speedup())
            } else {
                String::new()
            };
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{speedup}\t{}",
                r.name, r.points, r.facts, r.partial_micros, r.naive_micros, r.equal
            );
        }
        s
    }
}

/// Architecture, operating system and core count of this machine.
pub fn hardware() -> String {
    let cpus = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    format!(
        "arch={} os={} cpus={cpus}",
        std::env::consts::ARCH,
        std::env::consts::OS
    )
}

fn run(
    fig: &Figure,
    rules: &RuleSet,
    tol: Tolerances,
    rounds: u32,
    mode: MatchMode,
) -> (Vec<ddgeo_core::engine::Key>, u64) {
    let cfg = EngineConfig {
        mode,
        tol,
        budget: Budget {
            max_rounds: rounds,
            ..Budget::default()
        },
    };
    let mut e = Engine::new(fig, rules, cfg).expect("figure fits the engine");
    let t = Instant::now();
    e.saturate(&NoClock);
    let us = t.elapsed().as_micros() as u64;
    (e.canonical_facts(), us)
}

/// Saturates `fig` for `rounds` rounds in both modes.
pub fn bench_figure(
    name: &str,
    fig: &Figure,
    rules: &RuleSet,
    tol: Tolerances,
    rounds: u32,
) -> BenchRow {
    let (p, partial_micros) = run(fig, rules, tol, rounds, MatchMode::Partial);
    let (n, naive_micros) = run(fig, rules, tol, rounds, MatchMode::Naive);
    BenchRow {
        name: name.to_string(),
        points: fig.len(),
        facts: p.len(),
        partial_micros,
        naive_micros,
        equal: p == n,
    }
}

/// Figure files in a directory, sorted by name.
pub fn load_suite(
    dir: &Path,
    inputs: &Inputs,
    seed: u64,
) -> Result<Vec<(String, Figure)>, CliError> {
    let rd = std::fs::read_dir(dir)
        .map_err(|e| CliError::new("io", format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let src = FigureSource::load(&p, &inputs.catalog)?;
        let name = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        out.push((name, src.build(inputs, seed)?));
    }
    if out.is_empty() {
        return Err(CliError::new(
            "io",
            format!("{}: no figures", dir.display()),
        ));
    }
    Ok(out)
}

/// Runs figures one after another, or on `pool` when given. Each row
/// times its own runs either way.
pub fn bench_suite(
    figs: &[(String, Figure)],
    inputs: &Inputs,
    rounds: u32,
    pool: Option<&Pool>,
) -> BenchReport {
    let one = |(n, f): &(String, Figure)| bench_figure(n, f, &inputs.rules, inputs.tol, rounds);
    let rows = match pool {
        Some(p) => p.map(figs.iter().collect(), one),
        None => figs.iter().map(one).collect(),
    };
    BenchReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_figure_agrees() {
        let inputs = Inputs::default_inputs();
        let src = FigureSource::parse(
            "a b c = triangle a b c\nm = midpoint m a b\nn = midpoint n a c",
            &inputs.catalog,
            "t",
        )
        .unwrap();
        let fig = src.build(&inputs, 1).unwrap();
        let row = bench_figure("t", &fig, &inputs.rules, inputs.tol, 3);
        assert!(row.equal);
        assert!(row.facts > 0);
        let rep = BenchReport { rows: vec![row] };
        assert!(rep.geomean().is_some());
        assert!(rep.table().contains("\ngeomean speedup "));
        assert_eq!(rep.structured().lines().count(), 2);
    }

    #[test]
    fn mismatch_has_no_geomean() {
        let r = BenchRow {
            name: "x".into(),
            points: 3,
            facts: 1,
            partial_micros: 1,
            naive_micros: 9,
            equal: false,
        };
        let rep = BenchReport { rows: vec![r] };
        assert_eq!(rep.geomean(), None);
        assert_eq!(rep.mismatches(), ["x"]);
        assert!(rep.table().contains("geomean speedup none"));
        assert!(rep.structured().contains("\t\tfalse"));
    }

    #[test]
    fn trivial_figure_is_equal() {
        let inputs = Inputs::default_inputs();
        let src = FigureSource::parse("a b c = triangle a b c", &inputs.catalog, "t").unwrap();
        let fig = src.build(&inputs, 0).unwrap();
        let rep = bench_suite(&[("tri".into(), fig)], &inputs, 4, Some(&Pool::new(2)));
        assert!(rep.rows[0].equal);
        assert_eq!(rep.rows[0].points, 3);
    }
}
