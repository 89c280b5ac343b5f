//! Loading catalogs, rule sets, problems and scripts, with error kinds
//! suitable for a machine-readable error line.

use std::fmt;
use std::path::Path;

use ddgeo_core::builder::{build_figure, build_problem_figure, DEFAULT_MAX_RETRIES};
use ddgeo_core::catalog::Catalog;
use ddgeo_core::engine::RuleSet;
use ddgeo_core::figure::Figure;
use ddgeo_core::lang::{
    parse_construction_script, parse_problem, Construction, ParseError, Problem,
};
use ddgeo_core::numeric::Tolerances;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// An error with a short kind tag, such as `parse`, `io` or `build`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn parse(what: &str, e: &ParseError) -> Self {
        CliError::new("parse", format!("{what}: offset {}: {}", e.offset, e.kind))
    }

    /// `error kind=<kind> message=<text>` on one line.
    pub fn line(&self) -> String {
        let msg: String = self
            .message
            .chars()
            .map(|c| if c.is_control() { ' ' } else { c })
            .collect();
        format!("error kind={} message={msg}", self.kind)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

/// Catalog, rules and tolerances shared by every command.
#[derive(Clone, Debug)]
pub struct Inputs {
    pub catalog: Catalog,
    pub rules: RuleSet,
    pub tol: Tolerances,
}

impl Inputs {
    pub fn load(
        defs: Option<&Path>,
        rules: Option<&Path>,
        eps: Option<f64>,
    ) -> Result<Inputs, CliError> {
        let catalog = match defs {
            Some(p) => Catalog::parse(&read(p)?)
                .map_err(|e| CliError::parse(&p.display().to_string(), &e))?,
            None => Catalog::default_catalog(),
        };
        let rules = match rules {
            Some(p) => RuleSet::parse(&read(p)?)
                .map_err(|e| CliError::parse(&p.display().to_string(), &e))?,
            None => RuleSet::default_rules(),
        };
        let mut tol = Tolerances::default();
        if let Some(e) = eps {
            tol.eps_eq = e;
        }
        if !tol.is_valid() {
            return Err(CliError::new(
                "config",
                format!(
                    "tolerance {} outside ({}, {})",
                    tol.eps_eq, tol.eps_ang, tol.eps_deg
                ),
            ));
        }
        Ok(Inputs {
            catalog,
            rules,
            tol,
        })
    }

    pub fn default_inputs() -> Inputs {
        Inputs {
            catalog: Catalog::default_catalog(),
            rules: RuleSet::default_rules(),
            tol: Tolerances::default(),
        }
    }
}

/// A figure description: a problem (has a `?` goal) or a construction script.
#[derive(Clone, Debug)]
pub enum FigureSource {
    Problem(Problem),
    Script(Vec<Construction>),
}

impl FigureSource {
    pub fn parse(text: &str, catalog: &Catalog, what: &str) -> Result<FigureSource, CliError> {
        if text.contains('?') {
            parse_problem(text)
                .map(FigureSource::Problem)
                .map_err(|e| CliError::parse(what, &e))
        } else {
            parse_construction_script(text, catalog)
                .map(FigureSource::Script)
                .map_err(|e| CliError::parse(what, &e))
        }
    }

    pub fn load(path: &Path, catalog: &Catalog) -> Result<FigureSource, CliError> {
        FigureSource::parse(&read(path)?, catalog, &path.display().to_string())
    }

    pub fn build(&self, inputs: &Inputs, seed: u64) -> Result<Figure, CliError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = match self {
            FigureSource::Problem(p) => build_problem_figure(
                p,
                &inputs.catalog,
                &inputs.tol,
                &mut rng,
                DEFAULT_MAX_RETRIES,
            ),
            FigureSource::Script(s) => build_figure(
                s,
                &inputs.catalog,
                &inputs.tol,
                &mut rng,
                DEFAULT_MAX_RETRIES,
            ),
        };
        r.map_err(|e| CliError::new("build", e.to_string()))
    }
}

pub fn load_problem(path: &Path) -> Result<Problem, CliError> {
    parse_problem(&read(path)?).map_err(|e| CliError::parse(&path.display().to_string(), &e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_line_is_one_line() {
        let e = CliError::new("parse", "bad\ninput\there");
        assert_eq!(e.line(), "error kind=parse message=bad input here");
    }

    #[test]
    fn invalid_tolerance() {
        assert_eq!(
            Inputs::load(None, None, Some(1.0)).unwrap_err().kind,
            "config"
        );
        assert!(Inputs::load(None, None, Some(1e-5)).is_ok());
    }

    #[test]
    fn sources_by_shape() {
        let cat = Catalog::default_catalog();
        assert!(matches!(
            FigureSource::parse("a b c = triangle a b c", &cat, "x").unwrap(),
            FigureSource::Script(_)
        ));
        assert!(matches!(
            FigureSource::parse("a b c : ? coll a b a", &cat, "x").unwrap(),
            FigureSource::Problem(_)
        ));
        assert_eq!(
            FigureSource::parse("a b c = nope a", &cat, "x")
                .unwrap_err()
                .kind,
            "parse"
        );
    }
}
