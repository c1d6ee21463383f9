use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num::{BigInt, Zero};

use crate::algebra::{parse_rational, BoundaryFunction, GaussianRational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Command {
    Expand,
    Residues,
    EinsteinLog,
    Perturb,
    ModeScatter,
    NormalForm,
    CheckAll,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Expand,
        Command::Residues,
        Command::EinsteinLog,
        Command::Perturb,
        Command::ModeScatter,
        Command::NormalForm,
        Command::CheckAll,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand => "expand",
            Command::Residues => "residues",
            Command::EinsteinLog => "einstein-log",
            Command::Perturb => "perturb",
            Command::ModeScatter => "mode-scatter",
            Command::NormalForm => "normal-form",
            Command::CheckAll => "check-all",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command '{s}'")))
    }
}

/// Exact decimal or "p/q".
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((ip, fp)) = s.split_once('.') {
        let bad = || Error::Parse(format!("invalid number '{s}'"));
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let digits = format!("{}{fp}", ip.trim_start_matches(['-', '+']));
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = BigInt::from(10).pow(fp.len() as u32);
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    parse_rational(s)
}

#[derive(Clone, PartialEq, Debug)]
pub enum ZetaSpec {
    Symbolic,
    /// `steps` equally spaced exact points from `a` to `b` inclusive.
    Grid {
        a: Rational,
        b: Rational,
        steps: usize,
    },
}

impl ZetaSpec {
    pub fn points(&self) -> Vec<Rational> {
        match self {
            ZetaSpec::Symbolic => vec![],
            ZetaSpec::Grid { a, .. } if self.steps() == 1 => vec![a.clone()],
            ZetaSpec::Grid { a, b, steps } => {
                let h = (b - a) / Rational::from_integer(BigInt::from(*steps as i64 - 1));
                (0..*steps)
                    .map(|i| a + &h * Rational::from_integer(BigInt::from(i as i64)))
                    .collect()
            }
        }
    }

    fn steps(&self) -> usize {
        match self {
            ZetaSpec::Symbolic => 0,
            ZetaSpec::Grid { steps, .. } => *steps,
        }
    }
}

impl FromStr for ZetaSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "symbolic" {
            return Ok(ZetaSpec::Symbolic);
        }
        let parts: Vec<&str> = s.split(',').collect();
        let [a, b, steps] = parts.as_slice() else {
            return Err(Error::Parse(format!(
                "--zeta expects 'symbolic' or 'a,b,steps', got '{s}'"
            )));
        };
        let steps: usize = steps
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad step count '{steps}'")))?;
        if steps == 0 {
            return Err(Error::Parse("step count must be positive".into()));
        }
        Ok(ZetaSpec::Grid {
            a: parse_exact(a)?,
            b: parse_exact(b)?,
            steps,
        })
    }
}

/// Parses `"ξ=c;ξ=c;…"`, e.g. `"1,0=1/2;-1,0=1/2"`. A bare coefficient means
/// the zero frequency.
pub fn parse_source(s: &str, n: usize) -> Result<BoundaryFunction<GaussianRational>> {
    let mut terms = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (xi, c) = match part.rsplit_once('=') {
            Some((xi, c)) => {
                let xi: std::result::Result<Vec<i64>, _> = xi.split(',').map(|v| v.trim().parse::<i64>()).collect();
                (xi.map_err(|_| Error::Parse(format!("bad frequency in '{part}'")))?, c)
            }
            None => (vec![0; n], part),
        };
        if xi.len() != n {
            return Err(Error::Parse(format!(
                "frequency in '{part}' has {} components, expected {n}",
                xi.len()
            )));
        }
        terms.push((xi, c.trim().parse::<GaussianRational>()?));
    }
    if terms.is_empty() {
        return Err(Error::Parse("empty source".into()));
    }
    Ok(BoundaryFunction::from_terms(n, terms))
}

/// Fully validated invocation.
#[derive(Clone, PartialEq, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub metric: Option<PathBuf>,
    /// Raw source text; parsed once the dimension is known.
    pub source: Option<String>,
    pub zeta: ZetaSpec,
    pub truncation: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            metric: None,
            source: None,
            zeta: ZetaSpec::Symbolic,
            truncation: None,
            out: None,
            tol: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.command != Command::CheckAll && self.metric.is_none() {
            return Err(Error::Parse(format!("{} requires --metric", self.command)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Parse(format!("--tol must be positive, got {t}")));
            }
        }
        if let ZetaSpec::Grid { a, b, .. } = &self.zeta {
            if a > b {
                return Err(Error::Parse("--zeta grid needs a ≤ b".into()));
            }
            if self.command == Command::ModeScatter && a.is_zero() {
                return Err(Error::Parse("--zeta grid must avoid 0".into()));
            }
        }
        Ok(())
    }
}
