//! Effective run configuration: TOML file values overridden by flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use marangoni::transition::logspace;
use marangoni::BoxGeometry;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `L1xL2`, or `hex:L2` for the hexagonal box L1 = 2 L2/√3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BoxSpec {
    Rect { l1: f64, l2: f64 },
    Hex { l2: f64 },
}

impl BoxSpec {
    pub fn geometry(&self) -> Result<BoxGeometry, CliError> {
        let g = match *self {
            BoxSpec::Rect { l1, l2 } => BoxGeometry::new(l1, l2),
            BoxSpec::Hex { l2 } => BoxGeometry::hexagonal(l2),
        };
        g.map_err(|e| CliError::Config(e.to_string()))
    }
}

impl FromStr for BoxSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad box length '{t}'"))
        };
        if let Some(rest) = s.strip_prefix("hex:") {
            return Ok(BoxSpec::Hex { l2: num(rest)? });
        }
        let (a, b) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("box must look like L1xL2 or hex:L2, got '{s}'"))?;
        Ok(BoxSpec::Rect {
            l1: num(a)?,
            l2: num(b)?,
        })
    }
}

impl std::fmt::Display for BoxSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoxSpec::Rect { l1, l2 } => write!(f, "{l1}x{l2}"),
            BoxSpec::Hex { l2 } => write!(f, "hex:{l2}"),
        }
    }
}

impl TryFrom<String> for BoxSpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<BoxSpec> for String {
    fn from(b: BoxSpec) -> String {
        b.to_string()
    }
}

/// Comma list of numbers, or `logspace:lo:hi:n` (decades).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    if let Some(rest) = s.strip_prefix("logspace:") {
        let p: Vec<&str> = rest.split(':').collect();
        if p.len() != 3 {
            return Err(format!("logspace needs lo:hi:n, got '{rest}'"));
        }
        let lo: f64 = p[0].parse().map_err(|_| format!("bad exponent '{}'", p[0]))?;
        let hi: f64 = p[1].parse().map_err(|_| format!("bad exponent '{}'", p[1]))?;
        let n: usize = p[2].parse().map_err(|_| format!("bad count '{}'", p[2]))?;
        if n == 0 {
            return Err("logspace count must be positive".into());
        }
        return Ok(logspace(lo, hi, n));
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number '{t}'")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    /// Biot numbers; commands other than `curve` and `sweep` use the first.
    pub bi: Vec<f64>,
    /// Prandtl numbers; commands other than `sweep` use the first.
    pub pr: Vec<f64>,
    /// λ − λ_c used where a supercritical state is needed.
    pub lambda_offset: f64,
    pub quad_order: usize,
    pub l_max: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            box_spec: BoxSpec::Rect { l1: 1.5, l2: 1.0 },
            bi: vec![0.0],
            pr: vec![1.0],
            lambda_offset: 0.5,
            quad_order: 64,
            l_max: 10,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field against the solver preconditions.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.box_spec.geometry()?;
        if self.bi.is_empty() || self.pr.is_empty() {
            return bad("bi and pr need at least one value".into());
        }
        if let Some(b) = self.bi.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return bad(format!("Bi must be finite and nonnegative, got {b}"));
        }
        if let Some(p) = self.pr.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return bad(format!("Pr must be finite and positive, got {p}"));
        }
        if !self.lambda_offset.is_finite() {
            return bad("lambda offset must be finite".into());
        }
        if !(2..=4096).contains(&self.quad_order) {
            return bad(format!("quadrature order must be in 2..=4096, got {}", self.quad_order));
        }
        if !(1..=200).contains(&self.l_max) {
            return bad(format!("l_max must be in 1..=200, got {}", self.l_max));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<BoxGeometry, CliError> {
        self.box_spec.geometry()
    }

    pub fn bi0(&self) -> f64 {
        self.bi[0]
    }

    pub fn pr0(&self) -> f64 {
        self.pr[0]
    }
}
