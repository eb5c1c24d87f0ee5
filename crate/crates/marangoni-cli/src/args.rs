use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_grid, BoxSpec, RunConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "marangoni", version, about = "Linear stability and transition analysis of Marangoni convection in a box")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML file with box, bi, pr, lambda_offset, quad_order, l_max, output_dir
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Box as L1xL2, or hex:L2 for L1 = 2 L2/sqrt(3)
    #[arg(long = "box", global = true, value_name = "L1xL2")]
    pub box_spec: Option<BoxSpec>,
    /// Biot number(s): comma list or logspace:lo:hi:n
    #[arg(long, global = true)]
    pub bi: Option<String>,
    /// Prandtl number(s): comma list or logspace:lo:hi:n
    #[arg(long, global = true)]
    pub pr: Option<String>,
    /// lambda - lambda_c for supercritical states
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda_offset: Option<f64>,
    /// Gauss-Legendre points for vertical integrals
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Branches per wave in the stable sums
    #[arg(long, global = true)]
    pub lmax: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Common {
    /// Config file (or defaults) with flags applied, validated.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(b) = &self.box_spec {
            c.box_spec = b.clone();
        }
        if let Some(s) = &self.bi {
            c.bi = parse_grid(s).map_err(CliError::Config)?;
        }
        if let Some(s) = &self.pr {
            c.pr = parse_grid(s).map_err(CliError::Config)?;
        }
        if let Some(v) = self.lambda_offset {
            c.lambda_offset = v;
        }
        if let Some(v) = self.quad_order {
            c.quad_order = v;
        }
        if let Some(v) = self.lmax {
            c.l_max = v;
        }
        if let Some(v) = &self.out {
            c.output_dir = v.clone();
        }
        c.validate()?;
        Ok(c)
    }

    /// True when Pr came from neither a flag nor a config file.
    pub fn pr_defaulted(&self) -> bool {
        self.pr.is_none() && self.config.is_none()
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "command")]
pub enum Command {
    /// Marginal curve lambda(alpha) per Biot number
    Curve {
        /// alpha range as min:max:count, min > 0
        #[arg(long, default_value = "0.5:6:200")]
        alpha: String,
        /// Also write curve.svg
        #[arg(long)]
        svg: bool,
    },
    /// Critical Marangoni number and critical set of the box
    Critical,
    /// Critical modes and stable branches with sampled profiles
    Modes {
        /// Real branches per critical wave
        #[arg(long, default_value_t = 3)]
        branches: usize,
        /// Sample heights per profile
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Center-manifold coefficients and projection table
    Coeffs,
    /// Transition type from the reduced equations
    Classify,
    /// Trajectory and phase portrait of the reduced equations
    Simulate {
        /// Initial amplitudes yI,yJ (default: a small point near the origin)
        #[arg(long, allow_negative_numbers = true)]
        y0: Option<String>,
        /// Integration time (default 20/|beta|)
        #[arg(long)]
        duration: Option<f64>,
        /// Output stride (default 0.05/|beta|)
        #[arg(long)]
        dt: Option<f64>,
        /// Basin seeds per axis
        #[arg(long, default_value_t = 40)]
        grid: usize,
    },
    /// Velocity and temperature of a mode combination on a grid
    Pattern {
        /// Mode as ix,iy:amplitude; repeat for combinations
        #[arg(long = "mode", allow_negative_numbers = true)]
        modes: Vec<String>,
        /// Grid points nx,ny,nz
        #[arg(long, default_value = "24,16,9")]
        grid: String,
    },
    /// Classification coefficients over the Pr x Bi grid
    Sweep {
        /// Also write sweep.svg
        #[arg(long)]
        svg: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Curve { .. } => "curve",
            Command::Critical => "critical",
            Command::Modes { .. } => "modes",
            Command::Coeffs => "coeffs",
            Command::Classify => "classify",
            Command::Simulate { .. } => "simulate",
            Command::Pattern { .. } => "pattern",
            Command::Sweep { .. } => "sweep",
        }
    }
}
