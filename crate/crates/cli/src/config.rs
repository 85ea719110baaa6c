use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vortexfield_core::geom::OVAL_COEFFICIENT;
use vortexfield_core::{
    ConformalDomain, EnergyModel, ExternalField, GridSpec, NelderMeadOptions, PicardOptions, VortexConfig,
};

#[derive(Debug, Parser)]
#[command(
    name = "vortexfield",
    version,
    about = "Boundary vortices in thin ferromagnetic films"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the renormalized energy over the vortex angles.
    Minimize,
    /// Tabulate the energy on an n × n grid of vortex angles.
    Landscape,
    /// Sample the magnetization field for given or minimizing vortex angles.
    Field,
    /// Run the numerical cross-checks.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainArg {
    Disk,
    Oval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckGroup {
    Quadrature,
    Punctured,
    Pde,
    Picard,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 4] = [
        CheckGroup::Quadrature,
        CheckGroup::Punctured,
        CheckGroup::Pde,
        CheckGroup::Picard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Quadrature => "quadrature",
            CheckGroup::Punctured => "punctured",
            CheckGroup::Pde => "pde",
            CheckGroup::Picard => "picard",
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 2];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("'{p}': {e}"))?;
        if !slot.is_finite() {
            return Err(format!("'{p}' is not finite"));
        }
    }
    Ok(out)
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.parse().map_err(|e| format!("'{a}': {e}"))?,
            b.parse().map_err(|e| format!("'{b}': {e}"))?,
        ]),
        _ => Err(format!("expected nr,nt, got '{s}'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    #[arg(long, global = true, value_enum, default_value = "disk")]
    pub domain: DomainArg,
    /// Coefficient of Φ(z) = z/(1 - c z²); oval only.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// External field h1,h2.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,0")]
    pub h: [f64; 2],
    /// Bound on |h| accepted by the fixed-point solver.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub h_max: f64,
    /// Vortex angles s1,s2 in radians.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    pub s: Option<[f64; 2]>,
    /// Starting angles for the simplex search.
    #[arg(long, global = true, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0.5,2.5")]
    pub s0: [f64; 2],
    /// Polar grid nr,nt for the disk solves.
    #[arg(long, global = true, value_parser = parse_grid, default_value = "128,256")]
    pub grid: [usize; 2],
    #[arg(long, global = true, default_value_t = 64)]
    pub landscape_n: usize,
    /// Fixed-point tolerance (max-norm change between iterates).
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 500)]
    pub max_evals: usize,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub svg: bool,
    /// Locate the vortices by minimization before sampling the field.
    #[arg(long, global = true)]
    pub auto_min: bool,
    /// Restrict `verify` to one check group (repeatable).
    #[arg(long, global = true, value_enum)]
    pub only: Vec<CheckGroup>,
    /// Seed for the field-sample jitter.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random displacement of field samples, as a fraction of the ring spacing.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, global = true, default_value_t = 12)]
    pub rings: usize,
    #[arg(long, global = true, default_value_t = 48)]
    pub spokes: usize,
}

/// Fully resolved and validated settings; echoed into every summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub domain: DomainArg,
    pub c: f64,
    pub h: [f64; 2],
    pub h_max: f64,
    pub s: Option<[f64; 2]>,
    pub s0: [f64; 2],
    pub grid: [usize; 2],
    pub landscape_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub max_evals: usize,
    pub simplex_size: f64,
    pub out: PathBuf,
    pub svg: bool,
    pub auto_min: bool,
    pub only: Vec<CheckGroup>,
    pub seed: u64,
    pub jitter: f64,
    pub rings: usize,
    pub spokes: usize,
}

impl RunConfig {
    pub fn resolve(o: &Options) -> Result<Self> {
        let c = match (o.domain, o.c) {
            (DomainArg::Disk, Some(c)) if c != 0.0 => bail!("--c only applies to --domain oval"),
            (DomainArg::Disk, _) => 0.0,
            (DomainArg::Oval, c) => c.unwrap_or(OVAL_COEFFICIENT),
        };
        let mut only = o.only.clone();
        only.sort();
        only.dedup();
        let config = Self {
            domain: o.domain,
            c,
            h: o.h,
            h_max: o.h_max,
            s: o.s,
            s0: o.s0,
            grid: o.grid,
            landscape_n: o.landscape_n,
            tol: o.tol,
            max_iter: o.max_iter,
            max_evals: o.max_evals,
            simplex_size: NelderMeadOptions::default().simplex_size,
            out: o.out.clone(),
            svg: o.svg,
            auto_min: o.auto_min,
            only,
            seed: o.seed,
            jitter: o.jitter,
            rings: o.rings,
            spokes: o.spokes,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        self.domain()?;
        self.field()?;
        self.grid_spec()?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("--tol must be positive, got {}", self.tol);
        }
        if self.max_iter == 0 {
            bail!("--max-iter must be at least 1");
        }
        self.simplex_options().validate()?;
        if self.landscape_n < 16 {
            bail!("--landscape-n must be at least 16, got {}", self.landscape_n);
        }
        if !(0.0..=0.5).contains(&self.jitter) {
            bail!("--jitter must lie in [0, 0.5], got {}", self.jitter);
        }
        if self.rings == 0 || self.spokes < 3 {
            bail!("need --rings >= 1 and --spokes >= 3");
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<ConformalDomain> {
        Ok(match self.domain {
            DomainArg::Disk => ConformalDomain::disk(),
            DomainArg::Oval => ConformalDomain::conformal(self.c)?,
        })
    }

    pub fn field(&self) -> Result<ExternalField> {
        if self.h_max.is_nan() || self.h_max <= 0.0 {
            bail!("--h-max must be positive, got {}", self.h_max);
        }
        Ok(ExternalField::with_bound(self.h[0], self.h[1], self.h_max)?)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.grid[0], self.grid[1])?)
    }

    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    pub fn simplex_options(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            simplex_size: self.simplex_size,
            max_evals: self.max_evals,
            ..Default::default()
        }
    }

    pub fn model(&self) -> Result<EnergyModel> {
        Ok(EnergyModel::new(self.domain()?, self.field()?, self.grid_spec()?)?.with_picard(self.picard()))
    }

    /// Angles from `--s`, rejecting coincident vortices.
    pub fn given_pair(&self) -> Result<Option<VortexConfig>> {
        let Some(s) = self.s else { return Ok(None) };
        let config = VortexConfig::pair(s[0], s[1]).context("invalid --s")?;
        if config.is_degenerate() {
            bail!("--s {},{} places both vortices at the same point", s[0], s[1]);
        }
        Ok(Some(config))
    }

    pub fn groups(&self) -> Vec<CheckGroup> {
        if self.only.is_empty() {
            CheckGroup::ALL.to_vec()
        } else {
            self.only.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(args)?;
        RunConfig::resolve(&cli.options)
    }

    #[test]
    fn negative_components_parse() {
        let c = parse(&["vortexfield", "minimize", "--h", "-0.01,0"]).unwrap();
        assert_eq!(c.h, [-0.01, 0.0]);
        let c = parse(&["vortexfield", "field", "--domain", "oval", "--h", "0,1", "--auto-min"]).unwrap();
        assert_eq!(c.c, 0.2);
        assert!(c.auto_min);
    }

    #[test]
    fn rejects_invalid_settings() {
        for args in [
            vec!["vortexfield", "minimize", "--grid", "3,8"],
            vec!["vortexfield", "minimize", "--h", "2,0"],
            vec!["vortexfield", "minimize", "--domain", "oval", "--c", "0.6"],
            vec!["vortexfield", "minimize", "--c", "0.2"],
            vec!["vortexfield", "minimize", "--tol", "0"],
            vec!["vortexfield", "landscape", "--landscape-n", "8"],
            vec!["vortexfield", "minimize", "--max-evals", "2"],
            vec!["vortexfield", "minimize", "--h", "nan,0"],
        ] {
            assert!(parse(&args).is_err(), "{args:?}");
        }
    }

    #[test]
    fn coincident_angles_are_rejected() {
        let c = parse(&["vortexfield", "field", "--s", "1,1"]).unwrap();
        assert!(c.given_pair().is_err());
        let c = parse(&["vortexfield", "field", "--s", "0,6.283185307179586"]).unwrap();
        assert!(c.given_pair().is_err());
    }
}
