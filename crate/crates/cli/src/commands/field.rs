use std::f64::consts::TAU;
use std::fmt::Write;

use anyhow::{bail, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use vortexfield_core::micromag::sample_magnetization;
use vortexfield_core::{ConformalDomain, SampleSpec, VectorFieldSample, VortexConfig};

use super::minimize::{energy_json, search};
use super::{boundary_positions, positions_json, Outcome};
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_number, num, nums, write_file, write_json};
use crate::svg;

/// The polar lattice of `SampleSpec::PolarLattice`, with optional seeded jitter.
fn sample_spec(config: &RunConfig, domain: &ConformalDomain) -> SampleSpec {
    let lattice = SampleSpec::PolarLattice {
        rings: config.rings,
        spokes: config.spokes,
    };
    if config.jitter == 0.0 {
        return lattice;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dr = 1.0 / config.rings as f64;
    let dt = TAU / config.spokes as f64;
    let mut points = vec![Complex64::new(0.0, 0.0)];
    for j in 1..=config.rings {
        let on_boundary = j == config.rings;
        for k in 0..config.spokes {
            let mut r = j as f64 * dr;
            if on_boundary {
                r = 1.0 - 1e-9;
            } else {
                r += config.jitter * dr * rng.gen_range(-1.0..1.0);
            }
            let t = k as f64 * dt + config.jitter * dt * rng.gen_range(-1.0..1.0);
            points.push(domain.map(Complex64::from_polar(r.clamp(0.0, 1.0 - 1e-9), t)));
        }
    }
    SampleSpec::Points(points)
}

pub fn to_csv(samples: &[VectorFieldSample]) -> String {
    let mut out = String::from("x,y,mx,my\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_number(s.x),
            fmt_number(s.y),
            fmt_number(s.mx),
            fmt_number(s.my)
        );
    }
    out
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let given = config.given_pair()?;
    if given.is_some() && config.auto_min {
        bail!("--s and --auto-min are mutually exclusive");
    }
    ensure_dir(&config.out)?;
    let model = config.model()?;
    let (pair, search_result) = match given {
        Some(pair) => (pair, None),
        None if config.auto_min => {
            let r = search(config, &model)?;
            if !r.converged {
                eprintln!("warning: minimization stopped at the evaluation budget; using the best vertex");
            }
            (VortexConfig::pair(r.s_min[0], r.s_min[1])?, Some(r))
        }
        None => bail!("field needs vortex angles: pass --s s1,s2 or --auto-min"),
    };

    let spec = sample_spec(config, model.domain());
    let field = sample_magnetization(&model, &pair, &spec)?;
    let positions = boundary_positions(model.domain(), &pair);
    let energy = model.evaluate(&pair)?;

    let path = write_file(&config.out, "field.csv", to_csv(&field.samples).as_bytes())?;
    println!(
        "wrote {} ({} samples, {} skipped)",
        path.display(),
        field.samples.len(),
        field.skipped
    );
    let meta = json!({
        "command": "field",
        "config": serde_json::to_value(config)?,
        "s": nums(pair.angles()),
        "positions": positions_json(&positions),
        "samples": field.samples.len(),
        "skipped": field.skipped,
        "picard": {
            "iterations": field.report.iterations,
            "converged": field.report.converged,
            "residual": num(field.report.residual),
        },
        "energy": energy_json(&energy),
        "minimization": search_result.as_ref().map(|r| json!({
            "converged": r.converged,
            "evaluations": r.state.evaluations,
        })),
    });
    let path = write_json(&config.out, "field.json", &meta)?;
    println!("wrote {}", path.display());
    if config.svg {
        let title = format!(
            "m for s = ({:.4}, {:.4}), h = ({}, {})",
            pair.angles()[0],
            pair.angles()[1],
            config.h[0],
            config.h[1]
        );
        let svg = svg::quiver(model.domain(), &field.samples, &positions, &title);
        let path = write_file(&config.out, "field.svg", svg.as_bytes())?;
        println!("wrote {}", path.display());
    }
    println!("vortices at s = ({:.6}, {:.6})", pair.angles()[0], pair.angles()[1]);
    Ok(Outcome::Success)
}
