use std::fmt::Write;

use anyhow::Result;
use vortexfield_core::optimize::landscape;
use vortexfield_core::LandscapeGrid;

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{ensure_dir, fmt_number, write_file};
use crate::svg;

pub fn to_csv(grid: &LandscapeGrid) -> String {
    let n = grid.n();
    let mut out = String::with_capacity(n * n * 48);
    out.push_str("s1,s2,W\n");
    for i in 0..n {
        for j in 0..n {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_number(grid.angle(i)),
                fmt_number(grid.angle(j)),
                fmt_number(grid.get(i, j))
            );
        }
    }
    out
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    ensure_dir(&config.out)?;
    let model = config.model()?;
    let grid = landscape(&model, config.landscape_n)?;
    let path = write_file(&config.out, "landscape.csv", to_csv(&grid).as_bytes())?;
    println!("wrote {}", path.display());
    if config.svg {
        let title = format!("W over (s1, s2), h = ({}, {})", config.h[0], config.h[1]);
        let path = write_file(&config.out, "landscape.svg", svg::heatmap(&grid, &title).as_bytes())?;
        println!("wrote {}", path.display());
    }
    match grid.argmin() {
        Some((i, j)) => println!(
            "minimum cell ({i}, {j}) at s = ({:.6}, {:.6}), W = {}",
            grid.angle(i),
            grid.angle(j),
            fmt_number(grid.get(i, j))
        ),
        None => println!("no finite cell"),
    }
    if grid.failures() > 0 {
        eprintln!(
            "warning: {} cells failed to evaluate and are recorded as inf",
            grid.failures()
        );
    }
    Ok(Outcome::Success)
}
