use anyhow::Result;
use serde_json::{json, Value};
use vortexfield_core::optimize::nelder_mead;
use vortexfield_core::{EnergyBreakdown, EnergyModel, NelderMeadResult, VortexConfig};

use super::{boundary_positions, positions_json, Outcome};
use crate::config::RunConfig;
use crate::output::{ensure_dir, num, nums, write_json};

pub fn search(config: &RunConfig, model: &EnergyModel) -> Result<NelderMeadResult> {
    Ok(nelder_mead(
        |s| model.objective(s),
        config.s0,
        &config.simplex_options(),
    )?)
}

pub fn energy_json(e: &EnergyBreakdown) -> Value {
    json!({
        "w0": num(e.w0),
        "v_ext": num(e.v_ext),
        "total": num(e.total),
        "diagnostics": {
            "picard_iterations": e.diagnostics.picard_iterations,
            "picard_converged": e.diagnostics.picard_converged,
            "residual": num(e.diagnostics.residual),
            "boundary_nodes": e.diagnostics.boundary_nodes,
            "grid_nodes": e.diagnostics.grid_nodes,
        }
    })
}

pub fn optimizer_json(r: &NelderMeadResult) -> Value {
    let st = &r.state;
    json!({
        "converged": r.converged,
        "evaluations": st.evaluations,
        "iterations": st.iterations,
        "operations": {
            "reflect": st.operations.reflect,
            "expand": st.operations.expand,
            "contract": st.operations.contract,
            "shrink": st.operations.shrink,
        },
        "simplex": st.vertices.iter().zip(&st.values)
            .map(|(v, &f)| json!({"s": nums(v), "value": num(f)}))
            .collect::<Vec<_>>(),
        "diameter": num(st.diameter()),
        "value_spread": num(st.value_spread()),
        "best_history": nums(&st.best_history),
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    ensure_dir(&config.out)?;
    let model = config.model()?;
    let result = search(config, &model)?;
    let pair = VortexConfig::pair(result.s_min[0], result.s_min[1])?;
    let energy = model.evaluate(&pair)?;
    let positions = boundary_positions(model.domain(), &pair);

    let summary = json!({
        "command": "minimize",
        "config": serde_json::to_value(config)?,
        "converged": result.converged,
        "s_min": nums(&result.s_min),
        "separation": num(vortexfield_core::geom::angle_difference(result.s_min[0], result.s_min[1]).abs()),
        "positions": positions_json(&positions),
        "energy": energy_json(&energy),
        "optimizer": optimizer_json(&result),
    });
    let path = write_json(&config.out, "summary.json", &summary)?;

    println!(
        "s_min = ({:.6}, {:.6})  W = {:.9}  ({} evaluations, {})",
        result.s_min[0],
        result.s_min[1],
        energy.total,
        result.state.evaluations,
        if result.converged {
            "converged"
        } else {
            "evaluation budget exhausted"
        }
    );
    println!("wrote {}", path.display());
    Ok(if result.converged {
        Outcome::Success
    } else {
        Outcome::BudgetExhausted
    })
}
