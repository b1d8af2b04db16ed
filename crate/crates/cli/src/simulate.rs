use std::time::Instant;

use covstat::dynamics::{
    constraint_values, init_state, project, step, total_momentum, DynamicsError, GasModel, InitOptions,
    LennardJonesParams, SystemState,
};
use covstat::minkowski::Boost;
use serde::Serialize;

use crate::args::{ModelKind, SimulateArgs};
use crate::error::{numerical, usage, CliError};
use crate::output::{finite, sidecar_path, version_string, write_json, CsvTable};

#[derive(Debug, Serialize)]
struct Summary {
    version: String,
    command: &'static str,
    model: &'static str,
    n: usize,
    seed: u64,
    dtau: f64,
    steps: usize,
    box_size: f64,
    momentum_scale: f64,
    kappa: Option<f64>,
    sigma: Option<f64>,
    boost_vx: f64,
    max_phi_residual: f64,
    max_chi_residual: f64,
    initial_total_momentum: [f64; 4],
    final_total_momentum: [f64; 4],
    /// `max_μ |P^μ(τ) - P^μ(0)| / P⁰(0)` over the run.
    momentum_drift: f64,
    wall_time_s: f64,
}

fn classify(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::InvalidInput { .. } | DynamicsError::TooFewParticles(..) => usage(e),
        other => numerical(other),
    }
}

fn build_model(a: &SimulateArgs) -> Result<GasModel, CliError> {
    Ok(match a.model {
        ModelKind::PerfectSimple => GasModel::PerfectSimple,
        ModelKind::PerfectCovariant => GasModel::PerfectCovariant,
        ModelKind::RealGas => GasModel::RealGas { lj: LennardJonesParams::new(a.kappa, a.sigma).map_err(classify)? },
    })
}

/// Max `|φ|` and `|χ|` at this step; rows are added only when `write` is set.
fn record(
    table: &mut CsvTable,
    model: &GasModel,
    k: usize,
    s: &SystemState,
    write: bool,
) -> Result<(f64, f64), CliError> {
    let n = s.len();
    let residuals = constraint_values(model, s).map_err(|e| numerical(format!("step {k}: {e}")))?;
    let (mut phi, mut chi): (f64, f64) = (0.0, 0.0);
    for (i, a) in s.particles.iter().enumerate() {
        phi = phi.max(residuals[i].abs());
        chi = chi.max(residuals[n + i].abs());
        if !write {
            continue;
        }
        let mut row = vec![k.into(), s.tau.into(), i.into()];
        row.extend(a.q.to_array().map(Into::into));
        row.extend(a.p.to_array().map(Into::into));
        row.push(residuals[i].into());
        row.push(residuals[n + i].into());
        table.push(row);
    }
    Ok((phi, chi))
}

pub fn run(a: &SimulateArgs) -> Result<(), CliError> {
    if !(a.dtau > 0.0 && a.dtau.is_finite()) {
        return Err(usage(format!("--dtau must be positive, got {}", a.dtau)));
    }
    if a.every == 0 {
        return Err(usage("--every must be at least 1"));
    }
    let model = build_model(a)?;
    let opts = InitOptions {
        n: a.n,
        seed: a.seed,
        box_size: a.box_size,
        momentum_scale: a.momentum_scale,
        tau0: 0.0,
        mass: 1.0,
    };
    let started = Instant::now();
    let mut state = init_state(&model, &opts).map_err(classify)?;
    if a.boost_vx != 0.0 {
        let boost = Boost::new([a.boost_vx, 0.0, 0.0]).map_err(usage)?;
        // the covariant constraints are invariant; q⁰ = τ is not and gets re-imposed
        state = project(&model, &state.boosted(&boost)).map_err(|e| numerical(format!("after boost: {e}")))?;
    }

    let mut table = CsvTable::new(
        "simulate",
        &[
            "step", "tau", "particle_id", "q0", "q1", "q2", "q3", "p0", "p1", "p2", "p3", "phi_residual", "chi_residual",
        ],
    );
    table
        .meta("model", model.label())
        .meta("n", a.n)
        .meta("seed", a.seed)
        .meta("dtau", a.dtau)
        .meta("steps", a.steps)
        .meta("units", "mass = 1; lengths and tau in units of 1/m");
    if let Some(lj) = model.lj() {
        table.meta("kappa", lj.kappa()).meta("sigma", lj.sigma());
    }

    let p0 = total_momentum(&state);
    let (mut max_phi, mut max_chi) = record(&mut table, &model, 0, &state, true)?;
    let mut drift: f64 = 0.0;
    for k in 1..=a.steps {
        state = step(&model, &state, a.dtau).map_err(|e| numerical(format!("step {k}: {e}")))?;
        let p = total_momentum(&state);
        drift = drift.max((0..4).map(|mu| (p[mu] - p0[mu]).abs()).fold(0.0, f64::max) / p0.t);
        let (phi, chi) = record(&mut table, &model, k, &state, k % a.every == 0 || k == a.steps)?;
        max_phi = max_phi.max(phi);
        max_chi = max_chi.max(chi);
    }
    table.write(&a.out)?;

    let summary = Summary {
        version: version_string(),
        command: "simulate",
        model: model.label(),
        n: a.n,
        seed: a.seed,
        dtau: a.dtau,
        steps: a.steps,
        box_size: a.box_size,
        momentum_scale: a.momentum_scale,
        kappa: model.lj().map(|l| l.kappa()),
        sigma: model.lj().map(|l| l.sigma()),
        boost_vx: a.boost_vx,
        max_phi_residual: finite("phi residual", max_phi)?,
        max_chi_residual: finite("chi residual", max_chi)?,
        initial_total_momentum: p0.to_array(),
        final_total_momentum: total_momentum(&state).to_array(),
        momentum_drift: finite("momentum drift", drift)?,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    write_json(&sidecar_path(&a.out), &summary)
}
