//! Browser bindings for the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain function that returns
//! `Result<_, String>`, so the logic is testable off the browser.

use covstat::dynamics::{project, step, GasModel, LennardJonesParams, Particle, SystemState};
use covstat::partition::y_over_m3;
use covstat::specfun::gauss_laguerre_rule;
use covstat::thermo::thermo_report;
use covstat::{ApproachKind, FourVector, GasSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;
const MAX_STEPS: usize = 20_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `{"beta_m": [...], "full": [...], "semi": [...], "juttner": [...], "nonrel": [...]}`
/// on a log grid.
pub fn y_curves_json(beta_m_min: f64, beta_m_max: f64, points: usize, order: usize) -> Result<String, String> {
    if !(beta_m_min > 0.0 && beta_m_max > beta_m_min && beta_m_max.is_finite()) {
        return Err(format!("need 0 < min < max, got {beta_m_min}..{beta_m_max}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}"));
    }
    let rule = gauss_laguerre_rule(order).map_err(err)?;
    let grid: Vec<f64> =
        (0..points).map(|k| beta_m_min * (beta_m_max / beta_m_min).powf(k as f64 / (points - 1) as f64)).collect();
    let mut doc = serde_json::Map::new();
    doc.insert("beta_m".into(), json!(grid));
    for approach in ApproachKind::ALL {
        let ys = grid
            .iter()
            .map(|&x| y_over_m3(approach, x, &rule).map(|y| y.y_over_m3).map_err(err))
            .collect::<Result<Vec<f64>, String>>()?;
        doc.insert(approach.label().into(), json!(ys));
    }
    Ok(serde_json::Value::Object(doc).to_string())
}

/// One thermodynamic report per unit mass and unit volume, as JSON.
pub fn thermo_json(approach: &str, beta_m: f64, n_particles: u32, order: usize) -> Result<String, String> {
    let approach: ApproachKind = approach.parse()?;
    if !(beta_m > 0.0 && beta_m.is_finite()) {
        return Err(format!("beta_m must be positive, got {beta_m}"));
    }
    let gas = GasSpec::new(n_particles as u64, 1.0, 1.0).map_err(err)?;
    let rule = gauss_laguerre_rule(order).map_err(err)?;
    let r = thermo_report(&gas, approach, 1.0 / beta_m, &rule).map_err(err)?;
    serde_json::to_string(&r).map_err(err)
}

/// Two particles of unit mass approaching along `x` with speeds `±speed`,
/// offset by `impact` in `y`, starting `4σ` apart (`σ = 1`). Returns
/// `[τ, x₀, y₀, x₁, y₁]` per step, flattened.
pub fn pair_trajectory_values(kappa: f64, speed: f64, impact: f64, steps: usize, dtau: f64) -> Result<Vec<f64>, String> {
    if !(speed > 0.0 && speed < 1.0) {
        return Err(format!("speed must be in (0, 1), got {speed}"));
    }
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must be in 1..={MAX_STEPS}"));
    }
    let model = GasModel::RealGas { lj: LennardJonesParams::new(kappa, 1.0).map_err(err)? };
    let p = speed / (1.0 - speed * speed).sqrt();
    let particle = |x: [f64; 3], px: f64| Particle {
        q: FourVector::from_parts(0.0, x),
        p: FourVector::from_parts((1.0 + px * px).sqrt(), [px, 0.0, 0.0]),
        m: 1.0,
    };
    let guess = SystemState::new(vec![particle([-2.0, 0.0, 0.0], p), particle([2.0, impact, 0.0], -p)], 0.0);
    let mut s = project(&model, &guess).map_err(err)?;
    let mut out = Vec::with_capacity(5 * (steps + 1));
    let mut push = |s: &SystemState| {
        out.push(s.tau);
        for a in &s.particles {
            out.push(a.q.x);
            out.push(a.q.y);
        }
    };
    push(&s);
    for k in 1..=steps {
        s = step(&model, &s, dtau).map_err(|e| format!("step {k}: {e}"))?;
        push(&s);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn y_curves(beta_m_min: f64, beta_m_max: f64, points: usize, order: usize) -> Result<String, JsValue> {
    y_curves_json(beta_m_min, beta_m_max, points, order).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn thermo(approach: &str, beta_m: f64, n_particles: u32, order: usize) -> Result<String, JsValue> {
    thermo_json(approach, beta_m, n_particles, order).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn pair_trajectory(kappa: f64, speed: f64, impact: f64, steps: usize, dtau: f64) -> Result<Vec<f64>, JsValue> {
    pair_trajectory_values(kappa, speed, impact, steps, dtau).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_one_value_per_point() {
        let v: serde_json::Value = serde_json::from_str(&y_curves_json(0.01, 100.0, 30, 40).unwrap()).unwrap();
        for key in ["beta_m", "full", "semi", "juttner", "nonrel"] {
            assert_eq!(v[key].as_array().unwrap().len(), 30, "{key}");
        }
        let (j, f) = (v["juttner"][0].as_f64().unwrap(), v["full"][0].as_f64().unwrap());
        assert!(j > f);
        assert!(y_curves_json(0.0, 1.0, 10, 40).is_err());
        assert!(y_curves_json(1.0, 2.0, 1, 40).is_err());
    }

    #[test]
    fn thermo_report_serialises() {
        let v: serde_json::Value = serde_json::from_str(&thermo_json("juttner", 1e-4, 10, 40).unwrap()).unwrap();
        let e = v["avg_energy"].as_f64().unwrap() / (10.0 * 1e4);
        assert!((e - 3.0).abs() < 0.01, "{e}");
        assert!(thermo_json("bogus", 1.0, 1, 40).is_err());
    }

    #[test]
    fn pair_scatters_symmetrically() {
        let t = pair_trajectory_values(0.05, 0.2, 0.0, 400, 0.05).unwrap();
        assert_eq!(t.len(), 5 * 401);
        let last = &t[t.len() - 5..];
        // head-on with equal speeds: mirror images about x = 0
        assert!((last[1] + last[3]).abs() < 1e-9, "{last:?}");
        assert!(pair_trajectory_values(0.05, 1.5, 0.0, 10, 0.1).is_err());
    }
}
