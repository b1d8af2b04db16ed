//! Quick invariant checks across every module; any failure exits with the
//! numerical-accuracy code.

use std::f64::consts::PI;

use covstat::dynamics::{
    constraint_values, init_state, multipliers, step, total_momentum, GasModel, InitOptions, LennardJonesParams,
};
use covstat::minkowski::Boost;
use covstat::partition::{ln_z_canonical, y_nonrel_leading, y_over_m3, y_over_m3_quadrature};
use covstat::specfun::{bessel_k_scaled, gauss_laguerre_rule, ln_gamma, MAX_ORDER};
use covstat::thermo::{d_ln_y_dbeta, thermo_report};
use covstat::{ApproachKind, FourVector, GasSpec};

use crate::error::{numerical, CliError};

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn boost_preserves_dot() -> Check {
    let b = Boost::new([0.3, -0.5, 0.6]).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let f = k as f64;
        let a = FourVector::new(3.0 + f.sin(), f.cos(), 0.5 * f, -0.2 * f);
        let c = FourVector::new(1.0, 0.1 * f, f.sin(), 2.0);
        worst = worst.max((b.apply(&a).dot(&b.apply(&c)) - a.dot(&c)).abs() / (1.0 + a.dot(&c).abs()));
    }
    ensure(worst <= 1e-12, format!("max relative change {worst:.1e}"))
}

fn laguerre_rules() -> Check {
    let mut worst: f64 = 0.0;
    for n in 1..=MAX_ORDER {
        let r = gauss_laguerre_rule(n).map_err(|e| e.to_string())?;
        if r.nodes().windows(2).any(|w| w[0] >= w[1]) || r.weights().iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(format!("order {n}: nodes not ascending or weights negative"));
        }
        for k in [0, n, 2 * n - 1] {
            let ln_fact = ln_gamma(k as f64 + 1.0).map_err(|e| e.to_string())?;
            let ratio: f64 = r.iter().map(|(x, w)| (w.ln() + k as f64 * x.ln() - ln_fact).exp()).sum();
            worst = worst.max((ratio - 1.0).abs());
        }
    }
    ensure(worst <= 1e-10, format!("orders 1..={MAX_ORDER}, degree ≤ 2n-1 max rel {worst:.1e}"))
}

fn bessel_identities() -> Check {
    let mut recurrence: f64 = 0.0;
    let mut asymptotic: f64 = 0.0;
    for x in [0.01, 0.1, 1.0, 10.0, 100.0, 600.0] {
        let k = |n| bessel_k_scaled(n, x).map_err(|e| e.to_string());
        recurrence = recurrence.max(rel(k(0)? + 2.0 / x * k(1)?, k(2)?));
        if x >= 30.0 {
            let two_term = (PI / (2.0 * x)).sqrt() * (1.0 + 3.0 / (8.0 * x));
            asymptotic = asymptotic.max(rel(k(1)?, two_term) * x * x);
        }
    }
    ensure(
        recurrence <= 1e-10 && asymptotic <= 10.0,
        format!("recurrence {recurrence:.1e}; asymptotic x²·error {asymptotic:.2}"),
    )
}

fn gamma_recurrence() -> Check {
    let mut worst: f64 = 0.0;
    for x in [0.5, 3.7, 42.0] {
        let step = (ln_gamma(x + 1.0).map_err(|e| e.to_string())? - ln_gamma(x).map_err(|e| e.to_string())?).exp();
        worst = worst.max(rel(step, x));
    }
    ensure(worst <= 1e-12, format!("max rel {worst:.1e}"))
}

fn closed_forms() -> Check {
    let r = gauss_laguerre_rule(40).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for x in [0.1, 0.5, 2.0, 10.0, 50.0] {
        for (ap, n) in [(ApproachKind::SemiCovariant, 1), (ApproachKind::Juttner, 2)] {
            let q = y_over_m3_quadrature(ap, x, &r).map_err(|e| e.to_string())?;
            let b = 4.0 * PI * bessel_k_scaled(n, x).map_err(|e| e.to_string())? / x;
            worst = worst.max(rel(q, b));
        }
    }
    ensure(worst <= 1e-8, format!("quadrature vs Bessel max rel {worst:.1e}"))
}

fn figure_shape() -> Check {
    let r = gauss_laguerre_rule(64).map_err(|e| e.to_string())?;
    let y = |a, x| y_over_m3(a, x, &r).map(|v| v.y_over_m3).map_err(|e| e.to_string());
    let (j, s, f) = (ApproachKind::Juttner, ApproachKind::SemiCovariant, ApproachKind::FullCovariant);
    for x in [0.01, 0.03, 0.1] {
        if !(y(j, x)? > y(s, x)? && y(s, x)? > y(f, x)?) {
            return Err(format!("ordering broken at βm = {x}"));
        }
    }
    let mut worst: f64 = 0.0;
    for a in [j, s, f] {
        worst = worst.max(rel(y(a, 1000.0)?, y_nonrel_leading(1000.0)));
    }
    ensure(worst <= 2.0 / 1000.0, format!("ordering at βm ≤ 0.1; max |Y/Y_nonrel - 1| at βm = 1000 is {worst:.1e}"))
}

fn ln_z_additivity() -> Check {
    let r = gauss_laguerre_rule(40).map_err(|e| e.to_string())?;
    let z = |v| {
        let gas = GasSpec::new(100, 1.0, v).map_err(|e| e.to_string())?;
        ln_z_canonical(&gas, ApproachKind::FullCovariant, 0.5, &r).map_err(|e| e.to_string())
    };
    let diff = z(20.0)? - z(10.0)?;
    let err = (diff - 100.0 * 2f64.ln()).abs();
    ensure(err <= 1e-9, format!("ln Z(2V) - ln Z(V) - N ln 2 = {err:.1e}"))
}

fn thermo_identities() -> Check {
    let r = gauss_laguerre_rule(64).map_err(|e| e.to_string())?;
    let gas = GasSpec::new(1000, 1.0, 3.0).map_err(|e| e.to_string())?;
    let mut pv: f64 = 0.0;
    for ap in ApproachKind::ALL {
        for t in [0.01, 1.0, 100.0] {
            let rep = thermo_report(&gas, ap, t, &r).map_err(|e| e.to_string())?;
            pv = pv.max(rel(rep.pressure * 3.0 / (1000.0 * t), 1.0));
        }
    }
    let mut table1: f64 = 0.0;
    for (ap, k) in [(ApproachKind::FullCovariant, 1.0), (ApproachKind::SemiCovariant, 2.0), (ApproachKind::Juttner, 3.0)] {
        let rep = thermo_report(&gas, ap, 1e4, &r).map_err(|e| e.to_string())?;
        table1 = table1.max(rel(rep.avg_energy / (1000.0 * 1e4), k)).max(rel(rep.specific_heat / 1000.0, k));
    }
    let d = d_ln_y_dbeta(ApproachKind::FullCovariant, 1.0, &r, 2).map_err(|e| e.to_string())?;
    ensure(
        pv <= 1e-12 && table1 <= 0.01 && d > 0.0,
        format!("PV/NkT max dev {pv:.1e}; ultra-relativistic E and c_V max rel {table1:.1e}"),
    )
}

fn multiplier_closed_forms() -> Check {
    let mut worst: f64 = 0.0;
    for (model, seed) in [(GasModel::PerfectSimple, 1), (GasModel::PerfectCovariant, 2)] {
        let s = init_state(&model, &InitOptions { n: 4, seed, momentum_scale: 1.0, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let l = multipliers(&model, &s).map_err(|e| e.to_string())?;
        for (l, a) in l.iter().zip(&s.particles) {
            let want = match model {
                GasModel::PerfectSimple => a.m / a.p.t,
                _ => a.m * a.m / a.p.norm_sq(),
            };
            worst = worst.max(rel(*l, want));
        }
    }
    ensure(worst <= 1e-10, format!("max rel {worst:.1e}"))
}

fn constraint_preservation() -> Check {
    let mut worst: f64 = 0.0;
    for model in [GasModel::PerfectSimple, GasModel::PerfectCovariant] {
        let mut s = init_state(&model, &InitOptions { n: 5, seed: 3, ..Default::default() }).map_err(|e| e.to_string())?;
        for _ in 0..1000 {
            s = step(&model, &s, 0.01).map_err(|e| e.to_string())?;
        }
        worst = constraint_values(&model, &s).map_err(|e| e.to_string())?.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    ensure(worst <= 1e-8, format!("max |ψ| after 1000 steps {worst:.1e}"))
}

fn real_gas_conservation() -> Check {
    let model = GasModel::RealGas { lj: LennardJonesParams::new(0.1, 1.0).map_err(|e| e.to_string())? };
    let mut s = init_state(&model, &InitOptions { n: 2, seed: 3, box_size: 2.0, momentum_scale: 0.3, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let p0 = total_momentum(&s);
    let boost = Boost::new([0.4, 0.0, 0.0]).map_err(|e| e.to_string())?;
    let boosted = constraint_values(&model, &s.boosted(&boost)).map_err(|e| e.to_string())?;
    let invariance = boosted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for _ in 0..1000 {
        s = step(&model, &s, 0.01).map_err(|e| e.to_string())?;
    }
    let p = total_momentum(&s);
    let drift = (0..4).map(|mu| (p[mu] - p0[mu]).abs()).fold(0.0, f64::max) / p0.t;
    ensure(
        drift <= 1e-6 && invariance <= 1e-10,
        format!("P drift {drift:.1e} over 1000 steps; boosted constraint residual {invariance:.1e}"),
    )
}

pub fn run() -> Result<(), CliError> {
    let checks: [NamedCheck; 11] = [
        ("minkowski: boosts preserve the Minkowski product", boost_preserves_dot),
        ("specfun: Gauss-Laguerre rules", laguerre_rules),
        ("specfun: Bessel recurrence and asymptotics", bessel_identities),
        ("specfun: ln Γ recurrence", gamma_recurrence),
        ("partition: quadrature reproduces Bessel closed forms", closed_forms),
        ("partition: ordering and non-relativistic limit", figure_shape),
        ("partition: ln Z is additive in ln V", ln_z_additivity),
        ("thermo: equation of state and ultra-relativistic limit", thermo_identities),
        ("dynamics: multiplier closed forms", multiplier_closed_forms),
        ("dynamics: perfect gas constraint preservation", constraint_preservation),
        ("dynamics: real gas momentum conservation and invariance", real_gas_conservation),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        return Err(numerical(format!("{failed} of {} self-test checks failed", checks.len())));
    }
    Ok(())
}
