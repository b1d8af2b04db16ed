use covstat::partition::{AccuracyWarning, EnergyOrigin};
use covstat::specfun::gauss_laguerre_rule;
use covstat::thermo::{thermo_report_with, ThermoReport};
use covstat::ApproachKind;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::ThermoArgs;
use crate::error::{numerical, usage, CliError};
use crate::output::{finite, sidecar_path, version_string, write_json, CsvTable};
use crate::species::{kelvin_to_mev, mev_to_kelvin, HBAR_C_MEV_FM};

#[derive(Debug, Serialize)]
struct Flagged {
    temperature_k: f64,
    approach: ApproachKind,
    #[serde(flatten)]
    warning: AccuracyWarning,
}

#[derive(Debug, Serialize)]
struct Sidecar {
    version: String,
    command: &'static str,
    gas: String,
    mass_mev: f64,
    n_particles: u64,
    volume_fm3: f64,
    order: usize,
    energy_origin: EnergyOrigin,
    rows: usize,
    max_pv_over_nkt_deviation: f64,
    flagged: Vec<Flagged>,
}

pub fn run(a: &ThermoArgs) -> Result<(), CliError> {
    let gas = a.gas.resolve()?;
    let order = a.order.checked()?;
    let rule = gauss_laguerre_rule(order).map_err(numerical)?;
    let temperatures_mev: Vec<f64> = if a.temperature_k.is_empty() {
        a.grid.grid()?.iter().map(|x| gas.mass_mev / x).collect()
    } else {
        if let Some(bad) = a.temperature_k.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(usage(format!("--temperature-k must be positive, got {bad}")));
        }
        a.temperature_k.iter().map(|&t| kelvin_to_mev(t)).collect()
    };
    let approaches = if a.approach.is_empty() { ApproachKind::ALL.to_vec() } else { a.approach.clone() };
    let origin = if a.subtract_rest_mass { EnergyOrigin::RestMassSubtracted } else { EnergyOrigin::IncludingRestMass };

    let jobs: Vec<(f64, ApproachKind)> =
        temperatures_mev.iter().flat_map(|&t| approaches.iter().map(move |&ap| (t, ap))).collect();
    let reports: Vec<ThermoReport> = jobs
        .par_iter()
        .map(|&(t, ap)| {
            thermo_report_with(&gas.spec, ap, t, &rule, origin)
                .map_err(|e| numerical(format!("T = {} K, {ap}: {e}", mev_to_kelvin(t))))
        })
        .collect::<Result<_, _>>()?;

    let mut table = CsvTable::new(
        "thermo",
        &["T_kelvin", "beta_m", "approach", "F", "S", "P", "E_avg", "c_V", "y_over_m3"],
    );
    table
        .meta("gas", format!("{} (m = {} MeV)", gas.label, gas.mass_mev))
        .meta("n_particles", gas.n)
        .meta("volume_fm3", gas.volume_fm3)
        .meta("order", order)
        .meta("energy_origin", if a.subtract_rest_mass { "rest mass subtracted" } else { "including rest mass" })
        .meta("units", "F and E_avg in MeV; S and c_V in units of k; P in MeV/fm^3");
    let n = gas.n as f64;
    let mut worst_pv: f64 = 0.0;
    let mut flagged = Vec::new();
    for r in &reports {
        let t_k = mev_to_kelvin(r.temperature);
        let p_mev_fm3 = r.pressure / HBAR_C_MEV_FM.powi(3);
        worst_pv = worst_pv.max((p_mev_fm3 * gas.volume_fm3 / (n * r.temperature) - 1.0).abs());
        if let Some(warning) = r.warning {
            flagged.push(Flagged { temperature_k: t_k, approach: r.approach, warning });
        }
        table.push(vec![
            t_k.into(),
            r.beta_m.into(),
            r.approach.label().into(),
            r.free_energy.into(),
            r.entropy.into(),
            p_mev_fm3.into(),
            r.avg_energy.into(),
            r.specific_heat.into(),
            r.y_over_m3.into(),
        ]);
    }
    table.write(&a.out)?;
    let sidecar = Sidecar {
        version: version_string(),
        command: "thermo",
        gas: gas.label.clone(),
        mass_mev: gas.mass_mev,
        n_particles: gas.n,
        volume_fm3: gas.volume_fm3,
        order,
        energy_origin: origin,
        rows: table.len(),
        max_pv_over_nkt_deviation: finite("PV/NkT", worst_pv)?,
        flagged,
    };
    write_json(&sidecar_path(&a.out), &sidecar)
}
