use std::collections::BTreeMap;

use covstat::specfun::gauss_laguerre_rule;
use covstat::thermo::{table1_closed_forms, thermo_report, ThermoReport};
use covstat::ApproachKind;
use serde::Serialize;

use crate::args::Table1Args;
use crate::error::{numerical, usage, CliError};
use crate::output::{finite, version_string, write_json};
use crate::species::mev_to_kelvin;

#[derive(Debug, Serialize)]
struct Rows {
    free_energy_mev: f64,
    entropy_over_k: f64,
    avg_energy_mev: f64,
    avg_energy_over_nkt: f64,
    specific_heat_over_nk: f64,
}

impl Rows {
    fn from_report(r: &ThermoReport, n: f64) -> Result<Self, CliError> {
        Ok(Self {
            free_energy_mev: finite("F", r.free_energy)?,
            entropy_over_k: finite("S", r.entropy)?,
            avg_energy_mev: finite("E", r.avg_energy)?,
            avg_energy_over_nkt: finite("E/NkT", r.avg_energy / (n * r.temperature))?,
            specific_heat_over_nk: finite("c_V/Nk", r.specific_heat / n)?,
        })
    }
}

#[derive(Debug, Serialize)]
struct Entry {
    closed_form: Rows,
    numerical: Rows,
    /// `|numerical/closed_form - 1|` per row.
    relative_deviation: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Serialize)]
struct Document {
    version: String,
    command: &'static str,
    gas: String,
    mass_mev: f64,
    n_particles: u64,
    volume_fm3: f64,
    beta_m: f64,
    temperature_mev: f64,
    temperature_k: f64,
    order: usize,
    approaches: BTreeMap<&'static str, Entry>,
}

fn deviation(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

pub fn run(a: &Table1Args) -> Result<(), CliError> {
    let gas = a.gas.resolve()?;
    let order = a.order.checked()?;
    if !(a.beta_m > 0.0 && a.beta_m.is_finite()) {
        return Err(usage(format!("--beta-m must be positive, got {}", a.beta_m)));
    }
    let rule = gauss_laguerre_rule(order).map_err(numerical)?;
    let t = gas.mass_mev / a.beta_m;
    let n = gas.n as f64;
    let mut approaches = BTreeMap::new();
    for approach in ApproachKind::RELATIVISTIC {
        let closed = table1_closed_forms(approach, &gas.spec, t).map_err(numerical)?;
        let numeric = thermo_report(&gas.spec, approach, t, &rule).map_err(numerical)?;
        let closed_rows = Rows::from_report(&closed, n)?;
        let numeric_rows = Rows::from_report(&numeric, n)?;
        let relative_deviation = BTreeMap::from([
            ("free_energy", deviation(numeric.free_energy, closed.free_energy)),
            ("entropy", deviation(numeric.entropy, closed.entropy)),
            ("avg_energy", deviation(numeric.avg_energy, closed.avg_energy)),
            ("specific_heat", deviation(numeric.specific_heat, closed.specific_heat)),
        ]);
        approaches.insert(approach.label(), Entry { closed_form: closed_rows, numerical: numeric_rows, relative_deviation });
    }
    let doc = Document {
        version: version_string(),
        command: "table1",
        gas: gas.label,
        mass_mev: gas.mass_mev,
        n_particles: gas.n,
        volume_fm3: gas.volume_fm3,
        beta_m: a.beta_m,
        temperature_mev: t,
        temperature_k: mev_to_kelvin(t),
        order,
        approaches,
    };
    write_json(&a.out, &doc)
}
