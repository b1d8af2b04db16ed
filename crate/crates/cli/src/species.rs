//! Species mass table and the Kelvin / MeV boundary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{io, usage, CliError};

/// Boltzmann constant in MeV/K.
pub const BOLTZMANN_MEV_PER_K: f64 = 8.617333262e-11;
/// `ħc` in MeV·fm, for converting volumes given in fm³.
pub const HBAR_C_MEV_FM: f64 = 197.3269804;

const DEFAULT_TABLE: &str = include_str!("../species.toml");

#[derive(Debug, Deserialize)]
struct Table {
    species: BTreeMap<String, Entry>,
}

#[derive(Debug, Deserialize)]
struct Entry {
    mass_mev: f64,
}

pub fn kelvin_to_mev(t: f64) -> f64 {
    t * BOLTZMANN_MEV_PER_K
}

pub fn mev_to_kelvin(t: f64) -> f64 {
    t / BOLTZMANN_MEV_PER_K
}

/// `fm³` to `MeV⁻³`.
pub fn fm3_to_natural(v: f64) -> f64 {
    v / HBAR_C_MEV_FM.powi(3)
}

fn parse(text: &str, origin: &str) -> Result<BTreeMap<String, f64>, CliError> {
    let table: Table = toml::from_str(text).map_err(|e| usage(format!("{origin}: {e}")))?;
    let mut out = BTreeMap::new();
    for (name, entry) in table.species {
        if !(entry.mass_mev > 0.0 && entry.mass_mev.is_finite()) {
            return Err(usage(format!("{origin}: species {name} has invalid mass {}", entry.mass_mev)));
        }
        out.insert(name, entry.mass_mev);
    }
    Ok(out)
}

/// The rest mass in MeV and a label for it. An explicit mass wins over the table.
pub fn resolve_mass(gas: &str, mass_mev: Option<f64>, species_file: Option<&Path>) -> Result<(f64, String), CliError> {
    if let Some(m) = mass_mev {
        if !(m > 0.0 && m.is_finite()) {
            return Err(usage(format!("--mass-mev must be positive, got {m}")));
        }
        return Ok((m, format!("explicit {m} MeV")));
    }
    let table = match species_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io(path, e))?;
            parse(&text, &path.display().to_string())?
        }
        None => parse(DEFAULT_TABLE, "built-in species table")?,
    };
    let key = table.keys().find(|k| k.eq_ignore_ascii_case(gas)).cloned();
    match key {
        Some(k) => Ok((table[&k], k)),
        None => Err(usage(format!(
            "unknown gas '{gas}' (known: {})",
            table.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}
