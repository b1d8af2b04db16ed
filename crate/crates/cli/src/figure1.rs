use std::collections::BTreeMap;

use covstat::partition::{y_over_m3, AccuracyWarning, CONVERGENCE_TOL};
use covstat::specfun::{gauss_laguerre_rule, MAX_ORDER};
use covstat::ApproachKind;
use rayon::prelude::*;
use serde::Serialize;

use crate::args::Figure1Args;
use crate::error::{numerical, CliError};
use crate::output::{finite, sidecar_path, version_string, write_json, Cell, CsvTable};

const COLUMNS: [ApproachKind; 4] =
    [ApproachKind::FullCovariant, ApproachKind::SemiCovariant, ApproachKind::Juttner, ApproachKind::NonRelativistic];

#[derive(Debug, Serialize)]
struct FlaggedPoint {
    beta_m: f64,
    #[serde(flatten)]
    warning: AccuracyWarning,
}

#[derive(Debug, Serialize)]
struct ApproachConvergence {
    method: &'static str,
    /// Largest `|Y(order)/Y(reference_order) - 1|` over the grid.
    max_relative_change_vs_reference: f64,
    converged: bool,
    flagged: Vec<FlaggedPoint>,
}

#[derive(Debug, Serialize)]
struct Sidecar {
    version: String,
    command: &'static str,
    order: usize,
    reference_order: usize,
    convergence_tol: f64,
    grid: GridSummary,
    approaches: BTreeMap<&'static str, ApproachConvergence>,
}

#[derive(Debug, Serialize)]
struct GridSummary {
    beta_m_min: f64,
    beta_m_max: f64,
    points: usize,
    spacing: &'static str,
}

fn method(approach: ApproachKind) -> &'static str {
    match approach {
        ApproachKind::FullCovariant => "quadrature",
        ApproachKind::SemiCovariant | ApproachKind::Juttner => "bessel closed form",
        ApproachKind::NonRelativistic => "closed form",
    }
}

struct Row {
    beta_m: f64,
    values: [f64; 4],
    reference: [f64; 4],
    warnings: [Option<AccuracyWarning>; 4],
}

pub fn run(a: &Figure1Args) -> Result<(), CliError> {
    let grid = a.grid.grid()?;
    let order = a.order.checked()?;
    let reference_order = (2 * order).clamp(60, MAX_ORDER);
    let rule = gauss_laguerre_rule(order).map_err(numerical)?;
    let reference_rule = gauss_laguerre_rule(reference_order).map_err(numerical)?;

    let rows: Vec<Row> = grid
        .par_iter()
        .map(|&x| {
            let mut row = Row { beta_m: x, values: [0.0; 4], reference: [0.0; 4], warnings: [None; 4] };
            for (k, approach) in COLUMNS.into_iter().enumerate() {
                let y = y_over_m3(approach, x, &rule).map_err(|e| numerical(format!("βm = {x}: {e}")))?;
                row.values[k] = y.y_over_m3;
                row.warnings[k] = y.warning;
                row.reference[k] = y_over_m3(approach, x, &reference_rule)
                    .map_err(|e| numerical(format!("βm = {x}: {e}")))?
                    .y_over_m3;
            }
            Ok(row)
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = CsvTable::new("figure1", &["beta_m", "y_full", "y_semi", "y_juttner", "y_nonrel"]);
    table
        .meta("quantity", "Y/m^3 (dimensionless)")
        .meta("order", order)
        .meta("grid", if a.grid.linear { "linear" } else { "log" });
    for r in &rows {
        let mut cells: Vec<Cell> = vec![r.beta_m.into()];
        cells.extend(r.values.iter().map(|&v| Cell::Num(v)));
        table.push(cells);
    }
    table.write(&a.out)?;

    let mut approaches = BTreeMap::new();
    for (k, approach) in COLUMNS.into_iter().enumerate() {
        let change = rows.iter().map(|r| (r.values[k] / r.reference[k] - 1.0).abs()).fold(0.0, f64::max);
        let flagged: Vec<FlaggedPoint> =
            rows.iter().filter_map(|r| r.warnings[k].map(|warning| FlaggedPoint { beta_m: r.beta_m, warning })).collect();
        approaches.insert(
            approach.label(),
            ApproachConvergence {
                method: method(approach),
                max_relative_change_vs_reference: finite("relative change", change)?,
                converged: flagged.is_empty(),
                flagged,
            },
        );
    }
    let sidecar = Sidecar {
        version: version_string(),
        command: "figure1",
        order,
        reference_order,
        convergence_tol: CONVERGENCE_TOL,
        grid: GridSummary {
            beta_m_min: a.grid.beta_m_min,
            beta_m_max: a.grid.beta_m_max,
            points: grid.len(),
            spacing: if a.grid.linear { "linear" } else { "log" },
        },
        approaches,
    };
    write_json(&sidecar_path(&a.out), &sidecar)
}
