//! Point-charge kink energy between electrons of different cells.

use std::io;

use thiserror::Error;

use crate::geometry::{Electron, ElectronSite, GeometryConfig, Point, Polarization, NM};
use crate::layout::Layout;

/// Energy differences below this are treated as ties, in joules.
pub const TIE_THRESHOLD: f64 = 1e-26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("degenerate electron distance {0} m (coincident charges)")]
    DegenerateDistance(f64),
    #[error("no output cell labelled `{0}`")]
    UnknownOutput(String),
    #[error("cell {cell} has no polarization")]
    IncompleteAssignment { cell: usize },
    #[error("expected {expected} cell states, got {got}")]
    StateCount { expected: usize, got: usize },
    #[error("output `{label}` is undetermined: U(+1) = {plus:e} J, U(-1) = {minus:e} J")]
    Undetermined {
        label: String,
        plus: f64,
        minus: f64,
    },
}

/// `A / r` for a separation given in metres.
pub fn pair_energy(distance_m: f64, geometry: &GeometryConfig) -> Result<f64, EnergyError> {
    if distance_m > 0.0 {
        Ok(geometry.coulomb_constant / distance_m)
    } else {
        Err(EnergyError::DegenerateDistance(distance_m))
    }
}

/// Energy of one electron at `target` due to `sources`, summed in list order.
pub fn electron_energy(
    target: Point,
    sources: &[ElectronSite],
    geometry: &GeometryConfig,
) -> Result<f64, EnergyError> {
    let mut total = 0.0;
    for s in sources {
        total += pair_energy(target.distance(s.position) * NM, geometry)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownRow {
    pub source: ElectronSite,
    /// Which electron of the output cell this row contributes to.
    pub target: Electron,
    pub distance_nm: f64,
    pub energy: f64,
}

/// Per-electron contributions to the energy of one output candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBreakdown {
    pub output_label: String,
    pub candidate: Polarization,
    /// All rows for electron X, then all rows for electron Y.
    pub rows: Vec<BreakdownRow>,
    pub sum_x: f64,
    pub sum_y: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub fn rows_for(&self, target: Electron) -> impl Iterator<Item = &BreakdownRow> {
        self.rows.iter().filter(move |r| r.target == target)
    }

    /// Columns `source_cell,electron,distance_nm,energy_J`, then footer
    /// rows `U_X`, `U_Y` and `U`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["source_cell", "electron", "distance_nm", "energy_J"])?;
        for r in &self.rows {
            w.write_record([
                r.source.owner.to_string(),
                r.target.to_string(),
                format!("{:.4}", r.distance_nm),
                format!("{:.4e}", r.energy),
            ])?;
        }
        for (name, v) in [("U_X", self.sum_x), ("U_Y", self.sum_y), ("U", self.total)] {
            w.write_record([name, "", "", &format!("{v:.4e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Electrons of every non-output cell, in cell order with X before Y.
///
/// Output cells are left out: each output is analysed against the network
/// that drives it, not against other outputs.
pub fn driver_sites(
    layout: &Layout,
    states: &[Option<Polarization>],
) -> Result<Vec<ElectronSite>, EnergyError> {
    if states.len() != layout.len() {
        return Err(EnergyError::StateCount {
            expected: layout.len(),
            got: states.len(),
        });
    }
    let mut sites = Vec::with_capacity(2 * layout.len());
    for (i, cell) in layout.cells.iter().enumerate() {
        if cell.is_output() {
            continue;
        }
        let p = states[i].ok_or(EnergyError::IncompleteAssignment { cell: i })?;
        sites.extend(cell.electrons(i, p, &layout.geometry));
    }
    Ok(sites)
}

/// Breakdown for output `label` taking polarization `candidate`, with every
/// other non-output cell in the state given by `states` (indexed like
/// `layout.cells`; output entries are ignored).
pub fn output_config_energy(
    layout: &Layout,
    label: &str,
    candidate: Polarization,
    states: &[Option<Polarization>],
) -> Result<EnergyBreakdown, EnergyError> {
    let index = layout
        .find_output(label)
        .ok_or_else(|| EnergyError::UnknownOutput(label.to_string()))?;
    let sources = driver_sites(layout, states)?;
    let targets = layout.cells[index].electrons(index, candidate, &layout.geometry);
    let g = &layout.geometry;

    let mut rows = Vec::with_capacity(2 * sources.len());
    for t in &targets {
        for s in &sources {
            let distance_nm = t.position.distance(s.position);
            rows.push(BreakdownRow {
                source: *s,
                target: t.which,
                distance_nm,
                energy: pair_energy(distance_nm * NM, g)?,
            });
        }
    }
    let sum_x = electron_energy(targets[0].position, &sources, g)?;
    let sum_y = electron_energy(targets[1].position, &sources, g)?;
    Ok(EnergyBreakdown {
        output_label: label.to_string(),
        candidate,
        rows,
        sum_x,
        sum_y,
        total: sum_x + sum_y,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub polarization: Polarization,
    pub plus: EnergyBreakdown,
    pub minus: EnergyBreakdown,
}

/// Picks the candidate with the lower total energy.
pub fn decide_output(
    layout: &Layout,
    label: &str,
    states: &[Option<Polarization>],
) -> Result<Decision, EnergyError> {
    let plus = output_config_energy(layout, label, Polarization::Plus, states)?;
    let minus = output_config_energy(layout, label, Polarization::Minus, states)?;
    if (plus.total - minus.total).abs() < TIE_THRESHOLD {
        return Err(EnergyError::Undetermined {
            label: label.to_string(),
            plus: plus.total,
            minus: minus.total,
        });
    }
    let polarization = if plus.total < minus.total {
        Polarization::Plus
    } else {
        Polarization::Minus
    };
    Ok(Decision {
        polarization,
        plus,
        minus,
    })
}
