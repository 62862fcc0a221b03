//! Ground-state search over free cell polarizations.
//!
//! Input and fixed cells are pinned; normal and output cells are free. Two
//! solvers are provided: an exact search over every sign vector and a
//! clock-ordered local relaxation.

mod exhaustive;
mod sweep;
mod truth;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::electrostatics::{pair_energy, EnergyError};
use crate::geometry::{Polarization, NM};
use crate::layout::{Layout, Role};

pub use exhaustive::{exhaustive_ground_state, GroundState};
pub use sweep::{sweep_relax, SweepOutcome};
pub use truth::{truth_table, TruthRow, TruthTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("{free} free cells exceed the exhaustive limit of {max}")]
    Capacity { free: usize, max: usize },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("input `{0}` has no assigned value")]
    UnassignedInput(String),
    #[error("no input labelled `{0}`")]
    UnknownLabel(String),
    #[error("no value given for input `{0}`")]
    MissingLabel(String),
    #[error("{0} inputs exceed the truth-table limit of 16")]
    TooManyInputs(usize),
    #[error("expected {expected} cell states, got {got}")]
    StateCount { expected: usize, got: usize },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMode {
    #[default]
    Exhaustive,
    Sweep,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub max_free_cells_exhaustive: usize,
    /// A relaxation pass with at most this many flips counts as converged.
    pub sweep_tolerance: usize,
    pub max_sweeps: usize,
    /// Centre-to-centre cutoff in nm; `None` includes every pair.
    pub effect_radius: Option<f64>,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SolverMode::Exhaustive,
            max_free_cells_exhaustive: 24,
            sweep_tolerance: 0,
            max_sweeps: 10_000,
            effect_radius: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), SolverError> {
        if self.max_free_cells_exhaustive > 30 {
            return Err(SolverError::Config(
                "max_free_cells_exhaustive must be at most 30".into(),
            ));
        }
        if self.max_sweeps == 0 {
            return Err(SolverError::Config("max_sweeps must be at least 1".into()));
        }
        if let Some(r) = self.effect_radius {
            if r.is_nan() || r <= 0.0 {
                return Err(SolverError::Config("effect radius must be positive".into()));
            }
        }
        Ok(())
    }
}

/// A polarization for every cell of a layout and the resulting energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationAssignment {
    pub states: Vec<Polarization>,
    pub total_energy: f64,
}

impl PolarizationAssignment {
    pub fn get(&self, cell: usize) -> Polarization {
        self.states[cell]
    }

    /// The states in the optional form used by the energy breakdowns.
    pub fn partial(&self) -> Vec<Option<Polarization>> {
        self.states.iter().copied().map(Some).collect()
    }
}

/// Pair energies of two cells for each combination of their states, indexed
/// `[first is +1][second is +1]`.
pub(crate) type PairTable = [[f64; 2]; 2];

pub(crate) fn bit(p: Polarization) -> usize {
    p.bit() as usize
}

pub(crate) fn from_index(b: usize) -> Polarization {
    Polarization::from_bit(b == 1)
}

/// Interacting cell pairs `(i, j, table)` with `i < j`, in ascending order.
pub(crate) fn interactions(
    layout: &Layout,
    radius: Option<f64>,
) -> Result<Vec<(usize, usize, PairTable)>, SolverError> {
    let g = &layout.geometry;
    let mut out = Vec::new();
    for i in 0..layout.len() {
        for j in i + 1..layout.len() {
            let (a, b) = (&layout.cells[i], &layout.cells[j]);
            if radius.is_some_and(|r| a.center.distance(b.center) > r) {
                continue;
            }
            let mut table = [[0.0; 2]; 2];
            for (si, row) in table.iter_mut().enumerate() {
                for (sj, cell) in row.iter_mut().enumerate() {
                    let ea = a.electrons(i, from_index(si), g);
                    let eb = b.electrons(j, from_index(sj), g);
                    let mut e = 0.0;
                    for p in &ea {
                        for q in &eb {
                            e += pair_energy(p.position.distance(q.position) * NM, g)?;
                        }
                    }
                    *cell = e;
                }
            }
            out.push((i, j, table));
        }
    }
    Ok(out)
}

/// Sum over interacting cell pairs of their four electron-pair energies.
pub fn total_layout_energy(
    layout: &Layout,
    states: &[Polarization],
    config: &SolverConfig,
) -> Result<f64, SolverError> {
    if states.len() != layout.len() {
        return Err(SolverError::StateCount {
            expected: layout.len(),
            got: states.len(),
        });
    }
    let mut total = 0.0;
    for (i, j, t) in interactions(layout, config.effect_radius)? {
        total += t[bit(states[i])][bit(states[j])];
    }
    Ok(total)
}

/// Pins each input cell to `+1` for bit 1 and `-1` for bit 0.
pub fn assign_inputs(
    layout: &Layout,
    inputs: &BTreeMap<String, bool>,
) -> Result<Layout, SolverError> {
    let labels = layout.input_labels();
    if let Some(unknown) = inputs.keys().find(|k| !labels.contains(k)) {
        return Err(SolverError::UnknownLabel(unknown.clone()));
    }
    let mut out = layout.clone();
    for cell in &mut out.cells {
        if let Role::Input(label) = &cell.role {
            let v = inputs
                .get(label)
                .ok_or_else(|| SolverError::MissingLabel(label.clone()))?;
            cell.polarization = Some(Polarization::from_bit(*v));
        }
    }
    Ok(out)
}

/// Pinned value per cell, `None` for free cells.
pub(crate) fn pinned_states(layout: &Layout) -> Result<Vec<Option<Polarization>>, SolverError> {
    layout
        .cells
        .iter()
        .map(|c| match (&c.role, c.pinned()) {
            (Role::Input(label), None) => Err(SolverError::UnassignedInput(label.clone())),
            (_, p) => Ok(p),
        })
        .collect()
}

/// Result of running the configured solver once.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub assignment: PolarizationAssignment,
    pub converged: bool,
    pub tie: bool,
    /// Cells whose value differs in an equal-energy alternative.
    pub ambiguous: Vec<usize>,
}

pub fn solve(layout: &Layout, config: &SolverConfig) -> Result<Solution, SolverError> {
    config.check()?;
    match config.mode {
        SolverMode::Exhaustive => {
            let g = exhaustive_ground_state(layout, config)?;
            let ambiguous = match (&g.runner_up, g.tie) {
                (Some(r), true) => (0..layout.len())
                    .filter(|&i| r.states[i] != g.assignment.states[i])
                    .collect(),
                _ => Vec::new(),
            };
            Ok(Solution {
                assignment: g.assignment,
                converged: true,
                tie: g.tie,
                ambiguous,
            })
        }
        SolverMode::Sweep => {
            let s = sweep_relax(layout, config)?;
            Ok(Solution {
                assignment: s.assignment,
                converged: s.converged,
                tie: false,
                ambiguous: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Cell;
    use approx::assert_relative_eq;

    #[test]
    fn two_cell_energy_matches_enumeration() {
        let l = Layout::new(
            "pair",
            vec![Cell::normal(0.0, 0.0), Cell::normal(20.0, 0.0)],
        );
        let cfg = SolverConfig::default();
        let plus = [Polarization::Plus, Polarization::Plus];
        // First cell electrons (9,9), (-9,-9); second (29,9), (11,-9).
        let d = [
            20.0,
            (2f64 * 2.0 + 18.0 * 18.0).sqrt(),
            (38f64 * 38.0 + 18.0 * 18.0).sqrt(),
            20.0,
        ];
        let expected: f64 = d.iter().map(|r| 23.04e-29 / (r * 1e-9)).sum();
        assert_relative_eq!(
            total_layout_energy(&l, &plus, &cfg).unwrap(),
            expected,
            max_relative = 1e-12
        );
        let minus = [Polarization::Minus, Polarization::Minus];
        assert_relative_eq!(
            total_layout_energy(&l, &minus, &cfg).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_cell_has_no_energy() {
        let l = Layout::new("one", vec![Cell::normal(0.0, 0.0)]);
        assert_eq!(
            total_layout_energy(&l, &[Polarization::Plus], &SolverConfig::default()),
            Ok(0.0)
        );
    }

    #[test]
    fn overlapping_cells_are_degenerate() {
        let l = Layout::new("dup", vec![Cell::normal(0.0, 0.0), Cell::normal(0.0, 0.0)]);
        let r = total_layout_energy(
            &l,
            &[Polarization::Plus, Polarization::Plus],
            &SolverConfig::default(),
        );
        assert!(matches!(
            r,
            Err(SolverError::Energy(EnergyError::DegenerateDistance(_)))
        ));
    }

    #[test]
    fn radius_cuts_far_pairs() {
        let l = Layout::new(
            "far",
            vec![Cell::normal(0.0, 0.0), Cell::normal(100.0, 0.0)],
        );
        let cfg = SolverConfig {
            effect_radius: Some(50.0),
            ..SolverConfig::default()
        };
        assert_eq!(
            total_layout_energy(&l, &[Polarization::Plus; 2], &cfg),
            Ok(0.0)
        );
    }

    #[test]
    fn input_assignment() {
        let l = Layout::new(
            "io",
            vec![
                Cell::input(0.0, 0.0, "A"),
                Cell::input(20.0, 0.0, "B"),
                Cell::output(40.0, 0.0, "Y"),
            ],
        );
        let m: BTreeMap<String, bool> = [("A".to_string(), true), ("B".to_string(), false)].into();
        let a = assign_inputs(&l, &m).unwrap();
        assert_eq!(a.cells[0].pinned(), Some(Polarization::Plus));
        assert_eq!(a.cells[1].pinned(), Some(Polarization::Minus));
        assert_eq!(
            assign_inputs(&l, &BTreeMap::new()),
            Err(SolverError::MissingLabel("A".into()))
        );
        let bad: BTreeMap<String, bool> = [("Q".to_string(), true)].into();
        assert_eq!(
            assign_inputs(&l, &bad),
            Err(SolverError::UnknownLabel("Q".into()))
        );
    }

    #[test]
    fn config_limits() {
        assert!(SolverConfig {
            max_free_cells_exhaustive: 31,
            ..Default::default()
        }
        .check()
        .is_err());
        assert!(SolverConfig {
            max_sweeps: 0,
            ..Default::default()
        }
        .check()
        .is_err());
        assert!(SolverConfig::default().check().is_ok());
    }
}
