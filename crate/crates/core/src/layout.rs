//! Cells, layouts and structural validation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::geometry::{
    electron_positions, Electron, ElectronSite, GeometryConfig, Orientation, Point, Polarization,
};

/// Two centres closer than `pitch - OVERLAP_TOLERANCE` overlap.
pub const OVERLAP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("clock zone {0} out of range 0..=3")]
    ZoneOutOfRange(i64),
    #[error("layout has no cells")]
    Empty,
    #[error("layout `{name}` is invalid: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid {
        name: String,
        violations: Vec<Violation>,
    },
}

/// One of the four cyclic clock phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClockZone(u8);

impl ClockZone {
    pub const fn new_unchecked(zone: u8) -> Self {
        Self(zone % 4)
    }

    pub fn new(zone: i64) -> Result<Self, LayoutError> {
        if (0..=3).contains(&zone) {
            Ok(Self(zone as u8))
        } else {
            Err(LayoutError::ZoneOutOfRange(zone))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    /// The zone that switches after this one.
    pub fn next(self) -> Self {
        Self((self.0 + 1) % 4)
    }
}

impl fmt::Display for ClockZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Role {
    Normal,
    Input(String),
    Output(String),
    Fixed(Polarization),
}

impl Role {
    /// Keyword used by the file format.
    pub fn kind(&self) -> &'static str {
        match self {
            Role::Normal => "normal",
            Role::Input(_) => "input",
            Role::Output(_) => "output",
            Role::Fixed(_) => "fixed",
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Role::Input(l) | Role::Output(l) => Some(l),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub center: Point,
    pub orientation: Orientation,
    pub role: Role,
    pub zone: ClockZone,
    /// Current state. Normal and output cells may carry one as a recorded
    /// network state; the solvers treat them as free regardless.
    pub polarization: Option<Polarization>,
}

impl Cell {
    pub fn new(x: f64, y: f64, role: Role) -> Self {
        let polarization = match role {
            Role::Fixed(p) => Some(p),
            _ => None,
        };
        Self {
            center: Point::new(x, y),
            orientation: Orientation::Normal,
            role,
            zone: ClockZone::default(),
            polarization,
        }
    }

    pub fn normal(x: f64, y: f64) -> Self {
        Self::new(x, y, Role::Normal)
    }

    pub fn input(x: f64, y: f64, label: &str) -> Self {
        Self::new(x, y, Role::Input(label.to_string()))
    }

    pub fn output(x: f64, y: f64, label: &str) -> Self {
        Self::new(x, y, Role::Output(label.to_string()))
    }

    pub fn fixed(x: f64, y: f64, p: Polarization) -> Self {
        Self::new(x, y, Role::Fixed(p))
    }

    pub fn in_zone(mut self, zone: u8) -> Self {
        self.zone = ClockZone::new_unchecked(zone);
        self
    }

    pub fn with_polarization(mut self, p: Polarization) -> Self {
        self.polarization = Some(p);
        self
    }

    pub fn rotated(mut self) -> Self {
        self.orientation = Orientation::Rotated;
        self
    }

    /// Polarization the solvers must not change: fixed cells always, input
    /// cells once a value has been assigned.
    pub fn pinned(&self) -> Option<Polarization> {
        match self.role {
            Role::Fixed(p) => Some(p),
            Role::Input(_) => self.polarization,
            _ => None,
        }
    }

    pub fn is_output(&self) -> bool {
        matches!(self.role, Role::Output(_))
    }

    pub fn electrons(
        &self,
        index: usize,
        p: Polarization,
        geometry: &GeometryConfig,
    ) -> [ElectronSite; 2] {
        let [x, y] = electron_positions(self.center, self.orientation, p, geometry);
        [
            ElectronSite {
                position: x,
                owner: index,
                which: Electron::X,
            },
            ElectronSite {
                position: y,
                owner: index,
                which: Electron::Y,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub name: String,
    pub cells: Vec<Cell>,
    pub geometry: GeometryConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Overlap {
        first: usize,
        second: usize,
        distance: f64,
    },
    MissingInput,
    MissingOutput,
    DuplicateInputLabel {
        label: String,
        cells: Vec<usize>,
    },
    DuplicateOutputLabel {
        label: String,
        cells: Vec<usize>,
    },
    FixedMismatch {
        cell: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap {
                first,
                second,
                distance,
            } => {
                write!(
                    f,
                    "cells {first} and {second} overlap (centres {distance:.3} nm apart)"
                )
            }
            Violation::MissingInput => f.write_str("no input cell"),
            Violation::MissingOutput => f.write_str("no output cell"),
            Violation::DuplicateInputLabel { label, cells } => {
                write!(f, "input label `{label}` used by cells {cells:?}")
            }
            Violation::DuplicateOutputLabel { label, cells } => {
                write!(f, "output label `{label}` used by cells {cells:?}")
            }
            Violation::FixedMismatch { cell } => {
                write!(
                    f,
                    "fixed cell {cell} holds a polarization different from its pinned value"
                )
            }
        }
    }
}

impl Layout {
    pub fn new(name: impl Into<String>, cells: Vec<Cell>) -> Self {
        Self {
            name: name.into(),
            cells,
            geometry: GeometryConfig::default(),
        }
    }

    pub fn with_geometry(mut self, geometry: GeometryConfig) -> Self {
        self.geometry = geometry;
        self
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn labels(&self, want_input: bool) -> Vec<String> {
        let mut labels: Vec<String> = self
            .cells
            .iter()
            .filter_map(|c| match (&c.role, want_input) {
                (Role::Input(l), true) | (Role::Output(l), false) => Some(l.clone()),
                _ => None,
            })
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Input labels in lexicographic order.
    pub fn input_labels(&self) -> Vec<String> {
        self.labels(true)
    }

    /// Output labels in lexicographic order.
    pub fn output_labels(&self) -> Vec<String> {
        self.labels(false)
    }

    pub fn find_input(&self, label: &str) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| matches!(&c.role, Role::Input(l) if l == label))
    }

    pub fn find_output(&self, label: &str) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| matches!(&c.role, Role::Output(l) if l == label))
    }

    /// Stored per-cell states.
    pub fn states(&self) -> Vec<Option<Polarization>> {
        self.cells
            .iter()
            .map(|c| c.pinned().or(c.polarization))
            .collect()
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Layout {
        let mut out = self.clone();
        for c in &mut out.cells {
            c.center = c.center.offset(dx, dy);
        }
        out
    }

    /// Cells sorted by `(y, x)`, the order used by the file format.
    pub fn canonical(&self) -> Layout {
        let mut out = self.clone();
        out.cells.sort_by(|a, b| {
            a.center
                .y
                .total_cmp(&b.center.y)
                .then(a.center.x.total_cmp(&b.center.x))
        });
        out
    }

    pub fn check(&self) -> Result<(), LayoutError> {
        let violations = validate(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(LayoutError::Invalid {
                name: self.name.clone(),
                violations,
            })
        }
    }
}

/// Every structural problem of `layout`; empty when the layout is usable.
pub fn validate(layout: &Layout) -> Vec<Violation> {
    let mut out = Vec::new();
    let limit = layout.geometry.pitch - OVERLAP_TOLERANCE;
    for (i, a) in layout.cells.iter().enumerate() {
        for (j, b) in layout.cells.iter().enumerate().skip(i + 1) {
            let distance = a.center.distance(b.center);
            if distance < limit {
                out.push(Violation::Overlap {
                    first: i,
                    second: j,
                    distance,
                });
            }
        }
    }

    let mut inputs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    let mut outputs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, c) in layout.cells.iter().enumerate() {
        match &c.role {
            Role::Input(l) => inputs.entry(l).or_default().push(i),
            Role::Output(l) => outputs.entry(l).or_default().push(i),
            Role::Fixed(p) => {
                if c.polarization.is_some_and(|q| q != *p) {
                    out.push(Violation::FixedMismatch { cell: i });
                }
            }
            Role::Normal => {}
        }
    }
    if inputs.is_empty() {
        out.push(Violation::MissingInput);
    }
    if outputs.is_empty() {
        out.push(Violation::MissingOutput);
    }
    for (label, cells) in inputs.into_iter().filter(|(_, c)| c.len() > 1) {
        out.push(Violation::DuplicateInputLabel {
            label: label.to_string(),
            cells,
        });
    }
    for (label, cells) in outputs.into_iter().filter(|(_, c)| c.len() > 1) {
        out.push(Violation::DuplicateOutputLabel {
            label: label.to_string(),
            cells,
        });
    }
    out
}

/// Area in µm² of the axis-aligned box covering every cell's square.
pub fn bounding_box_area(layout: &Layout) -> Result<f64, LayoutError> {
    if layout.cells.is_empty() {
        return Err(LayoutError::Empty);
    }
    let half = layout.geometry.cell_width / 2.0;
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for c in &layout.cells {
        x0 = x0.min(c.center.x - half);
        x1 = x1.max(c.center.x + half);
        y0 = y0.min(c.center.y - half);
        y1 = y1.max(c.center.y + half);
    }
    Ok((x1 - x0) * (y1 - y0) * 1e-6)
}
