//! Cell geometry and electron placement.
//!
//! Lengths are nanometres unless a name says otherwise. The Coulomb constant is
//! the product `k * q * q` in J·m, so energies come out in joules once a
//! distance has been converted to metres.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Metres per nanometre.
pub const NM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid polarization {0}: expected +1 or -1")]
    InvalidPolarization(String),
    #[error("geometry parameter `{0}` must be strictly positive")]
    NonPositive(&'static str),
    #[error("pitch {pitch} nm does not equal cell width {width} nm plus gap {gap} nm")]
    InconsistentPitch { pitch: f64, width: f64, gap: f64 },
    #[error("dot offset {offset} nm is not half the cell width {width} nm")]
    InconsistentOffset { offset: f64, width: f64 },
}

/// Physical constants of a layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    pub cell_width: f64,
    pub dot_offset: f64,
    pub pitch: f64,
    pub inter_cell_gap: f64,
    /// `A` in `E = A / r`, J·m.
    pub coulomb_constant: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            cell_width: 18.0,
            dot_offset: 9.0,
            pitch: 20.0,
            inter_cell_gap: 2.0,
            coulomb_constant: 23.04e-29,
        }
    }
}

impl GeometryConfig {
    /// Builds a geometry from the three independent quantities; the gap and
    /// dot offset follow from them.
    pub fn new(cell_width: f64, pitch: f64, coulomb_constant: f64) -> Result<Self, GeometryError> {
        let g = Self {
            cell_width,
            dot_offset: cell_width / 2.0,
            pitch,
            inter_cell_gap: pitch - cell_width,
            coulomb_constant,
        };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<(), GeometryError> {
        let positive = [
            ("cell_width", self.cell_width),
            ("dot_offset", self.dot_offset),
            ("pitch", self.pitch),
            ("inter_cell_gap", self.inter_cell_gap),
            ("coulomb_constant", self.coulomb_constant),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(GeometryError::NonPositive(name));
            }
        }
        if (self.cell_width + self.inter_cell_gap - self.pitch).abs() > 1e-9 {
            return Err(GeometryError::InconsistentPitch {
                pitch: self.pitch,
                width: self.cell_width,
                gap: self.inter_cell_gap,
            });
        }
        if (self.cell_width / 2.0 - self.dot_offset).abs() > 1e-9 {
            return Err(GeometryError::InconsistentOffset {
                offset: self.dot_offset,
                width: self.cell_width,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn offset(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

/// One of the two stable charge configurations of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    Minus,
    Plus,
}

impl Polarization {
    pub fn from_value(v: f64) -> Result<Self, GeometryError> {
        if v == 1.0 {
            Ok(Self::Plus)
        } else if v == -1.0 {
            Ok(Self::Minus)
        } else {
            Err(GeometryError::InvalidPolarization(v.to_string()))
        }
    }

    /// Logic 1 is `+1`.
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Self::Plus
        } else {
            Self::Minus
        }
    }

    pub fn bit(self) -> bool {
        self == Self::Plus
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Plus => 1.0,
            Self::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Self::Plus => Self::Minus,
            Self::Minus => Self::Plus,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
        })
    }
}

impl FromStr for Polarization {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Self::Plus),
            "-1" | "-" => Ok(Self::Minus),
            other => Err(GeometryError::InvalidPolarization(other.to_string())),
        }
    }
}

/// Dot-square orientation of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Normal,
    /// Dot square turned 45 degrees about the cell centre.
    Rotated,
}

/// Labels the two electrons of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Electron {
    X,
    Y,
}

impl fmt::Display for Electron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Electron::X => "X",
            Electron::Y => "Y",
        })
    }
}

/// A placed electron and the cell it belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronSite {
    pub position: Point,
    pub owner: usize,
    pub which: Electron,
}

/// Positions of electrons `[X, Y]` for a cell centred at `center`.
///
/// `+1` occupies the rising diagonal: X at `(+d, +d)`, Y at `(-d, -d)`.
/// `-1` occupies the falling diagonal: X at `(-d, +d)`, Y at `(+d, -d)`.
/// Rotated cells use the same corners turned 45 degrees counter-clockwise,
/// which puts `+1` on the vertical axis and `-1` on the horizontal one.
pub fn electron_positions(
    center: Point,
    orientation: Orientation,
    p: Polarization,
    geometry: &GeometryConfig,
) -> [Point; 2] {
    let d = geometry.dot_offset;
    match (orientation, p) {
        (Orientation::Normal, Polarization::Plus) => [center.offset(d, d), center.offset(-d, -d)],
        (Orientation::Normal, Polarization::Minus) => [center.offset(-d, d), center.offset(d, -d)],
        (Orientation::Rotated, Polarization::Plus) => {
            let r = d * std::f64::consts::SQRT_2;
            [center.offset(0.0, r), center.offset(0.0, -r)]
        }
        (Orientation::Rotated, Polarization::Minus) => {
            let r = d * std::f64::consts::SQRT_2;
            [center.offset(-r, 0.0), center.offset(r, 0.0)]
        }
    }
}
