//! Built-in layouts: primitives and the 3-input XOR and full-adder designs.
//!
//! Every builder returns cells in canonical `(y, x)` order with the lower-left
//! cell centre at the origin, so a built layout and its `.qcal` file agree
//! index for index.

mod audit;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::format::LayoutDocument;
use crate::geometry::{Orientation, Polarization};
use crate::layout::{Cell, Layout};

pub use audit::{digitization_report, AuditRow, DigitizationReport};

use Polarization::{Minus, Plus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignId {
    Wire {
        cells: usize,
        orientation: Orientation,
    },
    Inverter,
    Mv3,
    And2,
    Or2,
    Xor3V1,
    Xor3V2,
    FaV1,
    FaV2,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("unknown design `{0}`")]
pub struct UnknownDesign(pub String);

impl DesignId {
    /// The designs shipped as files, with a five-cell wire.
    pub const SHIPPED: [DesignId; 9] = [
        DesignId::Wire {
            cells: 5,
            orientation: Orientation::Normal,
        },
        DesignId::Inverter,
        DesignId::Mv3,
        DesignId::And2,
        DesignId::Or2,
        DesignId::Xor3V1,
        DesignId::Xor3V2,
        DesignId::FaV1,
        DesignId::FaV2,
    ];

    /// File name stem, e.g. `wire5` or `xor3_v2`.
    pub fn stem(&self) -> String {
        match self {
            DesignId::Wire {
                cells,
                orientation: Orientation::Normal,
            } => format!("wire{cells}"),
            DesignId::Wire {
                cells,
                orientation: Orientation::Rotated,
            } => format!("wire{cells}_rot45"),
            other => other.to_string(),
        }
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignId::Wire {
                cells,
                orientation: Orientation::Normal,
            } => write!(f, "wire:{cells}"),
            DesignId::Wire {
                cells,
                orientation: Orientation::Rotated,
            } => write!(f, "wire:{cells}:rot45"),
            DesignId::Inverter => f.write_str("inverter"),
            DesignId::Mv3 => f.write_str("mv3"),
            DesignId::And2 => f.write_str("and2"),
            DesignId::Or2 => f.write_str("or2"),
            DesignId::Xor3V1 => f.write_str("xor3_v1"),
            DesignId::Xor3V2 => f.write_str("xor3_v2"),
            DesignId::FaV1 => f.write_str("fa_v1"),
            DesignId::FaV2 => f.write_str("fa_v2"),
        }
    }
}

impl FromStr for DesignId {
    type Err = UnknownDesign;

    /// Accepts the display form plus `wireN` / `wireN_rot45` stems.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || UnknownDesign(s.to_string());
        let fixed = match s {
            "inverter" => Some(DesignId::Inverter),
            "mv3" => Some(DesignId::Mv3),
            "and2" => Some(DesignId::And2),
            "or2" => Some(DesignId::Or2),
            "xor3_v1" => Some(DesignId::Xor3V1),
            "xor3_v2" => Some(DesignId::Xor3V2),
            "fa_v1" => Some(DesignId::FaV1),
            "fa_v2" => Some(DesignId::FaV2),
            _ => None,
        };
        if let Some(id) = fixed {
            return Ok(id);
        }
        let rest = s.strip_prefix("wire").ok_or_else(unknown)?;
        let rest = rest.strip_prefix(':').unwrap_or(rest);
        let (count, orientation) = match rest.split_once([':', '_']) {
            Some((n, "rot45")) => (n, Orientation::Rotated),
            Some(_) => return Err(unknown()),
            None => (rest, Orientation::Normal),
        };
        match count.parse::<usize>() {
            Ok(cells) if cells >= 2 => Ok(DesignId::Wire { cells, orientation }),
            _ => Err(unknown()),
        }
    }
}

pub fn build(id: DesignId) -> Layout {
    let layout = match id {
        DesignId::Wire { cells, orientation } => wire(cells, orientation),
        DesignId::Inverter => inverter(),
        DesignId::Mv3 => majority("mv3", None),
        DesignId::And2 => majority("and2", Some(Minus)),
        DesignId::Or2 => majority("or2", Some(Plus)),
        DesignId::Xor3V1 => xor3_v1(),
        DesignId::Xor3V2 => xor3_v2(),
        DesignId::FaV1 => fa_v1(),
        DesignId::FaV2 => fa_v2(),
    };
    layout.canonical()
}

/// One-line description written as the file comment of a shipped design.
pub fn describe(id: DesignId) -> String {
    match id {
        DesignId::Wire { cells, .. } => format!("{cells}-cell binary wire, input A, output Y"),
        DesignId::Inverter => "inverter: the line forks into two branches that couple diagonally into the output line".into(),
        DesignId::Mv3 => "three-input majority voter".into(),
        DesignId::And2 => "two-input AND: majority voter with the third input fixed at -1".into(),
        DesignId::Or2 => "two-input OR: majority voter with the third input fixed at +1".into(),
        DesignId::Xor3V1 => "ten-cell three-input XOR".into(),
        DesignId::Xor3V2 => "eight-cell three-input XOR; stored polarizations are the network state for A=1 B=0 C=0".into(),
        DesignId::FaV1 => "fourteen-cell full adder built on the ten-cell XOR".into(),
        DesignId::FaV2 => "twelve-cell full adder built on the eight-cell XOR; stored polarizations are the network state for A=1 B=0 C=1".into(),
    }
}

/// The built layout as a file document carrying its description.
pub fn document(id: DesignId) -> LayoutDocument {
    LayoutDocument::new(build(id)).with_comment(describe(id))
}

/// Input vector behind the recorded network state of a design, if any.
pub fn reference_inputs(id: DesignId) -> Option<BTreeMap<String, bool>> {
    let bits = match id {
        DesignId::Xor3V2 => [true, false, false],
        DesignId::FaV2 => [true, false, true],
        _ => return None,
    };
    Some(
        ["A", "B", "C"]
            .iter()
            .map(|s| s.to_string())
            .zip(bits)
            .collect(),
    )
}

fn wire(n: usize, orientation: Orientation) -> Layout {
    let cells = (0..n)
        .map(|i| {
            let x = 20.0 * i as f64;
            let mut c = match i {
                0 => Cell::input(x, 0.0, "A"),
                _ if i == n - 1 => Cell::output(x, 0.0, "Y"),
                _ => Cell::normal(x, 0.0),
            };
            c.orientation = orientation;
            c
        })
        .collect();
    let name = match orientation {
        Orientation::Normal => format!("wire{n}"),
        Orientation::Rotated => format!("wire{n}_rot45"),
    };
    Layout::new(name, cells)
}

/// Line splitting into two diagonal-coupled branches that rejoin.
fn inverter() -> Layout {
    let mut cells = vec![Cell::input(0.0, 20.0, "A"), Cell::output(100.0, 20.0, "Y")];
    for (x, y) in [
        (20.0, 20.0),
        (40.0, 20.0),
        (40.0, 40.0),
        (60.0, 40.0),
        (40.0, 0.0),
        (60.0, 0.0),
        (80.0, 20.0),
    ] {
        cells.push(Cell::normal(x, y));
    }
    Layout::new("inverter", cells)
}

/// Cross-shaped majority voter. `bias` replaces input C with a fixed cell.
fn majority(name: &str, bias: Option<Polarization>) -> Layout {
    let third = match bias {
        None => Cell::input(20.0, 0.0, "C"),
        Some(p) => Cell::fixed(20.0, 0.0, p),
    };
    Layout::new(
        name,
        vec![
            Cell::input(0.0, 20.0, "A"),
            Cell::input(20.0, 40.0, "B"),
            third,
            Cell::normal(20.0, 20.0),
            Cell::output(40.0, 20.0, "Y"),
        ],
    )
}

const XOR_V1_FREE: [(f64, f64); 6] = [
    (40.0, 0.0),
    (60.0, 0.0),
    (0.0, 20.0),
    (40.0, 20.0),
    (60.0, 20.0),
    (0.0, 40.0),
];

fn xor3_v1_cells(output: &str) -> Vec<Cell> {
    let mut cells = vec![
        Cell::output(20.0, 0.0, output).in_zone(1),
        Cell::input(20.0, 40.0, "A"),
        Cell::input(40.0, 40.0, "B"),
        Cell::input(60.0, 40.0, "C"),
    ];
    cells.extend(XOR_V1_FREE.iter().map(|&(x, y)| Cell::normal(x, y)));
    cells
}

fn xor3_v1() -> Layout {
    Layout::new("xor3_v1", xor3_v1_cells("XOR"))
}

fn fa_v1() -> Layout {
    let mut cells = xor3_v1_cells("Sum");
    cells.push(Cell::output(40.0, 60.0, "Carry").in_zone(1));
    for (x, y) in [(20.0, 60.0), (60.0, 60.0), (0.0, 80.0)] {
        cells.push(Cell::normal(x, y));
    }
    Layout::new("fa_v1", cells)
}

/// The seven driver cells of the second XOR, with their state for the
/// recorded input vector A=1, B=0, C=`carry_in`.
fn xor3_v2_drivers(carry_in: bool) -> Vec<Cell> {
    let c = Polarization::from_bit(carry_in);
    // The three interior cells hold the complement of C.
    let inner = if carry_in { Minus } else { Plus };
    vec![
        Cell::input(20.0, 60.0, "A").with_polarization(Plus),
        Cell::input(60.0, 60.0, "C").with_polarization(c),
        Cell::normal(40.0, 40.0).with_polarization(inner),
        Cell::normal(20.0, 20.0).with_polarization(inner),
        Cell::normal(40.0, 20.0).with_polarization(inner),
        Cell::input(0.0, 0.0, "B").with_polarization(Minus),
        Cell::normal(20.0, 0.0).with_polarization(Minus),
    ]
}

fn xor3_v2() -> Layout {
    let mut cells = vec![Cell::output(60.0, 20.0, "XOR")
        .in_zone(1)
        .with_polarization(Plus)];
    cells.extend(xor3_v2_drivers(false));
    Layout::new("xor3_v2", cells)
}

fn fa_v2() -> Layout {
    let mut cells = vec![
        Cell::output(60.0, 20.0, "Sum")
            .in_zone(1)
            .with_polarization(Minus),
        Cell::output(80.0, 120.0, "Carry")
            .in_zone(1)
            .with_polarization(Plus),
        Cell::normal(60.0, 120.0).with_polarization(Plus),
        Cell::normal(40.0, 100.0).with_polarization(Minus),
        Cell::normal(40.0, 80.0).with_polarization(Minus),
    ];
    cells.extend(xor3_v2_drivers(true));
    Layout::new("fa_v2", cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{validate, Role};

    #[test]
    fn ids_round_trip() {
        for id in DesignId::SHIPPED {
            assert_eq!(id.to_string().parse::<DesignId>().unwrap(), id);
            assert_eq!(id.stem().parse::<DesignId>().unwrap(), id);
        }
        let rot = DesignId::Wire {
            cells: 4,
            orientation: Orientation::Rotated,
        };
        assert_eq!("wire:4:rot45".parse::<DesignId>().unwrap(), rot);
        assert_eq!("wire4_rot45".parse::<DesignId>().unwrap(), rot);
        assert!("wire1".parse::<DesignId>().is_err());
        assert!("adder".parse::<DesignId>().is_err());
    }

    #[test]
    fn counts() {
        let count = |id| build(id).len();
        assert_eq!(count(DesignId::Xor3V1), 10);
        assert_eq!(count(DesignId::Xor3V2), 8);
        assert_eq!(count(DesignId::FaV1), 14);
        assert_eq!(count(DesignId::FaV2), 12);
        assert_eq!(count(DesignId::Inverter), 9);
        assert_eq!(
            count(DesignId::Wire {
                cells: 5,
                orientation: Orientation::Normal
            }),
            5
        );
    }

    #[test]
    fn all_valid_and_canonical() {
        for id in DesignId::SHIPPED {
            let l = build(id);
            assert!(validate(&l).is_empty(), "{id}: {:?}", validate(&l));
            assert_eq!(l, l.canonical());
            let min_x = l
                .cells
                .iter()
                .map(|c| c.center.x)
                .fold(f64::INFINITY, f64::min);
            let min_y = l
                .cells
                .iter()
                .map(|c| c.center.y)
                .fold(f64::INFINITY, f64::min);
            assert_eq!((min_x, min_y), (0.0, 0.0), "{id}");
        }
    }

    #[test]
    fn proposed_designs_use_normal_cells() {
        for id in [
            DesignId::Xor3V1,
            DesignId::Xor3V2,
            DesignId::FaV1,
            DesignId::FaV2,
        ] {
            assert!(build(id)
                .cells
                .iter()
                .all(|c| c.orientation == Orientation::Normal));
        }
    }

    #[test]
    fn second_adder_contains_second_xor() {
        let xor = build(DesignId::Xor3V2);
        let fa = build(DesignId::FaV2);
        for c in &xor.cells {
            let twin = fa
                .cells
                .iter()
                .find(|d| d.center == c.center)
                .expect("cell missing from adder");
            match (&c.role, &twin.role) {
                (Role::Output(a), Role::Output(b)) => {
                    assert_eq!((a.as_str(), b.as_str()), ("XOR", "Sum"))
                }
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn second_xor_zones() {
        let zones: std::collections::BTreeSet<u8> = build(DesignId::Xor3V2)
            .cells
            .iter()
            .map(|c| c.zone.index())
            .collect();
        assert_eq!(zones.into_iter().collect::<Vec<_>>(), vec![0, 1]);
    }
}
