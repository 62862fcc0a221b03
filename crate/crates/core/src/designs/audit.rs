//! Distance audit of the reconstructed XOR and adder against published
//! electron-distance tables.
//!
//! Each published table lists, for one output cell in one candidate state,
//! the distances in nm from its X and Y electrons to every driver electron.
//! Rows come in pairs per driver cell (its X electron, then its Y electron),
//! with drivers numbered in the order of `*_NUMBERING` below.

use std::io;

use super::{build, DesignId};
use crate::electrostatics::output_config_energy;
use crate::geometry::{Electron, Point, Polarization};

const XOR_NUMBERING: [(f64, f64); 7] = [
    (20.0, 60.0),
    (60.0, 60.0),
    (40.0, 40.0),
    (20.0, 20.0),
    (40.0, 20.0),
    (0.0, 0.0),
    (20.0, 0.0),
];

const ADDER_NUMBERING: [(f64, f64); 10] = [
    (60.0, 120.0),
    (40.0, 100.0),
    (40.0, 80.0),
    (20.0, 60.0),
    (60.0, 60.0),
    (40.0, 40.0),
    (20.0, 20.0),
    (40.0, 20.0),
    (0.0, 0.0),
    (20.0, 0.0),
];

struct PublishedTable {
    output: &'static str,
    candidate: Polarization,
    x: &'static [f64],
    y: &'static [f64],
}

const XOR_TABLES: [PublishedTable; 2] = [
    PublishedTable {
        output: "XOR",
        candidate: Polarization::Plus,
        x: &[
            56.57, 62.03, 43.86, 22.0, 28.28, 38.05, 40.0, 60.27, 20.0, 42.047, 80.52, 71.02,
            61.35, 43.86,
        ],
        y: &[
            45.65, 55.17, 58.0, 43.86, 38.02, 28.28, 28.42, 40.0, 18.11, 20.0, 60.03, 46.51, 40.04,
            29.73,
        ],
    },
    PublishedTable {
        output: "XOR",
        candidate: Polarization::Minus,
        x: &[
            45.65, 44.72, 40.0, 29.73, 20.09, 20.09, 22.0, 26.90, 2.0, 26.90, 63.24, 68.20, 44.72,
            58.06,
        ],
        y: &[
            69.32, 69.33, 60.72, 38.0, 42.94, 42.94, 42.94, 58.0, 26.90, 38.0, 60.03, 80.05, 58.03,
            44.72,
        ],
    },
];

const ADDER_TABLES: [PublishedTable; 4] = [
    PublishedTable {
        output: "Carry",
        candidate: Polarization::Plus,
        x: &[
            20.0, 42.05, 61.35, 55.17, 70.45, 70.45, 84.85, 110.3, 61.35, 86.76, 98.81, 105.8,
            126.8, 132.4, 115.6, 124.6, 156.2, 159.5, 143.1, 150.5,
        ],
        y: &[
            18.11, 20.0, 40.04, 29.73, 47.41, 45.65, 59.39, 84.85, 42.05, 63.24, 73.78, 83.0,
            101.6, 108.46, 91.23, 102.39, 129.6, 130.1, 116.59, 127.13,
        ],
    },
    PublishedTable {
        output: "Carry",
        candidate: Polarization::Minus,
        x: &[
            2.0, 26.90, 44.72, 43.9, 56.56, 70.45, 73.23, 86.27, 60.03, 78.02, 90.35, 100.43,
            116.6, 125.2, 108.46, 120.03, 144.2, 153.1, 134.1, 144.1,
        ],
        y: &[
            26.90, 38.0, 58.03, 44.72, 62.03, 56.56, 73.23, 98.40, 46.51, 71.02, 83.45, 89.44,
            113.1, 115.6, 129.6, 107.7, 141.45, 144.2, 128.4, 134.1,
        ],
    },
    PublishedTable {
        output: "Sum",
        candidate: Polarization::Plus,
        x: &[
            98.0, 83.95, 88.56, 65.14, 71.02, 44.72, 56.56, 62.03, 40.0, 26.9, 42.94, 20.09, 58.0,
            43.86, 38.0, 26.9, 80.52, 71.02, 84.42, 55.17,
        ],
        y: &[
            119.36, 100.0, 82.46, 78.02, 80.52, 58.03, 62.03, 56.56, 60.72, 40.0, 42.94, 20.09,
            43.86, 22.0, 26.9, 2.0, 60.03, 46.51, 40.04, 29.73,
        ],
    },
    PublishedTable {
        output: "Sum",
        candidate: Polarization::Minus,
        x: &[
            101.6, 82.0, 82.46, 62.03, 63.24, 42.04, 45.65, 47.41, 43.86, 22.0, 28.28, 2.82, 40.0,
            28.42, 20.0, 18.11, 63.24, 56.63, 44.72, 43.90,
        ],
        y: &[
            118.0, 101.6, 105.1, 82.46, 86.76, 63.90, 70.45, 70.45, 58.0, 43.86, 53.74, 28.28,
            60.72, 40.0, 42.04, 20.0, 78.02, 63.24, 58.03, 44.72,
        ],
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub output: String,
    pub candidate: Polarization,
    pub target: Electron,
    /// 1-based position within the published column.
    pub row: usize,
    pub source_cell: usize,
    pub source_electron: Electron,
    pub computed_nm: f64,
    pub published_nm: f64,
    pub deviation_nm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitizationReport {
    pub design: DesignId,
    pub rows: Vec<AuditRow>,
}

impl DigitizationReport {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation_nm).fold(0.0, f64::max)
    }

    /// Rows whose deviation exceeds `tolerance` nm.
    pub fn outliers(&self, tolerance: f64) -> Vec<&AuditRow> {
        self.rows
            .iter()
            .filter(|r| r.deviation_nm > tolerance)
            .collect()
    }

    pub fn for_output(&self, output: &str, candidate: Polarization) -> Vec<&AuditRow> {
        self.rows
            .iter()
            .filter(|r| r.output == output && r.candidate == candidate)
            .collect()
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "output",
            "candidate",
            "electron",
            "row",
            "source_cell",
            "source_electron",
            "computed_nm",
            "published_nm",
            "deviation_nm",
        ])?;
        for r in &self.rows {
            w.write_record([
                r.output.clone(),
                r.candidate.to_string(),
                r.target.to_string(),
                r.row.to_string(),
                r.source_cell.to_string(),
                r.source_electron.to_string(),
                format!("{:.3}", r.computed_nm),
                format!("{:.3}", r.published_nm),
                format!("{:.3}", r.deviation_nm),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Distances of the recorded network state next to the published ones, for
/// every analysed candidate. `None` for designs without published tables.
pub fn digitization_report(id: DesignId) -> Option<DigitizationReport> {
    let (numbering, tables): (&[(f64, f64)], &[PublishedTable]) = match id {
        DesignId::Xor3V2 => (&XOR_NUMBERING, &XOR_TABLES),
        DesignId::FaV2 => (&ADDER_NUMBERING, &ADDER_TABLES),
        _ => return None,
    };
    let layout = build(id);
    let cell_of = |(x, y): (f64, f64)| {
        layout
            .cells
            .iter()
            .position(|c| c.center == Point::new(x, y))
            .expect("numbered cell present in layout")
    };
    let states = layout.states();

    let mut rows = Vec::new();
    for table in tables {
        let breakdown = output_config_energy(&layout, table.output, table.candidate, &states)
            .expect("recorded network state is complete");
        for (target, published) in [(Electron::X, table.x), (Electron::Y, table.y)] {
            for (k, &published_nm) in published.iter().enumerate() {
                let cell = cell_of(numbering[k / 2]);
                let which = if k % 2 == 0 { Electron::X } else { Electron::Y };
                let computed_nm = breakdown
                    .rows_for(target)
                    .find(|r| r.source.owner == cell && r.source.which == which)
                    .expect("breakdown covers every driver electron")
                    .distance_nm;
                rows.push(AuditRow {
                    output: table.output.to_string(),
                    candidate: table.candidate,
                    target,
                    row: k + 1,
                    source_cell: cell,
                    source_electron: which,
                    computed_nm,
                    published_nm,
                    deviation_nm: (computed_nm - published_nm).abs(),
                });
            }
        }
    }
    Some(DigitizationReport { design: id, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_sizes() {
        assert_eq!(
            digitization_report(DesignId::Xor3V2).unwrap().rows.len(),
            56
        );
        assert_eq!(digitization_report(DesignId::FaV2).unwrap().rows.len(), 160);
        assert!(digitization_report(DesignId::Mv3).is_none());
    }

    #[test]
    fn first_carry_row_is_one_pitch() {
        let r = digitization_report(DesignId::FaV2).unwrap();
        let first = r.for_output("Carry", Polarization::Plus)[0];
        assert!((first.computed_nm - 20.0).abs() < 1e-9);
    }

    #[test]
    fn sum_minus_has_the_short_diagonal() {
        let r = digitization_report(DesignId::FaV2).unwrap();
        let rows = r.for_output("Sum", Polarization::Minus);
        assert!(rows
            .iter()
            .any(|row| (row.published_nm - 2.82).abs() < 1e-9 && row.deviation_nm < 0.2));
    }
}
