use std::collections::BTreeMap;
use std::io;

use rayon::prelude::*;

use super::{assign_inputs, solve, SolverConfig, SolverError};
use crate::layout::Layout;

#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub inputs: Vec<bool>,
    /// `None` where the output could not be resolved.
    pub outputs: Vec<Option<bool>>,
    pub ground_energy: f64,
    pub converged: bool,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    /// Resolved bits of one output, row by row.
    pub fn column(&self, output: &str) -> Option<Vec<Option<bool>>> {
        let k = self.outputs.iter().position(|o| o == output)?;
        Some(self.rows.iter().map(|r| r.outputs[k]).collect())
    }

    /// True when every row of `output` is resolved and equals `f(inputs)`.
    pub fn realizes(&self, output: &str, f: impl Fn(&[bool]) -> bool) -> bool {
        match self.column(output) {
            Some(col) => col
                .iter()
                .zip(&self.rows)
                .all(|(b, r)| *b == Some(f(&r.inputs))),
            None => false,
        }
    }

    /// Inputs, outputs (`x` when unresolved), `ground_energy_J`,
    /// `converged`, `tie`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self
            .inputs
            .iter()
            .chain(&self.outputs)
            .map(String::as_str)
            .collect();
        header.extend(["ground_energy_J", "converged", "tie"]);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.inputs.iter().map(|b| u8::from(*b).to_string()).collect();
            rec.extend(r.outputs.iter().map(|b| match b {
                Some(b) => u8::from(*b).to_string(),
                None => "x".to_string(),
            }));
            rec.push(format!("{:.6e}", r.ground_energy));
            rec.push(r.converged.to_string());
            rec.push(r.tie.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves the layout for every input vector. Inputs are ordered by label and
/// the first label is the most significant bit.
pub fn truth_table(layout: &Layout, config: &SolverConfig) -> Result<TruthTable, SolverError> {
    config.check()?;
    let inputs = layout.input_labels();
    let outputs = layout.output_labels();
    let k = inputs.len();
    if k > 16 {
        return Err(SolverError::TooManyInputs(k));
    }
    let output_cells: Vec<usize> = outputs
        .iter()
        .filter_map(|o| layout.find_output(o))
        .collect();

    let rows: Result<Vec<TruthRow>, SolverError> = (0..1u32 << k)
        .into_par_iter()
        .map(|v| {
            let bits: Vec<bool> = (0..k).map(|i| v >> (k - 1 - i) & 1 == 1).collect();
            let map: BTreeMap<String, bool> =
                inputs.iter().cloned().zip(bits.iter().copied()).collect();
            let pinned = assign_inputs(layout, &map)?;
            let s = solve(&pinned, config)?;
            let outputs = output_cells
                .iter()
                .map(|&c| (!s.ambiguous.contains(&c)).then(|| s.assignment.get(c).bit()))
                .collect();
            Ok(TruthRow {
                inputs: bits,
                outputs,
                ground_energy: s.assignment.total_energy,
                converged: s.converged,
                tie: s.tie,
            })
        })
        .collect();
    Ok(TruthTable {
        inputs,
        outputs,
        rows: rows?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polarization;
    use crate::layout::Cell;

    #[test]
    fn wire_table() {
        let l = Layout::new(
            "w",
            vec![
                Cell::input(0.0, 0.0, "A"),
                Cell::normal(20.0, 0.0),
                Cell::output(40.0, 0.0, "Y"),
            ],
        );
        let t = truth_table(&l, &SolverConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.realizes("Y", |i| i[0]));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("A,Y,ground_energy_J,converged,tie\n0,0,"));
    }

    #[test]
    fn rows_ascend_with_first_label_most_significant() {
        let l = Layout::new(
            "two",
            vec![
                Cell::input(0.0, 0.0, "B"),
                Cell::input(0.0, 40.0, "A"),
                Cell::output(20.0, 20.0, "Y"),
                Cell::fixed(40.0, 20.0, Polarization::Plus),
            ],
        );
        let t = truth_table(&l, &SolverConfig::default()).unwrap();
        assert_eq!(t.inputs, vec!["A", "B"]);
        let vs: Vec<Vec<bool>> = t.rows.iter().map(|r| r.inputs.clone()).collect();
        assert_eq!(
            vs,
            vec![
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true]
            ]
        );
    }
}
