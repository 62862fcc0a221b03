use rayon::prelude::*;

use super::{
    bit, interactions, pinned_states, total_layout_energy, PairTable, PolarizationAssignment,
    SolverConfig, SolverError,
};
use crate::electrostatics::TIE_THRESHOLD;
use crate::geometry::Polarization;
use crate::layout::Layout;

/// Search spaces at least this large are split across worker threads.
const PARALLEL_BITS: usize = 16;
const CHUNK_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub assignment: PolarizationAssignment,
    /// Set when the runner-up lies within the tie threshold of the minimum.
    pub tie: bool,
    /// Lowest-energy configuration other than the ground state.
    pub runner_up: Option<PolarizationAssignment>,
}

/// Two lowest `(energy, index)` pairs seen so far.
#[derive(Clone, Copy)]
struct Best {
    first: (f64, u64),
    second: (f64, u64),
}

impl Best {
    const EMPTY: Best = Best {
        first: (f64::INFINITY, u64::MAX),
        second: (f64::INFINITY, u64::MAX),
    };

    fn push(&mut self, e: f64, k: u64) {
        if e < self.first.0 || (e == self.first.0 && k < self.first.1) {
            self.second = self.first;
            self.first = (e, k);
        } else if e < self.second.0 || (e == self.second.0 && k < self.second.1) {
            self.second = (e, k);
        }
    }

    fn merge(mut self, other: Best) -> Best {
        self.push(other.first.0, other.first.1);
        self.push(other.second.0, other.second.1);
        self
    }
}

/// Energy model restricted to the free cells: per-cell fields from pinned
/// neighbours plus free-free couplings. Pinned-pinned terms are constant and
/// left out.
struct Reduced {
    field: Vec<[f64; 2]>,
    couplings: Vec<(usize, usize, PairTable)>,
}

impl Reduced {
    fn energy(&self, k: u64) -> f64 {
        let s = |t: usize| ((k >> t) & 1) as usize;
        let mut e = 0.0;
        for (t, h) in self.field.iter().enumerate() {
            e += h[s(t)];
        }
        for (t, u, table) in &self.couplings {
            e += table[s(*t)][s(*u)];
        }
        e
    }

    fn scan(&self, range: std::ops::Range<u64>) -> Best {
        let mut best = Best::EMPTY;
        for k in range {
            best.push(self.energy(k), k);
        }
        best
    }
}

/// Exact minimum of the total energy over all free-cell sign vectors.
///
/// Configuration `k` sets the `t`-th free cell (in layout order) to `+1`
/// when bit `t` of `k` is set. Among equal energies the lowest `k` wins.
pub fn exhaustive_ground_state(
    layout: &Layout,
    config: &SolverConfig,
) -> Result<GroundState, SolverError> {
    config.check()?;
    let pinned = pinned_states(layout)?;
    let free: Vec<usize> = (0..layout.len()).filter(|&i| pinned[i].is_none()).collect();
    if free.len() > config.max_free_cells_exhaustive {
        return Err(SolverError::Capacity {
            free: free.len(),
            max: config.max_free_cells_exhaustive,
        });
    }
    let mut slot = vec![None; layout.len()];
    for (t, &i) in free.iter().enumerate() {
        slot[i] = Some(t);
    }

    let mut reduced = Reduced {
        field: vec![[0.0; 2]; free.len()],
        couplings: Vec::new(),
    };
    for (i, j, table) in interactions(layout, config.effect_radius)? {
        match (slot[i], slot[j], pinned[i], pinned[j]) {
            (Some(t), Some(u), _, _) => reduced.couplings.push((t, u, table)),
            (Some(t), None, _, Some(pj)) => {
                for (f, row) in reduced.field[t].iter_mut().zip(&table) {
                    *f += row[bit(pj)];
                }
            }
            (None, Some(u), Some(pi), _) => {
                for (f, e) in reduced.field[u].iter_mut().zip(&table[bit(pi)]) {
                    *f += e;
                }
            }
            _ => {}
        }
    }

    let n = free.len();
    let space = 1u64 << n;
    let best = if n >= PARALLEL_BITS {
        let chunk = 1u64 << CHUNK_BITS;
        let parts: Vec<Best> = (0..space / chunk)
            .into_par_iter()
            .map(|c| reduced.scan(c * chunk..(c + 1) * chunk))
            .collect();
        parts.into_iter().fold(Best::EMPTY, Best::merge)
    } else {
        reduced.scan(0..space)
    };

    let decode = |k: u64| -> Result<PolarizationAssignment, SolverError> {
        let mut states: Vec<Polarization> = pinned
            .iter()
            .map(|p| p.unwrap_or(Polarization::Minus))
            .collect();
        for (t, &i) in free.iter().enumerate() {
            states[i] = Polarization::from_bit((k >> t) & 1 == 1);
        }
        let total_energy = total_layout_energy(layout, &states, config)?;
        Ok(PolarizationAssignment {
            states,
            total_energy,
        })
    };

    let runner_up = if best.second.1 == u64::MAX {
        None
    } else {
        Some(decode(best.second.1)?)
    };
    Ok(GroundState {
        assignment: decode(best.first.1)?,
        tie: runner_up.is_some() && best.second.0 - best.first.0 < TIE_THRESHOLD,
        runner_up,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Cell;

    fn wire(n: usize, p: Polarization) -> Layout {
        let mut cells: Vec<Cell> = (0..n).map(|i| Cell::normal(20.0 * i as f64, 0.0)).collect();
        cells[0] = Cell::input(0.0, 0.0, "A").with_polarization(p);
        cells[n - 1] = Cell::output(20.0 * (n - 1) as f64, 0.0, "Y");
        Layout::new("wire", cells)
    }

    #[test]
    fn wire_follows_input() {
        for p in [Polarization::Plus, Polarization::Minus] {
            let g = exhaustive_ground_state(&wire(5, p), &SolverConfig::default()).unwrap();
            assert!(g.assignment.states.iter().all(|&s| s == p));
            assert!(!g.tie);
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let l = Layout::new(
            "blob",
            vec![
                Cell::input(0.0, 0.0, "A").with_polarization(Polarization::Plus),
                Cell::normal(20.0, 20.0),
                Cell::normal(40.0, 0.0),
                Cell::fixed(40.0, 40.0, Polarization::Minus),
                Cell::output(60.0, 20.0, "Y"),
            ],
        );
        let cfg = SolverConfig::default();
        let g = exhaustive_ground_state(&l, &cfg).unwrap();
        let mut best = f64::INFINITY;
        for k in 0..8u32 {
            let s = |b: u32| Polarization::from_bit(k >> b & 1 == 1);
            let states = [Polarization::Plus, s(0), s(1), Polarization::Minus, s(2)];
            best = best.min(total_layout_energy(&l, &states, &cfg).unwrap());
        }
        assert!((g.assignment.total_energy - best).abs() < 1e-30);
    }

    #[test]
    fn isolated_free_cell_is_a_tie() {
        let l = Layout::new(
            "far",
            vec![
                Cell::input(0.0, 0.0, "A").with_polarization(Polarization::Plus),
                Cell::output(500.0, 0.0, "Y"),
            ],
        );
        let cfg = SolverConfig {
            effect_radius: Some(100.0),
            ..SolverConfig::default()
        };
        let g = exhaustive_ground_state(&l, &cfg).unwrap();
        assert!(g.tie);
        assert_eq!(g.assignment.states[1], Polarization::Minus);
    }

    #[test]
    fn capacity_limit() {
        let cfg = SolverConfig {
            max_free_cells_exhaustive: 2,
            ..SolverConfig::default()
        };
        assert_eq!(
            exhaustive_ground_state(&wire(5, Polarization::Plus), &cfg),
            Err(SolverError::Capacity { free: 4, max: 2 })
        );
    }

    #[test]
    fn unassigned_input_rejected() {
        let mut l = wire(3, Polarization::Plus);
        l.cells[0].polarization = None;
        assert_eq!(
            exhaustive_ground_state(&l, &SolverConfig::default()),
            Err(SolverError::UnassignedInput("A".into()))
        );
    }

    #[test]
    fn parallel_search_agrees_with_serial() {
        // 17 free cells forces the chunked path.
        let mut cells = vec![Cell::input(0.0, 0.0, "A").with_polarization(Polarization::Plus)];
        for i in 1..=17 {
            cells.push(Cell::normal(20.0 * i as f64, 0.0));
        }
        cells.last_mut().unwrap().role = crate::layout::Role::Output("Y".into());
        let l = Layout::new("long", cells);
        let g = exhaustive_ground_state(&l, &SolverConfig::default()).unwrap();
        assert!(g.assignment.states.iter().all(|&s| s == Polarization::Plus));
    }
}
