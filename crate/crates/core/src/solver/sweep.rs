use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    bit, from_index, interactions, pinned_states, total_layout_energy, PairTable,
    PolarizationAssignment, SolverConfig, SolverError,
};
use crate::electrostatics::TIE_THRESHOLD;
use crate::geometry::Polarization;
use crate::layout::Layout;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub assignment: PolarizationAssignment,
    pub converged: bool,
    pub passes: usize,
}

/// Clock-ordered local relaxation.
///
/// Free cells start at `-1`. Each pass visits zones 0 to 3 and, within a
/// zone, the free cells in an order shuffled from `config.seed`; every
/// visited cell takes the sign with the lower interaction energy against the
/// current state. The first pass latches cells: a free cell exerts no field
/// until it has been visited, and cells are visited as a wavefront growing
/// from the pinned cells, so signals spread outward from the drivers.
/// Relaxation stops after a pass with at most
/// `sweep_tolerance` flips, or after `max_sweeps` passes.
pub fn sweep_relax(layout: &Layout, config: &SolverConfig) -> Result<SweepOutcome, SolverError> {
    config.check()?;
    let pinned = pinned_states(layout)?;
    let n = layout.len();

    let mut neighbours: Vec<Vec<(usize, PairTable)>> = vec![Vec::new(); n];
    for (i, j, t) in interactions(layout, config.effect_radius)? {
        neighbours[i].push((j, t));
        let mut flipped = [[0.0; 2]; 2];
        for (a, row) in flipped.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = t[b][a];
            }
        }
        neighbours[j].push((i, flipped));
    }

    let mut zones: [Vec<usize>; 4] = Default::default();
    for (i, c) in layout.cells.iter().enumerate() {
        if pinned[i].is_none() {
            zones[c.zone.index() as usize].push(i);
        }
    }

    let mut state: Vec<Polarization> = pinned
        .iter()
        .map(|p| p.unwrap_or(Polarization::Minus))
        .collect();
    let mut active: Vec<bool> = pinned.iter().map(Option::is_some).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut converged = false;
    let mut passes = 0;

    // Orthogonal and diagonal neighbours by centre distance.
    let pitch = layout.geometry.pitch;
    let within = |limit: f64| -> Vec<Vec<usize>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| {
                        j != i
                            && layout.cells[i].center.distance(layout.cells[j].center)
                                <= limit + 1e-6
                    })
                    .collect()
            })
            .collect()
    };
    let tiers = [within(pitch), within(pitch * std::f64::consts::SQRT_2)];

    let settle = |i: usize, state: &mut Vec<Polarization>, active: &[bool]| -> bool {
        let mut e = [0.0; 2];
        for (j, t) in &neighbours[i] {
            if active[*j] {
                let sj = bit(state[*j]);
                e[0] += t[0][sj];
                e[1] += t[1][sj];
            }
        }
        let next = if (e[1] - e[0]).abs() < TIE_THRESHOLD {
            state[i]
        } else {
            from_index(usize::from(e[1] < e[0]))
        };
        let flipped = next != state[i];
        state[i] = next;
        flipped
    };

    while passes < config.max_sweeps {
        passes += 1;
        let mut flips = 0;
        for zone in &zones {
            let mut order = zone.clone();
            order.shuffle(&mut rng);
            if passes > 1 {
                for i in order {
                    flips += usize::from(settle(i, &mut state, &active));
                }
                continue;
            }
            // Latching: cells with a settled orthogonal neighbour go first,
            // in shuffled order. When none is left, the first cell with a
            // settled diagonal neighbour (or failing that, the first cell)
            // settles alone and orthogonal growth resumes.
            while !order.is_empty() {
                let before = order.len();
                order.retain(|&i| {
                    if tiers[0][i].iter().any(|&j| active[j]) {
                        flips += usize::from(settle(i, &mut state, &active));
                        active[i] = true;
                        false
                    } else {
                        true
                    }
                });
                if order.len() == before {
                    let k = order
                        .iter()
                        .position(|&i| tiers[1][i].iter().any(|&j| active[j]))
                        .unwrap_or(0);
                    let i = order.remove(k);
                    flips += usize::from(settle(i, &mut state, &active));
                    active[i] = true;
                }
            }
        }
        if passes > 1 && flips <= config.sweep_tolerance {
            converged = true;
            break;
        }
    }

    let total_energy = total_layout_energy(layout, &state, config)?;
    Ok(SweepOutcome {
        assignment: PolarizationAssignment {
            states: state,
            total_energy,
        },
        converged,
        passes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::Cell;
    use crate::solver::exhaustive_ground_state;

    fn wire(n: usize, p: Polarization) -> Layout {
        let mut cells: Vec<Cell> = (0..n).map(|i| Cell::normal(20.0 * i as f64, 0.0)).collect();
        cells[0] = Cell::input(0.0, 0.0, "A").with_polarization(p);
        cells[n - 1] = Cell::output(20.0 * (n - 1) as f64, 0.0, "Y");
        Layout::new("wire", cells)
    }

    #[test]
    fn wire_converges_quickly() {
        for seed in 0..20 {
            for p in [Polarization::Plus, Polarization::Minus] {
                let cfg = SolverConfig {
                    seed,
                    ..SolverConfig::default()
                };
                let s = sweep_relax(&wire(5, p), &cfg).unwrap();
                assert!(s.converged);
                assert!(s.passes <= 2, "seed {seed}: {} passes", s.passes);
                assert!(s.assignment.states.iter().all(|&q| q == p));
            }
        }
    }

    #[test]
    fn never_below_ground_state() {
        let l = wire(6, Polarization::Plus);
        let cfg = SolverConfig::default();
        let s = sweep_relax(&l, &cfg).unwrap();
        let g = exhaustive_ground_state(&l, &cfg).unwrap();
        assert!(s.assignment.total_energy >= g.assignment.total_energy - 1e-30);
    }

    #[test]
    fn deterministic_for_a_seed() {
        let l = wire(7, Polarization::Minus);
        let cfg = SolverConfig {
            seed: 42,
            ..SolverConfig::default()
        };
        assert_eq!(
            sweep_relax(&l, &cfg).unwrap(),
            sweep_relax(&l, &cfg).unwrap()
        );
    }

    #[test]
    fn pass_budget_respected() {
        let cfg = SolverConfig {
            max_sweeps: 1,
            ..SolverConfig::default()
        };
        let s = sweep_relax(&wire(5, Polarization::Plus), &cfg).unwrap();
        assert_eq!(s.passes, 1);
        assert!(!s.converged);
    }
}
