//! Beam-splitter sequence search for a target sector unitary.
//!
//! Candidates are sequences of beam-splitters drawn from an allowed set of
//! mode pairs. Every sequence is first scored on a grid of angles (multiples
//! of `grid_step`), and the best grid points are then refined with
//! Nelder-Mead. The cost is the Frobenius distance to the target minimized
//! over a global phase.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_4;

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fock::{enumerate_basis, AlgebraConfig};
use crate::linalg::{phase_invariant_distance, CMatrix};
use crate::optics::{build_element_matrix, Circuit, OpticalElement};

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub max_len: usize,
    /// Particle sector of the target.
    pub particles: usize,
    pub grid_step: f64,
    /// Grid candidates passed on to refinement.
    pub refine_top: usize,
    pub max_iters: u64,
    /// Residuals below this count as a successful decomposition.
    pub threshold: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_len: 3,
            particles: 2,
            grid_step: FRAC_PI_4,
            refine_top: 12,
            max_iters: 4000,
            threshold: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub circuit: Circuit,
    pub residual: f64,
    pub found: bool,
    /// Number of grid points scored.
    pub grid_evaluations: usize,
}

/// Beam-splitter Hamiltonian of one pair, kept diagonalized so `e^{iθH}` is cheap.
struct PairGenerator {
    pair: (usize, usize),
    vectors: CMatrix,
    values: DVector<f64>,
}

impl PairGenerator {
    fn new(pair: (usize, usize), basis: &[crate::fock::OccupationState], cfg: &AlgebraConfig) -> Result<Self> {
        let h = build_element_matrix(&OpticalElement::beam_splitter(pair.0, pair.1, 0.0), basis, cfg)?;
        let eig = ((&h + h.adjoint()).scale(0.5)).symmetric_eigen();
        Ok(Self { pair, vectors: eig.eigenvectors, values: eig.eigenvalues })
    }

    fn unitary(&self, theta: f64) -> CMatrix {
        let phases = self.values.map(|l| Complex64::from_polar(1.0, theta * l));
        &self.vectors * CMatrix::from_diagonal(&phases) * self.vectors.adjoint()
    }
}

fn sequence_unitary(gens: &[PairGenerator], seq: &[usize], angles: &[f64], dim: usize) -> CMatrix {
    seq.iter()
        .zip(angles)
        .fold(CMatrix::identity(dim, dim), |acc, (&g, &t)| gens[g].unitary(t) * acc)
}

/// Sequences of generator indices of length `len` without immediate repeats
/// (two consecutive beam-splitters on one pair merge into one).
fn sequences(n_gens: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let last = s.last().copied();
                (0..n_gens)
                    .filter(move |&g| last != Some(g))
                    .map(move |g| {
                        let mut next = s.clone();
                        next.push(g);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone)]
struct Candidate {
    residual: f64,
    seq: Vec<usize>,
    angles: Vec<f64>,
}

/// Lowest residual, then shortest sequence, then lexicographic on (pair, angle).
fn rank(a: &Candidate, b: &Candidate) -> Ordering {
    a.residual
        .total_cmp(&b.residual)
        .then(a.seq.len().cmp(&b.seq.len()))
        .then_with(|| a.seq.cmp(&b.seq))
        .then_with(|| {
            a.angles
                .iter()
                .zip(&b.angles)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

struct AngleCost<'a> {
    gens: &'a [PairGenerator],
    seq: &'a [usize],
    target: &'a CMatrix,
}

impl CostFunction for AngleCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, angles: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let u = sequence_unitary(self.gens, self.seq, angles, self.target.nrows());
        Ok(phase_invariant_distance(&u, self.target))
    }
}

fn refine(gens: &[PairGenerator], target: &CMatrix, start: &Candidate, opts: &SearchOptions) -> Result<Candidate> {
    let step = opts.grid_step / 2.0;
    let mut simplex = vec![start.angles.clone()];
    for k in 0..start.angles.len() {
        let mut p = start.angles.clone();
        p[k] += step;
        simplex.push(p);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(|e| Error::Consistency(format!("optimizer setup failed: {e}")))?;
    let problem = AngleCost { gens, seq: &start.seq, target };
    let result = Executor::new(problem, solver)
        .configure(|state| state.max_iters(opts.max_iters))
        .run()
        .map_err(|e| Error::Consistency(format!("optimizer failed: {e}")))?;
    let state = result.state();
    match state.get_best_param() {
        Some(p) if state.get_best_cost() < start.residual => Ok(Candidate {
            residual: state.get_best_cost(),
            seq: start.seq.clone(),
            angles: p.clone(),
        }),
        _ => Ok(start.clone()),
    }
}

/// Searches beam-splitter sequences on `pairs` reproducing `target` up to a
/// global phase. Not finding one is reported through `found`, not an error.
pub fn search_decomposition(
    target: &CMatrix,
    pairs: &[(usize, usize)],
    max_len: usize,
    cfg: &AlgebraConfig,
) -> Result<SearchOutcome> {
    search_decomposition_with(target, pairs, cfg, &SearchOptions { max_len, ..SearchOptions::default() })
}

pub fn search_decomposition_with(
    target: &CMatrix,
    pairs: &[(usize, usize)],
    cfg: &AlgebraConfig,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if opts.max_len == 0 {
        return invalid("max_len must be at least 1");
    }
    if pairs.is_empty() {
        return invalid("no beam-splitter pairs allowed");
    }
    if opts.grid_step.is_nan() || opts.grid_step <= 0.0 {
        return invalid(format!("grid step must be positive, got {}", opts.grid_step));
    }
    let basis = enumerate_basis(cfg.modes(), opts.particles)?;
    let dim = basis.len();
    if target.shape() != (dim, dim) {
        return invalid(format!(
            "target is {:?} but the {}-particle sector of {} modes has dimension {dim}",
            target.shape(),
            opts.particles,
            cfg.modes()
        ));
    }
    for &(i, j) in pairs {
        OpticalElement::beam_splitter(i, j, 0.0).validate(cfg.modes())?;
    }
    let gens = pairs
        .iter()
        .map(|&p| PairGenerator::new(p, &basis, cfg))
        .collect::<Result<Vec<_>>>()?;

    let points = ((2.0 * std::f64::consts::PI / opts.grid_step).round() as usize).max(2);
    let grid: Vec<f64> = (1..points).map(|k| k as f64 * opts.grid_step).collect();
    // precomputed grid unitaries, indexed [generator][angle]
    let table: Vec<Vec<CMatrix>> = gens
        .iter()
        .map(|g| grid.iter().map(|&t| g.unitary(t)).collect())
        .collect();

    let all_seqs: Vec<Vec<usize>> = (1..=opts.max_len).flat_map(|len| sequences(gens.len(), len)).collect();
    let per_seq: Vec<(Vec<Candidate>, usize)> = all_seqs
        .par_iter()
        .map(|seq| {
            let len = seq.len();
            let mut idx = vec![0usize; len];
            let mut best: Vec<Candidate> = Vec::new();
            let mut count = 0usize;
            loop {
                let u = seq
                    .iter()
                    .zip(&idx)
                    .fold(CMatrix::identity(dim, dim), |acc, (&g, &k)| &table[g][k] * acc);
                count += 1;
                let cand = Candidate {
                    residual: phase_invariant_distance(&u, target),
                    seq: seq.clone(),
                    angles: idx.iter().map(|&k| grid[k]).collect(),
                };
                best.push(cand);
                if best.len() > 4 * opts.refine_top.max(1) {
                    best.sort_by(rank);
                    best.truncate(opts.refine_top.max(1));
                }
                // odometer over the angle grid
                let mut pos = 0;
                loop {
                    if pos == len {
                        best.sort_by(rank);
                        best.truncate(opts.refine_top.max(1));
                        return (best, count);
                    }
                    idx[pos] += 1;
                    if idx[pos] < grid.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();

    let grid_evaluations = per_seq.iter().map(|(_, n)| n).sum();
    let mut pool: Vec<Candidate> = per_seq.into_iter().flat_map(|(c, _)| c).collect();
    pool.sort_by(rank);
    pool.truncate(opts.refine_top.max(1));

    let mut refined = pool
        .par_iter()
        .map(|c| refine(&gens, target, c, opts))
        .collect::<Result<Vec<_>>>()?;
    refined.sort_by(rank);
    let top = refined[0].residual;
    // near-ties resolve by length, then element order
    let best = refined
        .iter()
        .filter(|c| c.residual <= top + 1e-12)
        .min_by(|a, b| a.seq.len().cmp(&b.seq.len()).then_with(|| rank(a, b)))
        .cloned()
        .unwrap_or_else(|| refined[0].clone());

    let circuit = Circuit::from_elements(
        cfg.modes(),
        cfg.phi(),
        best.seq
            .iter()
            .zip(&best.angles)
            .map(|(&g, &t)| OpticalElement::beam_splitter(gens[g].pair.0, gens[g].pair.1, t)),
    )?;
    Ok(SearchOutcome {
        circuit,
        residual: best.residual,
        found: best.residual < opts.threshold,
        grid_evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{sector_unitary, Engine};

    const WINDOW_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 3), (1, 3)];

    fn element_unitary(cfg: &AlgebraConfig, elements: &[OpticalElement]) -> CMatrix {
        let c = Circuit::from_elements(cfg.modes(), cfg.phi(), elements.iter().copied()).unwrap();
        sector_unitary(&c, 2, Engine::Exact).unwrap()
    }

    #[test]
    fn recovers_a_single_grid_element() {
        let cfg = AlgebraConfig::new(4, 0.9).unwrap();
        let target = element_unitary(&cfg, &[OpticalElement::beam_splitter(1, 2, FRAC_PI_4)]);
        let out = search_decomposition(&target, &WINDOW_PAIRS, 1, &cfg).unwrap();
        assert!(out.found);
        assert!(out.residual < 1e-10);
        assert_eq!(out.circuit.elements(), &[OpticalElement::beam_splitter(1, 2, FRAC_PI_4)]);
    }

    #[test]
    fn recovers_a_product_of_two_off_grid_elements() {
        let cfg = AlgebraConfig::new(4, 1.7).unwrap();
        let target = element_unitary(
            &cfg,
            &[OpticalElement::beam_splitter(2, 3, 0.3), OpticalElement::beam_splitter(1, 3, 1.1)],
        );
        let out = search_decomposition(&target, &WINDOW_PAIRS, 2, &cfg).unwrap();
        assert!(out.found, "residual {}", out.residual);
        let got = sector_unitary(&out.circuit, 2, Engine::Exact).unwrap();
        assert!(phase_invariant_distance(&got, &target) < 1e-8);
    }

    #[test]
    fn reports_not_found_without_failing() {
        let cfg = AlgebraConfig::new(4, 2.0).unwrap();
        // a diagonal phase on |1010⟩ alone is out of reach of one beam-splitter
        let mut target = CMatrix::identity(6, 6);
        target[(1, 1)] = Complex64::from_polar(1.0, 0.8);
        let out = search_decomposition(&target, &WINDOW_PAIRS, 1, &cfg).unwrap();
        assert!(!out.found);
        assert!(out.residual > 1e-3);
        assert_eq!(out.grid_evaluations, 3 * 7);
    }

    #[test]
    fn argument_validation() {
        let cfg = AlgebraConfig::new(4, 2.0).unwrap();
        let id = CMatrix::identity(6, 6);
        assert!(search_decomposition(&id, &WINDOW_PAIRS, 0, &cfg).is_err());
        assert!(search_decomposition(&id, &[], 1, &cfg).is_err());
        assert!(search_decomposition(&CMatrix::identity(4, 4), &WINDOW_PAIRS, 1, &cfg).is_err());
        assert!(search_decomposition(&id, &[(3, 1)], 1, &cfg).is_err());
    }

    #[test]
    fn sequence_enumeration_skips_repeats() {
        let s = sequences(3, 3);
        assert_eq!(s.len(), 3 * 2 * 2);
        assert!(s.iter().all(|q| q.windows(2).all(|w| w[0] != w[1])));
    }

    #[test]
    fn ranking_prefers_shorter_on_ties() {
        let a = Candidate { residual: 0.1, seq: vec![0, 1], angles: vec![0.0, 0.0] };
        let b = Candidate { residual: 0.1, seq: vec![2], angles: vec![0.0] };
        assert_eq!(rank(&a, &b), Ordering::Greater);
        let c = Candidate { residual: 0.1, seq: vec![1], angles: vec![0.0] };
        assert_eq!(rank(&c, &b), Ordering::Less);
    }
}
