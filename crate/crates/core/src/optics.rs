//! Phase-shifters and beam-splitters acting on anyonic Fock states.
//!
//! Two engines are provided. The analytic engine applies each element through
//! a per-basis-state rule. The exact engine builds the element Hamiltonian in
//! the particle sector from the ladder operators and exponentiates it. The
//! two must agree; that agreement is what pins the phase conventions of the
//! non-adjacent beam-splitter.
//!
//! For `BS_ij(θ)` with `i < j` and `L` particles strictly between the modes,
//! the pair `(|…1_i…0_j…⟩, |…0_i…1_j…⟩)` transforms by the unitary block
//!
//! ```text
//! [ cosθ                      i sinθ (-1)^L e^{+iφL} ]
//! [ i sinθ (-1)^L e^{-iφL}    cosθ                   ]
//! ```
//!
//! while `(0,0)` and `(1,1)` occupations of the pair are left unchanged.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fock::{
    apply_annihilation, apply_creation, check_mode, enumerate_basis, string_phase, AlgebraConfig,
    FockVector, OccupationState,
};
use crate::linalg::{expm_hermitian, CMatrix, CVector};

/// A passive linear-optical element. Mode indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    /// `PS_i(θ) = exp(iθ N_i)`
    PhaseShifter { mode: usize, theta: f64 },
    /// `BS_ij(θ) = exp(iθ (a_i† a_j + a_j† a_i))` with `i < j`
    BeamSplitter { i: usize, j: usize, theta: f64 },
}

impl OpticalElement {
    pub fn phase_shifter(mode: usize, theta: f64) -> Self {
        OpticalElement::PhaseShifter { mode, theta }
    }

    pub fn beam_splitter(i: usize, j: usize, theta: f64) -> Self {
        OpticalElement::BeamSplitter { i, j, theta }
    }

    pub fn theta(&self) -> f64 {
        match *self {
            OpticalElement::PhaseShifter { theta, .. } | OpticalElement::BeamSplitter { theta, .. } => theta,
        }
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        match *self {
            OpticalElement::PhaseShifter { mode, .. } => OpticalElement::PhaseShifter { mode, theta },
            OpticalElement::BeamSplitter { i, j, .. } => OpticalElement::BeamSplitter { i, j, theta },
        }
    }

    /// Checks the mode indices against a register of `modes` modes.
    pub fn validate(&self, modes: usize) -> Result<()> {
        match *self {
            OpticalElement::PhaseShifter { mode, .. } => check_mode(modes, mode),
            OpticalElement::BeamSplitter { i, j, .. } => {
                check_mode(modes, i)?;
                check_mode(modes, j)?;
                if i >= j {
                    return invalid(format!("beam-splitter modes must satisfy i < j, got ({i}, {j})"));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalElement::PhaseShifter { mode, theta } => write!(f, "PS_{mode}({theta})"),
            OpticalElement::BeamSplitter { i, j, theta } => write!(f, "BS_{i},{j}({theta})"),
        }
    }
}

/// An ordered list of elements on `modes` modes for a fixed statistical angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    config: AlgebraConfig,
    elements: Vec<OpticalElement>,
}

impl Circuit {
    pub fn new(modes: usize, phi: f64) -> Result<Self> {
        Ok(Self { config: AlgebraConfig::new(modes, phi)?, elements: Vec::new() })
    }

    pub fn from_elements(
        modes: usize,
        phi: f64,
        elements: impl IntoIterator<Item = OpticalElement>,
    ) -> Result<Self> {
        let mut c = Self::new(modes, phi)?;
        for e in elements {
            c.push(e)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, e: OpticalElement) -> Result<&mut Self> {
        e.validate(self.config.modes())?;
        self.elements.push(e);
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.config.modes()
    }

    pub fn phi(&self) -> f64 {
        self.config.phi()
    }

    pub fn config(&self) -> &AlgebraConfig {
        &self.config
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Same elements under a different statistical angle.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Ok(Self { config: AlgebraConfig::new(self.modes(), phi)?, elements: self.elements.clone() })
    }
}

/// `W_i = 1 - (1 - e^{iφ}) N_i` evaluated on occupation `n_i`.
pub fn w_factor(phi: f64, occupied: bool) -> Complex64 {
    if occupied {
        Complex64::from_polar(1.0, phi)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// The 2×2 beam-splitter block on `(|1_i 0_j⟩, |0_i 1_j⟩)` for `between`
/// particles strictly between the two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterBlock {
    pub between: u32,
    pub theta: f64,
    pub phi: f64,
}

impl BeamSplitterBlock {
    pub fn new(between: u32, theta: f64, phi: f64) -> Self {
        Self { between, theta, phi }
    }

    /// Aharonov-Bohm phase `α = 2φL` of the effective beam-splitter.
    pub fn effective_phase(&self) -> f64 {
        2.0 * self.phi * f64::from(self.between)
    }

    /// Row-major block; column 0 is the image of `|1_i 0_j⟩`.
    pub fn coefficients(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let cos = Complex64::new(c, 0.0);
        let isin = Complex64::new(0.0, s);
        // i→j hop picks up (-e^{-iφ})^L, j→i hop its conjugate
        let forward = isin * string_phase(self.between, self.phi, -1.0);
        let backward = isin * string_phase(self.between, self.phi, 1.0);
        [[cos, backward], [forward, cos]]
    }

    pub fn matrix(&self) -> CMatrix {
        let k = self.coefficients();
        CMatrix::from_row_slice(2, 2, &[k[0][0], k[0][1], k[1][0], k[1][1]])
    }
}

/// Multiplies each amplitude by `e^{iθ n_i}`.
pub fn apply_phase_shifter(v: &FockVector, i: usize, theta: f64) -> Result<FockVector> {
    check_mode(v.modes(), i)?;
    let phase = Complex64::from_polar(1.0, theta);
    let mut out = FockVector::zero(v.modes());
    for (s, a) in v.iter() {
        out.add_mask(s.mask(), if s.occupied(i) { a * phase } else { a });
    }
    out.prune();
    Ok(out)
}

/// Applies `BS_ij(θ)` through the per-state block rule.
pub fn apply_beam_splitter(
    v: &FockVector,
    i: usize,
    j: usize,
    theta: f64,
    cfg: &AlgebraConfig,
) -> Result<FockVector> {
    if v.modes() != cfg.modes() {
        return invalid(format!(
            "vector has {} modes but the algebra is configured for {}",
            v.modes(),
            cfg.modes()
        ));
    }
    OpticalElement::beam_splitter(i, j, theta).validate(cfg.modes())?;
    let mut out = FockVector::zero(v.modes());
    for (s, a) in v.iter() {
        match (s.occupied(i), s.occupied(j)) {
            (true, false) => {
                let k = BeamSplitterBlock::new(s.particles_between(i, j), theta, cfg.phi()).coefficients();
                out.add_mask(s.mask(), a * k[0][0]);
                out.add_mask(s.with(i, false).with(j, true).mask(), a * k[1][0]);
            }
            (false, true) => {
                let k = BeamSplitterBlock::new(s.particles_between(i, j), theta, cfg.phi()).coefficients();
                out.add_mask(s.mask(), a * k[1][1]);
                out.add_mask(s.with(j, false).with(i, true).mask(), a * k[0][1]);
            }
            _ => out.add_mask(s.mask(), a),
        }
    }
    out.prune();
    Ok(out)
}

/// Applies one element with the analytic rule.
pub fn apply_element(v: &FockVector, e: &OpticalElement, cfg: &AlgebraConfig) -> Result<FockVector> {
    match *e {
        OpticalElement::PhaseShifter { mode, theta } => apply_phase_shifter(v, mode, theta),
        OpticalElement::BeamSplitter { i, j, theta } => apply_beam_splitter(v, i, j, theta, cfg),
    }
}

/// Hamiltonian of `e` restricted to the sector spanned by `basis`, assembled
/// from the ladder operators: `H^PS_i = a_i† a_i`, `H^BS_ij = a_i† a_j + a_j† a_i`.
pub fn build_element_matrix(
    e: &OpticalElement,
    basis: &[OccupationState],
    cfg: &AlgebraConfig,
) -> Result<CMatrix> {
    e.validate(cfg.modes())?;
    if let Some(s) = basis.iter().find(|s| s.modes() != cfg.modes()) {
        return invalid(format!("basis state {s} does not have {} modes", cfg.modes()));
    }
    let hop = |v: &FockVector, to: usize, from: usize| -> Result<FockVector> {
        apply_creation(&apply_annihilation(v, from, cfg)?, to, cfg)
    };
    let dim = basis.len();
    let mut h = CMatrix::zeros(dim, dim);
    for (col, s) in basis.iter().enumerate() {
        let ket = FockVector::basis(*s);
        let image = match *e {
            OpticalElement::PhaseShifter { mode, .. } => hop(&ket, mode, mode)?,
            OpticalElement::BeamSplitter { i, j, .. } => {
                let mut sum = hop(&ket, i, j)?;
                for (t, a) in hop(&ket, j, i)?.iter() {
                    sum.add(t, a)?;
                }
                sum
            }
        };
        h.set_column(col, &image.to_dense(basis)?);
    }
    Ok(h)
}

/// `e^{iθH} v` by eigendecomposition of `H`.
pub fn evolve_exact(h: &CMatrix, theta: f64, v: &CVector) -> Result<CVector> {
    if h.nrows() != v.len() {
        return invalid(format!("matrix of size {} applied to vector of length {}", h.nrows(), v.len()));
    }
    Ok(expm_hermitian(h, theta)? * v)
}

/// Selects how [`run_circuit`] applies elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Per-basis-state block rule.
    Analytic,
    /// Sector Hamiltonian exponentiated by eigendecomposition.
    Exact,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Exact => "exact",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "exact" => Ok(Engine::Exact),
            other => invalid(format!("unknown engine {other:?}; expected analytic or exact")),
        }
    }
}

/// Runs `c` on a single input basis state.
pub fn run_circuit(c: &Circuit, input: &OccupationState, engine: Engine) -> Result<FockVector> {
    if input.modes() != c.modes() {
        return invalid(format!(
            "input state has {} modes but the circuit has {}",
            input.modes(),
            c.modes()
        ));
    }
    run_circuit_on(c, &FockVector::basis(*input), engine)
}

/// Runs `c` on an arbitrary vector, sector by sector for the exact engine.
pub fn run_circuit_on(c: &Circuit, v: &FockVector, engine: Engine) -> Result<FockVector> {
    if v.modes() != c.modes() {
        return invalid(format!("vector has {} modes but the circuit has {}", v.modes(), c.modes()));
    }
    match engine {
        Engine::Analytic => c
            .elements()
            .iter()
            .try_fold(v.clone(), |acc, e| apply_element(&acc, e, c.config())),
        Engine::Exact => {
            let mut sectors: BTreeMap<usize, Vec<(OccupationState, Complex64)>> = BTreeMap::new();
            for (s, a) in v.iter() {
                sectors.entry(s.particles()).or_default().push((s, a));
            }
            let mut out = FockVector::zero(c.modes());
            for (n, terms) in sectors {
                let basis = enumerate_basis(c.modes(), n)?;
                let mut state = FockVector::from_amplitudes(c.modes(), terms)?.to_dense(&basis)?;
                for e in c.elements() {
                    let h = build_element_matrix(e, &basis, c.config())?;
                    state = evolve_exact(&h, e.theta(), &state)?;
                }
                for (s, a) in basis.iter().zip(state.iter()) {
                    out.add(*s, *a)?;
                }
            }
            out.prune();
            Ok(out)
        }
    }
}

/// Matrix of the whole circuit on the `n`-particle sector, in [`enumerate_basis`] order.
pub fn sector_unitary(c: &Circuit, n: usize, engine: Engine) -> Result<CMatrix> {
    let basis = enumerate_basis(c.modes(), n)?;
    let dim = basis.len();
    match engine {
        Engine::Analytic => {
            let mut u = CMatrix::zeros(dim, dim);
            for (col, s) in basis.iter().enumerate() {
                let out = run_circuit(c, s, Engine::Analytic)?;
                u.set_column(col, &out.to_dense(&basis)?);
            }
            Ok(u)
        }
        Engine::Exact => c.elements().iter().try_fold(CMatrix::identity(dim, dim), |acc, e| {
            let h = build_element_matrix(e, &basis, c.config())?;
            Ok(expm_hermitian(&h, e.theta())? * acc)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_error, max_abs, unitarity_error};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn st(s: &str) -> OccupationState {
        s.parse().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phase_shifter_on_dual_rail_states() {
        let theta = 0.37;
        let out = apply_phase_shifter(&FockVector::basis(st("10")), 2, theta).unwrap();
        assert_eq!(out, FockVector::basis(st("10")));
        let out = apply_phase_shifter(&FockVector::basis(st("01")), 2, theta).unwrap();
        assert_abs_diff_eq!((out.amplitude(&st("01")) - Complex64::from_polar(1.0, theta)).norm(), 0.0, epsilon = 1e-15);
        let v = FockVector::from_amplitudes(2, [(st("10"), c(0.6, 0.)), (st("01"), c(0., 0.8))]).unwrap();
        assert_eq!(apply_phase_shifter(&v, 1, 0.0).unwrap(), v);
        assert!(apply_phase_shifter(&v, 3, 0.1).is_err());
    }

    #[test]
    fn worked_example_both_columns() {
        for phi in [0.0, 0.4, 1.0, 2.5, PI] {
            let cfg = AlgebraConfig::new(3, phi).unwrap();
            let out = apply_beam_splitter(&FockVector::basis(st("110")), 1, 3, FRAC_PI_4, &cfg).unwrap();
            let want_110 = c(FRAC_1_SQRT_2, 0.);
            let want_011 = c(0., -1.) * Complex64::from_polar(FRAC_1_SQRT_2, -phi);
            assert!((out.amplitude(&st("110")) - want_110).norm() < 1e-15);
            assert!((out.amplitude(&st("011")) - want_011).norm() < 1e-15);

            let out = apply_beam_splitter(&FockVector::basis(st("011")), 1, 3, FRAC_PI_4, &cfg).unwrap();
            let want_110 = c(0., -1.) * Complex64::from_polar(FRAC_1_SQRT_2, phi);
            assert!((out.amplitude(&st("110")) - want_110).norm() < 1e-15);
            assert!((out.amplitude(&st("011")) - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-15);
        }
    }

    #[test]
    fn doubly_occupied_pair_is_unchanged() {
        let cfg = AlgebraConfig::new(4, 0.9).unwrap();
        let out = apply_beam_splitter(&FockVector::basis(st("1100")), 1, 2, 0.77, &cfg).unwrap();
        assert_eq!(out, FockVector::basis(st("1100")));
    }

    #[test]
    fn beam_splitter_argument_errors() {
        let cfg = AlgebraConfig::new(3, 0.9).unwrap();
        let v = FockVector::basis(st("100"));
        assert!(apply_beam_splitter(&v, 2, 1, 0.1, &cfg).is_err());
        assert!(apply_beam_splitter(&v, 2, 2, 0.1, &cfg).is_err());
        assert!(apply_beam_splitter(&v, 1, 4, 0.1, &cfg).is_err());
    }

    #[test]
    fn block_is_unitary_and_reduces_at_zero_between() {
        for l in 0..5 {
            for (theta, phi) in [(0.3, 0.0), (1.2, 0.7), (-2.0, PI), (4.0, 2.2)] {
                let b = BeamSplitterBlock::new(l, theta, phi);
                assert!(unitarity_error(&b.matrix()) < 1e-15);
            }
        }
        let b = BeamSplitterBlock::new(0, 0.5, 1.9).matrix();
        let (s, co) = 0.5f64.sin_cos();
        let want = CMatrix::from_row_slice(2, 2, &[c(co, 0.), c(0., s), c(0., s), c(co, 0.)]);
        assert!(max_abs(&(b - want)) < 1e-16);
    }

    #[test]
    fn element_hamiltonians() {
        let cfg = AlgebraConfig::new(2, 0.6).unwrap();
        let basis = enumerate_basis(2, 1).unwrap();
        let h = build_element_matrix(&OpticalElement::beam_splitter(1, 2, 0.0), &basis, &cfg).unwrap();
        assert_eq!(h[(0, 0)], c(0., 0.));
        assert_eq!(h[(1, 1)], c(0., 0.));
        assert_abs_diff_eq!(h[(0, 1)].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!((h[(0, 1)] - h[(1, 0)].conj()).norm(), 0.0, epsilon = 1e-15);

        let cfg3 = AlgebraConfig::new(3, 1.1).unwrap();
        let basis = enumerate_basis(3, 2).unwrap();
        let h = build_element_matrix(&OpticalElement::beam_splitter(1, 3, 0.0), &basis, &cfg3).unwrap();
        assert!(hermiticity_error(&h) < 1e-14);
        assert!((0..3).all(|k| h[(k, k)].norm() < 1e-15));

        let h = build_element_matrix(&OpticalElement::phase_shifter(2, 0.0), &basis, &cfg3).unwrap();
        for (k, s) in basis.iter().enumerate() {
            assert_eq!(h[(k, k)], c(if s.occupied(2) { 1. } else { 0. }, 0.));
        }
    }

    #[test]
    fn exact_evolution_examples() {
        let cfg = AlgebraConfig::new(2, 0.3).unwrap();
        let basis = enumerate_basis(2, 1).unwrap();
        let h = build_element_matrix(&OpticalElement::beam_splitter(1, 2, 0.0), &basis, &cfg).unwrap();
        let ket10 = FockVector::basis(st("10")).to_dense(&basis).unwrap();
        assert_eq!(evolve_exact(&h, 0.0, &ket10).unwrap(), ket10);
        let out = evolve_exact(&h, FRAC_PI_2, &ket10).unwrap();
        assert!((out[0]).norm() < 1e-15);
        assert!((out[1] - c(0., 1.)).norm() < 1e-15);
    }

    #[test]
    fn engines_agree_on_four_mode_sector() {
        let cfg = AlgebraConfig::new(4, 1.3).unwrap();
        let basis = enumerate_basis(4, 2).unwrap();
        for (i, j) in [(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)] {
            let e = OpticalElement::beam_splitter(i, j, 0.81);
            let h = build_element_matrix(&e, &basis, &cfg).unwrap();
            for s in &basis {
                let ket = FockVector::basis(*s);
                let analytic = apply_element(&ket, &e, &cfg).unwrap().to_dense(&basis).unwrap();
                let exact = evolve_exact(&h, 0.81, &ket.to_dense(&basis).unwrap()).unwrap();
                assert!(crate::linalg::max_abs(&(analytic - exact)) < 1e-12, "BS_{i}{j} on {s}");
            }
        }
    }

    #[test]
    fn run_circuit_examples() {
        let c0 = Circuit::new(3, 0.5).unwrap();
        assert_eq!(run_circuit(&c0, &st("101"), Engine::Analytic).unwrap(), FockVector::basis(st("101")));
        assert_eq!(run_circuit(&c0, &st("101"), Engine::Exact).unwrap(), FockVector::basis(st("101")));

        let circ = Circuit::from_elements(3, FRAC_PI_2, [OpticalElement::beam_splitter(1, 3, FRAC_PI_4)]).unwrap();
        for engine in [Engine::Analytic, Engine::Exact] {
            let out = run_circuit(&circ, &st("110"), engine).unwrap();
            assert!((out.amplitude(&st("110")) - c(FRAC_1_SQRT_2, 0.)).norm() < 1e-12);
            assert!((out.amplitude(&st("011")) - c(-FRAC_1_SQRT_2, 0.)).norm() < 1e-12);
        }
        assert!(run_circuit(&circ, &st("1100"), Engine::Analytic).is_err());
    }

    #[test]
    fn circuit_rejects_bad_elements() {
        let mut circ = Circuit::new(3, 0.5).unwrap();
        assert!(circ.push(OpticalElement::beam_splitter(3, 1, 0.2)).is_err());
        assert!(circ.push(OpticalElement::phase_shifter(4, 0.2)).is_err());
        assert!(circ.push(OpticalElement::phase_shifter(3, 0.2)).is_ok());
        assert_eq!(circ.len(), 1);
    }

    #[test]
    fn sector_unitaries_agree() {
        let circ = Circuit::from_elements(
            4,
            2.0,
            [
                OpticalElement::beam_splitter(1, 3, 0.4),
                OpticalElement::phase_shifter(2, 1.1),
                OpticalElement::beam_splitter(2, 4, -0.9),
                OpticalElement::beam_splitter(1, 4, 2.3),
            ],
        )
        .unwrap();
        for n in 0..=4 {
            let a = sector_unitary(&circ, n, Engine::Analytic).unwrap();
            let e = sector_unitary(&circ, n, Engine::Exact).unwrap();
            assert!(max_abs(&(&a - e)) < 1e-12);
            assert!(unitarity_error(&a) < 1e-12);
        }
    }

    #[test]
    fn engine_parsing() {
        assert_eq!("exact".parse::<Engine>().unwrap(), Engine::Exact);
        assert!("fast".parse::<Engine>().is_err());
    }
}
