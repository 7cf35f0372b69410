//! Reproduction and invariant checks behind `anyon verify`.
//!
//! Each check returns its worst observed violation next to the tolerance it
//! is held to. Randomized checks draw from a seeded ChaCha generator so a run
//! is reproducible.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::encoded::{
    apply_encoded_two_qubit, c_phi_reference, compile_single_qubit, controlled_rotation_form,
    decode_logical, encode_logical, LogicalLayout, SingleQubitSpec,
};
use crate::entangle::{ep_formula, local_invariants, TwoQubitUnitary};
use crate::error::Result;
use crate::fock::{enumerate_basis, verify_deformed_relations, AlgebraConfig, FockVector, OccupationState};
use crate::linalg::{max_abs, phase_invariant_max_diff, CMatrix};
use crate::optics::{
    apply_element, build_element_matrix, evolve_exact, run_circuit, run_circuit_on, sector_unitary,
    Circuit, Engine, OpticalElement,
};
use crate::oracles::{free_fermion_amplitude, from_chain_state, hardcore_boson_unitary, single_particle_matrix, to_chain_state};

pub const DEFAULT_SEED: u64 = 0x5eed_a11e;

/// `quick` runs the algebra and worked-example checks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl std::str::FromStr for Level {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => crate::error::invalid(format!("unknown level {other:?}; expected quick or full")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(id: u8, name: &'static str, max_violation: f64, tolerance: f64, detail: String) -> Self {
        Self { id, name, passed: max_violation < tolerance, max_violation, tolerance, detail }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {:<32} max violation {:.3e} (tol {:.0e})  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.max_violation,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub level: Level,
    pub checks: Vec<Check>,
    /// Discrepancies between tabulated reference forms and the oracle.
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const ALGEBRA_PHIS: [f64; 7] = [0.0, PI / 7.0, FRAC_PI_4, 1.0, FRAC_PI_2, 3.0 * PI / 4.0, PI];

fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random circuit of `len` elements; roughly a third are phase-shifters.
pub fn random_circuit(rng: &mut impl Rng, modes: usize, phi: f64, len: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(modes, phi)?;
    for _ in 0..len {
        let theta = rng.random_range(-PI..PI);
        if modes < 2 || rng.random_bool(0.3) {
            circuit.push(OpticalElement::phase_shifter(rng.random_range(1..=modes), theta))?;
        } else {
            let i = rng.random_range(1..modes);
            let j = rng.random_range(i + 1..=modes);
            circuit.push(OpticalElement::beam_splitter(i, j, theta))?;
        }
    }
    Ok(circuit)
}

/// Haar-random SU(2) from a uniform unit quaternion.
pub fn random_su2(rng: &mut impl Rng) -> CMatrix {
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let (a, b) = ((1.0 - u1).sqrt() * (2.0 * PI * u2).sin(), (1.0 - u1).sqrt() * (2.0 * PI * u2).cos());
    let (cc, d) = (u1.sqrt() * (2.0 * PI * u3).sin(), u1.sqrt() * (2.0 * PI * u3).cos());
    CMatrix::from_row_slice(2, 2, &[c(a, b), c(cc, d), c(-cc, d), c(a, -b)])
}

fn random_state(rng: &mut impl Rng, modes: usize, particles: usize) -> Result<OccupationState> {
    let basis = enumerate_basis(modes, particles)?;
    Ok(basis[rng.random_range(0..basis.len())])
}

/// Deformed relations for every `m <= 5` and each angle in [`ALGEBRA_PHIS`].
pub fn check_algebra() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 1..=5 {
        for phi in ALGEBRA_PHIS {
            let report = verify_deformed_relations(&AlgebraConfig::new(m, phi)?, 1e-12)?;
            worst = worst.max(report.max_violation());
            cases += 1;
        }
    }
    Ok(Check::new(1, "deformed algebra", worst, 1e-12, format!("{cases} (m, φ) cases")))
}

/// `BS_13(π/4)` on `|110⟩` and `|011⟩` against the closed forms, both engines.
pub fn check_worked_example() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let r = FRAC_1_SQRT_2;
    let (s110, s011): (OccupationState, OccupationState) = ("110".parse()?, "011".parse()?);
    let phis = linspace(0.0, PI, 10);
    for &phi in &phis {
        let circuit = Circuit::from_elements(3, phi, [OpticalElement::beam_splitter(1, 3, FRAC_PI_4)])?;
        let want_from_110 = FockVector::from_amplitudes(
            3,
            [(s110, c(r, 0.)), (s011, c(0., -1.) * Complex64::from_polar(r, -phi))],
        )?;
        let want_from_011 = FockVector::from_amplitudes(
            3,
            [(s110, c(0., -1.) * Complex64::from_polar(r, phi)), (s011, c(r, 0.))],
        )?;
        for engine in [Engine::Analytic, Engine::Exact] {
            worst = worst.max(run_circuit(&circuit, &s110, engine)?.max_abs_diff(&want_from_110));
            worst = worst.max(run_circuit(&circuit, &s011, engine)?.max_abs_diff(&want_from_011));
        }
    }
    Ok(Check::new(2, "worked example BS_13(π/4)", worst, 1e-12, format!("{} φ values, both engines", phis.len())))
}

/// Analytic beam-splitter rule against the exponential oracle, 200 draws per `m`.
pub fn check_dual_engine(rng: &mut impl Rng, notes: &mut Vec<String>) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut comparisons = 0usize;
    for m in 2..=6 {
        for _ in 0..200 {
            let i = rng.random_range(1..m);
            let j = rng.random_range(i + 1..=m);
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(0.0..=PI);
            let cfg = AlgebraConfig::new(m, phi)?;
            let e = OpticalElement::beam_splitter(i, j, theta);
            for n in 0..=m {
                let basis = enumerate_basis(m, n)?;
                let h = build_element_matrix(&e, &basis, &cfg)?;
                let u = crate::linalg::expm_hermitian(&h, theta)?;
                for (col, s) in basis.iter().enumerate() {
                    let analytic = apply_element(&FockVector::basis(*s), &e, &cfg)?.to_dense(&basis)?;
                    worst = worst.max(max_abs(&(analytic - u.column(col))));
                    comparisons += 1;
                }
            }
        }
    }
    notes.extend(j_mode_sign_note()?);
    Ok(Check::new(3, "analytic rule vs exponential", worst, 1e-10, format!("{comparisons} basis-state comparisons, m = 2..6")))
}

/// Compares the mode-j Heisenberg solution as tabulated, `cosθ a_j† - i e^{-iα} sinθ a_i† W_j†`,
/// with the oracle on a single particle in mode j (no particles in between, `α = 0`).
fn j_mode_sign_note() -> Result<Vec<String>> {
    let theta = FRAC_PI_4;
    let phi = 1.0;
    let cfg = AlgebraConfig::new(3, phi)?;
    let basis = enumerate_basis(3, 1)?;
    let h = build_element_matrix(&OpticalElement::beam_splitter(1, 3, 0.0), &basis, &cfg)?;
    let ket = FockVector::basis("001".parse()?).to_dense(&basis)?;
    let out = evolve_exact(&h, theta, &ket)?;
    let oracle = out[0];
    let tabulated = c(0., -1.) * theta.sin();
    let consistent_limit = c(0., 1.) * theta.sin();
    let mut notes = vec![format!(
        "beam-splitter mode-j solution: the tabulated form with -i e^{{-iα}} sinθ predicts ⟨100|BS_13(π/4)|001⟩ = {:.6}{:+.6}i, the oracle gives {:.6}{:+.6}i; \
         the oracle matches the α→0 limit +i sinθ and the worked example (+i e^{{+iα}}), so the state rule uses +i sinθ (-1)^L e^{{+iφL}} for j→i hops",
        tabulated.re, tabulated.im, oracle.re, oracle.im
    )];
    if (oracle - consistent_limit).norm() > 1e-12 {
        notes.push("WARNING: oracle disagrees with the α→0 limit of the mode-j solution".into());
    }
    Ok(notes)
}

/// Tabulated `BS_12(θ)` on the 4-mode two-particle basis.
pub fn tabulated_bs12(theta: f64) -> CMatrix {
    let (s, co) = theta.sin_cos();
    let mut m = CMatrix::identity(6, 6);
    for (a, b) in [(1, 3), (2, 4)] {
        m[(a, a)] = c(co, 0.);
        m[(b, b)] = c(co, 0.);
        m[(a, b)] = c(0., s);
        m[(b, a)] = c(0., s);
    }
    m
}

/// Tabulated `BS_23(θ)` on the 4-mode two-particle basis.
pub fn tabulated_bs23(theta: f64) -> CMatrix {
    let (s, co) = theta.sin_cos();
    let mut m = CMatrix::identity(6, 6);
    for (a, b) in [(0, 1), (4, 5)] {
        m[(a, a)] = c(co, 0.);
        m[(b, b)] = c(co, 0.);
        m[(a, b)] = c(0., s);
        m[(b, a)] = c(0., s);
    }
    m
}

/// Tabulated `BS_13(θ)`, with the `e^{∓iφ}` phases on the `|1001⟩ ↔ |0011⟩` block.
pub fn tabulated_bs13(theta: f64, phi: f64) -> CMatrix {
    let (s, co) = theta.sin_cos();
    let mut m = CMatrix::identity(6, 6);
    for k in [0, 2, 3, 5] {
        m[(k, k)] = c(co, 0.);
    }
    m[(0, 3)] = c(0., s);
    m[(3, 0)] = c(0., s);
    m[(2, 5)] = c(0., -s) * Complex64::from_polar(1.0, -phi);
    m[(5, 2)] = c(0., -s) * Complex64::from_polar(1.0, phi);
    m
}

/// `BS_13(θ)` with the phases on `|1100⟩ ↔ |0110⟩`, where mode 2 is occupied.
pub fn corrected_bs13(theta: f64, phi: f64) -> CMatrix {
    let (s, co) = theta.sin_cos();
    let mut m = CMatrix::identity(6, 6);
    for k in [0, 2, 3, 5] {
        m[(k, k)] = c(co, 0.);
    }
    m[(0, 3)] = c(0., -s) * Complex64::from_polar(1.0, phi);
    m[(3, 0)] = c(0., -s) * Complex64::from_polar(1.0, -phi);
    m[(2, 5)] = c(0., s);
    m[(5, 2)] = c(0., s);
    m
}

/// Reference beam-splitter matrices in the 4-mode two-particle basis.
pub fn check_reference_matrices(notes: &mut Vec<String>) -> Result<Check> {
    let labels: Vec<String> = enumerate_basis(4, 2)?.iter().map(|s| s.to_string()).collect();
    let mut worst: f64 = 0.0;
    let mut bs13_entries: Vec<(usize, usize)> = Vec::new();
    let mut bs13_gap: f64 = 0.0;
    let thetas = [0.3, FRAC_PI_4, 1.2, -2.0];
    let phis = [0.0, 0.7, FRAC_PI_2, 2.4, PI];
    for &phi in &phis {
        for &theta in &thetas {
            let oracle = |i, j| -> Result<CMatrix> {
                sector_unitary(&Circuit::from_elements(4, phi, [OpticalElement::beam_splitter(i, j, theta)])?, 2, Engine::Exact)
            };
            worst = worst.max(max_abs(&(oracle(1, 2)? - tabulated_bs12(theta))));
            worst = worst.max(max_abs(&(oracle(2, 3)? - tabulated_bs23(theta))));
            let bs13 = oracle(1, 3)?;
            worst = worst.max(max_abs(&(&bs13 - corrected_bs13(theta, phi))));
            let diff = &bs13 - tabulated_bs13(theta, phi);
            for r in 0..6 {
                for col in 0..6 {
                    let d = diff[(r, col)].norm();
                    if d > 1e-12 {
                        bs13_gap = bs13_gap.max(d);
                        if !bs13_entries.contains(&(r, col)) {
                            bs13_entries.push((r, col));
                        }
                    }
                }
            }
        }
    }
    bs13_entries.sort_unstable();
    let listed: Vec<String> = bs13_entries
        .iter()
        .map(|&(r, col)| format!("⟨{}|·|{}⟩", labels[r], labels[col]))
        .collect();
    notes.push(format!(
        "tabulated BS_13 differs from the oracle at {} entries [{}] (max |Δ| = {:.3e}): the e^{{∓iφ}} phases belong on the |1100⟩↔|0110⟩ block \
         (mode 2 occupied), not on |1001⟩↔|0011⟩; the oracle equals the tabulated matrix with the two blocks' phases exchanged",
        listed.len(),
        listed.join(", "),
        bs13_gap
    ));
    Ok(Check::new(
        4,
        "reference BS_12, BS_23, BS_13",
        worst,
        1e-12,
        format!("BS_12/BS_23 entrywise, BS_13 against the phase-exchanged table; {} tabulated BS_13 entries differ", listed.len()),
    ))
}

/// Encoded form of `C(φ)`, its eigenvectors, and code-space preservation.
pub fn check_encoded_form() -> Result<Check> {
    let layout = LogicalLayout::new(2)?;
    let mut worst: f64 = 0.0;
    let grid = linspace(0.0, PI, 25);
    for &phi in &grid {
        let gate = c_phi_reference(phi);
        worst = worst.max(max_abs(&(&gate.encoded_matrix - controlled_rotation_form(phi))));
        for k in [0usize, 5] {
            let col = gate.two_particle_matrix.column(k);
            let eigenvalue = col[k];
            for r in 0..6 {
                if r != k {
                    worst = worst.max(col[r].norm());
                }
            }
            worst = worst.max((eigenvalue.norm() - 1.0).abs());
        }
        for bits in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let out = apply_encoded_two_qubit(&FockVector::basis(encode_logical(&bits)?), &layout, 1, &gate)?;
            worst = worst.max(decode_logical(&out, &layout)?.leakage);
        }
    }
    Ok(Check::new(5, "encoded C(φ) form", worst, 1e-10, format!("{} φ values", grid.len())))
}

/// `1 - |G1|` of the encoded `C(φ)` against `1 - cos⁴(φ/2)`.
pub fn check_entangling_power() -> Result<Check> {
    let grid = linspace(0.0, PI, 50);
    let mut worst: f64 = 0.0;
    for &phi in &grid {
        let ep = local_invariants(&TwoQubitUnitary::new(c_phi_reference(phi).encoded_matrix)?).ep;
        worst = worst.max((ep - ep_formula(phi)).abs());
    }
    let at_zero = local_invariants(&TwoQubitUnitary::new(c_phi_reference(0.0).encoded_matrix)?).ep;
    let at_pi = local_invariants(&TwoQubitUnitary::new(c_phi_reference(PI).encoded_matrix)?).ep;
    worst = worst.max(at_zero.abs()).max((at_pi - 1.0).abs());
    Ok(Check::new(
        6,
        "entangling power of C(φ)",
        worst,
        1e-9,
        format!("{} φ values; e_p(0) = {at_zero:.3e}, e_p(π) = {at_pi:.12}", grid.len()),
    ))
}

/// Free-fermion determinants at `φ = 0` and the qubit chain at `φ = π`.
pub fn check_endpoints(rng: &mut impl Rng, notes: &mut Vec<String>) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut modulus_worst: f64 = 0.0;
    let mut fermion_amps = 0usize;
    for m in 2..=6 {
        for _ in 0..12 {
            let len = rng.random_range(1..=10);
            let circuit = random_circuit(rng, m, 0.0, len)?;
            let u = single_particle_matrix(&circuit);
            for n in 1..=m.min(3) {
                let basis = enumerate_basis(m, n)?;
                for x in &basis {
                    let out = run_circuit(&circuit, x, Engine::Analytic)?;
                    for y in &basis {
                        let det = free_fermion_amplitude(&u, x, y)?;
                        let fock = out.amplitude(y);
                        worst = worst.max((det - fock).norm());
                        modulus_worst = modulus_worst.max((det.norm_sqr() - fock.norm_sqr()).abs());
                        fermion_amps += 1;
                    }
                }
            }
        }
    }
    let mut chain_states = 0usize;
    for m in 2..=6 {
        for _ in 0..6 {
            let len = rng.random_range(1..=10);
            let circuit = random_circuit(rng, m, PI, len)?;
            let u = hardcore_boson_unitary(&circuit)?;
            for mask in 0..(1u64 << m) {
                let s = OccupationState::from_mask(m, mask);
                let fock = run_circuit(&circuit, &s, Engine::Analytic)?;
                let chain = &u * to_chain_state(&FockVector::basis(s))?;
                worst = worst.max(fock.max_abs_diff(&from_chain_state(m, &chain)?));
                chain_states += 1;
            }
        }
    }
    notes.push(
        "hard-core boson oracle uses H^BS = (X_i X_j + Y_i Y_j)/2; the unscaled X_i X_j + Y_i Y_j would double every beam-splitter angle".into(),
    );
    Ok(Check::new(
        7,
        "endpoint oracles (φ = 0, π)",
        worst,
        1e-9,
        format!("{fermion_amps} determinant amplitudes (|·|² gap {modulus_worst:.1e}), {chain_states} chain evolutions"),
    ))
}

/// Random single-qubit targets compiled to PS/BS and read back through the code.
pub fn check_single_qubit(rng: &mut impl Rng) -> Result<Check> {
    let layout = LogicalLayout::new(1)?;
    let mut worst: f64 = 0.0;
    let logical = |circuit: &Circuit| -> Result<CMatrix> {
        let mut m = CMatrix::zeros(2, 2);
        for b in 0..2u8 {
            let out = run_circuit_on(circuit, &FockVector::basis(encode_logical(&[b])?), Engine::Analytic)?;
            let d = decode_logical(&out, &layout)?;
            m[(0, b as usize)] = d.amplitudes[0];
            m[(1, b as usize)] = d.amplitudes[1];
        }
        Ok(m)
    };
    for _ in 0..100 {
        let target = random_su2(rng);
        let phi = rng.random_range(0.0..=PI);
        let spec = SingleQubitSpec::from_unitary(&target)?;
        let circuit = compile_single_qubit(&spec, 1, &layout, phi)?;
        worst = worst.max(phase_invariant_max_diff(&logical(&circuit)?, &target));
    }
    // generator actions on the pair
    let theta = 0.713;
    let ps = logical(&Circuit::from_elements(2, 1.0, [OpticalElement::phase_shifter(2, theta)])?)?;
    let ps_want = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), Complex64::from_polar(1., theta)]);
    worst = worst.max(max_abs(&(ps - ps_want)));
    let bs = logical(&Circuit::from_elements(2, 1.0, [OpticalElement::beam_splitter(1, 2, theta)])?)?;
    let (s, co) = theta.sin_cos();
    let bs_want = CMatrix::from_row_slice(2, 2, &[c(co, 0.), c(0., s), c(0., s), c(co, 0.)]);
    worst = worst.max(max_abs(&(bs - bs_want)));
    Ok(Check::new(8, "single-qubit compilation", worst, 1e-9, "100 Haar SU(2) targets + PS/BS generators".into()))
}

/// Norm and particle number under random circuits, both engines.
pub fn check_conservation(rng: &mut impl Rng) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut sector_breaks = 0usize;
    for _ in 0..100 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(0..=m);
        let phi = rng.random_range(0.0..=PI);
        let len = rng.random_range(1..=20);
        let circuit = random_circuit(rng, m, phi, len)?;
        let input = random_state(rng, m, n)?;
        for engine in [Engine::Analytic, Engine::Exact] {
            let out = run_circuit(&circuit, &input, engine)?;
            worst = worst.max((out.norm() - 1.0).abs());
            if out.particle_numbers() != vec![n] {
                sector_breaks += 1;
            }
        }
    }
    if sector_breaks > 0 {
        worst = f64::INFINITY;
    }
    Ok(Check::new(9, "unitarity and particle number", worst, 1e-12, format!("100 circuits, {sector_breaks} sector violations")))
}

/// Runs the checks of `level`.
pub fn run(level: Level, seed: u64) -> Result<Report> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();
    let mut checks = vec![check_algebra()?, check_worked_example()?];
    if level == Level::Full {
        checks.push(check_dual_engine(&mut rng, &mut notes)?);
        checks.push(check_reference_matrices(&mut notes)?);
        checks.push(check_encoded_form()?);
        checks.push(check_entangling_power()?);
        checks.push(check_endpoints(&mut rng, &mut notes)?);
        checks.push(check_single_qubit(&mut rng)?);
        checks.push(check_conservation(&mut rng)?);
    }
    Ok(Report { level, checks, notes, elapsed: start.elapsed() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_level_runs_two_checks() {
        let report = run(Level::Quick, 1).unwrap();
        assert_eq!(report.checks.len(), 2);
        assert!(report.passed(), "{:#?}", report.checks);
    }

    #[test]
    fn tabulated_matrices_are_unitary() {
        for m in [tabulated_bs12(0.4), tabulated_bs23(0.4), tabulated_bs13(0.4, 1.0), corrected_bs13(0.4, 1.0)] {
            assert!(crate::linalg::unitarity_error(&m) < 1e-15);
        }
    }

    #[test]
    fn tables_agree_where_the_phase_is_trivial() {
        // at φ = π/2 ... only φ where -ie^{∓iφ} = ±i... never for both blocks, so they always differ
        let diff = max_abs(&(tabulated_bs13(0.5, 0.0) - corrected_bs13(0.5, 0.0)));
        assert!(diff > 0.9);
    }

    #[test]
    fn random_su2_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let u = random_su2(&mut rng);
            assert!(crate::linalg::unitarity_error(&u) < 1e-14);
            assert!((u.determinant() - c(1., 0.)).norm() < 1e-14);
        }
    }

    #[test]
    fn level_parsing() {
        assert_eq!("quick".parse::<Level>().unwrap(), Level::Quick);
        assert!("medium".parse::<Level>().is_err());
    }
}
