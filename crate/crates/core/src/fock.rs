//! Occupation-number basis and the deformed ladder operators.
//!
//! A basis state `|n_1, ..., n_m⟩` stands for `(a_1†)^{n_1} ··· (a_m†)^{n_m} |0⟩`
//! with creation operators applied in increasing mode order. Modes are
//! 1-based throughout. Internally the occupations are packed into a `u64`
//! with mode 1 in the most significant used bit, so the integer value of a
//! state is its bitstring read left to right.
//!
//! The anyonic operators are obtained from fermionic ones through the
//! generalized Jordan-Wigner string `exp(iφ Σ_{k<i} N_k)`. On a basis state
//! with `L` occupied modes below `i` this gives
//!
//! * `a_i† : n_i = 0 -> 1` with phase `(-e^{-iφ})^L`
//! * `a_i  : n_i = 1 -> 0` with phase `(-e^{+iφ})^L`

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Largest mode count representable by [`OccupationState`].
pub const MAX_MODES: usize = 64;

/// Amplitudes with modulus below this are dropped after each operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Largest `m` for which [`verify_deformed_relations`] builds operator matrices.
pub const MAX_RELATION_MODES: usize = 8;

/// Mode count and statistical angle of the deformed algebra.
///
/// `phi = 0` gives canonical fermions, `phi = π` hard-core bosons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraConfig {
    modes: usize,
    phi: f64,
}

impl AlgebraConfig {
    pub fn new(modes: usize, phi: f64) -> Result<Self> {
        if modes == 0 || modes > MAX_MODES {
            return invalid(format!("mode count must be in 1..={MAX_MODES}, got {modes}"));
        }
        if !(0.0..=PI).contains(&phi) {
            return invalid(format!("statistical angle must lie in [0, π], got {phi}"));
        }
        Ok(Self { modes, phi })
    }

    pub fn fermions(modes: usize) -> Result<Self> {
        Self::new(modes, 0.0)
    }

    pub fn hardcore_bosons(modes: usize) -> Result<Self> {
        Self::new(modes, PI)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        Self::new(modes, self.phi)
    }

    pub(crate) fn check_mode(&self, i: usize) -> Result<()> {
        check_mode(self.modes, i)
    }
}

pub(crate) fn check_mode(modes: usize, i: usize) -> Result<()> {
    if i == 0 || i > modes {
        return invalid(format!("mode index {i} out of range 1..={modes}"));
    }
    Ok(())
}

/// `(-1)^L e^{i·sign·φL}`, the Jordan-Wigner string phase for `L` particles.
pub(crate) fn string_phase(l: u32, phi: f64, sign: f64) -> Complex64 {
    let parity = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    Complex64::from_polar(parity, sign * phi * f64::from(l))
}

/// A single occupation-number basis state on `modes` modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState {
    modes: usize,
    mask: u64,
}

impl OccupationState {
    /// Builds a state from per-mode occupations (mode 1 first).
    pub fn new(bits: &[u8]) -> Result<Self> {
        if bits.len() > MAX_MODES {
            return invalid(format!("at most {MAX_MODES} modes supported, got {}", bits.len()));
        }
        let mut mask = 0u64;
        for (k, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << (bits.len() - 1 - k),
                _ => return invalid(format!("occupation of mode {} is {b}; must be 0 or 1", k + 1)),
            }
        }
        Ok(Self { modes: bits.len(), mask })
    }

    pub fn vacuum(modes: usize) -> Result<Self> {
        Self::new(&vec![0; modes])
    }

    pub(crate) fn from_mask(modes: usize, mask: u64) -> Self {
        debug_assert!(modes == MAX_MODES || mask >> modes == 0);
        Self { modes, mask }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub(crate) fn mask(&self) -> u64 {
        self.mask
    }

    fn bit(&self, i: usize) -> u64 {
        1 << (self.modes - i)
    }

    /// Occupation of mode `i` (1-based). Panics if `i` is out of range.
    pub fn occupied(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.modes, "mode {i} out of range");
        self.mask & self.bit(i) != 0
    }

    pub fn with(&self, i: usize, occupied: bool) -> Self {
        let bit = self.bit(i);
        let mask = if occupied { self.mask | bit } else { self.mask & !bit };
        Self { modes: self.modes, mask }
    }

    pub fn particles(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Number of occupied modes `k` with `k < i`.
    pub fn particles_below(&self, i: usize) -> u32 {
        // modes 1..i-1 occupy the bits above mode i
        let shift = self.modes - i + 1;
        if shift >= 64 {
            0
        } else {
            (self.mask >> shift).count_ones()
        }
    }

    /// Number of occupied modes strictly between `i` and `j` (`i < j`).
    pub fn particles_between(&self, i: usize, j: usize) -> u32 {
        self.particles_below(j) - self.particles_below(i + 1)
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.modes).map(|i| u8::from(self.occupied(i))).collect()
    }

    /// Occupied modes in ascending order.
    pub fn occupied_modes(&self) -> Vec<usize> {
        (1..=self.modes).filter(|&i| self.occupied(i)).collect()
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.modes {
            f.write_str(if self.occupied(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for OccupationState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => invalid(format!("unexpected character {other:?} in basis label {s:?}")),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(&bits)
    }
}

/// All states of `m` modes holding exactly `n` particles, in descending
/// lexicographic order of the bitstring (`|1100⟩, |1010⟩, ...` for m=4, n=2).
pub fn enumerate_basis(m: usize, n: usize) -> Result<Vec<OccupationState>> {
    if m > MAX_MODES {
        return invalid(format!("at most {MAX_MODES} modes supported, got {m}"));
    }
    if n > m {
        return invalid(format!("cannot place {n} particles in {m} modes"));
    }
    let mut out = Vec::new();
    // walk the bitstrings of weight n from the largest downwards
    let mut stack = vec![(0usize, 0u64, 0usize)];
    while let Some((pos, mask, used)) = stack.pop() {
        if pos == m {
            if used == n {
                out.push(OccupationState::from_mask(m, mask));
            }
            continue;
        }
        let remaining = m - pos;
        // push the 0-branch first so the 1-branch is explored first
        if n - used < remaining {
            stack.push((pos + 1, mask, used));
        }
        if used < n {
            stack.push((pos + 1, mask | 1 << (m - 1 - pos), used + 1));
        }
    }
    Ok(out)
}

/// Sparse statevector over the occupation basis of a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    modes: usize,
    amps: BTreeMap<u64, Complex64>,
}

impl FockVector {
    pub fn zero(modes: usize) -> Self {
        Self { modes, amps: BTreeMap::new() }
    }

    pub fn basis(state: OccupationState) -> Self {
        let mut v = Self::zero(state.modes);
        v.amps.insert(state.mask, Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_amplitudes(
        modes: usize,
        terms: impl IntoIterator<Item = (OccupationState, Complex64)>,
    ) -> Result<Self> {
        let mut v = Self::zero(modes);
        for (s, a) in terms {
            v.add(s, a)?;
        }
        v.prune();
        Ok(v)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn amplitude(&self, state: &OccupationState) -> Complex64 {
        if state.modes != self.modes {
            return Complex64::new(0.0, 0.0);
        }
        self.amps.get(&state.mask).copied().unwrap_or_default()
    }

    /// Adds `a` to the amplitude of `state`.
    pub fn add(&mut self, state: OccupationState, a: Complex64) -> Result<()> {
        if state.modes != self.modes {
            return invalid(format!(
                "basis state on {} modes added to a vector on {} modes",
                state.modes, self.modes
            ));
        }
        self.add_mask(state.mask, a);
        Ok(())
    }

    pub(crate) fn add_mask(&mut self, mask: u64, a: Complex64) {
        *self.amps.entry(mask).or_default() += a;
    }

    pub(crate) fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    /// Nonzero terms in basis order (descending bitstring).
    pub fn iter(&self) -> impl Iterator<Item = (OccupationState, Complex64)> + '_ {
        self.amps
            .iter()
            .rev()
            .map(|(&mask, &a)| (OccupationState::from_mask(self.modes, mask), a))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.values_mut().for_each(|a| *a *= c);
        self.prune();
    }

    /// Distinct particle numbers present in the support.
    pub fn particle_numbers(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.amps.keys().map(|m| m.count_ones() as usize).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        let mut worst: f64 = if self.modes == other.modes { 0.0 } else { f64::INFINITY };
        for (m, a) in &self.amps {
            let b = other.amps.get(m).copied().unwrap_or_default();
            worst = worst.max((a - b).norm());
        }
        for (m, b) in &other.amps {
            if !self.amps.contains_key(m) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    /// Dense coordinates over `basis`. Support outside `basis` is an error.
    pub fn to_dense(&self, basis: &[OccupationState]) -> Result<DVector<Complex64>> {
        let index: BTreeMap<u64, usize> =
            basis.iter().enumerate().map(|(k, s)| (s.mask, k)).collect();
        let mut out = DVector::zeros(basis.len());
        for (m, a) in &self.amps {
            match index.get(m) {
                Some(&k) => out[k] = *a,
                None => {
                    return invalid(format!(
                        "state {} is outside the requested basis",
                        OccupationState::from_mask(self.modes, *m)
                    ))
                }
            }
        }
        Ok(out)
    }

    pub fn from_dense(modes: usize, basis: &[OccupationState], v: &DVector<Complex64>) -> Result<Self> {
        if basis.len() != v.len() {
            return invalid(format!("basis has {} states but vector has {}", basis.len(), v.len()));
        }
        Self::from_amplitudes(modes, basis.iter().copied().zip(v.iter().copied()))
    }
}

fn check_vector_mode(v: &FockVector, i: usize, cfg: &AlgebraConfig) -> Result<()> {
    if v.modes != cfg.modes {
        return invalid(format!(
            "vector has {} modes but the algebra is configured for {}",
            v.modes, cfg.modes
        ));
    }
    cfg.check_mode(i)
}

/// Applies `a_i†`.
pub fn apply_creation(v: &FockVector, i: usize, cfg: &AlgebraConfig) -> Result<FockVector> {
    check_vector_mode(v, i, cfg)?;
    let mut out = FockVector::zero(v.modes);
    for (s, a) in v.iter() {
        if !s.occupied(i) {
            let phase = string_phase(s.particles_below(i), cfg.phi, -1.0);
            out.add_mask(s.with(i, true).mask, a * phase);
        }
    }
    out.prune();
    Ok(out)
}

/// Applies `a_i`.
pub fn apply_annihilation(v: &FockVector, i: usize, cfg: &AlgebraConfig) -> Result<FockVector> {
    check_vector_mode(v, i, cfg)?;
    let mut out = FockVector::zero(v.modes);
    for (s, a) in v.iter() {
        if s.occupied(i) {
            let phase = string_phase(s.particles_below(i), cfg.phi, 1.0);
            out.add_mask(s.with(i, false).mask, a * phase);
        }
    }
    out.prune();
    Ok(out)
}

/// Matrix over the full `2^m` space with at most one nonzero per column,
/// which is the shape of every ladder operator and of their products.
///
/// Column and row indices are state masks.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderMatrix {
    modes: usize,
    columns: Vec<Option<(u64, Complex64)>>,
}

impl LadderMatrix {
    fn from_action(
        cfg: &AlgebraConfig,
        action: impl Fn(&FockVector) -> Result<FockVector>,
    ) -> Result<Self> {
        let m = cfg.modes;
        let mut columns = Vec::with_capacity(1 << m);
        for mask in 0..(1u64 << m) {
            let image = action(&FockVector::basis(OccupationState::from_mask(m, mask)))?;
            let mut terms = image.amps.into_iter();
            let entry = terms.next();
            if terms.next().is_some() {
                return Err(Error::Consistency(
                    "ladder operator produced more than one output state".into(),
                ));
            }
            columns.push(entry);
        }
        Ok(Self { modes: m, columns })
    }

    /// Matrix of `a_i†` built from [`apply_creation`].
    pub fn creation(cfg: &AlgebraConfig, i: usize) -> Result<Self> {
        cfg.check_mode(i)?;
        Self::from_action(cfg, |v| apply_creation(v, i, cfg))
    }

    /// Matrix of `a_i` built from [`apply_annihilation`].
    pub fn annihilation(cfg: &AlgebraConfig, i: usize) -> Result<Self> {
        cfg.check_mode(i)?;
        Self::from_action(cfg, |v| apply_annihilation(v, i, cfg))
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &LadderMatrix) -> LadderMatrix {
        let columns = rhs
            .columns
            .iter()
            .map(|entry| {
                entry.and_then(|(mid, b)| {
                    self.columns[mid as usize].map(|(row, a)| (row, a * b))
                })
            })
            .collect();
        LadderMatrix { modes: self.modes, columns }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.columns.len();
        let mut out = DMatrix::zeros(dim, dim);
        for (col, entry) in self.columns.iter().enumerate() {
            if let Some((row, a)) = entry {
                out[(*row as usize, col)] = *a;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_none_or(|(_, a)| a.norm() < PRUNE_THRESHOLD))
    }
}

/// Largest entrywise modulus of `x + c·y - d·Id` for ladder-shaped `x`, `y`.
fn relation_violation(x: &LadderMatrix, y: &LadderMatrix, c: Complex64, d: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for col in 0..x.columns.len() {
        let mut entries: Vec<(u64, Complex64)> = Vec::with_capacity(3);
        let mut push = |row: u64, a: Complex64| match entries.iter_mut().find(|(r, _)| *r == row) {
            Some((_, acc)) => *acc += a,
            None => entries.push((row, a)),
        };
        if let Some((r, a)) = x.columns[col] {
            push(r, a);
        }
        if let Some((r, a)) = y.columns[col] {
            push(r, c * a);
        }
        if d != 0.0 {
            push(col as u64, Complex64::new(-d, 0.0));
        }
        for (_, a) in entries {
            worst = worst.max(a.norm());
        }
    }
    worst
}

/// Maximum violations of the two families of deformed relations.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub modes: usize,
    pub phi: f64,
    /// `max |a_i a_j† + e^{-iφε_ij} a_j† a_i - δ_ij|`
    pub mixed: f64,
    /// `max |a_i a_j + e^{iφε_ij} a_j a_i|`
    pub annihilators: f64,
    pub tolerance: f64,
}

impl RelationReport {
    pub fn max_violation(&self) -> f64 {
        self.mixed.max(self.annihilators)
    }

    pub fn passed(&self) -> bool {
        self.max_violation() < self.tolerance
    }
}

fn epsilon(i: usize, j: usize) -> f64 {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => 1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => -1.0,
    }
}

/// Checks the deformed anticommutation relations entrywise on the full
/// `2^m` space, using operator matrices assembled from
/// [`apply_creation`]/[`apply_annihilation`].
pub fn verify_deformed_relations(cfg: &AlgebraConfig, tol: f64) -> Result<RelationReport> {
    let m = cfg.modes;
    if m > MAX_RELATION_MODES {
        return Err(Error::ResourceLimit {
            what: "verify_deformed_relations",
            limit: MAX_RELATION_MODES,
            got: m,
        });
    }
    let create = (1..=m)
        .map(|i| LadderMatrix::creation(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let annihilate = (1..=m)
        .map(|i| LadderMatrix::annihilation(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    let mut mixed: f64 = 0.0;
    let mut annihilators: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let eps = epsilon(i, j);
            let c_mixed = Complex64::from_polar(1.0, -cfg.phi * eps);
            let delta = if i == j { 1.0 } else { 0.0 };
            mixed = mixed.max(relation_violation(
                &annihilate[i].mul(&create[j]),
                &create[j].mul(&annihilate[i]),
                c_mixed,
                delta,
            ));
            let c_ann = Complex64::from_polar(1.0, cfg.phi * eps);
            annihilators = annihilators.max(relation_violation(
                &annihilate[i].mul(&annihilate[j]),
                &annihilate[j].mul(&annihilate[i]),
                c_ann,
                0.0,
            ));
        }
    }
    Ok(RelationReport { modes: m, phi: cfg.phi, mixed, annihilators, tolerance: tol })
}
