//! Command implementations for the `anyon` binary.
//!
//! Every command returns its report as a string so it can be tested without
//! spawning a process; `main` only parses arguments and routes output.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use anyon_core::encoded::{c_phi_reference, restrict_to_code_space};
use anyon_core::entangle::{ep_formula, local_invariants, TwoQubitUnitary};
use anyon_core::linalg::CMatrix;
use anyon_core::optics::sector_unitary;
use anyon_core::search::{search_decomposition_with, SearchOptions};
use anyon_core::verify::{self, Level};
use anyon_core::{run_circuit, AlgebraConfig, Circuit, Engine, FockVector, OccupationState, OpticalElement};
use clap::{Args, Parser, Subcommand};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Tolerance on `|‖ψ‖² - 1|` before sampling refuses a state.
pub const SAMPLE_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input or out-of-range arguments. Exit code 1.
    Validation(String),
    /// A verification check failed or an internal consistency test tripped. Exit code 2.
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Verification(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "error: {msg}"),
            CliError::Verification(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anyon_core::Error> for CliError {
    fn from(e: anyon_core::Error) -> Self {
        match e {
            anyon_core::Error::Consistency(_) => CliError::Verification(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn validation<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Validation(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ElementDoc {
    #[serde(rename = "ps")]
    PhaseShifter { mode: usize, theta: f64 },
    #[serde(rename = "bs")]
    BeamSplitter { modes: [usize; 2], theta: f64 },
}

/// A circuit file: register size, statistics, input occupation and elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    pub modes: usize,
    pub phi: f64,
    pub input: Vec<u8>,
    #[serde(default)]
    pub elements: Vec<ElementDoc>,
}

impl CircuitDocument {
    /// Parses JSON, reporting the failing field path and line.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Validation(format!("malformed circuit document at field `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds the circuit, with `phi` overriding the document if given.
    pub fn circuit(&self, phi: Option<f64>) -> CliResult<Circuit> {
        let elements = self.elements.iter().map(|e| match *e {
            ElementDoc::PhaseShifter { mode, theta } => OpticalElement::phase_shifter(mode, theta),
            ElementDoc::BeamSplitter { modes: [i, j], theta } => OpticalElement::beam_splitter(i, j, theta),
        });
        let phi = phi.unwrap_or(self.phi);
        Ok(Circuit::from_elements(self.modes, phi, elements)?)
    }

    pub fn input_state(&self) -> CliResult<OccupationState> {
        if self.input.len() != self.modes {
            return validation(format!("input has {} entries but the document declares {} modes", self.input.len(), self.modes));
        }
        Ok(OccupationState::new(&self.input)?)
    }
}

/// Amplitudes keyed by basis string, mode 1 leftmost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub engine: String,
    pub modes: usize,
    pub phi: f64,
    pub input: String,
    pub norm: f64,
    pub amplitudes: BTreeMap<String, [f64; 2]>,
}

impl AmplitudeReport {
    pub fn new(engine: Engine, circuit: &Circuit, input: &OccupationState, out: &FockVector) -> Self {
        let amplitudes = out.iter().map(|(s, a)| (s.to_string(), [a.re, a.im])).collect();
        Self {
            engine: engine.to_string(),
            modes: circuit.modes(),
            phi: circuit.phi(),
            input: input.to_string(),
            norm: out.norm(),
            amplitudes,
        }
    }

    /// Rebuilds the state vector from the report.
    pub fn state(&self) -> CliResult<FockVector> {
        let mut amps = Vec::with_capacity(self.amplitudes.len());
        for (label, [re, im]) in &self.amplitudes {
            amps.push((label.parse::<OccupationState>()?, num_complex::Complex64::new(*re, *im)));
        }
        Ok(FockVector::from_amplitudes(self.modes, amps)?)
    }
}

/// Grid `start:stop:count`; endpoints accept `pi`, `pi/4`, `3pi/4`, `-pi` and plain numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return validation(format!("grid must be start:stop:count, got {s:?}"));
        };
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("grid count {count:?} is not a non-negative integer")))?;
        if count < 2 {
            return validation(format!("grid needs at least 2 points, got {count}"));
        }
        Ok(Grid { start: parse_angle(start)?, stop: parse_angle(stop)?, count })
    }
}

pub fn parse_angle(s: &str) -> CliResult<f64> {
    let t = s.trim().to_ascii_lowercase();
    let bad = || CliError::Validation(format!("cannot parse angle {s:?}"));
    let value = match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| bad())?,
        Some(at) => {
            let coeff = match t[..at].trim_end_matches('*') {
                "" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            let rest = &t[at + 2..];
            let div = match rest.strip_prefix('/') {
                Some(d) => d.parse::<f64>().map_err(|_| bad())?,
                None if rest.is_empty() => 1.0,
                None => return Err(bad()),
            };
            coeff * PI / div
        }
    };
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

#[derive(Debug, Parser)]
#[command(name = "anyon", version, about = "Linear optics for one-dimensional fermionic anyons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Statistics angle in radians, overriding the document.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_angle_arg)]
    pub phi: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_angle_arg(s: &str) -> Result<f64, String> {
    parse_angle(s).map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the document's input state and print the amplitudes as JSON.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "analytic")]
        engine: Engine,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tabulate the entangling power of C(φ) against 1 - cos⁴(φ/2) as CSV.
    ///
    /// With a file, the gate at each φ is the code-space block of the
    /// document's 4-mode circuit; without one, the tabulated C(φ) is used.
    SweepPhi {
        file: Option<PathBuf>,
        #[arg(long, default_value = "0:pi:50")]
        grid: Grid,
        #[arg(long, default_value = "analytic")]
        engine: Engine,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample Fock-basis measurement outcomes of the evolved state.
    Sample {
        file: PathBuf,
        #[arg(long)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "analytic")]
        engine: Engine,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the reproduction and invariant checks.
    Verify {
        #[arg(long, default_value = "full")]
        level: Level,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search for a beam-splitter sequence reproducing a two-particle unitary.
    ///
    /// With a file the target is the document circuit's sector unitary;
    /// without one it is the tabulated C(φ) on four modes.
    Decompose {
        file: Option<PathBuf>,
        /// Beam-splitter pairs, e.g. `1-2,2-3,1-3`.
        #[arg(long, default_value = "1-2,2-3,3-4,1-3,2-4")]
        pairs: String,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        particles: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
}

impl Command {
    pub fn output(&self) -> Option<&Path> {
        match self {
            Command::Run { common, .. } | Command::Sample { common, .. } | Command::Decompose { common, .. } => {
                common.output.as_deref()
            }
            Command::SweepPhi { output, .. } | Command::Verify { output, .. } => output.as_deref(),
        }
    }
}

/// What a command produced: the text to emit and whether it signals failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Run { file, engine, common } => {
            let doc = CircuitDocument::load(file)?;
            let report = cmd_run(&doc, *engine, common.phi)?;
            Ok(Outcome::ok(to_json(&report)?))
        }
        Command::SweepPhi { file, grid, engine, .. } => {
            let doc = file.as_deref().map(CircuitDocument::load).transpose()?;
            Ok(Outcome::ok(cmd_sweep_phi(doc.as_ref(), grid, *engine)?))
        }
        Command::Sample { file, shots, seed, engine, common } => {
            let doc = CircuitDocument::load(file)?;
            let counts = cmd_sample(&doc, *shots, *seed, *engine, common.phi)?;
            Ok(Outcome::ok(to_json(&counts)?))
        }
        Command::Verify { level, seed, .. } => {
            let report = verify::run(*level, *seed)?;
            let text = format_verify(&report);
            let failure = (!report.passed()).then(|| {
                let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.to_string()).collect();
                CliError::Verification(format!("checks {} failed", failed.join(", ")))
            });
            Ok(Outcome { text, failure })
        }
        Command::Decompose { file, pairs, max_len, particles, common } => {
            let doc = file.as_deref().map(CircuitDocument::load).transpose()?;
            let pairs = parse_pairs(pairs)?;
            let report = cmd_decompose(doc.as_ref(), &pairs, *max_len, *particles, common.phi)?;
            Ok(Outcome::ok(to_json(&report)?))
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Verification(format!("cannot serialize report: {e}")))
}

pub fn cmd_run(doc: &CircuitDocument, engine: Engine, phi: Option<f64>) -> CliResult<AmplitudeReport> {
    let circuit = doc.circuit(phi)?;
    let input = doc.input_state()?;
    let out = run_circuit(&circuit, &input, engine)?;
    Ok(AmplitudeReport::new(engine, &circuit, &input, &out))
}

/// One CSV row per grid point, in grid order, at 17 significant digits.
pub fn cmd_sweep_phi(doc: Option<&CircuitDocument>, grid: &Grid, engine: Engine) -> CliResult<String> {
    if let Some(doc) = doc {
        if doc.modes != 4 {
            return validation(format!("sweep-phi needs a 4-mode circuit (two dual-rail qubits), got {} modes", doc.modes));
        }
    }
    let rows: Vec<CliResult<String>> = grid
        .points()
        .into_par_iter()
        .map(|phi| {
            let gate = match doc {
                Some(doc) => restrict_to_code_space(&sector_unitary(&doc.circuit(Some(phi))?, 2, engine)?),
                None => c_phi_reference(phi).encoded_matrix,
            };
            let ep = local_invariants(&TwoQubitUnitary::new(gate)?).ep;
            let formula = ep_formula(phi);
            Ok(format!("{phi:.16e},{ep:.16e},{formula:.16e},{:.16e}", (ep - formula).abs()))
        })
        .collect();
    let mut out = String::from("phi,ep_invariants,ep_formula,abs_diff\n");
    for row in rows {
        out.push_str(&row?);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub shots: usize,
    pub seed: u64,
    pub counts: BTreeMap<String, usize>,
}

pub fn cmd_sample(doc: &CircuitDocument, shots: usize, seed: u64, engine: Engine, phi: Option<f64>) -> CliResult<SampleReport> {
    if shots == 0 {
        return validation("shots must be at least 1");
    }
    let circuit = doc.circuit(phi)?;
    let state = run_circuit(&circuit, &doc.input_state()?, engine)?;
    sample_state(&state, shots, seed)
}

pub fn sample_state(state: &FockVector, shots: usize, seed: u64) -> CliResult<SampleReport> {
    if shots == 0 {
        return validation("shots must be at least 1");
    }
    let norm_sqr = state.norm_sqr();
    if (norm_sqr - 1.0).abs() > SAMPLE_NORM_TOL {
        return Err(CliError::Verification(format!("state is not normalized: ‖ψ‖² = {norm_sqr}")));
    }
    let (labels, weights): (Vec<String>, Vec<f64>) = state.iter().map(|(s, a)| (s.to_string(), a.norm_sqr())).unzip();
    let dist = WeightedIndex::new(&weights).map_err(|e| CliError::Verification(format!("cannot sample: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(labels[dist.sample(&mut rng)].clone()).or_default() += 1;
    }
    Ok(SampleReport { shots, seed, counts })
}

pub fn format_verify(report: &verify::Report) -> String {
    let mut out = String::new();
    for check in &report.checks {
        out.push_str(&check.to_string());
        out.push('\n');
    }
    if !report.notes.is_empty() {
        out.push_str("\nnotes:\n");
        for note in &report.notes {
            out.push_str("  - ");
            out.push_str(note);
            out.push('\n');
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!(
        "\n{passed}/{} checks passed in {:.2} s\n",
        report.checks.len(),
        report.elapsed.as_secs_f64()
    ));
    out
}

pub fn parse_pairs(s: &str) -> CliResult<Vec<(usize, usize)>> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once('-')
                .ok_or_else(|| CliError::Validation(format!("pair {p:?} must look like i-j")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Validation(format!("bad mode index {x:?} in pair {p:?}")))
            };
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub found: bool,
    pub residual: f64,
    pub grid_evaluations: usize,
    pub phi: f64,
    pub elements: Vec<ElementDoc>,
}

pub fn cmd_decompose(
    doc: Option<&CircuitDocument>,
    pairs: &[(usize, usize)],
    max_len: usize,
    particles: usize,
    phi: Option<f64>,
) -> CliResult<DecomposeReport> {
    let (target, cfg): (CMatrix, AlgebraConfig) = match doc {
        Some(doc) => {
            let circuit = doc.circuit(phi)?;
            (sector_unitary(&circuit, particles, Engine::Analytic)?, *circuit.config())
        }
        None => {
            if particles != 2 {
                return validation("the tabulated C(φ) target lives in the two-particle sector");
            }
            let phi = phi.unwrap_or(PI / 2.0);
            (c_phi_reference(phi).two_particle_matrix, AlgebraConfig::new(4, phi)?)
        }
    };
    let opts = SearchOptions { max_len, particles, ..SearchOptions::default() };
    let outcome = search_decomposition_with(&target, pairs, &cfg, &opts)?;
    let elements = outcome
        .circuit
        .elements()
        .iter()
        .map(|e| match *e {
            OpticalElement::PhaseShifter { mode, theta } => ElementDoc::PhaseShifter { mode, theta },
            OpticalElement::BeamSplitter { i, j, theta } => ElementDoc::BeamSplitter { modes: [i, j], theta },
        })
        .collect();
    Ok(DecomposeReport {
        found: outcome.found,
        residual: outcome.residual,
        grid_evaluations: outcome.grid_evaluations,
        phi: cfg.phi(),
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_angle("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        for bad in ["", "pix", "p", "1/0pi", "inf", "pi/0"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        let g: Grid = "0:pi:3".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, PI / 2.0, PI]);
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:x".parse::<Grid>().is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pairs("1-2, 2-4").unwrap(), vec![(1, 2), (2, 4)]);
        assert!(parse_pairs("12").is_err());
        assert!(parse_pairs("1-b").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Validation(String::new()).exit_code(), 1);
        assert_eq!(CliError::Verification(String::new()).exit_code(), 2);
        let e: CliError = anyon_core::Error::Consistency("x".into()).into();
        assert_eq!(e.exit_code(), 2);
    }
}
