//! Experiment configuration, JSON-lines persistence and the four
//! subcommands of the `bfdyn` binary.
//!
//! A config is a flat TOML table; every key has a default, so an empty file
//! is the default scenario. Scientific records go to `records.jsonl` and
//! carry the config hash and the tolerances in force; wall times go to
//! `timing.jsonl` so that records of identical runs are byte-identical.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::diagnostics::convergence::DOUBLING_TOL;
use crate::diagnostics::identities::IDENTITY_TOL;
use crate::diagnostics::spectrum::SPECTRUM_TOL;
use crate::diagnostics::{
    bf_doubling_deviation, bogoliubov_spectrum_check, convergence_cells, inventory, run_identity_suite,
    uniform_grid, ConvergenceReport, ConvergenceSetup, Flavor, FlavorRun, InitialKind, SuiteConfig,
};
use crate::error::{Error, Result};
use crate::lattice::{
    parse_potential_table, preset_potential, ModeSet, ModelParams, Momentum, PotentialKind, PotentialSpec,
};
use crate::operators::Model;
use crate::propagator::{dense_deviation, random_hermitian, random_state, PropagationConfig};

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_SCIENCE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Krylov against dense on random operators.
pub const PROPAGATOR_TOL: f64 = 1e-8;
/// Norm and energy drift per `1 + |t|`.
pub const DRIFT_TOL: f64 = 1e-9;
pub const MOMENTUM_DRIFT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Spatial dimension, 1 to 3.
    pub dim: usize,
    /// Boson momentum cutoff `|k|_inf <= cutoff`.
    pub cutoff: u32,
    /// Tracer momentum cutoff.
    pub tracer_cutoff: u32,
    pub tracer_mass: f64,
    /// Excitation cap of the BF evolution.
    pub bf_cap: u32,
    /// Boson numbers of `converge`.
    pub n_list: Vec<u32>,
    /// Boson number of `evolve`.
    pub n_bosons: u32,
    /// `full`, `aux` or `bf`, for `evolve`.
    pub flavor: String,
    /// Evaluation time of `converge`.
    pub time: f64,
    /// `evolve` grid: `time_steps + 1` points on `[0, t_max]`.
    pub t_max: f64,
    pub time_steps: usize,
    /// Preset names for the pair and tracer potentials.
    pub pair_potential: String,
    pub tracer_potential: String,
    pub pair_strength: f64,
    pub tracer_strength: f64,
    /// Coefficient tables overriding the presets.
    pub pair_potential_file: Option<PathBuf>,
    pub tracer_potential_file: Option<PathBuf>,
    /// Skip the symmetry validation of file potentials (mutation fixtures).
    pub unchecked_potentials: bool,
    /// `single`, `pair` or `vacuum-gaussian`.
    pub initial: String,
    pub initial_p: Vec<i32>,
    pub initial_q: Vec<i32>,
    pub initial_width: f64,
    pub tolerance: f64,
    pub krylov_dim: usize,
    pub max_substeps: usize,
    /// Boson numbers of the identity suite.
    pub suite_n: Vec<u32>,
    /// Random samples of the inequality checks and random propagator tests.
    pub samples: usize,
    pub propagator_samples: usize,
    pub spectrum_cutoff: u32,
    pub spectrum_caps: Vec<u32>,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            cutoff: 1,
            tracer_cutoff: 2,
            tracer_mass: 1.0,
            bf_cap: 8,
            n_list: vec![4, 8, 16, 32, 64],
            n_bosons: 4,
            flavor: "full".into(),
            time: 1.0,
            t_max: 2.0,
            time_steps: 20,
            pair_potential: "soft".into(),
            tracer_potential: "soft".into(),
            pair_strength: 1.0,
            tracer_strength: 1.0,
            pair_potential_file: None,
            tracer_potential_file: None,
            unchecked_potentials: false,
            initial: "single".into(),
            initial_p: vec![1],
            initial_q: vec![0],
            initial_width: 1.0,
            tolerance: 1e-9,
            krylov_dim: 40,
            max_substeps: 100_000,
            suite_n: vec![2, 3, 4, 5, 6],
            samples: 100,
            propagator_samples: 10,
            spectrum_cutoff: 2,
            spectrum_caps: vec![2, 4, 6, 8],
            seed: 1,
            out: PathBuf::from("out"),
            workers: 1,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(config_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        // relative potential files are relative to the config file
        let base = path.parent().unwrap_or(Path::new(""));
        for f in [&mut cfg.pair_potential_file, &mut cfg.tracer_potential_file].into_iter().flatten() {
            if f.is_relative() {
                *f = base.join(&*f);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    /// Sets one key from its TOML text; bare words are read as strings.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let mut table = toml::Table::try_from(&*self).map_err(config_err)?;
        let parsed: toml::Value = toml::from_str::<toml::Table>(&format!("v = {value}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(value.to_string()));
        table.insert(key.to_string(), parsed);
        *self = table.try_into().map_err(|e| Error::Config(format!("{key} = {value}: {e}")))?;
        Ok(())
    }

    /// sha256 of the canonical JSON form, without the output directory and
    /// the worker count, which do not change results.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::new();
        canonical.workers = 0;
        let text = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Config(format!("dim must be 1, 2 or 3, got {}", self.dim)));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        if self.time_steps == 0 {
            return Err(Error::Config("time_steps must be positive".into()));
        }
        Flavor::parse(&self.flavor).map_err(config_err)?;
        self.propagation(1.0).validate().map_err(config_err)?;
        Ok(())
    }

    pub fn modes(&self) -> Result<ModeSet> {
        ModeSet::new(self.dim, self.cutoff)
    }

    pub fn potential(&self, kind: PotentialKind, modes: &ModeSet) -> Result<PotentialSpec> {
        let (preset, strength, file) = match kind {
            PotentialKind::Pair => (&self.pair_potential, self.pair_strength, &self.pair_potential_file),
            PotentialKind::Tracer => (&self.tracer_potential, self.tracer_strength, &self.tracer_potential_file),
        };
        match file {
            None => preset_potential(preset, kind, modes, strength),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                let raw = parse_potential_table(&text, self.dim)?;
                if self.unchecked_potentials {
                    PotentialSpec::from_raw_unvalidated(raw, kind, modes)
                } else {
                    PotentialSpec::validate(raw, kind, modes)
                }
            }
        }
    }

    pub fn model(&self, n: u32) -> Result<Model> {
        let modes = self.modes()?;
        Model::new(
            modes.clone(),
            self.potential(PotentialKind::Pair, &modes)?,
            self.potential(PotentialKind::Tracer, &modes)?,
            ModelParams::new(n, self.tracer_mass, self.tracer_cutoff)?,
        )
    }

    fn momentum(&self, key: &str, c: &[i32]) -> Result<Momentum> {
        if c.len() != self.dim {
            return Err(Error::Config(format!("{key} needs {} components, got {c:?}", self.dim)));
        }
        Ok(Momentum::new(c))
    }

    pub fn initial_kind(&self) -> Result<InitialKind> {
        match self.initial.as_str() {
            "vacuum-gaussian" => Ok(InitialKind::VacuumGaussian { width: self.initial_width }),
            "single" => Ok(InitialKind::Single {
                p: self.momentum("initial_p", &self.initial_p)?,
                q: self.momentum("initial_q", &self.initial_q)?,
            }),
            "pair" => Ok(InitialKind::Pair {
                p: self.momentum("initial_p", &self.initial_p)?,
                q: self.momentum("initial_q", &self.initial_q)?,
            }),
            other => Err(Error::Config(format!(
                "unknown initial state `{other}` (expected single, pair or vacuum-gaussian)"
            ))),
        }
    }

    pub fn propagation(&self, time: f64) -> PropagationConfig {
        PropagationConfig {
            time,
            tolerance: self.tolerance,
            krylov_dim: self.krylov_dim,
            max_substeps: self.max_substeps,
        }
    }

    fn tolerances(&self) -> Value {
        json!({
            "propagation": self.tolerance,
            "krylov_dim": self.krylov_dim,
            "identity": IDENTITY_TOL,
            "propagator_dense": PROPAGATOR_TOL,
            "drift": DRIFT_TOL,
            "momentum_drift": MOMENTUM_DRIFT_TOL,
            "spectrum": SPECTRUM_TOL,
            "doubling": DOUBLING_TOL,
        })
    }
}

/// Serialized appender for `records.jsonl`, plus the timing sidecar.
pub struct Recorder {
    dir: PathBuf,
    hash: String,
    tolerances: Value,
    records: BufWriter<File>,
    timing: BufWriter<File>,
}

impl Recorder {
    pub fn create(cfg: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(&cfg.out)?;
        fs::write(cfg.out.join("config.toml"), cfg.to_toml()?)?;
        Ok(Self {
            dir: cfg.out.clone(),
            hash: cfg.hash(),
            tolerances: cfg.tolerances(),
            records: BufWriter::new(File::create(cfg.out.join("records.jsonl"))?),
            timing: BufWriter::new(File::create(cfg.out.join("timing.jsonl"))?),
        })
    }

    pub fn record(&mut self, kind: &str, payload: impl Serialize) -> Result<()> {
        let line = json!({
            "kind": kind,
            "config_hash": self.hash,
            "tolerances": self.tolerances,
            "data": payload,
        });
        writeln!(self.records, "{line}")?;
        self.records.flush()?;
        Ok(())
    }

    pub fn timing(&mut self, kind: &str, started: Instant) -> Result<()> {
        let line = json!({
            "kind": kind,
            "config_hash": self.hash,
            "wall_seconds": started.elapsed().as_secs_f64(),
        });
        writeln!(self.timing, "{line}")?;
        self.timing.flush()?;
        Ok(())
    }

    /// Two-column plot data.
    pub fn plot(&self, name: &str, header: &str, rows: impl IntoIterator<Item = (f64, f64)>) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        writeln!(w, "# {header}")?;
        for (x, y) in rows {
            writeln!(w, "{x:.17e} {y:.17e}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of a subcommand that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        if self.passed {
            EXIT_SUCCESS
        } else {
            EXIT_SCIENCE
        }
    }
}

pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) => o.exit_code(),
        Err(Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
        Err(_) => EXIT_USAGE,
    }
}

/// Runs `f` on a pool of `cfg.workers` threads.
pub fn with_workers<T: Send>(cfg: &ExperimentConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Identity inventory, one `name: statement` per line.
pub fn inventory_listing() -> String {
    inventory().iter().map(|(n, s)| format!("{n:<22} {s}\n")).collect()
}

#[derive(Serialize)]
struct DriftCheck {
    flavor: Flavor,
    n: u32,
    t_max: f64,
    norm_drift: f64,
    energy_drift: f64,
    momentum_drift: f64,
    passed: bool,
}

fn drift_check(run: &FlavorRun, times: &[f64], cfg: &PropagationConfig) -> Result<DriftCheck> {
    let trace = run.trace(times, cfg)?;
    let first = &trace.observables[0];
    let mut norm_drift: f64 = 0.0;
    let mut energy_drift: f64 = 0.0;
    let mut momentum_drift: f64 = 0.0;
    let mut passed = true;
    for o in &trace.observables {
        let dn = (o.norm - first.norm).abs();
        let de = (o.energy - first.energy).abs();
        let dp = o.momentum.iter().zip(&first.momentum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = 1.0 + (o.t - first.t).abs();
        passed &= dn <= DRIFT_TOL * scale && de <= DRIFT_TOL * scale && dp <= MOMENTUM_DRIFT_TOL;
        norm_drift = norm_drift.max(dn);
        energy_drift = energy_drift.max(de);
        momentum_drift = momentum_drift.max(dp);
    }
    Ok(DriftCheck {
        flavor: run.flavor,
        n: run.n,
        t_max: times.iter().fold(0.0, |a: f64, t| a.max(t.abs())),
        norm_drift,
        energy_drift,
        momentum_drift,
        passed,
    })
}

/// Identity suite, random Krylov-vs-dense checks and conservation along
/// physical evolutions.
pub fn cmd_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut rec = Recorder::create(cfg)?;
    let started = Instant::now();
    with_workers(cfg, || -> Result<Outcome> {
        let modes = cfg.modes()?;
        let suite = SuiteConfig {
            modes: modes.clone(),
            tracer_cutoff: cfg.tracer_cutoff,
            n_list: cfg.suite_n.clone(),
            v: cfg.potential(PotentialKind::Pair, &modes)?,
            w: cfg.potential(PotentialKind::Tracer, &modes)?,
            samples: cfg.samples,
            seed: cfg.seed,
        };
        let report = run_identity_suite(&suite)?;
        let mut passed = report.all_passed();
        for c in &report.checks {
            rec.record("identity", c)?;
        }
        rec.timing("identity-suite", started)?;

        let t0 = Instant::now();
        for i in 0..cfg.propagator_samples {
            let seed = cfg.seed.wrapping_mul(1000).wrapping_add(i as u64);
            let dim = 16 + (i * 37) % 241;
            let h = random_hermitian(dim, 8, seed)?;
            let psi = random_state(h.tag().clone(), seed ^ 0x5eed);
            let t = 2.0 * (i as f64 + 1.0) / cfg.propagator_samples as f64;
            let deviation = dense_deviation(&h, &psi, &cfg.propagation(t))?;
            let ok = deviation <= PROPAGATOR_TOL;
            passed &= ok;
            rec.record("propagator-dense", json!({"dim": dim, "seed": seed, "t": t, "deviation": deviation, "passed": ok}))?;
        }
        rec.timing("propagator-dense", t0)?;

        let t0 = Instant::now();
        let n = *cfg.suite_n.iter().max().unwrap_or(&cfg.n_bosons);
        let model = cfg.model(n)?;
        let initial = cfg.initial_kind()?;
        let mut times = uniform_grid(cfg.t_max, cfg.time_steps);
        times.extend(times.clone().iter().skip(1).map(|t| -t));
        let bf_cap = cfg.bf_cap.max(initial.excitations());
        for flavor in Flavor::ALL {
            let run = FlavorRun::prepare(flavor, &model, &initial, bf_cap)?;
            let d = drift_check(&run, &times, &cfg.propagation(0.0))?;
            passed &= d.passed;
            rec.record("drift", &d)?;
        }
        rec.timing("drift", t0)?;
        rec.record("check-summary", json!({"passed": passed, "identity_failures": report.failures().count()}))?;
        Ok(Outcome { passed })
    })?
}

/// One evolution on the time grid with observables per grid point.
pub fn cmd_evolve(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut rec = Recorder::create(cfg)?;
    let started = Instant::now();
    with_workers(cfg, || -> Result<Outcome> {
        let flavor = Flavor::parse(&cfg.flavor)?;
        let model = cfg.model(cfg.n_bosons)?;
        let initial = cfg.initial_kind()?;
        let run = FlavorRun::prepare(flavor, &model, &initial, cfg.bf_cap)?;
        let times = uniform_grid(cfg.t_max, cfg.time_steps);
        let trace = run.trace(&times, &cfg.propagation(0.0))?;
        rec.record(
            "evolve-setup",
            json!({
                "flavor": flavor,
                "n": cfg.n_bosons,
                "dim": run.dim(),
                "initial": initial.descriptor(),
                "tail": run.tail_norm,
            }),
        )?;
        for o in &trace.observables {
            rec.record("observables", o)?;
        }
        let drift = drift_check(&run, &times, &cfg.propagation(0.0))?;
        rec.record("drift", &drift)?;
        let stem = format!("{}_N{}", flavor.name(), cfg.n_bosons);
        rec.plot(&format!("alpha_{stem}.dat"), "t alpha", trace.observables.iter().map(|o| (o.t, o.alpha)))?;
        rec.plot(&format!("energy_{stem}.dat"), "t energy", trace.observables.iter().map(|o| (o.t, o.energy)))?;
        rec.timing("evolve", started)?;
        Ok(Outcome { passed: drift.passed })
    })?
}

pub fn converge_setup(cfg: &ExperimentConfig) -> Result<ConvergenceSetup> {
    let n0 = *cfg.n_list.first().ok_or_else(|| Error::Config("n_list is empty".into()))?;
    Ok(ConvergenceSetup {
        model: cfg.model(n0)?,
        initial: cfg.initial_kind()?,
        time: cfg.time,
        bf_cap: cfg.bf_cap,
        propagation: cfg.propagation(cfg.time),
    })
}

/// Error curves over `n_list`. Completed cells are persisted even when a
/// later cell fails.
pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut rec = Recorder::create(cfg)?;
    let started = Instant::now();
    with_workers(cfg, || -> Result<Outcome> {
        let setup = converge_setup(cfg)?;
        let doubling = bf_doubling_deviation(&setup)?;
        let doubling_ok = doubling <= DOUBLING_TOL;
        rec.record(
            "bf-doubling",
            json!({"cap": setup.bf_cap, "deviation": doubling, "passed": doubling_ok}),
        )?;
        let (reference, cells) = convergence_cells(&setup, &cfg.n_list)?;
        let mut done = Vec::new();
        let mut failure = None;
        for (n, cell) in cfg.n_list.iter().zip(cells) {
            match cell {
                Ok(c) => {
                    rec.record("cell", &c)?;
                    done.push(c);
                }
                Err(e) => {
                    rec.record("cell-failure", json!({"n": n, "error": e.to_string()}))?;
                    failure.get_or_insert(e);
                }
            }
        }
        rec.timing("converge-cells", started)?;
        if let Some(e) = failure {
            return Err(e);
        }
        let report = ConvergenceReport::new(&setup, &reference, done)?;
        for curve in [&report.total, &report.gap_aux, &report.gap_aux_bf] {
            rec.record("error-curve", curve)?;
            rec.plot(
                &format!("error_{}.dat", curve.label.replace('-', "_")),
                "N error",
                curve.points.iter().map(|&(n, e)| (n as f64, e)),
            )?;
        }
        let passed = report.passed() && doubling_ok;
        rec.record(
            "converge-summary",
            json!({
                "triangle_excess": report.triangle_excess,
                "tail_excess": report.tail_excess,
                "total_slope": report.total.fit.as_ref().map(|f| f.slope),
                "passed": passed,
            }),
        )?;
        Ok(Outcome { passed })
    })?
}

/// `H^Bog` spectrum against the dispersion oracle.
pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut rec = Recorder::create(cfg)?;
    let started = Instant::now();
    with_workers(cfg, || -> Result<Outcome> {
        let modes = ModeSet::new(cfg.dim, cfg.spectrum_cutoff)?;
        let v = cfg.potential(PotentialKind::Pair, &modes)?;
        let report = bogoliubov_spectrum_check(&modes, &v, &cfg.spectrum_caps)?;
        rec.record("spectrum", &report)?;
        if let Some(top) = report.caps.last() {
            let norm = |p: &Momentum| (p.norm_sq() as f64).sqrt() * if p.0.iter().sum::<i32>() < 0 { -1.0 } else { 1.0 };
            rec.plot("spectrum.dat", "p gap", top.gaps.iter().map(|(p, g)| (norm(p), *g)))?;
            rec.plot("dispersion.dat", "p oracle", report.rows.iter().map(|r| (norm(&r.momentum), r.oracle)))?;
        }
        rec.timing("spectrum", started)?;
        Ok(Outcome { passed: report.passed() })
    })?
}
