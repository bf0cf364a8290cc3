//! Benchmark harness: the shallow-circuit runtime sweep, the quantum-volume
//! fidelity sweep and the QASM corpus run.
//!
//! Only the gate loop of each engine is timed. Circuit generation, parsing and
//! every fidelity evaluation happen outside the timed region. Cells run one
//! after another on the calling thread so timings never overlap.

pub mod config;
pub mod record;
pub mod stats;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

pub use config::{BenchConfig, ConfigFile, Experiment, CORPUS_ENV};
pub use record::{read_csv, write_csv, write_json, BenchRecord, CellFailure, Engine, CSV_HEADER};
pub use stats::{fit_loglog_slope, LogLogFit, MeanSe};

use crate::circuit::generate::{gen_quantum_volume, gen_shallow_random};
use crate::circuit::qasm::parse_qasm_file;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::mps::{fidelity, MpsState};
use crate::statevector::{StateVector, MAX_QUBITS};
use crate::tensor::TruncationPolicy;
use crate::vidal::VidalState;

/// QASM circuits whose fidelity falls below this are flagged as excluded.
pub const EXCLUSION_THRESHOLD: f64 = 5e-4;

/// Final state of one engine run.
#[derive(Clone, Debug)]
pub enum FinalState {
    Cf(MpsState),
    Su(VidalState),
    Sv(StateVector),
}

impl FinalState {
    pub fn engine(&self) -> Engine {
        match self {
            FinalState::Cf(_) => Engine::Cf,
            FinalState::Su(_) => Engine::Su,
            FinalState::Sv(_) => Engine::Sv,
        }
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            FinalState::Cf(s) => s.num_qubits(),
            FinalState::Su(s) => s.num_qubits(),
            FinalState::Sv(s) => s.num_qubits(),
        }
    }

    pub fn max_bond(&self) -> Option<usize> {
        match self {
            FinalState::Cf(s) => Some(s.max_bond()),
            FinalState::Su(s) => Some(s.max_bond()),
            FinalState::Sv(_) => None,
        }
    }

    pub fn discarded_weight(&self) -> Option<f64> {
        match self {
            FinalState::Cf(s) => Some(s.discarded_weight()),
            FinalState::Su(s) => Some(s.discarded_weight()),
            FinalState::Sv(_) => None,
        }
    }

    pub fn to_statevector(&self) -> Result<StateVector> {
        if self.num_qubits() > MAX_QUBITS {
            return Err(Error::Capacity {
                requested: self.num_qubits(),
                limit: MAX_QUBITS,
            });
        }
        match self {
            FinalState::Cf(s) => s.to_statevector(),
            FinalState::Su(s) => s.to_statevector(),
            FinalState::Sv(s) => Ok(s.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TimedRun {
    pub state: FinalState,
    pub runtime_s: f64,
}

/// Runs `circuit` from `|0…0⟩` on one engine, timing only the gate loop.
pub fn run_engine(
    engine: Engine,
    circuit: &Circuit,
    policy: &TruncationPolicy,
) -> Result<TimedRun> {
    policy.validate()?;
    let n = circuit.num_qubits();
    let (state, runtime_s) = match engine {
        Engine::Cf => {
            let mut s = MpsState::zero(n)?;
            let t = Instant::now();
            for g in circuit.gates() {
                s.apply_gate(g, policy)?;
            }
            let dt = t.elapsed().as_secs_f64();
            (FinalState::Cf(s), dt)
        }
        Engine::Su => {
            let mut s = VidalState::zero(n)?;
            let t = Instant::now();
            for g in circuit.gates() {
                s.apply_gate(g, policy)?;
            }
            let dt = t.elapsed().as_secs_f64();
            (FinalState::Su(s), dt)
        }
        Engine::Sv => {
            let mut s = StateVector::zero(n)?;
            let t = Instant::now();
            for g in circuit.gates() {
                s.apply(g)?;
            }
            let dt = t.elapsed().as_secs_f64();
            (FinalState::Sv(s), dt)
        }
    };
    Ok(TimedRun { state, runtime_s })
}

/// `|⟨ψ_CF|ψ_SU⟩|²` of the normalized states. A truncated SU state is only
/// approximately unit-norm, so both norms are divided out.
pub fn fidelity_cf(cf: &MpsState, su: &VidalState) -> Result<f64> {
    if cf.num_qubits() != su.num_qubits() {
        return Err(Error::Dimension(format!(
            "fidelity of {}- and {}-qubit states",
            cf.num_qubits(),
            su.num_qubits()
        )));
    }
    let su = su.to_plain_mps();
    Ok(fidelity(cf, &su)? / (cf.norm_sqr() * su.norm_sqr()))
}

/// `|⟨ψ_SV|ψ⟩|²` of the normalized states.
pub fn fidelity_sv(sv: &StateVector, state: &FinalState) -> Result<f64> {
    if sv.num_qubits() != state.num_qubits() {
        return Err(Error::Dimension(format!(
            "fidelity of {}- and {}-qubit states",
            sv.num_qubits(),
            state.num_qubits()
        )));
    }
    let other = state.to_statevector()?;
    Ok(sv.inner(&other)?.norm_sqr() / (sv.norm_sqr() * other.norm_sqr()))
}

/// Records and failures of an experiment run.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<CellFailure>,
}

struct Cell<'a> {
    experiment: String,
    circuit: &'a Circuit,
    depth: Option<usize>,
    seed: Option<u64>,
}

fn run_cell(cell: Cell<'_>, cfg: &BenchConfig, out: &mut BenchOutcome) {
    let n = cell.circuit.num_qubits();
    let fail = |engine, reason: String| CellFailure {
        experiment: cell.experiment.clone(),
        engine,
        n: Some(n),
        seed: cell.seed,
        reason,
    };
    let mut runs = Vec::new();
    for &engine in &cfg.engines {
        if engine == Engine::Sv && n > MAX_QUBITS {
            out.failures.push(fail(
                Some(engine),
                format!("{n} qubits exceed the state-vector limit"),
            ));
            continue;
        }
        match run_engine(engine, cell.circuit, &cfg.policy) {
            Ok(run) => runs.push(run),
            Err(e) => out.failures.push(fail(Some(engine), e.to_string())),
        }
    }

    let find = |e: Engine| runs.iter().find(|r| r.state.engine() == e);
    let reference = match find(Engine::Sv) {
        Some(TimedRun {
            state: FinalState::Sv(sv),
            ..
        }) => Some(sv),
        _ => None,
    };
    let f_cf = match (find(Engine::Cf), find(Engine::Su)) {
        (
            Some(TimedRun {
                state: FinalState::Cf(cf),
                ..
            }),
            Some(TimedRun {
                state: FinalState::Su(su),
                ..
            }),
        ) => match fidelity_cf(cf, su) {
            Ok(f) => Some(f),
            Err(e) => {
                out.failures
                    .push(fail(Some(Engine::Su), format!("F_CF: {e}")));
                None
            }
        },
        _ => None,
    };

    for run in &runs {
        let engine = run.state.engine();
        let f_sv = match (engine, reference) {
            (Engine::Cf | Engine::Su, Some(sv)) => match fidelity_sv(sv, &run.state) {
                Ok(f) => Some(f),
                Err(e) => {
                    out.failures.push(fail(Some(engine), format!("F_SV: {e}")));
                    None
                }
            },
            _ => None,
        };
        out.records.push(BenchRecord {
            experiment: cell.experiment.clone(),
            engine,
            n,
            depth: cell.depth,
            seed: cell.seed,
            runtime_s: run.runtime_s,
            f_cf: if engine == Engine::Su { f_cf } else { None },
            f_sv,
            max_bond: run.state.max_bond(),
            discarded_weight: run.state.discarded_weight(),
        });
    }
}

fn expect(cfg: &BenchConfig, experiment: Experiment) -> Result<()> {
    if cfg.experiment != experiment {
        return Err(Error::InvalidArgument(format!(
            "config is for the {} experiment, not {experiment}",
            cfg.experiment
        )));
    }
    cfg.validate()
}

/// Shallow random circuits: `n` Haar two-qubit gates on random adjacent
/// pairs, for every size and seed.
pub fn run_shallow_experiment(cfg: &BenchConfig) -> Result<BenchOutcome> {
    expect(cfg, Experiment::Shallow)?;
    let mut out = BenchOutcome::default();
    for &n in &cfg.sizes {
        for &seed in &cfg.seeds {
            let circuit = gen_shallow_random(n, seed)?;
            let cell = Cell {
                experiment: Experiment::Shallow.id().into(),
                circuit: &circuit,
                depth: None,
                seed: Some(seed),
            };
            run_cell(cell, cfg, &mut out);
        }
    }
    Ok(out)
}

/// Quantum-volume circuits for every size, depth and seed.
pub fn run_qv_experiment(cfg: &BenchConfig) -> Result<BenchOutcome> {
    expect(cfg, Experiment::QuantumVolume)?;
    let mut out = BenchOutcome::default();
    for &n in &cfg.sizes {
        for &depth in &cfg.depths {
            for &seed in &cfg.seeds {
                let circuit = gen_quantum_volume(n, depth, seed)?;
                let cell = Cell {
                    experiment: Experiment::QuantumVolume.id().into(),
                    circuit: &circuit,
                    depth: Some(depth),
                    seed: Some(seed),
                };
                run_cell(cell, cfg, &mut out);
            }
        }
    }
    Ok(out)
}

/// `*.qasm` files of a directory in name order.
pub fn qasm_corpus(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file()
            && path
                .extension()
                .is_some_and(|x| x.eq_ignore_ascii_case("qasm"))
        {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Every `*.qasm` file of the corpus directory. Files that fail to parse are
/// reported as failures with the parser's reason.
pub fn run_qasm_experiment(cfg: &BenchConfig) -> Result<BenchOutcome> {
    expect(cfg, Experiment::Qasm)?;
    let dir = cfg.corpus_dir.as_deref().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no QASM corpus: set corpus_dir in the config or {CORPUS_ENV}"
        ))
    })?;
    let mut out = BenchOutcome::default();
    for path in qasm_corpus(dir)? {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let experiment = format!("{}:{stem}", Experiment::Qasm.id());
        match parse_qasm_file(&path) {
            Ok(circuit) => {
                let cell = Cell {
                    experiment,
                    circuit: &circuit,
                    depth: None,
                    seed: None,
                };
                run_cell(cell, cfg, &mut out);
            }
            Err(e) => out.failures.push(CellFailure {
                experiment,
                engine: None,
                n: None,
                seed: None,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

pub fn run_experiment(cfg: &BenchConfig) -> Result<BenchOutcome> {
    match cfg.experiment {
        Experiment::Shallow => run_shallow_experiment(cfg),
        Experiment::QuantumVolume => run_qv_experiment(cfg),
        Experiment::Qasm => run_qasm_experiment(cfg),
    }
}

fn collect<K: Ord>(
    records: &[BenchRecord],
    key: impl Fn(&BenchRecord) -> Option<K>,
    value: impl Fn(&BenchRecord) -> Option<f64>,
) -> BTreeMap<K, Vec<f64>> {
    let mut map: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let (Some(k), Some(v)) = (key(r), value(r)) {
            map.entry(k).or_default().push(v);
        }
    }
    map
}

#[derive(Clone, Debug, Serialize)]
pub struct ShallowPoint {
    pub n: usize,
    pub cf_runtime: Option<MeanSe>,
    pub su_runtime: Option<MeanSe>,
    pub f_cf: Option<MeanSe>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShallowReport {
    pub points: Vec<ShallowPoint>,
    /// Fit of mean CF runtime against `n`.
    pub cf_fit: Option<LogLogFit>,
    pub su_fit: Option<LogLogFit>,
    /// Mean CF runtime over mean SU runtime at the largest `n`.
    pub speedup_at_largest: Option<f64>,
}

/// Runtime fit of one engine over the shallow rows: mean runtime per `n`,
/// then a log-log least-squares line through the means.
pub fn runtime_fit(records: &[BenchRecord], engine: Engine) -> Result<LogLogFit> {
    let by_n = collect(
        records,
        |r| (r.engine == engine && r.experiment == Experiment::Shallow.id()).then_some(r.n),
        |r| Some(r.runtime_s),
    );
    let points: Vec<(f64, f64)> = by_n
        .iter()
        .map(|(&n, ts)| (n as f64, MeanSe::of(ts).expect("non-empty group").mean))
        .collect();
    fit_loglog_slope(&points)
}

pub fn summarize_shallow(records: &[BenchRecord]) -> ShallowReport {
    let shallow = |e: Engine| {
        move |r: &BenchRecord| {
            (r.engine == e && r.experiment == Experiment::Shallow.id()).then_some(r.n)
        }
    };
    let cf = collect(records, shallow(Engine::Cf), |r| Some(r.runtime_s));
    let su = collect(records, shallow(Engine::Su), |r| Some(r.runtime_s));
    let fcf = collect(records, shallow(Engine::Su), |r| r.f_cf);
    let mut sizes: Vec<usize> = cf.keys().chain(su.keys()).copied().collect();
    sizes.sort_unstable();
    sizes.dedup();
    let stat = |m: &BTreeMap<usize, Vec<f64>>, n: usize| m.get(&n).and_then(|v| MeanSe::of(v));
    let points: Vec<ShallowPoint> = sizes
        .iter()
        .map(|&n| ShallowPoint {
            n,
            cf_runtime: stat(&cf, n),
            su_runtime: stat(&su, n),
            f_cf: stat(&fcf, n),
        })
        .collect();
    let speedup_at_largest = points
        .last()
        .and_then(|p| match (p.cf_runtime, p.su_runtime) {
            (Some(c), Some(s)) if s.mean > 0.0 => Some(c.mean / s.mean),
            _ => None,
        });
    ShallowReport {
        cf_fit: runtime_fit(records, Engine::Cf).ok(),
        su_fit: runtime_fit(records, Engine::Su).ok(),
        speedup_at_largest,
        points,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QvRow {
    pub n: usize,
    pub depth: usize,
    pub f_cf: Option<MeanSe>,
    pub f_sv_cf: Option<MeanSe>,
    pub f_sv_su: Option<MeanSe>,
}

pub fn summarize_qv(records: &[BenchRecord]) -> Vec<QvRow> {
    let key = |e: Engine| {
        move |r: &BenchRecord| {
            (r.engine == e && r.experiment == Experiment::QuantumVolume.id())
                .then_some(r.depth.map(|d| (r.n, d)))
                .flatten()
        }
    };
    let fcf = collect(records, key(Engine::Su), |r| r.f_cf);
    let fsv_cf = collect(records, key(Engine::Cf), |r| r.f_sv);
    let fsv_su = collect(records, key(Engine::Su), |r| r.f_sv);
    let mut keys: Vec<(usize, usize)> = fcf
        .keys()
        .chain(fsv_cf.keys())
        .chain(fsv_su.keys())
        .copied()
        .collect();
    keys.sort_unstable();
    keys.dedup();
    let stat = |m: &BTreeMap<(usize, usize), Vec<f64>>, k| m.get(&k).and_then(|v| MeanSe::of(v));
    keys.into_iter()
        .map(|k| QvRow {
            n: k.0,
            depth: k.1,
            f_cf: stat(&fcf, k),
            f_sv_cf: stat(&fsv_cf, k),
            f_sv_su: stat(&fsv_su, k),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct QasmRow {
    pub circuit: String,
    pub n: usize,
    pub f_sv_cf: Option<f64>,
    pub f_sv_su: Option<f64>,
    /// Some engine's fidelity fell below [`EXCLUSION_THRESHOLD`].
    pub excluded: bool,
}

pub fn summarize_qasm(records: &[BenchRecord]) -> Vec<QasmRow> {
    let mut rows: BTreeMap<&str, QasmRow> = BTreeMap::new();
    for r in records {
        let Some(name) = r.experiment.strip_prefix("qasm:") else {
            continue;
        };
        let row = rows.entry(name).or_insert_with(|| QasmRow {
            circuit: name.into(),
            n: r.n,
            f_sv_cf: None,
            f_sv_su: None,
            excluded: false,
        });
        match r.engine {
            Engine::Cf => row.f_sv_cf = r.f_sv,
            Engine::Su => row.f_sv_su = r.f_sv,
            Engine::Sv => {}
        }
        if r.f_sv.is_some_and(|f| f < EXCLUSION_THRESHOLD) {
            row.excluded = true;
        }
    }
    rows.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{library, Gate};

    fn ghz(n: usize) -> Circuit {
        let mut c = Circuit::new(n);
        c.push(Gate::one("h", 0, library::h()).unwrap()).unwrap();
        for q in 0..n - 1 {
            c.push(Gate::two("cx", q, q + 1, library::cx()).unwrap())
                .unwrap();
        }
        c
    }

    #[test]
    fn fidelity_basics() {
        let p = TruncationPolicy::exact();
        let a = run_engine(Engine::Cf, &ghz(4), &p).unwrap().state;
        let FinalState::Cf(cf) = &a else {
            unreachable!()
        };
        let FinalState::Su(su) = run_engine(Engine::Su, &ghz(4), &p).unwrap().state else {
            unreachable!()
        };
        assert!((fidelity_cf(cf, &su).unwrap() - 1.0).abs() < 1e-10);

        let zero = StateVector::zero(4).unwrap();
        let mut flipped = Circuit::new(4);
        flipped
            .push(Gate::one("x", 2, library::x()).unwrap())
            .unwrap();
        let x = run_engine(Engine::Cf, &flipped, &p).unwrap().state;
        assert!(fidelity_sv(&zero, &x).unwrap().abs() < 1e-12);

        let FinalState::Su(other) = run_engine(Engine::Su, &flipped, &p).unwrap().state else {
            unreachable!()
        };
        assert!(fidelity_cf(cf, &other).unwrap() < 0.5 + 1e-12);
        assert!(fidelity_cf(cf, &VidalState::zero(3).unwrap()).is_err());
    }

    #[test]
    fn ghz_rank_one_truncation() {
        let policy = TruncationPolicy::new(1, 0.0).unwrap();
        let exact = StateVector::simulate(&ghz(6)).unwrap();
        for engine in [Engine::Cf, Engine::Su] {
            let run = run_engine(engine, &ghz(6), &policy).unwrap();
            let f = fidelity_sv(&exact, &run.state).unwrap();
            assert!((f - 0.5).abs() < 1e-6, "{engine}: {f}");
            assert_eq!(run.state.max_bond(), Some(1));
        }
    }

    #[test]
    fn small_shallow_run() {
        let file: ConfigFile = serde_json::from_str(
            r#"{"sizes": [6, 8, 10], "repeat": 2, "engines": ["cf", "su", "sv"]}"#,
        )
        .unwrap();
        let cfg = BenchConfig::from_file(Experiment::Shallow, &file).unwrap();
        let out = run_shallow_experiment(&cfg).unwrap();
        assert!(out.failures.is_empty());
        assert_eq!(out.records.len(), 3 * 2 * 3);
        for r in &out.records {
            assert!(r.runtime_s >= 0.0);
            if let Some(f) = r.f_sv.or(r.f_cf) {
                assert!((0.0..=1.0 + 1e-9).contains(&f));
            }
            assert_eq!(r.f_cf.is_some(), r.engine == Engine::Su);
            assert_eq!(r.f_sv.is_some(), r.engine != Engine::Sv);
        }
        let report = summarize_shallow(&out.records);
        assert_eq!(report.points.len(), 3);
        assert!(report.cf_fit.is_some() && report.su_fit.is_some());
        assert!(report.points.iter().all(|p| p.f_cf.unwrap().count == 2));

        // determinism modulo runtime
        let again = run_shallow_experiment(&cfg).unwrap();
        let strip = |rs: &[BenchRecord]| {
            rs.iter()
                .map(|r| BenchRecord {
                    runtime_s: 0.0,
                    ..r.clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&out.records), strip(&again.records));
    }

    #[test]
    fn small_qv_run() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"sizes": [6], "depths": [1, 2], "repeat": 3}"#).unwrap();
        let cfg = BenchConfig::from_file(Experiment::QuantumVolume, &file).unwrap();
        let out = run_qv_experiment(&cfg).unwrap();
        assert_eq!(out.records.len(), 2 * 3 * 3);
        let rows = summarize_qv(&out.records);
        assert_eq!(rows.len(), 2);
        for row in rows {
            // 6 qubits never exceed bond 8 < 10, so nothing is truncated
            assert!((row.f_sv_cf.unwrap().mean - 1.0).abs() < 1e-9);
            assert!((row.f_sv_su.unwrap().mean - 1.0).abs() < 1e-9);
            assert!((row.f_cf.unwrap().mean - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn wrong_experiment_is_rejected() {
        let cfg = BenchConfig::defaults(Experiment::QuantumVolume);
        assert!(run_shallow_experiment(&cfg).is_err());
    }

    #[test]
    fn exclusion_flag() {
        let rec = |name: &str, engine, f| BenchRecord {
            experiment: format!("qasm:{name}"),
            engine,
            n: 3,
            depth: None,
            seed: None,
            runtime_s: 0.1,
            f_cf: None,
            f_sv: f,
            max_bond: None,
            discarded_weight: None,
        };
        let rows = summarize_qasm(&[
            rec("a", Engine::Cf, Some(0.0005)),
            rec("a", Engine::Su, Some(0.9)),
            rec("b", Engine::Cf, Some(0.00049)),
            rec("b", Engine::Su, Some(0.9)),
            rec("b", Engine::Sv, None),
        ]);
        assert_eq!(rows.len(), 2);
        assert!(!rows[0].excluded);
        assert!(rows[1].excluded);
        assert_eq!(rows[1].f_sv_cf, Some(0.00049));
    }
}
