//! Experiment configuration. A config file is a JSON object whose fields all
//! default to the published parameters of the chosen experiment.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::record::Engine;
use crate::error::{Error, Result};
use crate::statevector::MAX_QUBITS;
use crate::tensor::TruncationPolicy;

/// Environment variable that overrides the QASM corpus directory.
pub const CORPUS_ENV: &str = "MPSIM_QASM_CORPUS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Shallow,
    QuantumVolume,
    Qasm,
}

impl Experiment {
    /// Value of the `experiment` CSV column (QASM rows append `:<stem>`).
    pub fn id(self) -> &'static str {
        match self {
            Experiment::Shallow => "shallow",
            Experiment::QuantumVolume => "qv",
            Experiment::Qasm => "qasm",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shallow" => Ok(Experiment::Shallow),
            "qv" | "quantum_volume" => Ok(Experiment::QuantumVolume),
            "qasm" => Ok(Experiment::Qasm),
            other => Err(Error::InvalidArgument(format!(
                "unknown experiment '{other}' (expected shallow, qv or qasm)"
            ))),
        }
    }
}

/// On-disk form; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub engines: Option<Vec<Engine>>,
    pub sizes: Option<Vec<usize>>,
    pub depths: Option<Vec<usize>>,
    pub seeds: Option<Vec<u64>>,
    /// Shorthand for `seeds = 0..repeat`; ignored when `seeds` is given.
    pub repeat: Option<u64>,
    pub max_kept: Option<usize>,
    pub rel_cutoff: Option<f64>,
    pub corpus_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub experiment: Experiment,
    pub engines: Vec<Engine>,
    pub sizes: Vec<usize>,
    pub depths: Vec<usize>,
    pub seeds: Vec<u64>,
    pub policy: TruncationPolicy,
    pub corpus_dir: Option<PathBuf>,
}

impl BenchConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let policy = |k| TruncationPolicy::new(k, 1e-4).expect("valid default policy");
        let mut cfg = match experiment {
            Experiment::Shallow => Self {
                experiment,
                engines: vec![Engine::Cf, Engine::Su],
                sizes: vec![128, 256, 512, 1024, 2048],
                depths: Vec::new(),
                seeds: (0..4).collect(),
                policy: policy(5),
                corpus_dir: None,
            },
            Experiment::QuantumVolume => Self {
                experiment,
                engines: vec![Engine::Cf, Engine::Su, Engine::Sv],
                sizes: vec![15],
                depths: (1..=6).collect(),
                seeds: (0..29).collect(),
                policy: policy(10),
                corpus_dir: None,
            },
            Experiment::Qasm => Self {
                experiment,
                engines: vec![Engine::Cf, Engine::Su, Engine::Sv],
                sizes: Vec::new(),
                depths: Vec::new(),
                seeds: Vec::new(),
                policy: policy(3),
                corpus_dir: None,
            },
        };
        cfg.apply_env();
        cfg
    }

    fn apply_env(&mut self) {
        if self.experiment == Experiment::Qasm {
            if let Some(dir) = std::env::var_os(CORPUS_ENV).filter(|d| !d.is_empty()) {
                self.corpus_dir = Some(PathBuf::from(dir));
            }
        }
    }

    pub fn from_file(experiment: Experiment, file: &ConfigFile) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        if let Some(e) = &file.engines {
            cfg.engines = e.clone();
        }
        if let Some(s) = &file.sizes {
            cfg.sizes = s.clone();
        }
        if let Some(d) = &file.depths {
            cfg.depths = d.clone();
        }
        match (&file.seeds, file.repeat) {
            (Some(s), _) => cfg.seeds = s.clone(),
            (None, Some(r)) => cfg.seeds = (0..r).collect(),
            (None, None) => {}
        }
        if let Some(k) = file.max_kept {
            cfg.policy.max_kept = k;
        }
        if let Some(c) = file.rel_cutoff {
            cfg.policy.rel_cutoff = c;
        }
        if file.corpus_dir.is_some() {
            cfg.corpus_dir = file.corpus_dir.clone();
        }
        cfg.apply_env();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(experiment: Experiment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_file(experiment, &serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate()?;
        if self.engines.is_empty() {
            return Err(Error::InvalidArgument("no engines selected".into()));
        }
        if self.experiment != Experiment::Qasm {
            if self.sizes.is_empty() || self.seeds.is_empty() {
                return Err(Error::InvalidArgument(
                    "sizes and seeds must be non-empty".into(),
                ));
            }
            if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
                return Err(Error::InvalidArgument(format!(
                    "size {n} is below 2 qubits"
                )));
            }
        }
        if self.experiment == Experiment::QuantumVolume
            && (self.depths.is_empty() || self.depths.contains(&0))
        {
            return Err(Error::InvalidArgument(
                "depths must be non-empty and positive".into(),
            ));
        }
        if self.engines.contains(&Engine::Sv) {
            if let Some(&n) = self.sizes.iter().find(|&&n| n > MAX_QUBITS) {
                return Err(Error::Capacity {
                    requested: n,
                    limit: MAX_QUBITS,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_defaults() {
        let s = BenchConfig::defaults(Experiment::Shallow);
        assert_eq!(s.sizes, vec![128, 256, 512, 1024, 2048]);
        assert_eq!(s.seeds.len(), 4);
        assert_eq!((s.policy.max_kept, s.policy.rel_cutoff), (5, 1e-4));

        let q = BenchConfig::defaults(Experiment::QuantumVolume);
        assert_eq!(
            (q.sizes.clone(), q.depths.clone(), q.seeds.len()),
            (vec![15], (1..=6).collect(), 29)
        );
        assert_eq!(q.policy.max_kept, 10);

        assert_eq!(BenchConfig::defaults(Experiment::Qasm).policy.max_kept, 3);
        for e in [Experiment::Shallow, Experiment::QuantumVolume] {
            BenchConfig::defaults(e).validate().unwrap();
        }
    }

    #[test]
    fn overlay() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"sizes": [8, 16], "repeat": 2, "max_kept": 7}"#).unwrap();
        let cfg = BenchConfig::from_file(Experiment::Shallow, &file).unwrap();
        assert_eq!(cfg.sizes, vec![8, 16]);
        assert_eq!(cfg.seeds, vec![0, 1]);
        assert_eq!(cfg.policy.max_kept, 7);
        assert_eq!(cfg.policy.rel_cutoff, 1e-4);

        let empty = BenchConfig::from_file(Experiment::Shallow, &ConfigFile::default()).unwrap();
        assert_eq!(empty, BenchConfig::defaults(Experiment::Shallow));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"sizez": [1]}"#).is_err());
    }

    #[test]
    fn sv_size_limit() {
        let file: ConfigFile =
            serde_json::from_str(r#"{"engines": ["cf", "sv"], "sizes": [31]}"#).unwrap();
        assert!(matches!(
            BenchConfig::from_file(Experiment::Shallow, &file),
            Err(Error::Capacity { .. })
        ));
        let file: ConfigFile = serde_json::from_str(r#"{"rel_cutoff": 1.5}"#).unwrap();
        assert!(BenchConfig::from_file(Experiment::Shallow, &file).is_err());
    }

    #[test]
    fn experiment_names() {
        assert_eq!(
            "qv".parse::<Experiment>().unwrap(),
            Experiment::QuantumVolume
        );
        assert_eq!(
            "quantum_volume".parse::<Experiment>().unwrap(),
            Experiment::QuantumVolume
        );
        assert!("deep".parse::<Experiment>().is_err());
    }
}
