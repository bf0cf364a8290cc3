//! Result rows and their CSV / JSON encodings.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Header of every results CSV.
pub const CSV_HEADER: &str =
    "experiment,engine,n,depth,seed,runtime_s,f_cf,f_sv,max_bond,discarded_weight";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Canonical-form updates with QR sweeps.
    Cf,
    /// Simple update on the Vidal form.
    Su,
    /// Dense state vector.
    Sv,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Cf => "cf",
            Engine::Su => "su",
            Engine::Sv => "sv",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cf" => Ok(Engine::Cf),
            "su" => Ok(Engine::Su),
            "sv" => Ok(Engine::Sv),
            other => Err(Error::InvalidArgument(format!(
                "unknown engine '{other}' (expected cf, su or sv)"
            ))),
        }
    }
}

/// One (experiment, engine, circuit) cell. Inapplicable metrics are `None`
/// and serialize as empty CSV fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub experiment: String,
    pub engine: Engine,
    pub n: usize,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    /// Wall time of the gate loop only.
    pub runtime_s: f64,
    /// `|⟨ψ_CF|ψ_SU⟩|²`, reported on the SU row.
    pub f_cf: Option<f64>,
    pub f_sv: Option<f64>,
    pub max_bond: Option<usize>,
    pub discarded_weight: Option<f64>,
}

/// A cell that could not be run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellFailure {
    pub experiment: String,
    pub engine: Option<Engine>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub reason: String,
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!(
            "unexpected CSV header '{}'",
            header.join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_json<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}
