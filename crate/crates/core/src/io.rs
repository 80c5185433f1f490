//! Experiment config files, transcript streams and run manifests.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mitigate::{ProtocolParams, RunSetup};
use crate::noise::{default_base_model, NoiseSchedule, DEFAULT_EXPERIMENT_GAIN};
use crate::pattern::{check_embedding, two_colour, CouplingMap, KColouring, MeasurementPattern, PatternFile, Vertex};
use crate::rounds::{ComputationRoundSpec, DecisionMap, ExecOrder, RoundTranscript, TestRoundSpec};
use crate::sim::NoiseModel;
use crate::Error;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BASKETMIT_OUT";

fn default_gain() -> f64 {
    DEFAULT_EXPERIMENT_GAIN
}

/// On-disk experiment description. Relative paths are resolved against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pattern: PathBuf,
    /// List of vertex lists; a 2-colouring is computed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colouring: Option<PathBuf>,
    /// When given, the pattern graph must embed into it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_map: Option<PathBuf>,
    /// Base noise model; the shipped calibrated model when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_model: Option<PathBuf>,
    #[serde(default = "default_gain")]
    pub noise_gain: f64,
    pub noise: NoiseSchedule,
    pub input: Vec<u8>,
    /// Output strings (first output most significant) with decision bit 1.
    pub accept: Vec<String>,
    pub protocol: ProtocolParams,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub exec_order: ExecOrder,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self, Error> {
        Ok(Self {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }

    pub fn matches(&self) -> Result<bool, Error> {
        Ok(sha256_file(&self.path)? == self.sha256)
    }
}

pub fn sha256_file(path: &Path) -> Result<String, Error> {
    let mut f = File::open(path).map_err(|e| io_context(e, path))?;
    let mut h = Sha256::new();
    std::io::copy(&mut f, &mut h)?;
    Ok(hex::encode(h.finalize()))
}

fn io_context(e: std::io::Error, path: &Path) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let f = File::open(path).map_err(|e| io_context(e, path))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_context(e, path))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// A config with every referenced file loaded and checked.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub pattern: MeasurementPattern,
    pub colouring: KColouring,
    pub base: NoiseModel,
    pub decision: DecisionMap,
    /// Pattern vertex to physical qubit, when a coupling map was given.
    pub embedding: Option<Vec<usize>>,
    pub inputs: Vec<FileDigest>,
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let config: ExperimentConfig = read_json(path)?;
        let base_dir = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let mut inputs = vec![FileDigest::of(path)?];
        let resolved = config.resolved(&base_dir);
        let file: PatternFile = read_json(&resolved.pattern)?;
        inputs.push(FileDigest::of(&resolved.pattern)?);
        let pattern = MeasurementPattern::from_file(&file)?;
        let colouring = match &resolved.colouring {
            Some(p) => {
                inputs.push(FileDigest::of(p)?);
                KColouring::new(read_json::<Vec<Vec<Vertex>>>(p)?, pattern.graph())?
            }
            None => two_colour(pattern.graph())
                .map_err(|c| Error::Config(format!("pattern graph is not 2-colourable: {c}")))?,
        };
        let embedding = match &resolved.coupling_map {
            Some(p) => {
                inputs.push(FileDigest::of(p)?);
                let map: CouplingMap = read_json(p)?;
                let m = check_embedding(pattern.graph(), &map.to_graph()?)
                    .ok_or_else(|| Error::Config(format!("pattern does not embed into {}", p.display())))?;
                Some(m)
            }
            None => None,
        };
        let base = match &resolved.noise_model {
            Some(p) => {
                inputs.push(FileDigest::of(p)?);
                read_json(p)?
            }
            None => default_base_model(),
        };
        base.validate()?;
        config.noise.validate().map_err(|e| Error::Config(e.to_string()))?;
        config.protocol.validate().map_err(|e| Error::Config(e.to_string()))?;
        let decision = DecisionMap::accepting(pattern.outputs().len(), &config.accept)?;
        ComputationRoundSpec::new(&pattern, config.input.clone(), decision.clone())?;
        Ok(Self {
            config: resolved,
            pattern,
            colouring,
            base,
            decision,
            embedding,
            inputs,
        })
    }

    pub fn setup(&self) -> RunSetup<'_> {
        RunSetup {
            computation: ComputationRoundSpec::new(&self.pattern, self.config.input.clone(), self.decision.clone())
                .expect("checked on load"),
            test: TestRoundSpec::new(&self.pattern, &self.colouring).expect("colouring matches pattern"),
            base: self.base,
            gain: self.config.noise_gain,
            noise: self.config.noise.clone(),
            master_seed: self.config.seed,
            order: self.config.exec_order,
        }
    }
}

impl ExperimentConfig {
    fn resolved(&self, base_dir: &Path) -> Self {
        let r = |p: &PathBuf| if p.is_absolute() { p.clone() } else { base_dir.join(p) };
        Self {
            pattern: r(&self.pattern),
            colouring: self.colouring.as_ref().map(r),
            coupling_map: self.coupling_map.as_ref().map(r),
            noise_model: self.noise_model.as_ref().map(r),
            output_dir: self.output_dir.as_ref().map(r),
            ..self.clone()
        }
    }
}

/// Flag, then config, then `$BASKETMIT_OUT`, then `./out`.
pub fn output_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes one JSON object per line and returns the stream's SHA-256.
pub fn write_transcripts<'a, I>(path: &Path, transcripts: I) -> Result<String, Error>
where
    I: IntoIterator<Item = &'a RoundTranscript>,
{
    let file = File::create(path).map_err(|e| io_context(e, path))?;
    let mut w = BufWriter::new(file);
    let mut h = Sha256::new();
    let mut line = Vec::new();
    for t in transcripts {
        line.clear();
        serde_json::to_writer(&mut line, t)?;
        line.push(b'\n');
        h.update(&line);
        w.write_all(&line)?;
    }
    w.flush()?;
    Ok(hex::encode(h.finalize()))
}

pub fn read_transcripts(path: &Path) -> Result<Vec<RoundTranscript>, Error> {
    let f = File::open(path).map_err(|e| io_context(e, path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t = serde_json::from_str(&line)
            .map_err(|e| Error::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push(t);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub repetitions: usize,
    pub inputs: Vec<FileDigest>,
    pub transcripts: FileDigest,
}

impl RunManifest {
    /// Paths of inputs whose contents changed since the run.
    pub fn stale_inputs(&self) -> Result<Vec<PathBuf>, Error> {
        let mut out = Vec::new();
        for d in self.inputs.iter().chain(std::iter::once(&self.transcripts)) {
            if !d.matches()? {
                out.push(d.path.clone());
            }
        }
        Ok(out)
    }
}
