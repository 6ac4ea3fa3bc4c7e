//! Sample files and run manifests.
//!
//! CSV: one row per draw, columns `theta_0 … theta_{d-1}`, plus a final
//! `weight` column for weighted samples. JSON: one flat object
//! `{"dim", "n", "theta", "weights"}` with `theta` row-major and `weights`
//! null for unweighted samples. Reals are written in shortest round-trip
//! form, so reading a file back gives the same bits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::batch::DrawBatch;
use crate::error::{Error, Result};
use crate::posterior::{UnweightedPosterior, WeightedPosterior};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

impl Format {
    /// Guess from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(|e| e.parse().ok())
    }
}

/// A posterior sample as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Weighted(WeightedPosterior),
    Unweighted(UnweightedPosterior),
}

impl Sample {
    pub fn draws(&self) -> &DrawBatch {
        match self {
            Sample::Weighted(p) => p.draws(),
            Sample::Unweighted(p) => p.draws(),
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match self {
            Sample::Weighted(p) => Some(p.weights()),
            Sample::Unweighted(_) => None,
        }
    }
}

impl From<WeightedPosterior> for Sample {
    fn from(p: WeightedPosterior) -> Self {
        Sample::Weighted(p)
    }
}

impl From<UnweightedPosterior> for Sample {
    fn from(p: UnweightedPosterior) -> Self {
        Sample::Unweighted(p)
    }
}

fn real(v: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(v).to_owned()
}

pub fn write_csv<W: Write>(out: W, sample: &Sample) -> Result<()> {
    let draws = sample.draws();
    let weights = sample.weights();
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    let mut header: Vec<String> = (0..draws.dim()).map(|j| format!("theta_{j}")).collect();
    if weights.is_some() {
        header.push("weight".into());
    }
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for (i, theta) in draws.iter().enumerate() {
        record.clear();
        record.extend(theta.iter().map(|&v| real(v)));
        if let Some(ws) = weights {
            record.push(real(ws[i]));
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Sample> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    let weighted = header.iter().next_back() == Some("weight");
    let dim = header.len() - usize::from(weighted);
    for (j, name) in header.iter().take(dim).enumerate() {
        if name != format!("theta_{j}") {
            return Err(Error::Format(format!("column {j} is {name:?}, expected \"theta_{j}\"")));
        }
    }
    if dim == 0 {
        return Err(Error::Format("no parameter columns".into()));
    }
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("row {row}, column {j}: {field:?} is not a number")))?;
            if j < dim {
                coords.push(v);
            } else {
                weights.push(v);
            }
        }
    }
    finish(dim, coords, weighted.then_some(weights))
}

fn finish(dim: usize, coords: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Sample> {
    let draws = DrawBatch::new(dim, coords)?;
    match weights {
        Some(w) => Ok(Sample::Weighted(WeightedPosterior::new(draws, w)?)),
        None => Ok(Sample::Unweighted(UnweightedPosterior::new(draws))),
    }
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    dim: usize,
    n: usize,
    theta: Vec<f64>,
    weights: Option<Vec<f64>>,
}

pub fn write_json<W: Write>(mut out: W, sample: &Sample) -> Result<()> {
    let draws = sample.draws();
    let body = SampleJson {
        dim: draws.dim(),
        n: draws.len(),
        theta: draws.coords().to_vec(),
        weights: sample.weights().map(<[f64]>::to_vec),
    };
    serde_json::to_writer(&mut out, &body)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<Sample> {
    let body: SampleJson = serde_json::from_reader(input)?;
    if body.dim == 0 || body.theta.len() != body.dim * body.n {
        return Err(Error::Format(format!(
            "theta has {} values, expected dim {} x n {}",
            body.theta.len(),
            body.dim,
            body.n
        )));
    }
    finish(body.dim, body.theta, body.weights)
}

pub fn write_sample(path: &Path, sample: &Sample, format: Format) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(out, sample),
        Format::Json => write_json(out, sample),
    }
}

/// Reads either format; JSON is recognised by its leading `{`.
pub fn read_sample(path: &Path) -> Result<Sample> {
    let mut text = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut text)?;
    if text.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        read_json(text.as_slice())
    } else {
        read_csv(text.as_slice())
    }
}

/// Everything needed to rerun a sampling job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub seed: u64,
    pub rng: RngStream,
    /// Command, model and algorithm settings.
    pub config: serde_json::Value,
    pub versions: BTreeMap<String, String>,
    /// Kept in its own field so the rest of the manifest is reproducible.
    pub timestamp: Option<String>,
}

impl RunManifest {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert(env!("CARGO_PKG_NAME").to_owned(), env!("CARGO_PKG_VERSION").to_owned());
        Self {
            seed,
            rng: RngStream::new(seed),
            config,
            versions,
            timestamp: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        out.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}
