//! Implementations behind the `subspace-sts` subcommands.
//!
//! Each command takes a [`RunConfig`], returns a structured result and can
//! render it; the binary only parses flags and writes the output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::{build_unigram, energy_study, EnergyStudyResult, RandomBaseline};
use crate::config::{Fingerprint, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::method::{build_method, Representation};
use crate::representation::build_subspace;
use crate::sts::{evaluate, load_manifest, Dataset, EvalReport};
use crate::text::{filter_function_words, stack_vectors, tokenize};

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimOutput {
    pub method: String,
    pub score: f64,
    /// Effective ranks of the two subspaces; absent for the average method.
    pub n_eff: Option<(usize, usize)>,
    pub sigmas: Vec<f64>,
    pub oov: (Vec<String>, Vec<String>),
    pub fingerprint: Fingerprint,
}

impl SimOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).expect("serializable") + "\n",
            OutputFormat::Csv => {
                let mut out = String::new();
                let _ = writeln!(out, "method: {}", self.method);
                let _ = writeln!(out, "score: {}", self.score);
                match self.n_eff {
                    Some((a, b)) => {
                        let _ = writeln!(out, "n_eff: {a} {b}");
                    }
                    None => out.push_str("n_eff: -\n"),
                }
                let _ = writeln!(out, "sigmas: {}", join_floats(&self.sigmas));
                let _ = writeln!(
                    out,
                    "oov: {} | {}",
                    self.oov.0.join(" "),
                    self.oov.1.join(" ")
                );
                out
            }
        }
    }
}

pub fn cmd_sim(config: &RunConfig, s1: &str, s2: &str, method: &str) -> Result<SimOutput> {
    config.validate()?;
    let method = build_method(method, &config.method_options()?)?;
    let store = config.load_store()?;
    let pipeline = config.pipeline()?;
    let a = pipeline.prepare(s1);
    let b = pipeline.prepare(s2);
    let ra = method.represent(&a, &store)?;
    let rb = method.represent(&b, &store)?;
    let result = method.similarity(&ra, &rb)?;
    let n_eff = match (&ra, &rb) {
        (Representation::Subspace(x), Representation::Subspace(y)) => Some((x.rank(), y.rank())),
        _ => None,
    };
    Ok(SimOutput {
        method: method.label(),
        score: result.score,
        n_eff,
        sigmas: result.sigmas,
        oov: (
            stack_vectors(&a.tokens, &store).1,
            stack_vectors(&b.tokens, &store).1,
        ),
        fingerprint: config.fingerprint(&pipeline, &store),
    })
}

impl EvalReport {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Human-readable table for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let label = match row.rank {
                Some(r) => format!("{}:{r}", row.method),
                None => row.method.clone(),
            };
            let value = row
                .pearson_x100
                .map_or_else(|| "undefined".to_string(), |p| format!("{p:.2}"));
            let _ = writeln!(
                out,
                "{:<28} {:<12} {:>9}  scored={} skipped={}",
                row.dataset, label, value, row.n_scored, row.n_skipped
            );
        }
        out
    }
}

/// Runs every method on every dataset in the manifest. The rendered report is
/// written to `out` when given.
pub fn cmd_eval(
    config: &RunConfig,
    manifest: &Path,
    methods: &[String],
    out: Option<&Path>,
) -> Result<EvalReport> {
    config.validate()?;
    let opts = config.method_options()?;
    let methods = methods
        .iter()
        .map(|m| build_method(m, &opts))
        .collect::<Result<Vec<_>>>()?;
    let datasets = load_manifest(manifest)?
        .iter()
        .map(Dataset::load)
        .collect::<Result<Vec<_>>>()?;
    let store = config.load_store()?;
    let pipeline = config.pipeline()?;
    let fingerprint = config.fingerprint(&pipeline, &store);
    let report =
        config.with_pool(|| evaluate(&datasets, &methods, &store, &pipeline, fingerprint))??;
    if let Some(path) = out {
        write_file(path, &report.render(config.output))?;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyOutput {
    pub fingerprint: Fingerprint,
    pub corpus: String,
    pub study: EnergyStudyResult,
}

/// Files written by [`cmd_energy`] inside the output directory.
pub const ENERGY_FILES: [&str; 3] = ["energy.csv", "energy_hist.csv", "energy.json"];

fn read_corpus(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Energy study over a one-sentence-per-line corpus. Writes the summary CSV,
/// the histogram CSV and a JSON record (with seed and fingerprint) to `out_dir`.
pub fn cmd_energy(
    config: &RunConfig,
    corpus: &Path,
    ranks: &[usize],
    random_baseline: bool,
    unigram_from: Option<&Path>,
    out_dir: Option<&Path>,
) -> Result<EnergyOutput> {
    config.validate()?;
    let lines = read_corpus(corpus)?;
    if lines.is_empty() {
        return Err(Error::EmptyInput("corpus has no lines"));
    }
    let store = config.load_store()?;
    let pipeline = config.pipeline()?;
    let backend = config.backend()?;

    let baseline = if random_baseline {
        let unigram = match unigram_from {
            Some(path) => {
                let tokens: Vec<String> = read_corpus(path)?
                    .iter()
                    .flat_map(|l| pipeline.prepare(l).tokens)
                    .collect();
                Some(build_unigram(&tokens, &store)?)
            }
            None => None,
        };
        Some(RandomBaseline {
            seed: config.seed,
            unigram,
        })
    } else {
        None
    };

    let study = config.with_pool(|| {
        let sentences: Vec<_> = lines.iter().map(|l| pipeline.prepare(l)).collect();
        energy_study(
            &sentences,
            &store,
            ranks,
            config.center,
            backend.as_ref(),
            baseline,
        )
    })??;

    let output = EnergyOutput {
        fingerprint: config.fingerprint(&pipeline, &store),
        corpus: corpus.display().to_string(),
        study,
    };
    if let Some(dir) = out_dir {
        let [summary, hist, json] = ENERGY_FILES.map(|f| dir.join(f));
        write_file(&summary, &output.study.to_csv())?;
        write_file(&hist, &output.study.histogram_csv())?;
        write_file(
            &json,
            &(serde_json::to_string_pretty(&output).expect("serializable") + "\n"),
        )?;
    }
    Ok(output)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InspectOutput {
    pub tokens: Vec<String>,
    pub filtered: Vec<String>,
    pub oov: Vec<String>,
    /// `None` when the sentence has no representable content.
    pub n_eff: Option<usize>,
    pub component_energy: Vec<f64>,
    pub energy_captured: Option<f64>,
}

impl InspectOutput {
    pub fn render(&self, format: OutputFormat) -> String {
        if format == OutputFormat::Json {
            return serde_json::to_string_pretty(self).expect("serializable") + "\n";
        }
        let mut out = String::new();
        let _ = writeln!(out, "tokens: {}", self.tokens.join(" "));
        let _ = writeln!(out, "filtered: {}", self.filtered.join(" "));
        let _ = writeln!(out, "oov: {}", self.oov.join(" "));
        match (self.n_eff, self.energy_captured) {
            (Some(n), Some(e)) => {
                let _ = writeln!(out, "n_eff: {n}");
                let _ = writeln!(
                    out,
                    "component_energy: {}",
                    join_floats(&self.component_energy)
                );
                let _ = writeln!(out, "energy_captured: {e}");
            }
            _ => out.push_str("unrepresentable: no in-vocabulary content words\n"),
        }
        out
    }
}

pub fn cmd_inspect(config: &RunConfig, sentence: &str) -> Result<InspectOutput> {
    config.validate()?;
    let store = config.load_store()?;
    let pipeline = config.pipeline()?;
    let raw = tokenize(sentence);
    let filtered = match pipeline.stoplist() {
        Some(sl) => filter_function_words(&raw, sl),
        None => raw.clone(),
    };
    let (_, oov) = stack_vectors(&filtered.tokens, &store);
    let backend = config.backend()?;
    let rep = match build_subspace(
        &filtered,
        &store,
        config.rank,
        config.center,
        backend.as_ref(),
    ) {
        Ok(rep) => Some(rep),
        Err(Error::Unrepresentable) => None,
        Err(e) => return Err(e),
    };
    Ok(InspectOutput {
        tokens: raw.tokens,
        filtered: filtered.tokens,
        oov,
        n_eff: rep.as_ref().map(|r| r.rank()),
        component_energy: rep
            .as_ref()
            .map(|r| r.basis.component_energy.clone())
            .unwrap_or_default(),
        energy_captured: rep.as_ref().map(|r| r.energy_captured),
    })
}

/// The active stoplist, one entry per line.
pub fn cmd_stoplist(config: &RunConfig) -> Result<String> {
    let pipeline = RunConfig {
        stopword_filter: true,
        ..config.clone()
    }
    .pipeline()?;
    let sl = pipeline.stoplist().expect("filter enabled");
    Ok(sl.iter().map(|w| format!("{w}\n")).collect())
}

/// Registered methods and SVD backends with their descriptions.
pub fn cmd_methods() -> String {
    let mut out = String::new();
    for (kind, entries) in [
        (
            "methods",
            crate::method::method_registry()
                .describe()
                .collect::<Vec<_>>(),
        ),
        (
            "svd backends",
            crate::linalg::svd_registry().describe().collect::<Vec<_>>(),
        ),
    ] {
        let _ = writeln!(out, "{kind}:");
        for (name, desc) in entries {
            let _ = writeln!(out, "  {name:<10} {desc}");
        }
    }
    out
}
