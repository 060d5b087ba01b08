//! SemEval-style STS datasets, Pearson correlation and evaluation reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Fingerprint;
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::method::SimilarityMethod;
use crate::text::{TextPipeline, TokenizedSentence};

/// Header of the CSV report.
pub const REPORT_CSV_HEADER: &str = "dataset,method,rank,pearson_x100,n_scored,n_skipped";

/// Upper end of the gold similarity scale.
pub const GOLD_MAX: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct StsPair {
    pub s1: String,
    pub s2: String,
    /// Human judgment in [0, 5]; absent when the gold line is blank.
    pub gold: Option<f64>,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(&text);
    Ok(text.lines().map(str::to_string).collect())
}

/// Reads `sentence1 TAB sentence2` lines and aligns them with the gold file
/// line by line. Columns after the second are ignored.
pub fn load_sts_dataset(
    input_path: impl AsRef<Path>,
    gs_path: impl AsRef<Path>,
) -> Result<Vec<StsPair>> {
    let input_path = input_path.as_ref();
    let gs_path = gs_path.as_ref();
    let inputs = read_lines(input_path)?;
    let golds = read_lines(gs_path)?;
    if inputs.len() != golds.len() {
        return Err(Error::LineCountMismatch {
            path: input_path.to_path_buf(),
            input_lines: inputs.len(),
            gold_lines: golds.len(),
        });
    }

    inputs
        .iter()
        .zip(&golds)
        .enumerate()
        .map(|(idx, (input, gold))| {
            let mut fields = input.split('\t');
            let (Some(s1), Some(s2)) = (fields.next(), fields.next()) else {
                return Err(Error::Dataset {
                    path: input_path.to_path_buf(),
                    line: idx + 1,
                    reason: "expected two tab-separated sentences".into(),
                });
            };
            let gold = gold.trim();
            let gold = if gold.is_empty() {
                None
            } else {
                let value: f64 = gold.parse().map_err(|_| Error::Dataset {
                    path: gs_path.to_path_buf(),
                    line: idx + 1,
                    reason: format!("malformed score {gold:?}"),
                })?;
                if !(0.0..=GOLD_MAX).contains(&value) {
                    return Err(Error::Dataset {
                        path: gs_path.to_path_buf(),
                        line: idx + 1,
                        reason: format!("score {value} outside [0, {GOLD_MAX}]"),
                    });
                }
                Some(value)
            };
            Ok(StsPair {
                s1: s1.to_string(),
                s2: s2.to_string(),
                gold,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub name: String,
    pub input: PathBuf,
    pub gs: PathBuf,
}

/// Parses `name TAB input_path TAB gs_path` lines. Relative paths are
/// resolved against the manifest's directory; blank and `#` lines are skipped.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (idx, line) in read_lines(path)?.iter().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [name, input, gs] = fields.as_slice() else {
            return Err(Error::Dataset {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: "expected name, input path and gold path separated by tabs".into(),
            });
        };
        entries.push(ManifestEntry {
            name: name.to_string(),
            input: base.join(input),
            gs: base.join(gs),
        });
    }
    if entries.is_empty() {
        return Err(Error::EmptyInput("manifest lists no datasets"));
    }
    Ok(entries)
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub pairs: Vec<StsPair>,
}

impl Dataset {
    pub fn load(entry: &ManifestEntry) -> Result<Self> {
        Ok(Dataset {
            name: entry.name.clone(),
            pairs: load_sts_dataset(&entry.input, &entry.gs)?,
        })
    }
}

/// Pearson's correlation coefficient of two equally long samples.
///
/// Computed with centered two-pass sums; the `1/(n-1)` sample normalization
/// cancels in the ratio and is omitted.
pub fn pearson(pred: &[f64], gold: &[f64]) -> Result<f64> {
    if pred.len() != gold.len() {
        return Err(Error::UndefinedCorrelation("samples differ in length"));
    }
    if pred.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two pairs"));
    }
    let n = pred.len() as f64;
    let mean_p = pred.iter().sum::<f64>() / n;
    let mean_g = gold.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, g) in pred.iter().zip(gold) {
        let dp = p - mean_p;
        let dg = g - mean_g;
        sxy += dp * dg;
        sxx += dp * dp;
        syy += dg * dg;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero variance"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// One `(dataset, method)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub dataset: String,
    pub method: String,
    pub rank: Option<usize>,
    /// `None` when the correlation is undefined.
    pub pearson_x100: Option<f64>,
    pub n_scored: usize,
    /// Pairs without gold plus unscoreable pairs.
    pub n_skipped: usize,
    pub n_no_gold: usize,
    pub n_unscoreable: usize,
    pub undefined_reason: Option<String>,
    /// Mean tokenizer output length over both sentences of every pair.
    pub mean_tokens: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub fingerprint: Fingerprint,
    pub rows: Vec<EvalRow>,
}

fn fmt_float(x: f64) -> String {
    format!("{x:.6}")
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_field(&row.dataset),
                row.method,
                row.rank.map(|r| r.to_string()).unwrap_or_default(),
                row.pearson_x100
                    .map_or_else(|| "undefined".to_string(), fmt_float),
                row.n_scored,
                row.n_skipped
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Looks up a row by dataset and method label (`subspace:4`, `average`).
    pub fn row(&self, dataset: &str, label: &str) -> Option<&EvalRow> {
        self.rows
            .iter()
            .find(|r| r.dataset == dataset && row_label(r) == label)
    }

    /// Datasets where `a` beats `b`, over datasets where both are defined.
    pub fn wins(&self, a: &str, b: &str) -> (usize, usize) {
        let mut datasets: Vec<&str> = self.rows.iter().map(|r| r.dataset.as_str()).collect();
        datasets.dedup();
        let mut wins = 0;
        let mut total = 0;
        for ds in datasets {
            let pa = self.row(ds, a).and_then(|r| r.pearson_x100);
            let pb = self.row(ds, b).and_then(|r| r.pearson_x100);
            if let (Some(pa), Some(pb)) = (pa, pb) {
                total += 1;
                if pa > pb {
                    wins += 1;
                }
            }
        }
        (wins, total)
    }
}

fn row_label(row: &EvalRow) -> String {
    match row.rank {
        Some(r) => format!("{}:{r}", row.method),
        None => row.method.clone(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scores every gold-labelled pair of every dataset with every method and
/// correlates against gold. Pair scoring runs on the current rayon pool;
/// rows come out in (dataset, method) order.
pub fn evaluate(
    datasets: &[Dataset],
    methods: &[Box<dyn SimilarityMethod>],
    store: &EmbeddingStore,
    pipeline: &TextPipeline,
    fingerprint: Fingerprint,
) -> Result<EvalReport> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput("no datasets"));
    }
    if methods.is_empty() {
        return Err(Error::EmptyInput("no methods"));
    }

    let mut rows = Vec::new();
    for dataset in datasets {
        let prepared: Vec<(TokenizedSentence, TokenizedSentence, Option<f64>)> = dataset
            .pairs
            .par_iter()
            .map(|p| (pipeline.prepare(&p.s1), pipeline.prepare(&p.s2), p.gold))
            .collect();
        let total_tokens: usize = prepared.iter().map(|(a, b, _)| a.n_raw + b.n_raw).sum();
        let mean_tokens = if prepared.is_empty() {
            0.0
        } else {
            total_tokens as f64 / (2 * prepared.len()) as f64
        };
        let n_no_gold = prepared.iter().filter(|(_, _, g)| g.is_none()).count();

        for method in methods {
            let scored: Vec<Option<(f64, f64)>> = prepared
                .par_iter()
                .filter_map(|(a, b, gold)| gold.map(|g| (a, b, g)))
                .map(|(a, b, g)| match method.score(a, b, store) {
                    Ok(r) => Ok(Some((r.score, g))),
                    Err(Error::Unrepresentable | Error::ZeroNormAverage) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            let (pred, gold): (Vec<f64>, Vec<f64>) = scored.iter().flatten().copied().unzip();
            let n_unscoreable = scored.len() - pred.len();
            let (pearson_x100, undefined_reason) = match pearson(&pred, &gold) {
                Ok(r) => (Some(100.0 * r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            rows.push(EvalRow {
                dataset: dataset.name.clone(),
                method: method.name().to_string(),
                rank: method.rank(),
                pearson_x100,
                n_scored: pred.len(),
                n_skipped: n_no_gold + n_unscoreable,
                n_no_gold,
                n_unscoreable,
                undefined_reason,
                mean_tokens,
            });
        }
    }
    Ok(EvalReport { fingerprint, rows })
}
