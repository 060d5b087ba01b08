//! Energy captured by the leading principal components of sentence
//! matrices, for a real corpus and for i.i.d. unigram pseudo-sentences.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::linalg::{captured_energy, center_columns, SvdBackend};
use crate::text::{stack_vectors, TokenizedSentence};

pub const HISTOGRAM_BINS: usize = 20;

pub const ENERGY_CSV_HEADER: &str = "rank,population,mean,std,n";
pub const HISTOGRAM_CSV_HEADER: &str = "rank,population,bin_lo,bin_hi,count";

/// Maximum-likelihood unigram distribution over a token stream.
#[derive(Clone, Debug)]
pub struct UnigramModel {
    tokens: Vec<String>,
    counts: Vec<u64>,
    total: u64,
    sampler: WeightedIndex<u64>,
}

impl UnigramModel {
    /// Builds the model from token counts; zero counts are dropped.
    pub fn from_counts(counts: BTreeMap<String, u64>) -> Result<Self> {
        let (tokens, counts): (Vec<String>, Vec<u64>) =
            counts.into_iter().filter(|(_, c)| *c > 0).unzip();
        if tokens.is_empty() {
            return Err(Error::EmptyInput("unigram corpus has no usable tokens"));
        }
        let total = counts.iter().sum();
        let sampler = WeightedIndex::new(&counts).expect("positive weights");
        Ok(UnigramModel {
            tokens,
            counts,
            total,
            sampler,
        })
    }

    pub fn probability(&self, token: &str) -> f64 {
        match self.tokens.binary_search_by(|t| t.as_str().cmp(token)) {
            Ok(i) => self.counts[i] as f64 / self.total as f64,
            Err(_) => 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// `(token, probability)` in token order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.tokens
            .iter()
            .zip(&self.counts)
            .map(|(t, &c)| (t.as_str(), c as f64 / self.total as f64))
    }

    fn sample<'a>(&'a self, rng: &'a mut ChaCha8Rng) -> impl Iterator<Item = &'a str> + 'a {
        std::iter::repeat_with(move || self.tokens[self.sampler.sample(rng)].as_str())
    }
}

/// Counts the tokens of `corpus` that the store can embed.
pub fn build_unigram<I, S>(corpus: I, store: &EmbeddingStore) -> Result<UnigramModel>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = BTreeMap::new();
    for token in corpus {
        let token = token.as_ref();
        if store.contains(token) {
            *counts.entry(token.to_string()).or_insert(0u64) += 1;
        }
    }
    UnigramModel::from_counts(counts)
}

/// One sentence per requested length, tokens drawn i.i.d. from `model`.
/// The same seed always yields the same sentences.
pub fn random_sentences(
    model: &UnigramModel,
    lengths: &[usize],
    seed: u64,
) -> Vec<TokenizedSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lengths
        .iter()
        .map(|&len| {
            let tokens = model
                .sample(&mut rng)
                .take(len)
                .map(str::to_string)
                .collect();
            TokenizedSentence::from_tokens(tokens)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankStats {
    pub rank: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Counts over [`HISTOGRAM_BINS`] uniform bins on [0, 1].
    pub histogram: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PopulationStats {
    pub population: String,
    pub n_sentences: usize,
    pub n_skipped: usize,
    pub per_rank: Vec<RankStats>,
    /// Per scored sentence, fractions in `ranks` order.
    #[serde(skip)]
    pub fractions: Vec<Vec<f64>>,
    /// Stacked column count of every scored sentence.
    #[serde(skip)]
    pub lengths: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyStudyResult {
    pub ranks: Vec<usize>,
    pub seed: Option<u64>,
    pub real: PopulationStats,
    pub random: Option<PopulationStats>,
}

/// Energy fractions of one sentence at each rank, with the stacked column count.
pub fn sentence_energy(
    sent: &TokenizedSentence,
    store: &EmbeddingStore,
    ranks: &[usize],
    center: bool,
    backend: &dyn SvdBackend,
) -> Result<(Vec<f64>, usize)> {
    let (matrix, _) = stack_vectors(&sent.tokens, store);
    if matrix.ncols() == 0 {
        return Err(Error::Unrepresentable);
    }
    let m = matrix.ncols();
    let matrix = if center {
        center_columns(&matrix)
    } else {
        matrix
    };
    let svd = backend.decompose(&matrix)?;
    if svd.sigma[0] == 0.0 {
        return Err(Error::Unrepresentable);
    }
    Ok((
        ranks
            .iter()
            .map(|&n| captured_energy(&svd.sigma, n))
            .collect(),
        m,
    ))
}

fn histogram(values: impl Iterator<Item = f64>) -> Vec<u64> {
    let mut bins = vec![0u64; HISTOGRAM_BINS];
    for v in values {
        let idx = ((v * HISTOGRAM_BINS as f64).floor() as usize).min(HISTOGRAM_BINS - 1);
        bins[idx] += 1;
    }
    bins
}

/// Aggregates per-sentence energy fractions. Unrepresentable sentences are
/// skipped and counted; other numerical failures abort the study.
pub fn population_stats(
    population: &str,
    sentences: &[TokenizedSentence],
    store: &EmbeddingStore,
    ranks: &[usize],
    center: bool,
    backend: &dyn SvdBackend,
) -> Result<PopulationStats> {
    let results: Vec<Result<(Vec<f64>, usize)>> = sentences
        .par_iter()
        .map(|s| sentence_energy(s, store, ranks, center, backend))
        .collect();
    let mut fractions = Vec::new();
    let mut lengths = Vec::new();
    let mut n_skipped = 0;
    for r in results {
        match r {
            Ok((f, m)) => {
                fractions.push(f);
                lengths.push(m);
            }
            Err(Error::Unrepresentable) => n_skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if fractions.is_empty() {
        return Err(Error::EmptyInput("no representable sentences"));
    }

    let n = fractions.len() as f64;
    let per_rank = ranks
        .iter()
        .enumerate()
        .map(|(k, &rank)| {
            let mean = fractions.iter().map(|f| f[k]).sum::<f64>() / n;
            let var = fractions.iter().map(|f| (f[k] - mean).powi(2)).sum::<f64>() / n;
            RankStats {
                rank,
                mean,
                std: var.sqrt(),
                histogram: histogram(fractions.iter().map(|f| f[k])),
            }
        })
        .collect();

    Ok(PopulationStats {
        population: population.to_string(),
        n_sentences: fractions.len(),
        n_skipped,
        per_rank,
        fractions,
        lengths,
    })
}

/// Settings for the random-sentence baseline.
#[derive(Clone, Debug)]
pub struct RandomBaseline {
    pub seed: u64,
    /// Defaults to the unigram distribution of the real corpus itself.
    pub unigram: Option<UnigramModel>,
}

/// Energy study over prepared sentences. When a baseline is requested, one
/// random sentence is drawn per scored real sentence, with the same length.
pub fn energy_study(
    sentences: &[TokenizedSentence],
    store: &EmbeddingStore,
    ranks: &[usize],
    center: bool,
    backend: &dyn SvdBackend,
    baseline: Option<RandomBaseline>,
) -> Result<EnergyStudyResult> {
    if ranks.is_empty() || ranks.contains(&0) {
        return Err(Error::Config(
            "ranks must be a non-empty list of positive integers".into(),
        ));
    }
    let real = population_stats("real", sentences, store, ranks, center, backend)?;
    let (random, seed) = match baseline {
        None => (None, None),
        Some(RandomBaseline { seed, unigram }) => {
            let model = match unigram {
                Some(m) => m,
                None => build_unigram(sentences.iter().flat_map(|s| s.tokens.iter()), store)?,
            };
            let fakes = random_sentences(&model, &real.lengths, seed);
            let stats = population_stats("random", &fakes, store, ranks, center, backend)?;
            (Some(stats), Some(seed))
        }
    };
    Ok(EnergyStudyResult {
        ranks: ranks.to_vec(),
        seed,
        real,
        random,
    })
}

impl EnergyStudyResult {
    pub fn populations(&self) -> impl Iterator<Item = &PopulationStats> {
        std::iter::once(&self.real).chain(self.random.as_ref())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{ENERGY_CSV_HEADER}\n");
        for (k, rank) in self.ranks.iter().enumerate() {
            for pop in self.populations() {
                let s = &pop.per_rank[k];
                let _ = writeln!(
                    out,
                    "{rank},{},{:.6},{:.6},{}",
                    pop.population, s.mean, s.std, pop.n_sentences
                );
            }
        }
        out
    }

    pub fn histogram_csv(&self) -> String {
        let mut out = format!("{HISTOGRAM_CSV_HEADER}\n");
        let width = 1.0 / HISTOGRAM_BINS as f64;
        for (k, rank) in self.ranks.iter().enumerate() {
            for pop in self.populations() {
                for (b, count) in pop.per_rank[k].histogram.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{rank},{},{:.2},{:.2},{count}",
                        pop.population,
                        b as f64 * width,
                        (b + 1) as f64 * width
                    );
                }
            }
        }
        out
    }
}
