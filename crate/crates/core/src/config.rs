//! Run configuration shared by the CLI and library entry points.

use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::embedding::{EmbeddingFormat, EmbeddingStore};
use crate::error::{Error, Result};
use crate::linalg::{svd_backend, SvdBackend};
use crate::method::MethodOptions;
use crate::representation::DEFAULT_RANK;
use crate::text::{Stoplist, TextPipeline, TOKENIZER_ID};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub embeddings: Option<PathBuf>,
    pub format: EmbeddingFormat,
    pub dim: Option<usize>,
    pub rank: usize,
    pub stopword_filter: bool,
    /// Replaces the embedded stoplist when set.
    pub stoplist: Option<PathBuf>,
    pub center: bool,
    pub normalize: bool,
    pub seed: u64,
    pub output: OutputFormat,
    pub workers: usize,
    pub svd: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            embeddings: None,
            format: EmbeddingFormat::GloveText,
            dim: None,
            rank: DEFAULT_RANK,
            stopword_filter: true,
            stoplist: None,
            center: false,
            normalize: false,
            seed: 0,
            output: OutputFormat::Csv,
            workers: 1,
            svd: "jacobi".to_string(),
        }
    }
}

/// Everything that influences scores, embedded in every report.
/// Worker count is deliberately absent: it never changes results.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fingerprint {
    pub tokenizer: &'static str,
    pub stopword_filter: bool,
    pub stoplist_sha256: Option<String>,
    pub stoplist_size: Option<usize>,
    pub center: bool,
    pub normalize: bool,
    pub svd: String,
    pub embeddings: Option<String>,
    pub embedding_format: Option<EmbeddingFormat>,
    pub dim: usize,
    pub vocab_size: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("--rank must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        svd_backend(&self.svd).map(|_| ())
    }

    pub fn pipeline(&self) -> Result<TextPipeline> {
        if !self.stopword_filter {
            return Ok(TextPipeline::unfiltered());
        }
        let stoplist = match &self.stoplist {
            Some(path) => Stoplist::from_file(path)?,
            None => Stoplist::embedded(),
        };
        Ok(TextPipeline::new(Some(stoplist)))
    }

    pub fn backend(&self) -> Result<Arc<dyn SvdBackend>> {
        svd_backend(&self.svd)
    }

    pub fn method_options(&self) -> Result<MethodOptions> {
        Ok(MethodOptions {
            rank: self.rank,
            center: self.center,
            normalize: self.normalize,
            backend: self.backend()?,
        })
    }

    pub fn load_store(&self) -> Result<EmbeddingStore> {
        let path = self
            .embeddings
            .as_ref()
            .ok_or_else(|| Error::Config("--embeddings is required".into()))?;
        EmbeddingStore::load(path, self.format, self.dim).map(|(store, _)| store)
    }

    pub fn fingerprint(&self, pipeline: &TextPipeline, store: &EmbeddingStore) -> Fingerprint {
        Fingerprint {
            tokenizer: TOKENIZER_ID,
            stopword_filter: pipeline.stoplist().is_some(),
            stoplist_sha256: pipeline.stoplist().map(Stoplist::sha256),
            stoplist_size: pipeline.stoplist().map(Stoplist::len),
            center: self.center,
            normalize: self.normalize,
            svd: self.svd.clone(),
            embeddings: self.embeddings.as_ref().map(|p| p.display().to_string()),
            embedding_format: store.source_format(),
            dim: store.dim(),
            vocab_size: store.len(),
        }
    }

    /// Runs `f` on a rayon pool with exactly `workers` threads.
    pub fn with_pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(f))
    }
}
