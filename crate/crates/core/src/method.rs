//! Sentence-similarity methods selectable by name.
//!
//! Every method implements [`SimilarityMethod`] and is constructed through
//! [`method_registry`]. A method spec is `name` or `name:rank`, e.g.
//! `subspace:3` or `average`.

use std::fmt::Debug;
use std::sync::Arc;

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::linalg::{default_backend, SvdBackend};
use crate::registry::Registry;
use crate::representation::{
    average_similarity, build_average, build_subspace, subspace_similarity, AverageRep,
    SimilarityResult, SubspaceRep, DEFAULT_RANK,
};
use crate::text::TokenizedSentence;

/// A sentence representation produced by some method.
#[derive(Clone, Debug, PartialEq)]
pub enum Representation {
    Subspace(SubspaceRep),
    Average(AverageRep),
}

pub trait SimilarityMethod: Send + Sync + Debug {
    /// Registry name.
    fn name(&self) -> &'static str;

    /// Subspace rank, for methods that have one.
    fn rank(&self) -> Option<usize>;

    fn represent(&self, sent: &TokenizedSentence, store: &EmbeddingStore)
        -> Result<Representation>;

    fn similarity(&self, a: &Representation, b: &Representation) -> Result<SimilarityResult>;

    fn score(
        &self,
        s1: &TokenizedSentence,
        s2: &TokenizedSentence,
        store: &EmbeddingStore,
    ) -> Result<SimilarityResult> {
        let a = self.represent(s1, store)?;
        let b = self.represent(s2, store)?;
        self.similarity(&a, &b)
    }

    /// `name` or `name:rank`.
    fn label(&self) -> String {
        match self.rank() {
            Some(r) => format!("{}:{r}", self.name()),
            None => self.name().to_string(),
        }
    }
}

/// Settings shared by every method constructor.
#[derive(Clone, Debug)]
pub struct MethodOptions {
    pub rank: usize,
    pub center: bool,
    pub normalize: bool,
    pub backend: Arc<dyn SvdBackend>,
}

impl Default for MethodOptions {
    fn default() -> Self {
        MethodOptions {
            rank: DEFAULT_RANK,
            center: false,
            normalize: false,
            backend: default_backend(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SubspaceMethod {
    pub rank: usize,
    pub center: bool,
    pub normalize: bool,
    pub backend: Arc<dyn SvdBackend>,
}

impl SimilarityMethod for SubspaceMethod {
    fn name(&self) -> &'static str {
        "subspace"
    }

    fn rank(&self) -> Option<usize> {
        Some(self.rank)
    }

    fn represent(
        &self,
        sent: &TokenizedSentence,
        store: &EmbeddingStore,
    ) -> Result<Representation> {
        build_subspace(sent, store, self.rank, self.center, self.backend.as_ref())
            .map(Representation::Subspace)
    }

    fn similarity(&self, a: &Representation, b: &Representation) -> Result<SimilarityResult> {
        match (a, b) {
            (Representation::Subspace(a), Representation::Subspace(b)) => {
                subspace_similarity(a, b, self.normalize, self.backend.as_ref())
            }
            _ => Err(Error::RepresentationMismatch("subspace")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AverageMethod;

impl SimilarityMethod for AverageMethod {
    fn name(&self) -> &'static str {
        "average"
    }

    fn rank(&self) -> Option<usize> {
        None
    }

    fn represent(
        &self,
        sent: &TokenizedSentence,
        store: &EmbeddingStore,
    ) -> Result<Representation> {
        build_average(sent, store).map(Representation::Average)
    }

    fn similarity(&self, a: &Representation, b: &Representation) -> Result<SimilarityResult> {
        match (a, b) {
            (Representation::Average(a), Representation::Average(b)) => average_similarity(a, b),
            _ => Err(Error::RepresentationMismatch("average")),
        }
    }
}

/// Constructor taking shared options and an optional `:rank` argument.
pub type MethodFactory = fn(&MethodOptions, Option<usize>) -> Result<Box<dyn SimilarityMethod>>;

pub fn method_registry() -> Registry<MethodFactory> {
    let mut reg: Registry<MethodFactory> = Registry::new("method");
    reg.register(
        "subspace",
        "principal-angle similarity of rank-N word-vector subspaces",
        |opts, rank| {
            let rank = rank.unwrap_or(opts.rank);
            if rank == 0 {
                return Err(Error::Config("subspace rank must be at least 1".into()));
            }
            Ok(Box::new(SubspaceMethod {
                rank,
                center: opts.center,
                normalize: opts.normalize,
                backend: opts.backend.clone(),
            }))
        },
    );
    reg.register(
        "average",
        "cosine similarity of averaged word vectors",
        |_, rank| match rank {
            Some(_) => Err(Error::Config("the average method takes no rank".into())),
            None => Ok(Box::new(AverageMethod)),
        },
    );
    reg
}

/// Parses `name[:rank]` and builds the method. `avg` is accepted for `average`.
pub fn build_method(spec: &str, opts: &MethodOptions) -> Result<Box<dyn SimilarityMethod>> {
    let (name, rank) = match spec.split_once(':') {
        Some((name, rank)) => {
            let rank = rank
                .parse()
                .map_err(|_| Error::Config(format!("invalid rank in method spec {spec:?}")))?;
            (name, Some(rank))
        }
        None => (spec, None),
    };
    let name = if name == "avg" { "average" } else { name };
    let factory = method_registry().get(name).copied()?;
    factory(opts, rank)
}
