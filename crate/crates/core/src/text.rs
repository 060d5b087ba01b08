//! Sentence normalization, tokenization and function-word filtering.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};
use unicode_normalization::UnicodeNormalization;

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};

/// Identifier recorded in report fingerprints for the tokenizer below.
pub const TOKENIZER_ID: &str = "nfc-lowercase-whitespace-edgepunct";

const EMBEDDED_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// An ordered token multiset for one sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizedSentence {
    pub raw: String,
    pub tokens: Vec<String>,
    /// Token count straight out of the tokenizer, before filtering.
    pub n_raw: usize,
    /// Tokens missing from the store, filled in by [`embed_sentence`].
    pub oov: Vec<String>,
}

impl TokenizedSentence {
    /// Builds a sentence directly from already-normalized tokens.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        TokenizedSentence {
            raw: tokens.join(" "),
            n_raw: tokens.len(),
            tokens,
            oov: Vec::new(),
        }
    }
}

fn normalize(text: &str) -> String {
    // NFC again after lowercasing: case mapping can emit decomposed sequences.
    text.nfc()
        .collect::<String>()
        .to_lowercase()
        .nfc()
        .collect()
}

/// NFC-normalizes, lowercases, splits on whitespace and strips leading and
/// trailing punctuation/symbols from every token. Tokens that strip to
/// nothing are dropped.
pub fn tokenize(raw: &str) -> TokenizedSentence {
    let tokens: Vec<String> = normalize(raw)
        .split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    TokenizedSentence {
        raw: raw.to_string(),
        n_raw: tokens.len(),
        tokens,
        oov: Vec::new(),
    }
}

/// A set of function words removed before stacking word vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stoplist {
    words: BTreeSet<String>,
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::embedded()
    }
}

impl Stoplist {
    /// The built-in English list (127 entries).
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_STOPWORDS)
    }

    /// One token per line, UTF-8. Entries get the tokenizer's normalization.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(|l| normalize(l.trim()))
            .filter(|w| !w.is_empty())
            .collect();
        Stoplist { words }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Entries in sorted order.
    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Hex SHA-256 over the sorted entries joined by newlines.
    pub fn sha256(&self) -> String {
        let mut hasher = Sha256::new();
        for word in &self.words {
            hasher.update(word.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }
}

/// Drops tokens found in `stoplist`, keeping order and duplicates.
pub fn filter_function_words(sent: &TokenizedSentence, stoplist: &Stoplist) -> TokenizedSentence {
    TokenizedSentence {
        raw: sent.raw.clone(),
        tokens: sent
            .tokens
            .iter()
            .filter(|t| !stoplist.contains(t))
            .cloned()
            .collect(),
        n_raw: sent.n_raw,
        oov: sent.oov.clone(),
    }
}

/// Tokenizer plus optional function-word filter.
#[derive(Clone, Debug, Default)]
pub struct TextPipeline {
    stoplist: Option<Stoplist>,
}

impl TextPipeline {
    pub fn new(stoplist: Option<Stoplist>) -> Self {
        TextPipeline { stoplist }
    }

    pub fn unfiltered() -> Self {
        TextPipeline { stoplist: None }
    }

    pub fn stoplist(&self) -> Option<&Stoplist> {
        self.stoplist.as_ref()
    }

    pub fn prepare(&self, raw: &str) -> TokenizedSentence {
        let sent = tokenize(raw);
        match &self.stoplist {
            Some(stoplist) => filter_function_words(&sent, stoplist),
            None => sent,
        }
    }
}

/// Stacks the vectors of in-vocabulary tokens as columns of a `dim × m`
/// matrix. Returns the matrix together with the out-of-vocabulary tokens.
pub fn stack_vectors(tokens: &[String], store: &EmbeddingStore) -> (DMatrix<f64>, Vec<String>) {
    let mut oov = Vec::new();
    let mut data = Vec::with_capacity(tokens.len() * store.dim());
    for token in tokens {
        match store.lookup(token) {
            Some(v) => data.extend(v.iter().map(|&x| f64::from(x))),
            None => oov.push(token.clone()),
        }
    }
    let m = data.len() / store.dim();
    (DMatrix::from_vec(store.dim(), m, data), oov)
}

/// Stacks word vectors and records OOV tokens on the sentence. Errors when
/// no token is representable.
pub fn embed_sentence(
    sent: &mut TokenizedSentence,
    store: &EmbeddingStore,
) -> Result<DMatrix<f64>> {
    let (matrix, oov) = stack_vectors(&sent.tokens, store);
    sent.oov = oov;
    if matrix.ncols() == 0 {
        return Err(Error::Unrepresentable);
    }
    Ok(matrix)
}
