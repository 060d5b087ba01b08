//! Pretrained word-embedding tables loaded from GloVe text or word2vec binary files.
//!
//! The store is immutable after load and performs no token normalization:
//! lookups are byte-exact against whatever the text pipeline produced.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, ErrorKind, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// On-disk embedding formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EmbeddingFormat {
    /// One `token v1 v2 ...` entry per line, no header.
    #[serde(rename = "glove")]
    GloveText,
    /// `<count> <dim>\n` header followed by `token ` + little-endian f32 entries.
    #[serde(rename = "w2v-bin")]
    Word2VecBinary,
}

impl fmt::Display for EmbeddingFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddingFormat::GloveText => f.write_str("glove"),
            EmbeddingFormat::Word2VecBinary => f.write_str("w2v-bin"),
        }
    }
}

impl FromStr for EmbeddingFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glove" | "glove-text" => Ok(EmbeddingFormat::GloveText),
            "w2v-bin" | "word2vec" | "word2vec-binary" => Ok(EmbeddingFormat::Word2VecBinary),
            other => Err(Error::UnknownStrategy {
                kind: "embedding format",
                name: other.to_string(),
                available: "glove, w2v-bin".to_string(),
            }),
        }
    }
}

/// Counts gathered while loading a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub format: Option<EmbeddingFormat>,
    /// Entries read from the source, including duplicates.
    pub entries: usize,
    /// Entries dropped because their token was already present.
    pub duplicates: usize,
    pub dim: usize,
}

impl LoadReport {
    fn log(&self) {
        log::info!(
            "embeddings loaded format={} entries={} duplicates={} vocab={} dim={}",
            self.format
                .map_or_else(|| "memory".to_string(), |f| f.to_string()),
            self.entries,
            self.duplicates,
            self.entries - self.duplicates,
            self.dim
        );
    }
}

/// Immutable vocabulary → vector table.
#[derive(Clone, Debug)]
pub struct EmbeddingStore {
    dim: usize,
    vocab: HashMap<String, usize>,
    words: Vec<String>,
    matrix: Vec<f32>,
    source_format: Option<EmbeddingFormat>,
}

/// Accumulates entries with keep-first duplicate handling.
struct Builder {
    dim: usize,
    vocab: HashMap<String, usize>,
    words: Vec<String>,
    matrix: Vec<f32>,
    entries: usize,
    duplicates: usize,
}

impl Builder {
    fn new(dim: usize) -> Self {
        Builder {
            dim,
            vocab: HashMap::new(),
            words: Vec::new(),
            matrix: Vec::new(),
            entries: 0,
            duplicates: 0,
        }
    }

    fn push(&mut self, token: String, vector: &[f32]) {
        debug_assert_eq!(vector.len(), self.dim);
        self.entries += 1;
        if self.vocab.contains_key(&token) {
            self.duplicates += 1;
            return;
        }
        self.vocab.insert(token.clone(), self.words.len());
        self.words.push(token);
        self.matrix.extend_from_slice(vector);
    }

    fn finish(self, format: Option<EmbeddingFormat>) -> Result<(EmbeddingStore, LoadReport)> {
        if self.words.is_empty() {
            return Err(Error::EmptyStore);
        }
        let report = LoadReport {
            format,
            entries: self.entries,
            duplicates: self.duplicates,
            dim: self.dim,
        };
        report.log();
        Ok((
            EmbeddingStore {
                dim: self.dim,
                vocab: self.vocab,
                words: self.words,
                matrix: self.matrix,
                source_format: format,
            },
            report,
        ))
    }
}

impl EmbeddingStore {
    /// Builds a store from in-memory entries. Duplicates keep the first vector.
    pub fn from_entries<I, S>(dim: usize, entries: I) -> Result<(Self, LoadReport)>
    where
        I: IntoIterator<Item = (S, Vec<f32>)>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        let mut builder = Builder::new(dim);
        for (idx, (token, vector)) in entries.into_iter().enumerate() {
            if vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    line: idx + 1,
                    expected: dim,
                    found: vector.len(),
                });
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteComponent { entry: idx + 1 });
            }
            builder.push(token.into(), &vector);
        }
        builder.finish(None)
    }

    /// Loads a file in the given format.
    pub fn load(
        path: impl AsRef<Path>,
        format: EmbeddingFormat,
        expected_dim: Option<usize>,
    ) -> Result<(Self, LoadReport)> {
        let (store, report) = match format {
            EmbeddingFormat::GloveText => Self::load_glove_text(path.as_ref(), expected_dim)?,
            EmbeddingFormat::Word2VecBinary => Self::load_word2vec_binary(path.as_ref())?,
        };
        if let Some(expected) = expected_dim {
            if expected != store.dim {
                return Err(Error::DimensionMismatch {
                    line: 1,
                    expected,
                    found: store.dim,
                });
            }
        }
        Ok((store, report))
    }

    pub fn load_glove_text(
        path: impl AsRef<Path>,
        expected_dim: Option<usize>,
    ) -> Result<(Self, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_glove_text(BufReader::new(file), expected_dim).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }

    /// Parses GloVe text from any buffered reader.
    pub fn read_glove_text<R: BufRead>(
        mut reader: R,
        expected_dim: Option<usize>,
    ) -> Result<(Self, LoadReport)> {
        let mut builder: Option<Builder> = None;
        let mut buf = Vec::new();
        let mut vector = Vec::new();
        let mut line_no = 0usize;

        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| Error::io("<reader>", e))?;
            if n == 0 {
                break;
            }
            line_no += 1;
            let line = String::from_utf8_lossy(&buf);
            let line = line.trim_end_matches(['\n', '\r']);
            if line.is_empty() {
                return Err(Error::MalformedEntry {
                    line: line_no,
                    reason: "blank line".into(),
                });
            }

            let mut fields = line.split(' ');
            let token = fields.next().unwrap_or_default();
            if token.is_empty() {
                return Err(Error::MalformedEntry {
                    line: line_no,
                    reason: "empty token".into(),
                });
            }
            vector.clear();
            for field in fields {
                let value: f32 = field.parse().map_err(|_| Error::InvalidFloat {
                    line: line_no,
                    value: field.to_string(),
                })?;
                if !value.is_finite() {
                    return Err(Error::NonFiniteComponent { entry: line_no });
                }
                vector.push(value);
            }

            let builder = builder.get_or_insert_with(|| Builder::new(vector.len()));
            let expected = expected_dim.unwrap_or(builder.dim);
            if builder.dim == 0 {
                return Err(Error::MalformedEntry {
                    line: line_no,
                    reason: "no vector components".into(),
                });
            }
            if vector.len() != expected {
                return Err(Error::DimensionMismatch {
                    line: line_no,
                    expected,
                    found: vector.len(),
                });
            }
            builder.push(token.to_string(), &vector);
        }

        builder
            .ok_or(Error::EmptyFile)?
            .finish(Some(EmbeddingFormat::GloveText))
    }

    pub fn load_word2vec_binary(path: impl AsRef<Path>) -> Result<(Self, LoadReport)> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_word2vec_binary(BufReader::new(file)).map_err(|e| match e {
            Error::Io { source, .. } => Error::io(path, source),
            other => other,
        })
    }

    /// Parses the word2vec binary format from any buffered reader.
    pub fn read_word2vec_binary<R: BufRead>(mut reader: R) -> Result<(Self, LoadReport)> {
        let io = |e| Error::io("<reader>", e);

        let mut header = Vec::new();
        reader.read_until(b'\n', &mut header).map_err(io)?;
        if header.is_empty() {
            return Err(Error::EmptyFile);
        }
        if header.last() != Some(&b'\n') {
            return Err(Error::BadHeader("missing newline".into()));
        }
        let header = std::str::from_utf8(&header)
            .map_err(|_| Error::BadHeader("not ASCII".into()))?
            .trim();
        let fields: Vec<&str> = header.split_ascii_whitespace().collect();
        let [count, dim] = fields.as_slice() else {
            return Err(Error::BadHeader(format!("{header:?}")));
        };
        let count: usize = count
            .parse()
            .map_err(|_| Error::BadHeader(format!("vocab count {count:?}")))?;
        let dim: usize = dim
            .parse()
            .map_err(|_| Error::BadHeader(format!("dimension {dim:?}")))?;
        if dim == 0 {
            return Err(Error::BadHeader("dimension is zero".into()));
        }
        if count == 0 {
            return Err(Error::EmptyStore);
        }

        let mut builder = Builder::new(dim);
        let mut token = Vec::new();
        let mut raw = vec![0u8; dim * 4];
        let mut vector = vec![0f32; dim];
        let truncated = |read| Error::Truncated {
            read,
            expected: count,
        };

        for idx in 0..count {
            // Entries may be separated by the optional newline of the previous one.
            loop {
                let buf = reader.fill_buf().map_err(io)?;
                match buf.first() {
                    Some(b'\n') => reader.consume(1),
                    Some(_) => break,
                    None => return Err(truncated(idx)),
                }
            }
            token.clear();
            reader.read_until(b' ', &mut token).map_err(io)?;
            if token.pop() != Some(b' ') {
                return Err(truncated(idx));
            }
            if token.is_empty() {
                return Err(Error::MalformedEntry {
                    line: idx + 1,
                    reason: "empty token".into(),
                });
            }
            match reader.read_exact(&mut raw) {
                Ok(()) => {}
                Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Err(truncated(idx)),
                Err(e) => return Err(io(e)),
            }
            for (dst, chunk) in vector.iter_mut().zip(raw.chunks_exact(4)) {
                *dst = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            }
            if vector.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteComponent { entry: idx + 1 });
            }
            builder.push(String::from_utf8_lossy(&token).into_owned(), &vector);
        }

        let mut rest = Vec::new();
        reader.read_to_end(&mut rest).map_err(io)?;
        let trailing = match rest.first() {
            Some(b'\n') => rest.len() - 1,
            _ => rest.len(),
        };
        if trailing > 0 {
            return Err(Error::TrailingBytes(trailing));
        }

        builder.finish(Some(EmbeddingFormat::Word2VecBinary))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn source_format(&self) -> Option<EmbeddingFormat> {
        self.source_format
    }

    /// Returns the stored vector, or `None` for unknown tokens.
    pub fn lookup(&self, token: &str) -> Option<&[f32]> {
        self.vocab.get(token).map(|&row| self.row(row))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.vocab.contains_key(token)
    }

    fn row(&self, row: usize) -> &[f32] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }

    /// Entries in load order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> + '_ {
        self.words
            .iter()
            .enumerate()
            .map(move |(row, word)| (word.as_str(), self.row(row)))
    }

    /// Writes GloVe text. Components use the shortest decimal form that
    /// parses back to the identical `f32`.
    pub fn write_glove_text<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        for (word, vector) in self.iter() {
            w.write_all(word.as_bytes())?;
            for v in vector {
                write!(w, " {v}")?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn write_word2vec_binary<W: Write>(&self, writer: W) -> std::io::Result<()> {
        let mut w = BufWriter::new(writer);
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (word, vector) in self.iter() {
            w.write_all(word.as_bytes())?;
            w.write_all(b" ")?;
            for v in vector {
                w.write_all(&v.to_le_bytes())?;
            }
            w.write_all(b"\n")?;
        }
        w.flush()
    }
}
