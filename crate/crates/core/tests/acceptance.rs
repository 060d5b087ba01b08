//! Acceptance checks, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL ...` line on stderr, bypassing output capture.
//!
//! Criteria 3 and 4 need external data and are ignored by default:
//!
//! * `SUBSPACE_STS_GLOVE`: 300-d GloVe text file.
//! * `SUBSPACE_STS_CORPUS`: one sentence per line (criterion 3). When unset,
//!   the sentences of every dataset in the manifest are used.
//! * `SUBSPACE_STS_MANIFEST`: `name<TAB>input<TAB>gold` lines (criterion 4).
//!
//! Run them with `cargo test --release --test acceptance -- --ignored`.

mod common;

use std::io::{Cursor, Write};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use rand::Rng;
use subspace_sts::commands::{cmd_energy, cmd_eval, ENERGY_FILES};
use subspace_sts::embedding::{EmbeddingFormat, EmbeddingStore};
use subspace_sts::linalg::{energy_fraction, top_components, OneSidedJacobi, OrthonormalBasis};
use subspace_sts::representation::{build_subspace, subspace_similarity, SubspaceRep};
use subspace_sts::sts::{load_manifest, load_sts_dataset, pearson};
use subspace_sts::text::TokenizedSentence;
use subspace_sts::{Error, RunConfig};

fn verdict(n: u32, what: &str, failures: &[String], detail: String) {
    let line = if failures.is_empty() {
        format!("criterion {n}: PASS {what} ({detail})")
    } else {
        format!(
            "criterion {n}: FAIL {what} ({detail}); {}",
            failures.join("; ")
        )
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(failures.is_empty(), "{line}");
}

fn check(failures: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && failures.len() < 5 {
        failures.push(msg());
    }
}

#[test]
fn criterion_1_numerics_match_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut rng = rng(101);
    let jac = OneSidedJacobi::default();
    let (mut worst_span, mut worst_energy) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let d = rng.gen_range(1..=50);
        let m = rng.gen_range(1..=20);
        let n = rng.gen_range(1..=5);
        let a = uniform_matrix(&mut rng, d, m);
        let basis = top_components(&a, n, &jac).unwrap();
        let oracle = oracle_top_directions(&a, basis.rank());
        let span = projector_distance(&basis.columns, &oracle);
        let energy = (energy_fraction(&a, n, &jac).unwrap() - oracle_energy(&a, n)).abs();
        worst_span = worst_span.max(span);
        worst_energy = worst_energy.max(energy);
        check(&mut failures, span <= 1e-6, || {
            format!("matrix {i}: span distance {span:e}")
        });
        check(&mut failures, energy <= 1e-9, || {
            format!("matrix {i}: energy error {energy:e}")
        });
    }
    let elapsed = start.elapsed();
    check(&mut failures, elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    });
    verdict(
        1,
        "top components and energy fractions vs eigen oracle",
        &failures,
        format!("max span distance {worst_span:.1e}, max energy error {worst_energy:.1e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_metric_identities() {
    const DIM: usize = 10;
    const VOCAB: usize = 150;
    let store = toy_store(102, VOCAB, DIM);
    let mut rng = rng(103);
    let jac = OneSidedJacobi::default();
    let rep = |s: &TokenizedSentence| build_subspace(s, &store, 4, false, &jac).unwrap();
    let sim =
        |a: &SubspaceRep, b: &SubspaceRep| subspace_similarity(a, b, false, &jac).unwrap().score;
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 5];

    for i in 0..1000 {
        let s1 = sentence_between(&mut rng, VOCAB, 1, 12);
        let s2 = sentence_between(&mut rng, VOCAB, 1, 12);
        let (r1, r2) = (rep(&s1), rep(&s2));
        let score = sim(&r1, &r2);

        let sym = (score - sim(&r2, &r1)).abs();
        let selfsim = (sim(&r1, &r1) - (r1.rank() as f64).sqrt()).abs();

        let w1 = random_sentence(&mut rng, VOCAB, 1);
        let w2 = random_sentence(&mut rng, VOCAB, 1);
        let (v1, v2) = (oracle_stack(&w1, &store), oracle_stack(&w2, &store));
        let cos = (v1.column(0).dot(&v2.column(0)) / (v1.norm() * v2.norm())).abs();
        let rank1 = (sim(&rep(&w1), &rep(&w2)) - cos).abs();

        let mut tokens = s1.tokens.clone();
        tokens.reverse();
        let order = (sim(&rep(&TokenizedSentence::from_tokens(tokens)), &r2) - score).abs();

        let q = random_orthogonal(&mut rng, DIM);
        let rotate = |r: &SubspaceRep| SubspaceRep {
            basis: OrthonormalBasis::from_columns(
                &q * &r.basis.columns,
                r.basis.component_energy.clone(),
            ),
            ..r.clone()
        };
        let rotation = (sim(&rotate(&r1), &rotate(&r2)) - score).abs();

        for (w, v) in worst.iter_mut().zip([sym, selfsim, rank1, order, rotation]) {
            *w = w.max(v);
        }
        check(&mut failures, sym <= 1e-10, || {
            format!("pair {i}: symmetry {sym:e}")
        });
        check(&mut failures, selfsim <= 1e-9, || {
            format!("pair {i}: self-similarity {selfsim:e}")
        });
        check(&mut failures, rank1 <= 1e-10, || {
            format!("pair {i}: rank-1 {rank1:e}")
        });
        check(&mut failures, order <= 1e-8, || {
            format!("pair {i}: word order {order:e}")
        });
        check(&mut failures, rotation <= 1e-8, || {
            format!("pair {i}: rotation {rotation:e}")
        });
    }
    verdict(
        2,
        "symmetry, self-similarity, rank-1, order and rotation invariance",
        &failures,
        format!(
            "max errors {:.1e} / {:.1e} / {:.1e} / {:.1e} / {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    );
}

fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn require(n: u32, var: &str) -> PathBuf {
    env_path(var).unwrap_or_else(|| {
        let line = format!("criterion {n}: FAIL (environment variable {var} is not set)");
        let _ = writeln!(std::io::stderr(), "{line}");
        panic!("{line}");
    })
}

fn glove_config(glove: PathBuf, workers: usize) -> RunConfig {
    RunConfig {
        embeddings: Some(glove),
        format: EmbeddingFormat::GloveText,
        dim: Some(300),
        workers,
        ..RunConfig::default()
    }
}

#[test]
#[ignore = "needs SUBSPACE_STS_GLOVE and SUBSPACE_STS_CORPUS or SUBSPACE_STS_MANIFEST"]
fn criterion_3_energy_on_real_sentences() {
    let glove = require(3, "SUBSPACE_STS_GLOVE");
    let scratch = tempfile::tempdir().unwrap();
    let corpus = match env_path("SUBSPACE_STS_CORPUS") {
        Some(p) => p,
        None => {
            let manifest = require(3, "SUBSPACE_STS_MANIFEST");
            let mut lines = Vec::new();
            for entry in load_manifest(&manifest).unwrap() {
                for p in load_sts_dataset(&entry.input, &entry.gs).unwrap() {
                    lines.push(p.s1);
                    lines.push(p.s2);
                }
            }
            let path = scratch.path().join("corpus.txt");
            std::fs::write(&path, lines.join("\n") + "\n").unwrap();
            path
        }
    };
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = Instant::now();
    let out = cmd_energy(
        &glove_config(glove, workers),
        &corpus,
        &[3, 4, 5],
        true,
        None,
        None,
    )
    .unwrap();
    let elapsed = start.elapsed();

    let mut failures = Vec::new();
    let real = &out.study.real;
    let random = out.study.random.as_ref().unwrap();
    check(&mut failures, real.n_sentences >= 5000, || {
        format!("only {} representable sentences", real.n_sentences)
    });
    let mut detail = Vec::new();
    for ((r, f), target) in real
        .per_rank
        .iter()
        .zip(&random.per_rank)
        .zip([0.70, 0.80, 0.90])
    {
        detail.push(format!(
            "N={} real {:.3} random {:.3}",
            r.rank, r.mean, f.mean
        ));
        check(&mut failures, (r.mean - target).abs() <= 0.10, || {
            format!(
                "rank {} mean {:.3} outside {target:.2} ± 0.10",
                r.rank, r.mean
            )
        });
        check(&mut failures, f.mean < r.mean, || {
            format!(
                "rank {} random mean {:.3} not below real {:.3}",
                r.rank, f.mean, r.mean
            )
        });
    }
    check(&mut failures, elapsed < Duration::from_secs(120), || {
        format!("took {elapsed:?}")
    });
    verdict(
        3,
        "energy fractions near 0.70/0.80/0.90 and above the unigram baseline",
        &failures,
        format!(
            "{} sentences, {}, {elapsed:.1?}",
            real.n_sentences,
            detail.join(", ")
        ),
    );
}

#[test]
#[ignore = "needs SUBSPACE_STS_GLOVE and SUBSPACE_STS_MANIFEST"]
fn criterion_4_subspace_beats_average() {
    let glove = require(4, "SUBSPACE_STS_GLOVE");
    let manifest = require(4, "SUBSPACE_STS_MANIFEST");
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let start = Instant::now();
    let methods = ["subspace:4".to_string(), "average".to_string()];
    let report = cmd_eval(&glove_config(glove, workers), &manifest, &methods, None).unwrap();
    let elapsed = start.elapsed();

    let (wins, total) = report.wins("subspace:4", "average");
    let pairs: usize = report
        .rows
        .iter()
        .filter(|r| r.rank.is_some())
        .map(|r| r.n_scored)
        .sum();
    let mut failures = Vec::new();
    check(&mut failures, total >= 10, || {
        format!("only {total} datasets with defined correlations")
    });
    check(
        &mut failures,
        total > 0 && wins as f64 >= 0.6 * total as f64,
        || format!("subspace wins {wins}/{total}"),
    );
    check(&mut failures, elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    });
    let _ = write!(std::io::stderr(), "{}", report.summary());
    verdict(
        4,
        "subspace:4 beats average on at least 60% of datasets",
        &failures,
        format!("wins {wins}/{total}, {pairs} pairs, {elapsed:.1?}"),
    );
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

/// `r` from exact rational sums; only the final square root is in `f64`.
fn oracle_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = exact(x.len() as f64);
    let mx = x
        .iter()
        .map(|&v| exact(v))
        .fold(BigRational::zero(), |a, b| a + b)
        / &n;
    let my = y
        .iter()
        .map(|&v| exact(v))
        .fold(BigRational::zero(), |a, b| a + b)
        / &n;
    let (mut sxy, mut sxx, mut syy) = (
        BigRational::zero(),
        BigRational::zero(),
        BigRational::zero(),
    );
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (exact(a) - &mx, exact(b) - &my);
        sxy += &dx * &dy;
        sxx += &dx * &dx;
        syy += &dy * &dy;
    }
    let r = ((&sxy * &sxy) / (sxx * syy)).to_f64().unwrap().sqrt();
    if sxy.is_negative() {
        -r
    } else {
        r
    }
}

#[test]
fn criterion_5_pearson_correctness() {
    let mut rng = rng(105);
    let mut failures = Vec::new();
    let (mut worst, mut worst_affine) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let n = rng.gen_range(2..=80);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.gen_range(0.0..5.0)).collect();
        let r = pearson(&x, &y).unwrap();
        let err = (r - oracle_pearson(&x, &y)).abs();
        let (a, b) = (rng.gen_range(0.01..100.0), rng.gen_range(-50.0..50.0));
        let shifted: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let affine = (pearson(&shifted, &y).unwrap() - r).abs();
        worst = worst.max(err);
        worst_affine = worst_affine.max(affine);
        check(&mut failures, err <= 1e-12, || {
            format!("vector {i}: error {err:e}")
        });
        check(&mut failures, affine <= 1e-10, || {
            format!("vector {i}: affine {affine:e}")
        });
    }
    verdict(
        5,
        "Pearson vs exact rational oracle and affine invariance",
        &failures,
        format!("max error {worst:.1e}, max affine drift {worst_affine:.1e}"),
    );
}

#[test]
fn criterion_6_format_fidelity() {
    let mut failures = Vec::new();
    let mut rng = rng(106);
    let dim = 7;
    let entries: Vec<(String, Vec<f32>)> = (0..100)
        .map(|i| {
            let v = (0..dim)
                .map(|_| loop {
                    let x = f32::from_bits(rng.gen());
                    if x.is_finite() {
                        break x;
                    }
                })
                .collect();
            (format!("tok{i}"), v)
        })
        .collect();
    let store = EmbeddingStore::from_entries(dim, entries.clone())
        .unwrap()
        .0;
    let same = |other: &EmbeddingStore| {
        other.len() == entries.len()
            && entries.iter().all(|(w, v)| {
                other
                    .lookup(w)
                    .is_some_and(|got| got.iter().zip(v).all(|(a, b)| a.to_bits() == b.to_bits()))
            })
    };

    let mut text = Vec::new();
    store.write_glove_text(&mut text).unwrap();
    let glove = EmbeddingStore::read_glove_text(Cursor::new(&text), Some(dim)).map(|r| r.0);
    check(&mut failures, glove.as_ref().is_ok_and(same), || {
        "GloVe round trip differs".into()
    });

    let mut bin = Vec::new();
    store.write_word2vec_binary(&mut bin).unwrap();
    let w2v = EmbeddingStore::read_word2vec_binary(Cursor::new(&bin)).map(|r| r.0);
    check(&mut failures, w2v.as_ref().is_ok_and(same), || {
        "word2vec round trip differs".into()
    });

    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let tiny_bin = EmbeddingStore::load(
        fixtures.join("tiny.bin"),
        EmbeddingFormat::Word2VecBinary,
        Some(3),
    );
    let tiny_txt = EmbeddingStore::load(
        fixtures.join("tiny.txt"),
        EmbeddingFormat::GloveText,
        Some(3),
    );
    let fixtures_agree = match (&tiny_bin, &tiny_txt) {
        (Ok((b, _)), Ok((t, _))) => b.iter().zip(t.iter()).all(|((wb, vb), (wt, vt))| {
            wb == wt && vb.iter().zip(vt).all(|(x, y)| x.to_bits() == y.to_bits())
        }),
        _ => false,
    };
    check(&mut failures, fixtures_agree, || {
        "externally written fixtures disagree".into()
    });

    let g = |s: &str| EmbeddingStore::read_glove_text(Cursor::new(s), None).map(|r| r.0);
    let w = |b: &[u8]| EmbeddingStore::read_word2vec_binary(Cursor::new(b)).map(|r| r.0);
    let mut truncated = bin.clone();
    truncated.truncate(bin.len() - 10);
    let mut trailing = bin.clone();
    trailing.extend(b"xyz");
    let malformed: Vec<(&str, bool)> = vec![
        ("empty text", matches!(g(""), Err(Error::EmptyFile))),
        (
            "ragged text",
            matches!(
                g("a 1 2\nb 1\n"),
                Err(Error::DimensionMismatch { line: 2, .. })
            ),
        ),
        (
            "bad float",
            matches!(g("a 1 z\n"), Err(Error::InvalidFloat { line: 1, .. })),
        ),
        (
            "nan",
            matches!(g("a nan 1\n"), Err(Error::NonFiniteComponent { entry: 1 })),
        ),
        (
            "blank line",
            matches!(g("a 1\n\n"), Err(Error::MalformedEntry { line: 2, .. })),
        ),
        (
            "bad header",
            matches!(w(b"abc\n"), Err(Error::BadHeader(_))),
        ),
        ("zero count", matches!(w(b"0 5\n"), Err(Error::EmptyStore))),
        (
            "truncated",
            matches!(
                w(&truncated),
                Err(Error::Truncated {
                    read: 99,
                    expected: 100
                })
            ),
        ),
        (
            "trailing",
            matches!(w(&trailing), Err(Error::TrailingBytes(3))),
        ),
    ];
    for (name, ok) in &malformed {
        check(&mut failures, *ok, || {
            format!("{name} fixture gave the wrong error")
        });
    }
    verdict(
        6,
        "bit-identical round trips and malformed-file errors",
        &failures,
        format!(
            "100 vectors x 2 formats, {} malformed fixtures",
            malformed.len()
        ),
    );
}

#[test]
fn criterion_7_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let emb = write_store(d, "toy.txt", &toy_store(107, 80, 12));
    let mut rng = rng(108);
    let mut corpus = Vec::new();
    for name in ["a", "b", "c"] {
        let pairs: Vec<(String, String, Option<f64>)> = (0..150)
            .map(|_| {
                let s1 = sentence_between(&mut rng, 80, 1, 12).tokens.join(" ");
                let s2 = sentence_between(&mut rng, 80, 1, 12).tokens.join(" ");
                corpus.push(s1.clone());
                (s1, s2, Some(rng.gen_range(0.0..=5.0)))
            })
            .collect();
        write_dataset(d, name, &pairs);
    }
    let manifest = write_manifest(d, &["a", "b", "c"]);
    let corpus_path = d.join("corpus.txt");
    std::fs::write(&corpus_path, corpus.join("\n")).unwrap();

    let methods = [
        "subspace".to_string(),
        "subspace:3".to_string(),
        "average".to_string(),
    ];
    let mut outputs: Vec<Vec<Vec<u8>>> = Vec::new();
    for (run, workers) in [1, 4, 1, 3].into_iter().enumerate() {
        let mut files = Vec::new();
        for output in [
            subspace_sts::OutputFormat::Csv,
            subspace_sts::OutputFormat::Json,
        ] {
            let config = RunConfig {
                embeddings: Some(emb.clone()),
                workers,
                seed: 9,
                output,
                ..RunConfig::default()
            };
            let report = d.join(format!("run{run}-{output:?}.out"));
            cmd_eval(&config, &manifest, &methods, Some(&report)).unwrap();
            files.push(std::fs::read(&report).unwrap());
        }
        let config = RunConfig {
            embeddings: Some(emb.clone()),
            workers,
            seed: 9,
            ..RunConfig::default()
        };
        let out_dir = d.join(format!("energy{run}"));
        cmd_energy(
            &config,
            &corpus_path,
            &[3, 4, 5],
            true,
            None,
            Some(&out_dir),
        )
        .unwrap();
        for f in ENERGY_FILES {
            files.push(std::fs::read(out_dir.join(f)).unwrap());
        }
        outputs.push(files);
    }
    let mut failures = Vec::new();
    for (i, other) in outputs.iter().enumerate().skip(1) {
        check(&mut failures, other == &outputs[0], || {
            format!("run {i} differs from run 0")
        });
    }
    verdict(
        7,
        "eval and energy outputs byte-identical across runs and worker counts",
        &failures,
        format!("{} runs x {} files", outputs.len(), outputs[0].len()),
    );
}
