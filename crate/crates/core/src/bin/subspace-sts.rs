use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use subspace_sts::commands::{
    cmd_energy, cmd_eval, cmd_inspect, cmd_methods, cmd_sim, cmd_stoplist, ENERGY_FILES,
};
use subspace_sts::{EmbeddingFormat, Error, OutputFormat, RunConfig};

/// Sentence similarity from low-rank word-vector subspaces.
#[derive(Debug, Parser)]
#[command(name = "subspace-sts", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Word-embedding file.
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,

    /// Embedding file format: glove or w2v-bin.
    #[arg(long, global = true, default_value = "glove")]
    format: EmbeddingFormat,

    /// Expected embedding dimension (checked on load).
    #[arg(long, global = true)]
    dim: Option<usize>,

    /// Subspace rank N.
    #[arg(long, global = true, default_value_t = 4)]
    rank: usize,

    /// Keep function words.
    #[arg(long, global = true)]
    no_stopword_filter: bool,

    /// Replace the built-in stoplist (one token per line).
    #[arg(long, global = true, env = "SUBSPACE_STS_STOPLIST")]
    stoplist: Option<PathBuf>,

    /// Subtract the mean word vector before extracting components.
    #[arg(long, global = true)]
    center: bool,

    /// Divide subspace scores by sqrt(min rank) so they fall in [0, 1].
    #[arg(long, global = true)]
    normalize: bool,

    /// Seed for the random-sentence baseline.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for pair scoring and energy computation.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Output format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    output: OutputFormat,

    /// SVD kernel (see `methods`).
    #[arg(long, global = true, default_value = "jacobi")]
    svd: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one sentence pair.
    Sim {
        s1: String,
        s2: String,
        /// `subspace`, `subspace:<rank>` or `average`.
        #[arg(long, default_value = "subspace")]
        method: String,
    },
    /// Pearson correlation against gold scores for every dataset in a manifest.
    Eval {
        /// Lines of `name<TAB>input<TAB>gold`.
        #[arg(long)]
        manifest: PathBuf,
        /// Methods to evaluate (repeatable).
        #[arg(long = "method", default_values = ["subspace", "average"])]
        methods: Vec<String>,
        /// Report file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy captured by the top principal components over a sentence corpus.
    Energy {
        /// One sentence per line.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5])]
        ranks: Vec<usize>,
        /// Also score i.i.d. unigram pseudo-sentences.
        #[arg(long)]
        random_baseline: bool,
        /// Text file to estimate the unigram model from (default: the corpus).
        #[arg(long)]
        unigram_from: Option<PathBuf>,
        /// Directory receiving energy.csv, energy_hist.csv and energy.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Show tokens, filtering, OOV words and the subspace of one sentence.
    Inspect { sentence: String },
    /// Print the active stoplist.
    Stoplist,
    /// List registered similarity methods and SVD kernels.
    Methods,
}

impl GlobalArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            embeddings: self.embeddings.clone(),
            format: self.format,
            dim: self.dim,
            rank: self.rank,
            stopword_filter: !self.no_stopword_filter,
            stoplist: self.stoplist.clone(),
            center: self.center,
            normalize: self.normalize,
            seed: self.seed,
            output: self.output,
            workers: self.workers,
            svd: self.svd.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    let config = cli.global.config();
    match cli.command {
        Command::Sim { s1, s2, method } => {
            Ok(cmd_sim(&config, &s1, &s2, &method)?.render(config.output))
        }
        Command::Eval {
            manifest,
            methods,
            out,
        } => {
            let report = cmd_eval(&config, &manifest, &methods, out.as_deref())?;
            eprint!("{}", report.summary());
            match out {
                Some(path) => {
                    eprintln!("report written to {}", path.display());
                    Ok(String::new())
                }
                None => Ok(report.render(config.output)),
            }
        }
        Command::Energy {
            corpus,
            ranks,
            random_baseline,
            unigram_from,
            out_dir,
        } => {
            let out = cmd_energy(
                &config,
                &corpus,
                &ranks,
                random_baseline,
                unigram_from.as_deref(),
                out_dir.as_deref(),
            )?;
            if let Some(dir) = &out_dir {
                eprintln!("wrote {} to {}", ENERGY_FILES.join(", "), dir.display());
            }
            Ok(match config.output {
                OutputFormat::Csv => out.study.to_csv(),
                OutputFormat::Json => {
                    serde_json::to_string_pretty(&out).expect("serializable") + "\n"
                }
            })
        }
        Command::Inspect { sentence } => Ok(cmd_inspect(&config, &sentence)?.render(config.output)),
        Command::Stoplist => cmd_stoplist(&config),
        Command::Methods => Ok(cmd_methods()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
