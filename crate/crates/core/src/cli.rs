//! The `lingsel` command line.
//!
//! Exit status is 0 on success, 1 for usage errors (bad flags, values out
//! of range) and 2 for data errors (unreadable or misaligned input,
//! malformed models, failing external commands). Data goes to standard
//! output or `--out` files; diagnostics go to standard error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{
    combine_domains, overlap_vocab, read_corpus, read_parallel, MonolingualCorpus, OverlapMode,
    ParallelCorpus,
};
use crate::ibt::{ibt_run, IbtConfig};
use crate::lm::{export_arpa, import_arpa, write_arpa, NGramModel};
use crate::metrics::{bleu, char_bleu, chrf, ter, BleuMode, MetricReport};
use crate::selection::{
    filter_by_threshold, moore_lewis_scores, read_scored_tsv, score_file, select_dassa,
    DassaConfig, RawScore, ScoreOptions, SelectionError, Side, DEFAULT_THRESHOLD,
};
use crate::translit::TransliterationTable;

#[derive(Debug, Parser)]
#[command(name = "lingsel", version, about = "Corpus selection for related-language machine translation")]
pub struct Cli {
    /// Worker threads; 0 uses every core, 1 runs sequentially.
    #[arg(long, global = true, help_heading = "Global options", env = "LINGSEL_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// More log output on standard error; repeat for more.
    #[arg(short, long, global = true, help_heading = "Global options", action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Only report errors.
    #[arg(short, long, global = true, help_heading = "Global options", conflicts_with = "verbose")]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert Devanagari text to WX or back, line by line.
    Translit(TranslitArgs),
    /// Train a modified Kneser-Ney model and write it as ARPA.
    TrainLm(TrainLmArgs),
    /// Perplexity of a model on a corpus.
    Perplexity(PerplexityArgs),
    /// Score and scale every line of a candidate file.
    Score(ScoreArgs),
    /// Keep scored rows at or above a threshold.
    Filter(FilterArgs),
    /// Select pool pairs for both translation directions.
    Dassa(DassaArgs),
    /// Rank candidates by cross-entropy difference.
    MooreLewis(MooreLewisArgs),
    /// Corpus-level BLEU, char-BLEU, chrF2 and TER.
    Metrics(MetricsArgs),
    /// Count word types shared by two corpora.
    Overlap(OverlapArgs),
    /// Concatenate parallel corpora in order.
    Combine(CombineArgs),
    /// Run filtered iterative back-translation.
    Ibt(IbtArgs),
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("threshold {v} is outside [0, 1]"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("dir").required(true).args(["to_wx", "from_wx"]))]
pub struct TranslitArgs {
    /// Devanagari to WX.
    #[arg(long)]
    pub to_wx: bool,
    /// WX to Devanagari.
    #[arg(long)]
    pub from_wx: bool,
    /// Read this file instead of standard input.
    pub input: Option<PathBuf>,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use this mapping table instead of the built-in one.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Print counts of characters passed through unchanged to standard error.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Args)]
pub struct TrainLmArgs {
    /// Training text, one sentence per line.
    pub corpus: PathBuf,
    /// Highest n-gram order.
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub order: usize,
    /// WX-encode the corpus before training.
    #[arg(long)]
    pub wx: bool,
    /// ARPA output path; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerplexityArgs {
    /// Evaluation text.
    pub corpus: PathBuf,
    /// ARPA model.
    #[arg(long)]
    pub arpa: PathBuf,
    /// WX-encode the corpus before scoring.
    #[arg(long)]
    pub wx: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Candidate text, one sentence per line. Blank lines are skipped.
    pub pool: PathBuf,
    /// ARPA model trained on in-domain text.
    #[arg(long)]
    pub arpa: PathBuf,
    /// WX-encode candidates before scoring.
    #[arg(long)]
    pub wx: bool,
    /// Use the total log10 probability instead of the per-token average.
    #[arg(long)]
    pub raw_total: bool,
    /// Raw scores held in memory before spilling to a temporary file.
    #[arg(long, default_value_t = 1 << 24)]
    pub memory_budget: usize,
    /// Write the TSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("pool").multiple(true).args(["pool_src", "pool_tgt"]).requires_all(["pool_src", "pool_tgt", "out"]))]
pub struct FilterArgs {
    /// Output of `score`.
    pub scored: PathBuf,
    /// Keep rows with SSS at or above this value.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = unit_interval)]
    pub threshold: f64,
    /// Source side of the pool that was scored (blank pairs are dropped, as when scoring).
    #[arg(long)]
    pub pool_src: Option<PathBuf>,
    /// Target side of the pool.
    #[arg(long)]
    pub pool_tgt: Option<PathBuf>,
    /// Output prefix; writes `<out>.src` and `<out>.tgt`. Without a pool,
    /// kept indices are printed one per line.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DassaArgs {
    /// In-domain source side.
    #[arg(long)]
    pub in_src: PathBuf,
    /// In-domain target side, line-aligned with `--in-src`.
    #[arg(long)]
    pub in_tgt: PathBuf,
    /// Candidate pool, source side.
    #[arg(long)]
    pub pool_src: PathBuf,
    /// Candidate pool, target side.
    #[arg(long)]
    pub pool_tgt: PathBuf,
    /// Threshold for both sides.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD, value_parser = unit_interval)]
    pub threshold: f64,
    /// Source-side threshold; overrides `--threshold`.
    #[arg(long, value_parser = unit_interval)]
    pub threshold_src: Option<f64>,
    /// Target-side threshold; overrides `--threshold`.
    #[arg(long, value_parser = unit_interval)]
    pub threshold_tgt: Option<f64>,
    /// Model order.
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub order: usize,
    /// Train and score on the text as written instead of its WX encoding.
    #[arg(long)]
    pub no_wx: bool,
    /// Use the total log10 probability instead of the per-token average.
    #[arg(long)]
    pub raw_total: bool,
    /// Output prefix; writes `<out>.s2t.{src,tgt}` and `<out>.t2s.{src,tgt}`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MooreLewisArgs {
    /// Candidate text.
    pub candidates: PathBuf,
    /// Model trained on in-domain text.
    #[arg(long)]
    pub in_arpa: PathBuf,
    /// Model trained on the pool.
    #[arg(long)]
    pub pool_arpa: PathBuf,
    /// WX-encode candidates before scoring.
    #[arg(long)]
    pub wx: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// System output, one sentence per line.
    pub hypotheses: PathBuf,
    /// References, line-aligned with the hypotheses.
    pub references: PathBuf,
    /// Word BLEU. With no metric flags, every metric is reported.
    #[arg(long)]
    pub bleu: bool,
    /// chrF with beta 2 over character 1- to 6-grams.
    #[arg(long)]
    pub chrf: bool,
    /// Translation edit rate with block shifts.
    #[arg(long)]
    pub ter: bool,
    /// BLEU over characters, whitespace removed.
    #[arg(long)]
    pub char_bleu: bool,
    /// Also report BLEU with a length-ratio penalty and plain precision product.
    #[arg(long)]
    pub product_bleu: bool,
    /// WX-encode both files first.
    #[arg(long)]
    pub wx: bool,
}

#[derive(Debug, Args)]
pub struct OverlapArgs {
    /// First corpus.
    pub first: PathBuf,
    /// Second corpus.
    pub second: PathBuf,
    /// Compare the text as written instead of its WX encoding.
    #[arg(long)]
    pub raw: bool,
    /// Print the shared words after the count.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct CombineArgs {
    /// A source and target file; repeat for each part, in order.
    #[arg(long = "part", num_args = 2, value_names = ["SRC", "TGT"], required = true, action = clap::ArgAction::Append)]
    pub parts: Vec<PathBuf>,
    /// Output prefix; writes `<out>.src` and `<out>.tgt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Name printed with the combined size.
    #[arg(long, default_value = "combined")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct IbtArgs {
    /// `key = value` run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configured minimum improvement.
    #[arg(long)]
    pub min_delta: Option<f64>,
    /// Override the configured iteration cap.
    #[arg(long, value_parser = positive)]
    pub max_iterations: Option<usize>,
}

/// A failed command: message and exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn data<E: Display>(e: E) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

type Outcome = Result<(), Failure>;

fn abs(p: &mut PathBuf) -> Outcome {
    *p = std::path::absolute(&*p).map_err(data)?;
    Ok(())
}

fn abs_opt(p: &mut Option<PathBuf>) -> Outcome {
    if let Some(p) = p {
        abs(p)?;
    }
    Ok(())
}

impl Command {
    /// Makes every path argument absolute.
    fn resolve_paths(&mut self) -> Outcome {
        match self {
            Command::Translit(a) => {
                abs_opt(&mut a.input)?;
                abs_opt(&mut a.out)?;
                abs_opt(&mut a.table)
            }
            Command::TrainLm(a) => {
                abs(&mut a.corpus)?;
                abs_opt(&mut a.out)
            }
            Command::Perplexity(a) => {
                abs(&mut a.corpus)?;
                abs(&mut a.arpa)
            }
            Command::Score(a) => {
                abs(&mut a.pool)?;
                abs(&mut a.arpa)?;
                abs_opt(&mut a.out)
            }
            Command::Filter(a) => {
                abs(&mut a.scored)?;
                abs_opt(&mut a.pool_src)?;
                abs_opt(&mut a.pool_tgt)?;
                abs_opt(&mut a.out)
            }
            Command::Dassa(a) => {
                for p in [&mut a.in_src, &mut a.in_tgt, &mut a.pool_src, &mut a.pool_tgt, &mut a.out] {
                    abs(p)?;
                }
                Ok(())
            }
            Command::MooreLewis(a) => {
                abs(&mut a.candidates)?;
                abs(&mut a.in_arpa)?;
                abs(&mut a.pool_arpa)
            }
            Command::Metrics(a) => {
                abs(&mut a.hypotheses)?;
                abs(&mut a.references)
            }
            Command::Overlap(a) => {
                abs(&mut a.first)?;
                abs(&mut a.second)
            }
            Command::Combine(a) => {
                for p in &mut a.parts {
                    abs(p)?;
                }
                abs_opt(&mut a.out)
            }
            Command::Ibt(a) => abs(&mut a.config),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns its exit status.
pub fn dispatch<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if e.kind() == clap::error::ErrorKind::InvalidSubcommand {
                let names: Vec<String> = <Cli as clap::CommandFactory>::command()
                    .get_subcommands()
                    .map(|c| c.get_name().to_owned())
                    .collect();
                eprintln!("valid subcommands: {}", names.join(", "));
            }
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (_, 0) => log::LevelFilter::Warn,
        (_, 1) => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        log::debug!("thread pool already set: {e}");
    }
    let result = cli.command.resolve_paths().and_then(|()| {
        log::debug!("{:?}", cli.command);
        run(&cli.command)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lingsel: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| data(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_mono(path: &Path, wx: bool) -> Result<MonolingualCorpus, Failure> {
    let r = read_corpus(path, "text").map_err(data)?;
    if r.skipped_blank > 0 {
        log::warn!("{}: skipped {} blank lines", path.display(), r.skipped_blank);
    }
    Ok(if wx { r.corpus.to_wx() } else { r.corpus })
}

fn read_pair(src: &Path, tgt: &Path, name: &str) -> Result<ParallelCorpus, Failure> {
    let r = read_parallel(src, tgt, name).map_err(data)?;
    if r.skipped_blank > 0 {
        log::warn!("{name}: dropped {} pairs with a blank side", r.skipped_blank);
    }
    Ok(r.corpus)
}

fn load_model(path: &Path) -> Result<NGramModel, Failure> {
    let m = import_arpa(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    for w in m.warnings() {
        log::warn!("{}: {w}", path.display());
    }
    Ok(m)
}

fn run(command: &Command) -> Outcome {
    match command {
        Command::Translit(a) => translit(a),
        Command::TrainLm(a) => {
            let corpus = read_mono(&a.corpus, a.wx)?;
            let model = NGramModel::train(&corpus, a.order).map_err(data)?;
            match &a.out {
                Some(p) => export_arpa(&model, p).map_err(data),
                None => write_arpa(&model, BufWriter::new(io::stdout().lock())).map_err(data),
            }
        }
        Command::Perplexity(a) => {
            let model = load_model(&a.arpa)?;
            let corpus = read_mono(&a.corpus, a.wx)?;
            let (mut tokens, mut oov) = (0, 0);
            for s in corpus.iter() {
                let sc = model.score(s);
                tokens += sc.tokens;
                oov += sc.oov;
            }
            let ppl = model.perplexity(&corpus).map_err(data)?;
            let mut out = output(None)?;
            writeln!(out, "sentences\t{}\ntokens\t{tokens}\noov\t{oov}\nperplexity\t{ppl:.6}", corpus.len())
                .and_then(|()| out.flush())
                .map_err(data)
        }
        Command::Score(a) => {
            let model = load_model(&a.arpa)?;
            let options = ScoreOptions {
                transliterate: a.wx,
                raw: if a.raw_total { RawScore::Total } else { RawScore::PerToken },
            };
            let mut out = output(a.out.as_deref())?;
            let summary = score_file(&model, &a.pool, options, a.memory_budget.max(1), &mut out).map_err(data)?;
            out.flush().map_err(data)?;
            log::info!(
                "scored {} lines (min {:.6}, max {:.6}), skipped {} blank",
                summary.scored,
                summary.min,
                summary.max,
                summary.skipped_blank
            );
            Ok(())
        }
        Command::Filter(a) => filter(a),
        Command::Dassa(a) => {
            let in_domain = read_pair(&a.in_src, &a.in_tgt, "in-domain")?;
            let pool = read_pair(&a.pool_src, &a.pool_tgt, "pool")?;
            let config = DassaConfig {
                order: a.order,
                threshold_source: a.threshold_src.unwrap_or(a.threshold),
                threshold_target: a.threshold_tgt.unwrap_or(a.threshold),
                scoring: ScoreOptions {
                    transliterate: !a.no_wx,
                    raw: if a.raw_total { RawScore::Total } else { RawScore::PerToken },
                },
            };
            // Report warnings were already logged where they arose.
            let result = select_dassa(&in_domain, &pool, &config).map_err(data)?;
            let prefix = |tag: &str| crate::corpus::with_suffix(&a.out, tag);
            result.forward.write(&prefix("s2t")).map_err(data)?;
            result.backward.write(&prefix("t2s")).map_err(data)?;
            let mut out = output(None)?;
            writeln!(out, "{}", result.report).and_then(|()| out.flush()).map_err(data)
        }
        Command::MooreLewis(a) => {
            let (in_model, pool_model) = (load_model(&a.in_arpa)?, load_model(&a.pool_arpa)?);
            let candidates = read_mono(&a.candidates, false)?;
            let ml = moore_lewis_scores(&in_model, &pool_model, &candidates, a.wx).map_err(data)?;
            let mut rank = vec![0; ml.scores.len()];
            for (r, &i) in ml.ranking.iter().enumerate() {
                rank[i] = r + 1;
            }
            let mut out = output(None)?;
            for &(i, s) in &ml.scores {
                writeln!(out, "{i}\t{s:.6}\t{}\t{}", rank[i], candidates.sentences[i]).map_err(data)?;
            }
            out.flush().map_err(data)
        }
        Command::Metrics(a) => metrics(a),
        Command::Overlap(a) => {
            let mode = if a.raw { OverlapMode::Raw } else { OverlapMode::Wx };
            let ov = overlap_vocab(&read_mono(&a.first, false)?, &read_mono(&a.second, false)?, mode).map_err(data)?;
            let mut out = output(None)?;
            writeln!(out, "overlap\t{}", ov.count).map_err(data)?;
            if a.list {
                for w in &ov.words {
                    writeln!(out, "{w}").map_err(data)?;
                }
            }
            out.flush().map_err(data)
        }
        Command::Combine(a) => {
            let parts = a
                .parts
                .chunks(2)
                .enumerate()
                .map(|(i, p)| read_pair(&p[0], &p[1], &format!("part{}", i + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            let combined = combine_domains(&parts, &a.name).map_err(data)?;
            if let Some(p) = &a.out {
                combined.write(p).map_err(data)?;
            }
            let mut out = output(None)?;
            writeln!(out, "{}\t{}", combined.name, combined.len()).and_then(|()| out.flush()).map_err(data)
        }
        Command::Ibt(a) => {
            let mut config = IbtConfig::load(&a.config).map_err(data)?;
            if let Some(d) = a.min_delta {
                config.policy.min_delta = d;
            }
            if let Some(m) = a.max_iterations {
                config.policy.max_iterations = m;
            }
            let run = ibt_run(&config).map_err(data)?;
            let mut out = output(None)?;
            for r in &run.records {
                writeln!(out, "{r}").map_err(data)?;
            }
            writeln!(out, "iterations={} best={:.6}", run.state.iteration, run.state.best.unwrap_or(f64::NAN))
                .and_then(|()| out.flush())
                .map_err(data)
        }
    }
}

fn translit(a: &TranslitArgs) -> Outcome {
    let table;
    let table = match &a.table {
        Some(p) => {
            table = TransliterationTable::load(p).map_err(|e| data(format!("{}: {e}", p.display())))?;
            &table
        }
        None => TransliterationTable::standard(),
    };
    let mut bytes = Vec::new();
    match &a.input {
        Some(p) => File::open(p).and_then(|mut f| f.read_to_end(&mut bytes)),
        None => io::stdin().lock().read_to_end(&mut bytes),
    }
    .map_err(data)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| data(format!("input is not UTF-8 at byte {}", e.utf8_error().valid_up_to())))?;
    let mut out = output(a.out.as_deref())?;
    let mut passthrough = std::collections::BTreeMap::new();
    for line in text.split_inclusive('\n') {
        let (body, end) = match line.strip_suffix('\n') {
            Some(b) => (b, "\n"),
            None => (line, ""),
        };
        let converted = if a.to_wx {
            let (s, report) = table.to_wx_with_report(body);
            for (c, n) in report.by_char {
                *passthrough.entry(c).or_insert(0usize) += n;
            }
            s
        } else {
            table.from_wx(body)
        };
        write!(out, "{converted}{end}").map_err(data)?;
    }
    out.flush().map_err(data)?;
    if a.report {
        for (c, n) in passthrough {
            eprintln!("passthrough\tU+{:04X}\t{n}", c as u32);
        }
    }
    Ok(())
}

fn filter(a: &FilterArgs) -> Outcome {
    let run = read_scored_tsv(&a.scored).map_err(data)?;
    let kept = filter_by_threshold(&run, a.threshold, Side::Source).map_err(data)?;
    log::info!("kept {} of {} at threshold {:.6}", kept.kept.len(), run.scores.len(), a.threshold);
    match (&a.pool_src, &a.pool_tgt, &a.out) {
        (Some(src), Some(tgt), Some(prefix)) => {
            let pool = read_pair(src, tgt, "pool")?;
            if pool.len() != run.scores.len() {
                return Err(data(SelectionError::PoolMismatch {
                    scored: run.scores.len(),
                    pool: pool.len(),
                }));
            }
            pool.select("kept", &kept.kept).write(prefix).map_err(data)?;
            let mut out = output(None)?;
            writeln!(out, "kept\t{}\ttotal\t{}", kept.kept.len(), run.scores.len())
                .and_then(|()| out.flush())
                .map_err(data)
        }
        (None, None, _) => {
            let mut out = output(a.out.as_deref())?;
            for i in &kept.kept {
                writeln!(out, "{i}").map_err(data)?;
            }
            out.flush().map_err(data)
        }
        _ => Err(usage("--pool-src, --pool-tgt and --out go together")),
    }
}

fn metrics(a: &MetricsArgs) -> Outcome {
    let hyp = read_lines(&a.hypotheses, a.wx)?;
    let reference = read_lines(&a.references, a.wx)?;
    let all = !(a.bleu || a.chrf || a.ter || a.char_bleu || a.product_bleu);
    let mut reports: Vec<MetricReport> = Vec::new();
    if all || a.bleu {
        reports.push(bleu(&hyp, &reference, BleuMode::Standard).map_err(data)?);
    }
    if a.product_bleu {
        reports.push(bleu(&hyp, &reference, BleuMode::Product).map_err(data)?);
    }
    if all || a.char_bleu {
        reports.push(char_bleu(&hyp, &reference).map_err(data)?);
    }
    if all || a.chrf {
        reports.push(chrf(&hyp, &reference).map_err(data)?);
    }
    if all || a.ter {
        reports.push(ter(&hyp, &reference).map_err(data)?);
    }
    let mut out = output(None)?;
    for r in reports {
        writeln!(out, "{r}").map_err(data)?;
    }
    out.flush().map_err(data)
}

/// Every line, blank ones included, so hypotheses stay aligned with references.
fn read_lines(path: &Path, wx: bool) -> Result<Vec<String>, Failure> {
    let text = std::fs::read(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(text).map_err(|e| {
        data(format!("{}: not UTF-8 at byte {}", path.display(), e.utf8_error().valid_up_to()))
    })?;
    Ok(text
        .lines()
        .map(|l| {
            let s = crate::corpus::Sentence::new(l).map(|s| s.text().to_owned()).unwrap_or_default();
            if wx {
                crate::translit::to_wx(&s)
            } else {
                s
            }
        })
        .collect())
}
