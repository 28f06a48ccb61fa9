//! `cswgec` — generate, filter, measure and score code-switched GEC
//! corpora from the command line.

mod config;
mod io_util;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{
    parse_merge, parse_method, parse_target_lang_for_filter, resolve, resolve_opt,
    resolve_required, BackendSpec, FileConfig, InputFormat, Side,
};
use cswgec_core::corpus::{read_pos, read_trees, write_m2_to_vec};
use cswgec_core::langid::{corpus_stats_with, filter_csw};
use cswgec_core::pipeline::{generate_corpus, to_m2_sentences, GenerateOptions, PipelineError};
use cswgec_core::score::{score_corpus, score_from_text, ScoreResult};
use cswgec_core::select::SelectionConfig;
use cswgec_core::translate::{
    CacheStore, DictionaryBackend, HttpBackend, HttpBackendConfig, Lexicon, ScriptSegmenter,
    TranslationBackend,
};

/// Name of the environment variable carrying the HTTP backend credential.
/// Deliberately not a flag: command lines leak into shell history.
const API_KEY_ENV: &str = "CSW_TRANSLATE_API_KEY";

#[derive(Debug)]
enum CliError {
    /// Bad flags or config; exit 1.
    Usage(String),
    /// Unreadable or malformed data; exit 2.
    Data(String),
    /// Backend or network failure; exit 3.
    Backend(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) | CliError::Backend(msg) => f.write_str(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "cswgec",
    version,
    about = "Code-switched GEC corpus toolkit",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Generate a code-switched corpus from an M2 file.
    Generate(GenerateArgs),
    /// Apply the test-set filters to sentence pairs.
    Filter(FilterArgs),
    /// Compute code-switching ratio and switchpoint statistics.
    Stats(StatsArgs),
    /// Score hypothesis corrections against reference edits.
    Score(ScoreArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Validate inputs and print the resolved configuration, writing
    /// nothing.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input corpus in M2 format.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output M2 path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generation report JSON path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Span selection method: ratio-token|cont-token|rand-phrase|
    /// ratio-phrase|overlap-phrase|noun-token.
    #[arg(long)]
    method: Option<String>,
    /// Target language, ISO 639-1 (e.g. zh, ja, ko).
    #[arg(long)]
    target_lang: Option<String>,
    /// Source language, ISO 639-1.
    #[arg(long)]
    source_lang: Option<String>,
    /// Backend descriptor: dict:<tsv-path> or http(s)://<url>.
    #[arg(long)]
    backend: Option<String>,
    /// Bracketed parse trees, one per line, over the corrected side.
    #[arg(long)]
    trees: Option<PathBuf>,
    /// UPOS tags, one line per sentence, over the corrected side.
    #[arg(long)]
    pos: Option<PathBuf>,
    /// Target fraction of switched tokens, in (0, 1].
    #[arg(long)]
    ratio: Option<f64>,
    /// Random seed; identical seeds give byte-identical outputs.
    #[arg(long)]
    seed: Option<u64>,
    /// Annotator whose edits are applied and re-applied.
    #[arg(long)]
    annotator: Option<u32>,
    /// Exclude selection candidates that overlap edit spans.
    #[arg(long)]
    avoid_edits: bool,
    /// Abort on the first translation failure instead of skipping.
    #[arg(long)]
    fail_fast: bool,
    /// Sentence-level parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Wordlist for longest-match segmentation of translations.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Persistent translation cache (HTTP backend).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Header name carrying the API key from $CSW_TRANSLATE_API_KEY.
    #[arg(long)]
    api_key_header: Option<String>,
}

#[derive(Args)]
struct FilterArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input pairs: TSV (orig<TAB>corrected) or M2.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output TSV of surviving pairs.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Filter report JSON path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Embedded language of the pair: zh|ja|ko.
    #[arg(long)]
    target_lang: Option<String>,
    /// Input format override: m2|tsv.
    #[arg(long)]
    format: Option<String>,
    /// Annotator for M2 inputs.
    #[arg(long)]
    annotator: Option<u32>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input corpus: M2, TSV pairs, or plain tokenized text.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which side of an M2/TSV input to measure: source|corrected.
    #[arg(long)]
    side: Option<String>,
    /// Count punctuation and digits in the ratio denominator.
    #[arg(long)]
    count_neutral: bool,
    /// Input format override: m2|tsv|text.
    #[arg(long)]
    format: Option<String>,
    /// Annotator for M2 inputs.
    #[arg(long)]
    annotator: Option<u32>,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Reference corpus in M2 format.
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    /// Hypothesis: tokenized text (one sentence per line) or M2.
    #[arg(long)]
    hyp: Option<PathBuf>,
    /// F-beta weight.
    #[arg(long)]
    beta: Option<f64>,
    /// Edit grouping for text hypotheses: merged|split.
    #[arg(long)]
    merge: Option<String>,
    /// Score JSON path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Annotator providing hypothesis edits for M2 hypotheses.
    #[arg(long)]
    hyp_annotator: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprintln!("{}", first_line(&err.to_string()));
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => run_generate(args),
        Command::Filter(args) => run_filter(args),
        Command::Stats(args) => run_stats(args),
        Command::Score(args) => run_score(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", first_line(&msg));
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("{}", first_line(&msg));
            ExitCode::from(2)
        }
        Err(CliError::Backend(msg)) => {
            eprintln!("{}", first_line(&msg));
            ExitCode::from(3)
        }
    }
}

fn first_line(message: &str) -> String {
    message.lines().next().unwrap_or("error").to_string()
}

fn require_readable(label: &str, path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{label} {} is not a readable file",
            path.display()
        )))
    }
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResolvedGenerate {
    command: &'static str,
    input: PathBuf,
    output: PathBuf,
    report: Option<PathBuf>,
    method: String,
    target_lang: String,
    source_lang: String,
    backend: BackendSpec,
    trees: Option<PathBuf>,
    pos: Option<PathBuf>,
    ratio: f64,
    seed: u64,
    annotator: u32,
    avoid_edits: bool,
    fail_fast: bool,
    jobs: usize,
    lexicon: Option<PathBuf>,
    cache: Option<PathBuf>,
    api_key_header: String,
}

fn run_generate(args: GenerateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;

    let method = parse_method(&resolve_required(args.method, file.method, "method")?)?;
    let resolved = ResolvedGenerate {
        command: "generate",
        input: resolve_required(args.input, file.input, "input")?,
        output: resolve_required(args.out, file.output, "out")?,
        report: resolve_opt(args.report, file.report),
        method: method.name().to_string(),
        target_lang: resolve_required(args.target_lang, file.target_lang, "target-lang")?,
        source_lang: resolve(args.source_lang, file.source_lang, "en".into()),
        backend: resolve_required(args.backend, file.backend, "backend")?
            .parse::<BackendSpec>()
            .map_err(CliError::Usage)?,
        trees: resolve_opt(args.trees, file.trees),
        pos: resolve_opt(args.pos, file.pos),
        ratio: resolve(args.ratio, file.ratio, 0.2),
        seed: resolve(args.seed, file.seed, 0),
        annotator: resolve(args.annotator, file.annotator, 0),
        avoid_edits: args.avoid_edits,
        fail_fast: args.fail_fast || file.fail_fast.unwrap_or(false),
        jobs: resolve(args.jobs, file.jobs, 1).max(1),
        lexicon: resolve_opt(args.lexicon, file.lexicon),
        cache: resolve_opt(args.cache, file.cache),
        api_key_header: resolve(args.api_key_header, file.api_key_header, "X-Api-Key".into()),
    };

    // Flag-level validation happens before any input is opened.
    if !(resolved.ratio > 0.0 && resolved.ratio <= 1.0) {
        return Err(CliError::Usage(format!(
            "--ratio must be in (0, 1], got {}",
            resolved.ratio
        )));
    }
    if method.needs_tree() && resolved.trees.is_none() {
        return Err(CliError::Usage(format!(
            "tree required: {method} needs --trees"
        )));
    }
    if method.needs_pos() && resolved.pos.is_none() {
        return Err(CliError::Usage(format!(
            "pos required: {method} needs --pos"
        )));
    }

    if args.common.dry_run {
        require_readable("input", &resolved.input)?;
        for (label, path) in [
            ("trees", &resolved.trees),
            ("pos", &resolved.pos),
            ("lexicon", &resolved.lexicon),
        ] {
            if let Some(path) = path {
                require_readable(label, path)?;
            }
        }
        if let BackendSpec::Dictionary(path) = &resolved.backend {
            require_readable("dictionary", path)?;
        }
        println!("{}", serde_json::to_string_pretty(&resolved).unwrap());
        return Ok(());
    }

    let mut corpus = io_util::load_m2(&resolved.input)?;
    if let Some(path) = &resolved.trees {
        read_trees(io_util::open_reader(path)?, &mut corpus, resolved.annotator)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &resolved.pos {
        read_pos(io_util::open_reader(path)?, &mut corpus, resolved.annotator)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }

    let backend: Box<dyn TranslationBackend> = match &resolved.backend {
        BackendSpec::Dictionary(path) => Box::new(
            DictionaryBackend::from_tsv(io_util::open_reader(path)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        ),
        BackendSpec::Http(url) => {
            let mut http = HttpBackendConfig::new(url.clone());
            if let Ok(key) = std::env::var(API_KEY_ENV) {
                http.api_key_header = Some((resolved.api_key_header.clone(), key));
            }
            let cache = match &resolved.cache {
                Some(path) => {
                    let store = CacheStore::open(path)
                        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
                    if store.skipped_on_load() > 0 {
                        eprintln!(
                            "warning: skipped {} corrupted cache records in {}",
                            store.skipped_on_load(),
                            path.display()
                        );
                    }
                    Some(store)
                }
                None => None,
            };
            Box::new(HttpBackend::new(http, cache))
        }
    };

    let segmenter = match &resolved.lexicon {
        Some(path) => {
            let lexicon = Lexicon::from_lines(io_util::open_reader(path)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            ScriptSegmenter::with_lexicon(lexicon)
        }
        None => ScriptSegmenter::new(),
    };

    let cfg = SelectionConfig {
        method,
        target_ratio: resolved.ratio,
        seed: resolved.seed,
        avoid_edits: resolved.avoid_edits,
    };
    let opts = GenerateOptions {
        target_lang: resolved.target_lang.clone(),
        source_lang: resolved.source_lang.clone(),
        annotator: resolved.annotator,
        fail_fast: resolved.fail_fast,
        jobs: resolved.jobs,
    };
    let (pairs, report) = generate_corpus(&corpus, &cfg, backend.as_ref(), &segmenter, &opts)
        .map_err(|e| match e {
            PipelineError::Translation { .. } => CliError::Backend(e.to_string()),
            other => CliError::Data(other.to_string()),
        })?;

    let sentences = to_m2_sentences(&pairs, &corpus, resolved.annotator);
    let bytes = write_m2_to_vec(&sentences).map_err(|e| CliError::Data(e.to_string()))?;
    io_util::write_atomic(&resolved.output, &bytes)?;
    if let Some(path) = &resolved.report {
        let json = serde_json::to_vec_pretty(&report).unwrap();
        io_util::write_atomic(path, &json)?;
    }
    eprintln!(
        "generated {} sentences ({} passed through, {} skipped, {} edits dropped)",
        report.sentences_out,
        report.sentences_passed_through,
        report.sentences_skipped,
        report.edits_dropped
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResolvedFilter {
    command: &'static str,
    input: PathBuf,
    output: PathBuf,
    report: Option<PathBuf>,
    target_lang: String,
    format: InputFormat,
    annotator: u32,
}

fn run_filter(args: FilterArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let input = resolve_required(args.input, file.input, "input")?;
    let format = match resolve_opt(args.format, file.format) {
        Some(name) => name.parse::<InputFormat>().map_err(CliError::Usage)?,
        None => InputFormat::guess(&input),
    };
    let target = parse_target_lang_for_filter(&resolve_required(
        args.target_lang,
        file.target_lang,
        "target-lang",
    )?)?;
    let resolved = ResolvedFilter {
        command: "filter",
        output: resolve_required(args.out, file.output, "out")?,
        report: resolve_opt(args.report, file.report),
        target_lang: target.to_string(),
        format,
        annotator: resolve(args.annotator, file.annotator, 0),
        input,
    };
    if matches!(resolved.format, InputFormat::Text) {
        return Err(CliError::Usage(
            "filter input must be tsv or m2 (use --format)".into(),
        ));
    }

    if args.common.dry_run {
        require_readable("input", &resolved.input)?;
        println!("{}", serde_json::to_string_pretty(&resolved).unwrap());
        return Ok(());
    }

    let pairs = io_util::load_pairs(&resolved.input, resolved.format, resolved.annotator)?;
    let (kept, report) = filter_csw(pairs, target);
    io_util::write_atomic(&resolved.output, io_util::pairs_to_tsv(&kept).as_bytes())?;
    if let Some(path) = &resolved.report {
        io_util::write_atomic(path, &serde_json::to_vec_pretty(&report).unwrap())?;
    }
    eprintln!(
        "kept {} of {} pairs (removed: language {}, no-correction {}, prefix {}, length {})",
        report.pairs_kept,
        report.pairs_in,
        report.removed_wrong_language,
        report.removed_no_correction,
        report.removed_prefix_comment,
        report.removed_length_diff
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResolvedStats {
    command: &'static str,
    input: PathBuf,
    output: Option<PathBuf>,
    side: Side,
    count_neutral: bool,
    format: InputFormat,
    annotator: u32,
}

fn run_stats(args: StatsArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let input = resolve_required(args.input, file.input, "input")?;
    let format = match resolve_opt(args.format, file.format) {
        Some(name) => name.parse::<InputFormat>().map_err(CliError::Usage)?,
        None => InputFormat::guess(&input),
    };
    let side = match resolve_opt(args.side, file.side) {
        Some(name) => name.parse::<Side>().map_err(CliError::Usage)?,
        None => Side::Source,
    };
    let resolved = ResolvedStats {
        command: "stats",
        output: resolve_opt(args.out, file.output),
        side,
        count_neutral: args.count_neutral || file.count_neutral.unwrap_or(false),
        format,
        annotator: resolve(args.annotator, file.annotator, 0),
        input,
    };

    if args.common.dry_run {
        require_readable("input", &resolved.input)?;
        println!("{}", serde_json::to_string_pretty(&resolved).unwrap());
        return Ok(());
    }

    let sentences = io_util::load_sentences(
        &resolved.input,
        resolved.format,
        resolved.side,
        resolved.annotator,
    )?;
    let stats = corpus_stats_with(&sentences, resolved.count_neutral);
    let json = serde_json::to_string_pretty(&stats).unwrap();
    match &resolved.output {
        Some(path) => io_util::write_atomic(path, json.as_bytes())?,
        None => println!("{json}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ResolvedScore {
    command: &'static str,
    #[serde(rename = "ref")]
    reference: PathBuf,
    hyp: PathBuf,
    beta: f64,
    merge: String,
    report: Option<PathBuf>,
    hyp_annotator: u32,
}

#[derive(Serialize)]
struct ScoreJson {
    tp: usize,
    fp: usize,
    #[serde(rename = "fn")]
    fn_: usize,
    precision: f64,
    recall: f64,
    f: f64,
}

fn run_score(args: ScoreArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let merge_name = resolve(args.merge, file.merge, "merged".into());
    let merge = parse_merge(&merge_name)?;
    let resolved = ResolvedScore {
        command: "score",
        reference: resolve_required(args.reference, file.reference, "ref")?,
        hyp: resolve_required(args.hyp, file.hyp, "hyp")?,
        beta: resolve(args.beta, file.beta, 0.5),
        merge: merge_name,
        report: resolve_opt(args.report, file.report),
        hyp_annotator: args.hyp_annotator.unwrap_or(0),
    };
    if resolved.beta <= 0.0 {
        return Err(CliError::Usage(format!(
            "--beta must be positive, got {}",
            resolved.beta
        )));
    }

    if args.common.dry_run {
        require_readable("ref", &resolved.reference)?;
        require_readable("hyp", &resolved.hyp)?;
        println!("{}", serde_json::to_string_pretty(&resolved).unwrap());
        return Ok(());
    }

    let reference = io_util::load_m2(&resolved.reference)?;
    let sources: Vec<_> = reference.iter().map(|s| s.tokens.clone()).collect();
    let ref_sets: Vec<_> = reference.iter().map(|s| s.edit_sets.clone()).collect();

    let result: ScoreResult = if InputFormat::guess(&resolved.hyp) == InputFormat::M2 {
        let hyp_corpus = io_util::load_m2(&resolved.hyp)?;
        if hyp_corpus.len() != reference.len() {
            return Err(CliError::Data(format!(
                "hypothesis has {} sentences, reference has {}",
                hyp_corpus.len(),
                reference.len()
            )));
        }
        for (i, (h, r)) in hyp_corpus.iter().zip(&reference).enumerate() {
            if h.tokens != r.tokens {
                return Err(CliError::Data(format!(
                    "sentence {i}: hypothesis source differs from reference source"
                )));
            }
        }
        let hyp_edits: Vec<_> = hyp_corpus
            .iter()
            .map(|s| s.edits_for(resolved.hyp_annotator).to_vec())
            .collect();
        score_corpus(&sources, &hyp_edits, &ref_sets, resolved.beta)
            .map_err(|e| CliError::Data(e.to_string()))?
    } else {
        let hyp_sentences =
            io_util::load_sentences(&resolved.hyp, InputFormat::Text, Side::Source, 0)?;
        if hyp_sentences.len() != reference.len() {
            return Err(CliError::Data(format!(
                "hypothesis has {} sentences, reference has {}",
                hyp_sentences.len(),
                reference.len()
            )));
        }
        score_from_text(&sources, &hyp_sentences, &ref_sets, merge, resolved.beta)
            .map_err(|e| CliError::Data(e.to_string()))?
    };

    let json = ScoreJson {
        tp: result.counts.tp,
        fp: result.counts.fp,
        fn_: result.counts.fn_,
        precision: result.prf.precision,
        recall: result.prf.recall,
        f: result.prf.f,
    };
    let rendered = serde_json::to_string_pretty(&json).unwrap();
    match &resolved.report {
        Some(path) => io_util::write_atomic(path, rendered.as_bytes())?,
        None => println!("{rendered}"),
    }
    println!(
        "TP={} FP={} FN={} P={:.4} R={:.4} F{}={:.4}",
        json.tp,
        json.fp,
        json.fn_,
        json.precision,
        json.recall,
        format_beta(resolved.beta),
        json.f
    );
    Ok(())
}

fn format_beta(beta: f64) -> String {
    if (beta - beta.round()).abs() < f64::EPSILON {
        format!("{}", beta.round() as i64)
    } else {
        format!("{beta}")
    }
}
