//! The `emn-linker` command line.
//!
//! Exit status: 0 on success, 1 on a domain error, 2 on a usage error
//! (including a required path given neither as a flag nor in the config).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_date, parse_weighting, Config};
use crate::corpus::{self, PhraseDictionary};
use crate::emn::EmnGraph;
use crate::error::{Error, Result};
use crate::eval::{ablate_context, combined_f1, cross_validate, recall_at_k, write_predictions, ExplicitLinkerStub};
use crate::linker::{train, LinkRequest, Linker, TrainedRanker, TrainingQuery};
use crate::pipeline::{build_emn, BuildInputs, InputPaths};
use crate::textprep::Stopwords;

#[derive(Debug, Parser)]
#[command(name = "emn-linker", version, about = "Implicit entity linking over an Entity Model Network")]
struct Cli {
    /// Flat key = value settings; explicit flags override them.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for model building and cross-validation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an EMN snapshot from local corpora.
    BuildEmn(BuildCmd),
    /// Train the pairwise ranker on gold-annotated tweets.
    Train(TrainCmd),
    /// Rank candidate entities for one tweet.
    Link(LinkCmd),
    /// Evaluation protocols.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Print one entity's clues with specificity and frequency.
    Inspect(InspectCmd),
}

#[derive(Debug, Subcommand)]
enum EvalCmd {
    /// Candidate-selection recall at k.
    Recall(RecallCmd),
    /// k-fold cross-validated disambiguation accuracy.
    Cv(CvCmd),
    /// With vs without contextual knowledge.
    Ablate(AblateCmd),
    /// Explicit linker alone vs explicit + implicit linking.
    Combined(CombinedCmd),
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long)]
    triples: Option<PathBuf>,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Tweet pool for spotting and contextual knowledge (JSONL).
    #[arg(long)]
    tweets: Option<PathBuf>,
    #[arg(long)]
    pageviews: Option<PathBuf>,
    #[arg(long = "as-of")]
    as_of: Option<String>,
    #[arg(long = "type")]
    entity_type: Option<String>,
    /// Comma-separated keywords paired with labels when collecting tweets.
    #[arg(long = "type-keywords")]
    type_keywords: Option<String>,
    #[arg(long = "m")]
    m_relations: Option<usize>,
    #[arg(long = "context-cap")]
    context_cap: Option<usize>,
    #[arg(long = "window-days")]
    window_days: Option<u32>,
}

#[derive(Debug, Args)]
struct TextArgs {
    #[arg(long)]
    phrases: Option<PathBuf>,
    /// Defaults to the bundled English list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long)]
    k: Option<usize>,
    /// binary or tf
    #[arg(long = "tweet-weighting")]
    tweet_weighting: Option<String>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long = "c")]
    c_tradeoff: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long = "learning-rate")]
    learning_rate: Option<f64>,
}

#[derive(Debug, Args)]
struct BuildCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    text: TextArgs,
    /// Factual knowledge only.
    #[arg(long = "no-context")]
    no_context: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    /// Gold-annotated tweets (JSONL).
    #[arg(long, alias = "gold")]
    tweets: Option<PathBuf>,
    #[command(flatten)]
    text: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LinkCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    #[arg(long)]
    ranker: Option<PathBuf>,
    #[arg(long = "type")]
    entity_type: Option<String>,
    #[arg(long)]
    text: String,
    /// Rows to print.
    #[arg(long, default_value_t = 5)]
    top: usize,
    #[command(flatten)]
    text_args: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
}

#[derive(Debug, Args)]
struct RecallCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[command(flatten)]
    text: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
    #[command(flatten)]
    outputs: OutputArgs,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the metrics TSV here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the per-tweet prediction dump here.
    #[arg(long)]
    predictions: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CvCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    folds: Option<usize>,
    #[command(flatten)]
    text: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[command(flatten)]
    outputs: OutputArgs,
}

#[derive(Debug, Args)]
struct AblateCmd {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    folds: Option<usize>,
    #[command(flatten)]
    text: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
    #[command(flatten)]
    train: TrainArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CombinedCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    #[arg(long)]
    ranker: Option<PathBuf>,
    #[arg(long)]
    stub: Option<PathBuf>,
    /// Mixed explicit / implicit / NIL tweets (JSONL).
    #[arg(long)]
    gold: Option<PathBuf>,
    #[command(flatten)]
    text: TextArgs,
    #[command(flatten)]
    rank: RankArgs,
    #[command(flatten)]
    outputs: OutputArgs,
}

#[derive(Debug, Args)]
struct InspectCmd {
    #[arg(long)]
    emn: Option<PathBuf>,
    #[arg(long)]
    entity: String,
    /// Print at most this many clues.
    #[arg(long)]
    top: Option<usize>,
}

fn set_path(slot: &mut Option<PathBuf>, flag: &Option<PathBuf>) {
    if let Some(p) = flag {
        *slot = Some(p.clone());
    }
}

fn overlay_corpus(cfg: &mut Config, a: &CorpusArgs) -> Result<()> {
    set_path(&mut cfg.triples, &a.triples);
    set_path(&mut cfg.labels, &a.labels);
    set_path(&mut cfg.tweets, &a.tweets);
    set_path(&mut cfg.pageviews, &a.pageviews);
    if let Some(d) = &a.as_of {
        cfg.as_of_date = Some(parse_date(d)?);
    }
    if let Some(t) = &a.entity_type {
        cfg.entity_type = t.clone();
    }
    if let Some(k) = &a.type_keywords {
        cfg.set("type_keywords", k)?;
    }
    if let Some(m) = a.m_relations {
        cfg.m_relations = m;
    }
    if let Some(c) = a.context_cap {
        cfg.context_cap = c;
    }
    if let Some(w) = a.window_days {
        cfg.salience_window_days = w;
    }
    Ok(())
}

fn overlay_text(cfg: &mut Config, a: &TextArgs) {
    set_path(&mut cfg.phrases, &a.phrases);
    set_path(&mut cfg.stopwords, &a.stopwords);
}

fn overlay_rank(cfg: &mut Config, a: &RankArgs) -> Result<()> {
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(w) = &a.tweet_weighting {
        cfg.tweet_weighting = parse_weighting(w)?;
    }
    Ok(())
}

fn overlay_train(cfg: &mut Config, a: &TrainArgs) {
    if let Some(c) = a.c_tradeoff {
        cfg.c_tradeoff = c;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(e) = a.epochs {
        cfg.epochs = e;
    }
    if let Some(l) = a.learning_rate {
        cfg.learning_rate = l;
    }
}

fn overlay_outputs(cfg: &mut Config, a: &OutputArgs) {
    set_path(&mut cfg.out, &a.out);
    set_path(&mut cfg.predictions, &a.predictions);
}

fn required<'a>(slot: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    slot.as_deref().ok_or_else(|| Error::MissingSetting(key.to_owned()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

struct TextResources {
    dictionary: PhraseDictionary,
    stopwords: Stopwords,
}

fn text_resources(cfg: &Config) -> Result<TextResources> {
    Ok(TextResources {
        dictionary: corpus::load_phrase_dictionary(required(&cfg.phrases, "phrases")?)?,
        stopwords: match &cfg.stopwords {
            Some(p) => corpus::load_stopwords(p)?,
            None => Stopwords::english(),
        },
    })
}

fn load_graph(cfg: &Config) -> Result<EmnGraph> {
    EmnGraph::from_snapshot(&read(required(&cfg.emn, "emn")?)?)
}

fn load_ranker(cfg: &Config) -> Result<TrainedRanker> {
    TrainedRanker::from_model_file(&read(required(&cfg.ranker, "ranker")?)?)
}

fn build_inputs(cfg: &Config) -> Result<BuildInputs> {
    BuildInputs::load(InputPaths {
        triples: required(&cfg.triples, "triples")?,
        labels: required(&cfg.labels, "labels")?,
        tweets: required(&cfg.tweets, "tweets")?,
        page_views: required(&cfg.pageviews, "pageviews")?,
        phrases: required(&cfg.phrases, "phrases")?,
        stopwords: cfg.stopwords.as_deref(),
    })
}

/// Runs the CLI and returns the process exit code. `argv[0]` is the program
/// name. Normal output is returned through `stdout`; diagnostics go to
/// standard error.
pub fn run_with_output<I, T>(argv: I, stdout: &mut String) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if e.use_stderr() {
                eprint!("{e}");
            } else {
                stdout.push_str(&e.render().to_string());
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MissingSetting(_) => 2,
                _ => 1,
            }
        }
    }
}

/// [`run_with_output`] printing to the real stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = String::new();
    let code = run_with_output(argv, &mut out);
    print!("{out}");
    code
}

fn execute(cli: Cli, out: &mut String) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    let cmd = cli.command;
    match &cmd {
        Command::BuildEmn(c) => {
            overlay_corpus(&mut cfg, &c.corpus)?;
            overlay_text(&mut cfg, &c.text);
            if c.no_context {
                cfg.include_contextual = false;
            }
            set_path(&mut cfg.out, &c.out);
        }
        Command::Train(c) => {
            set_path(&mut cfg.emn, &c.emn);
            set_path(&mut cfg.gold, &c.tweets);
            overlay_text(&mut cfg, &c.text);
            overlay_rank(&mut cfg, &c.rank)?;
            overlay_train(&mut cfg, &c.train);
            set_path(&mut cfg.out, &c.out);
        }
        Command::Link(c) => {
            set_path(&mut cfg.emn, &c.emn);
            set_path(&mut cfg.ranker, &c.ranker);
            if let Some(t) = &c.entity_type {
                cfg.entity_type = t.clone();
            }
            overlay_text(&mut cfg, &c.text_args);
            overlay_rank(&mut cfg, &c.rank)?;
        }
        Command::Eval(EvalCmd::Recall(c)) => {
            set_path(&mut cfg.emn, &c.emn);
            set_path(&mut cfg.gold, &c.gold);
            overlay_text(&mut cfg, &c.text);
            overlay_rank(&mut cfg, &c.rank)?;
            overlay_outputs(&mut cfg, &c.outputs);
        }
        Command::Eval(EvalCmd::Cv(c)) => {
            set_path(&mut cfg.emn, &c.emn);
            set_path(&mut cfg.gold, &c.gold);
            if let Some(f) = c.folds {
                cfg.folds = f;
            }
            overlay_text(&mut cfg, &c.text);
            overlay_rank(&mut cfg, &c.rank)?;
            overlay_train(&mut cfg, &c.train);
            overlay_outputs(&mut cfg, &c.outputs);
        }
        Command::Eval(EvalCmd::Ablate(c)) => {
            overlay_corpus(&mut cfg, &c.corpus)?;
            set_path(&mut cfg.gold, &c.gold);
            if let Some(f) = c.folds {
                cfg.folds = f;
            }
            overlay_text(&mut cfg, &c.text);
            overlay_rank(&mut cfg, &c.rank)?;
            overlay_train(&mut cfg, &c.train);
            set_path(&mut cfg.out, &c.out);
        }
        Command::Eval(EvalCmd::Combined(c)) => {
            set_path(&mut cfg.emn, &c.emn);
            set_path(&mut cfg.ranker, &c.ranker);
            set_path(&mut cfg.stub, &c.stub);
            set_path(&mut cfg.gold, &c.gold);
            overlay_text(&mut cfg, &c.text);
            overlay_rank(&mut cfg, &c.rank)?;
            overlay_outputs(&mut cfg, &c.outputs);
        }
        Command::Inspect(c) => set_path(&mut cfg.emn, &c.emn),
    }
    cfg.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(|| dispatch(&cmd, &cfg, out))
}

fn dispatch(cmd: &Command, cfg: &Config, out: &mut String) -> Result<()> {
    match cmd {
        Command::BuildEmn(_) => {
            let inputs = build_inputs(cfg)?;
            let outcome = build_emn(&inputs, &cfg.build_options()?)?;
            let g = &outcome.graph;
            write(required(&cfg.out, "out")?, &g.to_snapshot())?;
            let _ = writeln!(
                out,
                "entities\t{}\nclues\t{}\nedges\t{}\nskipped\t{}",
                g.entity_count(),
                g.clue_count(),
                g.edge_count(),
                outcome.skipped.len()
            );
            for r in outcome.relations.iter().take(cfg.m_relations) {
                let _ = writeln!(out, "relation\t{}\t{}/{}", r.predicate, r.matched, r.total);
            }
        }
        Command::Train(_) => {
            let graph = load_graph(cfg)?;
            let text = text_resources(cfg)?;
            let linker = Linker::new(&graph, &text.dictionary, &text.stopwords).with_options(cfg.link_options());
            let gold = corpus::load_tweets(required(&cfg.gold, "gold")?)?;
            let mut queries = Vec::new();
            let mut no_candidates = 0;
            for t in &gold {
                let g = t.gold_entity.clone().ok_or_else(|| Error::MissingGold(t.id.clone()))?;
                match linker.candidate_features(&t.text) {
                    Ok(candidates) => queries.push(TrainingQuery {
                        query_id: t.id.clone(),
                        candidates,
                        gold: g,
                    }),
                    Err(Error::NoCandidate) => no_candidates += 1,
                    Err(e) => return Err(e),
                }
            }
            let report = train(&queries, &cfg.train_options())?;
            write(required(&cfg.out, "out")?, &report.ranker.to_model_file())?;
            let _ = writeln!(
                out,
                "queries\t{}\nno_candidates\t{no_candidates}\ngold_outside_top_k\t{}\npairs\t{}\nswapped_pairs\t{}\nweights\t{}",
                queries.len(),
                report.skipped_queries,
                report.pairs,
                report.swapped_pairs,
                report
                    .ranker
                    .weights
                    .iter()
                    .map(f64::to_string)
                    .collect::<Vec<_>>()
                    .join("\t")
            );
        }
        Command::Link(c) => {
            let graph = load_graph(cfg)?;
            let ranker = load_ranker(cfg)?;
            let text = text_resources(cfg)?;
            let linker = Linker::new(&graph, &text.dictionary, &text.stopwords).with_options(cfg.link_options());
            let ranked = linker.link(&ranker, &LinkRequest::new(cfg.entity_type.clone(), c.text.clone()))?;
            out.push_str("rank\tentity_id\tscore\n");
            for (i, r) in ranked.iter().take(c.top).enumerate() {
                let _ = writeln!(out, "{}\t{}\t{}", i + 1, r.entity_id, r.score);
            }
        }
        Command::Eval(EvalCmd::Recall(_)) => {
            let graph = load_graph(cfg)?;
            let text = text_resources(cfg)?;
            let linker = Linker::new(&graph, &text.dictionary, &text.stopwords).with_options(cfg.link_options());
            let gold = corpus::load_tweets(required(&cfg.gold, "gold")?)?;
            let r = recall_at_k(&linker, &gold, cfg.k)?;
            let tsv = format!("metric\tvalue\ntweets\t{}\nrecall_at_{}\t{}\n", r.total, r.k, r.percent());
            let _ = writeln!(out, "candidate recall @{}: {:.2} ({}/{})", r.k, r.percent(), r.hits, r.total);
            if let Some(p) = &cfg.out {
                write(p, &tsv)?;
            }
            if let Some(p) = &cfg.predictions {
                write(p, &write_predictions(&r.predictions))?;
            }
        }
        Command::Eval(EvalCmd::Cv(_)) => {
            let graph = load_graph(cfg)?;
            let text = text_resources(cfg)?;
            let linker = Linker::new(&graph, &text.dictionary, &text.stopwords).with_options(cfg.link_options());
            let gold = corpus::load_tweets(required(&cfg.gold, "gold")?)?;
            let report = cross_validate(&linker, &gold, cfg.folds, cfg.seed, &cfg.train_options())?;
            out.push_str(&report.to_table());
            if let Some(p) = &cfg.out {
                write(p, &report.to_tsv())?;
            }
            if let Some(p) = &cfg.predictions {
                write(p, &write_predictions(&report.predictions))?;
            }
        }
        Command::Eval(EvalCmd::Ablate(_)) => {
            let inputs = build_inputs(cfg)?;
            let gold = corpus::load_tweets(required(&cfg.gold, "gold")?)?;
            let a = ablate_context(
                &inputs,
                &cfg.build_options()?,
                &gold,
                cfg.k,
                cfg.folds,
                cfg.seed,
                &cfg.train_options(),
            )?;
            let mut tsv = String::from("setting\trecall_at_k\tdisambiguation_accuracy\n");
            for (name, r) in [("without_context", &a.without_context), ("with_context", &a.with_context)] {
                let _ = writeln!(tsv, "{name}\t{}\t{}", r.recall_at_k, r.disambiguation_accuracy);
                let _ = writeln!(
                    out,
                    "{:<16} recall@{} {:>7.2}   accuracy {:>7.2}",
                    name.replace('_', " "),
                    r.k,
                    r.recall_at_k,
                    r.disambiguation_accuracy
                );
            }
            if let Some(p) = &cfg.out {
                write(p, &tsv)?;
            }
        }
        Command::Eval(EvalCmd::Combined(_)) => {
            let graph = load_graph(cfg)?;
            let ranker = load_ranker(cfg)?;
            let text = text_resources(cfg)?;
            let linker = Linker::new(&graph, &text.dictionary, &text.stopwords).with_options(cfg.link_options());
            let stub = ExplicitLinkerStub::load(required(&cfg.stub, "stub")?)?;
            let mixed = corpus::load_tweets(required(&cfg.gold, "gold")?)?;
            let report = combined_f1(&stub, &mixed, &linker, &ranker)?;
            out.push_str(&report.to_table());
            if let Some(p) = &cfg.out {
                write(p, &report.to_tsv())?;
            }
            if let Some(p) = &cfg.predictions {
                write(p, &report.predictions_tsv())?;
            }
        }
        Command::Inspect(c) => {
            let graph = load_graph(cfg)?;
            let idx = graph
                .entity_index(&c.entity)
                .ok_or_else(|| Error::UnknownEntity(c.entity.clone()))?;
            let node = graph.entity(idx);
            let _ = writeln!(out, "entity\t{}\t{}\tsalience={}", node.entity_id, node.name, node.salience.0);
            out.push_str("clue\torigin\tspecificity\tfrequency\n");
            let clues = graph.entity_clues(&c.entity)?;
            for (clue, freq) in clues.iter().take(c.top.unwrap_or(usize::MAX)) {
                let _ = writeln!(out, "{}\t{}\t{:.6}\t{freq}", clue.name, clue.origin, clue.specificity);
            }
        }
    }
    Ok(())
}
