//! How much the tweets collected as contextual knowledge help.
//!
//! cargo run --example context_ablation

use std::path::Path;

use emn_linker::config::Config;
use emn_linker::corpus;
use emn_linker::eval::ablate_context;
use emn_linker::pipeline::{BuildInputs, InputPaths};

fn main() -> emn_linker::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let cfg = Config::load(&demo.join("demo.conf"))?;
    let inputs = BuildInputs::load(InputPaths {
        triples: &demo.join("triples.tsv"),
        labels: &demo.join("labels.tsv"),
        tweets: &demo.join("pool.jsonl"),
        page_views: &demo.join("pageviews.tsv"),
        phrases: &demo.join("phrases.txt"),
        stopwords: None,
    })?;
    let gold = corpus::load_tweets(&demo.join("gold.jsonl"))?;
    let a = ablate_context(
        &inputs,
        &cfg.build_options()?,
        &gold,
        cfg.k,
        cfg.folds,
        cfg.seed,
        &cfg.train_options(),
    )?;
    println!("{:<18}{:>12}{:>12}", "", "recall@k", "accuracy");
    for (name, r) in [("factual only", &a.without_context), ("factual + context", &a.with_context)] {
        println!("{name:<18}{:>12.2}{:>12.2}", r.recall_at_k, r.disambiguation_accuracy);
    }
    Ok(())
}
