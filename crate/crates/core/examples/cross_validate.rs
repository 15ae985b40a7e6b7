//! Candidate recall over k and cross-validated disambiguation accuracy.
//!
//! cargo run --example cross_validate

use std::path::Path;

use emn_linker::config::Config;
use emn_linker::corpus;
use emn_linker::eval::{cross_validate, recall_at_k};
use emn_linker::linker::Linker;
use emn_linker::pipeline::{build_emn, BuildInputs, InputPaths};

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
    let graph = build_emn(&inputs, &cfg.build_options()?)?.graph;
    let linker = Linker::new(&graph, &inputs.dictionary, &inputs.stopwords);
    let gold = corpus::load_tweets(&demo.join("gold.jsonl"))?;

    println!("candidate recall by k:");
    for k in [1, 2, 3, 5, 25] {
        let r = recall_at_k(&linker, &gold, k)?;
        println!("  k={k:<3} {:>6.2}%  ({}/{})", r.percent(), r.hits, r.total);
    }
    println!();
    let report = cross_validate(&linker, &gold, cfg.folds, cfg.seed, &cfg.train_options())?;
    print!("{}", report.to_table());
    let wrong: Vec<_> = report.predictions.iter().filter(|p| !p.correct()).collect();
    for p in wrong {
        println!("  missed {}: gold {} predicted {:?}", p.tweet_id, p.gold, p.predicted);
    }
    Ok(())
}
