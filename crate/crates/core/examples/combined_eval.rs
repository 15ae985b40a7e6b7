//! An explicit linker alone versus the same linker backed by implicit
//! linking, on a mix of explicit, implicit and NIL tweets.
//!
//! cargo run --example combined_eval

use std::path::Path;

use emn_linker::config::Config;
use emn_linker::corpus;
use emn_linker::eval::{combined_f1, mix_dataset, ExplicitLinkerStub};
use emn_linker::linker::{train, Linker, TrainingQuery};
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

    let implicit = corpus::load_tweets(&demo.join("gold.jsonl"))?;
    let explicit = corpus::load_tweets(&demo.join("explicit.jsonl"))?;
    let nil = corpus::load_tweets(&demo.join("nil.jsonl"))?;
    // one explicit tweet per implicit one; the demo has fewer, so all are used
    let mix = mix_dataset(&implicit, &explicit, &nil, (1, 1), cfg.seed)?;
    println!("train on {} implicit tweets, test on {} mixed tweets", mix.train.len(), mix.test.len());

    let queries = mix
        .train
        .iter()
        .map(|t| {
            Ok(TrainingQuery {
                query_id: t.id.clone(),
                candidates: linker.candidate_features(&t.text)?,
                gold: t.gold_entity.clone().unwrap_or_default(),
            })
        })
        .collect::<emn_linker::Result<Vec<_>>>()?;
    let ranker = train(&queries, &cfg.train_options())?.ranker;

    let stub = ExplicitLinkerStub::load(&demo.join("stub.tsv"))?;
    let report = combined_f1(&stub, &mix.test, &linker, &ranker)?;
    print!("{}", report.to_table());
    Ok(())
}
