//! Train the ranker on the demo gold tweets, then link new tweets.
//!
//! cargo run --example link_tweet -- "my tweet text"

use std::path::Path;

use emn_linker::config::Config;
use emn_linker::corpus;
use emn_linker::linker::{train, LinkRequest, Linker, TrainOptions, TrainingQuery};
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
    let queries = gold
        .iter()
        .map(|t| {
            Ok(TrainingQuery {
                query_id: t.id.clone(),
                candidates: linker.candidate_features(&t.text)?,
                gold: t.gold_entity.clone().unwrap_or_default(),
            })
        })
        .collect::<emn_linker::Result<Vec<_>>>()?;
    let report = train(&queries, &TrainOptions::default())?;
    println!(
        "ranker weights {:?}, {} training pairs, {} still misordered\n",
        report.ranker.weights, report.pairs, report.swapped_pairs
    );

    let args: Vec<String> = std::env::args().skip(1).collect();
    let texts = if args.is_empty() {
        vec![
            "that thorn wall scene gave me goosebumps".to_string(),
            "Cruise with an exosuit on a beach, again and again".to_string(),
            "I cried at the Anne Frank house kiss".to_string(),
        ]
    } else {
        args
    };
    for text in texts {
        println!("{text}");
        match linker.link(&report.ranker, &LinkRequest::new("Movie", text.clone())) {
            Ok(ranked) => {
                for (i, r) in ranked.iter().take(3).enumerate() {
                    println!(
                        "  {}. {:<32} score {:.5}  cosine {:.3}  salience share {:.3}",
                        i + 1,
                        r.entity_id,
                        r.score,
                        r.features.cosine,
                        r.features.rel_salience
                    );
                }
            }
            Err(e) => println!("  {e}"),
        }
    }
    Ok(())
}
