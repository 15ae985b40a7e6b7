//! The two knowledge sources behind an entity model, plus its salience.
//!
//! cargo run --example knowledge_sources [entity_id]

use std::collections::HashSet;
use std::path::Path;

use chrono::NaiveDate;
use emn_linker::corpus::{self, index_records};
use emn_linker::knowledge::{
    collect_contextual, extract_factual, rank_relationships, temporal_salience, top_relations, TweetPool,
};

fn main() -> emn_linker::Result<()> {
    let entity = std::env::args().nth(1).unwrap_or_else(|| "Edge_of_Tomorrow".into());
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let triples = corpus::load_triples(&demo.join("triples.tsv"))?;
    let labels = corpus::load_labels(&demo.join("labels.tsv"))?;
    let pool = TweetPool::new(corpus::load_tweets(&demo.join("pool.jsonl"))?);
    let views = corpus::load_page_views(&demo.join("pageviews.tsv"))?;

    let movies: HashSet<String> = labels
        .iter()
        .filter(|r| r.entity_type == "Movie")
        .map(|r| r.entity_id.clone())
        .collect();
    let ranked = rank_relationships(&triples, &movies)?;
    println!("relation ranking for Movie:");
    for r in &ranked {
        println!("  {:<18} {:.3}  ({}/{})", r.predicate, r.score, r.matched, r.total);
    }
    let top = top_relations(&ranked, 6);

    let records = index_records(&labels);
    let record = *records
        .get(entity.as_str())
        .ok_or_else(|| emn_linker::Error::UnknownEntity(entity.clone()))?;
    let factual = extract_factual(&entity, &records, &triples, &top)?;
    println!("\nfactual knowledge of {entity}:");
    for t in &factual.texts {
        println!("  {t}");
    }

    let keywords = ["movie".to_string(), "film".to_string()];
    let contextual = collect_contextual(record, &pool, &keywords, 1000);
    println!("\ncontextual knowledge ({} tweets, newest first):", contextual.tweets.len());
    for t in &contextual.tweets {
        println!("  {}", t.text);
    }

    let as_of = NaiveDate::from_ymd_opt(2014, 7, 31).unwrap();
    let s = temporal_salience(&entity, &views, as_of, 30);
    println!("\npage views in the 30 days to {as_of}: {}", s.0);
    Ok(())
}
