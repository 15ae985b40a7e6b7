//! Build the demo Entity Model Network and save it as a snapshot.
//!
//! cargo run --example build_network [out.emn]

use std::path::Path;

use emn_linker::config::Config;
use emn_linker::pipeline::{build_emn, BuildInputs, InputPaths};

fn main() -> emn_linker::Result<()> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let demo = root.join("data/demo");
    let cfg = Config::load(&demo.join("demo.conf"))?;
    let inputs = BuildInputs::load(InputPaths {
        triples: &demo.join("triples.tsv"),
        labels: &demo.join("labels.tsv"),
        tweets: &demo.join("pool.jsonl"),
        page_views: &demo.join("pageviews.tsv"),
        phrases: &demo.join("phrases.txt"),
        stopwords: None,
    })?;
    let outcome = build_emn(&inputs, &cfg.build_options()?)?;
    let g = &outcome.graph;
    println!(
        "{} network as of {}: {} entities, {} clues, {} edges",
        g.entity_type(),
        g.built_at(),
        g.entity_count(),
        g.clue_count(),
        g.edge_count()
    );
    for e in g.entities() {
        let clues = g.entity_clues(&e.entity_id)?;
        let shown: Vec<String> = clues.iter().take(5).map(|(c, f)| format!("{}x{f}", c.name)).collect();
        println!("  {:<32} salience {:>6}  {}", e.entity_id, e.salience.0, shown.join(", "));
    }

    // the least specific clues are shared by many movies
    let mut common: Vec<_> = g.clues().iter().filter(|c| g.clue_edges(g.clue_index(&c.name).unwrap()).len() > 2).collect();
    common.sort_by(|a, b| a.specificity.total_cmp(&b.specificity).then(a.name.cmp(&b.name)));
    let names: Vec<String> = common.iter().take(8).map(|c| format!("{} ({:.2})", c.name, c.specificity)).collect();
    println!("widely shared clues: {}", names.join(", "));

    if let Some(out) = std::env::args().nth(1) {
        std::fs::write(&out, g.to_snapshot()).map_err(|e| emn_linker::Error::Io {
            path: out.clone().into(),
            source: e,
        })?;
        println!("snapshot written to {out}");
    }
    Ok(())
}
