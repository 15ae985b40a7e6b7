//! Text preparation: cleaning, hashtag splitting and clue extraction.
//!
//! cargo run --example clean_tweets

use std::path::Path;

use emn_linker::corpus::load_phrase_dictionary;
use emn_linker::textprep::{clean, decompose_tag, extract_clues, ClueMode, Stopwords};

fn main() -> emn_linker::Result<()> {
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo");
    let dict = load_phrase_dictionary(&demo.join("phrases.txt"))?;
    let stop = Stopwords::english();

    for tag in ["#AlfonsoCuaron", "@TheFaultInOurStars", "#kingofmonsters"] {
        println!("{tag:<22} -> {:?}", decompose_tag(tag)?);
    }
    println!();

    let tweets = [
        "RT @SandraBullock: floating in space :) with George Clooney http://t.co/xyz",
        "Saw it 3 times!!! 12,000,000 people watched #OptimusPrime ride the Dinobots",
        "Sleeping Beauty from the fairy's side... #DarkFantasy ;-)",
    ];
    for t in tweets {
        let c = clean(t);
        let clues = extract_clues(&c, &dict, &stop, ClueMode::Tweet);
        println!("raw:      {t}");
        println!("clean:    {}", c.render());
        println!("phrases:  {:?}", clues.phrases.keys().collect::<Vec<_>>());
        println!("unigrams: {:?}\n", clues.unigrams.keys().collect::<Vec<_>>());
    }
    Ok(())
}
