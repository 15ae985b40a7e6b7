//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use chrono::NaiveDate;
use emn_linker::corpus::{EntityRecord, GoldLabel, PageViewRecord, PhraseDictionary, Triple, Tweet};
use emn_linker::emn::{assemble, EmnGraph, EntityInput, EntityModel, GraphMeta};
use emn_linker::knowledge::{TemporalSalience, TweetPool};
use emn_linker::pipeline::{BuildInputs, BuildOptions};
use emn_linker::textprep::{ClueSet, Stopwords};
use rand::Rng;

pub fn demo_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/demo")
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

pub fn meta(entity_type: &str) -> GraphMeta {
    GraphMeta {
        entity_type: entity_type.into(),
        built_at: date(2014, 7, 31),
    }
}

/// A random network as raw models, kept so oracles can work from the
/// inputs rather than from the assembled graph.
pub struct RandomEmn {
    pub models: BTreeMap<String, EntityInput>,
    pub vocabulary: Vec<String>,
    pub graph: EmnGraph,
}

pub fn random_emn(rng: &mut impl Rng, max_entities: usize, max_clues: usize) -> RandomEmn {
    let n = rng.gen_range(2..=max_entities);
    let v = rng.gen_range(1..=max_clues);
    let vocabulary: Vec<String> = (0..v).map(alpha_word).collect();
    let mut models = BTreeMap::new();
    for e in 0..n {
        let picks = rng.gen_range(1..=30.min(v));
        let mut clues = BTreeMap::new();
        for _ in 0..picks {
            // squared uniform skews towards low indices, giving popular clues
            let u: f64 = rng.gen();
            let idx = ((u * u) * v as f64) as usize;
            clues.insert(vocabulary[idx.min(v - 1)].clone(), rng.gen_range(1..=4u32));
        }
        let model: EntityModel = clues.into_iter().collect();
        models.insert(
            format!("e{e:03}"),
            EntityInput {
                name: format!("entity {e}"),
                salience: TemporalSalience(rng.gen_range(0..4)),
                model,
            },
        );
    }
    let graph = assemble(meta("Thing"), models.clone()).unwrap();
    RandomEmn {
        models,
        vocabulary,
        graph,
    }
}

/// Distinct alphabetic words, so they survive text cleaning unchanged.
pub fn alpha_word(mut i: usize) -> String {
    let mut w = String::from("zq");
    loop {
        w.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return w;
        }
    }
}

/// A tweet's clue multiset drawn from the vocabulary plus one unknown word.
pub fn random_clues(rng: &mut impl Rng, vocabulary: &[String]) -> ClueSet {
    let mut clues = ClueSet::default();
    for _ in 0..rng.gen_range(1..=8) {
        let w = &vocabulary[rng.gen_range(0..vocabulary.len())];
        *clues.unigrams.entry(w.clone()).or_insert(0) += rng.gen_range(1..=2);
    }
    clues.unigrams.insert("unseenword".into(), 1);
    clues
}

const HEADS: [&str; 6] = ["vor", "mag", "sul", "pex", "dun", "kir"];
const TAILS: [&str; 6] = ["ant", "ell", "ox", "ime", "usk", "oth"];

/// Clue word `j` of separable entity `i`.
pub fn sep_word(i: usize, j: usize) -> String {
    format!("{}{}", HEADS[i], TAILS[j])
}

/// Five entities with disjoint six-word vocabularies, equal salience.
pub fn separable_graph() -> EmnGraph {
    let inputs = (0..5).map(|i| {
        let model: EntityModel = (0..6).map(|j| (sep_word(i, j), 1u32)).collect();
        (
            format!("E{i}"),
            EntityInput {
                name: format!("Entity {i}"),
                salience: TemporalSalience(100),
                model,
            },
        )
    });
    assemble(meta("Movie"), inputs).unwrap()
}

/// 25 gold tweets, five per entity, each carrying two or three of the gold
/// entity's words and one word of a neighbour.
pub fn separable_tweets() -> Vec<Tweet> {
    let mut out = Vec::new();
    for i in 0..5 {
        for t in 0..5 {
            let own = 2 + t % 2;
            let mut words: Vec<String> = (0..own).map(|j| sep_word(i, (t + j) % 6)).collect();
            words.push(sep_word((i + 1 + t) % 5, t % 6));
            if (i + 1 + t) % 5 == i {
                words.pop();
                words.push(sep_word((i + 1) % 5, 0));
            }
            out.push(
                Tweet::new(format!("s{i}{t}"), format!("so much {} today", words.join(" ")))
                    .with_gold(format!("E{i}"), GoldLabel::Implicit),
            );
        }
    }
    out
}

/// Tweets the separable linker should get wrong: one gold word against two
/// words of a single neighbour.
pub fn misleading_tweets() -> Vec<Tweet> {
    (0..5)
        .map(|i| {
            let o = (i + 2) % 5;
            Tweet::new(
                format!("m{i}"),
                format!("{} {} {}", sep_word(i, 5), sep_word(o, 4), sep_word(o, 3)),
            )
            .with_gold(format!("E{i}"), GoldLabel::Implicit)
        })
        .collect()
}

pub fn nil_tweets(n: usize) -> Vec<Tweet> {
    let texts = [
        "what a lovely morning for a walk",
        "lunch was cold again",
        "my phone battery is dead",
        "happy friday everyone",
    ];
    (0..n)
        .map(|i| {
            let mut t = Tweet::new(format!("n{i}"), texts[i % texts.len()]);
            t.gold_label = Some(GoldLabel::Nil);
            t
        })
        .collect()
}

pub fn empty_dictionary() -> PhraseDictionary {
    PhraseDictionary::new()
}

pub fn stopwords() -> Stopwords {
    Stopwords::english()
}

const FILMS: [&str; 6] = ["zephyr", "quasar", "nimbus", "corvid", "tundra", "ember"];
const ACTORS: [&str; 6] = ["alder", "birchwood", "cedarly", "dogwood", "elmsworth", "firthorn"];
const DIRECTORS: [&str; 6] = ["garnet", "helix", "iridia", "jasperton", "kelpford", "lumenhart"];

pub fn ctx_word(i: usize, j: usize) -> String {
    sep_word(i, j)
}

/// Six films, each with one actor and one director, as corpora for the
/// builder. With `keyword_in_pool` the pool tweets pair each title with the
/// type keyword (so contextual knowledge is collected); without it they
/// only mention the title (so entities are spotted but nothing is collected).
pub fn film_inputs(keyword_in_pool: bool) -> (BuildInputs, BuildOptions) {
    let mut labels = Vec::new();
    let mut triples = Vec::new();
    let mut pool = Vec::new();
    let mut views = Vec::new();
    for i in 0..6 {
        let f = format!("F{i}");
        labels.push(EntityRecord::new(&f, FILMS[i], "", "Film"));
        labels.push(EntityRecord::new(&format!("A{i}"), ACTORS[i], "", "Person"));
        labels.push(EntityRecord::new(&format!("D{i}"), DIRECTORS[i], "", "Person"));
        triples.push(Triple::entity(&f, "starring", &format!("A{i}")));
        triples.push(Triple::entity(&f, "director", &format!("D{i}")));
        triples.push(Triple::literal(&format!("A{i}"), "birthYear", "1970"));
        for t in 0..3 {
            let kw = if keyword_in_pool { " movie" } else { "" };
            pool.push(Tweet::new(
                format!("p{i}{t}"),
                format!("{}{kw} {} {} tonight", FILMS[i], ctx_word(i, t), ctx_word(i, t + 1)),
            ));
        }
        views.push(PageViewRecord {
            entity_id: f,
            date: date(2014, 7, 20),
            views: 10 * (i as u64 + 1),
        });
    }
    pool.push(Tweet::new("noise", "nothing to see here"));
    let inputs = BuildInputs {
        triples,
        labels,
        pool: TweetPool::new(pool),
        page_views: views,
        dictionary: PhraseDictionary::new(),
        stopwords: Stopwords::english(),
    };
    let mut opts = BuildOptions::new("Film", date(2014, 7, 31));
    opts.type_keywords = vec!["movie".into()];
    (inputs, opts)
}

/// Gold tweets for the film fixture. The first three per film use only
/// words from that film's contextual tweets plus a director of another
/// film; the last two use the film's own actor and director.
pub fn film_gold() -> Vec<Tweet> {
    let mut out = Vec::new();
    for i in 0..6 {
        let other = (i + 1) % 6;
        for t in 0..3 {
            out.push(
                Tweet::new(
                    format!("g{i}c{t}"),
                    format!("{} and {} with {}", ctx_word(i, t), ctx_word(i, t + 1), DIRECTORS[other]),
                )
                .with_gold(format!("F{i}"), GoldLabel::Implicit),
            );
        }
        let far = (i + 2) % 6;
        for t in 0..2 {
            let text = if t == 0 {
                format!("{} and {} again, also {}", ACTORS[i], DIRECTORS[i], ACTORS[far])
            } else {
                format!("{} was great, {} not so much", DIRECTORS[i], DIRECTORS[far])
            };
            out.push(Tweet::new(format!("g{i}f{t}"), text).with_gold(format!("F{i}"), GoldLabel::Implicit));
        }
    }
    out
}
