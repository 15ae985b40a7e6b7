//! End-to-end EMN construction from loaded corpora.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::corpus::{self, EntityRecord, PageViewRecord, PhraseDictionary, Triple};
use crate::emn::{assemble, EmnGraph, EntityInput, GraphMeta};
use crate::error::{Error, Result};
use crate::knowledge::{
    collect_contextual, extract_factual, rank_relationships, salience_table, spot_entities, top_relations,
    ContextualKnowledge, RelationScore, TweetPool,
};
use crate::textprep::Stopwords;

/// Everything the builder reads.
#[derive(Debug, Clone)]
pub struct BuildInputs {
    pub triples: Vec<Triple>,
    pub labels: Vec<EntityRecord>,
    /// Candidate contextual tweets; also the corpus entities are spotted in.
    pub pool: TweetPool,
    pub page_views: Vec<PageViewRecord>,
    pub dictionary: PhraseDictionary,
    pub stopwords: Stopwords,
}

/// Paths for [`BuildInputs::load`]. A missing stopword path selects the
/// bundled English list.
#[derive(Debug, Clone, Copy)]
pub struct InputPaths<'a> {
    pub triples: &'a Path,
    pub labels: &'a Path,
    pub tweets: &'a Path,
    pub page_views: &'a Path,
    pub phrases: &'a Path,
    pub stopwords: Option<&'a Path>,
}

impl BuildInputs {
    pub fn load(paths: InputPaths<'_>) -> Result<BuildInputs> {
        Ok(BuildInputs {
            triples: corpus::load_triples(paths.triples)?,
            labels: corpus::load_labels(paths.labels)?,
            pool: TweetPool::new(corpus::load_tweets(paths.tweets)?),
            page_views: corpus::load_page_views(paths.page_views)?,
            dictionary: corpus::load_phrase_dictionary(paths.phrases)?,
            stopwords: match paths.stopwords {
                Some(p) => corpus::load_stopwords(p)?,
                None => Stopwords::english(),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOptions {
    pub entity_type: String,
    pub type_keywords: Vec<String>,
    pub m_relations: usize,
    pub context_cap: usize,
    pub salience_window_days: u32,
    pub as_of: NaiveDate,
    /// Drop contextual tweets entirely (factual-only models).
    pub include_contextual: bool,
}

impl BuildOptions {
    pub fn new(entity_type: &str, as_of: NaiveDate) -> Self {
        BuildOptions {
            entity_type: entity_type.to_owned(),
            type_keywords: Vec::new(),
            m_relations: 15,
            context_cap: 1000,
            salience_window_days: 30,
            as_of,
            include_contextual: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub graph: EmnGraph,
    pub relations: Vec<RelationScore>,
    /// Spotted entities that produced no clues.
    pub skipped: Vec<String>,
}

/// Ranks the type's relations, spots its entities in the tweet pool, builds
/// each spotted entity's model and assembles the network.
pub fn build_emn(inputs: &BuildInputs, opts: &BuildOptions) -> Result<BuildOutcome> {
    let members: Vec<&EntityRecord> = inputs
        .labels
        .iter()
        .filter(|r| r.entity_type.eq_ignore_ascii_case(&opts.entity_type))
        .collect();
    if members.is_empty() {
        return Err(Error::Config(format!("no entities of type `{}`", opts.entity_type)));
    }
    let member_ids: HashSet<String> = members.iter().map(|r| r.entity_id.clone()).collect();
    let relations = rank_relationships(&inputs.triples, &member_ids)?;
    let top = top_relations(&relations, opts.m_relations);
    let top_set: HashSet<&str> = top.iter().map(String::as_str).collect();

    let member_records: Vec<EntityRecord> = members.iter().map(|r| (*r).clone()).collect();
    let spotted = spot_entities(&inputs.pool, &member_records);

    // triples of spotted entities restricted to the top relations
    let mut by_entity: HashMap<&str, Vec<Triple>> = HashMap::new();
    for t in inputs.triples.iter().filter(|t| top_set.contains(t.predicate.as_str())) {
        if spotted.contains(&t.subject) {
            by_entity.entry(&t.subject).or_default().push(t.clone());
        }
        if let Some(o) = t.object_entity() {
            if o != t.subject && spotted.contains(o) {
                by_entity.entry(o).or_default().push(t.clone());
            }
        }
    }

    let records = corpus::index_records(&inputs.labels);
    let ids: Vec<&String> = spotted.iter().collect();
    let built: Vec<(String, Result<EntityInput>)> = ids
        .par_iter()
        .map(|&id| {
            let record = records[id.as_str()];
            let result = (|| {
                let triples = by_entity.get(id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
                let factual = extract_factual(id, &records, triples, &top)?;
                let contextual = if opts.include_contextual {
                    collect_contextual(record, &inputs.pool, &opts.type_keywords, opts.context_cap)
                } else {
                    ContextualKnowledge::default()
                };
                let model =
                    crate::emn::build_entity_model(id, &factual, &contextual, &inputs.dictionary, &inputs.stopwords)?;
                Ok(EntityInput {
                    name: record.label.clone(),
                    salience: Default::default(),
                    model,
                })
            })();
            (id.clone(), result)
        })
        .collect();

    let spotted_ids: BTreeSet<String> = spotted.iter().cloned().collect();
    let salience = salience_table(&spotted_ids, &inputs.page_views, opts.as_of, opts.salience_window_days);

    let mut skipped = Vec::new();
    let mut entities: BTreeMap<String, EntityInput> = BTreeMap::new();
    for (id, result) in built {
        match result {
            Ok(mut input) => {
                input.salience = salience[&id];
                entities.insert(id, input);
            }
            Err(Error::EmptyModel(_)) => {
                log::warn!("entity `{id}` has no clues; left out of the network");
                skipped.push(id);
            }
            Err(e) => return Err(e),
        }
    }
    if entities.is_empty() {
        return Err(Error::EmptySet("no spotted entity produced a model"));
    }
    let graph = assemble(
        GraphMeta {
            entity_type: opts.entity_type.clone(),
            built_at: opts.as_of,
        },
        entities,
    )?;
    Ok(BuildOutcome {
        graph,
        relations,
        skipped,
    })
}
