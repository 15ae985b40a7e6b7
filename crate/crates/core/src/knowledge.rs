//! Knowledge acquisition for entity models.
//!
//! Three sources feed each entity: factual texts from knowledge-base triples
//! restricted to the type's most characteristic relations, recent tweets that
//! mention the entity together with a type keyword, and the page-view sum over
//! a trailing window.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{Duration, NaiveDate};

use crate::corpus::{EntityRecord, PageViewRecord, Triple, Tweet};
use crate::error::{Error, Result};
use crate::textprep::{clean, CleanText};

/// How strongly a relation is associated with an entity type: the share of
/// the relation's triples that touch an instance of the type.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationScore {
    pub predicate: String,
    pub score: f64,
    /// Triples of this predicate with a type member as subject or object.
    pub matched: u64,
    /// All triples of this predicate.
    pub total: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactualKnowledge {
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextualKnowledge {
    pub tweets: Vec<Tweet>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalSalience(pub u64);

/// Scores every predicate against the instances of one type, best first.
///
/// Ties are ordered by predicate id.
pub fn rank_relationships(
    triples: &[Triple],
    type_members: &HashSet<String>,
) -> Result<Vec<RelationScore>> {
    if triples.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut counts: HashMap<&str, (u64, u64)> = HashMap::new();
    for t in triples {
        let touches = type_members.contains(&t.subject)
            || t.object_entity().is_some_and(|o| type_members.contains(o));
        let entry = counts.entry(t.predicate.as_str()).or_default();
        entry.1 += 1;
        if touches {
            entry.0 += 1;
        }
    }
    let mut scores: Vec<RelationScore> = counts
        .into_iter()
        .map(|(p, (matched, total))| RelationScore {
            predicate: p.to_owned(),
            score: matched as f64 / total as f64,
            matched,
            total,
        })
        .collect();
    scores.sort_by(|a, b| {
        // compare the exact ratios a.m/a.t vs b.m/b.t by cross-multiplying
        let lhs = a.matched as u128 * b.total as u128;
        let rhs = b.matched as u128 * a.total as u128;
        rhs.cmp(&lhs).then_with(|| a.predicate.cmp(&b.predicate))
    });
    Ok(scores)
}

/// The predicate ids of the first `m` ranked relations.
pub fn top_relations(ranked: &[RelationScore], m: usize) -> Vec<String> {
    ranked.iter().take(m).map(|r| r.predicate.clone()).collect()
}

/// Collects the labels of entities linked to `entity_id` through any of
/// `top_relations`, literal values of those relations, and the entity's own
/// comment.
///
/// Neighbours without a record in `records` contribute nothing.
pub fn extract_factual(
    entity_id: &str,
    records: &HashMap<&str, &EntityRecord>,
    triples: &[Triple],
    top_relations: &[String],
) -> Result<FactualKnowledge> {
    let entity = records
        .get(entity_id)
        .ok_or_else(|| Error::UnknownEntity(entity_id.to_owned()))?;
    let top: HashSet<&str> = top_relations.iter().map(String::as_str).collect();
    let mut texts = Vec::new();
    for t in triples.iter().filter(|t| top.contains(t.predicate.as_str())) {
        if t.subject == entity_id {
            if t.object_is_literal {
                texts.push(t.object.clone());
            } else if let Some(r) = records.get(t.object.as_str()) {
                texts.push(r.label.clone());
            }
        } else if t.object_entity() == Some(entity_id) {
            if let Some(r) = records.get(t.subject.as_str()) {
                texts.push(r.label.clone());
            }
        }
    }
    if !entity.comment.trim().is_empty() {
        texts.push(entity.comment.clone());
    }
    Ok(FactualKnowledge { texts })
}

/// Tweets ordered most recent first (untimestamped tweets last, in file
/// order), with their cleaned text cached for keyword matching.
#[derive(Debug, Clone, Default)]
pub struct TweetPool {
    tweets: Vec<Tweet>,
    cleaned: Vec<CleanText>,
    padded: Vec<String>,
}

impl TweetPool {
    pub fn new(mut tweets: Vec<Tweet>) -> Self {
        tweets.sort_by(|a, b| match (a.timestamp, b.timestamp) {
            (Some(x), Some(y)) => y.cmp(&x),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        let cleaned: Vec<CleanText> = tweets.iter().map(|t| clean(&t.text)).collect();
        let padded = cleaned.iter().map(|c| pad(&c.render())).collect();
        TweetPool {
            tweets,
            cleaned,
            padded,
        }
    }

    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    pub fn cleaned(&self) -> &[CleanText] {
        &self.cleaned
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }
}

fn pad(s: &str) -> String {
    format!(" {s} ")
}

/// Cleans a label or keyword and pads it for whole-token containment checks.
fn padded_key(text: &str) -> Option<String> {
    let c = clean(text);
    (!c.is_empty()).then(|| pad(&c.render()))
}

/// The `cap` most recent pool tweets containing the entity label together
/// with at least one type keyword, both as whole-token runs.
///
/// An empty keyword list matches on the label alone.
pub fn collect_contextual(
    entity: &EntityRecord,
    pool: &TweetPool,
    type_keywords: &[String],
    cap: usize,
) -> ContextualKnowledge {
    let Some(label) = padded_key(&entity.label) else {
        return ContextualKnowledge::default();
    };
    let keywords: Vec<String> = type_keywords.iter().filter_map(|k| padded_key(k)).collect();
    let tweets = pool
        .tweets
        .iter()
        .zip(&pool.padded)
        .filter(|(_, text)| {
            text.contains(&label)
                && (keywords.is_empty() || keywords.iter().any(|k| text.contains(k.as_str())))
        })
        .take(cap)
        .map(|(t, _)| t.clone())
        .collect();
    ContextualKnowledge { tweets }
}

/// Page views for `entity_id` summed over the `window_days` days ending on
/// `as_of` (inclusive). A zero-day window is empty.
pub fn temporal_salience(
    entity_id: &str,
    views: &[PageViewRecord],
    as_of: NaiveDate,
    window_days: u32,
) -> TemporalSalience {
    if window_days == 0 {
        return TemporalSalience(0);
    }
    let start = as_of - Duration::days(i64::from(window_days) - 1);
    TemporalSalience(
        views
            .iter()
            .filter(|v| v.entity_id == entity_id && v.date >= start && v.date <= as_of)
            .map(|v| v.views)
            .sum(),
    )
}

/// Saliences for many entities in one pass over the page-view records.
pub fn salience_table(
    entity_ids: &BTreeSet<String>,
    views: &[PageViewRecord],
    as_of: NaiveDate,
    window_days: u32,
) -> BTreeMap<String, TemporalSalience> {
    let mut table: BTreeMap<String, TemporalSalience> = entity_ids
        .iter()
        .map(|e| (e.clone(), TemporalSalience(0)))
        .collect();
    if window_days == 0 {
        return table;
    }
    let start = as_of - Duration::days(i64::from(window_days) - 1);
    for v in views {
        if v.date >= start && v.date <= as_of {
            if let Some(s) = table.get_mut(&v.entity_id) {
                s.0 += v.views;
            }
        }
    }
    table
}

/// Entities whose cleaned label occurs as a whole-token run in at least one
/// pool tweet.
pub fn spot_entities(pool: &TweetPool, labels: &[EntityRecord]) -> BTreeSet<String> {
    let mut by_label: HashMap<Vec<String>, Vec<&str>> = HashMap::new();
    for r in labels {
        let c = clean(&r.label);
        if !c.is_empty() {
            by_label.entry(c.tokens).or_default().push(&r.entity_id);
        }
    }
    let longest = by_label.keys().map(Vec::len).max().unwrap_or(0);
    let mut found = BTreeSet::new();
    for text in &pool.cleaned {
        let toks = &text.tokens;
        for start in 0..toks.len() {
            for n in 1..=longest.min(toks.len() - start) {
                if let Some(ids) = by_label.get(&toks[start..start + n]) {
                    found.extend(ids.iter().map(|s| s.to_string()));
                }
            }
        }
    }
    found
}
