//! Loaders for the on-disk inputs: tweets (JSONL), triples, entity labels,
//! page views (TSV), the phrase dictionary and the stopword list.
//!
//! Every loader has a matching writer so a loaded collection can be written
//! back in the same format. Blank lines are ignored everywhere.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textprep::{self, Stopwords};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldLabel {
    Explicit,
    Implicit,
    Nil,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_entity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_label: Option<GoldLabel>,
}

impl Tweet {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Tweet {
            id: id.into(),
            text: text.into(),
            timestamp: None,
            gold_entity: None,
            gold_label: None,
        }
    }

    pub fn with_gold(mut self, entity: impl Into<String>, label: GoldLabel) -> Self {
        self.gold_entity = Some(entity.into());
        self.gold_label = Some(label);
        self
    }

    pub fn with_timestamp(mut self, ts: DateTime<Utc>) -> Self {
        self.timestamp = Some(ts);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: String,
    pub object_is_literal: bool,
}

impl Triple {
    pub fn entity(subject: &str, predicate: &str, object: &str) -> Self {
        Triple {
            subject: subject.to_owned(),
            predicate: predicate.to_owned(),
            object: object.to_owned(),
            object_is_literal: false,
        }
    }

    pub fn literal(subject: &str, predicate: &str, value: &str) -> Self {
        Triple {
            object_is_literal: true,
            ..Triple::entity(subject, predicate, value)
        }
    }

    /// The entity-valued object, if the object is not a literal.
    pub fn object_entity(&self) -> Option<&str> {
        (!self.object_is_literal).then_some(self.object.as_str())
    }
}

/// Label, description and type of one knowledge-base entity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityRecord {
    pub entity_id: String,
    pub label: String,
    pub comment: String,
    pub entity_type: String,
}

impl EntityRecord {
    pub fn new(id: &str, label: &str, comment: &str, entity_type: &str) -> Self {
        EntityRecord {
            entity_id: id.to_owned(),
            label: label.to_owned(),
            comment: comment.to_owned(),
            entity_type: entity_type.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageViewRecord {
    pub entity_id: String,
    pub date: NaiveDate,
    pub views: u64,
}

/// Known phrases (anchor texts and page titles).
///
/// Entries are normalized with the tweet cleaner, so membership ignores case,
/// internal whitespace and punctuation, and numbers compare as `number`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseDictionary {
    phrases: HashSet<String>,
    max_len: usize,
}

impl PhraseDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, phrase: &str) -> bool {
        let key = normalize_phrase(phrase);
        if key.is_empty() {
            return false;
        }
        self.max_len = self.max_len.max(key.split(' ').count());
        self.phrases.insert(key)
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.phrases.contains(&normalize_phrase(phrase))
    }

    /// Membership of an already-cleaned token sequence.
    pub fn contains_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> bool {
        if tokens.is_empty() || tokens.len() > self.max_len {
            return false;
        }
        let mut key = String::new();
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                key.push(' ');
            }
            key.push_str(t.as_ref());
        }
        self.phrases.contains(&key)
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    /// Phrases in lexicographic order.
    pub fn sorted(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.phrases.iter().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

impl<S: AsRef<str>> FromIterator<S> for PhraseDictionary {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut dict = PhraseDictionary::new();
        for p in iter {
            dict.insert(p.as_ref());
        }
        dict
    }
}

fn normalize_phrase(phrase: &str) -> String {
    textprep::clean(phrase).tokens.join(" ")
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based line numbers.
fn lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
}

fn columns<'a>(path: &Path, line_no: usize, line: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
    if cols.len() != n {
        return Err(Error::format(
            path,
            line_no,
            format!("expected {n} tab-separated columns, found {}", cols.len()),
        ));
    }
    Ok(cols)
}

pub fn load_tweets(path: &Path) -> Result<Vec<Tweet>> {
    parse_tweets(path, &read(path)?)
}

pub fn parse_tweets(path: &Path, content: &str) -> Result<Vec<Tweet>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line_no, line) in lines(content) {
        let tweet: Tweet = serde_json::from_str(line)
            .map_err(|e| Error::format(path, line_no, e.to_string()))?;
        if tweet.id.is_empty() {
            return Err(Error::format(path, line_no, "empty tweet id"));
        }
        if tweet.text.is_empty() {
            return Err(Error::format(path, line_no, "empty tweet text"));
        }
        if !seen.insert(tweet.id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_owned(),
                line: line_no,
                id: tweet.id,
            });
        }
        out.push(tweet);
    }
    Ok(out)
}

pub fn write_tweets(tweets: &[Tweet]) -> String {
    let mut out = String::new();
    for t in tweets {
        out.push_str(&serde_json::to_string(t).expect("tweet serializes"));
        out.push('\n');
    }
    out
}

pub fn load_triples(path: &Path) -> Result<Vec<Triple>> {
    parse_triples(path, &read(path)?)
}

pub fn parse_triples(path: &Path, content: &str) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (line_no, line) in lines(content) {
        let cols = columns(path, line_no, line, 4)?;
        if cols[..3].iter().any(|c| c.is_empty()) {
            return Err(Error::format(path, line_no, "empty triple component"));
        }
        let object_is_literal = match cols[3] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::format(
                    path,
                    line_no,
                    format!("literal flag must be 0 or 1, got `{other}`"),
                ))
            }
        };
        out.push(Triple {
            subject: cols[0].to_owned(),
            predicate: cols[1].to_owned(),
            object: cols[2].to_owned(),
            object_is_literal,
        });
    }
    Ok(out)
}

pub fn write_triples(triples: &[Triple]) -> String {
    let mut out = String::new();
    for t in triples {
        let flag = if t.object_is_literal { 1 } else { 0 };
        let _ = writeln!(out, "{}\t{}\t{}\t{flag}", t.subject, t.predicate, t.object);
    }
    out
}

pub fn load_labels(path: &Path) -> Result<Vec<EntityRecord>> {
    parse_labels(path, &read(path)?)
}

pub fn parse_labels(path: &Path, content: &str) -> Result<Vec<EntityRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line_no, line) in lines(content) {
        let cols = columns(path, line_no, line, 4)?;
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(Error::format(path, line_no, "entity id and label are required"));
        }
        if !seen.insert(cols[0]) {
            return Err(Error::DuplicateId {
                path: path.to_owned(),
                line: line_no,
                id: cols[0].to_owned(),
            });
        }
        out.push(EntityRecord::new(cols[0], cols[1], cols[2], cols[3]));
    }
    Ok(out)
}

pub fn write_labels(records: &[EntityRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.entity_id, r.label, r.comment, r.entity_type
        );
    }
    out
}

pub fn load_page_views(path: &Path) -> Result<Vec<PageViewRecord>> {
    parse_page_views(path, &read(path)?)
}

pub fn parse_page_views(path: &Path, content: &str) -> Result<Vec<PageViewRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line_no, line) in lines(content) {
        let cols = columns(path, line_no, line, 3)?;
        if cols[0].is_empty() {
            return Err(Error::format(path, line_no, "empty entity id"));
        }
        let date = NaiveDate::parse_from_str(cols[1], "%Y-%m-%d")
            .map_err(|e| Error::format(path, line_no, format!("bad date `{}`: {e}", cols[1])))?;
        let value: i64 = cols[2]
            .parse()
            .map_err(|_| Error::format(path, line_no, format!("bad view count `{}`", cols[2])))?;
        if value < 0 {
            return Err(Error::NegativeCount {
                path: path.to_owned(),
                line: line_no,
                value,
            });
        }
        if !seen.insert((cols[0], date)) {
            return Err(Error::DuplicateId {
                path: path.to_owned(),
                line: line_no,
                id: format!("{}@{date}", cols[0]),
            });
        }
        out.push(PageViewRecord {
            entity_id: cols[0].to_owned(),
            date,
            views: value as u64,
        });
    }
    Ok(out)
}

pub fn write_page_views(records: &[PageViewRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}\t{}", r.entity_id, r.date.format("%Y-%m-%d"), r.views);
    }
    out
}

pub fn load_phrase_dictionary(path: &Path) -> Result<PhraseDictionary> {
    Ok(read(path)?.lines().collect())
}

pub fn write_phrase_dictionary(dict: &PhraseDictionary) -> String {
    let mut out = String::new();
    for p in dict.sorted() {
        out.push_str(p);
        out.push('\n');
    }
    out
}

pub fn load_stopwords(path: &Path) -> Result<Stopwords> {
    Ok(Stopwords::from_text(&read(path)?))
}

/// Entity records keyed by id.
pub fn index_records(records: &[EntityRecord]) -> HashMap<&str, &EntityRecord> {
    records.iter().map(|r| (r.entity_id.as_str(), r)).collect()
}
