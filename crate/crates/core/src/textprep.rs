//! Tweet cleaning and clue extraction.
//!
//! Cleaning lowercases, drops URLs, emoticons and punctuation, rewrites every
//! number as the token `number` and splits camel-case hashtags and mentions.
//! Clue extraction then finds dictionary phrases (2 to 4 tokens, longest match
//! first, left to right, non-overlapping) and the remaining non-stopword
//! unigrams.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::corpus::PhraseDictionary;
use crate::error::{Error, Result};

/// Placeholder token for any digit run.
pub const NUMBER_TOKEN: &str = "number";

const MIN_PHRASE: usize = 2;
const MAX_PHRASE: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanText {
    pub tokens: Vec<String>,
}

impl CleanText {
    pub fn render(&self) -> String {
        self.tokens.join(" ")
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn from_text(text: &str) -> Self {
        text.lines().collect()
    }

    /// The English list shipped with the crate (`data/stopwords.txt`).
    pub fn english() -> Self {
        Self::from_text(include_str!("../data/stopwords.txt"))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.contains(token)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Stopwords(
            iter.into_iter()
                .map(|s| s.as_ref().trim().to_lowercase())
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }
}

/// Phrase and unigram multisets found in one text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClueSet {
    pub phrases: BTreeMap<String, u32>,
    pub unigrams: BTreeMap<String, u32>,
}

impl ClueSet {
    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty() && self.unigrams.is_empty()
    }

    /// Distinct clue names, phrases and unigrams merged, sorted.
    pub fn distinct(&self) -> BTreeSet<&str> {
        self.phrases
            .keys()
            .chain(self.unigrams.keys())
            .map(String::as_str)
            .collect()
    }

    /// Occurrence count of a clue name across both multisets.
    pub fn count(&self, clue: &str) -> u32 {
        self.phrases.get(clue).copied().unwrap_or(0) + self.unigrams.get(clue).copied().unwrap_or(0)
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: &ClueSet) {
        for (k, v) in &other.phrases {
            *self.phrases.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.unigrams {
            *self.unigrams.entry(k.clone()).or_default() += v;
        }
    }
}

/// How unigrams relate to matched phrases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClueMode {
    /// Only tokens outside matched phrases become unigrams.
    Tweet,
    /// Every non-stopword token becomes a unigram, including the words of
    /// matched phrases, so partial mentions still hit the model.
    EntityModel,
}

pub fn clean(text: &str) -> CleanText {
    let mut tokens = Vec::new();
    for raw in text.split_whitespace() {
        if is_url(raw) || is_ascii_emoticon(raw) {
            continue;
        }
        let raw = raw.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '#' && c != '@');
        match raw.chars().next() {
            Some('#') | Some('@') => {
                if let Ok(parts) = decompose_tag(raw) {
                    tokens.extend(parts);
                }
            }
            _ => tokenize_into(raw, &mut tokens),
        }
    }
    CleanText { tokens }
}

/// Splits a hashtag or mention body at lowercase-to-uppercase boundaries.
///
/// The leading `#`/`@` is removed; the pieces are then cleaned like ordinary
/// text, so `#Gravity2` yields `gravity`, `number`.
pub fn decompose_tag(tag: &str) -> Result<Vec<String>> {
    let body = tag
        .strip_prefix('#')
        .or_else(|| tag.strip_prefix('@'))
        .unwrap_or(tag);
    if body.is_empty() {
        return Err(Error::EmptyTag(tag.to_owned()));
    }
    let mut tokens = Vec::new();
    let mut start = 0;
    let mut prev: Option<char> = None;
    for (i, c) in body.char_indices() {
        if let Some(p) = prev {
            if p.is_lowercase() && c.is_uppercase() {
                tokenize_into(&body[start..i], &mut tokens);
                start = i;
            }
        }
        prev = Some(c);
    }
    tokenize_into(&body[start..], &mut tokens);
    Ok(tokens)
}

fn tokenize_into(segment: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = segment.chars().collect();
    let mut word = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_numeric() {
            flush(&mut word, out);
            i += 1;
            // digit run with embedded separators, e.g. 1,000 or 3.5
            while i < chars.len() {
                if chars[i].is_numeric() {
                    i += 1;
                } else if matches!(chars[i], ',' | '.' | ':')
                    && chars.get(i + 1).is_some_and(|n| n.is_numeric())
                {
                    i += 2;
                } else {
                    break;
                }
            }
            out.push(NUMBER_TOKEN.to_owned());
            continue;
        }
        if c.is_alphabetic() {
            word.extend(c.to_lowercase().filter(|l| l.is_alphabetic()));
        } else {
            flush(&mut word, out);
        }
        i += 1;
    }
    flush(&mut word, out);
}

fn flush(word: &mut String, out: &mut Vec<String>) {
    if !word.is_empty() {
        out.push(std::mem::take(word));
    }
}

fn is_url(raw: &str) -> bool {
    let lower = raw.to_ascii_lowercase();
    ["http://", "https://", "www.", "pic.twitter.com/"]
        .iter()
        .any(|p| lower.starts_with(p))
}

fn is_ascii_emoticon(raw: &str) -> bool {
    let mut chars = raw.chars();
    let Some(eyes) = chars.next() else {
        return false;
    };
    if !matches!(eyes, ':' | ';' | '=' | '8') {
        return false;
    }
    let rest: Vec<char> = chars.collect();
    let mouth = match rest.as_slice() {
        [m] => *m,
        ['-' | '\'' | 'o', m] => *m,
        _ => return false,
    };
    matches!(
        mouth,
        ')' | '(' | 'D' | 'P' | 'p' | 'O' | 'o' | '3' | '/' | '\\' | '|' | ']' | '[' | '*'
    )
}

/// Finds phrases and unigrams in cleaned text.
pub fn extract_clues(
    clean: &CleanText,
    dict: &PhraseDictionary,
    stopwords: &Stopwords,
    mode: ClueMode,
) -> ClueSet {
    let tokens = &clean.tokens;
    let mut clues = ClueSet::default();
    let mut covered = vec![false; tokens.len()];
    let mut i = 0;
    while i < tokens.len() {
        let matched = (MIN_PHRASE..=MAX_PHRASE)
            .rev()
            .find(|&n| i + n <= tokens.len() && dict.contains_tokens(&tokens[i..i + n]));
        match matched {
            Some(n) => {
                *clues.phrases.entry(tokens[i..i + n].join(" ")).or_default() += 1;
                covered[i..i + n].iter_mut().for_each(|c| *c = true);
                i += n;
            }
            None => i += 1,
        }
    }
    for (tok, &inside) in tokens.iter().zip(&covered) {
        if inside && mode == ClueMode::Tweet {
            continue;
        }
        if !stopwords.contains(tok) {
            *clues.unigrams.entry(tok.clone()).or_default() += 1;
        }
    }
    clues
}
