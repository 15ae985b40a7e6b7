//! Two-step implicit entity linking over an [`EmnGraph`].
//!
//! Candidate selection sums `specificity × frequency` over the tweet's clues
//! for every entity the clues touch and keeps the best `k`. Disambiguation
//! then orders those candidates with a linear pairwise ranker over two
//! features: cosine similarity between entity and tweet vectors, and the
//! entity's share of the candidates' total temporal salience.

mod ranking;

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::corpus::PhraseDictionary;
use crate::emn::{EmnGraph, SparseVector};
use crate::error::{Error, Result};
use crate::textprep::{clean, extract_clues, ClueMode, ClueSet, Stopwords};

pub use ranking::{train, TrainOptions, TrainReport, TrainedRanker, TrainingQuery};

pub const DEFAULT_K: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkRequest {
    pub entity_type: String,
    pub text: String,
}

impl LinkRequest {
    pub fn new(entity_type: impl Into<String>, text: impl Into<String>) -> Self {
        LinkRequest {
            entity_type: entity_type.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchedClue {
    pub clue: String,
    pub specificity: f64,
    pub frequency: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateScore {
    pub entity_id: String,
    /// Node index in the graph the candidate came from.
    pub entity: usize,
    pub evidence: f64,
    pub matched_clues: Vec<MatchedClue>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub cosine: f64,
    pub rel_salience: f64,
}

impl FeatureVector {
    pub const DIM: usize = 2;

    pub fn to_array(self) -> [f64; Self::DIM] {
        [self.cosine, self.rel_salience]
    }
}

/// How tweet clues are weighted in the tweet vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TweetWeighting {
    /// 1 for every distinct clue.
    #[default]
    Binary,
    /// The clue's occurrence count in the tweet.
    TermFrequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntity {
    pub entity_id: String,
    pub score: f64,
    pub features: FeatureVector,
}

fn by_evidence(graph: &EmnGraph) -> impl Fn(&CandidateScore, &CandidateScore) -> Ordering + '_ {
    move |a, b| {
        b.evidence
            .total_cmp(&a.evidence)
            .then_with(|| graph.entity(b.entity).salience.cmp(&graph.entity(a.entity).salience))
            .then_with(|| a.entity_id.cmp(&b.entity_id))
    }
}

/// Scores every entity adjacent to a tweet clue and keeps the top `k`.
///
/// Order is evidence descending, then salience descending, then entity id.
pub fn select_candidates(graph: &EmnGraph, clues: &ClueSet, k: usize) -> Result<Vec<CandidateScore>> {
    let mut scored: HashMap<usize, CandidateScore> = HashMap::new();
    // distinct() iterates in name order, which fixes the summation order
    for name in clues.distinct() {
        let Some(c) = graph.clue_index(name) else {
            continue;
        };
        let node = graph.clue(c);
        for &(e, freq) in graph.clue_edges(c) {
            let cand = scored.entry(e).or_insert_with(|| CandidateScore {
                entity_id: graph.entity(e).entity_id.clone(),
                entity: e,
                evidence: 0.0,
                matched_clues: Vec::new(),
            });
            cand.evidence += node.specificity * f64::from(freq);
            cand.matched_clues.push(MatchedClue {
                clue: node.name.clone(),
                specificity: node.specificity,
                frequency: freq,
            });
        }
    }
    if scored.is_empty() {
        return Err(Error::NoCandidate);
    }
    let mut out: Vec<CandidateScore> = scored.into_values().collect();
    out.sort_by(by_evidence(graph));
    out.truncate(k.max(1));
    Ok(out)
}

/// The tweet's clues that exist as clue nodes, as a vector over clue indices.
pub fn tweet_vector(graph: &EmnGraph, clues: &ClueSet, weighting: TweetWeighting) -> SparseVector {
    let mut entries: Vec<(usize, f64)> = clues
        .distinct()
        .into_iter()
        .filter_map(|name| {
            let c = graph.clue_index(name)?;
            let w = match weighting {
                TweetWeighting::Binary => 1.0,
                TweetWeighting::TermFrequency => f64::from(clues.count(name)),
            };
            Some((c, w))
        })
        .collect();
    entries.sort_unstable_by_key(|(c, _)| *c);
    SparseVector { entries }
}

/// Features for each candidate, in candidate order.
///
/// Relative salience is each candidate's share of the set's total salience,
/// or a uniform share when every candidate has zero salience.
pub fn featurize(
    graph: &EmnGraph,
    candidates: &[CandidateScore],
    clues: &ClueSet,
    weighting: TweetWeighting,
) -> Vec<(String, FeatureVector)> {
    let tweet = tweet_vector(graph, clues, weighting);
    let total: u64 = candidates.iter().map(|c| graph.entity(c.entity).salience.0).sum();
    let uniform = 1.0 / candidates.len() as f64;
    candidates
        .iter()
        .map(|c| {
            let rel_salience = if total == 0 {
                uniform
            } else {
                graph.entity(c.entity).salience.0 as f64 / total as f64
            };
            let cosine = graph.entity_vector_at(c.entity).cosine(&tweet);
            (c.entity_id.clone(), FeatureVector { cosine, rel_salience })
        })
        .collect()
}

/// Orders candidates by ranker score, then relative salience, then id.
pub fn rank(ranker: &TrainedRanker, features: &[(String, FeatureVector)]) -> Vec<RankedEntity> {
    let mut out: Vec<RankedEntity> = features
        .iter()
        .map(|(id, f)| RankedEntity {
            entity_id: id.clone(),
            score: ranker.score(f),
            features: *f,
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.features.rel_salience.total_cmp(&a.features.rel_salience))
            .then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkOptions {
    pub k: usize,
    pub weighting: TweetWeighting,
}

impl Default for LinkOptions {
    fn default() -> Self {
        LinkOptions {
            k: DEFAULT_K,
            weighting: TweetWeighting::Binary,
        }
    }
}

/// Read-only linking context: a graph plus the text resources used to turn
/// a tweet into clues.
#[derive(Debug, Clone, Copy)]
pub struct Linker<'a> {
    pub graph: &'a EmnGraph,
    pub dictionary: &'a PhraseDictionary,
    pub stopwords: &'a Stopwords,
    pub options: LinkOptions,
}

impl<'a> Linker<'a> {
    pub fn new(graph: &'a EmnGraph, dictionary: &'a PhraseDictionary, stopwords: &'a Stopwords) -> Self {
        Linker {
            graph,
            dictionary,
            stopwords,
            options: LinkOptions::default(),
        }
    }

    pub fn with_options(mut self, options: LinkOptions) -> Self {
        self.options = options;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.options.k = k;
        self
    }

    pub fn tweet_clues(&self, text: &str) -> ClueSet {
        extract_clues(&clean(text), self.dictionary, self.stopwords, ClueMode::Tweet)
    }

    pub fn candidates(&self, text: &str) -> Result<Vec<CandidateScore>> {
        select_candidates(self.graph, &self.tweet_clues(text), self.options.k)
    }

    /// Candidate selection followed by featurization.
    pub fn candidate_features(&self, text: &str) -> Result<Vec<(String, FeatureVector)>> {
        let clues = self.tweet_clues(text);
        let candidates = select_candidates(self.graph, &clues, self.options.k)?;
        Ok(featurize(self.graph, &candidates, &clues, self.options.weighting))
    }

    /// The full ranked candidate list for one tweet.
    pub fn link(&self, ranker: &TrainedRanker, request: &LinkRequest) -> Result<Vec<RankedEntity>> {
        if !request.entity_type.eq_ignore_ascii_case(self.graph.entity_type()) {
            return Err(Error::TypeMismatch {
                graph: self.graph.entity_type().to_owned(),
                request: request.entity_type.clone(),
            });
        }
        Ok(rank(ranker, &self.candidate_features(&request.text)?))
    }
}
