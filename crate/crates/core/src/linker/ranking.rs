//! Linear pairwise ranking.
//!
//! For every training query the gold candidate is paired with each other
//! candidate, giving a difference vector `d = f_gold - f_other`. The weights
//! minimize
//!
//! ```text
//! 0.5 * |w|^2 + C * sum over pairs of max(0, 1 - w . d)
//! ```
//!
//! Each epoch makes one pass of per-pair subgradient steps in a seeded
//! shuffled order, with step size `learning_rate / sqrt(epoch)`. The pass is
//! accepted only if it does not raise the full objective; otherwise the move
//! is halved until it does, so the recorded objective never increases.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{rank, FeatureVector};
use crate::error::{Error, Result};

const MODEL_HEADER: &str = "# emn-linker pairwise ranker";
const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedRanker {
    pub weights: Vec<f64>,
    /// Hex digest of the training data; empty for hand-built rankers.
    pub trained_on: String,
}

impl TrainedRanker {
    pub fn new(weights: Vec<f64>) -> Self {
        TrainedRanker {
            weights,
            trained_on: String::new(),
        }
    }

    pub fn score(&self, f: &FeatureVector) -> f64 {
        dot(&self.weights, &f.to_array())
    }

    /// Header line followed by one weight per line.
    pub fn to_model_file(&self) -> String {
        let mut out = String::new();
        let fp = if self.trained_on.is_empty() { "-" } else { &self.trained_on };
        let _ = writeln!(out, "{MODEL_HEADER}\tdim={}\ttrained_on={fp}", self.weights.len());
        for w in &self.weights {
            let _ = writeln!(out, "{w}");
        }
        out
    }

    pub fn from_model_file(text: &str) -> Result<TrainedRanker> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let mut fields = header.split('\t');
        if fields.next() != Some(MODEL_HEADER) {
            return Err(Error::Config("not a ranker model file".into()));
        }
        let mut trained_on = String::new();
        for f in fields {
            if let Some(v) = f.strip_prefix("trained_on=") {
                if v != "-" {
                    trained_on = v.to_owned();
                }
            }
        }
        let weights = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite())
                    .ok_or_else(|| Error::Config(format!("bad weight `{l}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if weights.len() != FeatureVector::DIM {
            return Err(Error::Config(format!(
                "expected {} weights, found {}",
                FeatureVector::DIM,
                weights.len()
            )));
        }
        Ok(TrainedRanker { weights, trained_on })
    }
}

/// One tweet's candidates with their features and the gold entity.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingQuery {
    pub query_id: String,
    pub candidates: Vec<(String, FeatureVector)>,
    pub gold: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub c_tradeoff: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            c_tradeoff: 0.01,
            epochs: 200,
            learning_rate: 0.1,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub ranker: TrainedRanker,
    /// Queries whose gold entity was not among their candidates.
    pub skipped_queries: usize,
    pub pairs: usize,
    /// Training pairs the final ranker orders wrongly.
    pub swapped_pairs: usize,
    /// Objective after initialization and after each epoch.
    pub objective: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn objective(w: &[f64], diffs: &[[f64; FeatureVector::DIM]], c: f64) -> f64 {
    let reg = 0.5 * dot(w, w);
    let hinge: f64 = diffs.iter().map(|d| (1.0 - dot(w, d)).max(0.0)).sum();
    reg + c * hinge
}

fn fingerprint(queries: &[TrainingQuery], c: f64) -> String {
    let mut h = Sha256::new();
    h.update(c.to_bits().to_le_bytes());
    for q in queries {
        h.update(q.query_id.as_bytes());
        h.update([0]);
        h.update(q.gold.as_bytes());
        h.update([0]);
        for (id, f) in &q.candidates {
            h.update(id.as_bytes());
            h.update([0]);
            for v in f.to_array() {
                h.update(v.to_bits().to_le_bytes());
            }
        }
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Fits the pairwise ranker. Queries whose gold entity is missing from their
/// candidate list are skipped and counted.
pub fn train(queries: &[TrainingQuery], opts: &TrainOptions) -> Result<TrainReport> {
    if !(opts.c_tradeoff.is_finite() && opts.c_tradeoff > 0.0) {
        return Err(Error::Config(format!("trade-off must be positive, got {}", opts.c_tradeoff)));
    }
    let mut diffs: Vec<[f64; FeatureVector::DIM]> = Vec::new();
    let mut skipped = 0;
    for q in queries {
        let Some((_, gold)) = q.candidates.iter().find(|(id, _)| *id == q.gold) else {
            skipped += 1;
            continue;
        };
        let g = gold.to_array();
        for (id, f) in &q.candidates {
            if *id != q.gold {
                let o = f.to_array();
                diffs.push(std::array::from_fn(|i| g[i] - o[i]));
            }
        }
    }
    if diffs.is_empty() {
        return Err(Error::InsufficientData { fold: None, skipped });
    }

    let c = opts.c_tradeoff;
    let n = diffs.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    let mut w = vec![0.0; FeatureVector::DIM];
    let mut current = objective(&w, &diffs, c);
    let mut history = vec![current];

    for epoch in 1..=opts.epochs {
        let eta = opts.learning_rate / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        let mut proposal = w.clone();
        for &p in &order {
            let d = &diffs[p];
            let active = 1.0 - dot(&proposal, d) > 0.0;
            for i in 0..proposal.len() {
                let mut grad = proposal[i] / n;
                if active {
                    grad -= c * d[i];
                }
                proposal[i] -= eta * grad;
            }
        }
        let step: Vec<f64> = proposal.iter().zip(&w).map(|(p, x)| p - x).collect();
        let mut scale = 1.0;
        for _ in 0..MAX_HALVINGS {
            let candidate: Vec<f64> = w.iter().zip(&step).map(|(x, s)| x + scale * s).collect();
            let value = objective(&candidate, &diffs, c);
            if value <= current {
                w = candidate;
                current = value;
                break;
            }
            scale *= 0.5;
        }
        history.push(current);
    }

    let ranker = TrainedRanker {
        weights: w,
        trained_on: fingerprint(queries, c),
    };
    let swapped = swapped_pairs(&ranker, queries);
    Ok(TrainReport {
        ranker,
        skipped_queries: skipped,
        pairs: diffs.len(),
        swapped_pairs: swapped,
        objective: history,
    })
}

/// Number of (gold, other) pairs where `rank` puts the other candidate first.
pub fn swapped_pairs(ranker: &TrainedRanker, queries: &[TrainingQuery]) -> usize {
    queries
        .iter()
        .filter(|q| q.candidates.iter().any(|(id, _)| *id == q.gold))
        .map(|q| {
            let order = rank(ranker, &q.candidates);
            order.iter().position(|r| r.entity_id == q.gold).unwrap_or(0)
        })
        .sum()
}
