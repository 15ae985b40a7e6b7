//! Evaluation: candidate recall at k, k-fold disambiguation accuracy, the
//! contextual-knowledge ablation and combined explicit + implicit linking.
//!
//! Every evaluation keeps its per-tweet predictions so the reported numbers
//! can be recomputed from the TSV dump alone.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::{GoldLabel, Tweet};
use crate::error::{Error, Result};
use crate::linker::{rank, train, FeatureVector, LinkRequest, Linker, TrainOptions, TrainedRanker, TrainingQuery};
use crate::pipeline::{build_emn, BuildInputs, BuildOptions};

fn gold_of(t: &Tweet) -> Result<&str> {
    t.gold_entity.as_deref().ok_or_else(|| Error::MissingGold(t.id.clone()))
}

fn percent(hits: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / total as f64
    }
}

/// Seeded assignment of tweets to folds; fold sizes differ by at most one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    folds: usize,
    assignments: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn new<S: AsRef<str>>(ids: &[S], folds: usize, seed: u64) -> Result<FoldPlan> {
        if folds < 2 {
            return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
        }
        let mut order: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
        order.sort_unstable();
        order.dedup();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let assignments = order
            .into_iter()
            .enumerate()
            .map(|(i, id)| (id.to_owned(), i % folds))
            .collect();
        Ok(FoldPlan { folds, assignments })
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn fold_of(&self, id: &str) -> Option<usize> {
        self.assignments.get(id).copied()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.folds];
        for &f in self.assignments.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// One tweet's outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub tweet_id: String,
    pub fold: Option<usize>,
    pub gold: String,
    pub in_top_k: bool,
    pub predicted: Option<String>,
}

impl Prediction {
    pub fn correct(&self) -> bool {
        self.predicted.as_deref() == Some(self.gold.as_str())
    }
}

pub const PREDICTIONS_HEADER: &str = "tweet_id\tfold\tgold\tin_top_k\tpredicted";

pub fn write_predictions(predictions: &[Prediction]) -> String {
    let mut out = format!("{PREDICTIONS_HEADER}\n");
    for p in predictions {
        let fold = p.fold.map_or("-".to_string(), |f| f.to_string());
        let _ = writeln!(
            out,
            "{}\t{fold}\t{}\t{}\t{}",
            p.tweet_id,
            p.gold,
            u8::from(p.in_top_k),
            p.predicted.as_deref().unwrap_or("-")
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecallAtK {
    pub k: usize,
    pub hits: usize,
    pub total: usize,
    pub predictions: Vec<Prediction>,
}

impl RecallAtK {
    pub fn percent(&self) -> f64 {
        percent(self.hits, self.total)
    }
}

/// Share of tweets whose gold entity is among the top `k` candidates.
/// Tweets with no candidate at all count as misses.
pub fn recall_at_k(linker: &Linker<'_>, tweets: &[Tweet], k: usize) -> Result<RecallAtK> {
    if tweets.is_empty() {
        return Err(Error::EmptySet("recall needs gold tweets"));
    }
    let linker = linker.with_k(k);
    let predictions = tweets
        .par_iter()
        .map(|t| {
            let gold = gold_of(t)?;
            let in_top_k = match linker.candidates(&t.text) {
                Ok(c) => c.iter().any(|c| c.entity_id == gold),
                Err(Error::NoCandidate) => false,
                Err(e) => return Err(e),
            };
            Ok(Prediction {
                tweet_id: t.id.clone(),
                fold: None,
                gold: gold.to_owned(),
                in_top_k,
                predicted: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RecallAtK {
        k,
        hits: predictions.iter().filter(|p| p.in_top_k).count(),
        total: predictions.len(),
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub evaluated: usize,
    pub correct: usize,
    pub swapped_pairs: usize,
    pub skipped_queries: usize,
}

impl FoldResult {
    pub fn accuracy(&self) -> f64 {
        percent(self.correct, self.evaluated)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub recall_at_k: f64,
    pub disambiguation_accuracy: f64,
    pub per_fold: Vec<FoldResult>,
    pub predictions: Vec<Prediction>,
}

impl EvalReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("metric\tvalue\n");
        let _ = writeln!(out, "tweets\t{}", self.predictions.len());
        let _ = writeln!(out, "recall_at_{}\t{}", self.k, self.recall_at_k);
        let _ = writeln!(out, "disambiguation_accuracy\t{}", self.disambiguation_accuracy);
        for f in &self.per_fold {
            let _ = writeln!(out, "fold_{}_accuracy\t{}", f.fold, f.accuracy());
            let _ = writeln!(out, "fold_{}_swapped_pairs\t{}", f.fold, f.swapped_pairs);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tweets                     {:>8}", self.predictions.len());
        let _ = writeln!(out, "candidate recall @{:<3}      {:>8.2}", self.k, self.recall_at_k);
        let _ = writeln!(out, "disambiguation accuracy    {:>8.2}", self.disambiguation_accuracy);
        for f in &self.per_fold {
            let _ = writeln!(
                out,
                "  fold {}: {:>3}/{:<3} correct ({:.2}), {} swapped training pairs",
                f.fold,
                f.correct,
                f.evaluated,
                f.accuracy(),
                f.swapped_pairs
            );
        }
        out
    }
}

/// k-fold cross-validation of the disambiguation step.
///
/// Each fold trains on the other folds' tweets and predicts rank 1 on its
/// own. Accuracy is pooled over all tweets; recall at the linker's `k` comes
/// from the same candidate lists.
pub fn cross_validate(
    linker: &Linker<'_>,
    tweets: &[Tweet],
    folds: usize,
    seed: u64,
    train_opts: &TrainOptions,
) -> Result<EvalReport> {
    if tweets.is_empty() {
        return Err(Error::EmptySet("cross-validation needs gold tweets"));
    }
    let ids: Vec<&str> = tweets.iter().map(|t| t.id.as_str()).collect();
    let plan = FoldPlan::new(&ids, folds, seed)?;

    type Features = Option<Vec<(String, FeatureVector)>>;
    let features: Vec<(&Tweet, &str, Features)> = tweets
        .par_iter()
        .map(|t| {
            let gold = gold_of(t)?;
            let f = match linker.candidate_features(&t.text) {
                Ok(f) => Some(f),
                Err(Error::NoCandidate) => None,
                Err(e) => return Err(e),
            };
            Ok((t, gold, f))
        })
        .collect::<Result<_>>()?;

    let fold_outputs: Vec<(FoldResult, Vec<Prediction>)> = (0..folds)
        .into_par_iter()
        .map(|fold| {
            let queries: Vec<TrainingQuery> = features
                .iter()
                .filter(|(t, _, _)| plan.fold_of(&t.id) != Some(fold))
                .filter_map(|(t, gold, f)| {
                    f.as_ref().map(|c| TrainingQuery {
                        query_id: t.id.clone(),
                        candidates: c.clone(),
                        gold: (*gold).to_owned(),
                    })
                })
                .collect();
            let report = train(&queries, train_opts).map_err(|e| match e {
                Error::InsufficientData { skipped, .. } => Error::InsufficientData {
                    fold: Some(fold),
                    skipped,
                },
                other => other,
            })?;
            let predictions: Vec<Prediction> = features
                .iter()
                .filter(|(t, _, _)| plan.fold_of(&t.id) == Some(fold))
                .map(|(t, gold, f)| {
                    let (in_top_k, predicted) = match f {
                        Some(c) => (
                            c.iter().any(|(id, _)| id == gold),
                            rank(&report.ranker, c).into_iter().next().map(|r| r.entity_id),
                        ),
                        None => (false, None),
                    };
                    Prediction {
                        tweet_id: t.id.clone(),
                        fold: Some(fold),
                        gold: (*gold).to_owned(),
                        in_top_k,
                        predicted,
                    }
                })
                .collect();
            let result = FoldResult {
                fold,
                evaluated: predictions.len(),
                correct: predictions.iter().filter(|p| p.correct()).count(),
                swapped_pairs: report.swapped_pairs,
                skipped_queries: report.skipped_queries,
            };
            Ok((result, predictions))
        })
        .collect::<Result<_>>()?;

    let mut per_fold = Vec::with_capacity(folds);
    let mut by_id: HashMap<String, Prediction> = HashMap::new();
    for (result, preds) in fold_outputs {
        per_fold.push(result);
        by_id.extend(preds.into_iter().map(|p| (p.tweet_id.clone(), p)));
    }
    // predictions in input order
    let predictions: Vec<Prediction> = tweets.iter().filter_map(|t| by_id.remove(&t.id)).collect();
    let total = predictions.len();
    Ok(EvalReport {
        k: linker.options.k,
        recall_at_k: percent(predictions.iter().filter(|p| p.in_top_k).count(), total),
        disambiguation_accuracy: percent(predictions.iter().filter(|p| p.correct()).count(), total),
        per_fold,
        predictions,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ablation {
    pub with_context: EvalReport,
    pub without_context: EvalReport,
}

/// Builds the network twice, with and without contextual knowledge, and
/// cross-validates both on the same gold tweets.
pub fn ablate_context(
    inputs: &BuildInputs,
    build: &BuildOptions,
    gold: &[Tweet],
    k: usize,
    folds: usize,
    seed: u64,
    train_opts: &TrainOptions,
) -> Result<Ablation> {
    let run = |include_contextual: bool| -> Result<EvalReport> {
        let opts = BuildOptions {
            include_contextual,
            ..build.clone()
        };
        let graph = build_emn(inputs, &opts)?.graph;
        let linker = Linker::new(&graph, &inputs.dictionary, &inputs.stopwords).with_k(k);
        cross_validate(&linker, gold, folds, seed, train_opts)
    };
    Ok(Ablation {
        with_context: run(true)?,
        without_context: run(false)?,
    })
}

/// Recorded output of an external explicit linker: tweet id to entity id.
/// Tweets without an entry were left unannotated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitLinkerStub {
    annotations: HashMap<String, String>,
}

impl ExplicitLinkerStub {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn annotate(&mut self, tweet_id: &str, entity_id: &str) {
        self.annotations.insert(tweet_id.to_owned(), entity_id.to_owned());
    }

    pub fn annotation(&self, tweet_id: &str) -> Option<&str> {
        self.annotations.get(tweet_id).map(String::as_str)
    }

    /// Two-column TSV: tweet id, predicted entity id.
    pub fn parse(path: &Path, content: &str) -> Result<ExplicitLinkerStub> {
        let mut stub = ExplicitLinkerStub::new();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 2 || cols[0].is_empty() || cols[1].is_empty() {
                return Err(Error::format(path, i + 1, "expected tweet_id<TAB>entity_id"));
            }
            if stub.annotations.insert(cols[0].to_owned(), cols[1].to_owned()).is_some() {
                return Err(Error::DuplicateId {
                    path: path.to_owned(),
                    line: i + 1,
                    id: cols[0].to_owned(),
                });
            }
        }
        Ok(stub)
    }

    pub fn load(path: &Path) -> Result<ExplicitLinkerStub> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(path, &text)
    }
}

/// Precision, recall and F1 of one annotation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub correct: usize,
    /// Tweets the system annotated with some entity.
    pub annotated: usize,
    /// Tweets whose gold annotation names an entity.
    pub with_entity: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(correct: usize, annotated: usize, with_entity: usize) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, annotated);
        let recall = ratio(correct, with_entity);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            correct,
            annotated,
            with_entity,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedPrediction {
    pub tweet_id: String,
    pub gold: Option<String>,
    pub explicit: Option<String>,
    pub combined: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedReport {
    pub el: Prf,
    pub el_iel: Prf,
    pub predictions: Vec<CombinedPrediction>,
}

pub const COMBINED_HEADER: &str = "tweet_id\tgold\tel\tel_iel";

impl CombinedReport {
    pub fn predictions_tsv(&self) -> String {
        let mut out = format!("{COMBINED_HEADER}\n");
        for p in &self.predictions {
            let s = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{}\t{}\t{}\t{}", p.tweet_id, s(&p.gold), s(&p.explicit), s(&p.combined));
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("system\tprecision\trecall\tf1\n");
        for (name, m) in [("el", &self.el), ("el_iel", &self.el_iel)] {
            let _ = writeln!(out, "{name}\t{}\t{}\t{}", m.precision, m.recall, m.f1);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("system      precision  recall      f1\n");
        for (name, m) in [("EL", &self.el), ("EL+IEL", &self.el_iel)] {
            let _ = writeln!(out, "{name:<10} {:>10.4} {:>7.4} {:>7.4}", m.precision, m.recall, m.f1);
        }
        out
    }
}

/// Scores the explicit linker alone, then again with every tweet it left
/// unannotated passed through the implicit linker's rank-1 output.
pub fn combined_f1(
    stub: &ExplicitLinkerStub,
    mixed: &[Tweet],
    linker: &Linker<'_>,
    ranker: &TrainedRanker,
) -> Result<CombinedReport> {
    if mixed.is_empty() {
        return Err(Error::EmptySet("combined evaluation needs tweets"));
    }
    let entity_type = linker.graph.entity_type().to_owned();
    let predictions = mixed
        .par_iter()
        .map(|t| {
            let gold = match t.gold_label {
                Some(GoldLabel::Nil) => None,
                _ => t.gold_entity.clone(),
            };
            let explicit = stub.annotation(&t.id).map(str::to_owned);
            let combined = match &explicit {
                Some(e) => Some(e.clone()),
                None => match linker.link(ranker, &LinkRequest::new(entity_type.clone(), t.text.clone())) {
                    Ok(ranked) => ranked.into_iter().next().map(|r| r.entity_id),
                    Err(Error::NoCandidate) => None,
                    Err(e) => return Err(e),
                },
            };
            Ok(CombinedPrediction {
                tweet_id: t.id.clone(),
                gold,
                explicit,
                combined,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let with_entity = predictions.iter().filter(|p| p.gold.is_some()).count();
    let score = |pick: fn(&CombinedPrediction) -> &Option<String>| {
        let annotated = predictions.iter().filter(|p| pick(p).is_some()).count();
        let correct = predictions
            .iter()
            .filter(|p| pick(p).is_some() && pick(p) == &p.gold)
            .count();
        Prf::new(correct, annotated, with_entity)
    };
    Ok(CombinedReport {
        el: score(|p| &p.explicit),
        el_iel: score(|p| &p.combined),
        predictions,
    })
}

/// Split produced by [`mix_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct MixedDataset {
    /// Implicit tweets left for training the ranker.
    pub train: Vec<Tweet>,
    /// Implicit test tweets mixed with explicit and NIL tweets.
    pub test: Vec<Tweet>,
}

/// Builds a combined-evaluation set: 40% of the implicit tweets (rounded
/// down) are held out, joined by explicit tweets at `explicit:implicit`
/// ratio and by NIL tweets amounting to 25% of that mix. Counts round down
/// and are capped by what is available.
pub fn mix_dataset(
    implicit: &[Tweet],
    explicit: &[Tweet],
    nil: &[Tweet],
    ratio: (usize, usize),
    seed: u64,
) -> Result<MixedDataset> {
    if ratio.1 == 0 {
        return Err(Error::Config("implicit side of the ratio must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = |xs: &[Tweet]| {
        let mut v = xs.to_vec();
        v.shuffle(&mut rng);
        v
    };
    let mut implicit = shuffled(implicit);
    let explicit = shuffled(explicit);
    let nil = shuffled(nil);

    let n_test = implicit.len() * 2 / 5;
    let n_explicit = (n_test * ratio.0 / ratio.1).min(explicit.len());
    let n_nil = ((n_test + n_explicit) / 4).min(nil.len());

    let train = implicit.split_off(n_test);
    let mut test = implicit;
    test.extend(explicit.into_iter().take(n_explicit));
    test.extend(nil.into_iter().take(n_nil));
    test.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(MixedDataset { train, test })
}
