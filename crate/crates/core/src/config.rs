//! Run configuration.
//!
//! A config file is flat `key = value` text, one setting per line, `#`
//! comments allowed. Every key mirrors a command-line flag; flags given on
//! the command line win over the file. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::linker::{LinkOptions, TrainOptions, TweetWeighting};
use crate::pipeline::BuildOptions;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub entity_type: String,
    pub type_keywords: Vec<String>,
    pub m_relations: usize,
    pub context_cap: usize,
    pub salience_window_days: u32,
    pub as_of_date: Option<NaiveDate>,
    pub include_contextual: bool,
    pub k: usize,
    pub tweet_weighting: TweetWeighting,
    pub c_tradeoff: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub folds: usize,
    pub seed: u64,
    pub threads: Option<usize>,

    pub triples: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub tweets: Option<PathBuf>,
    pub pageviews: Option<PathBuf>,
    pub phrases: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub emn: Option<PathBuf>,
    pub ranker: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub stub: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            entity_type: "Movie".into(),
            type_keywords: Vec::new(),
            m_relations: 15,
            context_cap: 1000,
            salience_window_days: 30,
            as_of_date: None,
            include_contextual: true,
            k: 25,
            tweet_weighting: TweetWeighting::Binary,
            c_tradeoff: 0.01,
            epochs: 200,
            learning_rate: 0.1,
            folds: 5,
            seed: 7,
            threads: None,
            triples: None,
            labels: None,
            tweets: None,
            pageviews: None,
            phrases: None,
            stopwords: None,
            emn: None,
            ranker: None,
            gold: None,
            stub: None,
            out: None,
            predictions: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

pub fn parse_date(value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| Error::Config(format!("`{value}` is not an ISO-8601 date (YYYY-MM-DD)")))
}

pub fn parse_weighting(value: &str) -> Result<TweetWeighting> {
    match value {
        "binary" => Ok(TweetWeighting::Binary),
        "tf" => Ok(TweetWeighting::TermFrequency),
        other => Err(Error::Config(format!("tweet_weighting must be `binary` or `tf`, got `{other}`"))),
    }
}

impl Config {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let path = || Some(PathBuf::from(value));
        match key {
            "entity_type" => self.entity_type = value.to_owned(),
            "type_keywords" => {
                self.type_keywords = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_owned)
                    .collect()
            }
            "m_relations" => self.m_relations = parse(key, value)?,
            "context_cap" => self.context_cap = parse(key, value)?,
            "salience_window_days" => self.salience_window_days = parse(key, value)?,
            "as_of_date" => self.as_of_date = Some(parse_date(value)?),
            "include_contextual" => self.include_contextual = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "tweet_weighting" => self.tweet_weighting = parse_weighting(value)?,
            "c_tradeoff" => self.c_tradeoff = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "learning_rate" => self.learning_rate = parse(key, value)?,
            "folds" => self.folds = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            "triples" => self.triples = path(),
            "labels" => self.labels = path(),
            "tweets" => self.tweets = path(),
            "pageviews" => self.pageviews = path(),
            "phrases" => self.phrases = path(),
            "stopwords" => self.stopwords = path(),
            "emn" => self.emn = path(),
            "ranker" => self.ranker = path(),
            "gold" => self.gold = path(),
            "stub" => self.stub = path(),
            "out" => self.out = path(),
            "predictions" => self.predictions = path(),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse_file(text: &str) -> Result<Config> {
        let mut cfg = Config::default();
        cfg.apply_file(text)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse_file(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_owned()));
        if self.entity_type.trim().is_empty() {
            return fail("entity_type must not be empty");
        }
        if self.m_relations < 1 {
            return fail("m_relations must be at least 1");
        }
        if self.context_cap < 1 {
            return fail("context_cap must be at least 1");
        }
        if self.salience_window_days < 1 {
            return fail("salience_window_days must be at least 1");
        }
        if self.k < 1 {
            return fail("k must be at least 1");
        }
        if !(self.c_tradeoff.is_finite() && self.c_tradeoff > 0.0) {
            return fail("c_tradeoff must be positive");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail("learning_rate must be positive");
        }
        if self.folds < 2 {
            return fail("folds must be at least 2");
        }
        if self.threads == Some(0) {
            return fail("threads must be at least 1");
        }
        Ok(())
    }

    pub fn build_options(&self) -> Result<BuildOptions> {
        let as_of = self
            .as_of_date
            .ok_or_else(|| Error::Config("as_of_date is required".into()))?;
        Ok(BuildOptions {
            entity_type: self.entity_type.clone(),
            type_keywords: self.type_keywords.clone(),
            m_relations: self.m_relations,
            context_cap: self.context_cap,
            salience_window_days: self.salience_window_days,
            as_of,
            include_contextual: self.include_contextual,
        })
    }

    pub fn link_options(&self) -> LinkOptions {
        LinkOptions {
            k: self.k,
            weighting: self.tweet_weighting,
        }
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            c_tradeoff: self.c_tradeoff,
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            seed: self.seed,
        }
    }
}
