//! The Entity Model Network: a bipartite property graph joining clue nodes to
//! entity nodes.
//!
//! Each edge carries how often the clue occurred in the entity's knowledge.
//! Each clue carries a specificity, `ln(|entities| / degree)`, so a clue shared
//! by every entity weighs nothing and a clue owned by one entity weighs most.
//! Specificity is always derived from the adjacency, never stored
//! independently, including when a snapshot is loaded.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use chrono::NaiveDate;

use crate::corpus::PhraseDictionary;
use crate::error::{Error, Result};
use crate::knowledge::{ContextualKnowledge, FactualKnowledge, TemporalSalience};
use crate::textprep::{clean, extract_clues, ClueMode, ClueSet, Stopwords};

const SNAPSHOT_MAGIC: &str = "emn-snapshot";
const SNAPSHOT_VERSION: u32 = 1;

/// Which knowledge sources produced a clue.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Origin {
    pub factual: bool,
    pub contextual: bool,
}

impl Origin {
    pub const FACTUAL: Origin = Origin {
        factual: true,
        contextual: false,
    };
    pub const CONTEXTUAL: Origin = Origin {
        factual: false,
        contextual: true,
    };

    pub fn union(self, other: Origin) -> Origin {
        Origin {
            factual: self.factual || other.factual,
            contextual: self.contextual || other.contextual,
        }
    }

    fn parse(s: &str) -> Option<Origin> {
        match s {
            "F" => Some(Origin::FACTUAL),
            "C" => Some(Origin::CONTEXTUAL),
            "FC" => Some(Origin::FACTUAL.union(Origin::CONTEXTUAL)),
            _ => None,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factual {
            f.write_str("F")?;
        }
        if self.contextual {
            f.write_str("C")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClueStats {
    pub frequency: u32,
    pub origin: Origin,
}

/// One entity's clues, keyed by clue name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityModel {
    pub clues: BTreeMap<String, ClueStats>,
}

impl EntityModel {
    pub fn is_empty(&self) -> bool {
        self.clues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.clues.len()
    }
}

impl<S: Into<String>> FromIterator<(S, u32)> for EntityModel {
    /// Contextual clues with the given frequencies.
    fn from_iter<I: IntoIterator<Item = (S, u32)>>(iter: I) -> Self {
        EntityModel {
            clues: iter
                .into_iter()
                .map(|(k, f)| {
                    (
                        k.into(),
                        ClueStats {
                            frequency: f,
                            origin: Origin::CONTEXTUAL,
                        },
                    )
                })
                .collect(),
        }
    }
}

fn clue_counts(texts: impl Iterator<Item = String>, dict: &PhraseDictionary, stop: &Stopwords) -> ClueSet {
    let mut all = ClueSet::default();
    for text in texts {
        all.merge(&extract_clues(&clean(&text), dict, stop, ClueMode::EntityModel));
    }
    all
}

/// Builds one entity's model from its factual texts and contextual tweets.
///
/// Edge frequency is the clue's occurrence count across the contextual
/// tweets; a clue seen only in factual texts gets frequency 1.
pub fn build_entity_model(
    entity_id: &str,
    factual: &FactualKnowledge,
    contextual: &ContextualKnowledge,
    dict: &PhraseDictionary,
    stopwords: &Stopwords,
) -> Result<EntityModel> {
    let ctx = clue_counts(contextual.tweets.iter().map(|t| t.text.clone()), dict, stopwords);
    let fact = clue_counts(factual.texts.iter().cloned(), dict, stopwords);

    let mut clues = BTreeMap::new();
    for (name, &n) in ctx.phrases.iter().chain(&ctx.unigrams) {
        clues.insert(
            name.clone(),
            ClueStats {
                frequency: n,
                origin: Origin::CONTEXTUAL,
            },
        );
    }
    for name in fact.phrases.keys().chain(fact.unigrams.keys()) {
        clues
            .entry(name.clone())
            .and_modify(|s: &mut ClueStats| s.origin = s.origin.union(Origin::FACTUAL))
            .or_insert(ClueStats {
                frequency: 1,
                origin: Origin::FACTUAL,
            });
    }
    if clues.is_empty() {
        return Err(Error::EmptyModel(entity_id.to_owned()));
    }
    Ok(EntityModel { clues })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityNode {
    pub entity_id: String,
    pub name: String,
    pub salience: TemporalSalience,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClueNode {
    pub name: String,
    pub specificity: f64,
    pub origin: Origin,
}

/// Per-entity inputs to [`assemble`].
#[derive(Debug, Clone)]
pub struct EntityInput {
    pub name: String,
    pub salience: TemporalSalience,
    pub model: EntityModel,
}

/// Graph-level properties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMeta {
    pub entity_type: String,
    pub built_at: NaiveDate,
}

/// Sparse vector over clue node indices, sorted by index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Cosine similarity; 0 when either vector is zero.
    pub fn cosine(&self, other: &SparseVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            0.0
        } else {
            (self.dot(other) / denom).clamp(0.0, 1.0)
        }
    }
}

/// Immutable once built. Entities are ordered by id and clues by name, so
/// node indices are canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct EmnGraph {
    meta: GraphMeta,
    specificity_scale: f64,
    entities: Vec<EntityNode>,
    clues: Vec<ClueNode>,
    entity_index: HashMap<String, usize>,
    clue_index: HashMap<String, usize>,
    /// clue -> (entity, frequency), sorted by entity
    forward: Vec<Vec<(usize, u32)>>,
    /// entity -> (clue, frequency), sorted by clue
    reverse: Vec<Vec<(usize, u32)>>,
}

/// `ln(entities / degree)` times `scale`.
pub fn specificity(entities: usize, degree: usize, scale: f64) -> f64 {
    scale * (entities as f64 / degree as f64).ln()
}

/// Joins entity models through their shared clues.
///
/// Input order does not matter. Duplicate entity ids are rejected.
pub fn assemble(meta: GraphMeta, inputs: impl IntoIterator<Item = (String, EntityInput)>) -> Result<EmnGraph> {
    let mut by_id: BTreeMap<String, EntityInput> = BTreeMap::new();
    for (id, input) in inputs {
        if input.model.is_empty() {
            return Err(Error::EmptyModel(id));
        }
        if by_id.contains_key(&id) {
            return Err(Error::KeyMismatch(format!("entity `{id}` given twice")));
        }
        by_id.insert(id, input);
    }

    let mut origins: BTreeMap<&str, Origin> = BTreeMap::new();
    for input in by_id.values() {
        for (name, stats) in &input.model.clues {
            let o = origins.entry(name.as_str()).or_default();
            *o = o.union(stats.origin);
        }
    }
    let clue_names: Vec<(String, Origin)> = origins.into_iter().map(|(k, o)| (k.to_owned(), o)).collect();
    let clue_pos: HashMap<&str, usize> = clue_names
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.as_str(), i))
        .collect();

    let mut edges = Vec::new();
    for (ei, input) in by_id.values().enumerate() {
        for (name, stats) in &input.model.clues {
            edges.push((clue_pos[name.as_str()], ei, stats.frequency));
        }
    }
    let entities = by_id
        .into_iter()
        .map(|(id, input)| EntityNode {
            entity_id: id,
            name: input.name,
            salience: input.salience,
        })
        .collect();
    EmnGraph::from_parts(meta, 1.0, entities, clue_names, edges)
}

/// Convenience wrapper over [`assemble`] taking three keyed maps, which must
/// share one key set.
pub fn assemble_maps(
    meta: GraphMeta,
    models: BTreeMap<String, EntityModel>,
    salience: &BTreeMap<String, TemporalSalience>,
    names: &BTreeMap<String, String>,
) -> Result<EmnGraph> {
    if !models.keys().eq(salience.keys()) || !models.keys().eq(names.keys()) {
        return Err(Error::KeyMismatch(
            "models, salience and names must cover the same entities".into(),
        ));
    }
    assemble(
        meta,
        models.into_iter().map(|(id, model)| {
            let input = EntityInput {
                name: names[&id].clone(),
                salience: salience[&id],
                model,
            };
            (id, input)
        }),
    )
}

impl EmnGraph {
    fn from_parts(
        meta: GraphMeta,
        specificity_scale: f64,
        entities: Vec<EntityNode>,
        clue_names: Vec<(String, Origin)>,
        edges: Vec<(usize, usize, u32)>,
    ) -> Result<EmnGraph> {
        let mut forward: Vec<Vec<(usize, u32)>> = vec![Vec::new(); clue_names.len()];
        let mut reverse: Vec<Vec<(usize, u32)>> = vec![Vec::new(); entities.len()];
        for (c, e, f) in edges {
            if f == 0 {
                return Err(Error::KeyMismatch(format!(
                    "edge {} -> {} has zero frequency",
                    clue_names[c].0, entities[e].entity_id
                )));
            }
            forward[c].push((e, f));
            reverse[e].push((c, f));
        }
        for (c, adj) in forward.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.is_empty() {
                return Err(Error::KeyMismatch(format!("clue `{}` has no edges", clue_names[c].0)));
            }
            if adj.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::KeyMismatch(format!("clue `{}` has a repeated edge", clue_names[c].0)));
            }
        }
        for (e, adj) in reverse.iter_mut().enumerate() {
            adj.sort_unstable();
            if adj.is_empty() {
                return Err(Error::EmptyModel(entities[e].entity_id.clone()));
            }
        }
        let n = entities.len();
        let clues: Vec<ClueNode> = clue_names
            .into_iter()
            .zip(&forward)
            .map(|((name, origin), adj)| ClueNode {
                name,
                specificity: specificity(n, adj.len(), specificity_scale),
                origin,
            })
            .collect();
        let entity_index = entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.entity_id.clone(), i))
            .collect();
        let clue_index = clues.iter().enumerate().map(|(i, c)| (c.name.clone(), i)).collect();
        Ok(EmnGraph {
            meta,
            specificity_scale,
            entities,
            clues,
            entity_index,
            clue_index,
            forward,
            reverse,
        })
    }

    pub fn meta(&self) -> &GraphMeta {
        &self.meta
    }

    pub fn entity_type(&self) -> &str {
        &self.meta.entity_type
    }

    pub fn built_at(&self) -> NaiveDate {
        self.meta.built_at
    }

    pub fn specificity_scale(&self) -> f64 {
        self.specificity_scale
    }

    /// A copy whose specificities are all multiplied by `factor`, which is
    /// the same as changing the logarithm base.
    pub fn with_specificity_scale(&self, factor: f64) -> Result<EmnGraph> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::Config(format!("specificity scale must be positive, got {factor}")));
        }
        let mut g = self.clone();
        g.specificity_scale = self.specificity_scale * factor;
        let n = g.entities.len();
        for (c, adj) in g.clues.iter_mut().zip(&g.forward) {
            c.specificity = specificity(n, adj.len(), g.specificity_scale);
        }
        Ok(g)
    }

    pub fn entities(&self) -> &[EntityNode] {
        &self.entities
    }

    pub fn clues(&self) -> &[ClueNode] {
        &self.clues
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn clue_count(&self) -> usize {
        self.clues.len()
    }

    pub fn edge_count(&self) -> usize {
        self.forward.iter().map(Vec::len).sum()
    }

    pub fn entity_index(&self, entity_id: &str) -> Option<usize> {
        self.entity_index.get(entity_id).copied()
    }

    pub fn clue_index(&self, clue: &str) -> Option<usize> {
        self.clue_index.get(clue).copied()
    }

    pub fn entity(&self, index: usize) -> &EntityNode {
        &self.entities[index]
    }

    pub fn clue(&self, index: usize) -> &ClueNode {
        &self.clues[index]
    }

    /// `(entity index, frequency)` for every edge leaving the clue.
    pub fn clue_edges(&self, clue: usize) -> &[(usize, u32)] {
        &self.forward[clue]
    }

    /// `(clue index, frequency)` for every edge entering the entity.
    pub fn entity_edges(&self, entity: usize) -> &[(usize, u32)] {
        &self.reverse[entity]
    }

    /// Edge frequency, 0 when there is no edge.
    pub fn frequency(&self, clue: usize, entity: usize) -> u32 {
        self.forward[clue]
            .binary_search_by_key(&entity, |(e, _)| *e)
            .map(|pos| self.forward[clue][pos].1)
            .unwrap_or(0)
    }

    /// All edges as `(clue, entity, frequency)`, ordered by clue then entity.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.forward
            .iter()
            .enumerate()
            .flat_map(|(c, adj)| adj.iter().map(move |&(e, f)| (c, e, f)))
    }

    /// Specificity times edge frequency for every clue of the entity.
    pub fn entity_vector(&self, entity_id: &str) -> Result<SparseVector> {
        let e = self
            .entity_index(entity_id)
            .ok_or_else(|| Error::UnknownEntity(entity_id.to_owned()))?;
        Ok(self.entity_vector_at(e))
    }

    pub fn entity_vector_at(&self, entity: usize) -> SparseVector {
        SparseVector {
            entries: self.reverse[entity]
                .iter()
                .map(|&(c, f)| (c, self.clues[c].specificity * f64::from(f)))
                .collect(),
        }
    }

    /// The entity's clues with their edge frequency, most specific first.
    pub fn entity_clues(&self, entity_id: &str) -> Result<Vec<(&ClueNode, u32)>> {
        let e = self
            .entity_index(entity_id)
            .ok_or_else(|| Error::UnknownEntity(entity_id.to_owned()))?;
        let mut out: Vec<(&ClueNode, u32)> = self.reverse[e].iter().map(|&(c, f)| (&self.clues[c], f)).collect();
        out.sort_by(|a, b| {
            b.0.specificity
                .total_cmp(&a.0.specificity)
                .then(b.1.cmp(&a.1))
                .then_with(|| a.0.name.cmp(&b.0.name))
        });
        Ok(out)
    }

    /// Serializes the graph as a versioned, sectioned TSV snapshot.
    ///
    /// The clue section lists specificities for readers, but
    /// [`EmnGraph::from_snapshot`] ignores them and recomputes.
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{SNAPSHOT_MAGIC}\t{SNAPSHOT_VERSION}");
        let _ = writeln!(out, "type\t{}", self.meta.entity_type);
        let _ = writeln!(out, "built_at\t{}", self.meta.built_at.format("%Y-%m-%d"));
        let _ = writeln!(out, "scale\t{}", self.specificity_scale);
        out.push_str("[entities]\n");
        for e in &self.entities {
            let _ = writeln!(out, "{}\t{}\t{}", e.entity_id, e.name, e.salience.0);
        }
        out.push_str("[clues]\n");
        for c in &self.clues {
            let _ = writeln!(out, "{}\t{}\t{}", c.name, c.origin, c.specificity);
        }
        out.push_str("[edges]\n");
        for (c, e, f) in self.edges() {
            let _ = writeln!(out, "{}\t{}\t{f}", self.clues[c].name, self.entities[e].entity_id);
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<EmnGraph> {
        let err = |line: usize, message: String| Error::Snapshot { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

        let mut header = |key: &str| -> Result<String> {
            let (n, line) = lines.next().ok_or_else(|| err(0, format!("missing `{key}` header")))?;
            match line.split_once('\t') {
                Some((k, v)) if k == key => Ok(v.to_owned()),
                _ => Err(err(n, format!("expected `{key}` header"))),
            }
        };
        let version = header(SNAPSHOT_MAGIC)?;
        if version != SNAPSHOT_VERSION.to_string() {
            return Err(err(1, format!("unsupported snapshot version `{version}`")));
        }
        let entity_type = header("type")?;
        let built_at = NaiveDate::parse_from_str(&header("built_at")?, "%Y-%m-%d")
            .map_err(|e| err(3, format!("bad built_at date: {e}")))?;
        let scale: f64 = header("scale")?
            .parse()
            .map_err(|_| err(4, "bad scale".into()))?;
        if !(scale.is_finite() && scale > 0.0) {
            return Err(err(4, "scale must be positive".into()));
        }

        let mut section = "";
        let mut entities = Vec::new();
        let mut entity_pos: HashMap<String, usize> = HashMap::new();
        let mut clue_names: Vec<(String, Origin)> = Vec::new();
        let mut clue_pos: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "entities" | "clues" | "edges" => name,
                    other => return Err(err(n, format!("unknown section `{other}`"))),
                };
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(n, format!("expected 3 columns, found {}", cols.len())));
            }
            match section {
                "entities" => {
                    let salience = cols[2]
                        .parse()
                        .map_err(|_| err(n, format!("bad salience `{}`", cols[2])))?;
                    if entity_pos.insert(cols[0].to_owned(), entities.len()).is_some() {
                        return Err(err(n, format!("duplicate entity `{}`", cols[0])));
                    }
                    entities.push(EntityNode {
                        entity_id: cols[0].to_owned(),
                        name: cols[1].to_owned(),
                        salience: TemporalSalience(salience),
                    });
                }
                "clues" => {
                    let origin = Origin::parse(cols[1]).ok_or_else(|| err(n, format!("bad origin `{}`", cols[1])))?;
                    if clue_pos.insert(cols[0].to_owned(), clue_names.len()).is_some() {
                        return Err(err(n, format!("duplicate clue `{}`", cols[0])));
                    }
                    clue_names.push((cols[0].to_owned(), origin));
                }
                "edges" => {
                    let c = *clue_pos
                        .get(cols[0])
                        .ok_or_else(|| err(n, format!("edge from unknown clue `{}`", cols[0])))?;
                    let e = *entity_pos
                        .get(cols[1])
                        .ok_or_else(|| err(n, format!("edge to unknown entity `{}`", cols[1])))?;
                    let f: u32 = cols[2]
                        .parse()
                        .map_err(|_| err(n, format!("bad frequency `{}`", cols[2])))?;
                    edges.push((c, e, f));
                }
                _ => return Err(err(n, "row outside any section".into())),
            }
        }
        if entities.windows(2).any(|w| w[0].entity_id >= w[1].entity_id)
            || clue_names.windows(2).any(|w| w[0].0 >= w[1].0)
        {
            return Err(err(0, "entities and clues must be sorted by id".into()));
        }
        EmnGraph::from_parts(GraphMeta { entity_type, built_at }, scale, entities, clue_names, edges)
            .map_err(|e| err(0, e.to_string()))
    }
}
