//! Alignment data model and the elementary alignment operations.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::label::LabelNormalizer;

fn check_absolute_uri(uri: &str) -> Result<()> {
    if uri.is_empty() {
        return Err(Error::Argument("empty URI".into()));
    }
    url::Url::parse(uri)
        .map(|_| ())
        .map_err(|e| Error::Argument(format!("`{uri}` is not an absolute URI: {e}")))
}

/// An ontology, known only by its URI.
#[derive(Debug, Clone)]
pub struct OntologyRef {
    uri: String,
    language_hint: Option<String>,
}

impl OntologyRef {
    /// The language hint is guessed from a trailing `-xx`/`_xx` in the last URI segment.
    pub fn new(uri: impl Into<String>) -> Result<Self> {
        let uri = uri.into();
        check_absolute_uri(&uri)?;
        let language_hint = guess_language(&uri);
        Ok(OntologyRef { uri, language_hint })
    }

    pub fn with_language(mut self, lang: Option<String>) -> Self {
        self.language_hint = lang;
        self
    }

    pub fn uri(&self) -> &str {
        &self.uri
    }

    pub fn language_hint(&self) -> Option<&str> {
        self.language_hint.as_deref()
    }

    /// Last URI segment sanitized to `[a-z0-9-]`, used in output file names.
    pub fn tag(&self) -> String {
        uri_tag(&self.uri)
    }
}

/// File-name tag for a URI or a bare name: `http://x/cmt_fr#` and `cmt_fr` both give `cmt-fr`.
pub fn uri_tag(uri: &str) -> String {
    let trimmed = uri.trim_end_matches(['#', '/']);
    let segment = trimmed.rsplit(['/', '#', ':']).next().unwrap_or(trimmed);
    let mut tag = String::with_capacity(segment.len());
    for c in segment.chars().flat_map(char::to_lowercase) {
        let c = if c.is_ascii_lowercase() || c.is_ascii_digit() {
            c
        } else {
            '-'
        };
        if c == '-' && (tag.is_empty() || tag.ends_with('-')) {
            continue;
        }
        tag.push(c);
    }
    let tag = tag.trim_end_matches('-').to_owned();
    if tag.is_empty() {
        "onto".to_owned()
    } else {
        tag
    }
}

fn guess_language(uri: &str) -> Option<String> {
    let segment = uri.trim_end_matches(['#', '/']).rsplit(['/', '#']).next()?;
    let segment = segment.strip_suffix(".owl").unwrap_or(segment);
    let (_, code) = segment.rsplit_once(['-', '_'])?;
    (code.len() == 2 && code.chars().all(|c| c.is_ascii_lowercase())).then(|| code.to_owned())
}

impl PartialEq for OntologyRef {
    fn eq(&self, other: &Self) -> bool {
        self.uri == other.uri
    }
}

impl Eq for OntologyRef {}

impl Hash for OntologyRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.uri.hash(state);
    }
}

impl PartialOrd for OntologyRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OntologyRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.uri.cmp(&other.uri)
    }
}

impl fmt::Display for OntologyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.uri)
    }
}

/// An ontological entity. Identity is the URI; the label is derived from it.
#[derive(Debug, Clone)]
pub struct EntityRef {
    uri: String,
    local_name: String,
    normalized_label: String,
}

impl EntityRef {
    pub fn new(uri: impl Into<String>) -> Result<Self> {
        Self::with_normalizer(uri, &LabelNormalizer::default())
    }

    pub fn with_normalizer(uri: impl Into<String>, normalizer: &LabelNormalizer) -> Result<Self> {
        let uri = uri.into();
        check_absolute_uri(&uri)?;
        let local_name = local_name(&uri).to_owned();
        let normalized_label = normalizer.normalize(&local_name);
        Ok(EntityRef {
            uri,
            local_name,
            normalized_label,
        })
    }

    /// Same entity, label recomputed with another normalizer.
    pub fn relabel(&self, normalizer: &LabelNormalizer) -> Self {
        EntityRef {
            uri: self.uri.clone(),
            local_name: self.local_name.clone(),
            normalized_label: normalizer.normalize(&self.local_name),
        }
    }

    pub fn uri(&self) -> &str {
        &self.uri
    }

    pub fn local_name(&self) -> &str {
        &self.local_name
    }

    pub fn normalized_label(&self) -> &str {
        &self.normalized_label
    }
}

/// Fragment after `#`, else last non-empty `/` segment, else the whole URI.
pub fn local_name(uri: &str) -> &str {
    if let Some((_, frag)) = uri.split_once('#') {
        if !frag.is_empty() {
            return frag;
        }
    }
    let path = uri.split('#').next().unwrap_or(uri);
    match path.trim_end_matches('/').rsplit_once('/') {
        Some((_, last)) if !last.is_empty() => last,
        _ => uri,
    }
}

impl PartialEq for EntityRef {
    fn eq(&self, other: &Self) -> bool {
        self.uri == other.uri
    }
}

impl Eq for EntityRef {}

impl Hash for EntityRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.uri.hash(state);
    }
}

impl PartialOrd for EntityRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EntityRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.uri.cmp(&other.uri)
    }
}

/// The five base relations of the alignment algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Equivalence,
    MoreGeneral,
    LessGeneral,
    Overlap,
    Disjoint,
}

impl Relation {
    /// Canonical order, also the serialization order of relation sets.
    pub const ALL: [Relation; 5] = [
        Relation::Equivalence,
        Relation::MoreGeneral,
        Relation::LessGeneral,
        Relation::Overlap,
        Relation::Disjoint,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Equivalence => "=",
            Relation::MoreGeneral => ">",
            Relation::LessGeneral => "<",
            Relation::Overlap => "><",
            Relation::Disjoint => "%",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Relation> {
        match s.trim() {
            "=" => Some(Relation::Equivalence),
            ">" => Some(Relation::MoreGeneral),
            "<" | "&lt;" => Some(Relation::LessGeneral),
            "><" => Some(Relation::Overlap),
            "%" => Some(Relation::Disjoint),
            _ => None,
        }
    }

    /// Relation seen from the other side of the correspondence.
    pub fn inverse(self) -> Relation {
        match self {
            Relation::MoreGeneral => Relation::LessGeneral,
            Relation::LessGeneral => Relation::MoreGeneral,
            r => r,
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A subset of the five base relations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    /// Γ: every relation is possible.
    pub const GAMMA: RelationSet = RelationSet(0b1_1111);

    pub const fn from_bits(bits: u8) -> RelationSet {
        RelationSet(bits & 0b1_1111)
    }

    pub fn of(relations: &[Relation]) -> RelationSet {
        relations.iter().fold(RelationSet::EMPTY, |s, r| s.with(*r))
    }

    pub fn with(self, r: Relation) -> RelationSet {
        RelationSet(self.0 | r.bit())
    }

    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub fn contains(self, r: Relation) -> bool {
        self.0 & r.bit() != 0
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_gamma(self) -> bool {
        self == RelationSet::GAMMA
    }

    /// The member of a singleton set.
    pub fn single(self) -> Option<Relation> {
        (self.len() == 1).then(|| self.iter().next()).flatten()
    }

    pub fn iter(self) -> impl Iterator<Item = Relation> {
        Relation::ALL.into_iter().filter(move |r| self.contains(*r))
    }

    pub fn inverse(self) -> RelationSet {
        self.iter()
            .fold(RelationSet::EMPTY, |s, r| s.with(r.inverse()))
    }

    /// Parses a single symbol or a `;`-joined list of symbols.
    pub fn parse(s: &str) -> Option<RelationSet> {
        let mut set = RelationSet::EMPTY;
        for part in s.split(';') {
            set = set.with(Relation::from_symbol(part)?);
        }
        Some(set)
    }
}

impl From<Relation> for RelationSet {
    fn from(r: Relation) -> Self {
        RelationSet(r.bit())
    }
}

impl FromIterator<Relation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = Relation>>(iter: I) -> Self {
        iter.into_iter().fold(RelationSet::EMPTY, |s, r| s.with(r))
    }
}

impl FromStr for RelationSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RelationSet::parse(s).ok_or_else(|| Error::Argument(format!("unknown relation `{s}`")))
    }
}

/// Members joined with `;` in canonical order.
impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(r.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_gamma() {
            f.write_str("Γ")
        } else {
            write!(f, "{{{self}}}")
        }
    }
}

/// Identity of a correspondence: the (entity1, entity2, relation) triple.
pub type CellKey = (String, String, RelationSet);

/// A correspondence ⟨e1, e2, r, n⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub entity1: EntityRef,
    pub entity2: EntityRef,
    pub relation: RelationSet,
    pub confidence: f64,
}

impl Correspondence {
    pub fn new(
        entity1: EntityRef,
        entity2: EntityRef,
        relation: impl Into<RelationSet>,
        confidence: f64,
    ) -> Result<Self> {
        let relation = relation.into();
        if relation.is_empty() {
            return Err(Error::Argument("empty relation set".into()));
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Argument(format!(
                "confidence {confidence} outside [0,1]"
            )));
        }
        Ok(Correspondence {
            entity1,
            entity2,
            relation,
            confidence,
        })
    }

    pub fn key(&self) -> CellKey {
        (
            self.entity1.uri().to_owned(),
            self.entity2.uri().to_owned(),
            self.relation,
        )
    }

    pub fn inverted(&self) -> Correspondence {
        Correspondence {
            entity1: self.entity2.clone(),
            entity2: self.entity1.clone(),
            relation: self.relation.inverse(),
            confidence: self.confidence,
        }
    }

    fn sort_cmp(&self, other: &Self) -> Ordering {
        self.entity1
            .uri()
            .cmp(other.entity1.uri())
            .then_with(|| self.entity2.uri().cmp(other.entity2.uri()))
            .then_with(|| self.relation.cmp(&other.relation))
            .then_with(|| self.confidence.total_cmp(&other.confidence))
    }
}

pub mod meta {
    pub const LEVEL: &str = "level";
    pub const TYPE: &str = "type";
    pub const INVERTED_FROM: &str = "inverted-from";
    pub const TRIMMED_AT: &str = "trimmed-at";
}

/// A set of correspondences between two ontologies.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub id: String,
    pub onto1: OntologyRef,
    pub onto2: OntologyRef,
    pub cells: Vec<Correspondence>,
    pub metadata: BTreeMap<String, String>,
}

impl Alignment {
    pub fn new(id: impl Into<String>, onto1: OntologyRef, onto2: OntologyRef) -> Self {
        Alignment {
            id: id.into(),
            onto1,
            onto2,
            cells: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_cells(mut self, cells: Vec<Correspondence>) -> Self {
        self.cells = cells;
        self
    }

    /// Cells in serialization order: entity1 URI, entity2 URI, relation.
    pub fn sorted_cells(&self) -> Vec<&Correspondence> {
        let mut cells: Vec<_> = self.cells.iter().collect();
        cells.sort_by(|a, b| a.sort_cmp(b));
        cells
    }

    /// Cell-set equality: same keys with confidences equal at the six-digit
    /// serialization precision. Order and exact duplicates are ignored.
    pub fn same_cells(&self, other: &Alignment) -> bool {
        fn canon(a: &Alignment) -> Vec<(CellKey, i64)> {
            let mut v: Vec<_> = a
                .cells
                .iter()
                .map(|c| (c.key(), (c.confidence * 1e6).round() as i64))
                .collect();
            v.sort();
            v.dedup();
            v
        }
        canon(self) == canon(other)
    }

    pub fn invert(&self) -> Alignment {
        invert_alignment(self)
    }

    pub fn trim(&self, threshold: f64) -> Result<Alignment> {
        trim(self, threshold)
    }
}

/// Swaps the ontologies and inverts every cell.
pub fn invert_alignment(a: &Alignment) -> Alignment {
    let mut metadata = a.metadata.clone();
    match metadata.remove(meta::INVERTED_FROM) {
        // Inverting an inverse restores the original metadata.
        Some(prev) if prev == invert_id(&a.id) => {}
        _ => {
            metadata.insert(meta::INVERTED_FROM.into(), a.id.clone());
        }
    }
    Alignment {
        id: invert_id(&a.id),
        onto1: a.onto2.clone(),
        onto2: a.onto1.clone(),
        cells: a.cells.iter().map(Correspondence::inverted).collect(),
        metadata,
    }
}

const INVERSE_SUFFIX: &str = "^-1";

fn invert_id(id: &str) -> String {
    match id.strip_suffix(INVERSE_SUFFIX) {
        Some(base) => base.to_owned(),
        None => format!("{id}{INVERSE_SUFFIX}"),
    }
}

/// Keeps the cells with confidence ≥ threshold.
pub fn trim(a: &Alignment, threshold: f64) -> Result<Alignment> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::Argument(format!(
            "trim threshold {threshold} outside [0,1]"
        )));
    }
    let mut out = a.clone();
    out.cells.retain(|c| c.confidence >= threshold);
    out.metadata
        .insert(meta::TRIMMED_AT.into(), threshold.to_string());
    Ok(out)
}

/// Collapses cells sharing a key into one cell with the maximum confidence.
/// Output keeps the order of first occurrence.
pub fn merge_cells(a: &Alignment) -> Alignment {
    let mut best: BTreeMap<CellKey, usize> = BTreeMap::new();
    let mut cells: Vec<Correspondence> = Vec::with_capacity(a.cells.len());
    for cell in &a.cells {
        match best.entry(cell.key()) {
            Entry::Occupied(slot) => {
                let kept = &mut cells[*slot.get()];
                if cell.confidence > kept.confidence {
                    kept.confidence = cell.confidence;
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(cells.len());
                cells.push(cell.clone());
            }
        }
    }
    Alignment { cells, ..a.clone() }
}
