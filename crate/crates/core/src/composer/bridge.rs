use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use crate::composer::lexicon::{load_lexicon, Lexicon};
use crate::error::{Error, Result};
use crate::model::{Alignment, Correspondence};

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeConfig {
    pub similarity_threshold: f64,
    pub use_lexicon: bool,
    pub lexicon_path: Option<PathBuf>,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        BridgeConfig {
            similarity_threshold: 0.9,
            use_lexicon: false,
            lexicon_path: None,
        }
    }
}

/// How a bridge entity was recognized. Tiers are tried in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BridgeTier {
    ExactUri = 1,
    Label = 2,
    Similarity = 3,
    Lexicon = 4,
}

impl BridgeTier {
    pub const ALL: [BridgeTier; 4] = [
        BridgeTier::ExactUri,
        BridgeTier::Label,
        BridgeTier::Similarity,
        BridgeTier::Lexicon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BridgeTier::ExactUri => "exact",
            BridgeTier::Label => "label",
            BridgeTier::Similarity => "similarity",
            BridgeTier::Lexicon => "lexicon",
        }
    }
}

impl fmt::Display for BridgeTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A pair of cells linked through a pivot entity: `first.cells[first]`
/// reaches the pivot, `second.cells[second]` leaves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bridge {
    pub first: usize,
    pub second: usize,
    pub tier: BridgeTier,
}

/// `1 - levenshtein / max char length`; two empty strings are identical.
pub fn label_similarity(a: &str, b: &str) -> f64 {
    strsim::normalized_levenshtein(a, b)
}

/// Resolves the lexicon the configuration asks for, if any.
pub(crate) fn resolve_lexicon<'a>(
    cfg: &BridgeConfig,
    lex: Option<&'a Lexicon>,
) -> Result<Option<std::borrow::Cow<'a, Lexicon>>> {
    if !cfg.use_lexicon {
        return Ok(None);
    }
    match (lex, &cfg.lexicon_path) {
        (Some(l), _) => Ok(Some(std::borrow::Cow::Borrowed(l))),
        (None, Some(path)) => load_lexicon(path)
            .map(|l| Some(std::borrow::Cow::Owned(l)))
            .map_err(|e| Error::Config(format!("cannot load lexicon: {e}"))),
        (None, None) => Err(Error::Config(
            "lexicon matching requested but no lexicon supplied".into(),
        )),
    }
}

fn check_config(cfg: &BridgeConfig) -> Result<()> {
    if !(0.0..=1.0).contains(&cfg.similarity_threshold) {
        return Err(Error::Config(format!(
            "similarity threshold {} outside [0,1]",
            cfg.similarity_threshold
        )));
    }
    Ok(())
}

/// Emits every (c1, c2) pair whose pivot entities match, tagged with the
/// first tier that matched. Sorted by cell indices.
pub fn detect_bridges(
    first: &Alignment,
    second: &Alignment,
    cfg: &BridgeConfig,
    lex: Option<&Lexicon>,
) -> Result<Vec<Bridge>> {
    check_config(cfg)?;
    let lexicon = resolve_lexicon(cfg, lex)?;
    Ok(BridgeIndex::new(&second.cells).bridges(&first.cells, cfg, lexicon.as_deref()))
}

/// Second-side cells indexed by pivot URI and by distinct pivot label.
struct BridgeIndex<'a> {
    len: usize,
    by_uri: HashMap<&'a str, Vec<usize>>,
    labels: Vec<LabelGroup<'a>>,
}

struct LabelGroup<'a> {
    label: &'a str,
    chars: usize,
    cells: Vec<usize>,
}

impl<'a> BridgeIndex<'a> {
    fn new(cells: &'a [Correspondence]) -> Self {
        let mut by_uri: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut by_label: HashMap<&str, usize> = HashMap::new();
        let mut labels: Vec<LabelGroup> = Vec::new();
        for (j, c) in cells.iter().enumerate() {
            by_uri.entry(c.entity1.uri()).or_default().push(j);
            let label = c.entity1.normalized_label();
            if label.is_empty() {
                continue;
            }
            let k = *by_label.entry(label).or_insert_with(|| {
                labels.push(LabelGroup {
                    label,
                    chars: label.chars().count(),
                    cells: Vec::new(),
                });
                labels.len() - 1
            });
            labels[k].cells.push(j);
        }
        BridgeIndex {
            len: cells.len(),
            by_uri,
            labels,
        }
    }

    fn bridges(
        &self,
        first: &[Correspondence],
        cfg: &BridgeConfig,
        lexicon: Option<&Lexicon>,
    ) -> Vec<Bridge> {
        // Label tier per distinct (first label, second label group).
        let mut label_tiers: HashMap<&str, Vec<Option<BridgeTier>>> = HashMap::new();
        let mut out = Vec::new();
        let mut tiers: Vec<Option<BridgeTier>> = Vec::new();
        for (i, c1) in first.iter().enumerate() {
            tiers.clear();
            tiers.resize(self.len, None);
            if let Some(js) = self.by_uri.get(c1.entity2.uri()) {
                for &j in js {
                    tiers[j] = Some(BridgeTier::ExactUri);
                }
            }
            let label = c1.entity2.normalized_label();
            if !label.is_empty() {
                let per_group = label_tiers
                    .entry(label)
                    .or_insert_with(|| self.label_tiers(label, cfg, lexicon));
                for (group, tier) in self.labels.iter().zip(per_group.iter()) {
                    let Some(tier) = tier else { continue };
                    for &j in &group.cells {
                        if tiers[j].is_none() {
                            tiers[j] = Some(*tier);
                        }
                    }
                }
            }
            out.extend(tiers.iter().enumerate().filter_map(|(j, t)| {
                t.map(|tier| Bridge {
                    first: i,
                    second: j,
                    tier,
                })
            }));
        }
        out
    }

    fn label_tiers(
        &self,
        label: &str,
        cfg: &BridgeConfig,
        lexicon: Option<&Lexicon>,
    ) -> Vec<Option<BridgeTier>> {
        let len = label.chars().count();
        let slack = 1.0 - cfg.similarity_threshold;
        self.labels
            .iter()
            .map(|group| {
                if group.label == label {
                    return Some(BridgeTier::Label);
                }
                // Levenshtein distance is at least the length difference.
                let longest = len.max(group.chars) as f64;
                let reachable = (len.abs_diff(group.chars) as f64) <= slack * longest + 1e-9;
                if reachable && label_similarity(label, group.label) >= cfg.similarity_threshold {
                    return Some(BridgeTier::Similarity);
                }
                if lexicon.is_some_and(|l| l.are_synonyms(label, group.label)) {
                    return Some(BridgeTier::Lexicon);
                }
                None
            })
            .collect()
    }
}
