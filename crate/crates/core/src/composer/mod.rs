//! Alignment composition: bridge detection, relation and confidence
//! composition, and the composition operator itself.

mod algebra;
mod bridge;
mod lexicon;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use algebra::{compose_confidence, compose_relations, AlgebraTable, ConfidenceStrategy};
pub(crate) use bridge::resolve_lexicon;
pub use bridge::{detect_bridges, label_similarity, Bridge, BridgeConfig, BridgeTier};
pub use lexicon::{load_lexicon, load_lexicon_with, Lexicon};

use crate::error::{Error, Result};
use crate::model::{merge_cells, Alignment, Correspondence, RelationSet};
use crate::network::CompositionPath;

/// Which composed relation sets become output cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelationSetPolicy {
    /// Only compositions that determine a single relation.
    #[default]
    SingletonOnly,
    /// Everything except Γ.
    DropGamma,
    KeepAll,
}

impl RelationSetPolicy {
    pub fn name(self) -> &'static str {
        match self {
            RelationSetPolicy::SingletonOnly => "singleton",
            RelationSetPolicy::DropGamma => "drop-gamma",
            RelationSetPolicy::KeepAll => "keep-all",
        }
    }

    pub fn admits(self, set: RelationSet) -> bool {
        match self {
            RelationSetPolicy::SingletonOnly => set.len() == 1,
            RelationSetPolicy::DropGamma => !set.is_empty() && !set.is_gamma(),
            RelationSetPolicy::KeepAll => !set.is_empty(),
        }
    }
}

impl fmt::Display for RelationSetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationSetPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "singleton" | "singleton-only" | "singleton_only" => {
                Ok(RelationSetPolicy::SingletonOnly)
            }
            "drop-gamma" | "drop_gamma" => Ok(RelationSetPolicy::DropGamma),
            "keep-all" | "keep_all" => Ok(RelationSetPolicy::KeepAll),
            other => Err(Error::Argument(format!(
                "unknown relation policy `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompositionPolicy {
    pub strategy: ConfidenceStrategy,
    pub relation_set_policy: RelationSetPolicy,
    pub bridge: BridgeConfig,
}

impl CompositionPolicy {
    pub fn with_strategy(&self, strategy: ConfidenceStrategy) -> Self {
        CompositionPolicy {
            strategy,
            ..self.clone()
        }
    }
}

pub mod meta {
    pub const SOURCE: &str = "composition-source";
    pub const PIVOT: &str = "composition-pivot";
    pub const TARGET: &str = "composition-target";
    pub const FIRST: &str = "composition-first";
    pub const SECOND: &str = "composition-second";
    pub const STRATEGY: &str = "confidence-strategy";
    pub const RELATIONS: &str = "relation-policy";
    pub const TIERS: &str = "bridge-tiers";
}

/// Composes the two oriented alignments of a path into a source→target
/// alignment.
pub fn compose_alignments(
    path: &CompositionPath,
    policy: &CompositionPolicy,
    lex: Option<&Lexicon>,
) -> Result<Alignment> {
    let first = &path.first;
    let second = &path.second;
    let bridges = detect_bridges(first, second, &policy.bridge, lex)?;
    let table = AlgebraTable::PRINTED;

    let mut cells = Vec::new();
    let mut tier_counts: BTreeMap<BridgeTier, usize> = BTreeMap::new();
    for bridge in &bridges {
        let c1 = &first.cells[bridge.first];
        let c2 = &second.cells[bridge.second];
        *tier_counts.entry(bridge.tier).or_default() += 1;

        let relations = table.compose_sets(c1.relation, c2.relation);
        if !policy.relation_set_policy.admits(relations) {
            continue;
        }
        let confidence = compose_confidence(policy.strategy, c1.confidence, c2.confidence)?;
        cells.push(Correspondence::new(
            c1.entity1.clone(),
            c2.entity2.clone(),
            relations,
            confidence,
        )?);
    }

    let mut out = Alignment::new(
        format!("{}+{}#{}", first.id, second.id, policy.strategy),
        path.source.clone(),
        path.target.clone(),
    );
    out.cells = cells;
    let m = &mut out.metadata;
    m.insert("level".into(), "0".into());
    m.insert("type".into(), "??".into());
    m.insert(meta::SOURCE.into(), path.source.uri().into());
    m.insert(meta::PIVOT.into(), path.pivot.uri().into());
    m.insert(meta::TARGET.into(), path.target.uri().into());
    m.insert(meta::FIRST.into(), first.id.clone());
    m.insert(meta::SECOND.into(), second.id.clone());
    m.insert(meta::STRATEGY.into(), policy.strategy.to_string());
    m.insert(
        meta::RELATIONS.into(),
        policy.relation_set_policy.to_string(),
    );
    m.insert(
        meta::TIERS.into(),
        BridgeTier::ALL
            .iter()
            .map(|t| format!("{t}={}", tier_counts.get(t).copied().unwrap_or(0)))
            .collect::<Vec<_>>()
            .join(" "),
    );
    Ok(merge_cells(&out))
}
