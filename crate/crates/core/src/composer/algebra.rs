use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Relation, RelationSet};

const EQ: u8 = 1 << 0;
const GT: u8 = 1 << 1;
const LT: u8 = 1 << 2;
const OV: u8 = 1 << 3;
const DJ: u8 = 1 << 4;
const ALL: u8 = EQ | GT | LT | OV | DJ;

const fn set(bits: u8) -> RelationSet {
    RelationSet::from_bits(bits)
}

/// Relation composition table indexed by (first relation, second relation)
/// in the order `=`, `>`, `<`, `><`, `%`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraTable {
    cells: [[RelationSet; 5]; 5],
}

impl AlgebraTable {
    /// The composition table as published, asymmetric cells included:
    /// `(<, >)` is Γ while `(>, <)` is `{=, >, <, ><}`, and `(%, >)` is `{%}`
    /// while `(>, %)` is `{>, ><, %}`. Replace this constant to adopt a
    /// corrected table.
    pub const PRINTED: AlgebraTable = AlgebraTable {
        cells: [
            // =
            [set(EQ), set(GT), set(LT), set(OV), set(DJ)],
            // >
            [
                set(GT),
                set(GT),
                set(GT | LT | EQ | OV),
                set(GT | OV),
                set(GT | OV | DJ),
            ],
            // <
            [set(LT), set(ALL), set(LT), set(LT | OV | DJ), set(DJ)],
            // ><
            [
                set(OV),
                set(GT | OV | DJ),
                set(LT | OV),
                set(ALL),
                set(GT | OV | DJ),
            ],
            // %
            [
                set(DJ),
                set(DJ),
                set(LT | OV | DJ),
                set(LT | OV | DJ),
                set(ALL),
            ],
        ],
    };

    pub const fn from_cells(cells: [[RelationSet; 5]; 5]) -> Self {
        AlgebraTable { cells }
    }

    pub fn compose(&self, first: Relation, second: Relation) -> RelationSet {
        self.cells[first as usize][second as usize]
    }

    /// Union of the cells over every member pair.
    pub fn compose_sets(&self, first: RelationSet, second: RelationSet) -> RelationSet {
        let mut out = RelationSet::EMPTY;
        for r in first.iter() {
            for r2 in second.iter() {
                out = out.union(self.compose(r, r2));
            }
        }
        out
    }
}

impl Default for AlgebraTable {
    fn default() -> Self {
        AlgebraTable::PRINTED
    }
}

pub fn compose_relations(first: Relation, second: Relation) -> RelationSet {
    AlgebraTable::PRINTED.compose(first, second)
}

/// How two confidence values combine along a composition path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum ConfidenceStrategy {
    Multiplication,
    Normalization,
    #[default]
    Maximization,
    Minimization,
}

impl ConfidenceStrategy {
    /// Reporting order: max, min, mult, norm.
    pub const ALL: [ConfidenceStrategy; 4] = [
        ConfidenceStrategy::Maximization,
        ConfidenceStrategy::Minimization,
        ConfidenceStrategy::Multiplication,
        ConfidenceStrategy::Normalization,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ConfidenceStrategy::Multiplication => "mult",
            ConfidenceStrategy::Normalization => "norm",
            ConfidenceStrategy::Maximization => "max",
            ConfidenceStrategy::Minimization => "min",
        }
    }

    /// Unchecked formula; see [`compose_confidence`] for the validated form.
    pub fn apply(self, n: f64, n2: f64) -> f64 {
        match self {
            ConfidenceStrategy::Multiplication => n * n2,
            ConfidenceStrategy::Normalization => n * n2 / 2.0,
            ConfidenceStrategy::Maximization => n.max(n2),
            ConfidenceStrategy::Minimization => n.min(n2),
        }
    }
}

impl fmt::Display for ConfidenceStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ConfidenceStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mult" | "multiplication" => Ok(ConfidenceStrategy::Multiplication),
            "norm" | "normalization" => Ok(ConfidenceStrategy::Normalization),
            "max" | "maximization" => Ok(ConfidenceStrategy::Maximization),
            "min" | "minimization" => Ok(ConfidenceStrategy::Minimization),
            other => Err(Error::Argument(format!(
                "unknown confidence strategy `{other}`"
            ))),
        }
    }
}

pub fn compose_confidence(strategy: ConfidenceStrategy, n: f64, n2: f64) -> Result<f64> {
    for v in [n, n2] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Argument(format!("confidence {v} outside [0,1]")));
        }
    }
    Ok(strategy.apply(n, n2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Relation::*;

    fn s(rs: &[Relation]) -> RelationSet {
        RelationSet::of(rs)
    }

    /// Table transcribed row by row from the published composition table.
    fn published() -> [[RelationSet; 5]; 5] {
        let g = RelationSet::GAMMA;
        [
            [
                s(&[Equivalence]),
                s(&[MoreGeneral]),
                s(&[LessGeneral]),
                s(&[Overlap]),
                s(&[Disjoint]),
            ],
            [
                s(&[MoreGeneral]),
                s(&[MoreGeneral]),
                s(&[MoreGeneral, LessGeneral, Equivalence, Overlap]),
                s(&[MoreGeneral, Overlap]),
                s(&[MoreGeneral, Overlap, Disjoint]),
            ],
            [
                s(&[LessGeneral]),
                g,
                s(&[LessGeneral]),
                s(&[LessGeneral, Overlap, Disjoint]),
                s(&[Disjoint]),
            ],
            [
                s(&[Overlap]),
                s(&[MoreGeneral, Overlap, Disjoint]),
                s(&[LessGeneral, Overlap]),
                g,
                s(&[MoreGeneral, Overlap, Disjoint]),
            ],
            [
                s(&[Disjoint]),
                s(&[Disjoint]),
                s(&[LessGeneral, Overlap, Disjoint]),
                s(&[LessGeneral, Overlap, Disjoint]),
                g,
            ],
        ]
    }

    #[test]
    fn all_cells_match_published_table() {
        let expected = published();
        for (i, r) in Relation::ALL.into_iter().enumerate() {
            for (j, r2) in Relation::ALL.into_iter().enumerate() {
                assert_eq!(compose_relations(r, r2), expected[i][j], "cell ({r}, {r2})");
            }
        }
    }

    #[test]
    fn named_examples() {
        assert_eq!(
            compose_relations(Equivalence, MoreGeneral),
            s(&[MoreGeneral])
        );
        assert_eq!(
            compose_relations(MoreGeneral, LessGeneral),
            s(&[MoreGeneral, LessGeneral, Equivalence, Overlap])
        );
        assert_eq!(
            compose_relations(LessGeneral, MoreGeneral),
            RelationSet::GAMMA
        );
        assert_eq!(compose_relations(Disjoint, Disjoint), RelationSet::GAMMA);
        assert_eq!(compose_relations(Disjoint, MoreGeneral), s(&[Disjoint]));
        assert_eq!(
            compose_relations(MoreGeneral, Disjoint),
            s(&[MoreGeneral, Overlap, Disjoint])
        );
    }

    #[test]
    fn identity_and_non_empty() {
        for r in Relation::ALL {
            assert_eq!(compose_relations(Equivalence, r), r.into());
            assert_eq!(compose_relations(r, Equivalence), r.into());
            for r2 in Relation::ALL {
                assert!(!compose_relations(r, r2).is_empty());
            }
        }
    }

    #[test]
    fn set_composition_is_union() {
        let t = AlgebraTable::PRINTED;
        let first = s(&[Equivalence, MoreGeneral]);
        assert_eq!(t.compose_sets(first, Equivalence.into()), first);
        assert_eq!(t.compose_sets(first, MoreGeneral.into()), s(&[MoreGeneral]));
    }

    #[test]
    fn confidence_examples() {
        use ConfidenceStrategy::*;
        let c = |st, a, b| compose_confidence(st, a, b).unwrap();
        assert!((c(Multiplication, 0.8, 0.5) - 0.40).abs() < 1e-12);
        assert!((c(Normalization, 0.8, 0.5) - 0.20).abs() < 1e-12);
        assert_eq!(c(Maximization, 0.8, 0.5), 0.8);
        assert_eq!(c(Minimization, 0.8, 0.5), 0.5);
        assert_eq!(c(Multiplication, 1.0, 1.0), 1.0);
        assert_eq!(c(Normalization, 1.0, 1.0), 0.5);
        assert_eq!(c(Maximization, 1.0, 1.0), 1.0);
        assert_eq!(c(Minimization, 1.0, 1.0), 1.0);
        assert!(compose_confidence(Maximization, 1.2, 0.5).is_err());
        assert!(compose_confidence(Maximization, 0.5, -0.1).is_err());
    }

    #[test]
    fn strategy_names() {
        for st in ConfidenceStrategy::ALL {
            assert_eq!(st.short_name().parse::<ConfidenceStrategy>().unwrap(), st);
        }
        assert_eq!(
            "Multiplication".parse::<ConfidenceStrategy>().unwrap(),
            ConfidenceStrategy::Multiplication
        );
        assert!("avg".parse::<ConfidenceStrategy>().is_err());
    }
}
