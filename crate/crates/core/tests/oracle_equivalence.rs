mod common;

use common::gen::{plain_cells, random_network, symbols_of};
use common::oracle::{self, SetPolicy, SYMBOLS, TABLE};
use indalign_core::composer::label_similarity;
use indalign_core::{
    build_network, compose_alignments, compose_confidence, compose_relations, enumerate_paths,
    AlgebraTable, CompositionPolicy, ConfidenceStrategy, Relation, RelationSet, RelationSetPolicy,
};
use proptest::prelude::*;

fn relation(sym: &str) -> Relation {
    Relation::from_symbol(sym).unwrap()
}

fn set_of(syms: &[&str]) -> RelationSet {
    syms.iter()
        .fold(RelationSet::EMPTY, |s, r| s.with(relation(r)))
}

#[test]
fn table_matches_transcription() {
    for (i, a) in SYMBOLS.iter().enumerate() {
        for (j, b) in SYMBOLS.iter().enumerate() {
            assert_eq!(
                compose_relations(relation(a), relation(b)),
                set_of(TABLE[i][j]),
                "{a} ∘ {b}"
            );
        }
    }
}

fn check_network(seed: u64, policy: RelationSetPolicy, oracle_policy: SetPolicy) {
    let net = random_network(seed, 60);
    let graph = build_network(net.alignments.clone()).unwrap();
    let paths = enumerate_paths(&graph, None);
    assert_eq!(
        paths.len(),
        oracle::path_count(net.nodes, &net.edges),
        "seed {seed}"
    );

    for path in &paths {
        let raw = |id: &str| {
            let base = id.strip_suffix("^-1").unwrap_or(id);
            net.alignments.iter().find(|a| a.id == base).unwrap()
        };
        let first = plain_cells(raw(&path.first.id), path.source.uri());
        let second = plain_cells(raw(&path.second.id), path.pivot.uri());
        let bridges = oracle::bridges(&first, &second, 0.9);
        for strategy in ConfidenceStrategy::ALL {
            let p = CompositionPolicy {
                strategy,
                relation_set_policy: policy,
                ..Default::default()
            };
            let got = compose_alignments(path, &p, None).unwrap();
            let want = oracle::compose_bridged(
                &first,
                &second,
                &bridges,
                strategy.short_name(),
                oracle_policy,
            );
            assert_eq!(got.cells.len(), want.len(), "seed {seed} {strategy}");
            for c in &got.cells {
                let key = (c.entity1.uri(), c.entity2.uri(), symbols_of(c.relation));
                let n = want
                    .get(&key)
                    .unwrap_or_else(|| panic!("seed {seed}: unexpected {key:?}"));
                assert!((n - c.confidence).abs() < 1e-12, "seed {seed} {key:?}");
            }
        }
    }
}

#[test]
fn random_networks_match_oracle() {
    for seed in 0..12 {
        check_network(seed, RelationSetPolicy::SingletonOnly, SetPolicy::Singleton);
    }
    for seed in 100..104 {
        check_network(seed, RelationSetPolicy::DropGamma, SetPolicy::DropGamma);
        check_network(seed, RelationSetPolicy::KeepAll, SetPolicy::KeepAll);
    }
}

fn symbol() -> impl Strategy<Value = &'static str> {
    prop::sample::select(SYMBOLS.to_vec())
}

proptest! {
    #[test]
    fn set_composition_is_union(a in prop::collection::vec(symbol(), 1..4), b in prop::collection::vec(symbol(), 1..4)) {
        let got = AlgebraTable::PRINTED.compose_sets(set_of(&a), set_of(&b));
        prop_assert_eq!(got, set_of(&oracle::compose_syms(&a, &b)));
    }

    #[test]
    fn confidence_formulas(n in 0.0f64..=1.0, m in 0.0f64..=1.0) {
        let mut values = Vec::new();
        for s in ConfidenceStrategy::ALL {
            let v = compose_confidence(s, n, m).unwrap();
            prop_assert!((v - oracle::confidence(s.short_name(), n, m)).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&v));
            values.push(v);
        }
        // ALL is max, min, mult, norm
        prop_assert!(values[3] <= values[2] && values[2] <= values[1] && values[1] <= values[0]);
    }

    #[test]
    fn similarity_matches_dp(a in "[a-zé ]{1,12}", b in "[a-zé ]{1,12}") {
        prop_assert!((label_similarity(&a, &b) - oracle::similarity(&a, &b)).abs() < 1e-12);
    }
}

#[test]
fn confidence_rejects_out_of_range() {
    assert!(compose_confidence(ConfidenceStrategy::Multiplication, 1.2, 0.5).is_err());
    assert!(compose_confidence(ConfidenceStrategy::Minimization, 0.5, -0.1).is_err());
}
