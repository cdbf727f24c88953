//! Seeded random ontology networks for oracle comparisons.
#![allow(dead_code)]

use indalign_core::{Alignment, Correspondence, EntityRef, OntologyRef, RelationSet};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use super::oracle::{Cell, SYMBOLS};

/// Words chosen so that some pairs land just above or below a 0.9 similarity.
const WORDS: &[&str] = &[
    "paper",
    "papers",
    "author",
    "review",
    "reviewer",
    "reviewers",
    "conference",
    "conferences",
    "organization",
    "organisation",
    "committee",
    "comittee",
    "chair",
    "event",
    "topic",
    "person",
];

pub struct Network {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub alignments: Vec<Alignment>,
}

pub fn onto_uri(i: usize) -> String {
    format!("http://example.org/o{i}#")
}

/// Local names: one or two words, in a few spellings that share a label.
fn entity_pool(rng: &mut StdRng, size: usize) -> Vec<String> {
    let mut pool = Vec::with_capacity(size);
    while pool.len() < size {
        let a = WORDS.choose(rng).unwrap();
        let name = if rng.gen_bool(0.5) {
            a.to_string()
        } else {
            let b = WORDS.choose(rng).unwrap();
            match rng.gen_range(0..3) {
                0 => format!("{a}_{b}"),
                1 => format!("{a}__{b}"),
                _ => format!("{}_{b}", a.to_ascii_uppercase()),
            }
        };
        if !pool.contains(&name) {
            pool.push(name);
        }
    }
    pool
}

/// 3 to 8 ontologies, a connected-ish random edge set with occasional
/// parallel edges, and at most `max_cells` cells per alignment.
pub fn random_network(seed: u64, max_cells: usize) -> Network {
    let mut rng = StdRng::seed_from_u64(seed);
    let nodes = rng.gen_range(3..=8);
    let pools: Vec<Vec<String>> = (0..nodes).map(|_| entity_pool(&mut rng, 24)).collect();

    let mut edges = Vec::new();
    for i in 1..nodes {
        let j = rng.gen_range(0..i);
        edges.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
    }
    for _ in 0..rng.gen_range(0..nodes) {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        if a != b {
            edges.push((a, b));
        }
    }

    let alignments = edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let n_cells = rng.gen_range(0..=max_cells);
            let cells = (0..n_cells)
                .map(|_| {
                    let e1 = format!("{}{}", onto_uri(a), pools[a].choose(&mut rng).unwrap());
                    let e2 = format!("{}{}", onto_uri(b), pools[b].choose(&mut rng).unwrap());
                    let rel = SYMBOLS[rng.gen_range(0..5)];
                    let conf = f64::from(rng.gen_range(0..=100u32)) / 100.0;
                    Correspondence::new(
                        EntityRef::new(e1).unwrap(),
                        EntityRef::new(e2).unwrap(),
                        RelationSet::parse(rel).unwrap(),
                        conf,
                    )
                    .unwrap()
                })
                .collect();
            Alignment::new(
                format!("a{k}"),
                OntologyRef::new(onto_uri(a)).unwrap(),
                OntologyRef::new(onto_uri(b)).unwrap(),
            )
            .with_cells(cells)
        })
        .collect();
    Network {
        nodes,
        edges,
        alignments,
    }
}

fn inverse_symbol(s: &str) -> &'static str {
    match s {
        ">" => "<",
        "<" => ">",
        "=" => "=",
        "><" => "><",
        _ => "%",
    }
}

/// Plain cells of `a` read in the `from` → `to` direction.
pub fn plain_cells(a: &Alignment, from: &str) -> Vec<Cell> {
    let forward = a.onto1.uri() == from;
    a.cells
        .iter()
        .map(|c| {
            let syms: Vec<&'static str> = SYMBOLS
                .iter()
                .copied()
                .filter(|s| {
                    RelationSet::parse(s).is_some_and(|r| c.relation.union(r) == c.relation)
                })
                .collect();
            if forward {
                Cell {
                    e1: c.entity1.uri().to_owned(),
                    e2: c.entity2.uri().to_owned(),
                    rel: syms,
                    conf: c.confidence,
                }
            } else {
                Cell {
                    e1: c.entity2.uri().to_owned(),
                    e2: c.entity1.uri().to_owned(),
                    rel: super::oracle::canonical(syms.into_iter().map(inverse_symbol).collect()),
                    conf: c.confidence,
                }
            }
        })
        .collect()
}

/// Relation set of a composed cell as canonical symbols.
pub fn symbols_of(set: RelationSet) -> Vec<&'static str> {
    SYMBOLS
        .iter()
        .copied()
        .filter(|s| RelationSet::parse(s).is_some_and(|r| set.union(r) == set))
        .collect()
}
