//! Brute-force reference implementations, written without touching the
//! library's internals. Shared by the core integration tests and the
//! acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeMap;

/// Relation symbols in the table's row/column order.
pub const SYMBOLS: [&str; 5] = ["=", ">", "<", "><", "%"];

/// Composition table transcribed cell by cell: `TABLE[first][second]`
/// lists the symbols of the composed relation.
pub const TABLE: [[&[&str]; 5]; 5] = [
    // first "="
    [&["="], &[">"], &["<"], &["><"], &["%"]],
    // first ">"
    [
        &[">"],
        &[">"],
        &[">", "<", "=", "><"],
        &[">", "><"],
        &[">", "><", "%"],
    ],
    // first "<"
    [
        &["<"],
        &["=", ">", "<", "><", "%"],
        &["<"],
        &["<", "><", "%"],
        &["%"],
    ],
    // first "><"
    [
        &["><"],
        &[">", "><", "%"],
        &["<", "><"],
        &["=", ">", "<", "><", "%"],
        &[">", "><", "%"],
    ],
    // first "%"
    [
        &["%"],
        &["%"],
        &["<", "><", "%"],
        &["<", "><", "%"],
        &["=", ">", "<", "><", "%"],
    ],
];

pub fn index(sym: &str) -> usize {
    SYMBOLS
        .iter()
        .position(|s| *s == sym)
        .expect("known symbol")
}

/// Sorted symbol list, deduplicated, in table order.
pub fn canonical(mut syms: Vec<&'static str>) -> Vec<&'static str> {
    syms.sort_by_key(|s| index(s));
    syms.dedup();
    syms
}

pub fn compose_syms(first: &[&str], second: &[&str]) -> Vec<&'static str> {
    let mut out = Vec::new();
    for a in first {
        for b in second {
            out.extend_from_slice(TABLE[index(a)][index(b)]);
        }
    }
    canonical(out)
}

pub fn confidence(strategy: &str, n: f64, m: f64) -> f64 {
    match strategy {
        "mult" => n * m,
        "norm" => n * m / 2.0,
        "max" => n.max(m),
        "min" => n.min(m),
        other => panic!("unknown strategy {other}"),
    }
}

/// Plain dynamic-programming edit distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for i in 1..=a.len() {
        let mut cur = vec![i; b.len() + 1];
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

thread_local! {
    static SIMILARITY_MEMO: std::cell::RefCell<std::collections::HashMap<(String, String), f64>> =
        Default::default();
}

/// `similarity`, memoized per thread; random networks reuse a small vocabulary.
pub fn similarity_memo(a: &str, b: &str) -> f64 {
    SIMILARITY_MEMO.with(|m| {
        let mut m = m.borrow_mut();
        if let Some(v) = m.get(&(a.to_owned(), b.to_owned())) {
            return *v;
        }
        let v = similarity(a, b);
        m.insert((a.to_owned(), b.to_owned()), v);
        v
    })
}

/// Label of a local name made of lowercase ASCII words joined by `_`.
pub fn simple_label(uri: &str) -> String {
    let local = uri.rsplit(['#', '/']).next().unwrap_or(uri);
    local
        .split('_')
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// A cell as plain data.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub e1: String,
    pub e2: String,
    pub rel: Vec<&'static str>,
    pub conf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetPolicy {
    Singleton,
    DropGamma,
    KeepAll,
}

/// Index pairs `(i, j)` where `first[i]` and `second[j]` share a pivot
/// entity: same URI, same label, or label similarity ≥ `threshold`.
pub fn bridges<'a>(first: &'a [Cell], second: &'a [Cell], threshold: f64) -> Vec<(usize, usize)> {
    // intern URIs and labels so each distinct pair is compared once
    let mut uris: BTreeMap<&'a str, usize> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut label_of: Vec<usize> = Vec::new();
    let mut intern = |uri: &'a str| -> usize {
        let next = uris.len();
        let id = *uris.entry(uri).or_insert(next);
        if id == next {
            let l = simple_label(uri);
            let k = labels.iter().position(|x| *x == l).unwrap_or_else(|| {
                labels.push(l);
                labels.len() - 1
            });
            label_of.push(k);
        }
        id
    };
    let left: Vec<usize> = first.iter().map(|c| intern(&c.e2)).collect();
    let right: Vec<usize> = second.iter().map(|c| intern(&c.e1)).collect();
    let label_match: Vec<Vec<bool>> = labels
        .iter()
        .map(|a| {
            labels
                .iter()
                .map(|b| {
                    !a.is_empty() && !b.is_empty() && (a == b || similarity_memo(a, b) >= threshold)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for (i, &u1) in left.iter().enumerate() {
        for (j, &u2) in right.iter().enumerate() {
            if u1 == u2 || label_match[label_of[u1]][label_of[u2]] {
                out.push((i, j));
            }
        }
    }
    out
}

pub type Composed<'a> = BTreeMap<(&'a str, &'a str, Vec<&'static str>), f64>;

/// Composes the bridged pairs; key → best confidence.
pub fn compose_bridged<'a>(
    first: &'a [Cell],
    second: &'a [Cell],
    bridges: &[(usize, usize)],
    strategy: &str,
    policy: SetPolicy,
) -> Composed<'a> {
    let mut out = Composed::new();
    for &(i, j) in bridges {
        let (c1, c2) = (&first[i], &second[j]);
        let rel = compose_syms(&c1.rel, &c2.rel);
        let admitted = match policy {
            SetPolicy::Singleton => rel.len() == 1,
            SetPolicy::DropGamma => rel.len() < 5,
            SetPolicy::KeepAll => true,
        };
        if !admitted {
            continue;
        }
        let n = confidence(strategy, c1.conf, c2.conf);
        let slot = out
            .entry((c1.e1.as_str(), c2.e2.as_str(), rel))
            .or_insert(n);
        if n > *slot {
            *slot = n;
        }
    }
    out
}

pub fn compose<'a>(
    first: &'a [Cell],
    second: &'a [Cell],
    strategy: &str,
    policy: SetPolicy,
    threshold: f64,
) -> Composed<'a> {
    compose_bridged(
        first,
        second,
        &bridges(first, second, threshold),
        strategy,
        policy,
    )
}

/// Ordered (source, pivot, target) triples of distinct nodes, each counted
/// once per pair of parallel edges.
pub fn path_count(nodes: usize, edges: &[(usize, usize)]) -> usize {
    let between = |a: usize, b: usize| {
        edges
            .iter()
            .filter(|&&(x, y)| (x == a && y == b) || (x == b && y == a))
            .count()
    };
    let mut total = 0;
    for s in 0..nodes {
        for p in 0..nodes {
            for t in 0..nodes {
                if s != p && p != t && s != t {
                    total += between(s, p) * between(p, t);
                }
            }
        }
    }
    total
}

/// Precision/recall by exact key match; 0 when the denominator is 0.
pub fn precision_recall<K: Ord>(found: &[K], reference: &[K]) -> (f64, f64) {
    let correct = found.iter().filter(|k| reference.contains(k)).count() as f64;
    let p = if found.is_empty() {
        0.0
    } else {
        correct / found.len() as f64
    };
    let r = if reference.is_empty() {
        0.0
    } else {
        correct / reference.len() as f64
    };
    (p, r)
}
