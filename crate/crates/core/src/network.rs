//! Ontology network built from a repository of alignments, and enumeration
//! of the two-step paths along which alignments can be composed.
//!
//! Alignments are treated as undirected edges. Orientation is fixed only when
//! a path is extracted, by inverting the stored alignment where needed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::format::{AlignmentReader, ParseMode, ParseOptions};
use crate::model::{invert_alignment, Alignment, OntologyRef};

pub const MANIFEST_FILE: &str = "network.toml";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub onto1: String,
    pub onto2: String,
    pub alignment: String,
}

#[derive(Debug, Clone, Default)]
pub struct OntologyNetwork {
    nodes: BTreeMap<String, OntologyRef>,
    edges: Vec<Edge>,
    alignments: BTreeMap<String, Alignment>,
    index: BTreeMap<(String, String), Vec<String>>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

impl OntologyNetwork {
    pub fn nodes(&self) -> impl Iterator<Item = &OntologyRef> {
        self.nodes.values()
    }

    pub fn node(&self, uri: &str) -> Option<&OntologyRef> {
        self.nodes.get(uri)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn alignment(&self, id: &str) -> Option<&Alignment> {
        self.alignments.get(id)
    }

    /// Ids of every alignment between `a` and `b`, in either direction.
    pub fn alignments_between(&self, a: &str, b: &str) -> &[String] {
        self.index.get(&pair_key(a, b)).map_or(&[], Vec::as_slice)
    }

    pub fn has_direct(&self, a: &str, b: &str) -> bool {
        !self.alignments_between(a, b).is_empty()
    }

    /// Resolves an ontology by exact URI, or failing that by its file-name tag.
    pub fn resolve(&self, uri_or_tag: &str) -> Option<&OntologyRef> {
        self.nodes.get(uri_or_tag).or_else(|| {
            let wanted = crate::model::uri_tag(uri_or_tag);
            let mut matches = self.nodes.values().filter(|o| o.tag() == wanted);
            let first = matches.next()?;
            matches.next().is_none().then_some(first)
        })
    }

    /// The alignment stored under `id`, turned to run from `from` to `to`.
    pub fn oriented(&self, id: &str, from: &str, to: &str) -> Option<Alignment> {
        let a = self.alignments.get(id)?;
        orient(a, from, to)
    }
}

/// `a` unchanged when it already runs `from`→`to`, inverted when it runs backwards.
pub fn orient(a: &Alignment, from: &str, to: &str) -> Option<Alignment> {
    if a.onto1.uri() == from && a.onto2.uri() == to {
        Some(a.clone())
    } else if a.onto1.uri() == to && a.onto2.uri() == from {
        Some(invert_alignment(a))
    } else {
        None
    }
}

pub fn build_network<I>(repository: I) -> Result<OntologyNetwork>
where
    I: IntoIterator<Item = Alignment>,
{
    let mut net = OntologyNetwork::default();
    for a in repository {
        if net.alignments.contains_key(&a.id) {
            return Err(Error::DuplicateId(a.id));
        }
        for onto in [&a.onto1, &a.onto2] {
            let slot = net
                .nodes
                .entry(onto.uri().to_owned())
                .or_insert_with(|| onto.clone());
            if slot.language_hint().is_none() && onto.language_hint().is_some() {
                *slot = onto.clone();
            }
        }
        net.edges.push(Edge {
            onto1: a.onto1.uri().to_owned(),
            onto2: a.onto2.uri().to_owned(),
            alignment: a.id.clone(),
        });
        net.index
            .entry(pair_key(a.onto1.uri(), a.onto2.uri()))
            .or_default()
            .push(a.id.clone());
        net.alignments.insert(a.id.clone(), a);
    }
    Ok(net)
}

/// A two-step path source → pivot → target with both alignments oriented
/// along it.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionPath {
    pub source: OntologyRef,
    pub pivot: OntologyRef,
    pub target: OntologyRef,
    pub first: Alignment,
    pub second: Alignment,
    /// The repository also holds a direct source–target alignment.
    pub has_direct: bool,
}

impl CompositionPath {
    /// Builds a path from two alignments sharing exactly one ontology.
    pub fn from_pair(a: &Alignment, b: &Alignment, has_direct: bool) -> Result<Self> {
        let ends_a = [a.onto1.clone(), a.onto2.clone()];
        let ends_b = [b.onto1.clone(), b.onto2.clone()];
        let shared: BTreeSet<&OntologyRef> = ends_a.iter().filter(|o| ends_b.contains(o)).collect();
        let [pivot] = shared.into_iter().collect::<Vec<_>>()[..] else {
            return Err(Error::Argument(format!(
                "alignments `{}` and `{}` do not share exactly one ontology",
                a.id, b.id
            )));
        };
        let source = ends_a.iter().find(|o| *o != pivot).cloned();
        let target = ends_b.iter().find(|o| *o != pivot).cloned();
        let (Some(source), Some(target)) = (source, target) else {
            return Err(Error::Argument("self-alignments cannot be composed".into()));
        };
        if source == target {
            return Err(Error::Argument(format!(
                "alignments `{}` and `{}` relate the same two ontologies",
                a.id, b.id
            )));
        }
        let first = orient(a, source.uri(), pivot.uri()).expect("pivot and source are ends of a");
        let second = orient(b, pivot.uri(), target.uri()).expect("pivot and target are ends of b");
        Ok(CompositionPath {
            source,
            pivot: pivot.clone(),
            target,
            first,
            second,
            has_direct,
        })
    }
}

/// Every ordered (source, pivot, target) triple of distinct ontologies joined
/// by an edge on each step, one path per pair of parallel edges. Sorted by
/// (source, pivot, target, first id, second id).
pub fn enumerate_paths(
    net: &OntologyNetwork,
    filter: Option<(&str, &str)>,
) -> Vec<CompositionPath> {
    let mut adjacency: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for e in &net.edges {
        if e.onto1 == e.onto2 {
            continue;
        }
        adjacency
            .entry(&e.onto2)
            .or_default()
            .push((&e.onto1, &e.alignment));
        adjacency
            .entry(&e.onto1)
            .or_default()
            .push((&e.onto2, &e.alignment));
    }
    let mut keys: Vec<(&str, &str, &str, &str, &str)> = Vec::new();
    for (&pivot, neighbours) in &adjacency {
        for &(source, first) in neighbours {
            if filter.is_some_and(|(s, _)| s != source) {
                continue;
            }
            for &(target, second) in neighbours {
                if target == source || filter.is_some_and(|(_, t)| t != target) {
                    continue;
                }
                keys.push((source, pivot, target, first, second));
            }
        }
    }
    keys.sort_unstable();
    keys.into_iter()
        .map(|(source, pivot, target, first, second)| CompositionPath {
            source: net.nodes[source].clone(),
            pivot: net.nodes[pivot].clone(),
            target: net.nodes[target].clone(),
            first: net.oriented(first, source, pivot).expect("edge endpoints"),
            second: net.oriented(second, pivot, target).expect("edge endpoints"),
            has_direct: net.has_direct(source, target),
        })
        .collect()
}

#[derive(Debug, Default, Deserialize)]
struct Manifest {
    #[serde(default)]
    ids: BTreeMap<String, String>,
    #[serde(default)]
    languages: BTreeMap<String, String>,
}

/// Alignments loaded from a directory of `.rdf`/`.xml` files.
#[derive(Debug, Clone, Default)]
pub struct Repository {
    pub alignments: Vec<Alignment>,
    /// Files skipped or repaired in lenient mode, with the reason.
    pub warnings: Vec<(PathBuf, String)>,
}

impl Repository {
    /// Ids are file names relative to `dir` unless `network.toml` renames them.
    pub fn load(dir: &Path, opts: &ParseOptions) -> Result<Self> {
        let reader = AlignmentReader::new(opts.clone())?;
        let manifest = read_manifest(dir)?;
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension().and_then(|e| e.to_str()).is_some_and(|e| {
                        e.eq_ignore_ascii_case("rdf") || e.eq_ignore_ascii_case("xml")
                    })
            })
            .collect();
        files.sort();

        let mut repo = Repository::default();
        for path in files {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let (mut alignment, warnings) = match reader.parse_with_warnings(&bytes) {
                Ok(parsed) => parsed,
                Err(e) if opts.mode == ParseMode::Lenient => {
                    repo.warnings.push((path, format!("skipped: {e}")));
                    continue;
                }
                Err(e) => {
                    return Err(Error::InFile {
                        path,
                        source: Box::new(e),
                    })
                }
            };
            for w in warnings {
                repo.warnings
                    .push((path.clone(), w.render(&path.display().to_string())));
            }
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            alignment.id = manifest.ids.get(&name).cloned().unwrap_or(name);
            for onto in [&mut alignment.onto1, &mut alignment.onto2] {
                if let Some(lang) = manifest.languages.get(onto.uri()) {
                    *onto = onto.clone().with_language(Some(lang.clone()));
                }
            }
            repo.alignments.push(alignment);
        }
        Ok(repo)
    }

    pub fn get(&self, id: &str) -> Option<&Alignment> {
        self.alignments.iter().find(|a| a.id == id)
    }

    pub fn network(&self) -> Result<OntologyNetwork> {
        build_network(self.alignments.iter().cloned())
    }
}

fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() {
        return Ok(Manifest::default());
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Correspondence, EntityRef, Relation};

    fn onto(n: usize) -> OntologyRef {
        OntologyRef::new(format!("http://o{n}#")).unwrap()
    }

    fn edge(id: &str, a: usize, b: usize) -> Alignment {
        Alignment::new(id, onto(a), onto(b)).with_cells(vec![Correspondence::new(
            EntityRef::new(format!("http://o{a}#x")).unwrap(),
            EntityRef::new(format!("http://o{b}#y")).unwrap(),
            Relation::MoreGeneral,
            0.5,
        )
        .unwrap()])
    }

    fn triples(paths: &[CompositionPath]) -> Vec<(String, String, String, bool)> {
        paths
            .iter()
            .map(|p| (p.source.tag(), p.pivot.tag(), p.target.tag(), p.has_direct))
            .collect()
    }

    #[test]
    fn build_examples() {
        let net = build_network(vec![edge("a", 1, 2), edge("b", 2, 3)]).unwrap();
        assert_eq!(net.node_count(), 3);
        assert_eq!(net.edges().len(), 2);
        assert_eq!(build_network(Vec::new()).unwrap().node_count(), 0);

        let net = build_network(vec![edge("a", 1, 2), edge("b", 2, 1)]).unwrap();
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edges().len(), 2);
        assert_eq!(net.alignments_between("http://o2#", "http://o1#").len(), 2);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = build_network(vec![edge("a", 1, 2), edge("a", 2, 3)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateId(id) if id == "a"));
    }

    #[test]
    fn chain_yields_both_directions() {
        let net = build_network(vec![edge("a", 1, 2), edge("b", 2, 3)]).unwrap();
        let paths = enumerate_paths(&net, None);
        assert_eq!(
            triples(&paths),
            vec![
                ("o1".into(), "o2".into(), "o3".into(), false),
                ("o3".into(), "o2".into(), "o1".into(), false),
            ]
        );
        // (o3, o2, o1) needs both stored alignments inverted
        let back = &paths[1];
        assert_eq!(back.first.onto1.uri(), "http://o3#");
        assert_eq!(back.first.cells[0].relation, Relation::LessGeneral.into());
        for p in &paths {
            assert_eq!(p.first.onto2, p.second.onto1);
            assert_eq!(p.first.onto1, p.source);
            assert_eq!(p.second.onto2, p.target);
        }
    }

    #[test]
    fn triangle_yields_six_paths() {
        let net = build_network(vec![edge("a", 1, 2), edge("b", 2, 3), edge("c", 1, 3)]).unwrap();
        let paths = enumerate_paths(&net, None);
        assert_eq!(paths.len(), 6);
        assert!(paths.iter().all(|p| p.has_direct));
        let pivot_o2 = paths.iter().filter(|p| p.pivot.tag() == "o2").count();
        assert_eq!(pivot_o2, 2);
    }

    #[test]
    fn single_edge_has_no_paths() {
        let net = build_network(vec![edge("a", 1, 2)]).unwrap();
        assert!(enumerate_paths(&net, None).is_empty());
    }

    #[test]
    fn parallel_edges_multiply_paths() {
        let net = build_network(vec![
            edge("aml", 1, 2),
            edge("logmap", 1, 2),
            edge("b", 2, 3),
        ])
        .unwrap();
        let paths = enumerate_paths(&net, Some(("http://o1#", "http://o3#")));
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].first.id, "aml");
        assert_eq!(paths[1].first.id, "logmap");
    }

    #[test]
    fn from_pair_orients() {
        let p = CompositionPath::from_pair(&edge("a", 2, 1), &edge("b", 3, 2), false).unwrap();
        assert_eq!(p.source.uri(), "http://o1#");
        assert_eq!(p.pivot.uri(), "http://o2#");
        assert_eq!(p.target.uri(), "http://o3#");
        assert!(CompositionPath::from_pair(&edge("a", 1, 2), &edge("b", 3, 4), false).is_err());
        assert!(CompositionPath::from_pair(&edge("a", 1, 2), &edge("b", 2, 1), false).is_err());
    }

    #[test]
    fn resolve_by_tag() {
        let net = build_network(vec![edge("a", 1, 2)]).unwrap();
        assert_eq!(net.resolve("o1").unwrap().uri(), "http://o1#");
        assert_eq!(net.resolve("http://o2#").unwrap().uri(), "http://o2#");
        assert!(net.resolve("o9").is_none());
    }
}
