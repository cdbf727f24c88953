use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::label::LabelNormalizer;

/// Offline synonym dictionary over normalized labels.
///
/// Closure is symmetric but deliberately not transitive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    synonyms: BTreeMap<String, BTreeSet<String>>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: &str, b: &str, normalizer: &LabelNormalizer) {
        let (a, b) = (normalizer.normalize(a), normalizer.normalize(b));
        if a.is_empty() || b.is_empty() || a == b {
            return;
        }
        self.synonyms
            .entry(a.clone())
            .or_default()
            .insert(b.clone());
        self.synonyms.entry(b).or_default().insert(a);
    }

    /// Lines are `label<TAB>label`; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, normalizer: &LabelNormalizer) -> Result<Self> {
        let mut lex = Lexicon::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                    lex.insert(a, b, normalizer)
                }
                _ => {
                    return Err(Error::Config(format!(
                        "lexicon line {}: expected two labels separated by one TAB",
                        i + 1
                    )))
                }
            }
        }
        Ok(lex)
    }

    pub fn lookup(&self, label: &str) -> impl Iterator<Item = &str> {
        self.synonyms
            .get(label)
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.synonyms.get(a).is_some_and(|s| s.contains(b))
    }

    pub fn len(&self) -> usize {
        self.synonyms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synonyms.is_empty()
    }
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    load_lexicon_with(path, &LabelNormalizer::default())
}

pub fn load_lexicon_with(path: &Path, normalizer: &LabelNormalizer) -> Result<Lexicon> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Lexicon::parse(&text, normalizer).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        e => e,
    })
}
