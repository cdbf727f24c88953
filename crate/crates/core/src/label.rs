//! Label preprocessing for entity names.
//!
//! Labels are compared after a fixed pipeline: compatibility decomposition,
//! diacritic stripping, case-boundary tokenization, lowercasing, stopword
//! removal and removal of every non-alphanumeric character.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Normalizes labels with an optional stopword list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelNormalizer {
    stopwords: BTreeSet<String>,
}

impl LabelNormalizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stopwords are themselves normalized so that "The" and "the" match the same token.
    pub fn with_stopwords<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let plain = LabelNormalizer::new();
        let stopwords = words
            .into_iter()
            .flat_map(|w| {
                plain
                    .normalize(w.as_ref())
                    .split(' ')
                    .map(str::to_owned)
                    .collect::<Vec<_>>()
            })
            .filter(|w| !w.is_empty())
            .collect();
        LabelNormalizer { stopwords }
    }

    /// Loads a stopword file: one word per line, `#` starts a comment line.
    pub fn from_stopword_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::with_stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn stopwords(&self) -> impl Iterator<Item = &str> {
        self.stopwords.iter().map(String::as_str)
    }

    pub fn normalize(&self, raw: &str) -> String {
        let stripped: String = raw.nfkd().filter(|c| !is_combining_mark(*c)).collect();
        let mut out = String::with_capacity(stripped.len());
        for token in split_tokens(&stripped) {
            let lowered: String = token
                .to_lowercase()
                .nfkd()
                .filter(|c| !is_combining_mark(*c))
                .flat_map(char::to_lowercase)
                .filter(|c| c.is_alphanumeric())
                .collect();
            if lowered.is_empty() || self.stopwords.contains(&lowered) {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&lowered);
        }
        out
    }
}

/// Normalizes with an empty stopword list.
pub fn normalize_label(raw: &str) -> String {
    LabelNormalizer::new().normalize(raw)
}

/// Splits on non-alphanumeric characters and on camelCase boundaries
/// (`aB` and `ABc` → `A|Bc`).
fn split_tokens(s: &str) -> Vec<&str> {
    let mut tokens = Vec::new();
    for word in s.split(|c: char| !c.is_alphanumeric()) {
        if word.is_empty() {
            continue;
        }
        let chars: Vec<(usize, char)> = word.char_indices().collect();
        let mut start = 0;
        for i in 1..chars.len() {
            let (idx, cur) = chars[i];
            let prev = chars[i - 1].1;
            let next = chars.get(i + 1).map(|&(_, c)| c);
            let boundary = (prev.is_lowercase() && cur.is_uppercase())
                || (prev.is_uppercase()
                    && cur.is_uppercase()
                    && next.is_some_and(char::is_lowercase));
            if boundary {
                tokens.push(&word[start..idx]);
                start = idx;
            }
        }
        tokens.push(&word[start..]);
    }
    tokens
}
