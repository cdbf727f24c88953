//! Precision/recall scoring against reference alignments and batch scenario runs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::composer::{compose_alignments, CompositionPolicy, ConfidenceStrategy, Lexicon};
use crate::error::{Error, Result};
use crate::model::{invert_alignment, trim, Alignment, CellKey, Correspondence};
use crate::network::{CompositionPath, Repository};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_found: usize,
    pub n_expected: usize,
    pub n_correct: usize,
    pub precision: f64,
    pub recall: f64,
    /// Nothing was found, so precision is reported as 0.
    pub precision_undefined: bool,
    /// The reference is empty, so recall is reported as 0.
    pub recall_undefined: bool,
    pub missing: Vec<Correspondence>,
    pub spurious: Vec<Correspondence>,
}

impl EvalReport {
    /// `P=0.67 R=0.50`, with `(undefined)` markers where a denominator was zero.
    pub fn summary(&self) -> String {
        let mark = |undefined: bool| if undefined { " (undefined)" } else { "" };
        format!(
            "P={:.2}{} R={:.2}{}",
            self.precision,
            mark(self.precision_undefined),
            self.recall,
            mark(self.recall_undefined)
        )
    }
}

/// Distinct cells by key, first occurrence wins, sorted by key.
fn distinct_cells(a: &Alignment) -> Vec<(CellKey, &Correspondence)> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<_> = a
        .cells
        .iter()
        .filter_map(|c| {
            let key = c.key();
            seen.insert(key.clone()).then_some((key, c))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Scores `found` against `reference`. A found cell is correct when the
/// reference holds the same (entity1, entity2, relation); confidences are
/// ignored. A reference stored in the opposite direction is inverted first.
pub fn evaluate(found: &Alignment, reference: &Alignment) -> Result<EvalReport> {
    let inverted;
    let reference = if found.onto1 == reference.onto1 && found.onto2 == reference.onto2 {
        reference
    } else if found.onto1 == reference.onto2 && found.onto2 == reference.onto1 {
        inverted = invert_alignment(reference);
        &inverted
    } else {
        return Err(Error::Evaluation(format!(
            "found alignment relates {} and {}, reference relates {} and {}",
            found.onto1, found.onto2, reference.onto1, reference.onto2
        )));
    };

    let found_cells = distinct_cells(found);
    let expected_cells = distinct_cells(reference);
    let found_keys: BTreeSet<&CellKey> = found_cells.iter().map(|(k, _)| k).collect();
    let expected_keys: BTreeSet<&CellKey> = expected_cells.iter().map(|(k, _)| k).collect();

    let n_found = found_cells.len();
    let n_expected = expected_cells.len();
    let n_correct = found_keys.intersection(&expected_keys).count();
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };

    Ok(EvalReport {
        n_found,
        n_expected,
        n_correct,
        precision: ratio(n_correct, n_found),
        recall: ratio(n_correct, n_expected),
        precision_undefined: n_found == 0,
        recall_undefined: n_expected == 0,
        missing: expected_cells
            .iter()
            .filter(|(k, _)| !found_keys.contains(k))
            .map(|(_, c)| (*c).clone())
            .collect(),
        spurious: found_cells
            .iter()
            .filter(|(k, _)| !expected_keys.contains(k))
            .map(|(_, c)| (*c).clone())
            .collect(),
    })
}

/// One scenario line: compose `first` with `second`, score against `reference`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRow {
    /// 1-based line number in the scenario file.
    pub line: usize,
    pub first: String,
    pub second: String,
    pub reference: String,
    /// `None` runs all four strategies.
    pub strategy: Option<ConfidenceStrategy>,
    pub threshold: Option<f64>,
}

impl ScenarioRow {
    pub fn strategies(&self) -> Vec<ConfidenceStrategy> {
        match self.strategy {
            Some(s) => vec![s],
            None => ConfidenceStrategy::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioSpec {
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioSpec {
    /// `first<TAB>second<TAB>reference<TAB>strategy|ALL<TAB>threshold`.
    /// Threshold `-`, `none` or empty means no trimming. Blank and `#` lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Scenario { line, message };
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(bad(format!(
                    "expected 5 TAB-separated fields, found {}",
                    fields.len()
                )));
            }
            if fields[..3].iter().any(|f| f.is_empty()) {
                return Err(bad("empty alignment id".into()));
            }
            let strategy = if fields[3].eq_ignore_ascii_case("all") {
                None
            } else {
                Some(
                    fields[3]
                        .parse::<ConfidenceStrategy>()
                        .map_err(|e| bad(e.to_string()))?,
                )
            };
            let threshold = match fields[4] {
                "" | "-" => None,
                t if t.eq_ignore_ascii_case("none") => None,
                t => {
                    let v: f64 = t
                        .parse()
                        .map_err(|_| bad(format!("threshold `{t}` is not a number")))?;
                    if !(0.0..=1.0).contains(&v) {
                        return Err(bad(format!("threshold {v} outside [0,1]")));
                    }
                    Some(v)
                }
            };
            rows.push(ScenarioRow {
                line,
                first: fields[0].to_owned(),
                second: fields[1].to_owned(),
                reference: fields[2].to_owned(),
                strategy,
                threshold,
            });
        }
        Ok(ScenarioSpec { rows })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    /// 1-based index of the scenario row.
    pub row: usize,
    pub direct_couple: String,
    pub indirect_couple: String,
    pub strategy: ConfidenceStrategy,
    pub threshold: Option<f64>,
    pub report: EvalReport,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioTable {
    pub results: Vec<ScenarioResult>,
}

pub const CSV_HEADER: &str = "row,strategy,precision,recall,n_found,n_expected,n_correct";

impl ScenarioTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.results {
            let _ = writeln!(
                out,
                "{},{},{:.2},{:.2},{},{},{}",
                r.row,
                r.strategy,
                r.report.precision,
                r.report.recall,
                r.report.n_found,
                r.report.n_expected,
                r.report.n_correct
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let header = [
            "row",
            "direct couple",
            "indirect couple",
            "strategy",
            "trim",
            "P/R",
            "found",
            "expected",
            "correct",
        ];
        let rows: Vec<[String; 9]> = self
            .results
            .iter()
            .map(|r| {
                [
                    r.row.to_string(),
                    r.direct_couple.clone(),
                    r.indirect_couple.clone(),
                    r.strategy.to_string(),
                    r.threshold.map_or("-".into(), |t| format!("{t:.2}")),
                    format!("{:.2}/{:.2}", r.report.precision, r.report.recall),
                    r.report.n_found.to_string(),
                    r.report.n_expected.to_string(),
                    r.report.n_correct.to_string(),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.chars().count());
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut push_line = |cells: &[&str]| {
            let line = cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ");
            out.push_str(line.trim_end());
            out.push('\n');
        };
        push_line(&header);
        for row in &rows {
            push_line(&row.iter().map(String::as_str).collect::<Vec<_>>());
        }
        out
    }
}

struct ResolvedRow<'a> {
    index: usize,
    row: &'a ScenarioRow,
    path: CompositionPath,
    reference: &'a Alignment,
}

fn resolve_row<'a>(
    index: usize,
    row: &'a ScenarioRow,
    repo: &'a Repository,
) -> Result<ResolvedRow<'a>> {
    let lookup = |id: &str| {
        repo.get(id).ok_or_else(|| Error::Scenario {
            line: row.line,
            message: format!("unknown alignment id `{id}`"),
        })
    };
    let first = lookup(&row.first)?;
    let second = lookup(&row.second)?;
    let reference = lookup(&row.reference)?;
    let mut path =
        CompositionPath::from_pair(first, second, false).map_err(|e| Error::Scenario {
            line: row.line,
            message: e.to_string(),
        })?;
    path.has_direct = repo.alignments.iter().any(|a| {
        (a.onto1 == path.source && a.onto2 == path.target)
            || (a.onto1 == path.target && a.onto2 == path.source)
    });
    Ok(ResolvedRow {
        index,
        row,
        path,
        reference,
    })
}

/// Runs every row under each requested strategy. Rows run in parallel;
/// results come back in scenario order, strategies in max, min, mult, norm order.
pub fn run_scenarios(
    spec: &ScenarioSpec,
    repo: &Repository,
    defaults: &CompositionPolicy,
    lex: Option<&Lexicon>,
) -> Result<ScenarioTable> {
    let resolved = spec
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| resolve_row(i + 1, row, repo))
        .collect::<Result<Vec<_>>>()?;
    let lexicon = crate::composer::resolve_lexicon(&defaults.bridge, lex)?;

    let jobs: Vec<(&ResolvedRow, ConfidenceStrategy)> = resolved
        .iter()
        .flat_map(|r| r.row.strategies().into_iter().map(move |s| (r, s)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(r, strategy)| -> Result<ScenarioResult> {
            let policy = defaults.with_strategy(strategy);
            let at_line = |e: Error| Error::Scenario {
                line: r.row.line,
                message: e.to_string(),
            };
            let mut composed =
                compose_alignments(&r.path, &policy, lexicon.as_deref()).map_err(at_line)?;
            if let Some(t) = r.row.threshold {
                composed = trim(&composed, t).map_err(at_line)?;
            }
            let report = evaluate(&composed, r.reference).map_err(at_line)?;
            Ok(ScenarioResult {
                row: r.index,
                direct_couple: format!("{}/{}", r.row.first, r.row.second),
                indirect_couple: format!("{}-{}", r.path.source.tag(), r.path.target.tag()),
                strategy,
                threshold: r.row.threshold,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScenarioTable { results })
}
