//! Alignment Format (RDF/XML) reading, writing and validation.
//!
//! Relation strings map bit-exactly onto the algebra: `=` Equivalence,
//! `>` MoreGeneral, `<` LessGeneral, `><` Overlap, `%` Disjoint. A relation
//! set that is not a singleton is written as its members joined with `;` in
//! that order.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::label::LabelNormalizer;
use crate::model::{
    meta, Alignment, Correspondence, EntityRef, OntologyRef, Relation, RelationSet,
};

pub const ALIGNMENT_NS: &str = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment#";
pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";
pub const EXT_NS: &str = "http://exmo.inrialpes.fr/align/ext/1.0/";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownRelationPolicy {
    #[default]
    Error,
    CoerceToEquivalence,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub mode: ParseMode,
    pub unknown_relation_policy: UnknownRelationPolicy,
    pub stopword_file: Option<PathBuf>,
}

impl ParseOptions {
    pub fn lenient() -> Self {
        ParseOptions {
            mode: ParseMode::Lenient,
            ..Default::default()
        }
    }

    pub fn normalizer(&self) -> Result<LabelNormalizer> {
        match &self.stopword_file {
            Some(path) => LabelNormalizer::from_stopword_file(path),
            None => Ok(LabelNormalizer::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    /// `<severity>: <file>:<line>:<col>: <message>`
    pub fn render(&self, file: &str) -> String {
        format!(
            "{}: {}:{}:{}: {}",
            self.severity, file, self.line, self.column, self.message
        )
    }

    fn into_error(self) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column,
            message: self.message,
        }
    }
}

/// Parses an alignment document with a normalizer built once for many documents.
#[derive(Debug, Clone, Default)]
pub struct AlignmentReader {
    opts: ParseOptions,
    normalizer: LabelNormalizer,
}

impl AlignmentReader {
    pub fn new(opts: ParseOptions) -> Result<Self> {
        let normalizer = opts.normalizer()?;
        Ok(AlignmentReader { opts, normalizer })
    }

    pub fn options(&self) -> &ParseOptions {
        &self.opts
    }

    /// Lenient-mode warnings are returned alongside the alignment.
    pub fn parse_with_warnings(&self, bytes: &[u8]) -> Result<(Alignment, Vec<Diagnostic>)> {
        let scan = Scanner::new(bytes, &self.opts, &self.normalizer).run();
        let mut warnings = Vec::new();
        for d in scan.diagnostics {
            match d.severity {
                Severity::Error => return Err(d.into_error()),
                Severity::Warning => warnings.push(d),
            }
        }
        let alignment = scan
            .alignment
            .expect("scanner yields an alignment whenever it reports no error");
        Ok((alignment, warnings))
    }

    pub fn parse(&self, bytes: &[u8]) -> Result<Alignment> {
        self.parse_with_warnings(bytes).map(|(a, _)| a)
    }

    /// Reads a file; the alignment id is the path as given.
    pub fn parse_file(&self, path: &Path) -> Result<Alignment> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let mut a = self.parse(&bytes)?;
        a.id = path.display().to_string();
        Ok(a)
    }
}

/// Parses one document. The alignment id is the `rdf:about` of the
/// Alignment element, or empty.
pub fn parse_alignment(bytes: &[u8], opts: &ParseOptions) -> Result<Alignment> {
    AlignmentReader::new(opts.clone())?.parse(bytes)
}

/// Diagnostics for a document under strict default options. An empty list
/// means `parse_alignment` with default options succeeds.
pub fn validate(bytes: &[u8]) -> Vec<Diagnostic> {
    let opts = ParseOptions::default();
    let normalizer = LabelNormalizer::default();
    Scanner::new(bytes, &opts, &normalizer).run().diagnostics
}

struct ScanResult {
    alignment: Option<Alignment>,
    diagnostics: Vec<Diagnostic>,
}

#[derive(Default)]
struct CellDraft {
    pos: usize,
    entity1: Option<String>,
    entity2: Option<String>,
    relation: Option<String>,
    measure: Option<String>,
}

#[derive(Default)]
struct OntoDraft {
    pos: usize,
    uri: Option<String>,
}

struct Scanner<'a> {
    bytes: &'a [u8],
    opts: &'a ParseOptions,
    normalizer: &'a LabelNormalizer,
    diagnostics: Vec<Diagnostic>,
    stack: Vec<String>,
    text: String,
    about: Option<String>,
    seen_alignment: bool,
    onto1: OntoDraft,
    onto2: OntoDraft,
    metadata: BTreeMap<String, String>,
    meta_key: Option<String>,
    cell: Option<CellDraft>,
    cells: Vec<Correspondence>,
}

impl<'a> Scanner<'a> {
    fn new(bytes: &'a [u8], opts: &'a ParseOptions, normalizer: &'a LabelNormalizer) -> Self {
        Scanner {
            bytes,
            opts,
            normalizer,
            diagnostics: Vec::new(),
            stack: Vec::new(),
            text: String::new(),
            about: None,
            seen_alignment: false,
            onto1: OntoDraft::default(),
            onto2: OntoDraft::default(),
            metadata: BTreeMap::new(),
            meta_key: None,
            cell: None,
            cells: Vec::new(),
        }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let pos = pos.min(self.bytes.len());
        let before = &self.bytes[..pos];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |i| i + 1);
        let column = String::from_utf8_lossy(&before[line_start..])
            .chars()
            .count()
            + 1;
        (line, column)
    }

    fn push(&mut self, pos: usize, severity: Severity, message: String) {
        let (line, column) = self.location(pos);
        self.diagnostics.push(Diagnostic {
            line,
            column,
            severity,
            message,
        });
    }

    /// Error in strict mode, warning in lenient mode.
    fn strictness(&self) -> Severity {
        match self.opts.mode {
            ParseMode::Strict => Severity::Error,
            ParseMode::Lenient => Severity::Warning,
        }
    }

    fn run(mut self) -> ScanResult {
        if let Err(d) = self.read_events() {
            self.diagnostics.push(d);
            return ScanResult {
                alignment: None,
                diagnostics: self.diagnostics,
            };
        }
        let alignment = self.finish();
        ScanResult {
            alignment,
            diagnostics: self.diagnostics,
        }
    }

    fn read_events(&mut self) -> Result<(), Diagnostic> {
        let mut reader = Reader::from_reader(self.bytes);
        reader.config_mut().check_end_names = true;
        let mut buf = Vec::new();
        loop {
            let pos = reader.buffer_position() as usize;
            let event = reader.read_event_into(&mut buf).map_err(|e| {
                let (line, column) = self.location(reader.error_position() as usize);
                Diagnostic {
                    line,
                    column,
                    severity: Severity::Error,
                    message: format!("malformed XML: {e}"),
                }
            })?;
            match event {
                Event::Start(e) => self.start(&e, pos),
                Event::Empty(e) => {
                    self.start(&e, pos);
                    self.end(pos);
                }
                Event::End(_) => self.end(pos),
                Event::Text(t) => match t.unescape() {
                    Ok(s) => self.text.push_str(&s),
                    Err(e) => {
                        let (line, column) = self.location(pos);
                        return Err(Diagnostic {
                            line,
                            column,
                            severity: Severity::Error,
                            message: format!("malformed XML: {e}"),
                        });
                    }
                },
                Event::CData(t) => self.text.push_str(&String::from_utf8_lossy(&t)),
                Event::Eof => break,
                _ => {}
            }
            buf.clear();
        }
        if !self.stack.is_empty() {
            let (line, column) = self.location(self.bytes.len());
            return Err(Diagnostic {
                line,
                column,
                severity: Severity::Error,
                message: format!(
                    "malformed XML: unclosed element `{}`",
                    self.stack.last().unwrap()
                ),
            });
        }
        Ok(())
    }

    fn parent(&self) -> Option<&str> {
        self.stack
            .len()
            .checked_sub(2)
            .map(|i| self.stack[i].as_str())
    }

    fn start(&mut self, e: &BytesStart<'_>, pos: usize) {
        let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
        self.text.clear();
        match name.as_str() {
            "Alignment" => {
                self.seen_alignment = true;
                self.about = attribute(e, "about");
            }
            "Cell" => {
                self.cell = Some(CellDraft {
                    pos,
                    ..Default::default()
                })
            }
            "entity1" | "entity2" if self.current() == Some("Cell") => {
                let resource = attribute(e, "resource");
                if let Some(cell) = self.cell.as_mut() {
                    if name == "entity1" {
                        cell.entity1 = resource;
                    } else {
                        cell.entity2 = resource;
                    }
                }
            }
            "onto1" | "uri1" => self.onto1.pos = pos,
            "onto2" | "uri2" => self.onto2.pos = pos,
            "Ontology" => {
                let about = attribute(e, "about");
                match self.current() {
                    Some("onto1") => self.onto1.uri = about,
                    Some("onto2") => self.onto2.uri = about,
                    _ => {}
                }
            }
            "meta" => self.meta_key = attribute(e, "key"),
            _ => {}
        }
        self.stack.push(name);
    }

    fn current(&self) -> Option<&str> {
        self.stack.last().map(String::as_str)
    }

    fn end(&mut self, pos: usize) {
        let text = std::mem::take(&mut self.text).trim().to_owned();
        let parent = self.parent().map(str::to_owned);
        let Some(name) = self.stack.pop() else {
            return;
        };
        match (name.as_str(), parent.as_deref()) {
            ("relation", Some("Cell")) => {
                if let Some(c) = self.cell.as_mut() {
                    c.relation = Some(text);
                }
            }
            ("measure", Some("Cell")) => {
                if let Some(c) = self.cell.as_mut() {
                    c.measure = Some(text);
                }
            }
            ("Cell", _) => {
                if let Some(draft) = self.cell.take() {
                    self.finish_cell(draft);
                }
            }
            ("onto1" | "uri1", Some("Alignment")) => {
                if self.onto1.uri.is_none() && !text.is_empty() {
                    self.onto1.uri = Some(text);
                }
            }
            ("onto2" | "uri2", Some("Alignment")) => {
                if self.onto2.uri.is_none() && !text.is_empty() {
                    self.onto2.uri = Some(text);
                }
            }
            ("meta", Some("Alignment")) => match self.meta_key.take() {
                Some(key) => {
                    self.metadata.insert(key, text);
                }
                None => self.push(pos, Severity::Warning, "metadata entry without key".into()),
            },
            ("map", _) => {}
            (other, Some("Alignment")) => {
                self.metadata.insert(other.to_owned(), text);
            }
            _ => {}
        }
    }

    fn finish_cell(&mut self, draft: CellDraft) {
        let pos = draft.pos;
        let mut missing = Vec::new();
        if draft.entity1.as_deref().is_none_or(str::is_empty) {
            missing.push("entity1");
        }
        if draft.entity2.as_deref().is_none_or(str::is_empty) {
            missing.push("entity2");
        }
        if draft.measure.as_deref().is_none_or(str::is_empty) {
            missing.push("measure");
        }
        if draft.relation.as_deref().is_none_or(str::is_empty) {
            missing.push("relation");
        }
        if !missing.is_empty() {
            let severity = self.strictness();
            let skip = if severity == Severity::Warning {
                "; cell skipped"
            } else {
                ""
            };
            self.push(
                pos,
                severity,
                format!("cell is missing {}{skip}", missing.join(", ")),
            );
            return;
        }
        let (e1, e2) = (draft.entity1.unwrap(), draft.entity2.unwrap());
        let relation_text = draft.relation.unwrap();
        let measure_text = draft.measure.unwrap();

        let relation = match RelationSet::parse(&relation_text) {
            Some(r) => r,
            None => match self.opts.unknown_relation_policy {
                UnknownRelationPolicy::Error => {
                    self.push(
                        pos,
                        Severity::Error,
                        format!("unknown relation `{relation_text}`"),
                    );
                    return;
                }
                UnknownRelationPolicy::CoerceToEquivalence => {
                    self.push(
                        pos,
                        Severity::Warning,
                        format!("unknown relation `{relation_text}` coerced to `=`"),
                    );
                    Relation::Equivalence.into()
                }
            },
        };

        let mut confidence = match measure_text.parse::<f64>() {
            Ok(n) if n.is_finite() => n,
            _ => {
                self.push(
                    pos,
                    Severity::Error,
                    format!("confidence `{measure_text}` is not a number"),
                );
                return;
            }
        };
        if !(0.0..=1.0).contains(&confidence) {
            let severity = self.strictness();
            let clamped = confidence.clamp(0.0, 1.0);
            let note = if severity == Severity::Warning {
                format!("; clamped to {clamped}")
            } else {
                String::new()
            };
            self.push(
                pos,
                severity,
                format!("confidence {measure_text} out of range [0,1]{note}"),
            );
            if severity == Severity::Error {
                return;
            }
            confidence = clamped;
        }

        let entity1 = match EntityRef::with_normalizer(&e1, self.normalizer) {
            Ok(e) => e,
            Err(e) => {
                let severity = self.strictness();
                self.push(pos, severity, format!("entity1: {e}"));
                return;
            }
        };
        let entity2 = match EntityRef::with_normalizer(&e2, self.normalizer) {
            Ok(e) => e,
            Err(e) => {
                let severity = self.strictness();
                self.push(pos, severity, format!("entity2: {e}"));
                return;
            }
        };
        match Correspondence::new(entity1, entity2, relation, confidence) {
            Ok(c) => self.cells.push(c),
            Err(e) => self.push(pos, Severity::Error, e.to_string()),
        }
    }

    fn finish(&mut self) -> Option<Alignment> {
        if !self.seen_alignment {
            self.push(0, Severity::Error, "no Alignment element".into());
            return None;
        }
        let (draft1, draft2) = (
            std::mem::take(&mut self.onto1),
            std::mem::take(&mut self.onto2),
        );
        let onto1 = self.ontology("onto1", draft1);
        let onto2 = self.ontology("onto2", draft2);
        let (onto1, onto2) = (onto1?, onto2?);

        self.check_namespaces(&onto1, &onto2);
        if self
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
        {
            return None;
        }
        let mut alignment = Alignment::new(self.about.clone().unwrap_or_default(), onto1, onto2);
        alignment.cells = std::mem::take(&mut self.cells);
        alignment.metadata = std::mem::take(&mut self.metadata);
        Some(alignment)
    }

    fn ontology(&mut self, which: &str, draft: OntoDraft) -> Option<OntologyRef> {
        match draft.uri {
            None => {
                self.push(draft.pos, Severity::Error, format!("missing {which}"));
                None
            }
            Some(uri) => match OntologyRef::new(uri) {
                Ok(o) => Some(o),
                Err(e) => {
                    self.push(draft.pos, Severity::Error, format!("{which}: {e}"));
                    None
                }
            },
        }
    }

    /// A namespace is declared when the ontology URI ends with `#` or `/`.
    fn check_namespaces(&mut self, onto1: &OntologyRef, onto2: &OntologyRef) {
        let declared = |o: &OntologyRef| {
            let u = o.uri();
            (u.ends_with('#') || u.ends_with('/')).then(|| u.to_owned())
        };
        let (ns1, ns2) = (declared(onto1), declared(onto2));
        if ns1.is_none() && ns2.is_none() {
            return;
        }
        let severity = self.strictness();
        let mut found = Vec::new();
        for c in &self.cells {
            if let Some(ns) = &ns1 {
                if !c.entity1.uri().starts_with(ns.as_str()) {
                    found.push(format!(
                        "entity1 `{}` outside namespace `{ns}`",
                        c.entity1.uri()
                    ));
                }
            }
            if let Some(ns) = &ns2 {
                if !c.entity2.uri().starts_with(ns.as_str()) {
                    found.push(format!(
                        "entity2 `{}` outside namespace `{ns}`",
                        c.entity2.uri()
                    ));
                }
            }
        }
        for message in found {
            self.push(0, severity, message);
        }
    }
}

fn attribute(e: &BytesStart<'_>, local: &str) -> Option<String> {
    e.attributes().flatten().find_map(|a| {
        if a.key.local_name().as_ref() != local.as_bytes() {
            return None;
        }
        let value = a
            .unescape_value()
            .unwrap_or_else(|_| Cow::Owned(String::from_utf8_lossy(&a.value).into_owned()));
        Some(value.into_owned())
    })
}

/// Writes an alignment as an Alignment Format document. Output is
/// byte-stable: cells are sorted and confidences carry six decimals.
pub fn serialize_alignment(a: &Alignment) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"utf-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        "<rdf:RDF xmlns=\"{ALIGNMENT_NS}\"\n         xmlns:rdf=\"{RDF_NS}\"\n         xmlns:xsd=\"{XSD_NS}\"\n         xmlns:alext=\"{EXT_NS}\">"
    );
    if a.id.is_empty() {
        out.push_str("<Alignment>\n");
    } else {
        let _ = writeln!(out, "<Alignment rdf:about=\"{}\">", escape(&a.id));
    }
    out.push_str("  <xml>yes</xml>\n");
    let level = a.metadata.get(meta::LEVEL).map_or("0", String::as_str);
    let kind = a.metadata.get(meta::TYPE).map_or("??", String::as_str);
    let _ = writeln!(out, "  <level>{}</level>", escape(level));
    let _ = writeln!(out, "  <type>{}</type>", escape(kind));
    for (key, value) in &a.metadata {
        if matches!(key.as_str(), "xml" | meta::LEVEL | meta::TYPE) {
            continue;
        }
        let _ = writeln!(
            out,
            "  <alext:meta alext:key=\"{}\">{}</alext:meta>",
            escape(key),
            escape(value)
        );
    }
    for (tag, onto) in [("onto1", &a.onto1), ("onto2", &a.onto2)] {
        let _ = writeln!(
            out,
            "  <{tag}>\n    <Ontology rdf:about=\"{}\"/>\n  </{tag}>",
            escape(onto.uri())
        );
    }
    out.push_str("  <map>\n");
    for cell in a.sorted_cells() {
        let _ = write!(
            out,
            "    <Cell>\n      <entity1 rdf:resource=\"{}\"/>\n      <entity2 rdf:resource=\"{}\"/>\n      <relation>{}</relation>\n      <measure rdf:datatype=\"{XSD_NS}float\">{:.6}</measure>\n    </Cell>\n",
            escape(cell.entity1.uri()),
            escape(cell.entity2.uri()),
            escape(&cell.relation.to_string()),
            cell.confidence
        );
    }
    out.push_str("  </map>\n</Alignment>\n</rdf:RDF>\n");
    out.into_bytes()
}
