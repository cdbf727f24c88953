//! Indirect ontology alignment.
//!
//! Direct alignments between pairs of ontologies are read from Alignment
//! Format files, arranged into an ontology network, and composed through
//! pivot ontologies into new alignments using the relation composition
//! algebra and one of four confidence combination strategies. Composed
//! alignments can be scored against reference alignments.

pub mod composer;
pub mod error;
pub mod evaluator;
pub mod format;
pub mod label;
pub mod model;
pub mod network;

pub use composer::{
    compose_alignments, compose_confidence, compose_relations, detect_bridges, load_lexicon,
    AlgebraTable, Bridge, BridgeConfig, BridgeTier, CompositionPolicy, ConfidenceStrategy, Lexicon,
    RelationSetPolicy,
};
pub use error::{Error, Result};
pub use evaluator::{
    evaluate, run_scenarios, EvalReport, ScenarioRow, ScenarioSpec, ScenarioTable,
};
pub use format::{
    parse_alignment, serialize_alignment, validate, Diagnostic, ParseMode, ParseOptions, Severity,
    UnknownRelationPolicy,
};
pub use label::{normalize_label, LabelNormalizer};
pub use model::{
    invert_alignment, merge_cells, trim, uri_tag, Alignment, Correspondence, EntityRef,
    OntologyRef, Relation, RelationSet,
};
pub use network::{build_network, enumerate_paths, CompositionPath, OntologyNetwork, Repository};
