//! A dependency-grammar toolkit.
//!
//! The crate covers the pipeline from grammar text to semantic terms:
//!
//! * [`grammar`] — rule descriptions with a starred governor slot, lexicon,
//!   frames, control specifications, and the construction of a strongly
//!   equivalent context-free grammar with head-marked productions.
//! * [`ds`] — dependency structures (general labeled digraphs over a token
//!   sequence) and head-annotated phrase markers, with CoNLL-like, JSON, and
//!   s-expression formats.
//! * [`axioms`] — the four well-formedness axioms plus the corollary that
//!   dependents may not lie beyond their own governor, and the non-crossing
//!   characterization of projectivity.
//! * [`parser`] — all-parses projective parsing three ways: a direct chart
//!   parser over the dependency rules, CKY over the constructed CFG with
//!   head percolation, and a brute-force enumeration oracle for small inputs.
//! * [`convert`] — dependency structure to minimal phrase marker and back by
//!   head percolation.
//! * [`functional`] — functional structures built from labeled analyses,
//!   lexical control resolution, and predicate-argument semantic terms.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

pub mod axioms;
pub mod convert;
pub mod ds;
pub mod functional;
pub mod grammar;
pub mod parser;

pub use axioms::{
    check_a1, check_a2, check_a3, check_a4, check_a5, is_noncrossing, validate, AxiomKind,
    Violation, Witness,
};
pub use convert::{ds_to_pm, label_map, pm_to_ds, ConvertError};
pub use ds::{Arc, DependencyStructure, DsError, FormatError, PhraseMarker, Token, UNLABELED};
pub use functional::{
    build_fstructure, render_semantics, resolve_control, to_semantics, CorefNote, FunctionalError,
    FunctionalStructure, SemanticTerm,
};
pub use grammar::{
    gaifman_cfg, parse_grammar, render_grammar, validate_grammar, Category, Cfg, ControlSpec,
    Diagnostic, Grammar, GrammarError, Production, Rule, Severity, Slot,
};
pub use parser::{
    enumerate_oracle, parse, parse_via_cfg, Analysis, ParseError, Sentence, TraceEntry,
    DEFAULT_MAX_ANALYSES,
};
