//! Validity of Hoare-style triples under every reading of `{b} p {c}`,
//! decided exactly over finite relational models.
//!
//! - [`relalg`]: state spaces, predicates and relations.
//! - [`lang`]: a guarded-command language denoting relations.
//! - [`transformers`]: the eight angelic/demonic pre- and postcondition
//!   transformers.
//! - [`triples`]: triple readings, verdict matrices and law checks.
//! - [`topkat`]: TopKAT terms, their relational meaning and the triple
//!   encodings.
//! - [`laws`]: exhaustive and random model-checking sweeps.
//! - [`specfile`] and [`report`]: the input format and reports behind the
//!   command-line tool.

pub mod lang;
pub mod laws;
pub mod relalg;
pub mod report;
pub mod specfile;
pub mod topkat;
pub mod transformers;
pub mod triples;
