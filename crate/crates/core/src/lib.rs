//! tether-core: an authoritative element/relationship model engine for
//! information systems.
//!
//! One typed graph links strategic goals through requirements to
//! architecture and deployed configurations, and stays the single source
//! of truth for everything derived from it:
//!
//! - [`model`] — elements, relationships, stereotypes, and the structural
//!   invariants; [`validate`] re-checks them over hand-edited files.
//! - [`store`] — canonical JSON persistence (byte-stable saves).
//! - [`ingest`] — OSCAL control catalogs and CCI lists become requirement
//!   subtrees.
//! - [`trace`] — upstream/downstream traceability, requirement coverage,
//!   orphan detection, change-impact analysis.
//! - [`drift`] — observed-state snapshots reconciled against declared
//!   configuration.
//! - [`twin`] — what-if change sets applied to a forked twin.
//! - [`view`] — layer views rendered to DOT, GraphML, or structured text.
//! - [`fixture`] — the bundled ISB reference model.

pub mod drift;
pub mod error;
pub mod fixture;
pub mod ingest;
pub mod model;
pub mod store;
pub mod trace;
pub mod twin;
pub mod validate;
pub mod view;

pub use error::{Error, Result};
pub use model::{
    Element, ElementId, ElementKind, Layer, Model, Relationship, RelationshipKind, RemovalMode,
    RequirementSubkind, Stereotype,
};
