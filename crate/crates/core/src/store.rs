//! Canonical persistence: one JSON document per model.
//!
//! Saves are canonical: object keys sorted, collections sorted by id
//! (stereotypes by name), two-space indent, UTF-8, trailing newline.
//! Saving the same model twice is byte-identical, and `save(load(f))`
//! reproduces `f` exactly for canonical files, which keeps golden tests
//! and diffs stable.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Element, Model};

/// Serialize any value to canonical JSON text (sorted keys, two-space
/// indent, trailing newline).
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // Round-tripping through Value sorts every object key: the default
    // serde_json map is a BTreeMap.
    let value: Value = serde_json::to_value(value).map_err(|e| Error::parse_from_json(&e))?;
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| Error::parse_from_json(&e))?;
    text.push('\n');
    Ok(text)
}

/// Hex sha-256 of a byte string.
pub fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn sort_elements(elements: &mut [Element]) {
    for el in elements.iter_mut() {
        sort_elements(&mut el.sub_elements);
        el.sub_elements.sort_by(|a, b| a.id.cmp(&b.id));
    }
}

/// A copy of the model with every collection in canonical order.
fn canonical_copy(model: &Model) -> Model {
    let mut copy = model.clone();
    sort_elements(&mut copy.elements);
    copy.elements.sort_by(|a, b| a.id.cmp(&b.id));
    copy.relationships.sort_by(|a, b| a.id.cmp(&b.id));
    copy.stereotypes.sort_by(|a, b| a.name.cmp(&b.name));
    for stereotype in &mut copy.stereotypes {
        sort_elements(&mut stereotype.baseline_sub_elements);
        stereotype.baseline_sub_elements.sort_by(|a, b| a.id.cmp(&b.id));
    }
    copy.views.sort_by(|a, b| a.id.cmp(&b.id));
    for view in &mut copy.views {
        view.members.sort();
        view.display.include_edge_kinds.sort();
    }
    copy
}

/// Canonical text form of a model.
pub fn model_to_string(model: &Model) -> Result<String> {
    to_canonical_json(&canonical_copy(model))
}

/// Hex sha-256 of the canonical text form; two models with equal digests
/// are structurally identical.
pub fn model_digest(model: &Model) -> Result<String> {
    Ok(digest_hex(model_to_string(model)?.as_bytes()))
}

/// Write the canonical form to `destination`.
pub fn save_model(model: &Model, destination: impl AsRef<Path>) -> Result<()> {
    std::fs::write(destination, model_to_string(model)?)?;
    Ok(())
}

/// Parse a model from text. Malformed documents report line and column;
/// files declaring a newer schema version are rejected. Structural
/// invariants are *not* enforced here: run `validate_model` to surface
/// defects in hand-edited files as findings.
pub fn model_from_str(text: &str) -> Result<Model> {
    let model: Model = serde_json::from_str(text).map_err(|e| Error::parse_from_json(&e))?;
    check_schema_version(&model.schema_version)?;
    Ok(model)
}

/// Read a model file (see [`model_from_str`]).
pub fn load_model(source: impl AsRef<Path>) -> Result<Model> {
    model_from_str(&std::fs::read_to_string(source)?)
}

fn check_schema_version(version: &str) -> Result<()> {
    let supported: u32 = crate::model::SCHEMA_VERSION
        .parse()
        .expect("built-in schema version is numeric");
    match version.parse::<u32>() {
        Ok(v) if v <= supported => Ok(()),
        _ => Err(Error::Version {
            found: version.to_string(),
            supported: crate::model::SCHEMA_VERSION.to_string(),
        }),
    }
}
