//! Structural validation: every type invariant as a deterministic finding.
//!
//! Mutating operations refuse to create these defects, but files can be
//! edited by hand, so validation re-checks the raw structures and reports
//! findings instead of failing. An empty finding list means every
//! invariant holds.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::model::{endpoint_kinds_allowed, ElementKind, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
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

/// One validation finding; ordered by (code, subject) so output is stable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub subject: String,
    pub message: String,
}

pub const CODE_EMPTY_ID: &str = "empty-id";
pub const CODE_DUPLICATE_ID: &str = "duplicate-id";
pub const CODE_DUPLICATE_RELATIONSHIP_ID: &str = "duplicate-relationship-id";
pub const CODE_DUPLICATE_EDGE: &str = "duplicate-edge";
pub const CODE_DANGLING_REFERENCE: &str = "dangling-reference";
pub const CODE_SELF_LOOP: &str = "self-loop";
pub const CODE_KIND_CONSTRAINT: &str = "kind-constraint";
pub const CODE_SUBKIND_MISPLACED: &str = "subkind-on-non-requirement";
pub const CODE_UNKNOWN_STEREOTYPE: &str = "unknown-stereotype";
pub const CODE_STEREOTYPE_KIND_MISMATCH: &str = "stereotype-kind-mismatch";
pub const CODE_DUPLICATE_STEREOTYPE: &str = "duplicate-stereotype";
pub const CODE_DUPLICATE_VIEW_ID: &str = "duplicate-view-id";
pub const CODE_DANGLING_VIEW_MEMBER: &str = "dangling-view-member";

fn finding(code: &'static str, subject: impl Into<String>, message: impl Into<String>) -> Finding {
    Finding {
        severity: Severity::Error,
        code,
        subject: subject.into(),
        message: message.into(),
    }
}

/// Check every structural invariant. Returns an empty list exactly when
/// the model is valid; findings are sorted by (code, subject).
pub fn validate_model(model: &Model) -> Vec<Finding> {
    let mut findings = Vec::new();

    // Element ids: non-empty and unique model-wide, sub-elements included.
    let mut seen_ids: HashMap<&str, usize> = HashMap::new();
    for el in model.all_elements() {
        if el.id.is_empty() {
            findings.push(finding(
                CODE_EMPTY_ID,
                format!("(element named {:?})", el.name),
                "element id is empty",
            ));
        }
        *seen_ids.entry(el.id.as_str()).or_default() += 1;
        if el.subkind.is_some() && el.kind != ElementKind::Requirement {
            findings.push(finding(
                CODE_SUBKIND_MISPLACED,
                el.id.as_str(),
                format!("{} element carries a requirement subkind", el.kind),
            ));
        }
        if let Some(stereotype_name) = &el.stereotype {
            match model.stereotype(stereotype_name) {
                None => findings.push(finding(
                    CODE_UNKNOWN_STEREOTYPE,
                    el.id.as_str(),
                    format!("references unknown stereotype {stereotype_name}"),
                )),
                Some(s) if s.applies_to != el.kind => findings.push(finding(
                    CODE_STEREOTYPE_KIND_MISMATCH,
                    el.id.as_str(),
                    format!(
                        "stereotype {stereotype_name} applies to {} but element is a {}",
                        s.applies_to, el.kind
                    ),
                )),
                Some(_) => {}
            }
        }
    }
    for (id, count) in &seen_ids {
        if *count > 1 {
            findings.push(finding(
                CODE_DUPLICATE_ID,
                *id,
                format!("element id appears {count} times"),
            ));
        }
    }

    // Relationships: unique ids, resolvable endpoints, no self-loops,
    // no duplicate triples, endpoint kinds within the constraint table.
    let mut rel_ids: HashMap<&str, usize> = HashMap::new();
    let mut triples: HashMap<(&str, &str, &str), usize> = HashMap::new();
    for rel in &model.relationships {
        *rel_ids.entry(rel.id.as_str()).or_default() += 1;
        *triples
            .entry((rel.kind.as_str(), rel.source.as_str(), rel.target.as_str()))
            .or_default() += 1;
        let source = model.element(&rel.source);
        let target = model.element(&rel.target);
        if source.is_none() {
            findings.push(finding(
                CODE_DANGLING_REFERENCE,
                rel.id.as_str(),
                format!("source {} does not resolve", rel.source),
            ));
        }
        if target.is_none() {
            findings.push(finding(
                CODE_DANGLING_REFERENCE,
                rel.id.as_str(),
                format!("target {} does not resolve", rel.target),
            ));
        }
        if rel.source == rel.target {
            findings.push(finding(CODE_SELF_LOOP, rel.id.as_str(), "self-loop"));
        }
        if let (Some(src), Some(tgt)) = (source, target) {
            if !endpoint_kinds_allowed(rel.kind, src.kind, tgt.kind) {
                findings.push(finding(
                    CODE_KIND_CONSTRAINT,
                    rel.id.as_str(),
                    format!("{} not allowed from {} to {}", rel.kind, src.kind, tgt.kind),
                ));
            }
        }
    }
    for (id, count) in &rel_ids {
        if *count > 1 {
            findings.push(finding(
                CODE_DUPLICATE_RELATIONSHIP_ID,
                *id,
                format!("relationship id appears {count} times"),
            ));
        }
    }
    for ((kind, source, target), count) in &triples {
        if *count > 1 {
            findings.push(finding(
                CODE_DUPLICATE_EDGE,
                format!("{source} -{kind}-> {target}"),
                format!("triple appears {count} times"),
            ));
        }
    }

    // Stereotypes: unique names.
    let mut stereotype_names: HashMap<&str, usize> = HashMap::new();
    for s in &model.stereotypes {
        *stereotype_names.entry(s.name.as_str()).or_default() += 1;
    }
    for (name, count) in &stereotype_names {
        if *count > 1 {
            findings.push(finding(
                CODE_DUPLICATE_STEREOTYPE,
                *name,
                format!("stereotype name appears {count} times"),
            ));
        }
    }

    // Views: unique ids, members resolve.
    let mut view_ids: HashSet<&str> = HashSet::new();
    for view in &model.views {
        if !view_ids.insert(view.id.as_str()) {
            findings.push(finding(
                CODE_DUPLICATE_VIEW_ID,
                view.id.as_str(),
                "view id appears more than once",
            ));
        }
        for member in &view.members {
            if !model.contains_element(member) {
                findings.push(finding(
                    CODE_DANGLING_VIEW_MEMBER,
                    view.id.as_str(),
                    format!("member {member} does not resolve"),
                ));
            }
        }
    }

    findings.sort_by(|a, b| (a.code, &a.subject).cmp(&(b.code, &b.subject)));
    findings
}
