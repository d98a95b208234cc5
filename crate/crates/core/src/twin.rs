//! What-if evaluation on a forked twin of the model.
//!
//! A twin is an independent copy: simulations mutate the twin and never
//! the base, verified by digest in the test suite. Change sets apply
//! atomically — any invalid op aborts the whole set and leaves the twin
//! untouched. A failed element stays in the graph but stops satisfying
//! requirements and providing dependencies, and so do its structural
//! descendants (owned sub-elements and `Contains`/`AssignedConfiguration`
//! children).
//!
//! Affected services are computed structurally: a service or application
//! component is affected when a provider it depends on (transitively, via
//! `Supports` edges) became unavailable, or when it had a direct
//! `ConnectsTo`/`ExchangesWith` edge to something that did. No timing,
//! probability, or capacity modeling.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{
    Element, ElementId, ElementKind, Model, RelationshipKind, RemovalMode,
    AVAILABILITY_FAILED, AVAILABILITY_KEY,
};

/// One hypothetical change.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ChangeOp {
    /// Remove an element and cascade to its sub-elements, incident edges,
    /// and view memberships.
    RemoveElement { id: ElementId },
    AddElement { element: Element },
    AddRelationship {
        kind: RelationshipKind,
        source: ElementId,
        target: ElementId,
    },
    RemoveRelationship { id: ElementId },
    SetProperty {
        id: ElementId,
        key: String,
        value: String,
    },
    /// Mark an element unavailable without structural removal.
    FailElement { id: ElementId },
}

/// An ordered list of changes, applied atomically.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub ops: Vec<ChangeOp>,
}

/// Parse a change-set document.
pub fn changeset_from_str(text: &str) -> Result<ChangeSet> {
    serde_json::from_str(text).map_err(|e| Error::parse_from_json(&e))
}

/// One field-level difference on a record that exists in both models.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldChange {
    pub id: String,
    pub field: String,
    pub before: Value,
    pub after: Value,
}

/// Complete, deterministic delta between two models. Record ids are
/// qualified (`element:`, `relationship:`, `stereotype:`, `view:`) so the
/// lists are unambiguous.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ModelDelta {
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub changed: Vec<FieldChange>,
}

impl ModelDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.changed.is_empty()
    }
}

/// Outcome of one simulated change set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub applied_ops: usize,
    pub affected_services: Vec<ElementId>,
    pub affected_requirements: Vec<ElementId>,
    pub delta: ModelDelta,
}

fn to_record(value: &impl Serialize) -> Value {
    serde_json::to_value(value).expect("model data serializes")
}

/// Flatten a model into qualified records. Element records carry a
/// `parent` field instead of nesting sub-elements, so every element is
/// exactly one record.
fn record_map(model: &Model) -> BTreeMap<String, Value> {
    let mut map = BTreeMap::new();

    fn add_elements(
        map: &mut BTreeMap<String, Value>,
        parent: Option<&ElementId>,
        elements: &[Element],
    ) {
        for el in elements {
            let mut value = to_record(el);
            let obj = value.as_object_mut().expect("element is an object");
            obj.remove("sub_elements");
            obj.insert("parent".into(), to_record(&parent));
            map.insert(format!("element:{}", el.id), value);
            add_elements(map, Some(&el.id), &el.sub_elements);
        }
    }

    add_elements(&mut map, None, &model.elements);
    for rel in &model.relationships {
        map.insert(format!("relationship:{}", rel.id), to_record(rel));
    }
    for stereotype in &model.stereotypes {
        map.insert(format!("stereotype:{}", stereotype.name), to_record(stereotype));
    }
    for view in &model.views {
        map.insert(format!("view:{}", view.id), to_record(view));
    }
    map
}

/// Symmetric, complete delta between two models; `diff_models(m, m)` is
/// empty.
pub fn diff_models(base: &Model, twin: &Model) -> ModelDelta {
    let before = record_map(base);
    let after = record_map(twin);
    let mut delta = ModelDelta::default();

    for id in after.keys() {
        if !before.contains_key(id) {
            delta.added.push(id.clone());
        }
    }
    for id in before.keys() {
        if !after.contains_key(id) {
            delta.removed.push(id.clone());
        }
    }
    for (id, old) in &before {
        let Some(new) = after.get(id) else { continue };
        if old == new {
            continue;
        }
        let (Some(old_obj), Some(new_obj)) = (old.as_object(), new.as_object()) else {
            continue;
        };
        let mut fields: BTreeSet<&String> = old_obj.keys().collect();
        fields.extend(new_obj.keys());
        for field in fields {
            let before_value = old_obj.get(field).cloned().unwrap_or(Value::Null);
            let after_value = new_obj.get(field).cloned().unwrap_or(Value::Null);
            if before_value != after_value {
                delta.changed.push(FieldChange {
                    id: id.clone(),
                    field: field.clone(),
                    before: before_value,
                    after: after_value,
                });
            }
        }
    }
    delta
}

/// Requirement ids with at least one `Satisfies` in-edge from an
/// available element.
fn satisfied_requirement_ids(model: &Model) -> BTreeSet<ElementId> {
    let unavailable = model.unavailable_ids();
    model
        .relationships
        .iter()
        .filter(|r| r.kind == RelationshipKind::Satisfies && !unavailable.contains(&r.source))
        .filter(|r| {
            model
                .element(&r.target)
                .map(|e| e.kind == ElementKind::Requirement)
                .unwrap_or(false)
        })
        .map(|r| r.target.clone())
        .collect()
}

/// Services and application components that lost a required dependency:
/// reachable from the newly unavailable set via forward `Supports` edges
/// (in the pre-change graph), or directly connected to it.
fn affected_services(
    before: &Model,
    newly_unavailable: &BTreeSet<ElementId>,
) -> Vec<ElementId> {
    let mut affected: BTreeSet<ElementId> = BTreeSet::new();

    // Transitive provider chains.
    let mut queue: VecDeque<&ElementId> = newly_unavailable.iter().collect();
    let mut seen: BTreeSet<&ElementId> = newly_unavailable.iter().collect();
    while let Some(at) = queue.pop_front() {
        for rel in &before.relationships {
            if rel.kind == RelationshipKind::Supports && &rel.source == at && seen.insert(&rel.target)
            {
                affected.insert(rel.target.clone());
                queue.push_back(&rel.target);
            }
        }
    }

    // Direct connectivity loss.
    for rel in &before.relationships {
        if matches!(
            rel.kind,
            RelationshipKind::ConnectsTo | RelationshipKind::ExchangesWith
        ) {
            if newly_unavailable.contains(&rel.source) && !newly_unavailable.contains(&rel.target)
            {
                affected.insert(rel.target.clone());
            }
            if newly_unavailable.contains(&rel.target) && !newly_unavailable.contains(&rel.source)
            {
                affected.insert(rel.source.clone());
            }
        }
    }

    affected
        .into_iter()
        .filter(|id| {
            before
                .element(id)
                .map(|e| {
                    matches!(
                        e.kind,
                        ElementKind::Service | ElementKind::ApplicationComponent
                    )
                })
                .unwrap_or(false)
        })
        .filter(|id| !newly_unavailable.contains(id))
        .collect()
}

impl Model {
    /// Fork an independent twin. Mutations to the twin never reach the
    /// base model.
    pub fn fork_twin(&self) -> Model {
        self.clone()
    }

    /// Apply a change set atomically and report the propagated effects.
    /// Any invalid op aborts with its index and reason, leaving the twin
    /// byte-identical to its pre-application state.
    pub fn apply_changeset(&mut self, changes: &ChangeSet) -> Result<SimulationReport> {
        let before = self.clone();
        let mut scratch = self.clone();
        let mut removed_ids: BTreeSet<ElementId> = BTreeSet::new();

        for (index, op) in changes.ops.iter().enumerate() {
            let outcome: Result<()> = match op {
                ChangeOp::RemoveElement { id } => scratch
                    .remove_element(id, RemovalMode::Cascade)
                    .map(|record| removed_ids.extend(record.elements)),
                ChangeOp::AddElement { element } => scratch.add_element(element.clone()),
                ChangeOp::AddRelationship {
                    kind,
                    source,
                    target,
                } => scratch.add_relationship(*kind, source, target, None).map(|_| ()),
                ChangeOp::RemoveRelationship { id } => {
                    scratch.remove_relationship(id).map(|_| ())
                }
                ChangeOp::SetProperty { id, key, value } => {
                    scratch.set_property(id, key.clone(), value.clone())
                }
                ChangeOp::FailElement { id } => {
                    scratch.set_property(id, AVAILABILITY_KEY, AVAILABILITY_FAILED)
                }
            };
            if let Err(err) = outcome {
                return Err(Error::ChangeSetAborted {
                    index,
                    reason: err.to_string(),
                });
            }
        }

        // Newly unavailable: removed outright, or unavailable now but not
        // before (covers failures cascading through structure).
        let was_unavailable = before.unavailable_ids();
        let mut newly_unavailable: BTreeSet<ElementId> = scratch
            .unavailable_ids()
            .into_iter()
            .filter(|id| !was_unavailable.contains(id))
            .collect();
        newly_unavailable.extend(removed_ids);

        let satisfied_before = satisfied_requirement_ids(&before);
        let satisfied_after = satisfied_requirement_ids(&scratch);
        let affected_requirements: Vec<ElementId> = satisfied_before
            .difference(&satisfied_after)
            .cloned()
            .collect();

        let report = SimulationReport {
            applied_ops: changes.ops.len(),
            affected_services: affected_services(&before, &newly_unavailable),
            affected_requirements,
            delta: diff_models(&before, &scratch),
        };
        *self = scratch;
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RequirementSubkind;
    use crate::store::model_digest;

    /// Auth service on a domain controller supports two applications; a
    /// switch config satisfies two requirements.
    fn base_model() -> Model {
        let mut model = Model::new("ISB").unwrap();
        for (id, name) in [("req-1", "Boundary Protection"), ("req-2", "Flow Enforcement")] {
            model
                .add_element(
                    Element::new(id, name, ElementKind::Requirement)
                        .with_subkind(RequirementSubkind::Cybersecurity),
                )
                .unwrap();
        }
        model
            .add_element(
                Element::new("switch", "Switch", ElementKind::NetworkDevice).with_sub_element(
                    Element::new("switch-acl", "ACL Baseline", ElementKind::ConfigurationItem),
                ),
            )
            .unwrap();
        model
            .add_element(Element::new("dc", "Domain Controller", ElementKind::TechnologyNode))
            .unwrap();
        model
            .add_element(Element::new("svc-auth", "Authentication", ElementKind::Service))
            .unwrap();
        model
            .add_element(Element::new("app-client", "Client App", ElementKind::ApplicationComponent))
            .unwrap();
        model
            .add_element(Element::new("app-server", "Server App", ElementKind::ApplicationComponent))
            .unwrap();
        model
            .add_relationship(RelationshipKind::Contains, &"dc".into(), &"svc-auth".into(), None)
            .unwrap();
        model
            .add_relationship(
                RelationshipKind::Supports,
                &"svc-auth".into(),
                &"app-client".into(),
                None,
            )
            .unwrap();
        model
            .add_relationship(
                RelationshipKind::Supports,
                &"svc-auth".into(),
                &"app-server".into(),
                None,
            )
            .unwrap();
        model
            .add_relationship(
                RelationshipKind::Satisfies,
                &"switch-acl".into(),
                &"req-1".into(),
                None,
            )
            .unwrap();
        model
            .add_relationship(
                RelationshipKind::Satisfies,
                &"switch-acl".into(),
                &"req-2".into(),
                None,
            )
            .unwrap();
        model
    }

    #[test]
    fn fork_is_identical_then_independent() {
        let base = base_model();
        let mut twin = base.fork_twin();
        assert_eq!(model_digest(&base).unwrap(), model_digest(&twin).unwrap());
        let base_digest = model_digest(&base).unwrap();
        twin.apply_changeset(&ChangeSet {
            ops: vec![ChangeOp::FailElement { id: "dc".into() }],
        })
        .unwrap();
        assert_eq!(model_digest(&base).unwrap(), base_digest);
        assert_ne!(model_digest(&twin).unwrap(), base_digest);
    }

    #[test]
    fn empty_changeset_reports_nothing() {
        let mut twin = base_model().fork_twin();
        let report = twin.apply_changeset(&ChangeSet::default()).unwrap();
        assert_eq!(report.applied_ops, 0);
        assert!(report.affected_services.is_empty());
        assert!(report.affected_requirements.is_empty());
        assert!(report.delta.is_empty());
    }

    #[test]
    fn failing_the_domain_controller_affects_dependent_apps() {
        let mut twin = base_model().fork_twin();
        let report = twin
            .apply_changeset(&ChangeSet {
                ops: vec![ChangeOp::FailElement { id: "dc".into() }],
            })
            .unwrap();
        assert_eq!(
            report.affected_services,
            vec![ElementId::new("app-client"), ElementId::new("app-server")]
        );
        assert!(report.affected_requirements.is_empty());
    }

    #[test]
    fn removing_the_satisfying_config_affects_both_requirements() {
        let mut twin = base_model().fork_twin();
        let report = twin
            .apply_changeset(&ChangeSet {
                ops: vec![ChangeOp::RemoveElement {
                    id: "switch-acl".into(),
                }],
            })
            .unwrap();
        assert_eq!(
            report.affected_requirements,
            vec![ElementId::new("req-1"), ElementId::new("req-2")]
        );
        assert!(report.affected_services.is_empty());
    }

    #[test]
    fn invalid_op_aborts_atomically() {
        let base = base_model();
        let mut twin = base.fork_twin();
        let err = twin
            .apply_changeset(&ChangeSet {
                ops: vec![
                    ChangeOp::FailElement { id: "dc".into() },
                    ChangeOp::RemoveElement { id: "ghost".into() },
                ],
            })
            .unwrap_err();
        match err {
            Error::ChangeSetAborted { index, .. } => assert_eq!(index, 1),
            other => panic!("expected ChangeSetAborted, got {other:?}"),
        }
        assert_eq!(
            model_digest(&twin).unwrap(),
            model_digest(&base).unwrap(),
            "aborted set must leave the twin untouched"
        );
    }

    #[test]
    fn fail_then_unfail_restores_reports() {
        let base = base_model();
        let mut twin = base.fork_twin();
        let coverage_before = twin.coverage_report(None);
        twin.apply_changeset(&ChangeSet {
            ops: vec![ChangeOp::FailElement {
                id: "switch".into(),
            }],
        })
        .unwrap();
        assert_eq!(twin.coverage_report(None).summary.satisfied, 0);
        twin.apply_changeset(&ChangeSet {
            ops: vec![ChangeOp::SetProperty {
                id: "switch".into(),
                key: AVAILABILITY_KEY.into(),
                value: "up".into(),
            }],
        })
        .unwrap();
        assert_eq!(twin.coverage_report(None), coverage_before);
    }

    #[test]
    fn diff_of_identical_models_is_empty() {
        let base = base_model();
        assert!(diff_models(&base, &base).is_empty());
    }

    #[test]
    fn one_set_property_yields_one_changed_entry() {
        let base = base_model();
        let mut twin = base.fork_twin();
        twin.set_property(&"dc".into(), "os", "Windows Server 2022").unwrap();
        let delta = diff_models(&base, &twin);
        assert!(delta.added.is_empty());
        assert!(delta.removed.is_empty());
        assert_eq!(delta.changed.len(), 1);
        assert_eq!(delta.changed[0].id, "element:dc");
        assert_eq!(delta.changed[0].field, "properties");
    }

    #[test]
    fn delta_ids_are_qualified_and_complete() {
        let base = base_model();
        let mut twin = base.fork_twin();
        twin.apply_changeset(&ChangeSet {
            ops: vec![
                ChangeOp::RemoveElement { id: "switch-acl".into() },
                ChangeOp::AddElement {
                    element: Element::new("app-new", "New App", ElementKind::ApplicationComponent),
                },
            ],
        })
        .unwrap();
        let delta = diff_models(&base, &twin);
        assert!(delta.added.contains(&"element:app-new".to_string()));
        assert!(delta.removed.contains(&"element:switch-acl".to_string()));
        // Cascade also removed the two Satisfies edges.
        assert_eq!(
            delta.removed.iter().filter(|id| id.starts_with("relationship:")).count(),
            2
        );
    }

    #[test]
    fn changeset_document_round_trips() {
        let changes = ChangeSet {
            ops: vec![
                ChangeOp::FailElement { id: "dc".into() },
                ChangeOp::SetProperty {
                    id: "dc".into(),
                    key: "patched".into(),
                    value: "yes".into(),
                },
                ChangeOp::AddRelationship {
                    kind: RelationshipKind::ConnectsTo,
                    source: "dc".into(),
                    target: "switch".into(),
                },
            ],
        };
        let text = serde_json::to_string(&changes).unwrap();
        assert!(text.contains("\"op\":\"fail_element\""));
        assert_eq!(changeset_from_str(&text).unwrap(), changes);
    }
}
