//! Security-catalog ingestion: OSCAL control catalogs and CCI lists.
//!
//! Controls and control enhancements become `Cybersecurity` requirements
//! (element id = control id) hanging off a caller-designated root
//! requirement via `DerivedFrom` edges; CCIs become `DerivedCybersecurity`
//! requirements with a `DerivedFrom` edge to every mapped control present
//! in the model. Ingestion is deterministic and idempotent: element and
//! edge ids derive from catalog ids, so re-running on an unchanged input
//! creates nothing.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Element, ElementId, ElementKind, Layer, Model, Relationship, RelationshipKind,
    RequirementSubkind,
};
use crate::store::digest_hex;

/// One control or control enhancement flattened out of an OSCAL catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlRecord {
    pub control_id: String,
    pub title: String,
    pub family: String,
    pub is_enhancement: bool,
    pub parent_control_id: Option<String>,
    pub withdrawn: bool,
}

/// One CCI entry: a fine-grained statement mapped to one or more controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CciRecord {
    pub cci_id: String,
    pub definition: String,
    pub control_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedRecord {
    pub id: String,
    pub reason: String,
}

/// Outcome of one ingest run. Every input record is either created or
/// listed in `skipped`, so `elements_created + skipped.len()` always equals
/// the input record count.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub elements_created: usize,
    pub edges_created: usize,
    pub skipped: Vec<SkippedRecord>,
    pub source_digest: String,
}

/// Requirement-graph size summary. `total_records` counts requirement
/// elements, direct `DerivedFrom` edges between them, and the indirect
/// (transitive, non-direct) derivation pairs — one number for the full
/// footprint of the requirements web.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct RequirementStats {
    pub requirement_elements: usize,
    pub direct_requirement_edges: usize,
    pub indirect_pairs: usize,
    pub total_records: usize,
}

// ---- OSCAL parsing ---------------------------------------------------------

#[derive(Deserialize)]
struct OscalDocument {
    catalog: OscalCatalog,
}

#[derive(Deserialize)]
struct OscalCatalog {
    #[serde(default)]
    groups: Vec<OscalGroup>,
    #[serde(default)]
    controls: Vec<OscalControl>,
}

#[derive(Deserialize)]
struct OscalGroup {
    #[serde(default)]
    title: String,
    #[serde(default)]
    groups: Vec<OscalGroup>,
    #[serde(default)]
    controls: Vec<OscalControl>,
}

#[derive(Deserialize)]
struct OscalControl {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    props: Vec<OscalProp>,
    #[serde(default)]
    controls: Vec<OscalControl>,
}

#[derive(Deserialize)]
struct OscalProp {
    #[serde(default)]
    name: String,
    #[serde(default)]
    value: String,
}

impl OscalControl {
    fn is_withdrawn(&self) -> bool {
        self.props
            .iter()
            .any(|p| p.name == "status" && p.value.eq_ignore_ascii_case("withdrawn"))
    }
}

/// Flatten an OSCAL catalog document into control records, parents before
/// their enhancements, in document order.
pub fn parse_oscal_catalog(text: &str) -> Result<Vec<ControlRecord>> {
    let doc: OscalDocument =
        serde_json::from_str(text).map_err(|e| Error::parse_from_json(&e))?;
    let mut records = Vec::new();

    fn walk_control(
        control: &OscalControl,
        family: &str,
        parent: Option<&str>,
        out: &mut Vec<ControlRecord>,
    ) {
        out.push(ControlRecord {
            control_id: control.id.clone(),
            title: control.title.clone(),
            family: family.to_string(),
            is_enhancement: parent.is_some(),
            parent_control_id: parent.map(str::to_string),
            withdrawn: control.is_withdrawn(),
        });
        for child in &control.controls {
            walk_control(child, family, Some(&control.id), out);
        }
    }

    fn walk_group(group: &OscalGroup, out: &mut Vec<ControlRecord>) {
        for control in &group.controls {
            walk_control(control, &group.title, None, out);
        }
        for sub in &group.groups {
            walk_group(sub, out);
        }
    }

    for group in &doc.catalog.groups {
        walk_group(group, &mut records);
    }
    for control in &doc.catalog.controls {
        walk_control(control, "", None, &mut records);
    }
    Ok(records)
}

/// Parse a CCI list document: a JSON array of `CciRecord` entries.
pub fn parse_cci_list(text: &str) -> Result<Vec<CciRecord>> {
    serde_json::from_str(text).map_err(|e| Error::parse_from_json(&e))
}

// ---- ingestion -------------------------------------------------------------

/// Tracks model ids and edge triples once per ingest run so that the hot
/// loops stay linear over the input.
struct IngestState {
    known_ids: HashSet<String>,
    requirement_ids: HashSet<String>,
    triples: HashSet<(RelationshipKind, String, String)>,
    new_elements: Vec<Element>,
    new_relationships: Vec<Relationship>,
}

impl IngestState {
    fn from_model(model: &Model) -> Self {
        let mut known_ids = HashSet::new();
        let mut requirement_ids = HashSet::new();
        for el in model.all_elements() {
            known_ids.insert(el.id.to_string());
            if el.kind == ElementKind::Requirement {
                requirement_ids.insert(el.id.to_string());
            }
        }
        let triples = model
            .relationships
            .iter()
            .map(|r| (r.kind, r.source.to_string(), r.target.to_string()))
            .collect();
        Self {
            known_ids,
            requirement_ids,
            triples,
            new_elements: Vec::new(),
            new_relationships: Vec::new(),
        }
    }

    fn add_requirement(&mut self, element: Element) {
        self.known_ids.insert(element.id.to_string());
        self.requirement_ids.insert(element.id.to_string());
        self.new_elements.push(element);
    }

    /// Add a DerivedFrom edge unless the triple already exists. Returns
    /// true when an edge was created.
    fn ensure_derived_from(&mut self, source: &str, target: &str) -> bool {
        if source == target {
            return false;
        }
        let key = (
            RelationshipKind::DerivedFrom,
            source.to_string(),
            target.to_string(),
        );
        if self.triples.contains(&key) {
            return false;
        }
        self.triples.insert(key);
        let source_id = ElementId::new(source);
        let target_id = ElementId::new(target);
        self.new_relationships.push(Relationship {
            id: Relationship::derived_id(RelationshipKind::DerivedFrom, &source_id, &target_id),
            kind: RelationshipKind::DerivedFrom,
            source: source_id,
            target: target_id,
            note: None,
        });
        true
    }

    fn commit(self, model: &mut Model) {
        model.elements.extend(self.new_elements);
        model.elements.sort_by(|a, b| a.id.cmp(&b.id));
        model.relationships.extend(self.new_relationships);
        model.relationships.sort_by(|a, b| a.id.cmp(&b.id));
    }
}

impl Model {
    /// Ingest an OSCAL catalog document. One `Cybersecurity` requirement
    /// per control and per enhancement; base controls derive from
    /// `rmf_root`, enhancements from their base control. Withdrawn
    /// controls are skipped, as are records whose id already exists.
    pub fn ingest_oscal_catalog(
        &mut self,
        catalog_text: &str,
        rmf_root: &ElementId,
    ) -> Result<IngestReport> {
        let records = parse_oscal_catalog(catalog_text)?;
        match self.element(rmf_root) {
            None => return Err(Error::NotFound(format!("rmf root {rmf_root}"))),
            Some(el) if el.kind != ElementKind::Requirement => {
                return Err(Error::Constraint(format!(
                    "rmf root {rmf_root} must be a Requirement, found {}",
                    el.kind
                )))
            }
            Some(_) => {}
        }

        let mut state = IngestState::from_model(self);
        let mut report = IngestReport {
            source_digest: digest_hex(catalog_text.as_bytes()),
            ..IngestReport::default()
        };

        for record in &records {
            if record.withdrawn {
                report.skipped.push(SkippedRecord {
                    id: record.control_id.clone(),
                    reason: "withdrawn".into(),
                });
                continue;
            }
            let parent: &str = record
                .parent_control_id
                .as_deref()
                .unwrap_or(rmf_root.as_str());
            if !state.requirement_ids.contains(parent) {
                report.skipped.push(SkippedRecord {
                    id: record.control_id.clone(),
                    reason: format!("parent control {parent} not ingested"),
                });
                continue;
            }
            if state.known_ids.contains(&record.control_id) {
                let reason = if state.requirement_ids.contains(&record.control_id) {
                    // Re-ingest: ensure derivation edges exist, create nothing.
                    if state.ensure_derived_from(&record.control_id, parent) {
                        report.edges_created += 1;
                    }
                    "already present".to_string()
                } else {
                    "id already used by a non-requirement element".to_string()
                };
                report.skipped.push(SkippedRecord {
                    id: record.control_id.clone(),
                    reason,
                });
                continue;
            }

            let element = Element::new(
                record.control_id.as_str(),
                if record.title.is_empty() {
                    record.control_id.clone()
                } else {
                    record.title.clone()
                },
                ElementKind::Requirement,
            )
            .with_subkind(RequirementSubkind::Cybersecurity)
            .with_layer(Layer::Requirements)
            .with_property("family", record.family.clone());
            state.add_requirement(element);
            report.elements_created += 1;
            if state.ensure_derived_from(&record.control_id, parent) {
                report.edges_created += 1;
            }
        }

        state.commit(self);
        Ok(report)
    }

    /// Ingest a CCI list. One `DerivedCybersecurity` requirement per CCI,
    /// with a `DerivedFrom` edge to every mapped control present in the
    /// model; CCIs whose mapped controls are all absent are skipped.
    pub fn ingest_cci_list(&mut self, cci_text: &str) -> Result<IngestReport> {
        let records = parse_cci_list(cci_text)?;
        let mut state = IngestState::from_model(self);
        let mut report = IngestReport {
            source_digest: digest_hex(cci_text.as_bytes()),
            ..IngestReport::default()
        };

        for record in &records {
            if record.control_ids.is_empty() {
                report.skipped.push(SkippedRecord {
                    id: record.cci_id.clone(),
                    reason: "no mapped controls".into(),
                });
                continue;
            }
            let mut mapped: Vec<&str> = record
                .control_ids
                .iter()
                .map(String::as_str)
                .filter(|id| state.requirement_ids.contains(*id))
                .collect();
            mapped.sort_unstable();
            mapped.dedup();
            if mapped.is_empty() {
                report.skipped.push(SkippedRecord {
                    id: record.cci_id.clone(),
                    reason: "mapped controls absent from model".into(),
                });
                continue;
            }
            if state.known_ids.contains(&record.cci_id) {
                let reason = if state.requirement_ids.contains(&record.cci_id) {
                    for control in &mapped {
                        if state.ensure_derived_from(&record.cci_id, control) {
                            report.edges_created += 1;
                        }
                    }
                    "already present".to_string()
                } else {
                    "id already used by a non-requirement element".to_string()
                };
                report.skipped.push(SkippedRecord {
                    id: record.cci_id.clone(),
                    reason,
                });
                continue;
            }

            let element = Element::new(
                record.cci_id.as_str(),
                record.cci_id.clone(),
                ElementKind::Requirement,
            )
            .with_subkind(RequirementSubkind::DerivedCybersecurity)
            .with_layer(Layer::Requirements)
            .with_property("definition", record.definition.clone());
            state.add_requirement(element);
            report.elements_created += 1;
            for control in &mapped {
                if state.ensure_derived_from(&record.cci_id, control) {
                    report.edges_created += 1;
                }
            }
        }

        state.commit(self);
        Ok(report)
    }

    /// Size of the requirements web: elements, direct derivation edges,
    /// and indirect (transitive-closure) derivation pairs.
    pub fn requirement_stats(&self) -> RequirementStats {
        let requirement_ids: Vec<&ElementId> = self
            .all_elements()
            .into_iter()
            .filter(|e| e.kind == ElementKind::Requirement)
            .map(|e| &e.id)
            .collect();
        let index: HashMap<&ElementId, usize> = requirement_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (*id, i))
            .collect();

        let mut direct: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for rel in &self.relationships {
            if rel.kind != RelationshipKind::DerivedFrom {
                continue;
            }
            let (Some(&s), Some(&t)) = (index.get(&rel.source), index.get(&rel.target)) else {
                continue;
            };
            if direct.insert((s, t)) {
                adjacency.entry(s).or_default().push(t);
            }
        }

        // Reachable pairs via BFS from every node; works on any graph, not
        // just DAGs, so hand-edited cyclic files still terminate.
        let n = requirement_ids.len();
        let mut closure_pairs = 0usize;
        let mut seen = vec![false; n];
        for start in 0..n {
            let mut touched: Vec<usize> = Vec::new();
            let mut queue = VecDeque::new();
            queue.push_back(start);
            seen[start] = true;
            touched.push(start);
            while let Some(at) = queue.pop_front() {
                if let Some(next) = adjacency.get(&at) {
                    for &to in next {
                        if !seen[to] {
                            seen[to] = true;
                            touched.push(to);
                            queue.push_back(to);
                        }
                    }
                }
            }
            // Reachable set minus self.
            closure_pairs += touched.len() - 1;
            for at in touched {
                seen[at] = false;
            }
        }

        let requirement_elements = n;
        let direct_requirement_edges = direct.len();
        let indirect_pairs = closure_pairs - direct_requirement_edges;
        RequirementStats {
            requirement_elements,
            direct_requirement_edges,
            indirect_pairs,
            total_records: requirement_elements + direct_requirement_edges + indirect_pairs,
        }
    }
}
