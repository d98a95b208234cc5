//! Shared test support: deterministic input generators and independent
//! oracles. The oracles re-derive expected results from first principles
//! (plain scans, exhaustive search, brute-force reachability) and stay
//! independent of the implementation paths they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tether_core::model::{endpoint_kinds_allowed, MATCH_KEY_PROPERTY};
use tether_core::twin::ModelDelta;
use tether_core::{
    Element, ElementId, ElementKind, Layer, Model, RelationshipKind, RequirementSubkind,
};

// ---------------------------------------------------------------------------
// Synthetic security catalog, shaped like a published OSCAL catalog
// ---------------------------------------------------------------------------

/// The twenty NIST SP 800-53 control families.
pub const FAMILIES: [(&str, &str); 20] = [
    ("ac", "Access Control"),
    ("at", "Awareness and Training"),
    ("au", "Audit and Accountability"),
    ("ca", "Assessment, Authorization, and Monitoring"),
    ("cm", "Configuration Management"),
    ("cp", "Contingency Planning"),
    ("ia", "Identification and Authentication"),
    ("ir", "Incident Response"),
    ("ma", "Maintenance"),
    ("mp", "Media Protection"),
    ("pe", "Physical and Environmental Protection"),
    ("pl", "Planning"),
    ("pm", "Program Management"),
    ("ps", "Personnel Security"),
    ("pt", "PII Processing and Transparency"),
    ("ra", "Risk Assessment"),
    ("sa", "System and Services Acquisition"),
    ("sc", "System and Communications Protection"),
    ("si", "System and Information Integrity"),
    ("sr", "Supply Chain Risk Management"),
];

#[derive(Clone, Debug)]
pub struct SynthControl {
    pub id: String,
    pub title: String,
    pub family: String,
    pub parent: Option<String>,
    pub withdrawn: bool,
}

/// A full-scale synthetic catalog: base controls and enhancements at the
/// dimensions of the published Revision 5 catalog (hundreds of base
/// controls, roughly a thousand enhancements, a few percent withdrawn).
pub struct SynthCatalog {
    pub controls: Vec<SynthControl>,
}

impl SynthCatalog {
    pub fn generate(seed: u64) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut controls = Vec::new();
        for (family_id, family_title) in FAMILIES {
            let base_count = rng.random_range(13..=21);
            for n in 1..=base_count {
                let base_id = format!("{family_id}-{n}");
                let base_withdrawn = rng.random_range(0..100) < 2;
                controls.push(SynthControl {
                    id: base_id.clone(),
                    title: format!("{family_title} Control {n}"),
                    family: family_title.to_string(),
                    parent: None,
                    withdrawn: base_withdrawn,
                });
                let enhancement_count = rng.random_range(0..=5);
                for k in 1..=enhancement_count {
                    // Enhancements of a withdrawn control are withdrawn too.
                    let withdrawn = base_withdrawn || rng.random_range(0..100) < 3;
                    controls.push(SynthControl {
                        id: format!("{base_id}.{k}"),
                        title: format!("{family_title} Control {n} Enhancement {k}"),
                        family: family_title.to_string(),
                        parent: Some(base_id.clone()),
                        withdrawn,
                    });
                }
            }
        }
        Self { controls }
    }

    pub fn live_control_ids(&self) -> Vec<&str> {
        self.controls
            .iter()
            .filter(|c| !c.withdrawn)
            .map(|c| c.id.as_str())
            .collect()
    }

    /// Render as an OSCAL catalog document (groups of controls with nested
    /// enhancement controls; withdrawn status carried in props).
    pub fn to_oscal_json(&self) -> String {
        let mut groups = Vec::new();
        for (family_id, family_title) in FAMILIES {
            let mut group_controls = Vec::new();
            for base in self
                .controls
                .iter()
                .filter(|c| c.parent.is_none() && c.family == family_title)
            {
                let enhancements: Vec<serde_json::Value> = self
                    .controls
                    .iter()
                    .filter(|c| c.parent.as_deref() == Some(base.id.as_str()))
                    .map(control_json)
                    .collect();
                let mut value = control_json(base);
                if !enhancements.is_empty() {
                    value["controls"] = serde_json::Value::Array(enhancements);
                }
                group_controls.push(value);
            }
            groups.push(serde_json::json!({
                "id": family_id,
                "class": "family",
                "title": family_title,
                "controls": group_controls,
            }));
        }
        serde_json::json!({
            "catalog": {
                "uuid": "00000000-0000-4000-8000-000000000000",
                "metadata": {
                    "title": "Security and Privacy Controls for Information Systems",
                    "version": "5"
                },
                "groups": groups,
            }
        })
        .to_string()
    }
}

fn control_json(control: &SynthControl) -> serde_json::Value {
    let mut props = vec![serde_json::json!({
        "name": "label",
        "value": control.id.to_uppercase(),
    })];
    if control.withdrawn {
        props.push(serde_json::json!({ "name": "status", "value": "withdrawn" }));
    }
    serde_json::json!({
        "id": control.id,
        "class": if control.parent.is_some() { "SP800-53-enhancement" } else { "SP800-53" },
        "title": control.title,
        "props": props,
    })
}

/// A full-scale CCI list mapped onto the catalog: thousands of records,
/// one to three mapped controls each, plus a few records with absent or
/// empty mappings to exercise the skip paths.
pub fn synth_cci_list(seed: u64, catalog: &SynthCatalog, count: usize) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let live: Vec<&str> = catalog.live_control_ids();
    let mut records = Vec::new();
    for n in 1..=count {
        let cci_id = format!("CCI-{n:06}");
        let control_ids: Vec<String> = if n % 211 == 0 {
            vec![]
        } else if n % 199 == 0 {
            vec!["zz-99".to_string()]
        } else {
            let mapped = rng.random_range(1..=3usize);
            let mut ids = BTreeSet::new();
            for _ in 0..mapped {
                ids.insert(live[rng.random_range(0..live.len())].to_string());
            }
            ids.into_iter().collect()
        };
        records.push(serde_json::json!({
            "cci_id": cci_id,
            "definition": format!("The organization implements statement {n}."),
            "control_ids": control_ids,
        }));
    }
    serde_json::Value::Array(records).to_string()
}

// ---------------------------------------------------------------------------
// Random model generators
// ---------------------------------------------------------------------------

const MIXED_KINDS: [ElementKind; 8] = [
    ElementKind::StrategicGoal,
    ElementKind::EnterpriseObjective,
    ElementKind::Requirement,
    ElementKind::ApplicationComponent,
    ElementKind::Service,
    ElementKind::TechnologyNode,
    ElementKind::NetworkDevice,
    ElementKind::ConfigurationItem,
];

/// A valid random model with mixed element kinds and up to `edge_target`
/// relationships drawn from the full kind-constraint table.
pub fn random_mixed_model(seed: u64, node_count: usize, edge_target: usize) -> Model {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = Model::new("random").unwrap();
    let mut ids = Vec::new();
    for n in 0..node_count {
        let kind = MIXED_KINDS[rng.random_range(0..MIXED_KINDS.len())];
        let id = format!("n{n:03}");
        model
            .add_element(Element::new(id.as_str(), format!("Node {n}"), kind))
            .unwrap();
        ids.push(ElementId::new(id));
    }
    let mut added = 0;
    let mut attempts = 0;
    while added < edge_target && attempts < edge_target * 30 {
        attempts += 1;
        let kind = RelationshipKind::ALL[rng.random_range(0..RelationshipKind::ALL.len())];
        let source = &ids[rng.random_range(0..ids.len())];
        let target = &ids[rng.random_range(0..ids.len())];
        if model.add_relationship(kind, source, target, None).is_ok() {
            added += 1;
        }
    }
    model
}

/// A random requirement DAG: `DerivedFrom` edges only point from lower to
/// higher indices, so the graph is acyclic by construction.
pub fn random_requirement_dag(seed: u64, node_count: usize, edge_probability: f64) -> Model {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = Model::new("dag").unwrap();
    for n in 0..node_count {
        model
            .add_element(
                Element::new(format!("r{n:03}"), format!("Requirement {n}"), ElementKind::Requirement)
                    .with_subkind(RequirementSubkind::Cybersecurity),
            )
            .unwrap();
    }
    for low in 0..node_count {
        for high in (low + 1)..node_count {
            if rng.random_bool(edge_probability) {
                model
                    .add_relationship(
                        RelationshipKind::DerivedFrom,
                        &format!("r{low:03}").as_str().into(),
                        &format!("r{high:03}").as_str().into(),
                        None,
                    )
                    .unwrap();
            }
        }
    }
    model
}

/// A large random model (top-level elements with properties, tags, and
/// sub-elements) for persistence round-trips.
pub fn random_big_model(seed: u64, element_count: usize) -> Model {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = Model::new("big").unwrap();
    let mut ids: Vec<ElementId> = Vec::new();
    let mut n = 0;
    while ids.len() < element_count {
        let kind = MIXED_KINDS[rng.random_range(0..MIXED_KINDS.len())];
        let id = format!("e{n:05}");
        let mut element = Element::new(id.as_str(), format!("Element {n}"), kind);
        if kind == ElementKind::Requirement && rng.random_bool(0.5) {
            element = element.with_subkind(RequirementSubkind::Cybersecurity);
        }
        for p in 0..rng.random_range(0..4usize) {
            element = element.with_property(format!("key_{p}"), format!("value {}", rng.random_range(0..100u32)));
        }
        if rng.random_bool(0.3) {
            element = element.with_tag(format!("tag-{}", rng.random_range(0..10u32)));
        }
        if rng.random_bool(0.2) {
            element = element.with_layer(Layer::ALL[rng.random_range(0..4)]);
        }
        let mut created = 1;
        if matches!(kind, ElementKind::TechnologyNode | ElementKind::NetworkDevice)
            && rng.random_bool(0.4)
        {
            for s in 0..rng.random_range(1..=3usize) {
                element = element.with_sub_element(
                    Element::new(
                        format!("e{n:05}-cfg{s}"),
                        format!("Config {s}"),
                        ElementKind::ConfigurationItem,
                    )
                    .with_property("setting", format!("{}", rng.random_range(0..50u32))),
                );
                created += 1;
            }
        }
        let top_id = ElementId::new(id);
        model.add_element(element).unwrap();
        for sub in model.element(&top_id).unwrap().self_and_sub_elements() {
            ids.push(sub.id.clone());
        }
        let _ = created;
        n += 1;
    }
    // Sprinkle relationships and a couple of views over the elements.
    let mut attempts = 0;
    let mut added = 0;
    while added < element_count / 2 && attempts < element_count * 20 {
        attempts += 1;
        let kind = RelationshipKind::ALL[rng.random_range(0..RelationshipKind::ALL.len())];
        let source = &ids[rng.random_range(0..ids.len())];
        let target = &ids[rng.random_range(0..ids.len())];
        if model.add_relationship(kind, source, target, None).is_ok() {
            added += 1;
        }
    }
    model
}

/// A model of bindable hosts with configuration sub-elements, for drift
/// trials. Every setting name is unique per host.
pub fn random_drift_model(seed: u64, host_count: usize) -> Model {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut model = Model::new("observed").unwrap();
    for h in 0..host_count {
        let host_id = format!("host-{h:02}");
        let kind = if rng.random_bool(0.2) {
            ElementKind::NetworkDevice
        } else {
            ElementKind::TechnologyNode
        };
        let mut host = Element::new(host_id.as_str(), format!("Host {h}"), kind)
            .with_property(MATCH_KEY_PROPERTY, format!("hk-{h:02}"));
        for s in 0..rng.random_range(1..=4usize) {
            let mut cfg = Element::new(
                format!("{host_id}-cfg-{s}"),
                format!("Setting {s}"),
                ElementKind::ConfigurationItem,
            );
            for a in 0..rng.random_range(1..=3usize) {
                cfg = cfg.with_property(format!("attr_{a}"), format!("v{}", rng.random_range(0..9u32)));
            }
            host = host.with_sub_element(cfg);
        }
        model.add_element(host).unwrap();
    }
    model
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Brute-force impact oracle: expand the propagation rule table into a
/// directed edge list, then run plain breadth-first reachability.
pub fn oracle_impact_distances(model: &Model, origin: &ElementId) -> BTreeMap<ElementId, usize> {
    use RelationshipKind::*;
    let mut edges: Vec<(ElementId, ElementId)> = Vec::new();
    for rel in &model.relationships {
        match rel.kind {
            Satisfies | Realizes | DerivedFrom => {
                edges.push((rel.target.clone(), rel.source.clone()));
            }
            ConnectsTo | ExchangesWith => {
                edges.push((rel.source.clone(), rel.target.clone()));
                edges.push((rel.target.clone(), rel.source.clone()));
            }
            Contains | AssignedConfiguration => {
                edges.push((rel.source.clone(), rel.target.clone()));
            }
            AllocatedTo | Supports => {}
        }
    }
    let mut adjacency: HashMap<&ElementId, Vec<&ElementId>> = HashMap::new();
    for (from, to) in &edges {
        adjacency.entry(from).or_default().push(to);
    }
    let mut dist: BTreeMap<ElementId, usize> = BTreeMap::new();
    let mut queue = VecDeque::new();
    dist.insert(origin.clone(), 0);
    queue.push_back(origin.clone());
    while let Some(at) = queue.pop_front() {
        let here = dist[&at];
        if let Some(next) = adjacency.get(&at) {
            for to in next.clone() {
                if !dist.contains_key(to) {
                    dist.insert(to.clone(), here + 1);
                    queue.push_back(to.clone());
                }
            }
        }
    }
    dist.remove(origin);
    dist
}

/// Exhaustive simple-path oracle for strategic trace: derive the hop set
/// for the direction from the polarity rules, then enumerate every simple
/// path by depth-first search.
pub fn oracle_trace_paths(
    model: &Model,
    origin: &ElementId,
    upstream: bool,
    max_depth: Option<usize>,
) -> Vec<Vec<(ElementId, RelationshipKind)>> {
    use RelationshipKind::*;
    let mut hops: Vec<(ElementId, ElementId, RelationshipKind)> = Vec::new();
    for rel in &model.relationships {
        match rel.kind {
            DerivedFrom | Satisfies | Realizes | Supports => {
                if upstream {
                    hops.push((rel.source.clone(), rel.target.clone(), rel.kind));
                } else {
                    hops.push((rel.target.clone(), rel.source.clone(), rel.kind));
                }
            }
            AllocatedTo => {
                if upstream {
                    hops.push((rel.target.clone(), rel.source.clone(), rel.kind));
                } else {
                    hops.push((rel.source.clone(), rel.target.clone(), rel.kind));
                }
            }
            Contains | AssignedConfiguration => {
                hops.push((rel.source.clone(), rel.target.clone(), rel.kind));
                hops.push((rel.target.clone(), rel.source.clone(), rel.kind));
            }
            ConnectsTo | ExchangesWith => {}
        }
    }
    let mut adjacency: BTreeMap<&ElementId, BTreeSet<(&ElementId, RelationshipKind)>> =
        BTreeMap::new();
    for (from, to, kind) in &hops {
        adjacency.entry(from).or_default().insert((to, *kind));
    }

    let mut paths = Vec::new();
    let mut stack: Vec<(ElementId, RelationshipKind)> = Vec::new();
    let mut visited: HashSet<ElementId> = HashSet::new();
    visited.insert(origin.clone());

    fn dfs(
        at: &ElementId,
        adjacency: &BTreeMap<&ElementId, BTreeSet<(&ElementId, RelationshipKind)>>,
        visited: &mut HashSet<ElementId>,
        stack: &mut Vec<(ElementId, RelationshipKind)>,
        paths: &mut Vec<Vec<(ElementId, RelationshipKind)>>,
        max_depth: Option<usize>,
    ) {
        if let Some(limit) = max_depth {
            if stack.len() >= limit {
                return;
            }
        }
        if let Some(next) = adjacency.get(at) {
            for (to, kind) in next {
                if visited.contains(*to) {
                    continue;
                }
                visited.insert((*to).clone());
                stack.push(((*to).clone(), *kind));
                paths.push(stack.clone());
                dfs(to, adjacency, visited, stack, paths, max_depth);
                stack.pop();
                visited.remove(*to);
            }
        }
    }

    dfs(origin, &adjacency, &mut visited, &mut stack, &mut paths, max_depth);
    paths.sort();
    paths
}

/// Transitive-closure oracle over requirement `DerivedFrom` edges:
/// (direct pair count, indirect pair count).
pub fn oracle_closure_pairs(model: &Model) -> (usize, usize) {
    let requirement_ids: BTreeSet<&ElementId> = model
        .all_elements()
        .into_iter()
        .filter(|e| e.kind == ElementKind::Requirement)
        .map(|e| &e.id)
        .collect();
    let mut direct: BTreeSet<(&ElementId, &ElementId)> = BTreeSet::new();
    for rel in &model.relationships {
        if rel.kind == RelationshipKind::DerivedFrom
            && requirement_ids.contains(&rel.source)
            && requirement_ids.contains(&rel.target)
        {
            direct.insert((&rel.source, &rel.target));
        }
    }
    let mut adjacency: HashMap<&ElementId, Vec<&ElementId>> = HashMap::new();
    for (s, t) in &direct {
        adjacency.entry(s).or_default().push(t);
    }
    let mut closure: BTreeSet<(&ElementId, &ElementId)> = BTreeSet::new();
    for &start in &requirement_ids {
        let mut seen: HashSet<&ElementId> = HashSet::new();
        let mut queue = VecDeque::new();
        queue.push_back(start);
        seen.insert(start);
        while let Some(at) = queue.pop_front() {
            if let Some(next) = adjacency.get(at) {
                for &to in next {
                    if seen.insert(to) {
                        closure.insert((start, to));
                        queue.push_back(to);
                    }
                }
            }
        }
    }
    let indirect = closure.difference(&direct).count();
    (direct.len(), indirect)
}

/// Full-model scan for everything a cascade removal of `id` must take
/// with it: the element, its sub-elements, and all incident edges.
pub fn oracle_removal_set(
    model: &Model,
    id: &ElementId,
) -> (BTreeSet<ElementId>, BTreeSet<ElementId>) {
    let mut element_ids = BTreeSet::new();
    if let Some(el) = model.element(id) {
        for e in el.self_and_sub_elements() {
            element_ids.insert(e.id.clone());
        }
    }
    let edge_ids = model
        .relationships
        .iter()
        .filter(|r| element_ids.contains(&r.source) || element_ids.contains(&r.target))
        .map(|r| r.id.clone())
        .collect();
    (element_ids, edge_ids)
}

/// Replay a delta onto the base, pulling added records from the twin, and
/// return the reconstruction. Completeness of the delta means the result
/// equals the twin byte for byte.
pub fn replay_delta(base: &Model, delta: &ModelDelta, twin: &Model) -> Model {
    let mut out = base.clone();

    for id in &delta.removed {
        if let Some(raw) = id.strip_prefix("element:") {
            let _ = out.remove_element(&raw.into(), tether_core::RemovalMode::Cascade);
        }
    }
    for id in &delta.removed {
        if let Some(raw) = id.strip_prefix("relationship:") {
            let _ = out.remove_relationship(&raw.into());
        } else if let Some(raw) = id.strip_prefix("stereotype:") {
            out.stereotypes.retain(|s| s.name != raw);
        } else if let Some(raw) = id.strip_prefix("view:") {
            out.views.retain(|v| v.id.as_str() != raw);
        }
    }

    // Added elements: copy from the twin, parents before children so the
    // sub-element attach point exists.
    let mut added_elements: Vec<&str> = delta
        .added
        .iter()
        .filter_map(|id| id.strip_prefix("element:"))
        .collect();
    added_elements.sort_by_key(|raw| {
        let mut depth = 0;
        let mut at = ElementId::new(*raw);
        while let Some(parent) = twin.parent_of(&at) {
            depth += 1;
            at = parent.clone();
        }
        depth
    });
    for raw in added_elements {
        let id = ElementId::new(raw);
        let mut record = twin.element(&id).cloned().expect("added element in twin");
        record.sub_elements.clear();
        match twin.parent_of(&id) {
            None => {
                out.elements.push(record);
                out.elements.sort_by(|a, b| a.id.cmp(&b.id));
            }
            Some(parent) => {
                let parent_el = out.element_mut(parent).expect("parent replayed first");
                parent_el.sub_elements.push(record);
                parent_el.sub_elements.sort_by(|a, b| a.id.cmp(&b.id));
            }
        }
    }
    for id in &delta.added {
        if let Some(raw) = id.strip_prefix("relationship:") {
            let record = twin.relationship(&raw.into()).cloned().expect("added edge in twin");
            out.relationships.push(record);
            out.relationships.sort_by(|a, b| a.id.cmp(&b.id));
        } else if let Some(raw) = id.strip_prefix("stereotype:") {
            let record = twin.stereotype(raw).cloned().expect("added stereotype in twin");
            out.stereotypes.push(record);
            out.stereotypes.sort_by(|a, b| a.name.cmp(&b.name));
        } else if let Some(raw) = id.strip_prefix("view:") {
            let record = twin.view(&raw.into()).cloned().expect("added view in twin");
            out.views.push(record);
            out.views.sort_by(|a, b| a.id.cmp(&b.id));
        }
    }

    // Changed fields: overwrite via serde so every field kind replays the
    // same way.
    for change in &delta.changed {
        if let Some(raw) = change.id.strip_prefix("element:") {
            let id = ElementId::new(raw);
            let el = out.element_mut(&id).expect("changed element present");
            let mut value = serde_json::to_value(&*el).unwrap();
            value[&change.field] = change.after.clone();
            let subs = std::mem::take(&mut el.sub_elements);
            value["sub_elements"] = serde_json::Value::Array(vec![]);
            value.as_object_mut().unwrap().remove("parent");
            let mut replayed: Element = serde_json::from_value(value).unwrap();
            replayed.sub_elements = subs;
            *el = replayed;
        } else if let Some(raw) = change.id.strip_prefix("relationship:") {
            let at = out
                .relationships
                .iter()
                .position(|r| r.id.as_str() == raw)
                .expect("changed relationship present");
            let mut value = serde_json::to_value(&out.relationships[at]).unwrap();
            value[&change.field] = change.after.clone();
            out.relationships[at] = serde_json::from_value(value).unwrap();
        } else if let Some(raw) = change.id.strip_prefix("stereotype:") {
            let at = out
                .stereotypes
                .iter()
                .position(|s| s.name == raw)
                .expect("changed stereotype present");
            let mut value = serde_json::to_value(&out.stereotypes[at]).unwrap();
            value[&change.field] = change.after.clone();
            out.stereotypes[at] = serde_json::from_value(value).unwrap();
        } else if let Some(raw) = change.id.strip_prefix("view:") {
            let at = out
                .views
                .iter()
                .position(|v| v.id.as_str() == raw)
                .expect("changed view present");
            let mut value = serde_json::to_value(&out.views[at]).unwrap();
            value[&change.field] = change.after.clone();
            out.views[at] = serde_json::from_value(value).unwrap();
        }
    }
    out
}

/// Count satisfied requirements by a plain linear edge scan.
pub fn oracle_satisfied_requirements(model: &Model) -> BTreeSet<ElementId> {
    let unavailable = model.unavailable_ids();
    let requirement_ids: BTreeSet<ElementId> = model
        .all_elements()
        .into_iter()
        .filter(|e| e.kind == ElementKind::Requirement)
        .map(|e| e.id.clone())
        .collect();
    model
        .relationships
        .iter()
        .filter(|r| r.kind == RelationshipKind::Satisfies)
        .filter(|r| !unavailable.contains(&r.source))
        .filter(|r| requirement_ids.contains(&r.target))
        .map(|r| r.target.clone())
        .collect()
}

/// Random (kind-legal) relationship endpoints, used to grow models inside
/// property tests.
pub fn legal_edge(
    rng: &mut StdRng,
    model: &Model,
) -> Option<(RelationshipKind, ElementId, ElementId)> {
    let elements: Vec<&Element> = model.all_elements();
    if elements.len() < 2 {
        return None;
    }
    for _ in 0..50 {
        let kind = RelationshipKind::ALL[rng.random_range(0..RelationshipKind::ALL.len())];
        let source = elements[rng.random_range(0..elements.len())];
        let target = elements[rng.random_range(0..elements.len())];
        if source.id != target.id && endpoint_kinds_allowed(kind, source.kind, target.kind) {
            return Some((kind, source.id.clone(), target.id.clone()));
        }
    }
    None
}
