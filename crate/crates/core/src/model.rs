//! The authoritative element/relationship graph.
//!
//! A [`Model`] is the single stored definition of every element: views,
//! relationships, and reports all reference elements by id and never copy
//! them. Mutating operations keep the collections sorted and enforce the
//! structural invariants (unique ids, resolvable endpoints, endpoint-kind
//! constraints); [`crate::validate`] re-checks the same invariants over
//! models loaded from files.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::view::View;

/// Schema version written by this build; files declaring a higher major
/// version are rejected at load.
pub const SCHEMA_VERSION: &str = "1";

/// Property key that marks an element unavailable without removing it.
pub const AVAILABILITY_KEY: &str = "availability";
/// Property value that marks an element as failed.
pub const AVAILABILITY_FAILED: &str = "failed";
/// Property key that binds a declared hardware element to observed state.
pub const MATCH_KEY_PROPERTY: &str = "match_key";

/// Stable identifier for an element, relationship, or view.
///
/// Ids never change across edits; names may. Ordering is lexicographic,
/// which fixes the canonical file order and every report ordering.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        Self::new(s)
    }
}

/// Closed set of element kinds. Unknown kinds are rejected when a file is
/// parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    StrategicGoal,
    EnterpriseObjective,
    BusinessDriver,
    SecurityDriver,
    Requirement,
    ApplicationComponent,
    Service,
    TechnologyNode,
    NetworkDevice,
    ConfigurationItem,
    ExternalSystem,
}

impl ElementKind {
    pub const ALL: [ElementKind; 11] = [
        ElementKind::StrategicGoal,
        ElementKind::EnterpriseObjective,
        ElementKind::BusinessDriver,
        ElementKind::SecurityDriver,
        ElementKind::Requirement,
        ElementKind::ApplicationComponent,
        ElementKind::Service,
        ElementKind::TechnologyNode,
        ElementKind::NetworkDevice,
        ElementKind::ConfigurationItem,
        ElementKind::ExternalSystem,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ElementKind::StrategicGoal => "StrategicGoal",
            ElementKind::EnterpriseObjective => "EnterpriseObjective",
            ElementKind::BusinessDriver => "BusinessDriver",
            ElementKind::SecurityDriver => "SecurityDriver",
            ElementKind::Requirement => "Requirement",
            ElementKind::ApplicationComponent => "ApplicationComponent",
            ElementKind::Service => "Service",
            ElementKind::TechnologyNode => "TechnologyNode",
            ElementKind::NetworkDevice => "NetworkDevice",
            ElementKind::ConfigurationItem => "ConfigurationItem",
            ElementKind::ExternalSystem => "ExternalSystem",
        }
    }

    /// Conceptual-layer kinds: the origins of every traceability chain.
    pub fn is_strategic(&self) -> bool {
        matches!(
            self,
            ElementKind::StrategicGoal
                | ElementKind::EnterpriseObjective
                | ElementKind::BusinessDriver
                | ElementKind::SecurityDriver
        )
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ElementKind::ALL
            .iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown element kind: {s}")))
    }
}

/// Requirement refinement; only `Requirement` elements carry one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RequirementSubkind {
    Functional,
    Cybersecurity,
    DerivedCybersecurity,
}

impl RequirementSubkind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RequirementSubkind::Functional => "Functional",
            RequirementSubkind::Cybersecurity => "Cybersecurity",
            RequirementSubkind::DerivedCybersecurity => "DerivedCybersecurity",
        }
    }
}

impl fmt::Display for RequirementSubkind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RequirementSubkind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "functional" => Ok(RequirementSubkind::Functional),
            "cybersecurity" => Ok(RequirementSubkind::Cybersecurity),
            "derivedcybersecurity" => Ok(RequirementSubkind::DerivedCybersecurity),
            _ => Err(Error::InvalidInput(format!(
                "unknown requirement subkind: {s}"
            ))),
        }
    }
}

/// Architectural layers an element may be tagged with. An element may carry
/// several tags or none; untagged elements simply appear in no layer report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Layer {
    Conceptual,
    Requirements,
    Application,
    Technology,
}

impl Layer {
    pub const ALL: [Layer; 4] = [
        Layer::Conceptual,
        Layer::Requirements,
        Layer::Application,
        Layer::Technology,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Layer::Conceptual => "Conceptual",
            Layer::Requirements => "Requirements",
            Layer::Application => "Application",
            Layer::Technology => "Technology",
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Layer::ALL
            .iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown layer: {s}")))
    }
}

/// Closed set of relationship kinds, each with fixed endpoint-kind
/// constraints (see [`endpoint_kinds_allowed`]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationshipKind {
    DerivedFrom,
    Satisfies,
    Realizes,
    AllocatedTo,
    ConnectsTo,
    ExchangesWith,
    Contains,
    AssignedConfiguration,
    Supports,
}

impl RelationshipKind {
    pub const ALL: [RelationshipKind; 9] = [
        RelationshipKind::DerivedFrom,
        RelationshipKind::Satisfies,
        RelationshipKind::Realizes,
        RelationshipKind::AllocatedTo,
        RelationshipKind::ConnectsTo,
        RelationshipKind::ExchangesWith,
        RelationshipKind::Contains,
        RelationshipKind::AssignedConfiguration,
        RelationshipKind::Supports,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RelationshipKind::DerivedFrom => "DerivedFrom",
            RelationshipKind::Satisfies => "Satisfies",
            RelationshipKind::Realizes => "Realizes",
            RelationshipKind::AllocatedTo => "AllocatedTo",
            RelationshipKind::ConnectsTo => "ConnectsTo",
            RelationshipKind::ExchangesWith => "ExchangesWith",
            RelationshipKind::Contains => "Contains",
            RelationshipKind::AssignedConfiguration => "AssignedConfiguration",
            RelationshipKind::Supports => "Supports",
        }
    }

    /// Kebab form used inside generated relationship ids.
    pub fn as_kebab(&self) -> &'static str {
        match self {
            RelationshipKind::DerivedFrom => "derived-from",
            RelationshipKind::Satisfies => "satisfies",
            RelationshipKind::Realizes => "realizes",
            RelationshipKind::AllocatedTo => "allocated-to",
            RelationshipKind::ConnectsTo => "connects-to",
            RelationshipKind::ExchangesWith => "exchanges-with",
            RelationshipKind::Contains => "contains",
            RelationshipKind::AssignedConfiguration => "assigned-configuration",
            RelationshipKind::Supports => "supports",
        }
    }
}

impl fmt::Display for RelationshipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationshipKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let squashed = s.replace(['-', '_'], "");
        RelationshipKind::ALL
            .iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(&squashed))
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("unknown relationship kind: {s}")))
    }
}

/// Legal endpoint kinds per relationship kind.
///
/// The table mirrors the layer flow of the model: strategy at the top,
/// requirements in the middle, architecture and configurations below.
/// `Supports` additionally admits provider edges between services and
/// application components so that runtime dependencies (authentication,
/// logging) are declarable and simulation can sever them.
pub fn endpoint_kinds_allowed(
    kind: RelationshipKind,
    source: ElementKind,
    target: ElementKind,
) -> bool {
    use ElementKind::*;
    use RelationshipKind::*;

    let connectable = |k: ElementKind| {
        matches!(
            k,
            ApplicationComponent | Service | TechnologyNode | NetworkDevice | ExternalSystem
        )
    };

    match kind {
        DerivedFrom => {
            source == Requirement
                && matches!(
                    target,
                    Requirement | StrategicGoal | EnterpriseObjective | BusinessDriver
                        | SecurityDriver
                )
        }
        Satisfies => {
            matches!(
                source,
                ConfigurationItem | ApplicationComponent | TechnologyNode | Service
            ) && target == Requirement
        }
        Realizes => {
            (matches!(source, ApplicationComponent | Service) && target == Requirement)
                || (source == TechnologyNode && target == ApplicationComponent)
        }
        AllocatedTo => {
            source == Requirement && matches!(target, ApplicationComponent | TechnologyNode)
        }
        ConnectsTo | ExchangesWith => connectable(source) && connectable(target),
        Contains => true,
        AssignedConfiguration => {
            matches!(source, TechnologyNode | NetworkDevice | ApplicationComponent)
                && target == ConfigurationItem
        }
        Supports => {
            (source == EnterpriseObjective && target == StrategicGoal)
                || (matches!(source, BusinessDriver | SecurityDriver)
                    && target == EnterpriseObjective)
                || (matches!(source, Service | TechnologyNode)
                    && matches!(target, ApplicationComponent | Service))
        }
    }
}

/// A model element. Sub-elements are owned: their ids are unique
/// model-wide and each appears under exactly one parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub name: String,
    pub kind: ElementKind,
    pub subkind: Option<RequirementSubkind>,
    pub layer_tags: BTreeSet<Layer>,
    pub properties: BTreeMap<String, String>,
    pub tags: BTreeSet<String>,
    pub documentation: Vec<String>,
    pub sub_elements: Vec<Element>,
    pub stereotype: Option<String>,
}

impl Element {
    pub fn new(id: impl Into<ElementId>, name: impl Into<String>, kind: ElementKind) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            kind,
            subkind: None,
            layer_tags: BTreeSet::new(),
            properties: BTreeMap::new(),
            tags: BTreeSet::new(),
            documentation: Vec::new(),
            sub_elements: Vec::new(),
            stereotype: None,
        }
    }

    pub fn with_subkind(mut self, subkind: RequirementSubkind) -> Self {
        self.subkind = Some(subkind);
        self
    }

    pub fn with_layer(mut self, layer: Layer) -> Self {
        self.layer_tags.insert(layer);
        self
    }

    pub fn with_property(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.properties.insert(key.into(), value.into());
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tags.insert(tag.into());
        self
    }

    pub fn with_documentation(mut self, doc: impl Into<String>) -> Self {
        self.documentation.push(doc.into());
        self
    }

    pub fn with_sub_element(mut self, sub: Element) -> Self {
        let at = self
            .sub_elements
            .binary_search_by(|e| e.id.cmp(&sub.id))
            .unwrap_or_else(|i| i);
        self.sub_elements.insert(at, sub);
        self
    }

    pub fn with_stereotype(mut self, name: impl Into<String>) -> Self {
        self.stereotype = Some(name.into());
        self
    }

    /// True when the element has been marked failed (see twin simulation).
    pub fn is_failed(&self) -> bool {
        self.properties.get(AVAILABILITY_KEY).map(String::as_str) == Some(AVAILABILITY_FAILED)
    }

    /// This element and every transitively owned sub-element.
    pub fn self_and_sub_elements(&self) -> Vec<&Element> {
        let mut out = vec![self];
        for sub in &self.sub_elements {
            out.extend(sub.self_and_sub_elements());
        }
        out
    }
}

/// A typed, directed edge between two elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relationship {
    pub id: ElementId,
    pub kind: RelationshipKind,
    pub source: ElementId,
    pub target: ElementId,
    pub note: Option<String>,
}

impl Relationship {
    /// Deterministic id for a (source, kind, target) triple. Triples are
    /// unique per model, so generated ids are too.
    pub fn derived_id(kind: RelationshipKind, source: &ElementId, target: &ElementId) -> ElementId {
        ElementId::new(format!("{source}--{}--{target}", kind.as_kebab()))
    }
}

/// Reusable element template: default properties plus baseline
/// configuration sub-elements, applied across every assigned element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stereotype {
    pub name: String,
    pub applies_to: ElementKind,
    pub default_properties: BTreeMap<String, String>,
    pub baseline_sub_elements: Vec<Element>,
}

impl Stereotype {
    pub fn new(name: impl Into<String>, applies_to: ElementKind) -> Self {
        Self {
            name: name.into(),
            applies_to,
            default_properties: BTreeMap::new(),
            baseline_sub_elements: Vec::new(),
        }
    }

    pub fn with_default_property(
        mut self,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Self {
        self.default_properties.insert(key.into(), value.into());
        self
    }

    pub fn with_baseline_sub_element(mut self, template: Element) -> Self {
        self.baseline_sub_elements.push(template);
        self
    }
}

/// How `remove_element` treats references to the element being removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalMode {
    /// Fail if any relationship or view still references the element
    /// (the default: an authoritative model should not silently lose
    /// traceability).
    RefuseIfReferenced,
    /// Remove the element, its sub-elements, all incident relationships,
    /// and all view memberships.
    Cascade,
}

/// Everything removed by a cascade (or a trivially unreferenced removal).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RemovalRecord {
    pub elements: Vec<ElementId>,
    pub relationships: Vec<ElementId>,
    pub view_memberships: Vec<(ElementId, ElementId)>,
}

/// The versioned container: elements, relationships, stereotypes, views.
///
/// Collections stay sorted by id (stereotypes by name); every mutating
/// method preserves that order, and canonical save re-sorts defensively.
/// Queries are pure functions over `&Model`; a snapshot can therefore be
/// shared across threads freely, and what-if work forks an independent
/// copy instead of mutating the original.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub schema_version: String,
    pub model_name: String,
    pub elements: Vec<Element>,
    pub relationships: Vec<Relationship>,
    pub stereotypes: Vec<Stereotype>,
    pub views: Vec<View>,
}

impl Model {
    /// Create an empty model. The name must be non-empty.
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::InvalidInput("model name must not be empty".into()));
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION.to_string(),
            model_name: name,
            elements: Vec::new(),
            relationships: Vec::new(),
            stereotypes: Vec::new(),
            views: Vec::new(),
        })
    }

    // ---- lookups ------------------------------------------------------

    /// Find an element anywhere in the model, including sub-elements.
    pub fn element(&self, id: &ElementId) -> Option<&Element> {
        if let Ok(at) = self.elements.binary_search_by(|e| e.id.cmp(id)) {
            return Some(&self.elements[at]);
        }
        fn search<'a>(els: &'a [Element], id: &ElementId) -> Option<&'a Element> {
            for el in els {
                if &el.id == id {
                    return Some(el);
                }
                if let Some(found) = search(&el.sub_elements, id) {
                    return Some(found);
                }
            }
            None
        }
        search(&self.elements, id)
    }

    pub fn element_mut(&mut self, id: &ElementId) -> Option<&mut Element> {
        fn search<'a>(els: &'a mut [Element], id: &ElementId) -> Option<&'a mut Element> {
            for el in els {
                if &el.id == id {
                    return Some(el);
                }
                if let Some(found) = search(&mut el.sub_elements, id) {
                    return Some(found);
                }
            }
            None
        }
        search(&mut self.elements, id)
    }

    pub fn contains_element(&self, id: &ElementId) -> bool {
        self.element(id).is_some()
    }

    /// Every element in the model, sub-elements included, in depth-first
    /// id order.
    pub fn all_elements(&self) -> Vec<&Element> {
        self.elements
            .iter()
            .flat_map(Element::self_and_sub_elements)
            .collect()
    }

    /// Id of the immediate parent for sub-elements; `None` for top-level.
    pub fn parent_of(&self, id: &ElementId) -> Option<&ElementId> {
        fn search<'a>(els: &'a [Element], id: &ElementId) -> Option<&'a ElementId> {
            for el in els {
                if el.sub_elements.iter().any(|s| &s.id == id) {
                    return Some(&el.id);
                }
                if let Some(found) = search(&el.sub_elements, id) {
                    return Some(found);
                }
            }
            None
        }
        search(&self.elements, id)
    }

    pub fn relationship(&self, id: &ElementId) -> Option<&Relationship> {
        self.relationships
            .binary_search_by(|r| r.id.cmp(id))
            .ok()
            .map(|at| &self.relationships[at])
    }

    pub fn stereotype(&self, name: &str) -> Option<&Stereotype> {
        self.stereotypes
            .binary_search_by(|s| s.name.as_str().cmp(name))
            .ok()
            .map(|at| &self.stereotypes[at])
    }

    pub fn view(&self, id: &ElementId) -> Option<&View> {
        self.views
            .binary_search_by(|v| v.id.cmp(id))
            .ok()
            .map(|at| &self.views[at])
    }

    // ---- element mutation ---------------------------------------------

    /// Add a top-level element. The element's id (and every sub-element id
    /// it brings along) must be new to the model.
    pub fn add_element(&mut self, element: Element) -> Result<()> {
        let mut incoming = HashSet::new();
        for el in element.self_and_sub_elements() {
            if el.id.is_empty() {
                return Err(Error::InvalidInput("element id must not be empty".into()));
            }
            if el.subkind.is_some() && el.kind != ElementKind::Requirement {
                return Err(Error::InvalidInput(format!(
                    "element {} carries a requirement subkind but is a {}",
                    el.id, el.kind
                )));
            }
            if !incoming.insert(el.id.clone()) {
                return Err(Error::Conflict(format!(
                    "duplicate id {} inside the new element",
                    el.id
                )));
            }
            if self.contains_element(&el.id) {
                return Err(Error::Conflict(format!("element id {} already exists", el.id)));
            }
        }
        let at = self
            .elements
            .binary_search_by(|e| e.id.cmp(&element.id))
            .unwrap_or_else(|i| i);
        self.elements.insert(at, element);
        Ok(())
    }

    /// Rename an element in place. Every view, edge, and report observes
    /// the new name immediately: there is exactly one stored definition.
    pub fn rename_element(&mut self, id: &ElementId, new_name: impl Into<String>) -> Result<()> {
        let new_name = new_name.into();
        if new_name.trim().is_empty() {
            return Err(Error::InvalidInput("element name must not be empty".into()));
        }
        match self.element_mut(id) {
            Some(el) => {
                el.name = new_name;
                Ok(())
            }
            None => Err(Error::NotFound(format!("element {id}"))),
        }
    }

    pub fn set_property(
        &mut self,
        id: &ElementId,
        key: impl Into<String>,
        value: impl Into<String>,
    ) -> Result<()> {
        match self.element_mut(id) {
            Some(el) => {
                el.properties.insert(key.into(), value.into());
                Ok(())
            }
            None => Err(Error::NotFound(format!("element {id}"))),
        }
    }

    /// Remove an element. In `RefuseIfReferenced` mode the removal fails if
    /// any relationship or view touches the element or one of its
    /// sub-elements; `Cascade` removes everything and reports it.
    pub fn remove_element(
        &mut self,
        id: &ElementId,
        mode: RemovalMode,
    ) -> Result<RemovalRecord> {
        let doomed: BTreeSet<ElementId> = match self.element(id) {
            Some(el) => el
                .self_and_sub_elements()
                .iter()
                .map(|e| e.id.clone())
                .collect(),
            None => return Err(Error::NotFound(format!("element {id}"))),
        };

        let edge_refs: Vec<ElementId> = self
            .relationships
            .iter()
            .filter(|r| doomed.contains(&r.source) || doomed.contains(&r.target))
            .map(|r| r.id.clone())
            .collect();
        let view_refs: Vec<(ElementId, ElementId)> = self
            .views
            .iter()
            .flat_map(|v| {
                v.members
                    .iter()
                    .filter(|m| doomed.contains(m))
                    .map(|m| (v.id.clone(), m.clone()))
            })
            .collect();

        if mode == RemovalMode::RefuseIfReferenced
            && (!edge_refs.is_empty() || !view_refs.is_empty())
        {
            let mut referrers: Vec<String> =
                edge_refs.iter().map(|r| format!("relationship {r}")).collect();
            referrers.extend(view_refs.iter().map(|(v, _)| format!("view {v}")));
            referrers.sort();
            referrers.dedup();
            return Err(Error::Referenced {
                id: id.to_string(),
                referrers,
            });
        }

        fn prune(els: &mut Vec<Element>, id: &ElementId) -> bool {
            if let Some(at) = els.iter().position(|e| &e.id == id) {
                els.remove(at);
                return true;
            }
            els.iter_mut().any(|e| prune(&mut e.sub_elements, id))
        }
        prune(&mut self.elements, id);

        self.relationships
            .retain(|r| !doomed.contains(&r.source) && !doomed.contains(&r.target));
        for view in &mut self.views {
            view.members.retain(|m| !doomed.contains(m));
        }

        Ok(RemovalRecord {
            elements: doomed.into_iter().collect(),
            relationships: edge_refs,
            view_memberships: view_refs,
        })
    }

    // ---- relationship mutation ------------------------------------------

    /// Add a typed edge. Both endpoints must exist (sub-elements count),
    /// the endpoint kinds must satisfy the constraint table, self-loops and
    /// duplicate (kind, source, target) triples are rejected.
    pub fn add_relationship(
        &mut self,
        kind: RelationshipKind,
        source: &ElementId,
        target: &ElementId,
        note: Option<String>,
    ) -> Result<ElementId> {
        let source_kind = self
            .element(source)
            .map(|e| e.kind)
            .ok_or_else(|| Error::DanglingReference(format!("source element {source}")))?;
        let target_kind = self
            .element(target)
            .map(|e| e.kind)
            .ok_or_else(|| Error::DanglingReference(format!("target element {target}")))?;
        if source == target {
            return Err(Error::Constraint(format!(
                "self-loop on {source} ({kind})"
            )));
        }
        if !endpoint_kinds_allowed(kind, source_kind, target_kind) {
            return Err(Error::Constraint(format!(
                "{kind} not allowed from {source_kind} to {target_kind}"
            )));
        }
        if self
            .relationships
            .iter()
            .any(|r| r.kind == kind && &r.source == source && &r.target == target)
        {
            return Err(Error::Conflict(format!(
                "duplicate relationship {source} -{kind}-> {target}"
            )));
        }
        let id = Relationship::derived_id(kind, source, target);
        let rel = Relationship {
            id: id.clone(),
            kind,
            source: source.clone(),
            target: target.clone(),
            note,
        };
        let at = self
            .relationships
            .binary_search_by(|r| r.id.cmp(&rel.id))
            .unwrap_or_else(|i| i);
        self.relationships.insert(at, rel);
        Ok(id)
    }

    pub fn remove_relationship(&mut self, id: &ElementId) -> Result<Relationship> {
        match self.relationships.binary_search_by(|r| r.id.cmp(id)) {
            Ok(at) => Ok(self.relationships.remove(at)),
            Err(_) => Err(Error::NotFound(format!("relationship {id}"))),
        }
    }

    // ---- stereotypes -----------------------------------------------------

    pub fn add_stereotype(&mut self, stereotype: Stereotype) -> Result<()> {
        if stereotype.name.trim().is_empty() {
            return Err(Error::InvalidInput("stereotype name must not be empty".into()));
        }
        match self
            .stereotypes
            .binary_search_by(|s| s.name.cmp(&stereotype.name))
        {
            Ok(_) => Err(Error::Conflict(format!(
                "stereotype {} already exists",
                stereotype.name
            ))),
            Err(at) => {
                self.stereotypes.insert(at, stereotype);
                Ok(())
            }
        }
    }

    /// Apply a stereotype to an element: default properties merge in
    /// (explicit instance values win), baseline sub-elements instantiate
    /// with deterministic fresh ids, and `AssignedConfiguration` edges link
    /// the element to each instantiated sub-element. Applying the same
    /// stereotype twice changes nothing the second time.
    pub fn assign_stereotype(&mut self, id: &ElementId, stereotype_name: &str) -> Result<()> {
        let stereotype = self
            .stereotype(stereotype_name)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("stereotype {stereotype_name}")))?;
        let kind = self
            .element(id)
            .map(|e| e.kind)
            .ok_or_else(|| Error::NotFound(format!("element {id}")))?;
        if kind != stereotype.applies_to {
            return Err(Error::Constraint(format!(
                "stereotype {stereotype_name} applies to {} but {id} is a {kind}",
                stereotype.applies_to
            )));
        }

        {
            let el = self.element_mut(id).expect("element just resolved");
            for (key, value) in &stereotype.default_properties {
                el.properties
                    .entry(key.clone())
                    .or_insert_with(|| value.clone());
            }
            el.stereotype = Some(stereotype.name.clone());
        }

        for template in &stereotype.baseline_sub_elements {
            self.instantiate_baseline(id, template)?;
        }
        Ok(())
    }

    /// Append a baseline sub-element template to a stereotype and roll it
    /// out to every element currently assigned the stereotype. Returns how
    /// many assigned elements were updated.
    pub fn update_stereotype_baseline(
        &mut self,
        stereotype_name: &str,
        template: Element,
    ) -> Result<usize> {
        let at = self
            .stereotypes
            .binary_search_by(|s| s.name.as_str().cmp(stereotype_name))
            .map_err(|_| Error::NotFound(format!("stereotype {stereotype_name}")))?;
        let slot = &mut self.stereotypes[at].baseline_sub_elements;
        match slot.iter_mut().find(|t| t.id == template.id) {
            Some(existing) => *existing = template.clone(),
            None => slot.push(template.clone()),
        }

        let assigned: Vec<ElementId> = self
            .all_elements()
            .iter()
            .filter(|e| e.stereotype.as_deref() == Some(stereotype_name))
            .map(|e| e.id.clone())
            .collect();
        for id in &assigned {
            self.instantiate_baseline(id, &template)?;
        }
        Ok(assigned.len())
    }

    /// Instantiate one baseline template under `parent`. Ids are derived
    /// as `{parent}-{template}` so re-application is a no-op.
    fn instantiate_baseline(&mut self, parent: &ElementId, template: &Element) -> Result<()> {
        fn rewrite_ids(parent: &ElementId, template: &Element) -> Element {
            let mut inst = template.clone();
            inst.id = ElementId::new(format!("{parent}-{}", template.id));
            inst.sub_elements = template
                .sub_elements
                .iter()
                .map(|sub| rewrite_ids(parent, sub))
                .collect();
            inst
        }
        let instance = rewrite_ids(parent, template);
        let instance_id = instance.id.clone();
        if !self.contains_element(&instance_id) {
            let (parent_kind, sub_kind) = (
                self.element(parent).expect("parent resolved").kind,
                instance.kind,
            );
            {
                let parent_el = self.element_mut(parent).expect("parent resolved");
                let at = parent_el
                    .sub_elements
                    .binary_search_by(|e| e.id.cmp(&instance_id))
                    .unwrap_or_else(|i| i);
                parent_el.sub_elements.insert(at, instance);
            }
            if endpoint_kinds_allowed(
                RelationshipKind::AssignedConfiguration,
                parent_kind,
                sub_kind,
            ) {
                self.add_relationship(
                    RelationshipKind::AssignedConfiguration,
                    parent,
                    &instance_id,
                    None,
                )?;
            }
        }
        Ok(())
    }

    // ---- availability ----------------------------------------------------

    /// Ids of every unavailable element: failed elements plus their owned
    /// sub-elements and their `Contains`/`AssignedConfiguration` children,
    /// transitively. Unavailable elements stay in the graph but stop
    /// satisfying requirements and providing dependencies.
    pub fn unavailable_ids(&self) -> BTreeSet<ElementId> {
        let mut out: BTreeSet<ElementId> = BTreeSet::new();
        let mut frontier: Vec<ElementId> = Vec::new();
        for el in self.all_elements() {
            if el.is_failed() && out.insert(el.id.clone()) {
                frontier.push(el.id.clone());
            }
        }
        while let Some(id) = frontier.pop() {
            let mut children: Vec<ElementId> = Vec::new();
            if let Some(el) = self.element(&id) {
                for sub in el.self_and_sub_elements() {
                    if sub.id != id {
                        children.push(sub.id.clone());
                    }
                }
            }
            for rel in &self.relationships {
                if rel.source == id
                    && matches!(
                        rel.kind,
                        RelationshipKind::Contains | RelationshipKind::AssignedConfiguration
                    )
                {
                    children.push(rel.target.clone());
                }
            }
            for child in children {
                if out.insert(child.clone()) {
                    frontier.push(child);
                }
            }
        }
        out
    }
}
