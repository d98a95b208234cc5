//! Observed-state reconciliation: the translator between external tooling
//! (monitoring, SIEM, vulnerability scanning) and the declared model.
//!
//! A snapshot is one neutral document of observed items keyed by a
//! `match_key` (hostname or device id). Declared `TechnologyNode` and
//! `NetworkDevice` elements opt in to binding by carrying a `match_key`
//! property; matching is exact, never name-fuzzy. Drift compares declared
//! configuration sub-elements against observed `ConfigurationSetting`
//! items per (bound element, setting name).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Element, ElementId, ElementKind, Model, RelationshipKind, MATCH_KEY_PROPERTY,
};
use crate::store::{digest_hex, to_canonical_json};

/// Accepted values for the optional `source_tool` attribute.
pub const SOURCE_TOOLS: [&str; 3] = ["monitoring", "siem", "vuln_scanner"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObservedItemKind {
    Node,
    InstalledApplication,
    ConfigurationSetting,
    Finding,
}

/// One observation from an external tool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservedItem {
    pub match_key: String,
    pub item_kind: ObservedItemKind,
    pub name: String,
    pub attributes: BTreeMap<String, String>,
}

/// A point-in-time capture of observed system state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservedSnapshot {
    pub captured_at: String,
    pub items: Vec<ObservedItem>,
}

impl ObservedSnapshot {
    /// Check the snapshot invariants: non-empty match keys, items unique
    /// by (match_key, item_kind, name), source tools from the closed set.
    pub fn validate(&self) -> Result<()> {
        let mut seen: BTreeSet<(&str, ObservedItemKind, &str)> = BTreeSet::new();
        for item in &self.items {
            if item.match_key.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "observed item {:?} has an empty match_key",
                    item.name
                )));
            }
            if !seen.insert((&item.match_key, item.item_kind, &item.name)) {
                return Err(Error::InvalidInput(format!(
                    "duplicate observed item ({}, {:?}, {})",
                    item.match_key, item.item_kind, item.name
                )));
            }
            if let Some(tool) = item.attributes.get("source_tool") {
                if !SOURCE_TOOLS.contains(&tool.as_str()) {
                    return Err(Error::InvalidInput(format!(
                        "unknown source_tool {tool:?} on ({}, {})",
                        item.match_key, item.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Hex sha-256 of the canonical snapshot text.
    pub fn digest(&self) -> Result<String> {
        Ok(digest_hex(snapshot_to_string(self)?.as_bytes()))
    }
}

/// Parse a snapshot document and check its invariants.
pub fn snapshot_from_str(text: &str) -> Result<ObservedSnapshot> {
    let snapshot: ObservedSnapshot =
        serde_json::from_str(text).map_err(|e| Error::parse_from_json(&e))?;
    snapshot.validate()?;
    Ok(snapshot)
}

/// Canonical text form of a snapshot.
pub fn snapshot_to_string(snapshot: &ObservedSnapshot) -> Result<String> {
    let mut copy = snapshot.clone();
    copy.items
        .sort_by(|a, b| (&a.match_key, a.item_kind, &a.name).cmp(&(&b.match_key, b.item_kind, &b.name)));
    to_canonical_json(&copy)
}

/// One declared element bound to observed items by match key.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Binding {
    pub element: ElementId,
    pub match_key: String,
}

/// Result of matching a snapshot against declared elements.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BindReport {
    pub bindings: Vec<Binding>,
    pub unbound: Vec<ObservedItem>,
}

/// A declared setting whose observed value differs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValueMismatch {
    pub element: ElementId,
    pub attribute: String,
    pub declared: String,
    pub observed: Option<String>,
}

/// An observed item with no declared counterpart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnexpectedItem {
    pub match_key: String,
    pub item_kind: ObservedItemKind,
    pub name: String,
}

/// Reconciliation of declared configuration against observed state. The
/// finding lists are disjoint by subject: a declared setting is either
/// missing or mismatched, never both, and unexpected items are observed
/// subjects, not declared ones.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DriftReport {
    pub bound: Vec<Binding>,
    pub absent_nodes: Vec<ElementId>,
    pub missing_declared: Vec<ElementId>,
    pub unexpected_observed: Vec<UnexpectedItem>,
    pub value_mismatches: Vec<ValueMismatch>,
    pub impacted_requirements: Vec<ElementId>,
}

impl DriftReport {
    pub fn has_findings(&self) -> bool {
        !self.absent_nodes.is_empty()
            || !self.missing_declared.is_empty()
            || !self.unexpected_observed.is_empty()
            || !self.value_mismatches.is_empty()
    }

    pub fn finding_count(&self) -> usize {
        self.absent_nodes.len()
            + self.missing_declared.len()
            + self.unexpected_observed.len()
            + self.value_mismatches.len()
    }
}

/// Declared elements that participate in binding: hardware carrying a
/// `match_key` property.
fn bindable_hosts(model: &Model) -> Result<Vec<(&Element, &str)>> {
    let mut hosts: Vec<(&Element, &str)> = model
        .all_elements()
        .into_iter()
        .filter(|e| {
            matches!(
                e.kind,
                ElementKind::TechnologyNode | ElementKind::NetworkDevice
            )
        })
        .filter_map(|e| {
            e.properties
                .get(MATCH_KEY_PROPERTY)
                .map(|key| (e, key.as_str()))
        })
        .collect();
    hosts.sort_by(|a, b| a.0.id.cmp(&b.0.id));

    let mut by_key: BTreeMap<&str, Vec<&ElementId>> = BTreeMap::new();
    for (el, key) in &hosts {
        by_key.entry(key).or_default().push(&el.id);
    }
    for (key, claimants) in by_key {
        if claimants.len() > 1 {
            return Err(Error::AmbiguousMatchKey {
                key: key.to_string(),
                elements: claimants.iter().map(|id| id.to_string()).collect(),
            });
        }
    }
    Ok(hosts)
}

impl Model {
    /// Bind observed items to declared hardware by match key. Fails when
    /// two declared elements claim the same key.
    pub fn bind_observed(&self, snapshot: &ObservedSnapshot) -> Result<BindReport> {
        snapshot.validate()?;
        let hosts = bindable_hosts(self)?;
        let declared_keys: BTreeSet<&str> = hosts.iter().map(|(_, key)| *key).collect();

        let bindings = hosts
            .iter()
            .filter(|(_, key)| snapshot.items.iter().any(|i| i.match_key == *key))
            .map(|(el, key)| Binding {
                element: el.id.clone(),
                match_key: key.to_string(),
            })
            .collect();
        let unbound = snapshot
            .items
            .iter()
            .filter(|i| !declared_keys.contains(i.match_key.as_str()))
            .cloned()
            .collect();
        Ok(BindReport { bindings, unbound })
    }

    /// Compare declared configuration sub-elements against the snapshot.
    ///
    /// Per bound host: declared settings absent from observation are
    /// missing; present-with-different-value attributes are mismatches;
    /// observed settings and applications with no declared counterpart are
    /// unexpected. Hosts with a match key but no observed items at all are
    /// reported absent, with one missing finding per declared setting.
    /// Requirements satisfied by a drifted configuration are listed as
    /// impacted.
    pub fn drift_report(&self, snapshot: &ObservedSnapshot) -> Result<DriftReport> {
        let bind = self.bind_observed(snapshot)?;
        let hosts = bindable_hosts(self)?;

        let mut report = DriftReport {
            bound: bind.bindings,
            ..DriftReport::default()
        };

        for item in &bind.unbound {
            if item.item_kind != ObservedItemKind::Finding {
                report.unexpected_observed.push(UnexpectedItem {
                    match_key: item.match_key.clone(),
                    item_kind: item.item_kind,
                    name: item.name.clone(),
                });
            }
        }

        let mut drifted_configs: BTreeSet<ElementId> = BTreeSet::new();

        for (host, key) in &hosts {
            let observed: Vec<&ObservedItem> = snapshot
                .items
                .iter()
                .filter(|i| i.match_key == *key)
                .collect();
            let declared_configs: Vec<&Element> = host
                .self_and_sub_elements()
                .into_iter()
                .filter(|e| e.id != host.id && e.kind == ElementKind::ConfigurationItem)
                .collect();

            if observed.is_empty() {
                report.absent_nodes.push(host.id.clone());
                for cfg in declared_configs {
                    report.missing_declared.push(cfg.id.clone());
                    drifted_configs.insert(cfg.id.clone());
                }
                continue;
            }

            let mut declared_names: BTreeSet<&str> = BTreeSet::new();
            for cfg in &declared_configs {
                // First declared setting of a given name (id order) wins.
                if !declared_names.insert(cfg.name.as_str()) {
                    continue;
                }
                let setting = observed.iter().find(|i| {
                    i.item_kind == ObservedItemKind::ConfigurationSetting && i.name == cfg.name
                });
                match setting {
                    None => {
                        report.missing_declared.push(cfg.id.clone());
                        drifted_configs.insert(cfg.id.clone());
                    }
                    Some(item) => {
                        let mut drifted = false;
                        for (attr, declared_value) in &cfg.properties {
                            let observed_value = item.attributes.get(attr);
                            if observed_value != Some(declared_value) {
                                report.value_mismatches.push(ValueMismatch {
                                    element: cfg.id.clone(),
                                    attribute: attr.clone(),
                                    declared: declared_value.clone(),
                                    observed: observed_value.cloned(),
                                });
                                drifted = true;
                            }
                        }
                        if drifted {
                            drifted_configs.insert(cfg.id.clone());
                        }
                    }
                }
            }

            // Observed items with no declared counterpart on this host.
            let contained_names: BTreeSet<&str> = self
                .relationships
                .iter()
                .filter(|r| r.kind == RelationshipKind::Contains && r.source == host.id)
                .filter_map(|r| self.element(&r.target).map(|e| e.name.as_str()))
                .chain(
                    host.self_and_sub_elements()
                        .into_iter()
                        .map(|e| e.name.as_str()),
                )
                .collect();
            for item in observed {
                let unexpected = match item.item_kind {
                    ObservedItemKind::ConfigurationSetting => {
                        !declared_names.contains(item.name.as_str())
                    }
                    ObservedItemKind::InstalledApplication => {
                        !contained_names.contains(item.name.as_str())
                    }
                    ObservedItemKind::Node | ObservedItemKind::Finding => false,
                };
                if unexpected {
                    report.unexpected_observed.push(UnexpectedItem {
                        match_key: item.match_key.clone(),
                        item_kind: item.item_kind,
                        name: item.name.clone(),
                    });
                }
            }
        }

        let mut impacted: BTreeSet<ElementId> = BTreeSet::new();
        for rel in &self.relationships {
            if rel.kind == RelationshipKind::Satisfies && drifted_configs.contains(&rel.source) {
                impacted.insert(rel.target.clone());
            }
        }
        report.impacted_requirements = impacted.into_iter().collect();

        report.absent_nodes.sort();
        report.missing_declared.sort();
        report
            .unexpected_observed
            .sort_by(|a, b| (&a.match_key, a.item_kind, &a.name).cmp(&(&b.match_key, b.item_kind, &b.name)));
        report
            .value_mismatches
            .sort_by(|a, b| (&a.element, &a.attribute).cmp(&(&b.element, &b.attribute)));
        Ok(report)
    }

    /// Export the declared state verbatim as a snapshot: one `Node` item
    /// per bindable host, one `ConfigurationSetting` per declared
    /// configuration sub-element, one `InstalledApplication` per contained
    /// application. Running `drift_report` against the export yields an
    /// empty report.
    pub fn export_observed_snapshot(&self, captured_at: impl Into<String>) -> Result<ObservedSnapshot> {
        let hosts = bindable_hosts(self)?;
        let mut items = Vec::new();
        for (host, key) in hosts {
            items.push(ObservedItem {
                match_key: key.to_string(),
                item_kind: ObservedItemKind::Node,
                name: host.name.clone(),
                attributes: BTreeMap::new(),
            });
            let mut seen_settings: BTreeSet<&str> = BTreeSet::new();
            for cfg in host.self_and_sub_elements() {
                if cfg.id != host.id
                    && cfg.kind == ElementKind::ConfigurationItem
                    && seen_settings.insert(cfg.name.as_str())
                {
                    items.push(ObservedItem {
                        match_key: key.to_string(),
                        item_kind: ObservedItemKind::ConfigurationSetting,
                        name: cfg.name.clone(),
                        attributes: cfg.properties.clone(),
                    });
                }
            }
            let mut seen_apps: BTreeSet<&str> = BTreeSet::new();
            for rel in &self.relationships {
                if rel.kind == RelationshipKind::Contains && rel.source == host.id {
                    if let Some(app) = self.element(&rel.target) {
                        if seen_apps.insert(app.name.as_str()) {
                            items.push(ObservedItem {
                                match_key: key.to_string(),
                                item_kind: ObservedItemKind::InstalledApplication,
                                name: app.name.clone(),
                                attributes: BTreeMap::new(),
                            });
                        }
                    }
                }
            }
        }
        let snapshot = ObservedSnapshot {
            captured_at: captured_at.into(),
            items,
        };
        snapshot.validate()?;
        Ok(snapshot)
    }

    /// Append an evidence reference (with the snapshot digest it came
    /// from) to an element's documentation. Idempotent per (reference,
    /// digest) pair.
    pub fn attach_evidence(
        &mut self,
        subject: &ElementId,
        evidence_ref: &str,
        snapshot_digest: &str,
    ) -> Result<()> {
        let entry = format!("{evidence_ref} [snapshot {snapshot_digest}]");
        match self.element_mut(subject) {
            Some(el) => {
                if !el.documentation.contains(&entry) {
                    el.documentation.push(entry);
                }
                Ok(())
            }
            None => Err(Error::NotFound(format!("element {subject}"))),
        }
    }
}
