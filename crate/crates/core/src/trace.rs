//! Digital-thread queries: traceability, coverage, orphans, change impact.
//!
//! Every query is a pure function over a model snapshot. Edge kinds carry a
//! fixed strategic polarity:
//!
//! - `DerivedFrom`, `Satisfies`, `Realizes`, `Supports` point upstream
//!   (toward strategy); downstream traversal walks them in reverse.
//! - `AllocatedTo` points downstream and is walked in reverse when tracing
//!   upstream.
//! - `Contains` and `AssignedConfiguration` are structural and traversable
//!   in either orientation for both directions.
//! - `ConnectsTo` and `ExchangesWith` are lateral: excluded from strategic
//!   trace, included in impact propagation.
//!
//! Impact propagation expands a different hop set: reverse `Satisfies` and
//! `Realizes` (implementers of a changed guarantee), reverse `DerivedFrom`
//! (children of a changed requirement), `ConnectsTo`/`ExchangesWith` both
//! ways, and `Contains`/`AssignedConfiguration` downward.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    ElementId, ElementKind, Model, RelationshipKind, RequirementSubkind,
};

/// Trace orientation: toward strategy or toward implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TraceDirection {
    Upstream,
    Downstream,
}

impl fmt::Display for TraceDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceDirection::Upstream => "Upstream",
            TraceDirection::Downstream => "Downstream",
        })
    }
}

impl FromStr for TraceDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "up" | "upstream" => Ok(TraceDirection::Upstream),
            "down" | "downstream" => Ok(TraceDirection::Downstream),
            _ => Err(Error::InvalidInput(format!("unknown direction: {s}"))),
        }
    }
}

/// One hop: the element arrived at and the relationship kind used.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceHop {
    pub element: ElementId,
    pub kind: RelationshipKind,
}

/// A simple path from an origin; no element repeats within a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TracePath {
    pub origin: ElementId,
    pub hops: Vec<TraceHop>,
}

impl TracePath {
    pub fn terminus(&self) -> &ElementId {
        self.hops.last().map(|h| &h.element).unwrap_or(&self.origin)
    }
}

/// Coverage status of one requirement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoverageStatus {
    Satisfied,
    Unsatisfied,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RequirementCoverage {
    pub requirement: ElementId,
    pub satisfied_by: Vec<ElementId>,
    pub status: CoverageStatus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct CoverageSummary {
    pub total: usize,
    pub satisfied: usize,
    pub unsatisfied: usize,
}

/// Per-requirement satisfaction, direct-edge rule: a requirement is
/// satisfied exactly when at least one available element has a `Satisfies`
/// edge to it. Satisfaction is not inherited across `DerivedFrom`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CoverageReport {
    pub requirements: Vec<RequirementCoverage>,
    pub summary: CoverageSummary,
}

/// Optional predicate for `coverage_report`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RequirementFilter {
    /// Matches the element's `family` property.
    pub family: Option<String>,
    pub subkind: Option<RequirementSubkind>,
}

/// Requirements nobody satisfies and non-strategic elements with no
/// upstream path to any strategic goal or enterprise objective.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrphanReport {
    pub unsatisfied_requirements: Vec<ElementId>,
    pub untraceable_elements: Vec<ElementId>,
}

impl OrphanReport {
    pub fn is_empty(&self) -> bool {
        self.unsatisfied_requirements.is_empty() && self.untraceable_elements.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffectedElement {
    pub element: ElementId,
    pub distance: usize,
    pub path: TracePath,
}

/// Elements reachable from a changed origin under the propagation rules,
/// each with its shortest hop distance and one witness path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImpactReport {
    pub origin: ElementId,
    pub affected: Vec<AffectedElement>,
    pub affected_requirements: Vec<ElementId>,
}

type HopMap = BTreeMap<ElementId, Vec<TraceHop>>;

fn push_hop(map: &mut HopMap, from: &ElementId, to: &ElementId, kind: RelationshipKind) {
    map.entry(from.clone()).or_default().push(TraceHop {
        element: to.clone(),
        kind,
    });
}

/// Directed hop set for strategic trace in `direction`.
fn trace_hops(model: &Model, direction: TraceDirection) -> HopMap {
    use RelationshipKind::*;
    let mut map = HopMap::new();
    for rel in &model.relationships {
        let (fwd, rev) = match direction {
            TraceDirection::Upstream => (true, false),
            TraceDirection::Downstream => (false, true),
        };
        match rel.kind {
            DerivedFrom | Satisfies | Realizes | Supports => {
                if fwd {
                    push_hop(&mut map, &rel.source, &rel.target, rel.kind);
                }
                if rev {
                    push_hop(&mut map, &rel.target, &rel.source, rel.kind);
                }
            }
            AllocatedTo => {
                if fwd {
                    push_hop(&mut map, &rel.target, &rel.source, rel.kind);
                }
                if rev {
                    push_hop(&mut map, &rel.source, &rel.target, rel.kind);
                }
            }
            Contains | AssignedConfiguration => {
                push_hop(&mut map, &rel.source, &rel.target, rel.kind);
                push_hop(&mut map, &rel.target, &rel.source, rel.kind);
            }
            ConnectsTo | ExchangesWith => {}
        }
    }
    for hops in map.values_mut() {
        hops.sort();
        hops.dedup();
    }
    map
}

/// Directed hop set for impact propagation.
fn impact_hops(model: &Model) -> HopMap {
    use RelationshipKind::*;
    let mut map = HopMap::new();
    for rel in &model.relationships {
        match rel.kind {
            Satisfies | Realizes | DerivedFrom => {
                push_hop(&mut map, &rel.target, &rel.source, rel.kind);
            }
            ConnectsTo | ExchangesWith => {
                push_hop(&mut map, &rel.source, &rel.target, rel.kind);
                push_hop(&mut map, &rel.target, &rel.source, rel.kind);
            }
            Contains | AssignedConfiguration => {
                push_hop(&mut map, &rel.source, &rel.target, rel.kind);
            }
            AllocatedTo | Supports => {}
        }
    }
    for hops in map.values_mut() {
        hops.sort();
        hops.dedup();
    }
    map
}

impl Model {
    /// Enumerate every simple path from `origin` whose hops match
    /// `direction`, up to `max_depth` hops (unbounded when absent).
    /// Paths are prefix-closed and ordered lexicographically by hop ids.
    pub fn trace(
        &self,
        origin: &ElementId,
        direction: TraceDirection,
        max_depth: Option<usize>,
    ) -> Result<Vec<TracePath>> {
        if !self.contains_element(origin) {
            return Err(Error::NotFound(format!("element {origin}")));
        }
        let hops = trace_hops(self, direction);
        let mut paths = Vec::new();
        let mut visited: BTreeSet<ElementId> = BTreeSet::new();
        visited.insert(origin.clone());
        let mut current: Vec<TraceHop> = Vec::new();

        fn walk(
            at: &ElementId,
            hops: &HopMap,
            visited: &mut BTreeSet<ElementId>,
            current: &mut Vec<TraceHop>,
            paths: &mut Vec<Vec<TraceHop>>,
            max_depth: Option<usize>,
        ) {
            if let Some(limit) = max_depth {
                if current.len() >= limit {
                    return;
                }
            }
            let Some(next_hops) = hops.get(at) else {
                return;
            };
            for hop in next_hops {
                if visited.contains(&hop.element) {
                    continue;
                }
                visited.insert(hop.element.clone());
                current.push(hop.clone());
                paths.push(current.clone());
                walk(&hop.element, hops, visited, current, paths, max_depth);
                current.pop();
                visited.remove(&hop.element);
            }
        }

        let mut raw: Vec<Vec<TraceHop>> = Vec::new();
        walk(origin, &hops, &mut visited, &mut current, &mut raw, max_depth);
        raw.sort();
        paths.extend(raw.into_iter().map(|hops| TracePath {
            origin: origin.clone(),
            hops,
        }));
        Ok(paths)
    }

    /// Per-requirement satisfaction (direct `Satisfies` in-edges from
    /// available elements), sorted by requirement id.
    pub fn coverage_report(&self, filter: Option<&RequirementFilter>) -> CoverageReport {
        let unavailable = self.unavailable_ids();
        let mut satisfiers: BTreeMap<&ElementId, Vec<ElementId>> = BTreeMap::new();
        for rel in &self.relationships {
            if rel.kind == RelationshipKind::Satisfies && !unavailable.contains(&rel.source) {
                satisfiers
                    .entry(&rel.target)
                    .or_default()
                    .push(rel.source.clone());
            }
        }

        let mut requirements = Vec::new();
        let mut summary = CoverageSummary::default();
        for el in self.all_elements() {
            if el.kind != ElementKind::Requirement {
                continue;
            }
            if let Some(filter) = filter {
                if let Some(family) = &filter.family {
                    if el.properties.get("family") != Some(family) {
                        continue;
                    }
                }
                if let Some(subkind) = filter.subkind {
                    if el.subkind != Some(subkind) {
                        continue;
                    }
                }
            }
            let mut satisfied_by = satisfiers.get(&el.id).cloned().unwrap_or_default();
            satisfied_by.sort();
            satisfied_by.dedup();
            let status = if satisfied_by.is_empty() {
                CoverageStatus::Unsatisfied
            } else {
                CoverageStatus::Satisfied
            };
            summary.total += 1;
            match status {
                CoverageStatus::Satisfied => summary.satisfied += 1,
                CoverageStatus::Unsatisfied => summary.unsatisfied += 1,
            }
            requirements.push(RequirementCoverage {
                requirement: el.id.clone(),
                satisfied_by,
                status,
            });
        }
        requirements.sort_by(|a, b| a.requirement.cmp(&b.requirement));
        CoverageReport {
            requirements,
            summary,
        }
    }

    /// Requirements with no `Satisfies` in-edge at all, plus non-strategic
    /// elements with no upstream path to any strategic goal or enterprise
    /// objective.
    pub fn find_orphans(&self) -> OrphanReport {
        let satisfied: BTreeSet<&ElementId> = self
            .relationships
            .iter()
            .filter(|r| r.kind == RelationshipKind::Satisfies)
            .map(|r| &r.target)
            .collect();
        let mut unsatisfied_requirements: Vec<ElementId> = self
            .all_elements()
            .into_iter()
            .filter(|e| e.kind == ElementKind::Requirement && !satisfied.contains(&e.id))
            .map(|e| e.id.clone())
            .collect();
        unsatisfied_requirements.sort();

        // Walk upstream hops in reverse from every goal/objective; anything
        // non-strategic left unreached has no upstream path.
        let upstream = trace_hops(self, TraceDirection::Upstream);
        let mut reverse: HashMap<&ElementId, Vec<&ElementId>> = HashMap::new();
        for (from, hops) in &upstream {
            for hop in hops {
                reverse.entry(&hop.element).or_default().push(from);
            }
        }
        let mut reached: BTreeSet<&ElementId> = BTreeSet::new();
        let mut queue: VecDeque<&ElementId> = self
            .all_elements()
            .into_iter()
            .filter(|e| {
                matches!(
                    e.kind,
                    ElementKind::StrategicGoal | ElementKind::EnterpriseObjective
                )
            })
            .map(|e| &e.id)
            .collect();
        for id in &queue {
            reached.insert(id);
        }
        while let Some(at) = queue.pop_front() {
            if let Some(preds) = reverse.get(at) {
                for pred in preds {
                    if reached.insert(pred) {
                        queue.push_back(pred);
                    }
                }
            }
        }
        let mut untraceable_elements: Vec<ElementId> = self
            .all_elements()
            .into_iter()
            .filter(|e| !e.kind.is_strategic() && !reached.contains(&e.id))
            .map(|e| e.id.clone())
            .collect();
        untraceable_elements.sort();

        OrphanReport {
            unsatisfied_requirements,
            untraceable_elements,
        }
    }

    /// Everything reachable from `origin` under the propagation rules,
    /// with shortest hop distance and one witness path each, sorted by
    /// (distance, id). The origin itself is never listed.
    pub fn impact_analysis(&self, origin: &ElementId) -> Result<ImpactReport> {
        if !self.contains_element(origin) {
            return Err(Error::NotFound(format!("element {origin}")));
        }
        let hops = impact_hops(self);
        let mut distance: BTreeMap<ElementId, usize> = BTreeMap::new();
        let mut parent: BTreeMap<ElementId, TraceHop> = BTreeMap::new();
        let mut queue: VecDeque<ElementId> = VecDeque::new();
        distance.insert(origin.clone(), 0);
        queue.push_back(origin.clone());
        while let Some(at) = queue.pop_front() {
            let here = distance[&at];
            let Some(next_hops) = hops.get(&at) else {
                continue;
            };
            for hop in next_hops {
                if distance.contains_key(&hop.element) {
                    continue;
                }
                distance.insert(hop.element.clone(), here + 1);
                parent.insert(
                    hop.element.clone(),
                    TraceHop {
                        element: at.clone(),
                        kind: hop.kind,
                    },
                );
                queue.push_back(hop.element.clone());
            }
        }

        let mut affected: Vec<AffectedElement> = distance
            .iter()
            .filter(|(id, _)| *id != origin)
            .map(|(id, &dist)| {
                // Rebuild the witness path by following parents back to the
                // origin, then reversing.
                let mut rev: Vec<TraceHop> = Vec::new();
                let mut at = id.clone();
                while &at != origin {
                    let prev = parent.get(&at).expect("parent chain reaches origin");
                    rev.push(TraceHop {
                        element: at.clone(),
                        kind: prev.kind,
                    });
                    at = prev.element.clone();
                }
                rev.reverse();
                AffectedElement {
                    element: id.clone(),
                    distance: dist,
                    path: TracePath {
                        origin: origin.clone(),
                        hops: rev,
                    },
                }
            })
            .collect();
        affected.sort_by(|a, b| (a.distance, &a.element).cmp(&(b.distance, &b.element)));

        let mut affected_requirements: Vec<ElementId> = affected
            .iter()
            .filter(|a| {
                self.element(&a.element)
                    .map(|e| e.kind == ElementKind::Requirement)
                    .unwrap_or(false)
            })
            .map(|a| a.element.clone())
            .collect();
        affected_requirements.sort();

        Ok(ImpactReport {
            origin: origin.clone(),
            affected,
            affected_requirements,
        })
    }
}
