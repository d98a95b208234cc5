//! The bundled ISB reference model: a notional organization whose staff
//! use one business application, modeled end to end — strategic goal,
//! enterprise objectives, requirements, applications, and the five-box
//! hardware inventory (workstation, switch, application server, domain
//! controller, security server) with bound configurations.
//!
//! The fixture is authored to be fully valid and fully traced: every
//! non-strategic element has an upstream path to a goal or objective, and
//! the switch security baseline satisfies exactly two cybersecurity
//! requirements.

use crate::model::{
    Element, ElementKind, Layer, Model, RelationshipKind, RequirementSubkind, Stereotype,
    MATCH_KEY_PROPERTY,
};
use crate::view::ViewDisplay;

/// Build the ISB reference model.
pub fn isb_reference_model() -> Model {
    let mut model = Model::new("ISB").expect("fixture name is non-empty");

    // Conceptual layer: one goal, two objectives.
    for element in [
        Element::new(
            "goal-fulfill-mission",
            "Fulfill Mission Objects",
            ElementKind::StrategicGoal,
        )
        .with_layer(Layer::Conceptual),
        Element::new(
            "obj-maintain-cybersecurity",
            "Maintain Cybersecurity",
            ElementKind::EnterpriseObjective,
        )
        .with_layer(Layer::Conceptual),
        Element::new(
            "obj-meet-compliance",
            "Meet Compliance Requirements",
            ElementKind::EnterpriseObjective,
        )
        .with_layer(Layer::Conceptual),
    ] {
        model.add_element(element).expect("fixture element");
    }

    // Requirements layer.
    let requirements: [(&str, &str, RequirementSubkind, Option<&str>); 7] = [
        (
            "req-isb-functionality",
            "ISB Application Functionality",
            RequirementSubkind::Functional,
            None,
        ),
        (
            "req-de-integration",
            "Digital Engineering Integration",
            RequirementSubkind::Functional,
            None,
        ),
        (
            "req-rmf",
            "RMF Compliance",
            RequirementSubkind::Cybersecurity,
            None,
        ),
        (
            "req-ac-4",
            "Information Flow Enforcement",
            RequirementSubkind::Cybersecurity,
            Some("Access Control"),
        ),
        (
            "req-sc-7",
            "Boundary Protection",
            RequirementSubkind::Cybersecurity,
            Some("System and Communications Protection"),
        ),
        (
            "req-ca-7",
            "Continuous Monitoring",
            RequirementSubkind::Cybersecurity,
            Some("Assessment, Authorization, and Monitoring"),
        ),
        (
            "req-ra-5",
            "Vulnerability Monitoring and Scanning",
            RequirementSubkind::Cybersecurity,
            Some("Risk Assessment"),
        ),
    ];
    for (id, name, subkind, family) in requirements {
        let mut element = Element::new(id, name, ElementKind::Requirement)
            .with_subkind(subkind)
            .with_layer(Layer::Requirements);
        if let Some(family) = family {
            element = element.with_property("family", family);
        }
        model.add_element(element).expect("fixture element");
    }

    // Application layer.
    let applications: [(&str, &str, ElementKind); 11] = [
        ("app-isb-client", "ISB Client Application", ElementKind::ApplicationComponent),
        ("app-isb-server", "ISB Server Application", ElementKind::ApplicationComponent),
        ("app-plm", "PLM Application", ElementKind::ApplicationComponent),
        ("app-mbse", "MBSE Server Application", ElementKind::ApplicationComponent),
        ("svc-dth", "DTh Service", ElementKind::Service),
        ("svc-dtw", "DTw Service", ElementKind::Service),
        ("svc-adds", "Active Directory Domain Services", ElementKind::Service),
        ("svc-auth", "Authentication Services", ElementKind::Service),
        ("app-siem", "SEIM Application", ElementKind::ApplicationComponent),
        (
            "app-vuln",
            "Vulnerability Scanning and Management Application",
            ElementKind::ApplicationComponent,
        ),
        ("app-monitoring", "Monitoring Application", ElementKind::ApplicationComponent),
    ];
    for (id, name, kind) in applications {
        let mut element = Element::new(id, name, kind).with_layer(Layer::Application);
        if id == "app-isb-client" || id == "app-isb-server" {
            element = element
                .with_property("port", "8443")
                .with_property("protocol", "https");
        }
        if id == "svc-auth" {
            element = element
                .with_property("port", "88")
                .with_property("protocol", "kerberos");
        }
        model.add_element(element).expect("fixture element");
    }

    // Technology layer: the five-box inventory.
    model
        .add_element(
            Element::new("node-workstation", "Windows Workstation", ElementKind::TechnologyNode)
                .with_layer(Layer::Technology)
                .with_property(MATCH_KEY_PROPERTY, "isb-ws-01")
                .with_sub_element(
                    Element::new(
                        "cfg-ws-hardening",
                        "Workstation Hardening Baseline",
                        ElementKind::ConfigurationItem,
                    )
                    .with_property("disk_encryption", "enabled")
                    .with_property("screen_lock_minutes", "15"),
                ),
        )
        .expect("fixture element");
    model
        .add_element(
            Element::new("node-switch", "Network Switch", ElementKind::NetworkDevice)
                .with_layer(Layer::Technology)
                .with_property(MATCH_KEY_PROPERTY, "isb-sw-01")
                .with_sub_element(
                    Element::new(
                        "cfg-switch-baseline",
                        "Switch Security Baseline",
                        ElementKind::ConfigurationItem,
                    )
                    .with_property("acl_policy", "deny-by-default")
                    .with_property("management_vlan", "10")
                    .with_property("snmp", "v3-only"),
                ),
        )
        .expect("fixture element");
    for (id, name, key) in [
        ("node-app-server", "Windows Server Application Server", "isb-app-01"),
        ("node-dc", "Windows Server Domain Controller", "isb-dc-01"),
        ("node-sec-server", "Windows Server Security Server", "isb-sec-01"),
    ] {
        model
            .add_element(
                Element::new(id, name, ElementKind::TechnologyNode)
                    .with_layer(Layer::Technology)
                    .with_property(MATCH_KEY_PROPERTY, key),
            )
            .expect("fixture element");
    }

    // Shared Windows Server baseline, rolled out to all three servers.
    model
        .add_stereotype(
            Stereotype::new("windows-server-baseline", ElementKind::TechnologyNode)
                .with_default_property("os", "Windows Server 2022")
                .with_baseline_sub_element(
                    Element::new("cfg-audit-policy", "Audit Policy", ElementKind::ConfigurationItem)
                        .with_property("audit_logon_events", "enabled")
                        .with_property("log_retention_days", "90"),
                )
                .with_baseline_sub_element(
                    Element::new(
                        "cfg-password-policy",
                        "Password Policy",
                        ElementKind::ConfigurationItem,
                    )
                    .with_property("complexity", "enabled")
                    .with_property("min_length", "14"),
                ),
        )
        .expect("fixture stereotype");
    for id in ["node-app-server", "node-dc", "node-sec-server"] {
        model
            .assign_stereotype(&id.into(), "windows-server-baseline")
            .expect("fixture stereotype assignment");
    }

    // Relationships.
    let edges: [(RelationshipKind, &str, &str); 32] = [
        // Strategy.
        (RelationshipKind::Supports, "obj-maintain-cybersecurity", "goal-fulfill-mission"),
        (RelationshipKind::Supports, "obj-meet-compliance", "goal-fulfill-mission"),
        // Requirement derivation.
        (RelationshipKind::DerivedFrom, "req-isb-functionality", "goal-fulfill-mission"),
        (RelationshipKind::DerivedFrom, "req-de-integration", "goal-fulfill-mission"),
        (RelationshipKind::DerivedFrom, "req-rmf", "obj-meet-compliance"),
        (RelationshipKind::DerivedFrom, "req-ac-4", "req-rmf"),
        (RelationshipKind::DerivedFrom, "req-sc-7", "req-rmf"),
        (RelationshipKind::DerivedFrom, "req-ca-7", "req-rmf"),
        (RelationshipKind::DerivedFrom, "req-ra-5", "req-rmf"),
        // Realization.
        (RelationshipKind::Realizes, "app-isb-client", "req-isb-functionality"),
        (RelationshipKind::Realizes, "app-isb-server", "req-isb-functionality"),
        (RelationshipKind::Realizes, "app-plm", "req-de-integration"),
        (RelationshipKind::Realizes, "app-mbse", "req-de-integration"),
        (RelationshipKind::Realizes, "svc-dth", "req-de-integration"),
        (RelationshipKind::Realizes, "svc-dtw", "req-de-integration"),
        (RelationshipKind::Realizes, "app-siem", "req-ca-7"),
        (RelationshipKind::Realizes, "app-monitoring", "req-ca-7"),
        (RelationshipKind::Realizes, "app-vuln", "req-ra-5"),
        // Runtime dependencies.
        (RelationshipKind::Supports, "svc-auth", "app-isb-client"),
        (RelationshipKind::Supports, "svc-auth", "app-isb-server"),
        (RelationshipKind::Supports, "svc-adds", "svc-auth"),
        // Application data flows; the DTh service is the central translator.
        (RelationshipKind::ExchangesWith, "app-isb-client", "app-isb-server"),
        (RelationshipKind::ExchangesWith, "app-isb-client", "app-siem"),
        (RelationshipKind::ExchangesWith, "app-isb-server", "app-siem"),
        (RelationshipKind::ExchangesWith, "app-monitoring", "svc-dth"),
        (RelationshipKind::ExchangesWith, "app-siem", "svc-dth"),
        (RelationshipKind::ExchangesWith, "app-vuln", "svc-dth"),
        (RelationshipKind::ExchangesWith, "svc-dth", "app-mbse"),
        (RelationshipKind::ExchangesWith, "svc-dth", "app-plm"),
        (RelationshipKind::ExchangesWith, "svc-dth", "svc-dtw"),
        // The switch configuration satisfies two cybersecurity requirements.
        (RelationshipKind::Satisfies, "cfg-switch-baseline", "req-ac-4"),
        (RelationshipKind::Satisfies, "cfg-switch-baseline", "req-sc-7"),
    ];
    for (kind, source, target) in edges {
        model
            .add_relationship(kind, &source.into(), &target.into(), None)
            .expect("fixture relationship");
    }
    // Network connectivity.
    for (source, target) in [
        ("node-workstation", "node-switch"),
        ("node-switch", "node-app-server"),
        ("node-switch", "node-dc"),
        ("node-switch", "node-sec-server"),
    ] {
        model
            .add_relationship(RelationshipKind::ConnectsTo, &source.into(), &target.into(), None)
            .expect("fixture relationship");
    }
    // Hosting.
    for (host, app) in [
        ("node-workstation", "app-isb-client"),
        ("node-app-server", "app-isb-server"),
        ("node-app-server", "app-plm"),
        ("node-app-server", "app-mbse"),
        ("node-app-server", "svc-dth"),
        ("node-app-server", "svc-dtw"),
        ("node-dc", "svc-adds"),
        ("node-dc", "svc-auth"),
        ("node-sec-server", "app-siem"),
        ("node-sec-server", "app-vuln"),
        ("node-sec-server", "app-monitoring"),
    ] {
        model
            .add_relationship(RelationshipKind::Contains, &host.into(), &app.into(), None)
            .expect("fixture relationship");
    }
    // Hand-authored configuration bindings.
    for (host, cfg) in [
        ("node-switch", "cfg-switch-baseline"),
        ("node-workstation", "cfg-ws-hardening"),
    ] {
        model
            .add_relationship(
                RelationshipKind::AssignedConfiguration,
                &host.into(),
                &cfg.into(),
                None,
            )
            .expect("fixture relationship");
    }

    // Views: shared elements projected per audience.
    model
        .create_view(
            "Conceptual/Strategic View",
            Layer::Conceptual,
            vec![
                "goal-fulfill-mission".into(),
                "obj-maintain-cybersecurity".into(),
                "obj-meet-compliance".into(),
            ],
            ViewDisplay {
                include_edge_kinds: vec![RelationshipKind::Supports],
                ..ViewDisplay::default()
            },
        )
        .expect("fixture view");
    model
        .create_view(
            "ISB Application View",
            Layer::Application,
            vec![
                "app-isb-client".into(),
                "app-isb-server".into(),
                "app-plm".into(),
                "app-mbse".into(),
                "svc-dth".into(),
                "svc-dtw".into(),
                "app-siem".into(),
                "app-vuln".into(),
                "app-monitoring".into(),
            ],
            ViewDisplay {
                show_properties: vec!["port".into(), "protocol".into()],
                include_edge_kinds: vec![RelationshipKind::ExchangesWith],
                ..ViewDisplay::default()
            },
        )
        .expect("fixture view");
    model
        .create_view(
            "Authentication and Logging Application View",
            Layer::Application,
            vec![
                "app-isb-client".into(),
                "app-isb-server".into(),
                "svc-auth".into(),
                "app-siem".into(),
            ],
            ViewDisplay {
                include_edge_kinds: vec![
                    RelationshipKind::ExchangesWith,
                    RelationshipKind::Supports,
                ],
                ..ViewDisplay::default()
            },
        )
        .expect("fixture view");
    model
        .create_view(
            "ISB Technology View",
            Layer::Technology,
            vec![
                "node-workstation".into(),
                "node-switch".into(),
                "node-app-server".into(),
                "node-dc".into(),
                "node-sec-server".into(),
            ],
            ViewDisplay {
                show_properties: vec![MATCH_KEY_PROPERTY.into()],
                include_edge_kinds: vec![RelationshipKind::ConnectsTo],
                ..ViewDisplay::default()
            },
        )
        .expect("fixture view");
    model
        .create_view(
            "Network Switch Configuration Technology View",
            Layer::Technology,
            vec![
                "node-switch".into(),
                "cfg-switch-baseline".into(),
                "req-ac-4".into(),
                "req-sc-7".into(),
            ],
            ViewDisplay {
                show_properties: vec!["acl_policy".into(), "snmp".into()],
                include_edge_kinds: vec![
                    RelationshipKind::AssignedConfiguration,
                    RelationshipKind::Satisfies,
                ],
                ..ViewDisplay::default()
            },
        )
        .expect("fixture view");

    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ElementId;
    use crate::trace::{CoverageStatus, TraceDirection};
    use crate::validate::validate_model;

    #[test]
    fn fixture_is_valid() {
        let model = isb_reference_model();
        let findings = validate_model(&model);
        assert!(findings.is_empty(), "fixture findings: {findings:?}");
    }

    #[test]
    fn fixture_has_five_hardware_elements() {
        let model = isb_reference_model();
        let report = model.layer_report(Layer::Technology);
        assert_eq!(report.elements.len(), 5);
    }

    #[test]
    fn fixture_has_one_goal_and_two_objectives() {
        let model = isb_reference_model();
        let conceptual = model.layer_report(Layer::Conceptual);
        assert_eq!(conceptual.elements.len(), 3);
        let goals = model
            .all_elements()
            .into_iter()
            .filter(|e| e.kind == ElementKind::StrategicGoal)
            .count();
        let objectives = model
            .all_elements()
            .into_iter()
            .filter(|e| e.kind == ElementKind::EnterpriseObjective)
            .count();
        assert_eq!((goals, objectives), (1, 2));
    }

    #[test]
    fn switch_baseline_satisfies_exactly_two_requirements() {
        let model = isb_reference_model();
        let coverage = model.coverage_report(None);
        assert_eq!(coverage.summary.satisfied, 2);
        for entry in &coverage.requirements {
            if entry.status == CoverageStatus::Satisfied {
                assert_eq!(entry.satisfied_by, vec![ElementId::new("cfg-switch-baseline")]);
            }
        }
    }

    #[test]
    fn upstream_trace_from_switch_config_reaches_compliance_objective() {
        let model = isb_reference_model();
        let paths = model
            .trace(&"cfg-switch-baseline".into(), TraceDirection::Upstream, None)
            .unwrap();
        let termini: Vec<&str> = paths.iter().map(|p| p.terminus().as_str()).collect();
        assert!(termini.contains(&"req-ac-4"));
        assert!(termini.contains(&"req-sc-7"));
        assert!(termini.contains(&"obj-meet-compliance"));
    }

    #[test]
    fn every_component_traces_to_strategy() {
        let model = isb_reference_model();
        let orphans = model.find_orphans();
        assert!(
            orphans.untraceable_elements.is_empty(),
            "untraceable: {:?}",
            orphans.untraceable_elements
        );
    }

    #[test]
    fn impact_of_domain_controller_reaches_both_isb_applications() {
        let model = isb_reference_model();
        let report = model.impact_analysis(&"node-dc".into()).unwrap();
        let ids: Vec<&str> = report.affected.iter().map(|a| a.element.as_str()).collect();
        assert!(ids.contains(&"app-isb-client"));
        assert!(ids.contains(&"app-isb-server"));
    }

    #[test]
    fn verbatim_snapshot_shows_no_drift() {
        let model = isb_reference_model();
        let snapshot = model.export_observed_snapshot("2024-01-01T00:00:00Z").unwrap();
        let report = model.drift_report(&snapshot).unwrap();
        assert!(!report.has_findings());
        assert_eq!(report.bound.len(), 5);
    }

    #[test]
    fn auth_and_logging_view_projects_four_shared_elements() {
        let model = isb_reference_model();
        let view = model
            .view(&"authentication-and-logging-application-view".into())
            .unwrap();
        assert_eq!(view.members.len(), 4);
        // Membership references shared elements; nothing was copied.
        for member in &view.members {
            assert!(model.contains_element(member));
        }
    }

    #[test]
    fn three_windows_servers_carry_the_baseline() {
        let mut model = isb_reference_model();
        let count = model
            .update_stereotype_baseline(
                "windows-server-baseline",
                Element::new("cfg-firewall", "Host Firewall", ElementKind::ConfigurationItem)
                    .with_property("state", "enabled"),
            )
            .unwrap();
        assert_eq!(count, 3);
        assert!(model.contains_element(&"node-dc-cfg-firewall".into()));
    }
}
