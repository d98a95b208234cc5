//! tether: command-line front end for the model engine.
//!
//! Exit status contract: 0 = success (and, for findings-style commands,
//! no findings), 1 = findings exist (`validate`, `drift`, `orphans`),
//! 2 = usage or input error. Machine output (`--format structured`) is
//! the canonical JSON form; tables are for humans.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};

use tether_core::drift::snapshot_from_str;
use tether_core::fixture::isb_reference_model;
use tether_core::store::{load_model, save_model, to_canonical_json};
use tether_core::trace::{CoverageStatus, RequirementFilter, TraceDirection, TracePath};
use tether_core::twin::{changeset_from_str, diff_models};
use tether_core::validate::validate_model;
use tether_core::view::{RenderFormat, ViewDisplay};
use tether_core::{
    Element, ElementId, ElementKind, Error, Layer, Model, RelationshipKind, RequirementSubkind,
};

#[derive(Parser)]
#[command(
    name = "tether",
    version,
    about = "Authoritative system model: traceability, coverage, drift, and what-if simulation"
)]
struct Cli {
    /// Model file (defaults to $TETHER_MODEL; `init` and `example` fall
    /// back to ./model.json)
    #[arg(long, global = true, env = "TETHER_MODEL", value_name = "FILE")]
    model: Option<PathBuf>,

    /// Write command output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Increase diagnostic chatter on stderr
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Create an empty model file
    Init {
        /// Model name
        #[arg(long)]
        name: String,
    },
    /// Write the bundled ISB reference model
    Example,
    /// Add an element to the model
    AddElement {
        #[arg(long)]
        id: String,
        #[arg(long)]
        name: String,
        #[arg(long, value_parser = parse_element_kind)]
        kind: ElementKind,
        #[arg(long, value_parser = parse_subkind)]
        subkind: Option<RequirementSubkind>,
        /// Layer tag (repeatable)
        #[arg(long = "layer", value_parser = parse_layer)]
        layers: Vec<Layer>,
        /// key=value property (repeatable)
        #[arg(long = "prop", value_parser = parse_key_value)]
        props: Vec<(String, String)>,
        /// Free-form tag (repeatable)
        #[arg(long = "tag")]
        tags: Vec<String>,
        /// Documentation reference (repeatable)
        #[arg(long = "doc")]
        docs: Vec<String>,
    },
    /// Add a typed relationship between two elements
    Link {
        #[arg(long, value_parser = parse_relationship_kind)]
        kind: RelationshipKind,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        note: Option<String>,
    },
    /// Ingest an OSCAL control catalog as cybersecurity requirements
    IngestCatalog {
        /// OSCAL catalog document
        #[arg(long, value_name = "FILE")]
        catalog: PathBuf,
        /// Requirement element the base controls derive from
        #[arg(long)]
        rmf_root: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Ingest a CCI list as derived cybersecurity requirements
    IngestCci {
        /// CCI list document
        #[arg(long, value_name = "FILE")]
        cci: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Requirement-graph size statistics
    Stats {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check every structural invariant (exit 1 when findings exist)
    Validate {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Enumerate trace paths from an element
    Trace {
        #[arg(long)]
        origin: String,
        #[arg(long, default_value = "upstream", value_parser = parse_direction)]
        direction: TraceDirection,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Per-requirement satisfaction report
    Coverage {
        /// Restrict to a control family (matches the `family` property)
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_parser = parse_subkind)]
        subkind: Option<RequirementSubkind>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Unsatisfied requirements and untraceable elements (exit 1 if any)
    Orphans {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Elements affected by a change to the origin
    Impact {
        #[arg(long)]
        origin: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Reconcile an observed snapshot against the model (exit 1 on drift)
    Drift {
        /// Observed snapshot document
        #[arg(long, value_name = "FILE")]
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Apply a change set to a forked twin and report propagated effects
    Simulate {
        /// Change-set document
        #[arg(long, value_name = "FILE")]
        changes: PathBuf,
        /// Save the mutated twin here (the base model file is never touched)
        #[arg(long, value_name = "FILE")]
        save_twin: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Field-level delta between the model and another model file
    Diff {
        /// Model file to compare against
        #[arg(long, value_name = "FILE")]
        other: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Create a view over existing elements
    ViewCreate {
        #[arg(long)]
        name: String,
        #[arg(long, value_parser = parse_layer)]
        layer: Layer,
        /// Member element id (repeatable)
        #[arg(long = "member")]
        members: Vec<String>,
        /// Property key to display (repeatable)
        #[arg(long = "show-prop")]
        show_props: Vec<String>,
        #[arg(long)]
        show_sub_elements: bool,
        /// Relationship kind to include (repeatable)
        #[arg(long = "edge-kind", value_parser = parse_relationship_kind)]
        edge_kinds: Vec<RelationshipKind>,
    },
    /// Render a view to dot, graphml, or structured text
    ViewRender {
        #[arg(long)]
        view: String,
        #[arg(long, default_value = "dot", value_parser = parse_render_format)]
        format: RenderFormat,
    },
    /// Elements of one layer plus cross-layer edge counts
    LayerReport {
        #[arg(long, value_parser = parse_layer)]
        layer: Layer,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
}

fn parse_element_kind(s: &str) -> Result<ElementKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_relationship_kind(s: &str) -> Result<RelationshipKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_layer(s: &str) -> Result<Layer, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_subkind(s: &str) -> Result<RequirementSubkind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_direction(s: &str) -> Result<TraceDirection, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_render_format(s: &str) -> Result<RenderFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_key_value(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((key, value)) if !key.is_empty() => Ok((key.to_string(), value.to_string())),
        _ => Err(format!("expected key=value, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let model_path = cli.model.clone();
    let verbose = cli.verbose;
    let out_path = cli.output.clone();

    // init and example create the file; everything else loads it.
    let required_path = || -> Result<PathBuf, Error> {
        model_path.clone().ok_or_else(|| {
            Error::InvalidInput("no model file: pass --model or set TETHER_MODEL".into())
        })
    };
    let creation_path = model_path.clone().unwrap_or_else(|| PathBuf::from("model.json"));

    let load = |path: &PathBuf| -> Result<Model, Error> {
        let model = load_model(path)
            .map_err(|e| Error::InvalidInput(format!("cannot load {}: {e}", path.display())))?;
        if verbose > 0 {
            eprintln!(
                "loaded {} ({} elements, {} relationships)",
                path.display(),
                model.all_elements().len(),
                model.relationships.len()
            );
        }
        Ok(model)
    };
    let read_input = |path: &PathBuf| -> Result<String, Error> {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
    };
    let emit = |text: &str| -> Result<(), Error> {
        match &out_path {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    };

    match cli.command {
        Command::Init { name } => {
            if creation_path.exists() {
                return Err(Error::Conflict(format!(
                    "{} already exists",
                    creation_path.display()
                )));
            }
            let model = Model::new(name)?;
            save_model(&model, &creation_path)?;
            emit(&format!("created empty model at {}\n", creation_path.display()))?;
            Ok(0)
        }
        Command::Example => {
            if creation_path.exists() {
                return Err(Error::Conflict(format!(
                    "{} already exists",
                    creation_path.display()
                )));
            }
            let model = isb_reference_model();
            save_model(&model, &creation_path)?;
            emit(&format!(
                "wrote ISB reference model to {}\n",
                creation_path.display()
            ))?;
            Ok(0)
        }
        Command::AddElement {
            id,
            name,
            kind,
            subkind,
            layers,
            props,
            tags,
            docs,
        } => {
            let path = required_path()?;
            let mut model = load(&path)?;
            let mut element = Element::new(id.as_str(), name, kind);
            element.subkind = subkind;
            element.layer_tags.extend(layers);
            element.properties.extend(props);
            element.tags.extend(tags);
            element.documentation.extend(docs);
            model.add_element(element)?;
            save_model(&model, &path)?;
            emit(&format!("added element {id}\n"))?;
            Ok(0)
        }
        Command::Link {
            kind,
            source,
            target,
            note,
        } => {
            let path = required_path()?;
            let mut model = load(&path)?;
            let edge = model.add_relationship(kind, &source.as_str().into(), &target.as_str().into(), note)?;
            save_model(&model, &path)?;
            emit(&format!("added relationship {edge}\n"))?;
            Ok(0)
        }
        Command::IngestCatalog {
            catalog,
            rmf_root,
            format,
        } => {
            let path = required_path()?;
            let mut model = load(&path)?;
            let text = read_input(&catalog)?;
            let report = model.ingest_oscal_catalog(&text, &rmf_root.as_str().into())?;
            save_model(&model, &path)?;
            emit(&render_ingest(&report, format)?)?;
            Ok(0)
        }
        Command::IngestCci { cci, format } => {
            let path = required_path()?;
            let mut model = load(&path)?;
            let text = read_input(&cci)?;
            let report = model.ingest_cci_list(&text)?;
            save_model(&model, &path)?;
            emit(&render_ingest(&report, format)?)?;
            Ok(0)
        }
        Command::Stats { format } => {
            let model = load(&required_path()?)?;
            let stats = model.requirement_stats();
            let text = match format {
                Format::Structured => to_canonical_json(&stats)?,
                Format::Table => output::table(
                    &["metric", "count"],
                    &[
                        vec!["requirement_elements".into(), stats.requirement_elements.to_string()],
                        vec![
                            "direct_requirement_edges".into(),
                            stats.direct_requirement_edges.to_string(),
                        ],
                        vec!["indirect_pairs".into(), stats.indirect_pairs.to_string()],
                        vec!["total_records".into(), stats.total_records.to_string()],
                    ],
                ),
            };
            emit(&text)?;
            Ok(0)
        }
        Command::Validate { format } => {
            let model = load(&required_path()?)?;
            let findings = validate_model(&model);
            let text = match format {
                Format::Structured => to_canonical_json(&findings)?,
                Format::Table => {
                    if findings.is_empty() {
                        "no findings\n".to_string()
                    } else {
                        output::table(
                            &["severity", "code", "subject", "message"],
                            &findings
                                .iter()
                                .map(|f| {
                                    vec![
                                        f.severity.to_string(),
                                        f.code.to_string(),
                                        f.subject.clone(),
                                        f.message.clone(),
                                    ]
                                })
                                .collect::<Vec<_>>(),
                        )
                    }
                }
            };
            emit(&text)?;
            Ok(if findings.is_empty() { 0 } else { 1 })
        }
        Command::Trace {
            origin,
            direction,
            max_depth,
            format,
        } => {
            let model = load(&required_path()?)?;
            let paths = model.trace(&origin.as_str().into(), direction, max_depth)?;
            let text = match format {
                Format::Structured => to_canonical_json(&serde_json::json!({
                    "origin": origin,
                    "direction": direction,
                    "paths": paths,
                }))?,
                Format::Table => {
                    if paths.is_empty() {
                        "no paths\n".to_string()
                    } else {
                        output::table(
                            &["hops", "path"],
                            &paths
                                .iter()
                                .map(|p| vec![p.hops.len().to_string(), render_path(p)])
                                .collect::<Vec<_>>(),
                        )
                    }
                }
            };
            emit(&text)?;
            Ok(0)
        }
        Command::Coverage {
            family,
            subkind,
            format,
        } => {
            let model = load(&required_path()?)?;
            let filter = if family.is_some() || subkind.is_some() {
                Some(RequirementFilter { family, subkind })
            } else {
                None
            };
            let report = model.coverage_report(filter.as_ref());
            let text = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    let mut rows: Vec<Vec<String>> = report
                        .requirements
                        .iter()
                        .map(|r| {
                            vec![
                                r.requirement.to_string(),
                                match r.status {
                                    CoverageStatus::Satisfied => "Satisfied".to_string(),
                                    CoverageStatus::Unsatisfied => "Unsatisfied".to_string(),
                                },
                                r.satisfied_by
                                    .iter()
                                    .map(|s| s.as_str())
                                    .collect::<Vec<_>>()
                                    .join(", "),
                            ]
                        })
                        .collect();
                    rows.push(vec![
                        format!("total: {}", report.summary.total),
                        format!("satisfied: {}", report.summary.satisfied),
                        format!("unsatisfied: {}", report.summary.unsatisfied),
                    ]);
                    output::table(&["requirement", "status", "satisfied_by"], &rows)
                }
            };
            emit(&text)?;
            Ok(0)
        }
        Command::Orphans { format } => {
            let model = load(&required_path()?)?;
            let report = model.find_orphans();
            let text = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    let mut rows = Vec::new();
                    for id in &report.unsatisfied_requirements {
                        rows.push(vec!["unsatisfied_requirement".to_string(), id.to_string()]);
                    }
                    for id in &report.untraceable_elements {
                        rows.push(vec!["untraceable_element".to_string(), id.to_string()]);
                    }
                    if rows.is_empty() {
                        "no orphans\n".to_string()
                    } else {
                        output::table(&["kind", "element"], &rows)
                    }
                }
            };
            emit(&text)?;
            Ok(if report.is_empty() { 0 } else { 1 })
        }
        Command::Impact { origin, format } => {
            let model = load(&required_path()?)?;
            let report = model.impact_analysis(&origin.as_str().into())?;
            let text = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    if report.affected.is_empty() {
                        "no affected elements\n".to_string()
                    } else {
                        output::table(
                            &["element", "distance", "witness"],
                            &report
                                .affected
                                .iter()
                                .map(|a| {
                                    vec![
                                        a.element.to_string(),
                                        a.distance.to_string(),
                                        render_path(&a.path),
                                    ]
                                })
                                .collect::<Vec<_>>(),
                        )
                    }
                }
            };
            emit(&text)?;
            Ok(0)
        }
        Command::Drift { snapshot, format } => {
            let model = load(&required_path()?)?;
            let text = read_input(&snapshot)?;
            let snapshot = snapshot_from_str(&text)?;
            let report = model.drift_report(&snapshot)?;
            let rendered = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    let mut rows = Vec::new();
                    for id in &report.absent_nodes {
                        rows.push(vec!["absent_node".into(), id.to_string(), String::new()]);
                    }
                    for id in &report.missing_declared {
                        rows.push(vec!["missing_declared".into(), id.to_string(), String::new()]);
                    }
                    for item in &report.unexpected_observed {
                        rows.push(vec![
                            "unexpected_observed".into(),
                            format!("{}:{}", item.match_key, item.name),
                            format!("{:?}", item.item_kind),
                        ]);
                    }
                    for m in &report.value_mismatches {
                        rows.push(vec![
                            "value_mismatch".into(),
                            format!("{}.{}", m.element, m.attribute),
                            format!(
                                "declared {} observed {}",
                                m.declared,
                                m.observed.as_deref().unwrap_or("(absent)")
                            ),
                        ]);
                    }
                    let mut text = format!(
                        "{} bound, {} impacted requirements\n",
                        report.bound.len(),
                        report.impacted_requirements.len()
                    );
                    if rows.is_empty() {
                        text.push_str("no drift\n");
                    } else {
                        text.push_str(&output::table(&["finding", "subject", "detail"], &rows));
                    }
                    text
                }
            };
            emit(&rendered)?;
            Ok(if report.has_findings() { 1 } else { 0 })
        }
        Command::Simulate {
            changes,
            save_twin,
            format,
        } => {
            let model = load(&required_path()?)?;
            let text = read_input(&changes)?;
            let changes = changeset_from_str(&text)?;
            let mut twin = model.fork_twin();
            let report = twin.apply_changeset(&changes)?;
            if let Some(twin_path) = save_twin {
                save_model(&twin, &twin_path)?;
            }
            let rendered = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    let mut text = format!(
                        "applied {} ops: +{} -{} ~{} records\n",
                        report.applied_ops,
                        report.delta.added.len(),
                        report.delta.removed.len(),
                        report.delta.changed.len()
                    );
                    for service in &report.affected_services {
                        text.push_str(&format!("affected service: {service}\n"));
                    }
                    for requirement in &report.affected_requirements {
                        text.push_str(&format!("affected requirement: {requirement}\n"));
                    }
                    text
                }
            };
            emit(&rendered)?;
            Ok(0)
        }
        Command::Diff { other, format } => {
            let model = load(&required_path()?)?;
            let other = load_model(&other)?;
            let delta = diff_models(&model, &other);
            let rendered = match format {
                Format::Structured => to_canonical_json(&delta)?,
                Format::Table => {
                    if delta.is_empty() {
                        "no differences\n".to_string()
                    } else {
                        let mut rows = Vec::new();
                        for id in &delta.added {
                            rows.push(vec!["added".to_string(), id.clone(), String::new()]);
                        }
                        for id in &delta.removed {
                            rows.push(vec!["removed".to_string(), id.clone(), String::new()]);
                        }
                        for change in &delta.changed {
                            rows.push(vec![
                                "changed".to_string(),
                                format!("{}.{}", change.id, change.field),
                                format!("{} -> {}", change.before, change.after),
                            ]);
                        }
                        output::table(&["kind", "record", "detail"], &rows)
                    }
                }
            };
            emit(&rendered)?;
            Ok(0)
        }
        Command::ViewCreate {
            name,
            layer,
            members,
            show_props,
            show_sub_elements,
            edge_kinds,
        } => {
            let path = required_path()?;
            let mut model = load(&path)?;
            let members: Vec<ElementId> = members.iter().map(|m| m.as_str().into()).collect();
            let id = model.create_view(
                name,
                layer,
                members,
                ViewDisplay {
                    show_properties: show_props,
                    show_sub_elements,
                    include_edge_kinds: edge_kinds,
                },
            )?;
            save_model(&model, &path)?;
            emit(&format!("created view {id}\n"))?;
            Ok(0)
        }
        Command::ViewRender { view, format } => {
            let model = load(&required_path()?)?;
            let rendered = model.render_view(&view.as_str().into(), format)?;
            emit(&rendered)?;
            Ok(0)
        }
        Command::LayerReport { layer, format } => {
            let model = load(&required_path()?)?;
            let report = model.layer_report(layer);
            let text = match format {
                Format::Structured => to_canonical_json(&report)?,
                Format::Table => {
                    let mut rows: Vec<Vec<String>> = report
                        .elements
                        .iter()
                        .map(|id| vec!["element".to_string(), id.to_string()])
                        .collect();
                    for edge in &report.cross_layer_edges {
                        rows.push(vec![
                            "cross_layer_edges".to_string(),
                            format!(
                                "{} {} -> {}: {}",
                                edge.kind, edge.source_layer, edge.target_layer, edge.count
                            ),
                        ]);
                    }
                    if rows.is_empty() {
                        format!("no elements in layer {layer}\n")
                    } else {
                        output::table(&["kind", "entry"], &rows)
                    }
                }
            };
            emit(&text)?;
            Ok(0)
        }
    }
}

fn render_path(path: &TracePath) -> String {
    let mut text = path.origin.to_string();
    for hop in &path.hops {
        text.push_str(&format!(" -[{}]-> {}", hop.kind, hop.element));
    }
    text
}

fn render_ingest(report: &tether_core::ingest::IngestReport, format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Structured => to_canonical_json(report)?,
        Format::Table => {
            let mut text = format!(
                "created {} elements, {} edges ({} skipped), source digest {}\n",
                report.elements_created,
                report.edges_created,
                report.skipped.len(),
                report.source_digest
            );
            for skip in report.skipped.iter().take(20) {
                text.push_str(&format!("skipped {}: {}\n", skip.id, skip.reason));
            }
            if report.skipped.len() > 20 {
                text.push_str(&format!("... and {} more\n", report.skipped.len() - 20));
            }
            text
        }
    })
}
