use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use chimera_core::compose::BrokenChimera;
use chimera_core::enlarge::{triple_and_extend, EnlargedRepresentation};
use chimera_core::gadget::{gadget_search, GadgetSearchBudget};
use chimera_core::hamiltonicity::{extract_cycle, lift_cycle};
use chimera_core::instance::{validate_instance, InstanceJson, RepresentationJson};
use chimera_core::oracle::{canonical_cycle, find_hamiltonian_cycle, verify_hamiltonian_cycle, SearchOutcome};
use chimera_core::pipeline::{embed, Built};
use chimera_core::render::{render_ascii, render_dot, render_svg, SvgOptions};
use chimera_core::{ChimeraNode, ChimeraTopology, Element, Error, InstanceGraph};
use serde_json::{json, Value};

use crate::manifest::{check_header, load_instance, read, write_json, write_text, Loaded};
use crate::{Command, Refused, Style};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate { instance } => validate(&instance),
        Command::Embed { instance, seed, side_bound, output } => cmd_embed(&instance, seed, side_bound, output),
        Command::Enlarge { instance, representation, output } => enlarge(&instance, &representation, output),
        Command::Build { manifest } => build(&manifest),
        Command::Pegasus { manifest } => pegasus(&manifest),
        Command::Lift { manifest, cycle } => lift(&manifest, cycle.as_deref()),
        Command::Extract { manifest, cycle } => extract(&manifest, &cycle),
        Command::Solve { manifest } => solve(&manifest),
        Command::Verify { manifest, cycle } => verify(&manifest, &cycle),
        Command::Render { chimera, style, cycle, output } => render(&chimera, style, cycle.as_deref(), output),
        Command::GadgetSearch { max_broken, output } => search(max_broken, output),
    }
}

fn emit(output: Option<PathBuf>, value: &Value) -> Result<()> {
    match output {
        Some(p) => write_json(&p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn validate(path: &Path) -> Result<()> {
    let j: InstanceJson = serde_json::from_str(&read(path)?).context("instance is not valid JSON")?;
    let (g, labels) = j.to_graph()?;
    let report = match validate_instance(g, labels) {
        Ok(b) => json!({"ok": true, "vertices": b.vertex_count(), "edges": b.graph.edge_count()}),
        Err(v) => {
            let violations: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            println!("{}", serde_json::to_string_pretty(&json!({"ok": false, "violations": violations}))?);
            bail!(Refused(format!("{} violation(s)", violations.len())));
        }
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn cmd_embed(path: &Path, seed: u64, side_bound: Option<usize>, output: Option<PathBuf>) -> Result<()> {
    let b = load_instance(path)?;
    let r = embed(&b, side_bound, Default::default(), seed)?.normalized();
    emit(output, &serde_json::to_value(r.to_json(&b))?)
}

fn enlarged_json(l: &EnlargedRepresentation, b: &InstanceGraph) -> Value {
    let pt = |p: &chimera_core::GridCoord| json!([p.x, p.y]);
    json!({
        "vertices": l.vertices.len(),
        "edges": l.edges.len(),
        "side": l.side(),
        "blocks": (0..b.vertex_count()).map(|v| {
            let r = l.blocks[v].rect;
            (b.id(v), json!([pt(&r.min()), pt(&r.max())]))
        }).collect::<BTreeMap<_, _>>(),
        "tentacles": l.tentacles.iter().map(|(&(a, c), t)| {
            let pieces: Vec<Vec<Value>> = t.pieces.iter().map(|p| p.iter().map(pt).collect()).collect();
            (format!("{}-{}", b.id(a), b.id(c)), json!({"even": b.id(t.even), "odd": b.id(t.odd), "pieces": pieces}))
        }).collect::<BTreeMap<_, _>>(),
    })
}

fn enlarge(instance: &Path, representation: &Path, output: Option<PathBuf>) -> Result<()> {
    let b = load_instance(instance)?;
    let j: RepresentationJson = serde_json::from_str(&read(representation)?).context("representation")?;
    let l = triple_and_extend(&j.to_representation(&b)?, &b)?;
    emit(output, &enlarged_json(&l, &b))
}

fn with_header(mut head: Value, key: &str, data: Value) -> Value {
    head[key] = data;
    head
}

fn chimera_artifact(loaded: &Loaded, c: &BrokenChimera) -> Value {
    with_header(loaded.header("chimera"), "chimera", c.to_json())
}

fn build(path: &Path) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let built = loaded.build()?;
    let out = &loaded.manifest.output_dir;
    let b = &loaded.instance;
    let rep = serde_json::to_value(built.representation.to_json(b))?;
    write_json(&out.join("representation.json"), &with_header(loaded.header("representation"), "representation", rep))?;
    let enl = enlarged_json(&built.enlarged, b);
    write_json(&out.join("enlarged.json"), &with_header(loaded.header("enlarged"), "enlarged", enl))?;
    write_json(&out.join("chimera.json"), &chimera_artifact(&loaded, &built.chimera))?;
    write_text(&out.join("chimera.dot"), &render_dot(&built.chimera.topology))?;
    write_text(&out.join("chimera.svg"), &render_svg(&built.chimera.topology, SvgOptions::default()))?;
    if loaded.manifest.pegasus {
        write_json(&out.join("chimera-plus.json"), &chimera_artifact(&loaded, &built.chimera.pegasus_augment()))?;
    }
    println!(
        "{}",
        json!({"nodes": built.chimera.node_count(), "cols": built.chimera.topology.cols, "rows": built.chimera.topology.rows, "output": out})
    );
    Ok(())
}

fn pegasus(path: &Path) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let built = loaded.build()?;
    let out = loaded.manifest.output_dir.join("chimera-plus.json");
    write_json(&out, &chimera_artifact(&loaded, &built.chimera.pegasus_augment()))
}

/// Checks `nodes` on C(B), and on C+(B) when the manifest asks for it.
fn verify_on(loaded: &Loaded, c: &BrokenChimera, nodes: &[ChimeraNode]) -> Result<Value> {
    let mut report = serde_json::Map::new();
    let mut hosts = vec![("chimera", c.clone())];
    if loaded.manifest.pegasus {
        hosts.push(("augmented", c.pegasus_augment()));
    }
    for (name, host) in hosts {
        let m = host.materialize();
        let ok = m.indices(nodes).is_some_and(|idx| verify_hamiltonian_cycle(&m.graph, &idx));
        if !ok {
            bail!(Refused(format!("cycle is not Hamiltonian on the {name} graph")));
        }
        report.insert(name.into(), json!(true));
    }
    Ok(Value::Object(report))
}

fn instance_cycle(loaded: &Loaded, path: Option<&Path>) -> Result<Vec<usize>> {
    let b = &loaded.instance;
    match path {
        Some(p) => {
            let ids: Vec<Value> = serde_json::from_str(&read(p)?).context("cycle must be a JSON list of vertex ids")?;
            let h = ids
                .iter()
                .map(|v| {
                    let s = v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                    b.vertex_of(&s).ok_or_else(|| anyhow!(Refused(format!("unknown vertex {s}"))))
                })
                .collect::<Result<Vec<_>>>()?;
            if !verify_hamiltonian_cycle(&b.graph, &h) {
                bail!(Refused("given cycle is not a Hamiltonian cycle of the instance".into()));
            }
            Ok(h)
        }
        None => match find_hamiltonian_cycle(&b.graph, loaded.manifest.budgets.search()) {
            SearchOutcome::Found(h) => Ok(h),
            SearchOutcome::NotFound => bail!(Refused("instance has no Hamiltonian cycle".into())),
            SearchOutcome::Timeout => bail!(Error::Timeout("Hamiltonian cycle search on the instance".into())),
        },
    }
}

fn ids(b: &InstanceGraph, cycle: &[usize]) -> Vec<String> {
    cycle.iter().map(|&v| b.id(v)).collect()
}

fn lift_and_write(loaded: &Loaded, built: &Built, h: &[usize]) -> Result<(Vec<ChimeraNode>, Value)> {
    let b = &loaded.instance;
    let lifted = lift_cycle(&b.graph, h, &built.chimera)?;
    let verified = verify_on(loaded, &built.chimera, &lifted)?;
    let data = json!({
        "instanceCycle": ids(b, &canonical_cycle(h)),
        "nodes": lifted.iter().map(ChimeraNode::name).collect::<Vec<_>>(),
    });
    write_json(&loaded.manifest.output_dir.join("cycle.json"), &with_header(loaded.header("cycle"), "cycle", data))?;
    Ok((lifted, verified))
}

fn lift(path: &Path, cycle: Option<&Path>) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let built = loaded.build()?;
    let h = instance_cycle(&loaded, cycle)?;
    let (lifted, verified) = lift_and_write(&loaded, &built, &h)?;
    println!("{}", json!({"length": lifted.len(), "verified": verified}));
    Ok(())
}

/// Reads a cycle artifact after checking it matches the loaded fixtures.
fn read_cycle(loaded: &Loaded, path: &Path) -> Result<(Vec<ChimeraNode>, Value)> {
    let v: Value = serde_json::from_str(&read(path)?).context("cycle artifact")?;
    check_header(&v, &loaded.fixtures)?;
    let names = v["cycle"]["nodes"].as_array().ok_or_else(|| anyhow!(Refused("artifact has no cycle nodes".into())))?;
    let nodes = names
        .iter()
        .map(|n| {
            n.as_str()
                .and_then(ChimeraNode::parse_name)
                .ok_or_else(|| anyhow!(Refused(format!("bad node name {n}"))))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((nodes, v["cycle"]["instanceCycle"].clone()))
}

fn extract(path: &Path, cycle: &Path) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let built = loaded.build()?;
    let (nodes, recorded) = read_cycle(&loaded, cycle)?;
    let b = &loaded.instance;
    let h = extract_cycle(&b.graph, &built.chimera, &nodes).map_err(|e| anyhow!(Refused(e.to_string())))?;
    let out = json!(ids(b, &h));
    let round_trip = recorded.is_array().then(|| recorded == out);
    println!("{}", json!({"instanceCycle": out, "roundTrip": round_trip}));
    if round_trip == Some(false) {
        bail!(Refused("extracted cycle differs from the recorded one".into()));
    }
    Ok(())
}

fn solve(path: &Path) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let b = &loaded.instance;
    let h = match find_hamiltonian_cycle(&b.graph, loaded.manifest.budgets.search()) {
        SearchOutcome::Found(h) => h,
        SearchOutcome::NotFound => {
            println!("{}", json!({"result": "None (certified)"}));
            return Ok(());
        }
        SearchOutcome::Timeout => bail!(Error::Timeout("Hamiltonian cycle search on the instance".into())),
    };
    let built = loaded.build()?;
    let (lifted, verified) = lift_and_write(&loaded, &built, &h)?;
    let back = extract_cycle(&b.graph, &built.chimera, &lifted)?;
    let round_trip = back == canonical_cycle(&h);
    println!(
        "{}",
        json!({"result": "cycle", "instanceCycle": ids(b, &back), "length": lifted.len(), "verified": verified, "roundTrip": round_trip})
    );
    if !round_trip {
        bail!(Error::InvariantViolation("extraction did not return the lifted cycle".into()));
    }
    Ok(())
}

fn verify(path: &Path, cycle: &Path) -> Result<()> {
    let loaded = Loaded::open(path)?;
    let built = loaded.build()?;
    let (nodes, _) = read_cycle(&loaded, cycle)?;
    let verified = verify_on(&loaded, &built.chimera, &nodes)?;
    println!("{}", json!({"verified": verified}));
    Ok(())
}

fn render(chimera: &Path, style: Style, cycle: Option<&Path>, output: Option<PathBuf>) -> Result<()> {
    let v: Value = serde_json::from_str(&read(chimera)?).context("chimera artifact")?;
    let data = &v["chimera"];
    let topology: ChimeraTopology = serde_json::from_value(data["topology"].clone()).context("artifact topology")?;
    let ownership: BTreeMap<ChimeraNode, Element> =
        serde_json::from_value::<BTreeMap<String, Element>>(data["ownership"].clone())
            .context("artifact ownership")?
            .into_iter()
            .map(|(k, e)| ChimeraNode::parse_name(&k).map(|n| (n, e)).ok_or_else(|| anyhow!("bad node name {k}")))
            .collect::<Result<_>>()?;
    let overlay: Option<Vec<ChimeraNode>> = match cycle {
        Some(p) => {
            let c: Value = serde_json::from_str(&read(p)?).context("cycle artifact")?;
            let names = c["cycle"]["nodes"].as_array().ok_or_else(|| anyhow!("artifact has no cycle nodes"))?;
            Some(names.iter().filter_map(|n| n.as_str().and_then(ChimeraNode::parse_name)).collect())
        }
        None => None,
    };
    let text = match style {
        Style::Svg => render_svg(&topology, SvgOptions { cycle: overlay.as_deref(), ownership: Some(&ownership) }),
        Style::Ascii => render_ascii(&topology),
        Style::Dot => render_dot(&topology),
    };
    match output {
        Some(p) => write_text(&p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn search(max_broken: usize, output: Option<PathBuf>) -> Result<()> {
    let budget = GadgetSearchBudget { max_broken, ..GadgetSearchBudget::default() };
    let report = gadget_search(budget)?;
    eprintln!(
        "found after {} candidates ({} passed the class-count filter) in {} ms",
        report.candidates_examined, report.balanced_candidates, report.elapsed_ms
    );
    let text = report.gadget.to_json();
    match output {
        Some(p) => write_text(&p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
