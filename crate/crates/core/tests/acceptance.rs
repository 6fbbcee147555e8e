//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the target exits nonzero if any criterion fails. Runs without the libtest
//! harness so the lines are never captured.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use chimera_core::compose::Element;
use chimera_core::corpus::{corpus, fixtures, CorpusEntry};
use chimera_core::gadget::{gadget_search, GadgetSearchBudget, VertexGadget};
use chimera_core::hamiltonicity::{classify_tentacles, extract_by_contraction, extract_cycle, lift_cycle, Designation};
use chimera_core::oracle::{
    canonical_cycle, enumerate_hamiltonian_cycles, find_hamiltonian_cycle, find_hamiltonian_path, verify_hamiltonian_cycle,
    verify_hamiltonian_path, SearchBudget, SearchOutcome,
};
use chimera_core::pipeline::{build_shipped, Built};
use chimera_core::tentacle::{modify_tentacle, ChimeraTentacle, TentaclePatterns};
use chimera_core::{pegasus_contains_augmented_cell, ChimeraNode, Dir, PegasusNiceModel};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Case {
    entry: CorpusEntry,
    built: Built,
}

fn built_corpus() -> Result<Vec<Case>, String> {
    corpus()
        .into_iter()
        .map(|entry| {
            let built = build_shipped(&entry.instance, 0).map_err(|e| format!("{}: {e}", entry.name))?;
            Ok(Case { entry, built })
        })
        .collect()
}

fn gadget_suite() -> Outcome {
    let started = Instant::now();
    let shipped = VertexGadget::shipped();
    shipped.verify_witnesses().map_err(|e| e.to_string())?;
    let solved = shipped.solve_cases(SearchBudget::default()).map_err(|e| e.to_string())?;
    check(solved.is_some(), || "exhaustive search refutes a case of the shipped gadget".into())?;
    let report = gadget_search(GadgetSearchBudget::default()).map_err(|e| e.to_string())?;
    report.gadget.verify_witnesses().map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "six cases verified, search re-found a gadget after {} candidates, {:.1?}",
        report.candidates_examined, elapsed
    ))
}

fn tentacle_paths_agree(t: &ChimeraTentacle, label: &str) -> Result<(), String> {
    let m = t.graph();
    let budget = SearchBudget::default();
    for (name, start, end, built) in [
        ("cross", t.odd_entry, t.even_entry, t.cross_path()),
        ("return", t.even_entry, t.even_partner, t.return_path()),
    ] {
        let (s, e) = (m.index_of(&start).unwrap(), m.index_of(&end).unwrap());
        let exhaustive = find_hamiltonian_path(&m.graph, s, e, budget);
        check(exhaustive.is_found(), || format!("{label}: exhaustive search finds no {name} path"))?;
        let path = built.map_err(|err| format!("{label}: {name}: {err}"))?;
        let idx = m.indices(&path).ok_or_else(|| format!("{label}: {name} path leaves the tentacle"))?;
        check(verify_hamiltonian_path(&m.graph, &idx) && idx[0] == s && idx[idx.len() - 1] == e, || {
            format!("{label}: constructed {name} path does not verify")
        })?;
    }
    Ok(())
}

fn tentacle_suite(cases: &[Case]) -> Outcome {
    let patterns = TentaclePatterns::shipped();
    let mut small = 0;
    let mut all = 0;
    for case in cases {
        for (e, t) in &case.built.chimera.tentacles {
            let label = format!("{} tentacle {e:?}", case.entry.name);
            if t.cells().len() <= 5 {
                tentacle_paths_agree(t, &label)?;
                small += 1;
            } else {
                t.cross_path().map_err(|err| format!("{label}: {err}"))?;
                t.return_path().map_err(|err| format!("{label}: {err}"))?;
            }
            all += 1;
        }
    }
    let synthetic = [
        vec![vec![(0, 0), (0, 1)]],
        vec![vec![(0, 0), (0, 1)], vec![(1, 0), (1, 1)]],
        vec![vec![(1, 0), (1, 1)], vec![(2, 0), (2, 1)]],
    ];
    for pieces in synthetic {
        let label = format!("synthetic {pieces:?}");
        let t = modify_tentacle(pieces, Dir::Left, Dir::Right, &patterns).map_err(|e| format!("{label}: {e}"))?;
        tentacle_paths_agree(&t, &label)?;
        small += 1;
    }
    Ok(format!("{small} tentacles of at most 5 cells match exhaustive search, {all} corpus tentacles built"))
}

fn hamiltonian_cycle(case: &Case) -> Option<Vec<usize>> {
    find_hamiltonian_cycle(&case.entry.instance.graph, SearchBudget::default()).found()
}

fn lift_suite(cases: &[Case]) -> Outcome {
    let started = Instant::now();
    let mut lifted = 0;
    for case in cases {
        let Some(h) = hamiltonian_cycle(case) else {
            continue;
        };
        let g = &case.entry.instance.graph;
        let c = &case.built.chimera;
        let cycle = lift_cycle(g, &h, c).map_err(|e| format!("{}: {e}", case.entry.name))?;
        for host in [c.clone(), c.pegasus_augment()] {
            let m = host.materialize();
            let idx = m.indices(&cycle).ok_or_else(|| format!("{}: lifted node missing", case.entry.name))?;
            check(verify_hamiltonian_cycle(&m.graph, &idx), || {
                format!("{}: lifted cycle rejected (augmented: {})", case.entry.name, host.topology.augmented)
            })?;
        }
        lifted += 1;
    }
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("{lifted} Hamiltonian instances lift on C and C+ in {elapsed:.1?}"))
}

fn round_trip_suite(cases: &[Case]) -> Outcome {
    let mut trips = 0;
    for case in cases {
        let g = &case.entry.instance.graph;
        let (cycles, complete) = enumerate_hamiltonian_cycles(g, 1000, SearchBudget::default());
        check(complete, || format!("{}: cycle enumeration incomplete", case.entry.name))?;
        for h in cycles {
            let c = &case.built.chimera;
            let lifted = lift_cycle(g, &h, c).map_err(|e| format!("{}: {e}", case.entry.name))?;
            let back = extract_cycle(g, c, &lifted).map_err(|e| format!("{}: {e}", case.entry.name))?;
            let contracted = extract_by_contraction(g, c, &lifted).map_err(|e| format!("{}: {e}", case.entry.name))?;
            let want = canonical_cycle(&h);
            check(back == want && contracted == want, || format!("{}: {h:?} came back as {back:?}", case.entry.name))?;
            trips += 1;
        }
    }
    Ok(format!("{trips} cycles survive lift and extraction, both extractors agree"))
}

fn reverse_suite() -> Outcome {
    let f = fixtures();
    let c4 = f.iter().find(|e| e.name == "c4").unwrap();
    let built = build_shipped(&c4.instance, 0).map_err(|e| e.to_string())?;
    let c = &built.chimera;
    let m = c.materialize();
    let (found, _) = enumerate_hamiltonian_cycles(&m.graph, 20, SearchBudget::new(20_000_000, Duration::from_secs(120)));
    check(!found.is_empty(), || "oracle found no cycle in C(C4)".into())?;
    for idx in &found {
        let nodes: Vec<ChimeraNode> = idx.iter().map(|&i| m.node(i)).collect();
        let cls = classify_tentacles(c, &nodes).map_err(|e| e.to_string())?;
        check(cls.values().all(|d| *d == Designation::Cross), || "C4 has no spare edges to loop into".into())?;
        let h = extract_cycle(&c4.instance.graph, c, &nodes).map_err(|e| e.to_string())?;
        check(verify_hamiltonian_cycle(&c4.instance.graph, &h), || "extracted cycle does not verify".into())?;
    }
    let bridge = f.iter().find(|e| e.name == "bridge").unwrap();
    let on_b = find_hamiltonian_cycle(&bridge.instance.graph, SearchBudget::default());
    check(matches!(on_b, SearchOutcome::NotFound), || "bridge fixture not certified non-Hamiltonian".into())?;
    let built = build_shipped(&bridge.instance, 0).map_err(|e| e.to_string())?;
    let g = built.chimera.materialize().graph;
    let on_c = find_hamiltonian_cycle(&g, SearchBudget::new(u64::MAX, Duration::from_secs(600)));
    let verdict = match on_c {
        SearchOutcome::Found(_) => return Err("solver returned a cycle on C(bridge)".into()),
        SearchOutcome::NotFound => "none",
        SearchOutcome::Timeout => "timeout",
    };
    Ok(format!("{} oracle cycles of C(C4) extract; bridge: B none, C(B) {verdict}", found.len()))
}

fn size_suite(cases: &[Case]) -> Outcome {
    let mut worst = 0.0f64;
    for case in cases {
        let n = case.built.representation.side();
        let bb = case.built.chimera.cell_bounding_box().ok_or("empty composition")?;
        let bound = 3 * n - 1;
        check(bb.width() <= bound && bb.height() <= bound, || {
            format!("{}: {}x{} cells exceeds {bound}", case.entry.name, bb.width(), bb.height())
        })?;
        worst = worst.max(bb.width().max(bb.height()) as f64 / bound as f64);
    }
    Ok(format!("all {} instances within (3n-1)^2 cells, tightest ratio {worst:.2}", cases.len()))
}

fn structure_suite(cases: &[Case]) -> Outcome {
    for case in cases {
        let name = &case.entry.name;
        let c = &case.built.chimera;
        for (e, br) in &c.bridges {
            check(br.even.len() == 2 && br.odd.len() == 1, || format!("{name}: tentacle {e:?} bridges"))?;
        }
        check(c.bridges.len() == case.entry.instance.graph.edge_count(), || format!("{name}: tentacle count"))?;
        c.check_induced().map_err(|e| format!("{name}: {e}"))?;
        let m = c.materialize();
        let owned: BTreeSet<ChimeraNode> = c.ownership.keys().copied().collect();
        check(owned == m.nodes.iter().copied().collect(), || format!("{name}: ownership is not a partition"))?;
        let gadgets = c.ownership.values().filter(|e| matches!(e, Element::Vertex(_))).count();
        check(gadgets == c.gadgets.len() * c.gadget.nodes().len(), || format!("{name}: gadget node count"))?;
        check(m.graph.two_coloring().is_some(), || format!("{name}: C(B) not bipartite"))?;
        let aug = c.pegasus_augment();
        aug.check_induced().map_err(|e| format!("{name} augmented: {e}"))?;
        let am = aug.materialize();
        let pairs = am.graph.edge_count() - m.graph.edge_count();
        check(pairs == 0 || am.graph.two_coloring().is_none(), || format!("{name}: C+(B) still bipartite"))?;
    }
    Ok(format!("bridges, partition, induced subgraph and bipartiteness hold on {} instances", cases.len()))
}

fn pegasus_suite() -> Outcome {
    check(pegasus_contains_augmented_cell(&PegasusNiceModel::standard(3)), || "no augmented cell found".into())?;
    Ok("size-3 nice Pegasus model contains an augmented Chimera cell".into())
}

fn main() {
    let cases = built_corpus();
    let with_cases = |f: fn(&[Case]) -> Outcome| -> Outcome {
        match &cases {
            Ok(c) => f(c),
            Err(e) => Err(format!("corpus failed to build: {e}")),
        }
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("1 gadget property suite", gadget_suite()),
        ("2 tentacle lemma suite", with_cases(tentacle_suite)),
        ("3 lift soundness", with_cases(lift_suite)),
        ("4 round trip", with_cases(round_trip_suite)),
        ("5 independent reverse direction", reverse_suite()),
        ("6 size bound", with_cases(size_suite)),
        ("7 structural invariants", with_cases(structure_suite)),
        ("8 pegasus containment", pegasus_suite()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
