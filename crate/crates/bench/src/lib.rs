//! Shared setup for the benchmarks.

use chimera_core::corpus::corpus;
use chimera_core::oracle::{find_hamiltonian_cycle, SearchBudget};
use chimera_core::pipeline::{build_shipped, Built};
use chimera_core::InstanceGraph;

pub struct Case {
    pub name: String,
    pub instance: InstanceGraph,
    pub built: Built,
    /// A Hamiltonian cycle of the instance, if it has one.
    pub cycle: Option<Vec<usize>>,
}

/// The corpus entry with the given name, built with the shipped fixtures.
pub fn case(name: &str) -> Case {
    let entry = corpus().into_iter().find(|e| e.name == name).unwrap_or_else(|| panic!("no corpus entry {name}"));
    let built = build_shipped(&entry.instance, 0).expect("corpus entries build");
    let cycle = find_hamiltonian_cycle(&entry.instance.graph, SearchBudget::default()).found();
    Case { name: entry.name, instance: entry.instance, built, cycle }
}

/// The largest Hamiltonian corpus entry by vertex count.
pub fn largest_hamiltonian() -> Case {
    let name = corpus()
        .into_iter()
        .filter(|e| find_hamiltonian_cycle(&e.instance.graph, SearchBudget::default()).is_found())
        .max_by_key(|e| e.instance.vertex_count())
        .map(|e| e.name)
        .expect("corpus has a Hamiltonian entry");
    case(&name)
}
