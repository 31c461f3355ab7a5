//! Brute-force enumeration of every capacity revision within a bound that
//! admits a stable matching.

use nearstable::fixtures::triangle;
use nearstable::oracle::{enumerate_near_feasible, enumerate_stable};

fn main() -> nearstable::Result<()> {
    let inst = triangle();
    println!(
        "stable at original capacities: {}",
        enumerate_stable(&inst, &inst.capacity)?.len()
    );

    let found = enumerate_near_feasible(&inst, 1, Some(1))?;
    println!("revisions within 1: {}", found.len());
    for (capacity, matching) in found.iter() {
        let edges: Vec<&str> = inst
            .edges
            .iter()
            .zip(matching)
            .filter(|(_, m)| **m)
            .map(|(e, _)| e.id.as_str())
            .collect();
        println!("  {capacity:?} via {edges:?}");
    }
    Ok(())
}
