//! The three-agent triangle has no stable matching at its original
//! capacities. The solver finds one after raising a single capacity by one.

use nearstable::fixtures::triangle;
use nearstable::rational::format_slice;
use nearstable::shm::solve_shm;

fn main() -> nearstable::Result<()> {
    let inst = triangle();
    let sol = solve_shm(&inst)?;

    println!("dominating point: {}", format_slice(&sol.fractional));
    println!("pivots: {}", sol.pivots);
    println!("matching: {:?}", sol.matched_ids(&inst));
    for entry in sol.revision.changed() {
        println!("{}: {} -> {}", entry.key, entry.original, entry.revised);
    }
    println!(
        "max deviation {} (limit {}), total change {}",
        sol.bounds.max_deviation,
        sol.bounds.ell - 1,
        sol.bounds.sum_deviation
    );
    assert!(sol.passes());
    Ok(())
}
