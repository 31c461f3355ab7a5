//! Runs the complementary pivoting engine on a 3x3 marriage market and
//! prints each pivot. On a bipartite market the dominating vertex is an
//! ordinary stable matching.

use nearstable::fixtures::marriage;
use nearstable::rational::format_slice;
use nearstable::scarf::{verify_dominating, ScarfSolver};
use nearstable::shm::{build_shm_scarf, verify_shm};

fn main() -> nearstable::Result<()> {
    // men and women list partners best-first
    let men = vec![vec![0, 1, 2], vec![1, 0, 2], vec![0, 2, 1]];
    let women = vec![vec![1, 0, 2], vec![0, 1, 2], vec![2, 1, 0]];
    let inst = marriage(&men, &women);

    let scarf = build_shm_scarf(&inst)?;
    let point = ScarfSolver::default().solve_traced(&scarf.problem, &mut |ev| println!("{ev}"))?;
    let report = verify_dominating(&scarf.problem, &point.x);
    assert!(report.passes());

    let x = scarf.edge_vector(&point.x);
    println!("x = {}", format_slice(&x));
    let matching: Vec<bool> = x
        .iter()
        .map(|v| *v == nearstable::rational::one())
        .collect();
    let pairs: Vec<&str> = inst
        .edges
        .iter()
        .zip(&matching)
        .filter(|(_, m)| **m)
        .map(|(e, _)| e.id.as_str())
        .collect();
    println!("stable pairs: {pairs:?}");
    assert!(verify_shm(&inst, &inst.capacity, &matching).passes());
    Ok(())
}
