//! College admissions where faculties share a common quota across their
//! colleges.

use nearstable::cacq::solve_cacq;
use nearstable::fixtures::hungarian_style;
use nearstable::rational::format_slice;

fn main() -> nearstable::Result<()> {
    let sol = solve_cacq(&hungarian_style())?;
    let inst = &sol.instance;

    println!("fractional point: {}", format_slice(&sol.fractional));
    for (e, edge) in inst.edges.iter().enumerate() {
        if sol.matching[e] {
            println!(
                "{} -> {}",
                inst.students[edge.student], inst.colleges[edge.college].id
            );
        }
    }
    for set in &sol.sets {
        println!(
            "{:<12} quota {} -> {}{}",
            set.set,
            set.quota,
            set.revised,
            if set.tight_at_fractional {
                " (tight)"
            } else {
                ""
            }
        );
    }
    println!(
        "max deviation {} with {} sets per college",
        sol.bounds.max_deviation, sol.bounds.ell
    );
    assert!(sol.passes());
    Ok(())
}
