//! Exact vertex finding on a small polytope, with and without an objective.

use nearstable::polytope::{extreme_point, is_vertex, LinearSystem, Relation};
use nearstable::rational::{format_slice, int, ratio};

fn main() {
    // 0 <= x, y, z <= 1 and x + y + z = 3/2
    let mut sys = LinearSystem::unit_box(3);
    sys.add(vec![int(1), int(1), int(1)], Relation::Eq, ratio(3, 2));

    let warm = vec![ratio(1, 2); 3];
    assert!(!is_vertex(&sys, &warm));

    let best = extreme_point(&sys, Some(&[int(3), int(2), int(1)]), &warm).unwrap();
    println!("maximizing 3x + 2y + z: {}", format_slice(&best));

    let pure = extreme_point(&sys, None, &warm).unwrap();
    println!("purified from the centre: {}", format_slice(&pure));
    assert!(is_vertex(&sys, &pure));

    // pin y and look again
    sys.fix(1, int(0));
    let pinned = extreme_point(&sys, None, &[ratio(3, 4), int(0), ratio(3, 4)]).unwrap();
    println!("with y = 0: {}", format_slice(&pinned));
}
