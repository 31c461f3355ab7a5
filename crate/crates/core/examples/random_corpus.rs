//! Seeded instance generation. The same seed always yields the same
//! instance, which is what makes a corpus reproducible.

use nearstable::io::{instance_to_json, to_canonical_string};
use nearstable::model::Instance;
use nearstable::oracle::{generate, Family, Generated, GeneratorConfig};
use nearstable::shm::solve_shm;

fn main() -> nearstable::Result<()> {
    let mut fractional = 0;
    for seed in 0..40 {
        let mut config = GeneratorConfig::new(Family::Shm, seed);
        config.max_capacity = 1;
        let Generated::Shm(inst) = generate(&config)? else {
            unreachable!()
        };
        let sol = solve_shm(&inst)?;
        assert!(sol.passes());
        if sol.fractional.iter().any(|x| !x.is_integer()) {
            fractional += 1;
        }
    }
    println!("fractional dominating points: {fractional} of 40");

    let config = GeneratorConfig::new(Family::Fixtures, 7);
    let Generated::Shm(inst) = generate(&config)? else {
        unreachable!()
    };
    print!(
        "{}",
        to_canonical_string(&instance_to_json(&Instance::Shm(inst), None))
    );
    Ok(())
}
