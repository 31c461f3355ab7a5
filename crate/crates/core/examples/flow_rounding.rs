//! Rounds fractional stable flows in both modes and reports how far each
//! commodity's value moved.

use nearstable::fixtures::fractional_cycle;
use nearstable::model::{FlowInstance, MultiFlow};
use nearstable::oracle::{generate, Family, Generated, GeneratorConfig};
use nearstable::rational::{format, format_slice};
use nearstable::smf::{round_stable_flow, RoundingMode};
use num_traits::Zero;

fn show(inst: &FlowInstance, f: &MultiFlow) -> nearstable::Result<()> {
    for j in 0..inst.commodities.len() {
        println!(
            "input {}: {}",
            inst.commodities[j].id,
            format_slice(f.commodity(j))
        );
    }
    for mode in [RoundingMode::Default, RoundingMode::Balanced] {
        let sol = round_stable_flow(inst, f, mode)?;
        println!("{mode:?} mode, {} augmentations", sol.steps.len());
        for j in 0..inst.commodities.len() {
            println!(
                "  {}: {}",
                inst.commodities[j].id,
                format_slice(sol.rounded.commodity(j))
            );
        }
        for d in &sol.drift {
            println!("  drift of {}: {}", d.commodity, format(&d.drift()));
        }
        println!("  aggregate drift: {}", format(&sol.bounds.aggregate_drift));
        for entry in sol.revision.changed() {
            println!("  {}: {} -> {}", entry.key, entry.original, entry.revised);
        }
        assert!(sol.passes());
    }
    Ok(())
}

fn main() -> nearstable::Result<()> {
    let (inst, f) = fractional_cycle();
    show(&inst, &f)?;

    // a generated two-commodity flow where default rounding shifts value
    for seed in 0.. {
        let mut config = GeneratorConfig::new(Family::Smf, seed);
        config.commodities = 2;
        let Generated::Smf(inst, f) = generate(&config)? else {
            unreachable!()
        };
        let sol = round_stable_flow(&inst, &f, RoundingMode::Default)?;
        if !sol.bounds.aggregate_drift.is_zero() {
            println!("\nseed {seed}");
            show(&inst, &f)?;
            break;
        }
    }
    Ok(())
}
