//! Acceptance suites 1-7. Runs without the libtest harness and prints one
//! pass/fail line per criterion; exits nonzero if any fails.

mod common;

use common::*;
use nearstable::cacq::{solve_cacq, CacqSolution};
use nearstable::certificate::{cacq_certificate, sha256_hex, shm_certificate, smf_certificate};
use nearstable::fixtures::{marriage, triangle};
use nearstable::io::{instance_to_json, to_canonical_string};
use nearstable::model::{HypergraphInstance, Instance};
use nearstable::oracle::rng::{index, seeded};
use nearstable::oracle::{
    enumerate_near_feasible, enumerate_stable, generate, Family, Generated, GeneratorConfig,
};
use nearstable::rational::{int, Rational};
use nearstable::scarf::{certify_extreme, verify_dominating, ScarfSolver};
use nearstable::shm::{add_saturation_gadget, build_shm_scarf, solve_shm};
use nearstable::smf::{round_stable_flow, RoundingMode};
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use std::time::{Duration, Instant};

/// Exact comparisons throughout; the only tolerances are the time budgets.
struct Outcome {
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            note: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

/// Running digest of every certificate a suite emits.
struct Certs(Sha256);

impl Certs {
    fn new() -> Self {
        Certs(Sha256::new())
    }

    fn add(&mut self, text: &str) {
        self.0.update(text.as_bytes());
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn instance_digest(inst: &Instance, flow: Option<&nearstable::model::MultiFlow>) -> String {
    sha256_hex(to_canonical_string(&instance_to_json(inst, flow)).as_bytes())
}

fn shm_instance(
    family: Family,
    seed: u64,
    vertices: usize,
    edges: usize,
    ell: usize,
) -> HypergraphInstance {
    let mut c = GeneratorConfig::new(family, seed);
    c.vertices = vertices;
    c.edges = edges;
    c.ell = ell;
    c.tie_rate = 300;
    match generate(&c).expect("shm generation cannot fail") {
        Generated::Shm(i) => i,
        _ => unreachable!(),
    }
}

/// Solves, checks the bounds and stability, and returns `(q', M)`.
fn shm_case(
    out: &mut Outcome,
    certs: &mut Certs,
    label: &str,
    inst: &HypergraphInstance,
) -> Option<(Vec<u64>, Vec<bool>, bool)> {
    let ell = inst.max_edge_size() as i64;
    let sol = match solve_shm(inst) {
        Ok(s) => s,
        Err(e) => {
            out.check(false, || format!("{label}: {e}"));
            return None;
        }
    };
    let q2 = sol.revision.revised();
    let max_dev = inst
        .capacity
        .iter()
        .zip(&q2)
        .map(|(&a, &b)| (a as i64 - b as i64).abs())
        .max()
        .unwrap_or(0);
    let sum_dev: i64 = q2.iter().sum::<u64>() as i64 - inst.capacity.iter().sum::<u64>() as i64;
    out.check(max_dev <= ell - 1, || {
        format!("{label}: max deviation {max_dev} > {}", ell - 1)
    });
    out.check((0..=ell - 1).contains(&sum_dev), || {
        format!("{label}: sum deviation {sum_dev} outside [0, {}]", ell - 1)
    });
    out.check(sol.verdict.blocking_edges.is_empty(), || {
        format!(
            "{label}: verifier reports blocking edges {:?}",
            sol.verdict.blocking_edges
        )
    });
    out.check(shm_stable(inst, &q2, &sol.matching), || {
        format!("{label}: independent check finds the matching unstable under q'")
    });
    let digest = instance_digest(&Instance::Shm(inst.clone()), None);
    certs.add(&to_canonical_string(
        &shm_certificate(inst, digest, &sol, true).to_json(),
    ));
    let fractional = sol.fractional.iter().any(|x| !x.is_integer());
    Some((q2, sol.matching, fractional))
}

type Tiny = Vec<(String, HypergraphInstance, Vec<u64>, Vec<bool>)>;

fn suite_shm(tiny: &mut Tiny) -> (Outcome, String) {
    let mut out = Outcome::new();
    let mut certs = Certs::new();
    let mut solved = [0usize; 2];
    let mut fractional = 0;
    for (slot, ell) in [2usize, 3].into_iter().enumerate() {
        for i in 0..100u64 {
            let seed = 1_000 * ell as u64 + i;
            let inst = shm_instance(Family::Shm, seed, 8, 15, ell);
            let label = format!("shm seed {seed}");
            if let Some((q2, m, frac)) = shm_case(&mut out, &mut certs, &label, &inst) {
                solved[slot] += 1;
                fractional += frac as usize;
                if inst.edges.len() <= 12 {
                    tiny.push((label, inst, q2, m));
                }
            }
        }
    }
    out.note = format!(
        "{} instances with l=2, {} with l=3, {fractional} with fractional x*",
        solved[0], solved[1]
    );
    (out, certs.finish())
}

fn suite_fixtures(tiny: &mut Tiny) -> (Outcome, String) {
    let mut out = Outcome::new();
    let mut certs = Certs::new();
    let mut worst = (0u64, 0i64);
    let mut fractional = 0;
    for seed in 0..200u64 {
        let inst = shm_instance(Family::Fixtures, seed, 10, 15, 2);
        let label = format!("fixtures seed {seed}");
        if let Some((q2, m, frac)) = shm_case(&mut out, &mut certs, &label, &inst) {
            fractional += frac as usize;
            let max = inst
                .capacity
                .iter()
                .zip(&q2)
                .map(|(&a, &b)| a.abs_diff(b))
                .max()
                .unwrap_or(0);
            let sum = q2.iter().sum::<u64>() as i64 - inst.total_capacity() as i64;
            worst = (worst.0.max(max), worst.1.max(sum));
            if inst.edges.len() <= 12 {
                tiny.push((label, inst, q2, m));
            }
        }
    }
    let tri = triangle();
    out.check(
        enumerate_stable(&tri, &tri.capacity)
            .map(|v| v.is_empty())
            .unwrap_or(false),
        || "triangle: a stable matching exists at q".into(),
    );
    if let Some((q2, m, _)) = shm_case(&mut out, &mut certs, "triangle", &tri) {
        out.check(q2 != tri.capacity, || {
            "triangle: capacities unchanged".into()
        });
        out.check(m.iter().filter(|&&b| b).count() == 2, || {
            "triangle: expected two matched edges".into()
        });
    }
    out.note = format!(
        "200 graphs, {fractional} with fractional x*, worst max deviation {}, worst sum deviation {}; triangle checked",
        worst.0, worst.1
    );
    (out, certs.finish())
}

fn suite_scarf() -> Outcome {
    let mut out = Outcome::new();
    let solver = ScarfSolver::default();
    let mut markets: Vec<(Vec<Vec<usize>>, Vec<Vec<usize>>)> = Vec::new();
    let p2 = permutations(2);
    for a in &p2 {
        for b in &p2 {
            for c in &p2 {
                for d in &p2 {
                    markets.push((vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]));
                }
            }
        }
    }
    let p3 = permutations(3);
    let mut rng = seeded(3_3);
    for _ in 0..150 {
        let mut pick = || p3[index(&mut rng, p3.len())].clone();
        markets.push((vec![pick(), pick(), pick()], vec![pick(), pick(), pick()]));
    }
    let all: [Vec<Vec<bool>>; 2] = [all_marriages(2), all_marriages(3)];
    for (men, women) in &markets {
        let n = men.len();
        let label = format!("market {men:?} / {women:?}");
        let inst = marriage(men, women);
        let scarf = build_shm_scarf(&inst).expect("strict market");
        let point = match solver.solve(&scarf.problem) {
            Ok(p) => p,
            Err(e) => {
                out.check(false, || format!("{label}: {e}"));
                continue;
            }
        };
        out.check(verify_dominating(&scarf.problem, &point.x).passes(), || {
            format!("{label}: not dominating")
        });
        out.check(certify_extreme(&scarf.problem, &point.x), || {
            format!("{label}: not extreme")
        });
        let x = scarf.edge_vector(&point.x);
        let integral = x.iter().all(|v| v.is_zero() || v.is_one());
        out.check(integral, || format!("{label}: fractional output {x:?}"));
        let m: Vec<bool> = x.iter().map(One::is_one).collect();
        let stable: Vec<&Vec<bool>> = all[n - 2]
            .iter()
            .filter(|c| shm_stable(&inst, &inst.capacity, c))
            .collect();
        out.check(stable.contains(&&m), || {
            format!("{label}: output not among stable matchings")
        });
        let wife = deferred_acceptance(men, women);
        let da: Vec<bool> = (0..n * n).map(|e| wife[e / n] == e % n).collect();
        out.check(stable.contains(&&da), || {
            format!("{label}: enumeration misses the DA matching")
        });
    }
    // the same certificates on gadgeted hypergraph problems
    for seed in 0..40u64 {
        let inst = shm_instance(Family::Shm, 5_000 + seed, 8, 15, 3).break_ties();
        let g = add_saturation_gadget(&inst);
        let scarf = build_shm_scarf(&g.instance).expect("strict after tie-breaking");
        match solver.solve(&scarf.problem) {
            Ok(p) => {
                out.check(verify_dominating(&scarf.problem, &p.x).passes(), || {
                    format!("gadgeted seed {seed}: not dominating")
                });
                out.check(certify_extreme(&scarf.problem, &p.x), || {
                    format!("gadgeted seed {seed}: not extreme")
                });
            }
            Err(e) => out.check(false, || format!("gadgeted seed {seed}: {e}")),
        }
    }
    out.note = format!("{} markets, 40 gadgeted hypergraphs", markets.len());
    out
}

fn cacq_instance(seed: u64, ell: usize) -> nearstable::model::CacqInstance {
    let mut c = GeneratorConfig::new(Family::Cacq, seed);
    c.vertices = 6;
    c.colleges = 4;
    c.sets = 3;
    c.ell = ell;
    c.tie_rate = 300;
    match generate(&c).expect("cacq generation cannot fail") {
        Generated::Cacq(i) => i,
        _ => unreachable!(),
    }
}

fn suite_cacq() -> (Outcome, String) {
    let mut out = Outcome::new();
    let mut certs = Certs::new();
    let mut worst = [0u64; 3];
    let mut count = [0usize; 3];
    let mut fractional = 0;
    for (base, ell) in [(0u64, 1usize), (100, 2)] {
        for seed in base..base + 100 {
            let inst = cacq_instance(seed, ell);
            let label = format!("cacq seed {seed}");
            let sol: CacqSolution = match solve_cacq(&inst) {
                Ok(s) => s,
                Err(e) => {
                    out.check(false, || format!("{label}: {e}"));
                    continue;
                }
            };
            fractional += sol.fractional.iter().any(|x| !x.is_integer()) as usize;
            let norm = &sol.instance;
            let l = norm.ell();
            let q2 = sol.revision.revised();
            let dev = norm
                .sets
                .iter()
                .zip(&q2)
                .map(|(s, &r)| s.quota.abs_diff(r))
                .max()
                .unwrap_or(0);
            worst[l] = worst[l].max(dev);
            count[l] += 1;
            out.check(dev < 2 * l as u64, || {
                format!("{label}: revision {dev} with l={l}")
            });
            out.check(cacq_feasible(norm, &q2, &sol.matching), || {
                format!("{label}: infeasible under q'")
            });
            let blocking = cacq_blocking(norm, &q2, &sol.matching);
            out.check(
                blocking.is_empty() && sol.verdict.blocking_edges.is_empty(),
                || format!("{label}: blocking edges {blocking:?}"),
            );
            for s in 0..norm.students.len() {
                let at = |x: &[Rational]| -> Rational {
                    norm.edges
                        .iter()
                        .zip(x)
                        .filter(|(e, _)| e.student == s)
                        .map(|(_, v)| v.clone())
                        .sum()
                };
                let matched: Vec<Rational> = sol
                    .matching
                    .iter()
                    .map(|&b| if b { int(1) } else { int(0) })
                    .collect();
                if at(&sol.fractional).is_one() {
                    out.check(at(&matched).is_one(), || {
                        format!("{label}: pinned student {} unmatched", norm.students[s])
                    });
                }
            }
            let digest = instance_digest(&Instance::Cacq(inst.clone()), None);
            certs.add(&to_canonical_string(
                &cacq_certificate(digest, &sol, true).to_json(),
            ));
        }
    }
    out.check(worst[2] <= 3, || {
        format!("max revision {} with l=2", worst[2])
    });
    out.note = format!(
        "{} instances with l=1 (max revision {}), {} with l=2 (max revision {}), {fractional} with fractional x*",
        count[1], worst[1], count[2], worst[2]
    );
    (out, certs.finish())
}

fn suite_smf() -> (Outcome, String) {
    let mut out = Outcome::new();
    let mut certs = Certs::new();
    let mut count = [0usize; 3];
    let mut drifted = 0;
    for (base, k) in [(0u64, 1usize), (50, 2)] {
        for seed in base..base + 50 {
            let mut c = GeneratorConfig::new(Family::Smf, seed);
            c.vertices = 8;
            c.edges = 14;
            c.commodities = k;
            let (inst, f) = match generate(&c) {
                Ok(Generated::Smf(i, f)) => (i, f),
                Ok(_) => unreachable!(),
                Err(e) => {
                    out.check(false, || format!("smf seed {seed}: {e}"));
                    continue;
                }
            };
            let label = format!("smf seed {seed}");
            let kk = inst.commodities.len();
            count[kk] += 1;
            let base_caps: Vec<Vec<u64>> = (0..kk)
                .map(|j| inst.arcs.iter().map(|a| a.commodity_capacity[j]).collect())
                .collect();
            let base_agg: Vec<u64> = inst.arcs.iter().map(|a| a.capacity).collect();
            out.check(
                flow_feasible(&inst, &base_agg, &base_caps, &f)
                    && !flow_blocked(&inst, &base_agg, &base_caps, &f),
                || format!("{label}: generated flow is not stable"),
            );
            for mode in [RoundingMode::Default, RoundingMode::Balanced] {
                let sol = match round_stable_flow(&inst, &f, mode) {
                    Ok(s) => s,
                    Err(e) => {
                        out.check(false, || format!("{label} {mode:?}: {e}"));
                        continue;
                    }
                };
                let caps = &sol.capacities;
                let g = &sol.rounded;
                out.check(g.is_integral(), || {
                    format!("{label} {mode:?}: fractional output")
                });
                out.check(caps.commodity == base_caps, || {
                    format!("{label} {mode:?}: commodity capacities changed")
                });
                let dev = base_agg
                    .iter()
                    .zip(&caps.aggregate)
                    .map(|(&a, &b)| a.abs_diff(b))
                    .max()
                    .unwrap_or(0);
                out.check(dev + 1 <= kk as u64, || {
                    format!("{label} {mode:?}: capacity deviation {dev} with k={kk}")
                });
                let drifts: Vec<Rational> = (0..kk)
                    .map(|j| {
                        let d = g.value(&inst, j) - f.value(&inst, j);
                        if d < Rational::zero() {
                            -d
                        } else {
                            d
                        }
                    })
                    .collect();
                let worst = drifts.iter().max().cloned().unwrap_or_default();
                let total = g.total_value(&inst) - f.total_value(&inst);
                let total = if total < Rational::zero() {
                    -total
                } else {
                    total
                };
                drifted += !worst.is_zero() as usize;
                match mode {
                    RoundingMode::Default => out.check(worst < int(1), || {
                        format!("{label} default: commodity drift {worst}")
                    }),
                    RoundingMode::Balanced => {
                        out.check(worst < int(2), || {
                            format!("{label} balanced: commodity drift {worst}")
                        });
                        out.check(total < int(1), || {
                            format!("{label} balanced: aggregate drift {total}")
                        });
                    }
                }
                out.check(
                    flow_feasible(&inst, &caps.aggregate, &caps.commodity, g)
                        && !flow_blocked(&inst, &caps.aggregate, &caps.commodity, g),
                    || format!("{label} {mode:?}: rounded flow unstable under revised capacities"),
                );
                out.check(sol.verdict.passes(), || {
                    format!("{label} {mode:?}: verify_flow rejects the rounded flow")
                });
                let digest = instance_digest(&Instance::Smf(inst.clone()), Some(&f));
                certs.add(&to_canonical_string(
                    &smf_certificate(&inst, &f, digest, &sol, true).to_json(),
                ));
            }
        }
    }
    out.note = format!(
        "{} flows with k=1, {} with k=2, both modes, {drifted} roundings with nonzero drift",
        count[1], count[2]
    );
    (out, certs.finish())
}

fn suite_oracle(tiny: &Tiny) -> Outcome {
    let mut out = Outcome::new();
    for (label, inst, q2, m) in tiny {
        let b = inst.max_edge_size() as u64 - 1;
        match enumerate_near_feasible(inst, b, Some(b)) {
            Ok(nf) => out.check(nf.contains(q2), || format!("{label}: q' {q2:?} not listed")),
            Err(e) => out.check(false, || format!("{label}: {e}")),
        }
        match enumerate_stable(inst, q2) {
            Ok(all) => out.check(all.contains(m), || {
                format!("{label}: M not stable under q'")
            }),
            Err(e) => out.check(false, || format!("{label}: {e}")),
        }
    }
    out.note = format!("{} instances with at most 12 edges", tiny.len());
    out
}

fn suite_determinism(first: &[(&str, String)]) -> Outcome {
    let mut out = Outcome::new();
    let mut scratch = Vec::new();
    for (name, digest) in first {
        let again = match *name {
            "shm" => suite_shm(&mut scratch).1,
            "fixtures" => suite_fixtures(&mut scratch).1,
            "cacq" => suite_cacq().1,
            "smf" => suite_smf().1,
            _ => unreachable!(),
        };
        out.check(&again == digest, || {
            format!("{name}: certificates differ on rerun")
        });
    }
    for family in [Family::Shm, Family::Fixtures, Family::Cacq, Family::Smf] {
        let c = GeneratorConfig::new(family, 7);
        let render = |g: Generated| match g {
            Generated::Shm(i) => to_canonical_string(&instance_to_json(&Instance::Shm(i), None)),
            Generated::Cacq(i) => to_canonical_string(&instance_to_json(&Instance::Cacq(i), None)),
            Generated::Smf(i, f) => {
                to_canonical_string(&instance_to_json(&Instance::Smf(i), Some(&f)))
            }
        };
        let a = render(generate(&c).unwrap());
        let b = render(generate(&c).unwrap());
        out.check(a == b, || format!("{family:?}: generator output differs"));
    }
    out.note = "certificate digests of suites 1, 2, 4, 5 and generator output".into();
    out
}

fn report(n: usize, name: &str, out: &Outcome, took: Duration, budget: Duration) -> bool {
    let in_time = took <= budget;
    let ok = out.failures.is_empty() && in_time;
    println!(
        "criterion {n} [{}] {name}: {} ({:.1}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        out.note,
        took.as_secs_f64(),
        budget.as_secs()
    );
    for f in &out.failures {
        println!("    {f}");
    }
    if !in_time {
        println!("    over the time budget");
    }
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn main() {
    let secs = Duration::from_secs;
    let mut tiny = Tiny::new();
    let mut ok = true;

    let ((shm, shm_digest), t) = timed(|| suite_shm(&mut tiny));
    ok &= report(1, "SHM bound suite", &shm, t, secs(60));
    let ((fx, fx_digest), t) = timed(|| suite_fixtures(&mut tiny));
    ok &= report(2, "stable fixtures suite", &fx, t, secs(30));
    let (sc, t) = timed(suite_scarf);
    ok &= report(3, "Scarf engine suite", &sc, t, secs(10));
    let ((cq, cq_digest), t) = timed(suite_cacq);
    ok &= report(4, "CA-CQ bound suite", &cq, t, secs(60));
    let ((sm, sm_digest), t) = timed(suite_smf);
    ok &= report(5, "SMF rounding suite", &sm, t, secs(60));
    let (or, t) = timed(|| suite_oracle(&tiny));
    ok &= report(6, "oracle cross-validation", &or, t, secs(300));
    let digests = [
        ("shm", shm_digest),
        ("fixtures", fx_digest),
        ("cacq", cq_digest),
        ("smf", sm_digest),
    ];
    let (det, t) = timed(|| suite_determinism(&digests));
    ok &= report(7, "determinism", &det, t, secs(300));

    if !ok {
        std::process::exit(1);
    }
}
