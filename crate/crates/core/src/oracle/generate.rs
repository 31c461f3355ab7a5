use super::rng::{between, chance, index, sample, seeded, shuffle, SplitMix64};
use crate::error::{Error, Result};
use crate::model::{
    AdmissionEdge, Arc, CacqInstance, College, CollegeSet, Commodity, FlowInstance, Hyperedge,
    HypergraphInstance, MultiFlow,
};
use crate::order::WeakOrder;
use crate::rational::{ceil, int, ratio, Rational};
use crate::smf::verify_flow;
use num_traits::Zero;
use std::str::FromStr;

pub const SMF_RETRY_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Shm,
    Fixtures,
    Cacq,
    Smf,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "shm" => Ok(Family::Shm),
            "fixtures" => Ok(Family::Fixtures),
            "cacq" => Ok(Family::Cacq),
            "smf" => Ok(Family::Smf),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// Size limits and knobs. Counts are maxima; each instance draws its actual
/// sizes from the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub family: Family,
    pub seed: u64,
    /// Vertices (shm, fixtures, smf) or students (cacq).
    pub vertices: usize,
    /// Edges (shm, fixtures) or arcs (smf).
    pub edges: usize,
    /// Largest edge size (shm) or sets per college, singleton included
    /// (cacq; 3 and above lets groups overlap).
    pub ell: usize,
    pub colleges: usize,
    /// Non-singleton college sets (cacq).
    pub sets: usize,
    /// Commodities (smf); exact, not a maximum.
    pub commodities: usize,
    pub max_capacity: u64,
    /// Chance in thousandths that an alternative ties with the one before it.
    pub tie_rate: u32,
    /// Chance in thousandths that a student finds a college acceptable.
    pub density: u32,
}

impl GeneratorConfig {
    pub fn new(family: Family, seed: u64) -> Self {
        let base = GeneratorConfig {
            family,
            seed,
            vertices: 6,
            edges: 10,
            ell: 2,
            colleges: 4,
            sets: 2,
            commodities: 2,
            max_capacity: 2,
            tie_rate: 0,
            density: 600,
        };
        match family {
            Family::Shm => GeneratorConfig { ell: 3, ..base },
            Family::Fixtures => base,
            Family::Cacq => GeneratorConfig {
                vertices: 5,
                ..base
            },
            Family::Smf => GeneratorConfig {
                vertices: 8,
                edges: 14,
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generated {
    Shm(HypergraphInstance),
    Cacq(CacqInstance),
    Smf(FlowInstance, MultiFlow),
}

pub fn generate(config: &GeneratorConfig) -> Result<Generated> {
    let mut rng = seeded(config.seed);
    Ok(match config.family {
        Family::Shm => Generated::Shm(hypergraph(&mut rng, config, config.ell.max(1))),
        Family::Fixtures => Generated::Shm(hypergraph(&mut rng, config, 2)),
        Family::Cacq => Generated::Cacq(cacq(&mut rng, config)),
        Family::Smf => {
            let (inst, flow) = smf(&mut rng, config)?;
            Generated::Smf(inst, flow)
        }
    })
}

/// Shuffles `items` and groups neighbours into ties at `tie_rate`.
fn random_order(rng: &mut SplitMix64, mut items: Vec<usize>, tie_rate: u32) -> WeakOrder {
    shuffle(rng, &mut items);
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in items {
        match groups.last_mut() {
            Some(g) if chance(rng, tie_rate) => g.push(a),
            _ => groups.push(vec![a]),
        }
    }
    WeakOrder::new(groups)
}

/// `|V|` in `ell..=max`, `|E|` in `1..=max`; edge sizes in `2..=ell` (1 when
/// `ell = 1`), the first edge having size exactly `ell`.
fn hypergraph(rng: &mut SplitMix64, c: &GeneratorConfig, ell: usize) -> HypergraphInstance {
    let n = between(rng, ell.max(2) as u64, c.vertices.max(ell).max(2) as u64) as usize;
    let m = between(rng, 1, c.edges.max(1) as u64) as usize;
    let mut edges = Vec::with_capacity(m);
    for e in 0..m {
        let size = if e == 0 || ell == 1 {
            ell
        } else {
            between(rng, 2, ell as u64) as usize
        };
        let mut members = sample(rng, n, size);
        members.sort();
        edges.push(Hyperedge {
            id: format!("e{}", e + 1),
            members,
        });
    }
    let capacity = (0..n)
        .map(|_| between(rng, 1, c.max_capacity.max(1)))
        .collect();
    let mut inst = HypergraphInstance {
        vertices: (1..=n).map(|v| format!("v{v}")).collect(),
        edges,
        capacity,
        preferences: Vec::new(),
    };
    let incidence = inst.incidence();
    inst.preferences = incidence
        .into_iter()
        .map(|es| random_order(rng, es, c.tie_rate))
        .collect();
    inst
}

/// Students `2..=max`, colleges `1..=max`. With `ell = 2`, between one and
/// `sets` disjoint groups of two or three colleges get a common quota; each
/// group owns a master order and its colleges rank students by restricting
/// it. With `ell ≥ 3` see [`cacq_overlapping`].
fn cacq(rng: &mut SplitMix64, c: &GeneratorConfig) -> CacqInstance {
    let ns = between(rng, 2, c.vertices.max(2) as u64) as usize;
    let fewest = if c.ell >= 2 { 2 } else { 1 };
    let nc = between(rng, fewest, c.colleges.max(fewest as usize) as u64) as usize;
    if c.ell >= 3 {
        return cacq_overlapping(rng, c, ns, nc);
    }
    let students: Vec<String> = (1..=ns).map(|s| format!("s{s}")).collect();
    let mut edges = Vec::new();
    for s in 0..ns {
        let mut any = false;
        for col in 0..nc {
            if chance(rng, c.density) {
                edges.push((s, col));
                any = true;
            }
        }
        if !any {
            edges.push((s, index(rng, nc)));
        }
    }
    edges.sort();
    let edges: Vec<AdmissionEdge> = edges
        .into_iter()
        .map(|(s, col)| AdmissionEdge {
            id: format!("s{}c{}", s + 1, col + 1),
            student: s,
            college: col,
        })
        .collect();
    let neighbors = |col: usize| -> Vec<usize> {
        edges
            .iter()
            .filter(|e| e.college == col)
            .map(|e| e.student)
            .collect()
    };

    let mut groups: Vec<Vec<usize>> = Vec::new();
    if c.ell == 2 && nc >= 2 {
        let mut order: Vec<usize> = (0..nc).collect();
        shuffle(rng, &mut order);
        let wanted = between(rng, 1, c.sets.max(1) as u64) as usize;
        let mut rest = &order[..];
        while groups.len() < wanted && rest.len() >= 2 {
            let size = between(rng, 2, rest.len().min(3) as u64) as usize;
            let mut g = rest[..size].to_vec();
            g.sort();
            groups.push(g);
            rest = &rest[size..];
        }
    }

    let mut colleges: Vec<College> = (0..nc)
        .map(|col| College {
            id: format!("c{}", col + 1),
            quota: between(rng, 1, c.max_capacity.max(1)),
            preferences: WeakOrder::default(),
        })
        .collect();
    let mut sets = Vec::new();
    let mut grouped = vec![false; nc];
    for (gi, g) in groups.iter().enumerate() {
        let master = random_order(rng, (0..ns).collect(), c.tie_rate);
        let mut union: Vec<usize> = g.iter().flat_map(|&col| neighbors(col)).collect();
        union.sort();
        union.dedup();
        for &col in g {
            let nb = neighbors(col);
            colleges[col].preferences = master.restrict(|s| nb.contains(&s));
            grouped[col] = true;
        }
        let total: u64 = g.iter().map(|&col| colleges[col].quota).sum();
        sets.push(CollegeSet {
            id: format!("group{}", gi + 1),
            colleges: g.clone(),
            quota: between(rng, 1, total.max(1)),
            master: master.restrict(|s| union.contains(&s)),
        });
    }
    for col in 0..nc {
        if !grouped[col] {
            colleges[col].preferences = random_order(rng, neighbors(col), c.tie_rate);
        }
    }
    let mut student_preferences = Vec::with_capacity(ns);
    for s in 0..ns {
        let own: Vec<usize> = (0..edges.len())
            .filter(|&e| edges[e].student == s)
            .collect();
        student_preferences.push(random_order(rng, own, c.tie_rate));
    }
    CacqInstance {
        students,
        colleges,
        edges,
        sets,
        student_preferences,
    }
    .normalize()
}

/// Groups may overlap, each college lying in at most `ell - 1` of them, and
/// every group draws its own master order. A college only accepts students
/// on whom all of its groups' masters agree, and ranks them that way.
fn cacq_overlapping(
    rng: &mut SplitMix64,
    c: &GeneratorConfig,
    ns: usize,
    nc: usize,
) -> CacqInstance {
    let wanted = between(rng, 1, c.sets.max(1) as u64) as usize;
    let mut member = vec![0usize; nc];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for _ in 0..wanted {
        let open: Vec<usize> = (0..nc).filter(|&col| member[col] + 1 < c.ell).collect();
        if open.len() < 2 {
            break;
        }
        let size = between(rng, 2, open.len().min(3) as u64) as usize;
        let mut g: Vec<usize> = sample(rng, open.len(), size)
            .into_iter()
            .map(|i| open[i])
            .collect();
        g.sort();
        if groups.contains(&g) {
            continue;
        }
        for &col in &g {
            member[col] += 1;
        }
        groups.push(g);
    }
    let masters: Vec<WeakOrder> = groups
        .iter()
        .map(|_| random_order(rng, (0..ns).collect(), c.tie_rate))
        .collect();
    let mut pairs = Vec::new();
    let mut colleges = Vec::with_capacity(nc);
    for col in 0..nc {
        let mine: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].contains(&col))
            .collect();
        let mut chosen: Vec<usize> = Vec::new();
        for s in sample(rng, ns, ns) {
            if !chance(rng, c.density) {
                continue;
            }
            let agrees = chosen.iter().all(|&t| {
                let views: Vec<_> = mine.iter().map(|&g| masters[g].compare(s, t)).collect();
                views.windows(2).all(|w| w[0] == w[1])
            });
            if agrees {
                chosen.push(s);
            }
        }
        chosen.sort();
        let preferences = match mine.first() {
            Some(&g) => masters[g].restrict(|s| chosen.contains(&s)),
            None => random_order(rng, chosen.clone(), c.tie_rate),
        };
        pairs.extend(chosen.iter().map(|&s| (s, col)));
        colleges.push(College {
            id: format!("c{}", col + 1),
            quota: between(rng, 1, c.max_capacity.max(1)),
            preferences,
        });
    }
    pairs.sort();
    let edges: Vec<AdmissionEdge> = pairs
        .into_iter()
        .map(|(s, col)| AdmissionEdge {
            id: format!("s{}c{}", s + 1, col + 1),
            student: s,
            college: col,
        })
        .collect();
    let sets = groups
        .iter()
        .zip(&masters)
        .enumerate()
        .map(|(gi, (g, master))| {
            let total: u64 = g.iter().map(|&col| colleges[col].quota).sum();
            let reached: Vec<usize> = edges
                .iter()
                .filter(|e| g.contains(&e.college))
                .map(|e| e.student)
                .collect();
            CollegeSet {
                id: format!("group{}", gi + 1),
                colleges: g.clone(),
                quota: between(rng, 1, total.max(1)),
                master: master.restrict(|s| reached.contains(&s)),
            }
        })
        .collect();
    let student_preferences = (0..ns)
        .map(|s| {
            let own: Vec<usize> = (0..edges.len())
                .filter(|&e| edges[e].student == s)
                .collect();
            random_order(rng, own, c.tie_rate)
        })
        .collect();
    CacqInstance {
        students: (1..=ns).map(|s| format!("s{s}")).collect(),
        colleges,
        edges,
        sets,
        student_preferences,
    }
    .normalize()
}

/// Random superposition of integral paths and fractional paths and cycles
/// (denominators up to 8) on a sparse digraph, with capacities rounded up
/// from the flow. Retries until the flow is fractional and stable.
fn smf(rng: &mut SplitMix64, c: &GeneratorConfig) -> Result<(FlowInstance, MultiFlow)> {
    for _ in 0..SMF_RETRY_CAP {
        if let Some(found) = smf_attempt(rng, c) {
            return Ok(found);
        }
    }
    Err(Error::ResourceLimit(format!(
        "no stable fractional flow after {SMF_RETRY_CAP} attempts"
    )))
}

fn smf_attempt(rng: &mut SplitMix64, c: &GeneratorConfig) -> Option<(FlowInstance, MultiFlow)> {
    let n = between(rng, 4, c.vertices.max(4) as u64) as usize;
    let k = c.commodities.max(1);
    let max_arcs = c.edges.max(3);
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut values: Vec<Vec<Rational>> = vec![Vec::new(); k];
    let mut terminals = Vec::with_capacity(k);
    for _ in 0..k {
        let st = sample(rng, n, 2);
        terminals.push((st[0], st[1]));
    }

    let arc_between = |arcs: &mut Vec<(usize, usize)>, u: usize, v: usize| -> Option<usize> {
        if let Some(a) = arcs.iter().position(|&x| x == (u, v)) {
            return Some(a);
        }
        (arcs.len() < max_arcs).then(|| {
            arcs.push((u, v));
            arcs.len() - 1
        })
    };
    // arcs on which a commodity must outrank another: (arc, better, worse)
    let mut outranks: Vec<(usize, usize, usize)> = Vec::new();
    let path = |rng: &mut SplitMix64, from: usize, to: usize| -> Vec<usize> {
        let mut w = vec![from];
        w.extend(
            sample(rng, n, n)
                .into_iter()
                .filter(|&v| v != from && v != to)
                .take(index(rng, 3)),
        );
        w.push(to);
        w
    };
    let pieces = between(rng, 2, 5);
    for _ in 0..pieces {
        let j = index(rng, k);
        let (s, t) = terminals[j];
        let kind = super::rng::below(rng, if k >= 2 { 4 } else { 3 });
        let den = between(rng, 2, 8) as i64;
        let part = ratio(between(rng, 1, den as u64 - 1) as i64, den);
        // (commodity, closed or open walk, amount)
        let mut walks: Vec<(usize, Vec<usize>, Rational)> = Vec::new();
        match kind {
            0 => walks.push((j, path(rng, s, t), int(1))),
            1 => walks.push((j, path(rng, s, t), part)),
            2 => {
                let len = between(rng, 2, 4.min(n as u64)) as usize;
                let mut w = sample(rng, n, len);
                w.push(w[0]);
                walks.push((j, w, part));
            }
            // j takes `part` along a path; a preferred j' fills the rest of
            // those arcs and returns to the start, closing a cycle
            _ => {
                let other = (j + 1 + index(rng, k - 1)) % k;
                let forward = path(rng, s, t);
                let back = path(rng, t, s);
                let mut cycle = forward.clone();
                cycle.extend_from_slice(&back[1..]);
                let rest = int(1) - &part;
                walks.push((j, forward, part));
                walks.push((other, cycle, rest));
            }
        }
        for (w_idx, (commodity, walk, amount)) in walks.iter().enumerate() {
            let mut route = Vec::new();
            for pair in walk.windows(2) {
                route.push(arc_between(&mut arcs, pair[0], pair[1])?);
            }
            for vals in values.iter_mut() {
                vals.resize(arcs.len(), Rational::zero());
            }
            for &a in &route {
                values[*commodity][a] += amount;
            }
            if kind == 3 && w_idx == 0 {
                let other = walks[1].0;
                outranks.extend(route.iter().map(|&a| (a, other, *commodity)));
            }
        }
    }
    for vals in values.iter_mut() {
        vals.resize(arcs.len(), Rational::zero());
    }
    let flow = MultiFlow { values };
    if flow.is_integral() {
        return None;
    }

    let arcs: Vec<Arc> = arcs
        .iter()
        .enumerate()
        .map(|(a, &(tail, head))| {
            let commodity_capacity = (0..k)
                .map(|j| {
                    let base = ceil(&flow.values[j][a]).to_integer();
                    u64::try_from(base).unwrap_or(0) + u64::from(chance(rng, 100))
                })
                .collect();
            let total = ceil(&flow.total_on(a)).to_integer();
            Arc {
                id: format!("a{}", a + 1),
                tail,
                head,
                capacity: u64::try_from(total).unwrap_or(0) + u64::from(chance(rng, 150)),
                commodity_capacity,
                preferences: arc_order(rng, a, k, &outranks),
            }
        })
        .collect();
    let mut inst = FlowInstance {
        vertices: (1..=n).map(|v| format!("v{v}")).collect(),
        arcs,
        commodities: terminals
            .iter()
            .enumerate()
            .map(|(j, &(s, t))| Commodity {
                id: format!("k{}", j + 1),
                source: s,
                sink: t,
            })
            .collect(),
        vertex_preferences: Vec::new(),
    };
    inst.vertex_preferences = (0..n)
        .map(|v| {
            let incident: Vec<usize> = inst.incident_arcs(v).into_iter().collect();
            (0..k)
                .map(|_| random_order(rng, incident.clone(), c.tie_rate))
                .collect()
        })
        .collect();
    if !inst.validate().is_empty() || !verify_flow(&inst, &flow).passes() {
        return None;
    }
    Some((inst, flow))
}

/// Random strict order over commodities, then each required
/// `better ≻ worse` pair on this arc is enforced by moving `better` up.
fn arc_order(
    rng: &mut SplitMix64,
    arc: usize,
    k: usize,
    outranks: &[(usize, usize, usize)],
) -> WeakOrder {
    let mut items: Vec<usize> = (0..k).collect();
    shuffle(rng, &mut items);
    for &(a, better, worse) in outranks {
        if a != arc {
            continue;
        }
        let bi = items.iter().position(|&x| x == better).unwrap();
        let wi = items.iter().position(|&x| x == worse).unwrap();
        if bi > wi {
            let b = items.remove(bi);
            items.insert(wi, b);
        }
    }
    WeakOrder::strict(items)
}
