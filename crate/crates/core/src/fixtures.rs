//! Small named instances used throughout the docs, examples and tests.

use crate::model::{
    AdmissionEdge, Arc, CacqInstance, College, CollegeSet, Commodity, FlowInstance, Hyperedge,
    HypergraphInstance, MultiFlow,
};
use crate::order::WeakOrder;
use crate::rational::{int, ratio};

fn edge(id: &str, members: &[usize]) -> Hyperedge {
    Hyperedge {
        id: id.to_string(),
        members: members.to_vec(),
    }
}

/// Three agents in a preference cycle: `a: ab ≻ ca`, `b: bc ≻ ab`,
/// `c: ca ≻ bc`, all with capacity one. No stable matching exists.
pub fn triangle() -> HypergraphInstance {
    HypergraphInstance {
        vertices: vec!["a".into(), "b".into(), "c".into()],
        edges: vec![
            edge("ab", &[0, 1]),
            edge("bc", &[1, 2]),
            edge("ca", &[2, 0]),
        ],
        capacity: vec![1, 1, 1],
        preferences: vec![
            WeakOrder::strict([0, 2]),
            WeakOrder::strict([1, 0]),
            WeakOrder::strict([2, 1]),
        ],
    }
}

/// Complete bipartite marriage market on `n + n` agents. Men are vertices
/// `0..n`, women `n..2n`; edge `m * n + w` joins man `m` and woman `w`.
/// Preference lists name partners best-first by their index within their side.
pub fn marriage(men: &[Vec<usize>], women: &[Vec<usize>]) -> HypergraphInstance {
    let n = men.len();
    assert_eq!(women.len(), n);
    let mut vertices: Vec<String> = (0..n).map(|m| format!("m{}", m + 1)).collect();
    vertices.extend((0..n).map(|w| format!("w{}", w + 1)));
    let mut edges = Vec::new();
    for m in 0..n {
        for w in 0..n {
            edges.push(edge(&format!("m{}w{}", m + 1, w + 1), &[m, n + w]));
        }
    }
    let mut preferences: Vec<WeakOrder> = men
        .iter()
        .enumerate()
        .map(|(m, list)| WeakOrder::strict(list.iter().map(|&w| m * n + w)))
        .collect();
    preferences.extend(
        women
            .iter()
            .enumerate()
            .map(|(w, list)| WeakOrder::strict(list.iter().map(|&m| m * n + w))),
    );
    HypergraphInstance {
        vertices,
        edges,
        capacity: vec![1; 2 * n],
        preferences,
    }
}

/// Two students, two unit-quota colleges, full acceptability, and one
/// common quota of 1 over both colleges. Everyone ranks `s1` first and
/// both students prefer `c1`. Singleton sets are left to normalization.
pub fn cacq_common_quota() -> CacqInstance {
    let students = vec!["s1".to_string(), "s2".to_string()];
    let edges = vec![
        adm("s1c1", 0, 0),
        adm("s1c2", 0, 1),
        adm("s2c1", 1, 0),
        adm("s2c2", 1, 1),
    ];
    CacqInstance {
        students,
        colleges: vec![
            college("c1", 1, WeakOrder::strict([0, 1])),
            college("c2", 1, WeakOrder::strict([0, 1])),
        ],
        edges,
        sets: vec![CollegeSet {
            id: "common".into(),
            colleges: vec![0, 1],
            quota: 1,
            master: WeakOrder::strict([0, 1]),
        }],
        student_preferences: vec![WeakOrder::strict([0, 1]), WeakOrder::strict([2, 3])],
    }
}

/// Four colleges grouped into two faculties with their own common quotas,
/// so every college sits in its singleton plus one faculty set.
pub fn hungarian_style() -> CacqInstance {
    let students: Vec<String> = (1..=5).map(|i| format!("s{i}")).collect();
    // faculty A = {c1, c2} ranks s1 > s2 > s3 > s4 > s5
    // faculty B = {c3, c4} ranks s5 > s4 > s3 > s2 > s1
    let mut edges = Vec::new();
    let mut id = |s: usize, c: usize| {
        edges.push(adm(&format!("s{}c{}", s + 1, c + 1), s, c));
        edges.len() - 1
    };
    let mut student_lists: Vec<Vec<usize>> = vec![Vec::new(); 5];
    let wishes: [&[usize]; 5] = [&[2, 0], &[0, 3, 1], &[1, 2], &[3, 0], &[0, 1, 2]];
    for (s, wish) in wishes.iter().enumerate() {
        for &c in wish.iter() {
            let e = id(s, c);
            student_lists[s].push(e);
        }
    }
    let rank_a = [0usize, 1, 2, 3, 4];
    let rank_b = [4usize, 3, 2, 1, 0];
    let accepted = |c: usize| -> Vec<usize> {
        wishes
            .iter()
            .enumerate()
            .filter(|(_, w)| w.contains(&c))
            .map(|(s, _)| s)
            .collect()
    };
    let order_for = |c: usize, rank: &[usize; 5]| {
        let acc = accepted(c);
        WeakOrder::strict(rank.iter().copied().filter(|s| acc.contains(s)))
    };
    let colleges = vec![
        college("c1", 1, order_for(0, &rank_a)),
        college("c2", 1, order_for(1, &rank_a)),
        college("c3", 2, order_for(2, &rank_b)),
        college("c4", 1, order_for(3, &rank_b)),
    ];
    let union = |cs: &[usize], rank: &[usize; 5]| {
        let mut acc: Vec<usize> = cs.iter().flat_map(|&c| accepted(c)).collect();
        acc.sort();
        acc.dedup();
        WeakOrder::strict(rank.iter().copied().filter(|s| acc.contains(s)))
    };
    CacqInstance {
        students,
        colleges,
        sets: vec![
            CollegeSet {
                id: "facultyA".into(),
                colleges: vec![0, 1],
                quota: 1,
                master: union(&[0, 1], &rank_a),
            },
            CollegeSet {
                id: "facultyB".into(),
                colleges: vec![2, 3],
                quota: 2,
                master: union(&[2, 3], &rank_b),
            },
        ],
        edges,
        student_preferences: student_lists.into_iter().map(WeakOrder::strict).collect(),
    }
}

fn adm(id: &str, student: usize, college: usize) -> AdmissionEdge {
    AdmissionEdge {
        id: id.into(),
        student,
        college,
    }
}

fn college(id: &str, quota: u64, preferences: WeakOrder) -> College {
    College {
        id: id.into(),
        quota,
        preferences,
    }
}

/// One arc `s → t` shared by two commodities with unit capacities; the arc
/// prefers commodity 1 (index 0).
pub fn single_arc_two_commodities() -> FlowInstance {
    FlowInstance {
        vertices: vec!["s".into(), "t".into()],
        arcs: vec![Arc {
            id: "st".into(),
            tail: 0,
            head: 1,
            capacity: 1,
            commodity_capacity: vec![1, 1],
            preferences: WeakOrder::strict([0, 1]),
        }],
        commodities: vec![
            Commodity {
                id: "k1".into(),
                source: 0,
                sink: 1,
            },
            Commodity {
                id: "k2".into(),
                source: 0,
                sink: 1,
            },
        ],
        vertex_preferences: vec![
            vec![WeakOrder::strict([0]), WeakOrder::strict([0])],
            vec![WeakOrder::strict([0]), WeakOrder::strict([0])],
        ],
    }
}

/// A saturated arc `s → t` plus a directed 3-cycle `u → v → w → u`
/// carrying half a unit of the single commodity. Each cycle vertex has one
/// outgoing arc, so no blocking walk can start on the cycle: the flow is
/// stable and fractional.
pub fn fractional_cycle() -> (FlowInstance, MultiFlow) {
    let names = ["s", "t", "u", "v", "w"];
    let arc = |id: &str, tail: usize, head: usize| Arc {
        id: id.into(),
        tail,
        head,
        capacity: 1,
        commodity_capacity: vec![1],
        preferences: WeakOrder::strict([0]),
    };
    let arcs = vec![
        arc("st", 0, 1),
        arc("uv", 2, 3),
        arc("vw", 3, 4),
        arc("wu", 4, 2),
    ];
    let inst = FlowInstance {
        vertices: names.iter().map(|s| s.to_string()).collect(),
        commodities: vec![Commodity {
            id: "k1".into(),
            source: 0,
            sink: 1,
        }],
        vertex_preferences: vec![
            vec![WeakOrder::strict([0])],
            vec![WeakOrder::strict([0])],
            vec![WeakOrder::strict([1, 3])],
            vec![WeakOrder::strict([2, 1])],
            vec![WeakOrder::strict([3, 2])],
        ],
        arcs,
    };
    let half = ratio(1, 2);
    let flow = MultiFlow {
        values: vec![vec![int(1), half.clone(), half.clone(), half]],
    };
    (inst, flow)
}
