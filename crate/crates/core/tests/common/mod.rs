//! Independent oracles shared by the integration tests. Nothing here uses the
//! library's composition tables or its own interval classifier.
#![allow(dead_code)]

use std::cmp::Ordering;

use ia_core::generate::InstanceRng;
use ia_core::{Basic, Label, Network};

/// Names the relation of `a` to `b` straight from the textbook conditions.
pub fn classify<T: Ord + Copy>(a: (T, T), b: (T, T)) -> &'static str {
    let ((a1, a2), (b1, b2)) = (a, b);
    if a2 < b1 {
        "b"
    } else if b2 < a1 {
        "bi"
    } else if a2 == b1 {
        "m"
    } else if b2 == a1 {
        "mi"
    } else if a1 == b1 && a2 == b2 {
        "eq"
    } else if a1 == b1 {
        if a2 < b2 { "s" } else { "si" }
    } else if a2 == b2 {
        if a1 > b1 { "f" } else { "fi" }
    } else if b1 < a1 && a2 < b2 {
        "d"
    } else if a1 < b1 && b2 < a2 {
        "di"
    } else if a1 < b1 {
        "o"
    } else {
        "oi"
    }
}

pub fn basic(name: &str) -> Basic {
    name.parse().unwrap()
}

/// Every interval with endpoints in `0..limit`.
pub fn grid(limit: i64) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for s in 0..limit {
        for e in s + 1..limit {
            v.push((s, e));
        }
    }
    v
}

/// Composition of basic relations by enumerating interval triples on a grid
/// large enough to realise every arrangement of six endpoints.
pub fn composition_oracle() -> [[Label; 13]; 13] {
    let mut t = [[Label::EMPTY; 13]; 13];
    let g = grid(6);
    for &a in &g {
        for &b in &g {
            let r1 = basic(classify(a, b)).index();
            for &c in &g {
                let r2 = basic(classify(b, c)).index();
                t[r1][r2] = t[r1][r2] | Label::singleton(basic(classify(a, c)));
            }
        }
    }
    t
}

pub fn compose_with(t: &[[Label; 13]; 13], x: Label, y: Label) -> Label {
    let mut out = Label::EMPTY;
    for r1 in x.iter() {
        for r2 in y.iter() {
            out = out | t[r1.index()][r2.index()];
        }
    }
    out
}

/// Orderings between the endpoints `[a-, a+, b-, b+]` for each relation.
pub fn endpoint_pattern(r: Basic) -> [[Ordering; 4]; 4] {
    for a in grid(5) {
        for b in grid(5) {
            if classify(a, b) == r.name() {
                let p = [a.0, a.1, b.0, b.1];
                let mut m = [[Ordering::Equal; 4]; 4];
                for i in 0..4 {
                    for j in 0..4 {
                        m[i][j] = p[i].cmp(&p[j]);
                    }
                }
                return m;
            }
        }
    }
    unreachable!()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Decides an atomic network by point-algebra reasoning over the `2n`
/// endpoints: merge equalities, then look for a cycle of strict precedences.
pub fn atomic_consistent(n: usize, rel: impl Fn(usize, usize) -> Basic) -> bool {
    let pts = 2 * n;
    let mut parent: Vec<usize> = (0..pts).collect();
    let mut less = Vec::new();
    let add = |u: usize, v: usize, o: Ordering, parent: &mut Vec<usize>, less: &mut Vec<(usize, usize)>| match o {
        Ordering::Less => less.push((u, v)),
        Ordering::Greater => less.push((v, u)),
        Ordering::Equal => {
            let (a, b) = (find(parent, u), find(parent, v));
            parent[a] = b;
        }
    };
    for i in 0..n {
        add(2 * i, 2 * i + 1, Ordering::Less, &mut parent, &mut less);
        for j in i + 1..n {
            let m = endpoint_pattern(rel(i, j));
            let ids = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1];
            for u in 0..2 {
                for v in 2..4 {
                    add(ids[u], ids[v], m[u][v], &mut parent, &mut less);
                }
            }
        }
    }
    let mut indeg = vec![0usize; pts];
    let mut succ = vec![Vec::new(); pts];
    for &(u, v) in &less {
        let (u, v) = (find(&mut parent, u), find(&mut parent, v));
        if u == v {
            return false;
        }
        succ[u].push(v);
        indeg[v] += 1;
    }
    let mut ready: Vec<usize> = (0..pts).filter(|&p| find(&mut parent, p) == p && indeg[p] == 0).collect();
    let mut seen = 0;
    let roots = (0..pts).filter(|&p| find(&mut parent, p) == p).count();
    while let Some(u) = ready.pop() {
        seen += 1;
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(v);
            }
        }
    }
    seen == roots
}

/// Number of singleton labelings of the edges `i < j`.
pub fn labeling_count(net: &Network) -> u128 {
    net.edges().map(|e| net.get(e.i, e.j).cardinality() as u128).product()
}

/// Consistency by trying every singleton labeling.
pub fn brute_force_consistent(net: &Network) -> bool {
    let edges: Vec<(usize, usize)> = net.edges().map(|e| (e.i, e.j)).collect();
    let n = net.n();
    let mut pick = vec![Basic::Equal; edges.len()];
    fn go(k: usize, edges: &[(usize, usize)], net: &Network, pick: &mut Vec<Basic>, n: usize) -> bool {
        if k == edges.len() {
            let at = |i: usize, j: usize| pick[edges.iter().position(|&e| e == (i, j)).unwrap()];
            return atomic_consistent(n, at);
        }
        let (i, j) = edges[k];
        for r in net.get(i, j).iter() {
            pick[k] = r;
            if go(k + 1, edges, net, pick, n) {
                return true;
            }
        }
        false
    }
    go(0, &edges, net, &mut pick, n)
}

/// Consistency by placing every interval on a small integer grid; exact for
/// `n <= 4` because `2n` distinct positions realise every endpoint order.
pub fn grid_consistent(net: &Network) -> bool {
    let g = grid(2 * net.n() as i64);
    let mut chosen = Vec::new();
    fn go(net: &Network, g: &[(i64, i64)], chosen: &mut Vec<(i64, i64)>) -> bool {
        let k = chosen.len();
        if k == net.n() {
            return true;
        }
        for &iv in g {
            if (0..k).all(|i| net.get(i, k).contains(basic(classify(chosen[i], iv)))) {
                chosen.push(iv);
                if go(net, g, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    go(net, &g, &mut chosen)
}

/// Random labels of at most `max_size` relations on about `density` of the
/// edges.
pub fn random_network(rng: &mut InstanceRng, n: usize, density_pct: u64, max_size: u64) -> Network {
    let mut net = Network::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.below(100) < density_pct {
                let size = 1 + rng.below(max_size);
                let mut l = Label::EMPTY;
                while (l.cardinality() as u64) < size {
                    l = l | Label::singleton(Basic::ALL[rng.below(13) as usize]);
                }
                net.set(i, j, l);
            }
        }
    }
    net
}
