//! Brute-force shape enumerator for orbit types of ordered k-tuples.
//!
//! Vertices 0..k are the tuple entries, vertices k..n are medians. Every tree on
//! n vertices is generated from its Prüfer sequence, medians must have degree
//! at least 3, and two shapes are identified when some renaming of the medians
//! maps one onto the other.

use std::collections::BTreeSet;

/// Branch orders allowed in S; `None` stands for ∞.
pub fn brute_force_orbit_count(k: usize, orders: &[Option<u32>]) -> usize {
    if k == 0 {
        return 1;
    }
    let mut seen: BTreeSet<(Vec<(usize, usize)>, Vec<Option<u32>>)> = BTreeSet::new();
    let max_n = if k == 1 { 1 } else { 2 * k - 2 };
    for n in k..=max_n {
        for edges in all_trees(n) {
            let mut deg = vec![0usize; n];
            for &(a, b) in &edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            if (k..n).any(|v| deg[v] < 3) {
                continue;
            }
            for labels in label_choices(&deg, orders) {
                let mut best: Option<(Vec<(usize, usize)>, Vec<Option<u32>>)> = None;
                for perm in permutations(n - k) {
                    let f = |v: usize| if v < k { v } else { k + perm[v - k] };
                    let mut es: Vec<(usize, usize)> =
                        edges.iter().map(|&(a, b)| (f(a).min(f(b)), f(a).max(f(b)))).collect();
                    es.sort();
                    let mut ls = vec![None; n];
                    for v in 0..n {
                        ls[f(v)] = labels[v];
                    }
                    let cand = (es, ls);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
                seen.insert(best.unwrap());
            }
        }
    }
    seen.len()
}

fn label_choices(deg: &[usize], orders: &[Option<u32>]) -> Vec<Vec<Option<u32>>> {
    let mut out = vec![vec![]];
    for &d in deg {
        let allowed: Vec<Option<u32>> =
            orders.iter().copied().filter(|o| o.is_none_or(|n| n as usize >= d)).collect();
        let mut next = Vec::new();
        for pre in &out {
            for &a in &allowed {
                let mut v = pre.clone();
                v.push(a);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    match n {
        0 => return vec![],
        1 => return vec![vec![]],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let mut out = Vec::new();
    let total = n.pow((n - 2) as u32);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        out.push(prufer_decode(&seq, n));
    }
    out
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::new();
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(m - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, m - 1);
            out.push(q);
        }
    }
    out
}
