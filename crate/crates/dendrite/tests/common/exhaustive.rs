//! Every tree up to a size, and the median, closure and realization checks
//! run against the path oracles on each of them.

use std::collections::{BTreeMap, BTreeSet};

use dendrite::betweenness::{realize_tree, BetweennessRel};
use dendrite::label::Label;
use dendrite::{FiniteTree, PointId};

use super::oracle::all_trees;
use super::trees::{between, closure, median};

pub fn tree_from_edges(n: usize, edges: &[(usize, usize)]) -> FiniteTree {
    let p = |v: usize| PointId(v as u64);
    FiniteTree::from_parts((0..n).map(|v| (p(v), Label::Infinite)), edges.iter().map(|&(a, b)| (p(a), p(b)))).unwrap()
}

/// All labelled trees on 0..n.
pub fn labelled(n: usize) -> Vec<FiniteTree> {
    all_trees(n).iter().map(|e| tree_from_edges(n, e)).collect()
}

/// One tree per isomorphism class on n vertices.
pub fn shapes(n: usize) -> Vec<FiniteTree> {
    let mut seen = BTreeMap::new();
    for e in all_trees(n) {
        seen.entry(canon(n, &e)).or_insert_with(|| tree_from_edges(n, &e));
    }
    seen.into_values().collect()
}

fn canon(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    // centres by peeling leaves
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    fn enc(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
        let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| enc(adj, w, v)).collect();
        kids.sort();
        format!("({})", kids.concat())
    }
    layer.iter().map(|&c| enc(&adj, c, usize::MAX)).min().unwrap_or_default()
}

/// The trees the exhaustive checks run on: every labelled tree up to
/// `labelled_up_to` vertices, then one per shape up to `max`.
pub fn corpus(labelled_up_to: usize, max: usize) -> Vec<FiniteTree> {
    let mut out = Vec::new();
    for n in 1..=max {
        if n <= labelled_up_to {
            out.extend(labelled(n));
        } else {
            out.extend(shapes(n));
        }
    }
    out
}

pub fn check_medians(t: &FiniteTree) -> Result<(), String> {
    let vs: Vec<PointId> = t.vertices().collect();
    for &x in &vs {
        for &y in &vs {
            for &z in &vs {
                let c = t.center(x, y, z).map_err(|e| e.to_string())?;
                if c != median(t, x, y, z) {
                    return Err(format!("center({x}, {y}, {z}) = {c}"));
                }
            }
        }
    }
    Ok(())
}

fn subsets(vs: &[PointId]) -> impl Iterator<Item = BTreeSet<PointId>> + '_ {
    (0u32..1 << vs.len()).map(move |m| vs.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect())
}

pub fn check_closures(t: &FiniteTree) -> Result<(), String> {
    let vs: Vec<PointId> = t.vertices().collect();
    for s in subsets(&vs) {
        let want = closure(t, &s);
        let got = t.c_closure(&s).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("c_closure({s:?}) = {got:?}, oracle {want:?}"));
        }
        if t.is_c_closed(&s).map_err(|e| e.to_string())? != (want == s) {
            return Err(format!("is_c_closed({s:?}) disagrees"));
        }
    }
    Ok(())
}

/// Realizing the path-betweenness of a c-closed S gives a tree isomorphic to
/// the span of S by a map fixing S. Any other S only determines the
/// betweenness on S itself (four leaves of an H and of a star look alike),
/// so there the realization must reproduce that and nothing more.
pub fn check_realization(t: &FiniteTree) -> Result<(), String> {
    let vs: Vec<PointId> = t.vertices().collect();
    for s in subsets(&vs) {
        let b = BetweennessRel::from_tree(t, &s);
        let mut next = 1000;
        let r = realize_tree(&b, &mut || {
            next += 1;
            PointId(next)
        })
        .map_err(|e| format!("{s:?}: {e}"))?;
        let cl = closure(t, &s);
        if cl != s {
            if BetweennessRel::from_tree(&r, &s) != b {
                return Err(format!("{s:?}: realization changes the betweenness"));
            }
            continue;
        }
        // send each median of S to the median of the same triple in r
        let sv: Vec<PointId> = s.iter().copied().collect();
        let mut sigma: BTreeMap<PointId, PointId> = s.iter().map(|&p| (p, p)).collect();
        for &x in &sv {
            for &y in &sv {
                for &z in &sv {
                    let m = median(t, x, y, z);
                    let rm = r.center(x, y, z).map_err(|e| e.to_string())?;
                    if *sigma.entry(m).or_insert(rm) != rm {
                        return Err(format!("{s:?}: median of {x}, {y}, {z} lands in two places"));
                    }
                }
            }
        }
        let image: BTreeSet<PointId> = sigma.values().copied().collect();
        let rv: BTreeSet<PointId> = r.vertices().collect();
        if image.len() != cl.len() || image != rv {
            return Err(format!("{s:?}: realization has {} vertices, span has {}", rv.len(), cl.len()));
        }
        for &x in &cl {
            for &y in &cl {
                for &z in &cl {
                    if between(t, z, x, y) != between(&r, sigma[&z], sigma[&x], sigma[&y]) {
                        return Err(format!("{s:?}: betweenness of {z} in [{x}, {y}] changes"));
                    }
                }
            }
        }
    }
    Ok(())
}
