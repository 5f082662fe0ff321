//! Maximum cardinality matching in general graphs (Edmonds' blossom method).

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

/// Returns `mate`, where `mate[v]` is the partner of `v` or `None`.
pub fn maximum_matching(n: usize, edges: &[(usize, usize)]) -> Vec<Option<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut mate = vec![NONE; n];
    for root in 0..n {
        if mate[root] == NONE {
            if let Some(end) = find_augmenting(&adj, &mate, root) {
                augment(&mut mate, &end.0, end.1);
            }
        }
    }
    mate.into_iter().map(|m| (m != NONE).then_some(m)).collect()
}

pub fn matching_size(n: usize, edges: &[(usize, usize)]) -> usize {
    maximum_matching(n, edges).iter().flatten().count() / 2
}

fn augment(mate: &mut [usize], parent: &[usize], mut v: usize) {
    while v != NONE {
        let pv = parent[v];
        let ppv = mate[pv];
        mate[v] = pv;
        mate[pv] = v;
        v = ppv;
    }
}

fn lca(mate: &[usize], base: &[usize], parent: &[usize], mut a: usize, mut b: usize) -> usize {
    let mut seen = vec![false; mate.len()];
    loop {
        a = base[a];
        seen[a] = true;
        if mate[a] == NONE {
            break;
        }
        a = parent[mate[a]];
    }
    loop {
        b = base[b];
        if seen[b] {
            return b;
        }
        b = parent[mate[b]];
    }
}

/// BFS from `root` over alternating paths with blossom contraction. Returns
/// the parent array and the free vertex ending an augmenting path.
fn find_augmenting(adj: &[Vec<usize>], mate: &[usize], root: usize) -> Option<(Vec<usize>, usize)> {
    let n = adj.len();
    let mut used = vec![false; n];
    let mut parent = vec![NONE; n];
    let mut base: Vec<usize> = (0..n).collect();
    let mut queue = VecDeque::new();
    used[root] = true;
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        for &to in &adj[v] {
            if base[v] == base[to] || mate[v] == to {
                continue;
            }
            if to == root || (mate[to] != NONE && parent[mate[to]] != NONE) {
                let cur = lca(mate, &base, &parent, v, to);
                let mut blossom = vec![false; n];
                mark_path(mate, &mut base, &mut parent, &mut blossom, v, cur, to);
                mark_path(mate, &mut base, &mut parent, &mut blossom, to, cur, v);
                for i in 0..n {
                    if blossom[base[i]] {
                        base[i] = cur;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[to] == NONE {
                parent[to] = v;
                if mate[to] == NONE {
                    return Some((parent, to));
                }
                let next = mate[to];
                used[next] = true;
                queue.push_back(next);
            }
        }
    }
    None
}

fn mark_path(
    mate: &[usize],
    base: &mut [usize],
    parent: &mut [usize],
    blossom: &mut [bool],
    mut v: usize,
    b: usize,
    mut child: usize,
) {
    while base[v] != b {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        parent[v] = child;
        child = mate[v];
        v = parent[mate[v]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exhaustive(edges: &[(usize, usize)]) -> usize {
        fn rec(edges: &[(usize, usize)], used: u32) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(u, v), rest)) => {
                    let skip = rec(rest, used);
                    if used >> u & 1 == 0 && used >> v & 1 == 0 && u != v {
                        skip.max(1 + rec(rest, used | 1 << u | 1 << v))
                    } else {
                        skip
                    }
                }
            }
        }
        rec(edges, 0)
    }

    #[test]
    fn odd_cycle_with_tail() {
        // triangle 0-1-2 plus pendant 2-3 and 0-4
        let edges = [(0, 1), (1, 2), (2, 0), (2, 3), (0, 4)];
        assert_eq!(matching_size(5, &edges), 2);
        let e2 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (4, 5), (1, 6)];
        assert_eq!(matching_size(7, &e2), 3);
    }

    #[test]
    fn star_has_matching_one() {
        assert_eq!(matching_size(4, &[(0, 1), (0, 2), (0, 3)]), 1);
        assert_eq!(matching_size(3, &[]), 0);
    }

    proptest! {
        #[test]
        fn blossom_matches_exhaustive(n in 1usize..9, raw in proptest::collection::vec((0usize..9, 0usize..9), 0..16)) {
            let edges: Vec<_> = raw.into_iter().filter(|&(u, v)| u < n && v < n && u != v).collect();
            let mate = maximum_matching(n, &edges);
            for (v, m) in mate.iter().enumerate() {
                if let Some(u) = m {
                    prop_assert_eq!(mate[*u], Some(v));
                    prop_assert!(edges.contains(&(v, *u)) || edges.contains(&(*u, v)));
                }
            }
            prop_assert_eq!(matching_size(n, &edges), exhaustive(&edges));
        }
    }
}
