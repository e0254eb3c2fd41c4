//! Canonical labelling of flags.
//!
//! Roots are individualised first, in order, so they always occupy the first
//! positions of the canonical labelling. The remaining vertices go through
//! equitable partition refinement and a backtracking search over the first
//! non-trivial cell. The canonical labelling is the leaf whose adjacency
//! bitstring is lexicographically largest. Interchangeable twins in the
//! target cell are explored only once.

use std::fmt;

use crate::error::GraphError;
use crate::graph::{Flag, Graph};

/// Upper-triangular adjacency bits of the canonically relabelled flag,
/// concatenated row-major, with the first pair in the most significant
/// position. Roots occupy positions `0..s`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    n: u8,
    s: u8,
    bits: u128,
}

impl CanonicalForm {
    pub fn order(&self) -> usize {
        self.n as usize
    }

    pub fn type_order(&self) -> usize {
        self.s as usize
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// The bitstring as `0`/`1` characters.
    pub fn to_bitstring(&self) -> String {
        let len = pair_count(self.order());
        (0..len)
            .map(|i| if self.bits >> (len - 1 - i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// The relabelled graph this form encodes.
    pub fn graph(&self) -> Graph {
        Graph::from_upper_triangle_on(self.order(), &self.to_bitstring()).expect("valid canonical bitstring")
    }

    /// The canonical representative flag (roots are `0..s`).
    pub fn to_flag(&self) -> Flag {
        Flag::rooted_prefix(self.graph(), self.type_order()).expect("s <= n")
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Canon(n={}, s={}, {})", self.n, self.s, self.to_bitstring())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn encode(g: &Graph, order: &[usize]) -> u128 {
    let n = order.len();
    let mut bits = 0u128;
    for i in 0..n {
        let row = g.neighbours(order[i]);
        for &v in &order[i + 1..n] {
            bits = bits << 1 | u128::from(row >> v & 1);
        }
    }
    bits
}

/// Canonical form of `flag`.
pub fn canonical_form(flag: &Flag) -> CanonicalForm {
    canonical_labelling(flag.graph(), flag.roots()).0
}

/// Canonical form of the flag whose roots are the first `s` vertices.
pub fn canonical_form_prefix(g: &Graph, s: usize) -> CanonicalForm {
    let roots: Vec<usize> = (0..s).collect();
    canonical_labelling(g, &roots).0
}

/// Canonical form together with the labelling `order`, where `order[i]` is the
/// original vertex placed at canonical position `i`.
pub fn canonical_labelling(g: &Graph, roots: &[usize]) -> (CanonicalForm, Vec<usize>) {
    let n = g.order();
    let mut cells: Vec<u32> = roots.iter().map(|&r| 1u32 << r).collect();
    let root_mask = cells.iter().fold(0, |m, c| m | c);
    let rest = ((1u64 << n) - 1) as u32 & !root_mask;
    if rest != 0 {
        cells.push(rest);
    }
    refine(g, &mut cells);
    let mut best: Option<(u128, Vec<usize>)> = None;
    search(g, cells, &mut best);
    let (bits, order) = best.expect("search visits at least one leaf");
    (
        CanonicalForm {
            n: n as u8,
            s: roots.len() as u8,
            bits,
        },
        order,
    )
}

fn search(g: &Graph, cells: Vec<u32>, best: &mut Option<(u128, Vec<usize>)>) {
    let Some(target) = cells.iter().position(|c| c.count_ones() > 1) else {
        let order: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
        let bits = encode(g, &order);
        if best.as_ref().is_none_or(|(b, _)| bits > *b) {
            *best = Some((bits, order));
        }
        return;
    };
    let cell = cells[target];
    let mut tried = 0u32;
    let mut remaining = cell;
    while remaining != 0 {
        let v = remaining.trailing_zeros() as usize;
        remaining &= remaining - 1;
        if is_twin_of_any(g, v, tried) {
            continue;
        }
        tried |= 1 << v;
        let mut next = Vec::with_capacity(cells.len() + 1);
        next.extend_from_slice(&cells[..target]);
        next.push(1 << v);
        next.push(cell & !(1 << v));
        next.extend_from_slice(&cells[target + 1..]);
        refine(g, &mut next);
        search(g, next, best);
    }
}

/// Swapping two twins is an automorphism fixing every other vertex, so the
/// subtrees below them yield the same leaves.
fn is_twin_of_any(g: &Graph, v: usize, tried: u32) -> bool {
    let nv = g.neighbours(v);
    let mut t = tried;
    while t != 0 {
        let u = t.trailing_zeros() as usize;
        t &= t - 1;
        if nv & !(1 << u) == g.neighbours(u) & !(1 << v) {
            return true;
        }
    }
    false
}

/// Splits cells until every vertex of a cell has the same number of
/// neighbours in each cell. Split order depends only on these counts, so the
/// result is isomorphism-invariant.
fn refine(g: &Graph, cells: &mut Vec<u32>) {
    let mut changed = true;
    while changed {
        changed = false;
        for ci in 0..cells.len() {
            let cell = cells[ci];
            if cell.count_ones() < 2 {
                continue;
            }
            let mut members: Vec<(Vec<u8>, usize)> = Vec::new();
            let mut m = cell;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                let nv = g.neighbours(v);
                let sig = cells.iter().map(|c| (nv & c).count_ones() as u8).collect();
                members.push((sig, v));
            }
            if members.iter().all(|(s, _)| *s == members[0].0) {
                continue;
            }
            members.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            let mut parts: Vec<u32> = Vec::new();
            let mut last: Option<&Vec<u8>> = None;
            for (sig, v) in &members {
                if last != Some(sig) {
                    parts.push(0);
                    last = Some(sig);
                }
                *parts.last_mut().expect("pushed") |= 1 << v;
            }
            cells.splice(ci..=ci, parts);
            changed = true;
            break;
        }
    }
}

/// Isomorphism test for flags of the same type.
pub fn is_isomorphic(a: &Flag, b: &Flag) -> Result<bool, GraphError> {
    if a.flag_type() != b.flag_type() {
        return Err(GraphError::TypeMismatch);
    }
    if a.order() != b.order() || a.graph().edge_count() != b.graph().edge_count() {
        return Ok(false);
    }
    Ok(canonical_form(a) == canonical_form(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TypeGraph;

    /// Exhaustive permutation search, independent of the refinement code.
    fn brute_iso(a: &Flag, b: &Flag) -> bool {
        let n = a.order();
        if n != b.order() {
            return false;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let roots_ok = a.roots().iter().zip(b.roots()).all(|(&ra, &rb)| perm[ra] == rb);
            let edges_ok = (0..n)
                .all(|u| (u + 1..n).all(|v| a.graph().has_edge(u, v) == b.graph().has_edge(perm[u], perm[v])));
            if roots_ok && edges_ok {
                return true;
            }
            if !next_permutation(&mut perm) {
                return false;
            }
        }
    }

    fn next_permutation(p: &mut [usize]) -> bool {
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    #[test]
    fn three_vertex_graphs_have_four_forms() {
        let mut forms = std::collections::BTreeSet::new();
        for mask in 0..8u32 {
            let pairs = [(0, 1), (0, 2), (1, 2)];
            let edges: Vec<_> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| pairs[i]).collect();
            let g = Graph::from_edges(3, &edges).unwrap();
            forms.insert(canonical_form(&Flag::unlabelled(g)));
        }
        assert_eq!(forms.len(), 4);
    }

    #[test]
    fn roots_come_first() {
        let point = TypeGraph::from_edges(1, &[]).unwrap();
        // path 0-1-2 rooted at the far leaf
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let f = Flag::new(g, vec![2], point).unwrap();
        let (form, order) = canonical_labelling(f.graph(), f.roots());
        assert_eq!(order[0], 2);
        assert_eq!(form.type_order(), 1);
        assert_eq!(form.to_flag().roots(), &[0]);
        assert!(is_isomorphic(&form.to_flag(), &f).unwrap());
    }

    #[test]
    fn rooted_paths_differ() {
        let point = TypeGraph::from_edges(1, &[]).unwrap();
        let leaf = Flag::new(Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(), vec![0], point).unwrap();
        let centre = Flag::new(Graph::from_edges(3, &[(1, 0), (0, 2)]).unwrap(), vec![0], point).unwrap();
        assert!(!is_isomorphic(&leaf, &centre).unwrap());
    }

    #[test]
    fn type_mismatch_is_an_error() {
        let a = Flag::unlabelled(Graph::empty(2).unwrap());
        let b = Flag::rooted_prefix(Graph::empty(2).unwrap(), 1).unwrap();
        assert_eq!(is_isomorphic(&a, &b), Err(GraphError::TypeMismatch));
    }

    #[test]
    fn symmetric_graphs_are_handled() {
        // empty graph on 9 vertices and the 3x3 rook graph
        let e9 = Graph::empty(9).unwrap();
        assert_eq!(canonical_form_prefix(&e9, 0).bits(), 0);
        let mut edges = Vec::new();
        for u in 0..9usize {
            for v in u + 1..9 {
                if u / 3 == v / 3 || u % 3 == v % 3 {
                    edges.push((u, v));
                }
            }
        }
        let rook = Graph::from_edges(9, &edges).unwrap();
        let f = Flag::unlabelled(rook);
        let perm = [4, 0, 8, 2, 6, 1, 3, 7, 5];
        assert_eq!(canonical_form(&f), canonical_form(&f.relabelled(&perm)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_flag() -> impl Strategy<Value = Flag> {
            (1usize..=6)
                .prop_flat_map(|n| (Just(n), 0..=n.min(3), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
                .prop_map(|(n, s, bits)| {
                    let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    let g = Graph::from_upper_triangle_on(n, &text).unwrap();
                    Flag::rooted_prefix(g, s).unwrap()
                })
        }

        proptest! {
            #[test]
            fn relabelling_preserves_form(f in arb_flag(), seed in any::<u64>()) {
                let n = f.order();
                let mut perm: Vec<usize> = (0..n).collect();
                let mut x = seed;
                for i in (1..n).rev() {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    perm.swap(i, (x >> 33) as usize % (i + 1));
                }
                let g = f.relabelled(&perm);
                prop_assert_eq!(canonical_form(&f), canonical_form(&g));
            }

            #[test]
            fn forms_agree_with_brute_force(a in arb_flag(), other in arb_flag()) {
                // give `b` the order and root pattern of `a`
                let n = a.order();
                let s = a.type_order();
                let mut g = *a.graph();
                for u in 0..n {
                    for v in u + 1..n {
                        if v >= s {
                            let bit = u < other.order() && v < other.order() && other.graph().has_edge(u, v);
                            g.set_edge(u, v, bit);
                        }
                    }
                }
                let b = Flag::rooted_prefix(g, s).unwrap();
                prop_assert_eq!(canonical_form(&a) == canonical_form(&b), brute_iso(&a, &b));
            }

            #[test]
            fn complement_is_involution(f in arb_flag()) {
                let g = f.graph();
                let n = g.order();
                prop_assert_eq!(g.complement().complement(), *g);
                prop_assert_eq!(g.edge_count() + g.complement().edge_count(), n * (n.saturating_sub(1)) / 2);
            }
        }
    }
}
