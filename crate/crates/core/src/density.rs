//! Induced densities `p(F1, …, Fn; F)` over sunflowers.

use num_bigint::BigInt;

use crate::canon::{canonical_form, canonical_form_prefix, CanonicalForm};
use crate::enumerate::FlagBasis;
use crate::error::{AlgebraError, GraphError};
use crate::graph::{Flag, Graph};
use crate::{FlagVector, Rational};

/// `p(small; large)`: the fraction of `v(small)`-subsets of `large` that
/// contain the roots and induce a copy of `small`.
pub fn density(small: &Flag, large: &Flag) -> Result<Rational, AlgebraError> {
    if small.order() > large.order() {
        return Err(AlgebraError::PetalBudget {
            needed: small.order() - small.type_order(),
            available: large.order() - large.type_order(),
        });
    }
    joint_density(std::slice::from_ref(small), large)
}

/// `p(F1, …, Fn; F)`: the fraction of ordered sunflowers `(V1, …, Vn)` in
/// `large`, with `|Vi| = v(Fi)` and petals meeting exactly in the roots, such
/// that each `large|Vi` is isomorphic to `Fi`.
pub fn joint_density(petals: &[Flag], large: &Flag) -> Result<Rational, AlgebraError> {
    let (hits, total) = sunflower_counts(petals, large)?;
    Ok(Rational::new(BigInt::from(hits), BigInt::from(total)))
}

/// Matching and total sunflower counts.
pub(crate) fn sunflower_counts(petals: &[Flag], large: &Flag) -> Result<(u64, u64), AlgebraError> {
    if petals.is_empty() {
        return Err(AlgebraError::NoFlags);
    }
    let s = large.type_order();
    if petals.iter().any(|p| p.flag_type() != large.flag_type()) {
        return Err(GraphError::TypeMismatch.into());
    }
    let sizes: Vec<usize> = petals.iter().map(|p| p.order() - s).collect();
    let needed: usize = sizes.iter().sum();
    let available = large.order() - s;
    if needed > available {
        return Err(AlgebraError::PetalBudget { needed, available });
    }

    // roots first, then the free vertices in ascending order
    let mut order = large.roots().to_vec();
    order.extend(large.free_vertices());
    let g = large.graph().induced(&order);
    let targets: Vec<CanonicalForm> = petals.iter().map(canonical_form).collect();

    let free: Vec<usize> = (s..g.order()).collect();
    let mut hits = 0u64;
    let mut used = vec![false; g.order()];
    count_petals(&g, s, &free, &sizes, &targets, 0, &mut used, &mut hits);
    Ok((hits, sunflower_total(available, &sizes)))
}

/// Number of ordered families of disjoint subsets with the given sizes drawn
/// from `available` elements.
pub(crate) fn sunflower_total(available: usize, sizes: &[usize]) -> u64 {
    let mut left = available as u64;
    let mut total = 1u64;
    for &k in sizes {
        total *= binomial(left, k as u64);
        left -= k as u64;
    }
    total
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[allow(clippy::too_many_arguments)]
fn count_petals(
    g: &Graph,
    s: usize,
    free: &[usize],
    sizes: &[usize],
    targets: &[CanonicalForm],
    petal: usize,
    used: &mut [bool],
    hits: &mut u64,
) {
    if petal == sizes.len() {
        *hits += 1;
        return;
    }
    let available: Vec<usize> = free.iter().copied().filter(|&v| !used[v]).collect();
    let mut chosen = Vec::with_capacity(sizes[petal]);
    for_each_combination(&available, sizes[petal], &mut chosen, &mut |subset| {
        let mut vertices: Vec<usize> = (0..s).collect();
        vertices.extend_from_slice(subset);
        if canonical_form_prefix(&g.induced(&vertices), s) != targets[petal] {
            return;
        }
        for &v in subset {
            used[v] = true;
        }
        count_petals(g, s, free, sizes, targets, petal + 1, used, hits);
        for &v in subset {
            used[v] = false;
        }
    });
}

pub(crate) fn for_each_combination<F: FnMut(&[usize])>(
    items: &[usize],
    k: usize,
    chosen: &mut Vec<usize>,
    f: &mut F,
) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    let need = k - chosen.len();
    if items.len() < need {
        return;
    }
    for i in 0..=items.len() - need {
        chosen.push(items[i]);
        for_each_combination(&items[i + 1..], k, chosen, f);
        chosen.pop();
    }
}

/// Expansion of `small` over the flags of `basis`: the coefficient of each
/// basis flag `F` is `p(small; F)`.
pub fn expand(small: &Flag, basis: &std::sync::Arc<FlagBasis>) -> Result<FlagVector, AlgebraError> {
    if small.flag_type() != basis.flag_type() {
        return Err(GraphError::TypeMismatch.into());
    }
    let coeffs = basis
        .flags()
        .iter()
        .map(|f| density(small, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FlagVector::new(basis.clone(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::TypeGraph;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn point() -> TypeGraph {
        TypeGraph::from_edges(1, &[]).unwrap()
    }

    fn rooted(n: usize, edges: &[(usize, usize)], roots: Vec<usize>, ty: TypeGraph) -> Flag {
        Flag::new(Graph::from_edges(n, edges).unwrap(), roots, ty).unwrap()
    }

    #[test]
    fn density_of_a_flag_in_itself_is_one() {
        let f = rooted(4, &[(0, 1), (1, 2), (2, 3)], vec![1], point());
        assert_eq!(density(&f, &f).unwrap(), r(1, 1));
    }

    #[test]
    fn rooted_edge_in_leaf_rooted_path() {
        let e = rooted(2, &[(0, 1)], vec![0], point());
        let leaf = rooted(3, &[(0, 1), (1, 2)], vec![0], point());
        assert_eq!(density(&e, &leaf).unwrap(), r(1, 2));
    }

    #[test]
    fn errors() {
        let e = rooted(2, &[(0, 1)], vec![0], point());
        let big = rooted(3, &[(0, 1)], vec![0], point());
        assert!(matches!(density(&big, &e), Err(AlgebraError::PetalBudget { .. })));
        assert!(matches!(
            joint_density(&[e.clone(), e.clone(), e.clone()], &big),
            Err(AlgebraError::PetalBudget { .. })
        ));
        let g = Flag::unlabelled(Graph::empty(3).unwrap());
        assert!(matches!(density(&e, &g), Err(AlgebraError::Graph(GraphError::TypeMismatch))));
        assert!(matches!(joint_density(&[], &g), Err(AlgebraError::NoFlags)));
    }

    #[test]
    fn totals() {
        assert_eq!(sunflower_total(4, &[2, 2]), 6);
        assert_eq!(sunflower_total(3, &[1, 2]), 3);
        assert_eq!(sunflower_total(3, &[1, 1]), 6);
        assert_eq!(binomial(7, 4), 35);
    }
}
