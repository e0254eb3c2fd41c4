//! Product tables, the averaging operator and the objective vector.
//!
//! All coefficients share a denominator fixed by the flag sizes, so tables
//! store integer numerators and expose exact [`Rational`] values on demand.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::density::{binomial, for_each_combination};
use crate::enumerate::{enumerate_flags, FlagBasis};
use crate::error::{AlgebraError, GraphError};
use crate::graph::{Graph, TypeGraph};
use crate::matrix::Matrix;
use crate::Rational;

/// Formal sum of the flags of a basis with rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagVector {
    basis: Arc<FlagBasis>,
    coeffs: Vec<Rational>,
}

impl FlagVector {
    pub fn new(basis: Arc<FlagBasis>, coeffs: Vec<Rational>) -> Self {
        assert_eq!(basis.len(), coeffs.len(), "one coefficient per basis flag");
        FlagVector { basis, coeffs }
    }

    pub fn basis(&self) -> &Arc<FlagBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }
}

/// Coefficients `p(F_a, F_b; F_j)` of the product of two `l1`-vertex σ-flags
/// over the `l2 = 2*l1 - s` vertex σ-flags.
#[derive(Debug, Clone)]
pub struct ProductTable {
    small: Arc<FlagBasis>,
    large: Arc<FlagBasis>,
    denominator: u64,
    /// Per target flag `j`: `(a, b, numerator)`, sorted by `(a, b)`.
    rows: Vec<Vec<(u32, u32, u32)>>,
}

impl ProductTable {
    /// Builds the table for `ty` and `l1`, enumerating both bases.
    pub fn new(ty: &TypeGraph, l1: usize) -> Result<Self, AlgebraError> {
        let s = ty.order();
        if l1 <= s {
            return Err(AlgebraError::SizeTooSmall {
                size: l1,
                type_order: s + 1,
            });
        }
        let small = Arc::new(enumerate_flags(ty, l1)?);
        let large = Arc::new(enumerate_flags(ty, 2 * l1 - s)?);
        Ok(Self::from_bases(small, large))
    }

    /// `large` must be the basis of size `2 * small.size() - s` of the same type.
    pub fn from_bases(small: Arc<FlagBasis>, large: Arc<FlagBasis>) -> Self {
        let s = small.flag_type().order();
        let k = small.size() - s;
        assert_eq!(large.size(), 2 * small.size() - s);
        assert_eq!(small.flag_type(), large.flag_type());
        let free: Vec<usize> = (s..large.size()).collect();
        let roots: Vec<usize> = (0..s).collect();
        let rows = large
            .flags()
            .par_iter()
            .map(|f| {
                let g = f.graph();
                let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
                let mut chosen = Vec::with_capacity(k);
                for_each_combination(&free, k, &mut chosen, &mut |first| {
                    let second: Vec<usize> = free.iter().copied().filter(|v| !first.contains(v)).collect();
                    let a = petal_index(g, &roots, first, &small);
                    let b = petal_index(g, &roots, &second, &small);
                    *counts.entry((a, b)).or_default() += 1;
                });
                counts.into_iter().map(|((a, b), c)| (a, b, c)).collect()
            })
            .collect();
        ProductTable {
            denominator: binomial(2 * k as u64, k as u64),
            small,
            large,
            rows,
        }
    }

    pub fn flag_type(&self) -> &TypeGraph {
        self.small.flag_type()
    }

    pub fn small_basis(&self) -> &Arc<FlagBasis> {
        &self.small
    }

    pub fn large_basis(&self) -> &Arc<FlagBasis> {
        &self.large
    }

    /// Common denominator `C(l2 - s, l1 - s)` of all entries.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Nonzero numerators for target `j`, as `(a, b, numerator)`.
    pub fn row(&self, j: usize) -> &[(u32, u32, u32)] {
        &self.rows[j]
    }

    pub fn entry(&self, j: usize, a: usize, b: usize) -> Rational {
        let num = self.rows[j]
            .binary_search_by_key(&(a as u32, b as u32), |&(x, y, _)| (x, y))
            .map_or(0, |i| self.rows[j][i].2);
        Rational::new(BigInt::from(num), BigInt::from(self.denominator))
    }

    /// All nonzero entries in `j`-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, Rational)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(j, row)| {
            row.iter().map(move |&(a, b, c)| {
                (
                    j,
                    a as usize,
                    b as usize,
                    Rational::new(BigInt::from(c), BigInt::from(self.denominator)),
                )
            })
        })
    }
}

fn petal_index(g: &Graph, roots: &[usize], petal: &[usize], basis: &FlagBasis) -> u32 {
    let mut vertices = roots.to_vec();
    vertices.extend_from_slice(petal);
    basis
        .index_of_prefix(&g.induced(&vertices))
        .expect("every petal is a basis flag") as u32
}

/// The unlabelling weights `q_σ(F)` for the σ-flags of one size, together with
/// the underlying graph of each flag.
#[derive(Debug, Clone)]
pub struct AveragingMap {
    flags: Arc<FlagBasis>,
    zero: Arc<FlagBasis>,
    denominator: u64,
    /// Per σ-flag: `(0-flag index, numerator)`.
    rows: Vec<(usize, u32)>,
}

impl AveragingMap {
    pub fn new(ty: &TypeGraph, size: usize) -> Result<Self, AlgebraError> {
        let flags = Arc::new(enumerate_flags(ty, size)?);
        let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), size)?);
        Self::from_bases(flags, zero)
    }

    /// `q_σ(F)` counts the injections `ψ` of the type's vertices whose image
    /// induces σ with its labels and for which `(G, ψ)` is isomorphic to `F`,
    /// out of all `n (n-1) … (n-s+1)` injections.
    pub fn from_bases(flags: Arc<FlagBasis>, zero: Arc<FlagBasis>) -> Result<Self, AlgebraError> {
        let ty = *flags.flag_type();
        let s = ty.order();
        if s == 0 {
            return Err(AlgebraError::ZeroOrderType);
        }
        if zero.flag_type().order() != 0 || zero.size() != flags.size() {
            return Err(AlgebraError::BasisMismatch {
                expected: flags.size(),
                found: zero.size(),
            });
        }
        let n = flags.size();
        let hits: Vec<Vec<(usize, u32)>> = zero
            .flags()
            .par_iter()
            .map(|zf| {
                let g = zf.graph();
                let mut counts: BTreeMap<usize, u32> = BTreeMap::new();
                let mut placement = Vec::with_capacity(n);
                for_each_injection(n, s, &mut placement, &mut |psi| {
                    let matches = (0..s).all(|i| (i + 1..s).all(|j| g.has_edge(psi[i], psi[j]) == ty.graph().has_edge(i, j)));
                    if !matches {
                        return;
                    }
                    let mut order = psi.to_vec();
                    order.extend((0..n).filter(|v| !psi.contains(v)));
                    let j = flags
                        .index_of_prefix(&g.induced(&order))
                        .expect("every rooted copy is a basis flag");
                    *counts.entry(j).or_default() += 1;
                });
                counts.into_iter().collect()
            })
            .collect();
        let mut rows = vec![(usize::MAX, 0); flags.len()];
        for (k, list) in hits.into_iter().enumerate() {
            for (j, c) in list {
                debug_assert_eq!(rows[j].0, usize::MAX, "a flag has one underlying graph");
                rows[j] = (k, c);
            }
        }
        debug_assert!(rows.iter().all(|&(k, c)| k != usize::MAX && c > 0));
        Ok(AveragingMap {
            denominator: falling_factorial(n as u64, s as u64),
            flags,
            zero,
            rows,
        })
    }

    pub fn flag_basis(&self) -> &Arc<FlagBasis> {
        &self.flags
    }

    pub fn zero_basis(&self) -> &Arc<FlagBasis> {
        &self.zero
    }

    /// Number of injections, `n (n-1) … (n-s+1)`.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// `(0-flag index, numerator)` for σ-flag `j`.
    pub fn row(&self, j: usize) -> (usize, u32) {
        self.rows[j]
    }

    pub fn q(&self, j: usize) -> Rational {
        Rational::new(BigInt::from(self.rows[j].1), BigInt::from(self.denominator))
    }

    pub fn zero_index(&self, j: usize) -> usize {
        self.rows[j].0
    }
}

fn falling_factorial(n: u64, k: u64) -> u64 {
    (0..k).map(|i| n - i).product()
}

fn for_each_injection<F: FnMut(&[usize])>(n: usize, s: usize, placed: &mut Vec<usize>, f: &mut F) {
    if placed.len() == s {
        f(placed);
        return;
    }
    for v in 0..n {
        if !placed.contains(&v) {
            placed.push(v);
            for_each_injection(n, s, placed, f);
            placed.pop();
        }
    }
}

/// Coefficients of the 0-flags in `[[F_a · F_b]]_σ`: the product table pushed
/// through the averaging map. One row per 0-flag of size `l2`.
#[derive(Debug, Clone)]
pub struct AveragedTable {
    small: Arc<FlagBasis>,
    zero: Arc<FlagBasis>,
    denominator: u64,
    /// Per 0-flag `k`: `(a, b, numerator)`, sorted by `(a, b)`.
    rows: Vec<Vec<(u32, u32, u64)>>,
}

impl AveragedTable {
    pub fn new(table: &ProductTable, avg: &AveragingMap) -> Result<Self, AlgebraError> {
        if avg.flag_basis().as_ref() != table.large_basis().as_ref() {
            return Err(AlgebraError::BasisMismatch {
                expected: table.large_basis().len(),
                found: avg.flag_basis().len(),
            });
        }
        let mut acc: Vec<BTreeMap<(u32, u32), u64>> = vec![BTreeMap::new(); avg.zero_basis().len()];
        for j in 0..table.large_basis().len() {
            let (k, q) = avg.row(j);
            for &(a, b, p) in table.row(j) {
                *acc[k].entry((a, b)).or_default() += u64::from(q) * u64::from(p);
            }
        }
        Ok(AveragedTable {
            small: table.small_basis().clone(),
            zero: avg.zero_basis().clone(),
            denominator: table.denominator() * avg.denominator(),
            rows: acc
                .into_iter()
                .map(|m| m.into_iter().map(|((a, b), c)| (a, b, c)).collect())
                .collect(),
        })
    }

    pub fn small_basis(&self) -> &Arc<FlagBasis> {
        &self.small
    }

    pub fn zero_basis(&self) -> &Arc<FlagBasis> {
        &self.zero
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn row(&self, k: usize) -> &[(u32, u32, u64)] {
        &self.rows[k]
    }

    pub fn entry(&self, k: usize, a: usize, b: usize) -> Rational {
        let num = self.rows[k]
            .binary_search_by_key(&(a as u32, b as u32), |&(x, y, _)| (x, y))
            .map_or(0, |i| self.rows[k][i].2);
        Rational::new(BigInt::from(num), BigInt::from(self.denominator))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, Rational)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(k, row)| {
            row.iter().map(move |&(a, b, c)| {
                (
                    k,
                    a as usize,
                    b as usize,
                    Rational::new(BigInt::from(c), BigInt::from(self.denominator)),
                )
            })
        })
    }

    /// `<A_k, M>` for every 0-flag `k`.
    pub fn apply(&self, m: &Matrix<Rational>) -> Result<Vec<Rational>, AlgebraError> {
        if m.dim() != self.small.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.small.len(),
                found: m.dim(),
            });
        }
        let den = Rational::from_integer(BigInt::from(self.denominator));
        Ok(self
            .rows
            .par_iter()
            .map(|row| {
                let mut sum = Rational::zero();
                for &(a, b, c) in row {
                    let x = &m[(a as usize, b as usize)];
                    if !x.is_zero() {
                        sum += x * BigInt::from(c);
                    }
                }
                sum / &den
            })
            .collect())
    }
}

/// Coefficients of `[[x^T M x]]_σ` on the 0-flags of size `l2`, where `x` is
/// the vector of `l1`-vertex σ-flags.
pub fn quadratic_form_image(
    table: &ProductTable,
    avg: &AveragingMap,
    m: &Matrix<Rational>,
    zero_basis: &Arc<FlagBasis>,
) -> Result<FlagVector, AlgebraError> {
    if avg.zero_basis().as_ref() != zero_basis.as_ref() {
        return Err(AlgebraError::BasisMismatch {
            expected: zero_basis.len(),
            found: avg.zero_basis().len(),
        });
    }
    let coeffs = AveragedTable::new(table, avg)?.apply(m)?;
    Ok(FlagVector::new(zero_basis.clone(), coeffs))
}

/// `w_k = p(K_t; F_k) + p(complement of K_t; F_k)` over a basis of graphs.
pub fn objective_vector(t: usize, zero_basis: &Arc<FlagBasis>) -> Result<FlagVector, AlgebraError> {
    if zero_basis.flag_type().order() != 0 {
        return Err(GraphError::TypeMismatch.into());
    }
    let n = zero_basis.size();
    if n < t {
        return Err(AlgebraError::SizeTooSmall { size: n, type_order: t });
    }
    let total = BigInt::from(binomial(n as u64, t as u64));
    let vertices: Vec<usize> = (0..n).collect();
    let coeffs = zero_basis
        .flags()
        .iter()
        .map(|f| {
            let g = f.graph();
            let mut hits = 0u64;
            let mut chosen = Vec::with_capacity(t);
            for_each_combination(&vertices, t, &mut chosen, &mut |sub| {
                if g.is_clique(sub) || g.is_independent(sub) {
                    hits += 1;
                }
            });
            Rational::new(BigInt::from(hits), total.clone())
        })
        .collect();
    Ok(FlagVector::new(zero_basis.clone(), coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density, joint_density};
    use crate::graph::Flag;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn point() -> TypeGraph {
        TypeGraph::from_edges(1, &[]).unwrap()
    }

    #[test]
    fn product_table_matches_joint_density() {
        for ty in crate::enumerate::enumerate_types(1).unwrap() {
            let table = ProductTable::new(&ty, 3).unwrap();
            let small = table.small_basis().clone();
            for (j, f) in table.large_basis().flags().iter().enumerate() {
                for a in 0..small.len() {
                    for b in 0..small.len() {
                        let expected = joint_density(&[small.get(a).clone(), small.get(b).clone()], f).unwrap();
                        assert_eq!(table.entry(j, a, b), expected);
                        assert_eq!(table.entry(j, a, b), table.entry(j, b, a));
                    }
                }
            }
        }
    }

    #[test]
    fn product_rows_sum_to_one() {
        // every sunflower of the target extends to exactly one (a, b) pair
        let sigma = TypeGraph::from_edges(2, &[(0, 1)]).unwrap();
        let table = ProductTable::new(&sigma, 3).unwrap();
        for j in 0..table.large_basis().len() {
            let sum: u32 = table.row(j).iter().map(|&(_, _, c)| c).sum();
            assert_eq!(u64::from(sum), table.denominator());
        }
    }

    #[test]
    fn q_of_rooted_edge_and_leaf_path() {
        let avg = AveragingMap::new(&point(), 2).unwrap();
        for j in 0..avg.flag_basis().len() {
            assert_eq!(avg.q(j), r(1, 1));
        }
        let avg = AveragingMap::new(&point(), 3).unwrap();
        let leaf = Flag::new(Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(), vec![0], point()).unwrap();
        let j = avg.flag_basis().index_of(&leaf).unwrap();
        assert_eq!(avg.q(j), r(2, 3));
        assert_eq!(avg.zero_basis().get(avg.zero_index(j)).graph().edge_count(), 2);
    }

    #[test]
    fn q_sums_to_one_per_graph_when_all_types_are_used() {
        // summing q over every s-type flag of a graph counts every injection once
        let types = crate::enumerate::enumerate_types(2).unwrap();
        let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), 4).unwrap());
        let mut totals = vec![Rational::zero(); zero.len()];
        for ty in &types {
            let avg = AveragingMap::from_bases(Arc::new(enumerate_flags(ty, 4).unwrap()), zero.clone()).unwrap();
            for j in 0..avg.flag_basis().len() {
                totals[avg.zero_index(j)] += avg.q(j);
            }
        }
        // types are labelled, and each unlabelled 2-type has one labelling
        // here, so every injection is counted exactly once
        assert!(totals.iter().all(|t| *t == r(1, 1)));
    }

    #[test]
    fn zero_order_type_is_rejected() {
        assert!(matches!(
            AveragingMap::new(&TypeGraph::empty_type(), 3),
            Err(AlgebraError::ZeroOrderType)
        ));
    }

    #[test]
    fn objective_for_triangles_on_three_vertices() {
        let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), 3).unwrap());
        let w = objective_vector(3, &zero).unwrap();
        // basis order: empty, one edge, path, triangle
        let edges: Vec<usize> = zero.flags().iter().map(|f| f.graph().edge_count()).collect();
        assert_eq!(edges, vec![0, 1, 2, 3]);
        assert_eq!(w.coeffs(), &[r(1, 1), r(0, 1), r(0, 1), r(1, 1)]);
        assert!(objective_vector(4, &zero).is_err());
    }

    #[test]
    fn objective_agrees_with_density() {
        let zero = Arc::new(enumerate_flags(&TypeGraph::empty_type(), 6).unwrap());
        let w = objective_vector(4, &zero).unwrap();
        let k4 = Flag::unlabelled(Graph::complete(4).unwrap());
        let e4 = Flag::unlabelled(Graph::empty(4).unwrap());
        for (f, wk) in zero.flags().iter().zip(w.coeffs()) {
            assert_eq!(*wk, density(&k4, f).unwrap() + density(&e4, f).unwrap());
        }
    }

    #[test]
    fn quadratic_form_of_zero_and_unit_matrices() {
        let table = ProductTable::new(&point(), 2).unwrap();
        let avg = AveragingMap::from_bases(
            table.large_basis().clone(),
            Arc::new(enumerate_flags(&TypeGraph::empty_type(), 3).unwrap()),
        )
        .unwrap();
        let zero_basis = avg.zero_basis().clone();
        let v = quadratic_form_image(&table, &avg, &Matrix::zeros(2), &zero_basis).unwrap();
        assert!(v.coeffs().iter().all(Zero::is_zero));

        for a in 0..2 {
            let mut m = Matrix::zeros(2);
            m[(a, a)] = r(1, 1);
            let v = quadratic_form_image(&table, &avg, &m, &zero_basis).unwrap();
            let mut expected = vec![Rational::zero(); zero_basis.len()];
            for j in 0..table.large_basis().len() {
                expected[avg.zero_index(j)] += avg.q(j) * table.entry(j, a, a);
            }
            assert_eq!(v.coeffs(), expected.as_slice());
        }
        assert!(matches!(
            quadratic_form_image(&table, &avg, &Matrix::zeros(3), &zero_basis),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }
}
