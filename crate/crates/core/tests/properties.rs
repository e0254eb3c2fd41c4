use flagcert::{density, enumerate_flags, joint_density, Flag, Graph, Rational, TypeGraph};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn arb_flag(max_n: usize) -> impl Strategy<Value = (usize, Flag)> {
    (2usize..=max_n)
        .prop_flat_map(|n| (Just(n), 0..=2usize.min(n - 1), proptest::collection::vec(any::<bool>(), n * (n - 1) / 2)))
        .prop_map(|(n, s, bits)| {
            let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
            (s, Flag::rooted_prefix(Graph::from_upper_triangle_on(n, &text).unwrap(), s).unwrap())
        })
}

proptest! {
    #[test]
    fn densities_over_a_basis_sum_to_one((s, g) in arb_flag(7), size in 0usize..=7) {
        let size = size.clamp(s, g.order());
        let basis = enumerate_flags(g.flag_type(), size).unwrap();
        let total = basis.flags().iter().map(|f| density(f, &g).unwrap()).fold(Rational::zero(), |a, b| a + b);
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn complement_duality((_, g) in arb_flag(7), size in 0usize..=7) {
        let size = size.clamp(g.type_order(), g.order());
        let basis = enumerate_flags(g.flag_type(), size).unwrap();
        let gc = g.complement();
        for f in basis.flags() {
            prop_assert_eq!(density(f, &g).unwrap(), density(&f.complement(), &gc).unwrap());
        }
    }

    #[test]
    fn relabelling_preserves_density((_, g) in arb_flag(7), seed in any::<u64>()) {
        let s = g.type_order();
        let n = g.order();
        // rotate the free vertices
        let k = if n > s { seed as usize % (n - s) } else { 0 };
        let perm: Vec<usize> = (0..n).map(|v| if v < s { v } else { s + (v - s + k) % (n - s) }).collect();
        let h = g.relabelled(&perm);
        let basis = enumerate_flags(g.flag_type(), (s + 2).min(n)).unwrap();
        for f in basis.flags() {
            prop_assert_eq!(density(f, &g).unwrap(), density(f, &h).unwrap());
        }
    }
}

#[test]
fn joint_density_of_a_partition_sums_to_one() {
    let point = TypeGraph::from_edges(1, &[]).unwrap();
    let small = enumerate_flags(&point, 3).unwrap();
    for g in enumerate_flags(&point, 5).unwrap().flags() {
        let mut total = Rational::zero();
        for a in small.flags() {
            for b in small.flags() {
                total += joint_density(&[a.clone(), b.clone()], g).unwrap();
            }
        }
        assert_eq!(total, Rational::one());
    }
}

#[test]
fn expansion_matches_direct_densities() {
    let edge = TypeGraph::from_edges(2, &[(0, 1)]).unwrap();
    let basis = std::sync::Arc::new(enumerate_flags(&edge, 4).unwrap());
    let small = enumerate_flags(&edge, 3).unwrap();
    for f in small.flags() {
        let v = flagcert::expand(f, &basis).unwrap();
        for (i, c) in v.coeffs().iter().enumerate() {
            assert_eq!(*c, density(f, basis.get(i)).unwrap());
        }
    }
    let other = enumerate_flags(&TypeGraph::from_edges(2, &[]).unwrap(), 3).unwrap();
    assert!(flagcert::expand(other.get(0), &basis).is_err());
}
