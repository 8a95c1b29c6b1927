//! Property tests over randomly drawn spaces, masks and population vectors.

use num_complex::Complex64;
use proptest::prelude::*;

use evodyn::flows::{problem, tangent_projector};
use evodyn::group::{Permutation, PermutationGroup};
use evodyn::mixing::{CrossoverKind, CrossoverSpec, FitnessPipeline, Heuristic, Kernel, MutationSpec, PopulationVector};
use evodyn::ring::GenomeSpace;
use evodyn::spectral::{group_dft, inverse_group_dft};

fn space() -> impl Strategy<Value = GenomeSpace> {
    prop_oneof![(2u32..=2, 1u32..=6), (3u32..=3, 1u32..=4), (4u32..=5, 1u32..=3)]
        .prop_map(|(d, l)| GenomeSpace::new(d, l).unwrap())
}

fn space_with_triple() -> impl Strategy<Value = (GenomeSpace, usize, usize, usize)> {
    space().prop_flat_map(|s| {
        let n = s.n();
        (Just(s), 0..n, 0..n, 0..n)
    })
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1.0, n).prop_filter("nonzero", |w| w.iter().sum::<f64>() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_operations_satisfy_axioms((s, u, v, w) in space_with_triple()) {
        prop_assert_eq!(s.add_raw(u, v), s.add_raw(v, u));
        prop_assert_eq!(s.mul_raw(u, v), s.mul_raw(v, u));
        prop_assert_eq!(s.add_raw(s.add_raw(u, v), w), s.add_raw(u, s.add_raw(v, w)));
        prop_assert_eq!(s.mul_raw(s.mul_raw(u, v), w), s.mul_raw(u, s.mul_raw(v, w)));
        prop_assert_eq!(s.mul_raw(u, s.add_raw(v, w)), s.add_raw(s.mul_raw(u, v), s.mul_raw(u, w)));
        prop_assert_eq!(s.sub_raw(s.add_raw(u, v), v), u);
        prop_assert_eq!(s.add_raw(u, s.neg_raw(u)), 0);
        prop_assert_eq!(s.mul_raw(u, s.all_ones_raw()), u);
        prop_assert_eq!(s.hamming_raw(u, v), s.nonzero_count_raw(s.sub_raw(u, v)));
    }

    #[test]
    fn digits_round_trip((s, u, _, _) in space_with_triple()) {
        let digits = s.digits_raw(u);
        prop_assert_eq!(digits.len(), s.l() as usize);
        prop_assert!(digits.iter().all(|&x| x < s.d()));
        prop_assert_eq!(s.from_digits_raw(&digits), u);
    }

    #[test]
    fn binary_decomposition_recomposes(l in 1u32..=6, mask in any::<u32>(), i in any::<u32>()) {
        let s = GenomeSpace::new(2, l).unwrap();
        let m = s.genome(mask as usize % s.n()).unwrap();
        let i = s.genome(i as usize % s.n()).unwrap();
        let (u, v) = m.binary_decompose(&i).unwrap();
        prop_assert_eq!(u.add(&v).unwrap(), i);
        prop_assert_eq!(u.mul(&m).unwrap(), u);
        prop_assert_eq!(v.mul(&m).unwrap().value(), 0);
    }

    #[test]
    fn orbit_stabilizer_holds_for_rotations(s in space(), z in any::<u32>()) {
        let g = PermutationGroup::close(s.n(), vec![Permutation::rotation(&s)]).unwrap();
        let z = z as usize % s.n();
        prop_assert_eq!(g.orbit_of(z).len() * g.stabilizer_of(z).order(), g.order());
        let part = g.orbit_partition();
        prop_assert_eq!(part.classes().iter().map(Vec::len).sum::<usize>(), s.n());
    }

    #[test]
    fn generation_stays_on_simplex(l in 1u32..=4, q in 0.0f64..0.5, seed in weights(16)) {
        let s = GenomeSpace::new(2, l).unwrap();
        let kernel = Kernel::new(s, CrossoverSpec::preset(&s, CrossoverKind::Uniform), MutationSpec::new(q).unwrap());
        let h = Heuristic::new(&FitnessPipeline::onemax(), kernel).unwrap();
        let p = PopulationVector::normalized(seed[..s.n()].to_vec());
        prop_assume!(p.is_ok());
        let next = h.generation(&p.unwrap()).unwrap();
        let total: f64 = next.as_slice().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert!(next.as_slice().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn tangent_projector_is_idempotent(x in proptest::collection::vec(-2.0f64..2.0, 3)) {
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-2);
        let con = problem::sphere(3, 1.0).unwrap();
        let p = tangent_projector(&con, &x);
        let pp = &p * &p;
        prop_assert!((&pp - &p).amax() < 1e-10);
        prop_assert!((&p - p.transpose()).amax() < 1e-12);
        prop_assert!((p.trace() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn group_dft_round_trips(s in space(), re in proptest::collection::vec(-1.0f64..1.0, 64)) {
        let x: Vec<Complex64> = (0..s.n()).map(|i| Complex64::new(re[i % re.len()], re[(i * 7 + 3) % re.len()])).collect();
        let back = inverse_group_dft(&s, &group_dft(&s, &x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }
}
