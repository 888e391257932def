use herd_core::exactlin::{FieldSpec, Mat};
use herd_core::flock::{check_flock, flock_codiscrete, HeapTable};
use herd_core::format::{emit_flock, parse_flock};
use herd_core::fourier::restrict;
use herd_core::herdoid::build_h;
use herd_core::instances;
use herd_core::lincat::{nat_space, Module, NatTrans};
use herd_core::verify::{run_suite, SuiteOptions};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::prime(2).unwrap()),
        Just(FieldSpec::prime(5).unwrap()),
        Just(FieldSpec::prime(7).unwrap()),
        Just(FieldSpec::rationals()),
    ]
}

fn mat(k: FieldSpec, r: usize, c: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-4i64..5, r * c)
        .prop_map(move |v| Mat::from_entries(k, r, c, v.into_iter().map(|x| k.from_i64(x)).collect()).unwrap())
}

/// Matrices of shapes `a x b`, `b x c`, `c x d`.
fn chain(k: FieldSpec) -> impl Strategy<Value = (Mat, Mat, Mat)> {
    (1usize..4, 1usize..4, 1usize..4, 1usize..4).prop_flat_map(move |(a, b, c, d)| (mat(k, a, b), mat(k, b, c), mat(k, c, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative((a, b, c) in field().prop_flat_map(chain)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn kron_mixed_product(((a, b, _), (d, e, _)) in field().prop_flat_map(|k| (chain(k), chain(k)))) {
        prop_assert_eq!(a.kron(&d).mul(&b.kron(&e)), a.mul(&b).kron(&d.mul(&e)));
        prop_assert_eq!(b.kron(&e).transpose(), b.transpose().kron(&e.transpose()));
    }

    #[test]
    fn rank_and_inverse((k, n) in (field(), 1usize..5), seed in any::<u64>()) {
        let entries: Vec<_> = (0..n * n).map(|i| k.from_i64(((seed >> (i % 60)) & 7) as i64 - 3)).collect();
        let m = Mat::from_entries(k, n, n, entries).unwrap();
        prop_assert_eq!(m.rank(), m.transpose().rank());
        match m.inverse() {
            Some(inv) => {
                prop_assert_eq!(m.rank(), n);
                prop_assert!(m.mul(&inv).is_identity() && inv.mul(&m).is_identity());
            }
            None => prop_assert!(m.rank() < n),
        }
    }

    #[test]
    fn affine_heaps_are_flocks(n in 1usize..8) {
        let heap = HeapTable::affine_cyclic(n);
        prop_assert!(heap.violations().passed());
        prop_assume!(n <= 3);
        let f = flock_codiscrete(&heap, FieldSpec::prime(5).unwrap()).unwrap();
        prop_assert!(check_flock(&f).passed());
    }

    #[test]
    fn emit_parse_is_identity(i in 0usize..instances::NAMES.len(), k in field()) {
        let name = instances::NAMES[i];
        if let Ok(f) = instances::build(name, Some(k)) {
            let text = emit_flock(&f);
            let back = parse_flock(&text).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(emit_flock(&back), text);
        }
    }

    #[test]
    fn combinations_of_nat_basis_are_natural(x in 0usize..4, y in 0usize..4, coeffs in prop::collection::vec(-3i64..4, 8)) {
        let h = build_h(&instances::build("c2", None).unwrap()).unwrap();
        let hc = h.underlying();
        let k = hc.field();
        let (m, n) = (Module::representable(hc.clone(), x), Module::representable(hc.clone(), y));
        let space = nat_space(&m, &n).unwrap();
        let terms: Vec<_> = space.basis.iter().zip(&coeffs).map(|(b, &c)| (k.from_i64(c), b)).collect();
        let alpha = NatTrans::combine(&terms, &m, &n);
        prop_assert!(alpha.is_natural(&m, &n));
        let res = NatTrans { components: alpha.components.clone() };
        prop_assert!(res.is_natural(&restrict(&h, &m), &restrict(&h, &n)));
    }

    #[test]
    fn suite_is_deterministic(seed in any::<u64>(), samples in 1usize..4) {
        let f = instances::build("g2", None).unwrap();
        let opts = SuiteOptions { seed, samples, ..SuiteOptions::default() };
        let a = run_suite("g2", &f, &opts);
        prop_assert!(a.passed(), "{}", a);
        prop_assert_eq!(a.to_json(), run_suite("g2", &f, &opts).to_json());
    }
}
