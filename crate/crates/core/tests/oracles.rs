//! Exhaustive oracles over GF(5): spans, natural transformations and Kan
//! extension dimensions counted by enumeration.

use std::collections::HashSet;

use herd_core::exactlin::{FieldSpec, Mat};
use herd_core::fourier::{cokan, convolve, restrict};
use herd_core::herdoid::{build_h, hom_bimodule, promonoidal, HCategory};
use herd_core::instances;
use herd_core::lincat::{nat_space, Module, NatTrans};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u64 = 5;

fn gf5() -> FieldSpec {
    FieldSpec::prime(P).unwrap()
}

/// `log_p` of an exact power of `p`.
fn log_p(mut count: u64) -> usize {
    let mut d = 0;
    while count > 1 {
        assert_eq!(count % P, 0);
        count /= P;
        d += 1;
    }
    d
}

/// Every vector of `len` entries in `0..P`.
fn vectors(len: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..P.pow(len as u32)).map(move |mut i| {
        (0..len)
            .map(|_| {
                let d = (i % P) as i64;
                i /= P;
                d
            })
            .collect()
    })
}

fn span_size(rows: &[Vec<i64>]) -> u64 {
    let cols = rows.first().map_or(0, Vec::len);
    let mut seen = HashSet::new();
    for coeffs in vectors(rows.len()) {
        let v: Vec<i64> =
            (0..cols).map(|j| rows.iter().zip(&coeffs).map(|(r, c)| r[j] * c).sum::<i64>().rem_euclid(P as i64)).collect();
        seen.insert(v);
    }
    seen.len() as u64
}

/// Dimension of `Nat(m, n)` by testing every family of components.
fn brute_nat_dim(m: &Module, n: &Module) -> usize {
    let k = m.base.field();
    let shapes: Vec<(usize, usize)> = m.valdim.iter().zip(&n.valdim).map(|(&a, &b)| (b, a)).collect();
    let total: usize = shapes.iter().map(|(r, c)| r * c).sum();
    assert!(total <= 8, "enumeration too large: {total}");
    let count = vectors(total)
        .filter(|v| {
            let mut at = 0;
            let components = shapes
                .iter()
                .map(|&(r, c)| {
                    let m = Mat::from_entries(k, r, c, v[at..at + r * c].iter().map(|&x| k.from_i64(x)).collect()).unwrap();
                    at += r * c;
                    m
                })
                .collect();
            NatTrans { components }.is_natural(m, n)
        })
        .count();
    log_p(count as u64)
}

fn h(name: &str) -> HCategory {
    build_h(&instances::build(name, Some(gf5())).unwrap()).unwrap()
}

#[test]
fn rank_matches_span_enumeration() {
    let k = gf5();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..P as i64)).collect()).collect();
        let m = Mat::from_entries(k, r, c, rows.iter().flatten().map(|&x| k.from_i64(x)).collect()).unwrap();
        assert_eq!(P.pow(m.rank() as u32), span_size(&rows), "{rows:?}");
    }
}

#[test]
fn nat_dims_match_enumeration() {
    for name in ["c2", "g2"] {
        let h = h(name);
        let hc = h.underlying();
        for x in 0..hc.n() {
            for y in 0..hc.n() {
                let (mx, my) = (Module::representable(hc.clone(), x), Module::representable(hc.clone(), y));
                let fast = nat_space(&mx, &my).unwrap().dim;
                assert_eq!(fast, brute_nat_dim(&mx, &my), "{name}: Nat(H({x},-), H({y},-))");
                // Yoneda
                assert_eq!(fast, hc.homdim(y, x));
            }
        }
    }
}

#[test]
fn cokan_dims_by_enumeration() {
    for name in ["c2", "g2"] {
        let h = h(name);
        let hc = h.underlying();
        let j = promonoidal(&h).j;
        for p in [hom_bimodule(&h), restrict(&h, &j)] {
            let ck = cokan(&h, &p);
            for x in 0..hc.n() {
                let rep = restrict(&h, &Module::representable(hc.clone(), x));
                assert_eq!(ck.module.valdim[x], brute_nat_dim(&rep, &p), "{name}: object {x}");
            }
        }
    }
}

#[test]
fn unit_convolution_collapses_on_representables() {
    for name in instances::NAMES {
        let h = h(name);
        let hc = h.underlying();
        let j = promonoidal(&h).j;
        let jj = convolve(&h, &j, &j);
        assert_eq!(jj.module.valdim, j.valdim, "{name}");
        for x in 0..hc.n().min(4) {
            let rep = Module::representable(hc.clone(), x);
            let want: Vec<usize> = (0..hc.n()).map(|y| hc.homdim(x, y)).collect();
            assert_eq!(convolve(&h, &j, &rep).module.valdim, want, "{name}: j*H({x},-)");
            assert_eq!(convolve(&h, &rep, &j).module.valdim, want, "{name}: H({x},-)*j");
        }
    }
}

#[test]
fn unit_dims_by_group_order() {
    for (name, want) in [("point", 1), ("c2", 1), ("c3", 1), ("g2", 2), ("g3", 3), ("c2xg2", 2)] {
        let h = build_h(&instances::build(name, None).unwrap()).unwrap();
        let jj = convolve(&h, &promonoidal(&h).j, &promonoidal(&h).j);
        assert!(jj.module.valdim.iter().all(|&d| d == want), "{name}: {:?}", jj.module.valdim);
    }
}
