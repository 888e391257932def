use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlin::Mat;
use crate::herdoid::{hom_bimodule, kleisli, Antipode, HCategory, PromonoidalData};
use crate::lincat::{nat_space, Module, NatTrans, Violations};

use super::bimod::bimodule_dual;
use super::dual::dual_module;
use super::homs::{hmodule_hom_left, hmodule_hom_right, HModuleHom};
use super::{convolve, restrict};

/// A seeded selection of H-modules: the unit, representables, their duals and
/// a convolution of two representables.
pub fn sample_modules(
    h: &HCategory,
    data: &PromonoidalData,
    s: Option<&Antipode>,
    count: usize,
    seed: u64,
) -> Vec<(String, Module)> {
    let hc = h.underlying();
    let mut pool = vec![("j".to_string(), data.j.clone())];
    for x in 0..hc.n() {
        pool.push((format!("H({},-)", hc.object_name(x)), Module::representable(hc.clone(), x)));
    }
    if let Some(s) = s {
        let duals: Vec<_> = pool.iter().map(|(name, m)| (format!("{name}*"), dual_module(s, m))).collect();
        pool.extend(duals);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, y) = (rng.gen_range(0..hc.n()), rng.gen_range(0..hc.n()));
    let conv = convolve(h, &pool[x + 1].1, &pool[y + 1].1);
    if conv.violations.passed() {
        pool.push((format!("{}*{}", pool[x + 1].0, pool[y + 1].0), conv.module));
    }
    let mut picked: Vec<_> = pool.choose_multiple(&mut rng, count.min(pool.len())).cloned().collect();
    picked.sort_by_key(|(name, _)| pool.iter().position(|(n, _)| n == name));
    picked
}

/// Bimodules to exercise: the unit, restrictions of `modules` and one dual.
pub fn sample_bimodules(h: &HCategory, modules: &[(String, Module)]) -> Vec<(String, Module)> {
    let mut out = vec![("A".to_string(), hom_bimodule(h))];
    for (name, m) in modules {
        out.push((format!("K*{name}"), restrict(h, m)));
    }
    if let Some((name, m)) = modules.first() {
        out.push((format!("(K*{name})*"), bimodule_dual(h, &restrict(h, m))));
    }
    out
}

/// Restriction reflects isomorphisms: sampled maps `alpha: M -> N` are
/// invertible exactly when their restrictions are.
pub fn conservativity_check(h: &HCategory, m: &Module, n: &Module, seed: u64) -> Violations {
    let mut out = Violations::default();
    let kl = kleisli(h);
    if !kl.is_surjective_on_objects() {
        out.push("conservativity.surjective", "K");
    }
    let Ok(space) = nat_space(m, n) else {
        out.push("conservativity.base", "H");
        return out;
    };
    let k = h.base().field();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = vec![NatTrans::zero(m, n)];
    if m == n {
        samples.push(NatTrans::identity(m));
    }
    for _ in 0..3 {
        let coeffs: Vec<_> = space.basis.iter().map(|b| (k.from_i64(rng.gen_range(-3..=3)), b)).collect();
        samples.push(NatTrans::combine(&coeffs, m, n));
    }
    let (rm, rn) = (restrict(h, m), restrict(h, n));
    for (i, alpha) in samples.iter().enumerate() {
        let res = NatTrans { components: kl.objmap.iter().map(|&x| alpha.components[x].clone()).collect() };
        if !res.is_natural(&rm, &rn) {
            out.push("conservativity.restriction_natural", format!("sample {i}"));
        }
        if alpha.is_invertible() != res.is_invertible() {
            out.push("conservativity.reflects_iso", format!("sample {i}"));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct StarAutonomy {
    /// The dualizing module `j*`.
    pub dualizing: Module,
    pub violations: Violations,
}

/// Cyclicity of the promonoidal dimensions; for each sampled module,
/// `M* ~ hom_r(M, d)` and `M ~ hom_l(hom_r(M, d), d)` with `d = j*`.
pub fn star_autonomy_checks(h: &HCategory, s: &Antipode, data: &PromonoidalData, modules: &[(String, Module)]) -> StarAutonomy {
    let a = h.base();
    let f = h.flock();
    let n = a.n();
    let k = a.field();
    let mut violations = Violations::default();
    for t in 0..data.p.num_tuples() {
        let [x, b, c, d, u, v] = data.p.tuple_of(t)[..] else { unreachable!() };
        let lhs = a.homdim(f.tau(d, c, b), v) * a.homdim(u, x);
        let rhs = a.homdim(f.tau(u, v, d), x) * a.homdim(b, c);
        if lhs != rhs {
            violations.push("star.cyclic", a.witness(&[x, b, c, d, u, v]));
        }
    }
    let dualizing = dual_module(s, &data.j);
    for (name, m) in modules {
        let rm = restrict(h, m);
        let hr = hmodule_hom_right(h, m, &dualizing);
        violations.extend(hr.violations.clone().prefixed(name));
        let mut components = Vec::with_capacity(n * n);
        let mut ok = hr.violations.passed();
        for p in 0..n * n {
            let (u, y) = h.unpair(p);
            let part = hr.end.part(&hr.rest(u, y));
            let dm = rm.valdim[h.pair(y, u)];
            let blocks: Vec<Mat> = (0..n)
                .map(|v| {
                    let (da, dv) = (a.homdim(v, u), rm.valdim[h.pair(y, v)]);
                    let mut e = Mat::zeros(k, da * dv, dm);
                    for kk in 0..da {
                        let act = rm.action(h.pair(y, v), h.pair(y, u), &a.ident(y).kron(&a.basis(v, u, kk)));
                        for i in 0..dm {
                            for i2 in 0..dv {
                                e.set(kk + da * i2, i, act.get(i, i2).clone());
                            }
                        }
                    }
                    e
                })
                .collect();
            let stacked = Mat::vstack(k, dm, &blocks);
            if !part.constraints.mul(&stacked).is_zero() {
                violations.push(format!("{name}.star.evaluation_well_defined"), a.witness(&[u, y]));
                ok = false;
            }
            let c = part.retract.mul(&stacked);
            if !c.is_invertible() {
                violations.push(format!("{name}.star.evaluation_invertible"), a.witness(&[u, y]));
                ok = false;
            }
            components.push(c);
        }
        if ok && !(NatTrans { components }).is_natural(&dual_module(s, m), &hr.module) {
            violations.push(format!("{name}.star.evaluation_natural"), "H");
        }
        if ok {
            violations.extend(double_dual_against(h, m, &hr, &dualizing).prefixed(name));
        }
    }
    StarAutonomy { dualizing, violations }
}

/// `m |-> (F |-> F_y(m))` from `M(u,y)` into `hom_l(hom_r(M, d), d)(u,y)`.
fn double_dual_against(h: &HCategory, m: &Module, hr: &HModuleHom, d: &Module) -> Violations {
    let a = h.base();
    let n = a.n();
    let k = a.field();
    let mut out = Violations::default();
    let hl = hmodule_hom_left(h, &hr.module, d);
    out.extend(hl.violations.clone());
    if !out.passed() {
        return out;
    }
    let mut components = Vec::with_capacity(n * n);
    for p in 0..n * n {
        let (u, y) = h.unpair(p);
        let dm = m.valdim[p];
        let blocks: Vec<Mat> = (0..n)
            .map(|c| {
                let (dh, dd) = (hr.module.valdim[h.pair(c, u)], d.valdim[h.pair(c, y)]);
                let vecs = hr.end.component(&hr.rest(c, u), y, &Mat::identity(k, dh));
                let mut e = Mat::zeros(k, dd * dh, dm);
                for r in 0..dh {
                    for i in 0..dm {
                        for q in 0..dd {
                            e.set(q + dd * r, i, vecs.get(q + dd * i, r).clone());
                        }
                    }
                }
                e
            })
            .collect();
        let stacked = Mat::vstack(k, dm, &blocks);
        let part = hl.end.part(&hl.rest(u, y));
        if !part.constraints.mul(&stacked).is_zero() {
            out.push("star.double_dual_well_defined", a.witness(&[u, y]));
            return out;
        }
        let c = part.retract.mul(&stacked);
        if !c.is_invertible() {
            out.push("star.double_dual_invertible", a.witness(&[u, y]));
        }
        components.push(c);
    }
    if out.passed() && !(NatTrans { components }).is_natural(m, &hl.module) {
        out.push("star.double_dual_natural", "H");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::flock::*;
    use crate::herdoid::*;

    fn g3() -> HCategory {
        let f =
            flock_abelian_group_algebra(&GroupTable::cyclic(3), FieldSpec::prime(7).unwrap(), GroupTransport::Product).unwrap();
        build_h(&f).unwrap()
    }

    #[test]
    fn star_autonomy_holds_for_group_algebra() {
        let h = g3();
        let s = antipode(&h).unwrap();
        let data = promonoidal(&h);
        let ms = sample_modules(&h, &data, Some(&s), 4, 1);
        assert!(star_autonomy_checks(&h, &s, &data, &ms).violations.passed());
    }

    #[test]
    fn rescaled_antipode_breaks_evaluation() {
        let f = flock_codiscrete(&HeapTable::affine_cyclic(2), FieldSpec::prime(5).unwrap()).unwrap();
        let h = build_h(&f).unwrap();
        let s = antipode(&h).unwrap();
        let k = h.base().field();
        let n = h.underlying().n();
        let mut functor = s.functor.clone();
        for p in 0..n {
            for q in 0..n {
                let c = &k.from_i64(p as i64 + 1) * &k.from_i64(q as i64 + 1).inv().unwrap();
                functor.hommap[p * n + q] = functor.hommap[p * n + q].scale(&c);
            }
        }
        assert!(functor.check().passed());
        let s = Antipode { functor, involutive: true };
        let data = promonoidal(&h);
        let rep = vec![("rep".to_string(), Module::representable(h.underlying().clone(), 1))];
        let v = star_autonomy_checks(&h, &s, &data, &rep).violations;
        assert!(v.failures.iter().any(|f| f.law.starts_with("rep.star.evaluation")), "{v}");
    }

    #[test]
    fn conservativity_on_codiscrete() {
        let f = flock_codiscrete(&HeapTable::affine_cyclic(2), FieldSpec::prime(5).unwrap()).unwrap();
        let h = build_h(&f).unwrap();
        let m = Module::representable(h.underlying().clone(), 1);
        assert!(conservativity_check(&h, &m, &m, 9).passed());
    }

    #[test]
    fn samples_are_seeded() {
        let h = g3();
        let s = antipode(&h).unwrap();
        let data = promonoidal(&h);
        let a: Vec<_> = sample_modules(&h, &data, Some(&s), 2, 5).into_iter().map(|x| x.0).collect();
        let b: Vec<_> = sample_modules(&h, &data, Some(&s), 2, 5).into_iter().map(|x| x.0).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
    }
}
