use crate::exactlin::Mat;
use crate::herdoid::{bimodule_diagram, kleisli, HCategory};
use crate::kan::{Bifunctor, Diagram, EndContraction};
use crate::lincat::{nat_space, Module, NatTrans, Violations};

use super::bimod::{bimodule_compose, internal_hom_left, internal_hom_right};
use super::{convolve, restrict};

/// An internal hom of H-modules with its end presentation over `A`.
#[derive(Debug, Clone)]
pub struct HModuleHom {
    pub module: Module,
    pub end: EndContraction,
    /// Result tuples of `end` are `[y, u]` rather than `[u, y]`.
    pub swapped: bool,
    pub violations: Violations,
}

impl HModuleHom {
    pub fn rest(&self, a: usize, b: usize) -> [usize; 2] {
        if self.swapped {
            [b, a]
        } else {
            [a, b]
        }
    }
}

/// Assemble the H-action on an end over `A`: `block(x, src, tgt)` lists the
/// summand maps for `psi` in `H(x, y)`.
fn hom_module(
    h: &HCategory,
    end: EndContraction,
    swapped: bool,
    law: &str,
    block: impl Fn(usize, usize, &Mat) -> Vec<(usize, usize, Mat)>,
) -> HModuleHom {
    let a = h.base();
    let hc = h.underlying();
    let k = a.field();
    let rest = |x: usize| {
        let (p, q) = h.unpair(x);
        if swapped {
            [q, p]
        } else {
            [p, q]
        }
    };
    let valdim = (0..hc.n()).map(|x| end.result.dim(&rest(x))).collect();
    let mut violations = Violations::default();
    let module = Module::from_basis_actions(hc.clone(), valdim, |x, y, kk| {
        let (src, dst) = (end.part(&rest(x)), end.part(&rest(y)));
        let mut lifted = Mat::zeros(k, dst.total, src.total);
        for (from, to, m) in block(x, y, &hc.basis(x, y, kk)) {
            lifted.paste(dst.offsets[to], src.offsets[from], &m);
        }
        let moved = lifted.mul(&src.incl);
        if !dst.constraints.mul(&moved).is_zero() {
            violations.push(format!("{law}.descent"), hc.witness(&[x, y]));
        }
        dst.retract.mul(&moved)
    });
    violations.extend(module.check().prefixed(law));
    HModuleHom { module, end, swapped, violations }
}

/// `(u,y) |-> end_v hom(N(y,v), Q(u,v))`, right adjoint to `M |-> M * N`.
pub fn hmodule_hom_right(h: &HCategory, n: &Module, q: &Module) -> HModuleHom {
    let a = h.base().clone();
    let f = h.flock().clone();
    let end = Diagram::hom(&bimodule_diagram(h, &restrict(h, n)), &bimodule_diagram(h, &restrict(h, q))).end(1, 3);
    hom_module(h, end, true, "hom_right", |x, y, psi| {
        let ((u, yy), (u2, y2)) = (h.unpair(x), h.unpair(y));
        (0..a.n())
            .map(|v2| {
                let v = f.tau(v2, u2, u);
                let chi = f.transport([v2, y2, yy, v2, f.tau(yy, u, u2), yy], a.ident(v2), psi, a.ident(yy));
                let back = n.action(h.pair(y2, v2), h.pair(yy, v), &chi);
                let fwd = q.action(h.pair(u, v), h.pair(u2, v2), a.ident(v2));
                (v, v2, fwd.kron(&back.transpose()))
            })
            .collect()
    })
}

/// `(x,y) |-> end_c hom(M(c,x), Q(c,y))`, right adjoint to `N |-> M * N`.
pub fn hmodule_hom_left(h: &HCategory, m: &Module, q: &Module) -> HModuleHom {
    let a = h.base().clone();
    let f = h.flock().clone();
    let end = Diagram::hom(&bimodule_diagram(h, &restrict(h, m)), &bimodule_diagram(h, &restrict(h, q))).end(0, 2);
    hom_module(h, end, false, "hom_left", |s, t, psi| {
        let ((x, y), (x2, y2)) = (h.unpair(s), h.unpair(t));
        (0..a.n())
            .map(|c2| {
                let u = f.tau(c2, x2, x);
                let back = m.action(h.pair(c2, x2), h.pair(u, x), a.ident(x));
                let fwd = q.action(h.pair(u, y), h.pair(c2, y2), psi);
                (u, c2, fwd.kron(&back.transpose()))
            })
            .collect()
    })
}

fn nat_dim(m: &Module, n: &Module) -> usize {
    nat_space(m, n).map(|s| s.dim).unwrap_or(usize::MAX)
}

/// Hom-tensor adjunctions for H-modules, compared by dimension, and
/// compatibility of the internal homs with restriction.
pub fn hmodule_hom_check(h: &HCategory, m: &Module, n: &Module, q: &Module) -> Violations {
    let conv = convolve(h, m, n);
    let hr = hmodule_hom_right(h, n, q);
    let hl = hmodule_hom_left(h, m, q);
    let mut out = conv.violations.clone();
    out.extend(hr.violations.clone());
    out.extend(hl.violations.clone());
    if !out.passed() {
        return out;
    }
    let lhs = nat_dim(&conv.module, q);
    if nat_dim(m, &hr.module) != lhs {
        out.push("adjunction.right", format!("dim {lhs}"));
    }
    if nat_dim(n, &hl.module) != lhs {
        out.push("adjunction.left", format!("dim {lhs}"));
    }
    let (rm, rn, rq) = (restrict(h, m), restrict(h, n), restrict(h, q));
    if restrict(h, &hr.module) != internal_hom_right(h, &rn, &rq).module {
        out.push("hom_right.restriction", "A^op(x)A");
    }
    if restrict(h, &hl.module) != internal_hom_left(h, &rm, &rq).module {
        out.push("hom_left.restriction", "A^op(x)A");
    }
    out
}

/// Hom-tensor adjunctions for bimodules, compared by dimension.
pub fn internal_hom_adjunction_check(h: &HCategory, p: &Module, q: &Module, r: &Module) -> Violations {
    let mut out = Violations::default();
    let comp = bimodule_compose(h, p, q).module;
    let hr = internal_hom_right(h, q, r).module;
    let hl = internal_hom_left(h, p, r).module;
    for (name, m) in [("composite", &comp), ("hom_right", &hr), ("hom_left", &hl)] {
        out.extend(m.check().prefixed(name));
    }
    if !out.passed() {
        return out;
    }
    let lhs = nat_dim(&comp, r);
    if nat_dim(p, &hr) != lhs {
        out.push("internal_hom.right", format!("dim {lhs}"));
    }
    if nat_dim(q, &hl) != lhs {
        out.push("internal_hom.left", format!("dim {lhs}"));
    }
    out
}

/// The right adjoint of restriction: `T |-> end_e hom(H(T, K e), P(e))`.
#[derive(Debug, Clone)]
pub struct CoKan {
    pub module: Module,
    pub end: EndContraction,
    /// `F |-> F_e(1_{K e})`, from the restriction of `module` to `P`.
    pub counit: NatTrans,
}

impl CoKan {
    /// `m |-> (phi |-> M(phi) m)`, from `M` into the extension of its restriction.
    pub fn unit(&self, h: &HCategory, m: &Module) -> NatTrans {
        let hc = h.underlying();
        let k = hc.field();
        let kl = kleisli(h);
        let env = h.envelope();
        let components = (0..hc.n())
            .map(|t| {
                let part = self.end.part(&[t]);
                let blocks: Vec<Mat> = (0..env.n())
                    .map(|e| {
                        let ke = kl.objmap[e];
                        let (dh, dp) = (hc.homdim(t, ke), m.valdim[ke]);
                        let mut b = Mat::zeros(k, dp * dh, m.valdim[t]);
                        for kf in 0..dh {
                            b.paste(kf * dp, 0, &m.basis_action(t, ke, kf));
                        }
                        b
                    })
                    .collect();
                part.retract.mul(&Mat::vstack(k, m.valdim[t], &blocks))
            })
            .collect();
        NatTrans { components }
    }
}

pub fn cokan(h: &HCategory, p: &Module) -> CoKan {
    let hc = h.underlying();
    let k = hc.field();
    let kl = kleisli(h);
    let reps = Bifunctor::hom(hc.clone()).diagram().restrict_slot(1, &kl);
    let end = Diagram::hom(&reps, &Diagram::from_module(p)).end(1, 2);
    let module = end.result.to_module();
    let components = (0..p.base.n())
        .map(|e| {
            let ke = kl.objmap[e];
            let id = hc.ident(ke);
            let eval = Mat::identity(k, p.valdim[e]).kron(&id.transpose());
            eval.mul(&end.component(&[ke], e, &Mat::identity(k, module.valdim[ke])))
        })
        .collect();
    CoKan { module, end, counit: NatTrans { components } }
}

/// The extension of a bimodule map `alpha: P -> P'`.
pub fn cokan_map(h: &HCategory, src: &CoKan, dst: &CoKan, alpha: &NatTrans) -> NatTrans {
    let hc = h.underlying();
    let k = hc.field();
    let kl = kleisli(h);
    let components = (0..hc.n())
        .map(|t| {
            let (sp, dp) = (src.end.part(&[t]), dst.end.part(&[t]));
            let mut lifted = Mat::zeros(k, dp.total, sp.total);
            for (e, a) in alpha.components.iter().enumerate() {
                let dh = hc.homdim(t, kl.objmap[e]);
                lifted.paste(dp.offsets[e], sp.offsets[e], &a.kron(&Mat::identity(k, dh)));
            }
            dp.retract.mul(&lifted).mul(&sp.incl)
        })
        .collect();
    NatTrans { components }
}

/// Unit, counit and triangle identities of restriction against its right
/// adjoint, for an H-module `m` and a bimodule `p`.
pub fn adjunction_check(h: &HCategory, m: &Module, p: &Module) -> Violations {
    let mut out = Violations::default();
    let rm = restrict(h, m);
    let ext_m = cokan(h, &rm);
    let ext_p = cokan(h, p);
    for (name, e) in [("cokan", &ext_m), ("cokan", &ext_p)] {
        out.extend(e.module.check().prefixed(name));
    }
    if !out.passed() {
        return out;
    }
    let eta = ext_m.unit(h, m);
    if !eta.is_natural(m, &ext_m.module) {
        out.push("cokan.unit_natural", "H");
    }
    let res_ext_p = restrict(h, &ext_p.module);
    if !ext_p.counit.is_natural(&res_ext_p, p) {
        out.push("cokan.counit_natural", "A^op(x)A");
    }
    let kl = kleisli(h);
    let first = ext_m.counit.components.iter().enumerate().all(|(e, c)| c.mul(&eta.components[kl.objmap[e]]).is_identity());
    if !first {
        out.push("cokan.triangle_restriction", "A^op(x)A");
    }
    let twice = cokan(h, &res_ext_p);
    let eta_p = twice.unit(h, &ext_p.module);
    let back = cokan_map(h, &twice, &ext_p, &ext_p.counit);
    if !eta_p.then(&back).components.iter().all(Mat::is_identity) {
        out.push("cokan.triangle_extension", "H");
    }
    if nat_dim(&rm, p) != nat_dim(m, &ext_p.module) {
        out.push("cokan.adjunction_dim", "H");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::flock::*;
    use crate::herdoid::*;

    #[test]
    fn adjunctions_on_product() {
        let f5 = FieldSpec::prime(5).unwrap();
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), f5).unwrap();
        let g2 = flock_abelian_group_algebra(&GroupTable::cyclic(2), f5, GroupTransport::Product).unwrap();
        let h = build_h(&flock_product(&c2, &g2).unwrap()).unwrap();
        let hc = h.underlying().clone();
        let (m, n) = (Module::representable(hc.clone(), 1), Module::representable(hc, 2));
        let j = promonoidal(&h).j;
        assert!(hmodule_hom_check(&h, &m, &n, &j).passed());
        let (rm, rj) = (restrict(&h, &m), restrict(&h, &j));
        assert!(internal_hom_adjunction_check(&h, &rm, &rj, &rm).passed());
    }

    #[test]
    fn cokan_triangles() {
        let f =
            flock_abelian_group_algebra(&GroupTable::cyclic(3), FieldSpec::prime(7).unwrap(), GroupTransport::Product).unwrap();
        let h = build_h(&f).unwrap();
        let m = Module::representable(h.underlying().clone(), 0);
        let p = hom_bimodule(&h);
        assert!(adjunction_check(&h, &m, &p).passed());
        let yoneda = nat_space(&restrict(&h, &m), &p).unwrap().dim;
        assert_eq!(cokan(&h, &p).module.valdim, vec![yoneda]);
    }
}
