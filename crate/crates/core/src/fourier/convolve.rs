use crate::exactlin::Mat;
use crate::herdoid::{bimodule_diagram, diagram_bimodule, HCategory, PromonoidalData};
use crate::kan::{Contraction, Diagram};
use crate::lincat::{Module, NatTrans, Violations};

use super::bimod::{bimodule_compose, unitor_components, BimoduleComposite};
use super::{check_iso, factor_through, restrict, Comparison};

/// `(M * N)(u,v) = coend^y M(u,y) (x) N(y,v)`, with the H-action transported
/// along the flock.
#[derive(Debug, Clone)]
pub struct Convolution {
    pub module: Module,
    /// The restricted composite carrying the same values.
    pub composite: BimoduleComposite,
    pub violations: Violations,
}

pub fn convolve(h: &HCategory, m: &Module, n: &Module) -> Convolution {
    let a = h.base();
    let f = h.flock();
    let hc = h.underlying();
    let na = a.n();
    let k = a.field();
    let composite = bimodule_compose(h, &restrict(h, m), &restrict(h, n));
    let c = &composite.contraction;
    let mut violations = Violations::default();
    let module = Module::from_basis_actions(hc.clone(), composite.module.valdim.clone(), |s, t, kk| {
        let ((u, v), (u2, v2)) = (h.unpair(s), h.unpair(t));
        let (src, dst) = (c.part(&[u, v]), c.part(&[u2, v2]));
        let phi = hc.basis(s, t, kk);
        let mut lifted = Mat::zeros(k, dst.total, src.total);
        for y in 0..na {
            let y2 = f.tau(y, u, u2);
            let (ys, yt) = (h.pair(y, v), h.pair(y2, v2));
            if hc.homdim(ys, yt) != phi.rows() {
                violations.push("convolve.transport", a.witness(&[u, v, u2, v2, y]));
                continue;
            }
            let left = m.action(h.pair(u, y), h.pair(u2, y2), a.ident(y2));
            let right = n.action(ys, yt, &phi);
            lifted.paste(dst.offsets[y2], src.offsets[y], &left.kron(&right));
        }
        let pushed = dst.proj.mul(&lifted);
        if !pushed.mul(&src.relations).is_zero() {
            violations.push("convolve.descent", hc.witness(&[s, t]));
        }
        pushed.mul(&src.section)
    });
    violations.extend(module.check().prefixed("convolve"));
    Convolution { module, composite, violations }
}

fn unit_comparison(h: &HCategory, j: &Module, m: &Module, left: bool) -> Comparison {
    let conv = if left { convolve(h, j, m) } else { convolve(h, m, j) };
    let law = if left { "unit.left" } else { "unit.right" };
    let (map, found) = unitor_components(h, &conv.composite, &restrict(h, m), left, law);
    let mut violations = conv.violations;
    violations.extend(found);
    if violations.passed() {
        check_iso(law, &map, &conv.module, m, &mut violations);
    }
    Comparison { source: conv.module, target: m.clone(), map, violations }
}

/// `j * M -> M`.
pub fn left_unit_comparison(h: &HCategory, j: &Module, m: &Module) -> Comparison {
    unit_comparison(h, j, m, true)
}

/// `M * j -> M`.
pub fn right_unit_comparison(h: &HCategory, j: &Module, m: &Module) -> Comparison {
    unit_comparison(h, j, m, false)
}

/// `(M * N) * Q -> M * (N * Q)`, induced from the triple sum over `(y, z)`.
pub fn associativity_comparison(h: &HCategory, m: &Module, n: &Module, q: &Module) -> Comparison {
    let a = h.base();
    let na = a.n();
    let k = a.field();
    let mn = convolve(h, m, n);
    let nq = convolve(h, n, q);
    let l = convolve(h, &mn.module, q);
    let r = convolve(h, m, &nq.module);
    let mut violations = Violations::default();
    for part in [&mn, &nq, &l, &r] {
        violations.extend(part.violations.clone());
    }
    let (rm, rn, rq) = (restrict(h, m), restrict(h, n), restrict(h, q));
    let mut components = Vec::with_capacity(na * na);
    for s in 0..na * na {
        let (u, v) = h.unpair(s);
        let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
        for y in 0..na {
            for z in 0..na {
                let dm = rm.valdim[h.pair(u, y)];
                let dn = rn.valdim[h.pair(y, z)];
                let dq = rq.valdim[h.pair(z, v)];
                let inner = mn.composite.contraction.push(&[u, y, y, z], &Mat::identity(k, dm * dn)).1;
                lhs.push(l.composite.contraction.push(&[u, z, z, v], &inner.kron(&Mat::identity(k, dq))).1);
                let inner = nq.composite.contraction.push(&[y, z, z, v], &Mat::identity(k, dn * dq)).1;
                rhs.push(r.composite.contraction.push(&[u, y, y, v], &Mat::identity(k, dm).kron(&inner)).1);
            }
        }
        let lhs = Mat::hstack(k, l.module.valdim[s], &lhs);
        let rhs = Mat::hstack(k, r.module.valdim[s], &rhs);
        match factor_through(&lhs, &rhs) {
            Some(psi) => components.push(psi),
            None => {
                violations.push("assoc.well_defined", a.witness(&[u, v]));
                components.push(Mat::zeros(k, r.module.valdim[s], l.module.valdim[s]));
            }
        }
    }
    let map = NatTrans { components };
    if violations.passed() {
        check_iso("assoc", &map, &l.module, &r.module, &mut violations);
    }
    Comparison { source: l.module, target: r.module, map, violations }
}

/// The convolution computed from the promonoidal structure,
/// `coend^{a,b,c,d} p((a,b),(c,d),(u,v)) (x) M(a,b) (x) N(c,d)`, with each
/// module restricted to a bimodule and contracted one variable at a time.
#[derive(Debug, Clone)]
pub struct DirectConvolution {
    pub bimodule: Module,
    /// Contractions in the order they were taken.
    pub stages: Vec<Contraction>,
}

pub fn convolve_direct(h: &HCategory, data: &PromonoidalData, m: &Module, n: &Module) -> DirectConvolution {
    let dm = bimodule_diagram(h, &restrict(h, m));
    let dn = bimodule_diagram(h, &restrict(h, n));
    // [a,b,c,d,u,v,z,t] -> [a,b,c,u,v,z] -> [a,b,u,v]
    let c1 = data.p.tensor(&dn).coend(3, 7);
    let c2 = c1.result.coend(2, 5);
    // [x,y,a,b,u,v] -> [x,a,u,v] -> [u,v]
    let c3 = dm.tensor(&c2.result).coend(1, 3);
    let c4 = c3.result.coend(0, 1);
    let bimodule = diagram_bimodule(h, &c4.result);
    DirectConvolution { bimodule, stages: vec![c1, c2, c3, c4] }
}

/// Dimensions of the direct convolution at each `(u,v)`, contracting in the
/// order selected by `alternate`.
pub fn convolve_direct_dims(h: &HCategory, data: &PromonoidalData, m: &Module, n: &Module, alternate: bool) -> Vec<usize> {
    if !alternate {
        return convolve_direct(h, data, m, n).bimodule.valdim;
    }
    let dm = bimodule_diagram(h, &restrict(h, m));
    let dn = bimodule_diagram(h, &restrict(h, n));
    // [x,y,a,b,c,d,u,v] -> [x,a,c,d,u,v] -> [c,d,u,v]
    let c1 = dm.tensor(&data.p).coend(1, 3);
    let c2 = c1.result.coend(0, 1);
    // [c,d,u,v,z,t] -> [c,u,v,z] -> [u,v]
    let c3 = c2.result.tensor(&dn).coend(1, 5);
    let c4: Diagram = c3.result.coend(0, 3).result;
    let na = h.base().n();
    (0..na * na).map(|s| c4.dim(&[s / na, s % na])).collect()
}

/// Compare the reduced convolution with restriction and with the direct
/// coend over the promonoidal structure.
pub fn multiplicativity_check(h: &HCategory, data: &PromonoidalData, m: &Module, n: &Module) -> Violations {
    let a = h.base();
    let na = a.n();
    let k = a.field();
    let conv = convolve(h, m, n);
    let mut out = conv.violations.clone();
    if restrict(h, &conv.module) != conv.composite.module {
        out.push("multiplicativity.actions", "A^op(x)A");
    }
    let direct = convolve_direct(h, data, m, n);
    if direct.bimodule.valdim != conv.module.valdim {
        out.push("multiplicativity.direct_dims", "A^op(x)A");
        return out;
    }
    if convolve_direct_dims(h, data, m, n, true) != direct.bimodule.valdim {
        out.push("direct.fubini", "A^op(x)A");
    }
    let (rm, rn) = (restrict(h, m), restrict(h, n));
    let [c1, c2, c3, c4] = [&direct.stages[0], &direct.stages[1], &direct.stages[2], &direct.stages[3]];
    let mut components = Vec::with_capacity(na * na);
    for s in 0..na * na {
        let (u, v) = h.unpair(s);
        let blocks: Vec<Mat> = (0..na)
            .map(|y| {
                let (sm, sn) = (rm.valdim[h.pair(u, y)], rn.valdim[h.pair(y, v)]);
                let unit = a.ident(v).kron(a.ident(u));
                let (r1, v1) = c1.push(&[u, y, y, v, u, v, y, v], &unit.kron(&Mat::identity(k, sn)));
                let (r2, v2) = c2.push(&r1, &v1);
                let mut t3 = vec![u, y];
                t3.extend_from_slice(&r2);
                let (r3, v3) = c3.push(&t3, &Mat::identity(k, sm).kron(&v2));
                c4.push(&r3, &v3).1
            })
            .collect();
        let eval = Mat::hstack(k, direct.bimodule.valdim[s], &blocks);
        match conv.composite.contraction.descend(&[u, v], &eval) {
            Some(phi) => {
                if !phi.is_invertible() {
                    out.push("multiplicativity.canonical_invertible", a.witness(&[u, v]));
                }
                components.push(phi);
            }
            None => {
                out.push("multiplicativity.canonical_well_defined", a.witness(&[u, v]));
                return out;
            }
        }
    }
    if !(NatTrans { components }).is_natural(&conv.composite.module, &direct.bimodule) {
        out.push("multiplicativity.canonical_natural", "A^op(x)A");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::flock::*;
    use crate::herdoid::*;

    fn c2() -> HCategory {
        build_h(&flock_codiscrete(&HeapTable::affine_cyclic(2), FieldSpec::prime(5).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn unit_and_associativity_on_codiscrete() {
        let h = c2();
        let data = promonoidal(&h);
        let hc = h.underlying().clone();
        let (m, n) = (Module::representable(hc.clone(), 1), Module::representable(hc, 2));
        assert!(left_unit_comparison(&h, &data.j, &m).violations.passed());
        assert!(right_unit_comparison(&h, &data.j, &n).violations.passed());
        assert!(associativity_comparison(&h, &m, &n, &data.j).violations.passed());
    }

    #[test]
    fn direct_convolution_matches() {
        let h = c2();
        let data = promonoidal(&h);
        let m = Module::representable(h.underlying().clone(), 3);
        assert!(multiplicativity_check(&h, &data, &m, &data.j).passed());
        let dims = convolve(&h, &m, &m).module.valdim;
        assert_eq!(convolve_direct_dims(&h, &data, &m, &m, true), dims);
    }

    #[test]
    fn heap_inverse_fails_associativity() {
        let f = flock_abelian_group_algebra(&GroupTable::cyclic(3), FieldSpec::prime(7).unwrap(), GroupTransport::HeapInverse)
            .unwrap();
        let h = build_h(&f).unwrap();
        let r = Module::representable(h.underlying().clone(), 0);
        let v = associativity_comparison(&h, &r, &r, &r).violations;
        assert_eq!(v.failures[0].law, "assoc.well_defined");
    }
}
