use crate::herdoid::{Antipode, HCategory};
use crate::lincat::{Module, NatTrans, Violations};

use super::bimod::bimodule_dual;
use super::restrict;

/// `M*(X) = M(S X)*`; `phi` acts by the transpose of `M(S phi)`.
pub fn dual_module(s: &Antipode, m: &Module) -> Module {
    let f = &s.functor;
    let valdim = f.objmap.iter().map(|&x| m.valdim[x]).collect();
    Module::from_basis_actions(f.dst.clone(), valdim, |x, y, kk| {
        let phi = f.dst.basis(x, y, kk);
        let sphi = f.on_hom(y, x).mul(&phi);
        m.action(f.objmap[y], f.objmap[x], &sphi).transpose()
    })
}

/// The identity components `M -> M**` are natural.
pub fn double_dual_check(s: &Antipode, m: &Module) -> Violations {
    let mut out = Violations::default();
    let dd = dual_module(s, &dual_module(s, m));
    if dd.valdim != m.valdim || !NatTrans::identity(m).is_natural(m, &dd) {
        out.push("dual.double_dual", m.base.object_name(0).to_string());
    }
    out
}

/// Restriction carries `M*` to the dual bimodule of the restriction.
pub fn duality_preservation_check(h: &HCategory, s: &Antipode, m: &Module) -> Violations {
    let d = dual_module(s, m);
    let mut out = d.check().prefixed("dual");
    if restrict(h, &d) != bimodule_dual(h, &restrict(h, m)) {
        out.push("dual.restriction", "A^op(x)A");
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
    fn duals_of_representables() {
        let f = flock_codiscrete(&HeapTable::affine_cyclic(3), FieldSpec::prime(5).unwrap()).unwrap();
        let h = build_h(&f).unwrap();
        let s = antipode(&h).unwrap();
        let m = Module::representable(h.underlying().clone(), 5);
        let d = dual_module(&s, &m);
        assert!(d.check().passed());
        assert_eq!(d.valdim, (0..9).map(|x| m.valdim[s.functor.objmap[x]]).collect::<Vec<_>>());
        assert!(double_dual_check(&s, &m).passed());
        assert!(duality_preservation_check(&h, &s, &m).passed());
    }
}
