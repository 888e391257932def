//! Modules over H and bimodules over `A`, convolution, duals, internal homs
//! and the Fourier transform with its right adjoint.
//!
//! An H-module is a [`Module`] over `H`'s underlying category; a bimodule is
//! a [`Module`] over the envelope `A^op (x) A`. Both index objects as pairs
//! `a * n + b`, so restriction along the Kleisli functor keeps values in place.

mod bimod;
mod checks;
mod convolve;
mod dual;
mod homs;

pub use bimod::{
    bimodule_compose, bimodule_dual, bimodule_left_unitor, bimodule_right_unitor, bimodule_unit, internal_hom_left,
    internal_hom_right, BimoduleComposite, BimoduleHom,
};
pub use checks::{conservativity_check, sample_bimodules, sample_modules, star_autonomy_checks, StarAutonomy};
pub use convolve::{
    associativity_comparison, convolve, convolve_direct, convolve_direct_dims, left_unit_comparison, multiplicativity_check,
    right_unit_comparison, Convolution, DirectConvolution,
};
pub use dual::{double_dual_check, dual_module, duality_preservation_check};
pub use homs::{
    adjunction_check, cokan, cokan_map, hmodule_hom_check, hmodule_hom_left, hmodule_hom_right, internal_hom_adjunction_check,
    CoKan, HModuleHom,
};

use crate::exactlin::Mat;
use crate::herdoid::{kleisli, HCategory};
use crate::kan::{Bifunctor, Diagram};
use crate::lincat::{Module, NatTrans, Violations};

/// A candidate isomorphism `source => target` with the failures found while
/// building and checking it.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub source: Module,
    pub target: Module,
    pub map: NatTrans,
    pub violations: Violations,
}

/// The Fourier transform as restriction along the Kleisli functor.
pub fn restrict(h: &HCategory, m: &Module) -> Module {
    m.restrict(&kleisli(h))
}

/// The coend presentation of the Fourier transform and its comparison with
/// restriction.
#[derive(Debug, Clone)]
pub struct FourierCoend {
    /// `T |-> coend^X M(X) (x) H(X, T)` as an H-module.
    pub module: Module,
    /// The same values as a bimodule, restricted along the Kleisli functor.
    pub bimodule: Module,
    /// `[phi (x) m] |-> M(phi) m`, componentwise.
    pub comparison: NatTrans,
    pub violations: Violations,
}

pub fn fourier_coend(h: &HCategory, m: &Module) -> FourierCoend {
    let hc = h.underlying();
    let k = hc.field();
    let d = Bifunctor::hom(hc.clone()).diagram().tensor(&Diagram::from_module(m));
    let c = d.coend(0, 2);
    let module = c.result.to_module();
    let mut violations = Violations::default();
    let mut components = Vec::with_capacity(hc.n());
    for t in 0..hc.n() {
        let eval = Mat::hstack(k, m.valdim[t], &(0..hc.n()).map(|x| m.act_matrix(x, t).clone()).collect::<Vec<_>>());
        match c.descend(&[t], &eval) {
            Some(phi) => {
                if !phi.is_invertible() {
                    violations.push("fourier.comparison_invertible", hc.witness(&[t]));
                }
                components.push(phi);
            }
            None => {
                violations.push("fourier.comparison_well_defined", hc.witness(&[t]));
                components.push(Mat::zeros(k, m.valdim[t], module.valdim[t]));
            }
        }
    }
    let comparison = NatTrans { components };
    if violations.passed() && !comparison.is_natural(&module, m) {
        violations.push("fourier.comparison_natural", "H");
    }
    let bimodule = restrict(h, &module);
    FourierCoend { module, bimodule, comparison, violations }
}

/// The unique `psi` with `psi . a = b`, when `a` is surjective and `b`
/// vanishes on the kernel of `a`.
pub fn factor_through(a: &Mat, b: &Mat) -> Option<Mat> {
    let (_, pivots) = a.rref();
    if pivots.len() != a.rows() {
        return None;
    }
    let square = a.select_cols(&pivots).inverse()?;
    let psi = b.select_cols(&pivots).mul(&square);
    (psi.mul(a) == *b).then_some(psi)
}

/// Shared check: components exist, are invertible and natural.
pub(crate) fn check_iso(law: &str, t: &NatTrans, src: &Module, dst: &Module, out: &mut Violations) {
    let base = &src.base;
    for (x, c) in t.components.iter().enumerate() {
        if !c.is_invertible() {
            out.push(format!("{law}.invertible"), base.witness(&[x]));
        }
    }
    if !t.is_natural(src, dst) {
        out.push(format!("{law}.natural"), base.object_name(0).to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::flock::*;
    use crate::herdoid::*;

    #[test]
    fn factor_through_solves() {
        let f = FieldSpec::prime(5).unwrap();
        let a = Mat::from_rows(f, &[vec![1, 1, 0], vec![0, 0, 1]]);
        let b = Mat::from_rows(f, &[vec![2, 2, 3]]);
        assert_eq!(factor_through(&a, &b).unwrap(), Mat::from_rows(f, &[vec![2, 3]]));
        let bad = Mat::from_rows(f, &[vec![1, 0, 0]]);
        assert!(factor_through(&a, &bad).is_none());
    }

    #[test]
    fn fourier_of_unit() {
        let f =
            flock_abelian_group_algebra(&GroupTable::cyclic(2), FieldSpec::prime(5).unwrap(), GroupTransport::Product).unwrap();
        let h = build_h(&f).unwrap();
        let j = promonoidal(&h).j;
        let fc = fourier_coend(&h, &j);
        assert!(fc.violations.passed());
        assert_eq!(fc.module.valdim, vec![2]);
        assert_eq!(restrict(&h, &j), hom_bimodule(&h));
    }
}
