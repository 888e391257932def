use crate::exactlin::Mat;
use crate::herdoid::{bimodule_diagram, diagram_bimodule, hom_bimodule, HCategory};
use crate::kan::{Contraction, Diagram, EndContraction};
use crate::lincat::{Module, NatTrans, Violations};

use super::Comparison;

/// `(P . Q)(a,b) = coend^c P(a,c) (x) Q(c,b)`; summand values are indexed
/// `p + dim P * q`.
#[derive(Debug, Clone)]
pub struct BimoduleComposite {
    pub module: Module,
    /// Coend over slots `(c, c')` of the diagram `P(a,c) (x) Q(c',b)`;
    /// result tuples are `[a, b]`.
    pub contraction: Contraction,
}

pub fn bimodule_compose(h: &HCategory, p: &Module, q: &Module) -> BimoduleComposite {
    let t = bimodule_diagram(h, p).tensor(&bimodule_diagram(h, q));
    let contraction = t.coend(1, 2);
    let module = diagram_bimodule(h, &contraction.result);
    BimoduleComposite { module, contraction }
}

pub fn bimodule_unit(h: &HCategory) -> Module {
    hom_bimodule(h)
}

/// Components of the unit comparison out of a composite with the unit on the
/// left (`[xi (x) q] |-> P(xi) q`) or right (`[q (x) xi] |-> P(xi) q`).
pub(crate) fn unitor_components(
    h: &HCategory,
    comp: &BimoduleComposite,
    p: &Module,
    left: bool,
    law: &str,
) -> (NatTrans, Violations) {
    let a = h.base();
    let n = a.n();
    let k = a.field();
    let dp = bimodule_diagram(h, p);
    let mut violations = Violations::default();
    let mut components = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let rows = p.valdim[x * n + y];
            let blocks: Vec<Mat> = (0..n)
                .map(|c| {
                    if left {
                        // xi in A(x,c), q in P(c,y)
                        let (dx, dq) = (a.homdim(x, c), dp.dim(&[c, y]));
                        let mut e = Mat::zeros(k, rows, dx * dq);
                        for i in 0..dx {
                            let m = dp.move_basis(0, &[c, y], x, i);
                            for j in 0..dq {
                                e.paste(0, i + dx * j, &m.col(j));
                            }
                        }
                        e
                    } else {
                        // q in P(x,c), xi in A(c,y)
                        let (dq, dx) = (dp.dim(&[x, c]), a.homdim(c, y));
                        let mut e = Mat::zeros(k, rows, dq * dx);
                        for i in 0..dx {
                            let m = dp.move_basis(1, &[x, c], y, i);
                            for j in 0..dq {
                                e.paste(0, j + dq * i, &m.col(j));
                            }
                        }
                        e
                    }
                })
                .collect();
            let eval = Mat::hstack(k, rows, &blocks);
            match comp.contraction.descend(&[x, y], &eval) {
                Some(m) => components.push(m),
                None => {
                    violations.push(format!("{law}.well_defined"), a.witness(&[x, y]));
                    components.push(Mat::zeros(k, rows, comp.module.valdim[x * n + y]));
                }
            }
        }
    }
    (NatTrans { components }, violations)
}

fn unitor(h: &HCategory, p: &Module, left: bool) -> Comparison {
    let u = bimodule_unit(h);
    let comp = if left { bimodule_compose(h, &u, p) } else { bimodule_compose(h, p, &u) };
    let law = if left { "unitor.left" } else { "unitor.right" };
    let (map, mut violations) = unitor_components(h, &comp, p, left, law);
    if violations.passed() {
        super::check_iso(law, &map, &comp.module, p, &mut violations);
    }
    Comparison { source: comp.module, target: p.clone(), map, violations }
}

/// `A . P -> P`, `[xi (x) q] |-> P(xi) q`.
pub fn bimodule_left_unitor(h: &HCategory, p: &Module) -> Comparison {
    unitor(h, p, true)
}

/// `P . A -> P`, `[q (x) xi] |-> P(xi) q`.
pub fn bimodule_right_unitor(h: &HCategory, p: &Module) -> Comparison {
    unitor(h, p, false)
}

/// `P*(a,b) = P(b,a)*`, acting by transposes.
pub fn bimodule_dual(h: &HCategory, p: &Module) -> Module {
    let a = h.base().clone();
    let n = a.n();
    let valdim = (0..n * n).map(|i| p.valdim[(i % n) * n + i / n]).collect();
    Module::from_basis_actions(h.envelope().clone(), valdim, |s, t, kk| {
        let ((x, y), (x2, y2)) = ((s / n, s % n), (t / n, t % n));
        let du = a.homdim(x2, x);
        let (iu, iv) = (kk % du, kk / du);
        let phi = a.basis(y, y2, iv).kron(&a.basis(x2, x, iu));
        p.action(y2 * n + x2, y * n + x, &phi).transpose()
    })
}

/// An internal hom of bimodules with its end presentation.
#[derive(Debug, Clone)]
pub struct BimoduleHom {
    pub module: Module,
    /// End over the paired slots of `hom(P, Q)`.
    pub end: EndContraction,
    /// Result tuples of `end` are `[b, a]` rather than `[a, b]`.
    pub swapped: bool,
}

impl BimoduleHom {
    pub fn rest(&self, a: usize, b: usize) -> [usize; 2] {
        if self.swapped {
            [b, a]
        } else {
            [a, b]
        }
    }
}

/// `(a,b) |-> end_c hom(P(b,c), Q(a,c))`.
pub fn internal_hom_right(h: &HCategory, p: &Module, q: &Module) -> BimoduleHom {
    let d = Diagram::hom(&bimodule_diagram(h, p), &bimodule_diagram(h, q));
    let end = d.end(1, 3);
    let module = diagram_bimodule(h, &end.result.permute_slots(&[1, 0]));
    BimoduleHom { module, end, swapped: true }
}

/// `(a,b) |-> end_c hom(P(c,a), Q(c,b))`.
pub fn internal_hom_left(h: &HCategory, p: &Module, q: &Module) -> BimoduleHom {
    let d = Diagram::hom(&bimodule_diagram(h, p), &bimodule_diagram(h, q));
    let end = d.end(0, 2);
    let module = diagram_bimodule(h, &end.result);
    BimoduleHom { module, end, swapped: false }
}
