//! The pair category H of a flock, its Kleisli functor from the enveloping
//! category `A^op (x) A`, the antipode, and the promonoidal data.
//!
//! Objects of H are pairs `(a, b)` indexed `a * n + b`, the same order as the
//! objects of the envelope, and `H((a,b),(c,d)) = A(tau(b,a,c), d)`.

use std::sync::Arc;

use crate::exactlin::Mat;
use crate::flock::{check_flock, FlockDatum};
use crate::kan::{Diagram, Slot};
use crate::lincat::{FinLinCat, LinFunctor, Module, Violations};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HerdError {
    #[error("flock laws fail: {0}")]
    Flock(Violations),
    #[error("pair category fails: {0}")]
    Category(Violations),
    #[error("no antipode data: supply s_hom or rho")]
    MissingAntipode,
    #[error("antipode fails: {0}")]
    Antipode(Violations),
}

#[derive(Debug, Clone)]
pub struct HCategory {
    cat: Arc<FinLinCat>,
    flock: Arc<FlockDatum>,
    envelope: Arc<FinLinCat>,
}

impl HCategory {
    pub fn underlying(&self) -> &Arc<FinLinCat> {
        &self.cat
    }

    pub fn flock(&self) -> &Arc<FlockDatum> {
        &self.flock
    }

    /// `A^op (x) A`, shared by every bimodule built from this category.
    pub fn envelope(&self) -> &Arc<FinLinCat> {
        &self.envelope
    }

    pub fn base(&self) -> &Arc<FinLinCat> {
        self.flock.category()
    }

    pub fn pair(&self, a: usize, b: usize) -> usize {
        a * self.flock.n() + b
    }

    pub fn unpair(&self, x: usize) -> (usize, usize) {
        let n = self.flock.n();
        (x / n, x % n)
    }

    /// The `A`-object `tau(b,a,c)` whose homs into `d` form `H((a,b),(c,d))`.
    pub fn hom_source(&self, x: usize, y: usize) -> usize {
        let ((a, b), (c, _)) = (self.unpair(x), self.unpair(y));
        self.flock.tau(b, a, c)
    }
}

/// Assemble H without checking any law.
pub fn assemble_h(f: &FlockDatum) -> HCategory {
    let a = f.category();
    let n = f.n();
    let k = f.field();
    let pairs: Vec<(usize, usize)> = (0..n * n).map(|i| (i / n, i % n)).collect();
    let objects = pairs.iter().map(|&(x, y)| format!("({},{})", a.object_name(x), a.object_name(y))).collect();
    let src = |(x, y): (usize, usize), (z, _): (usize, usize)| f.tau(y, x, z);
    let mut homdim = Vec::with_capacity(n.pow(4));
    for &p in &pairs {
        for &q in &pairs {
            homdim.push(a.homdim(src(p, q), q.1));
        }
    }
    let mut comp = Vec::with_capacity(n.pow(6));
    for &p in &pairs {
        for &q in &pairs {
            for &r in &pairs {
                let (s_pq, s_qr, s_pr) = (src(p, q), src(q, r), src(p, r));
                let (c, d) = q;
                let (u, v) = r;
                let dpq = a.homdim(s_pq, d);
                let dqr = a.homdim(s_qr, v);
                let expected = (a.homdim(s_pr, v), dpq * dqr);
                // tau(tau(b,a,c), c, u) = tau(b,a,u) under the heap laws
                if f.tau(s_pq, c, u) != s_pr || f.tau(d, c, u) != s_qr {
                    comp.push(Mat::zeros(k, expected.0, expected.1));
                    continue;
                }
                let t = f.tau_hom([s_pq, c, u, d, c, u]);
                let tf = t.mul(&Mat::identity(k, dpq).kron(&a.ident(c).kron(a.ident(u))));
                let m = a.comp(s_pr, s_qr, v).mul(&tf.kron(&Mat::identity(k, dqr)));
                comp.push(m);
            }
        }
    }
    let ident = pairs.iter().map(|&(_, y)| a.ident(y).clone()).collect();
    let cat = FinLinCat::new(k, objects, homdim, comp, ident).expect("pair category tables are shaped from the flock");
    let envelope = Arc::new(a.opposite().tensor(a));
    HCategory { cat: Arc::new(cat), flock: Arc::new(f.clone()), envelope }
}

/// Build H after checking the flock, then check H's category laws.
pub fn build_h(f: &FlockDatum) -> Result<HCategory, HerdError> {
    let v = check_flock(f);
    if !v.passed() {
        return Err(HerdError::Flock(v));
    }
    let h = assemble_h(f);
    let v = h.cat.check();
    if !v.passed() {
        return Err(HerdError::Category(v));
    }
    Ok(h)
}

/// `h: A^op (x) A -> H`, identity on objects, `u (x) v |-> tau(v, u, 1_c)`.
pub fn kleisli(h: &HCategory) -> LinFunctor {
    let f = &h.flock;
    let a = f.category();
    let n = f.n();
    let k = f.field();
    let env = h.envelope.clone();
    let mut hommap = Vec::with_capacity(n.pow(4));
    for p in 0..n * n {
        for q in 0..n * n {
            let ((x, y), (z, w)) = (h.unpair(p), h.unpair(q));
            // u in A(z, x), v in A(y, w)
            let (du, dv) = (a.homdim(z, x), a.homdim(y, w));
            let rows = h.cat.homdim(p, q);
            let mut m = Mat::zeros(k, rows, du * dv);
            if f.tau(w, z, z) == w {
                let t = f.tau_hom([y, x, z, w, z, z]);
                for i in 0..du {
                    for j in 0..dv {
                        let col = t.mul(&a.basis(y, w, j).kron(&a.basis(z, x, i).kron(a.ident(z))));
                        m.paste(0, i + du * j, &col);
                    }
                }
            }
            hommap.push(m);
        }
    }
    LinFunctor::new(env, h.cat.clone(), (0..n * n).collect(), hommap).expect("kleisli tables are shaped from H")
}

/// The antipode as a functor `H^op -> H`, `(a,b) |-> (b,a)`.
#[derive(Debug, Clone)]
pub struct Antipode {
    pub functor: LinFunctor,
    /// Whether `S . S^op` is the identity on every hom space.
    pub involutive: bool,
}

impl Antipode {
    /// `S` on `H((c,d),(a,b))`.
    pub fn on_hom(&self, from: usize, to: usize) -> &Mat {
        self.functor.on_hom(to, from)
    }
}

/// `S` on `H((c,d),(a,b))` assembled from the pairings:
/// `tau(1_a, 1_b, -) . rho(d,b,c,a)^-1 . sigma(tau(d,c,a), b)^T`.
pub fn antipode_from_pairings(f: &FlockDatum, c: usize, d: usize, a: usize, b: usize) -> Option<Mat> {
    let cat = f.category();
    let k = f.field();
    let m = f.tau(d, c, a);
    let r = f.rho(d, b, c, a)?;
    let y = r.inverse()?.mul(&f.sigma(m, b).transpose());
    let mid = f.tau(b, a, c);
    if f.tau(a, b, mid) != c {
        return None;
    }
    let t = f.tau_hom([a, b, d, a, b, mid]);
    let lift = cat.ident(a).kron(&cat.ident(b).kron(&Mat::identity(k, cat.homdim(d, mid))));
    Some(t.mul(&lift).mul(&y))
}

/// `S` on `H((c,d),(a,b))` read off the transport: `f |-> tau(1_a, f, 1_d)`.
pub fn antipode_from_transport(f: &FlockDatum, c: usize, d: usize, a: usize, b: usize) -> Mat {
    let cat = f.category();
    let k = f.field();
    let m = f.tau(d, c, a);
    let t = f.tau_hom([a, b, d, a, m, d]);
    t.mul(&cat.ident(a).kron(&Mat::identity(k, cat.homdim(m, b)).kron(cat.ident(d))))
}

pub fn antipode(h: &HCategory) -> Result<Antipode, HerdError> {
    let f = &h.flock;
    let n = f.n();
    if !f.has_s_hom() && !f.has_rho() {
        return Err(HerdError::MissingAntipode);
    }
    let hop = Arc::new(h.cat.opposite());
    let objmap: Vec<usize> = (0..n * n)
        .map(|x| {
            let (a, b) = h.unpair(x);
            h.pair(b, a)
        })
        .collect();
    let mut out = Violations::default();
    let mut hommap = Vec::with_capacity(n.pow(4));
    for p in 0..n * n {
        for q in 0..n * n {
            // H^op(p, q) = H(q, p) with q = (c,d), p = (a,b)
            let ((a, b), (c, d)) = (h.unpair(p), h.unpair(q));
            let want = (h.cat.homdim(objmap[p], objmap[q]), h.cat.homdim(q, p));
            let assembled = antipode_from_pairings(f, c, d, a, b).filter(|m| m.shape() == want);
            let m = match (f.s_hom(c, d, a, b), assembled) {
                (Some(s), Some(r)) => {
                    if *s != r {
                        out.push("antipode.consistency", h.cat.witness(&[q, p]));
                    }
                    s.clone()
                }
                (Some(s), None) => s.clone(),
                (None, Some(r)) => r,
                (None, None) => {
                    out.push("antipode.assembly", h.cat.witness(&[q, p]));
                    Mat::zeros(f.field(), want.0, want.1)
                }
            };
            hommap.push(m);
        }
    }
    let functor = LinFunctor::new(hop, h.cat.clone(), objmap, hommap).map_err(|e| {
        HerdError::Antipode({
            let mut v = Violations::default();
            v.push("antipode.shape", e.to_string());
            v
        })
    })?;
    out.extend(functor.check().prefixed("antipode"));
    if !out.passed() {
        return Err(HerdError::Antipode(out));
    }
    let mut involutive = true;
    for x in 0..n * n {
        for y in 0..n * n {
            let (sx, sy) = (functor.objmap[x], functor.objmap[y]);
            // phi in H(x, y) = H^op(y, x) goes to H(sy, sx) = H^op(sx, sy)
            let twice = functor.on_hom(sx, sy).mul(functor.on_hom(y, x));
            if !twice.is_identity() {
                involutive = false;
            }
        }
    }
    Ok(Antipode { functor, involutive })
}

/// The hom bimodule `A(-,-)` over the envelope.
pub fn hom_bimodule(h: &HCategory) -> Module {
    let a = h.base().clone();
    let n = a.n();
    let valdim = (0..n * n).map(|p| a.homdim(p / n, p % n)).collect();
    Module::from_basis_actions(h.envelope.clone(), valdim, |p, q, kk| {
        let ((x, y), (x2, y2)) = ((p / n, p % n), (q / n, q % n));
        let d1 = a.homdim(x2, x);
        let (u, v) = (a.basis(x2, x, kk % d1), a.basis(y, y2, kk / d1));
        a.postcompose(x2, y, y2, &v).mul(&a.precompose(x2, x, y, &u))
    })
}

/// A bimodule as a two-slot diagram `(contravariant, covariant)` over `A`.
pub fn bimodule_diagram(h: &HCategory, m: &Module) -> Diagram {
    let a = h.base().clone();
    let n = a.n();
    Diagram::build(
        a.field(),
        vec![Slot::contra(a.clone()), Slot::co(a.clone())],
        |t| m.valdim[t[0] * n + t[1]],
        |s, t, o, kk| {
            let (x, y) = (t[0], t[1]);
            if s == 0 {
                let phi = a.basis(o, x, kk).kron(a.ident(y));
                m.action(x * n + y, o * n + y, &phi)
            } else {
                let phi = a.ident(x).kron(&a.basis(y, o, kk));
                m.action(x * n + y, x * n + o, &phi)
            }
        },
    )
}

/// Inverse of [`bimodule_diagram`].
pub fn diagram_bimodule(h: &HCategory, d: &Diagram) -> Module {
    let a = h.base().clone();
    let n = a.n();
    let valdim = (0..n * n).map(|p| d.dim(&[p / n, p % n])).collect();
    Module::from_basis_actions(h.envelope.clone(), valdim, |p, q, kk| {
        let ((x, y), (x2, y2)) = ((p / n, p % n), (q / n, q % n));
        let d1 = a.homdim(x2, x);
        let first = d.move_basis(0, &[x, y], x2, kk % d1);
        d.move_basis(1, &[x2, y], y2, kk / d1).mul(first)
    })
}

#[derive(Debug, Clone)]
pub struct PromonoidalData {
    /// Slots `(a, b, c, d, u, v)` with variances `(+, -, +, -, -, +)`; the value
    /// at a tuple is `A(tau(d,c,b), v) (x) A(u, a)`.
    pub p: Diagram,
    /// The unit `j(u, v) = A(u, v)` as a module over H.
    pub j: Module,
}

pub fn promonoidal(h: &HCategory) -> PromonoidalData {
    let f = h.flock.clone();
    let a = f.category().clone();
    let k = f.field();
    let slots = vec![
        Slot::co(a.clone()),
        Slot::contra(a.clone()),
        Slot::co(a.clone()),
        Slot::contra(a.clone()),
        Slot::contra(a.clone()),
        Slot::co(a.clone()),
    ];
    let p = Diagram::build(
        k,
        slots,
        |t| a.homdim(f.tau(t[3], t[2], t[1]), t[5]) * a.homdim(t[4], t[0]),
        |s, t, o, kk| {
            let (xa, xb, xc, xd, xu, xv) = (t[0], t[1], t[2], t[3], t[4], t[5]);
            let m = f.tau(xd, xc, xb);
            let dl = a.homdim(m, xv);
            let dr = a.homdim(xu, xa);
            let id_l = Mat::identity(k, dl);
            let id_r = Mat::identity(k, dr);
            match s {
                0 => id_l.kron(&a.postcompose(xu, xa, o, &a.basis(xa, o, kk))),
                4 => id_l.kron(&a.precompose(o, xu, xa, &a.basis(o, xu, kk))),
                5 => a.postcompose(m, xv, o, &a.basis(xv, o, kk)).kron(&id_r),
                _ => {
                    let (src, tmap) = match s {
                        1 => {
                            let w = a.basis(o, xb, kk);
                            let t6 = [xd, xc, o, xd, xc, xb];
                            (f.tau(xd, xc, o), f.transport(t6, a.ident(xd), a.ident(xc), &w))
                        }
                        2 => {
                            let w = a.basis(xc, o, kk);
                            let t6 = [xd, o, xb, xd, xc, xb];
                            (f.tau(xd, o, xb), f.transport(t6, a.ident(xd), &w, a.ident(xb)))
                        }
                        _ => {
                            let w = a.basis(o, xd, kk);
                            let t6 = [o, xc, xb, xd, xc, xb];
                            (f.tau(o, xc, xb), f.transport(t6, &w, a.ident(xc), a.ident(xb)))
                        }
                    };
                    a.precompose(src, m, xv, &tmap).kron(&id_r)
                }
            }
        },
    );
    let j = unit_module(h);
    PromonoidalData { p, j }
}

/// `j(u, v) = A(u, v)`, with `phi in A(tau(v,u,u'), v')` acting by
/// `xi |-> phi . tau(xi, 1_u, 1_u')`.
pub fn unit_module(h: &HCategory) -> Module {
    let f = h.flock.clone();
    let a = f.category().clone();
    let k = f.field();
    let valdim = (0..h.cat.n()).map(|x| {
        let (u, v) = h.unpair(x);
        a.homdim(u, v)
    });
    let valdim: Vec<usize> = valdim.collect();
    let cat = h.cat.clone();
    Module::from_basis_actions(h.cat.clone(), valdim.clone(), |x, y, kk| {
        let ((u, v), (u2, v2)) = (h.unpair(x), h.unpair(y));
        let m = f.tau(v, u, u2);
        let phi = a.basis(m, v2, kk);
        let mut out = Mat::zeros(k, valdim[y], valdim[x]);
        if f.tau(u, u, u2) != u2 || cat.homdim(x, y) != a.homdim(m, v2) {
            return out;
        }
        for i in 0..valdim[x] {
            let xi = a.basis(u, v, i);
            let t = f.transport([u, u, u2, v, u, u2], &xi, a.ident(u), a.ident(u2));
            out.paste(0, i, &a.compose(u2, m, v2, &t, &phi));
        }
        out
    })
}

/// Structure checks on the promonoidal data.
pub fn check_promonoidal(h: &HCategory, data: &PromonoidalData) -> Violations {
    let f = &h.flock;
    let a = h.base();
    let mut out = data.p.check().prefixed("p");
    for t in 0..data.p.num_tuples() {
        let tu = data.p.tuple_of(t);
        let want = a.homdim(f.tau(tu[3], tu[2], tu[1]), tu[5]) * a.homdim(tu[4], tu[0]);
        if data.p.dim(&tu) != want {
            out.push("p.dimension", a.witness(&tu));
        }
    }
    let jv = data.j.check().prefixed("j");
    let j_ok = jv.passed();
    out.extend(jv);
    if !j_ok {
        return out;
    }
    let restricted = data.j.restrict(&kleisli(h));
    if restricted != hom_bimodule(h) {
        out.push("j.restricts_to_hom", "A^op(x)A");
        return out;
    }
    out.extend(unit_collapse(h, data));
    out
}

/// `coend^{x,y} j(x,y) (x) p((x,y),(c,d),(u,v)) ~ H((c,d),(u,v))` via
/// `[xi (x) alpha (x) beta] |-> alpha . tau(1_d, 1_c, xi . beta)`.
pub fn unit_collapse(h: &HCategory, data: &PromonoidalData) -> Violations {
    let f = &h.flock;
    let a = h.base();
    let k = f.field();
    let n = f.n();
    let mut out = Violations::default();
    let jd = bimodule_diagram(h, &data.j.restrict(&kleisli(h)));
    let t = jd.tensor(&data.p);
    let c1 = t.coend(0, 2);
    let c2 = c1.result.coend(0, 1);
    for r in 0..c2.result.num_tuples() {
        let rest = c2.result.tuple_of(r);
        let (c, d, u, v) = (rest[0], rest[1], rest[2], rest[3]);
        let target = f.tau(d, c, u);
        let dt = a.homdim(target, v);
        let mut per_y = Vec::with_capacity(n);
        let mut ok = true;
        for y in 0..n {
            let rest1 = [y, y, c, d, u, v];
            let mut blocks = Vec::with_capacity(n);
            for x in 0..n {
                let dxi = a.homdim(x, y);
                let m = f.tau(d, c, y);
                let (dal, dbe) = (a.homdim(m, v), a.homdim(u, x));
                let mut e = Mat::zeros(k, dt, dxi * dal * dbe);
                for i in 0..dxi {
                    for j in 0..dal {
                        for l in 0..dbe {
                            let xb = a.compose(u, x, y, &a.basis(u, x, l), &a.basis(x, y, i));
                            let tt = f.transport([d, c, u, d, c, y], a.ident(d), a.ident(c), &xb);
                            let val = a.compose(target, m, v, &tt, &a.basis(m, v, j));
                            e.paste(0, i + dxi * (j + dal * l), &val);
                        }
                    }
                }
                blocks.push(e);
            }
            let eval = Mat::hstack(k, dt, &blocks);
            match c1.descend(&rest1, &eval) {
                Some(phi) => per_y.push(phi),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        let witness = a.witness(&rest);
        if !ok {
            out.push("unit_collapse.well_defined", witness);
            continue;
        }
        match c2.descend(&rest, &Mat::hstack(k, dt, &per_y)) {
            Some(m) if m.is_invertible() => {}
            Some(_) => out.push("unit_collapse.invertible", witness),
            None => out.push("unit_collapse.well_defined", witness),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::FieldSpec;
    use crate::flock::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn g(n: usize, p: u64, t: GroupTransport) -> FlockDatum {
        flock_abelian_group_algebra(&GroupTable::cyclic(n), gf(p), t).unwrap()
    }

    #[test]
    fn pair_category_shapes() {
        let h = build_h(&flock_point(gf(5))).unwrap();
        assert_eq!(h.underlying().n(), 1);
        assert_eq!(h.underlying().homdim(0, 0), 1);
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap();
        let h = build_h(&c2).unwrap();
        assert_eq!(h.underlying().n(), 4);
        assert_eq!(h.underlying().total_hom_dim(), 16);
    }

    #[test]
    fn group_pair_category_is_the_algebra() {
        let f = g(2, 5, GroupTransport::Product);
        let h = build_h(&f).unwrap();
        assert_eq!(h.underlying().comp(0, 0, 0), f.category().comp(0, 0, 0));
    }

    #[test]
    fn kleisli_is_a_functor() {
        for f in
            [flock_point(gf(5)), flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap(), g(2, 5, GroupTransport::Product)]
        {
            let h = build_h(&f).unwrap();
            let k = kleisli(&h);
            assert!(k.check().passed());
            assert!(k.is_surjective_on_objects());
        }
    }

    #[test]
    fn kleisli_on_group_basis() {
        // product transport: u (x) v |-> v u; heap transport: v u^-1
        let f = g(3, 7, GroupTransport::HeapInverse);
        let h = build_h(&f).unwrap();
        let k = kleisli(&h);
        let m = k.on_hom(0, 0);
        for u in 0..3 {
            for v in 0..3 {
                let col = m.col(u + 3 * v);
                assert!(col == Mat::unit(f.field(), 3, (v + 3 - u) % 3));
            }
        }
    }

    #[test]
    fn antipodes() {
        let f = g(2, 5, GroupTransport::Product);
        let h = build_h(&f).unwrap();
        let s = antipode(&h).unwrap();
        assert!(s.involutive);
        let f3 = g(3, 7, GroupTransport::HeapInverse);
        let h3 = build_h(&f3).unwrap();
        let s3 = antipode(&h3).unwrap();
        let m = s3.functor.on_hom(0, 0);
        for x in 0..3 {
            assert!(m.col(x) == Mat::unit(f3.field(), 3, (3 - x) % 3));
        }
        assert_eq!(m, &antipode_from_transport(&f3, 0, 0, 0, 0));
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap();
        let s = antipode(&build_h(&c2).unwrap()).unwrap();
        assert_eq!(s.functor.objmap, vec![0, 2, 1, 3]);
    }

    #[test]
    fn missing_antipode_data() {
        let mut parts = flock_point(gf(5)).into_parts();
        parts.rho = None;
        let f = FlockDatum::from_parts(parts).unwrap();
        assert!(matches!(antipode(&build_h(&f).unwrap()), Err(HerdError::MissingAntipode)));
    }

    #[test]
    fn promonoidal_structure() {
        let f = g(2, 5, GroupTransport::Product);
        let h = build_h(&f).unwrap();
        let d = promonoidal(&h);
        assert_eq!(d.p.dim(&[0; 6]), 4);
        assert_eq!(d.j.valdim, vec![2]);
        assert!(check_promonoidal(&h, &d).passed());
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap();
        let h = build_h(&c2).unwrap();
        let d = promonoidal(&h);
        assert!((0..d.p.num_tuples()).all(|t| d.p.dim(&d.p.tuple_of(t)) == 1));
        assert!(check_promonoidal(&h, &d).passed());
    }

    #[test]
    fn heap_inverse_transport_breaks_the_unit() {
        let f = g(3, 7, GroupTransport::HeapInverse);
        let h = build_h(&f).unwrap();
        let d = promonoidal(&h);
        let v = check_promonoidal(&h, &d);
        assert_eq!(v.failures.len(), 1);
        assert_eq!(v.failures[0].law, "j.restricts_to_hom");
    }

    #[test]
    fn bimodule_round_trip() {
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap();
        let h = build_h(&c2).unwrap();
        let m = hom_bimodule(&h);
        assert!(m.check().passed());
        let d = bimodule_diagram(&h, &m);
        assert!(d.check().passed());
        assert_eq!(diagram_bimodule(&h, &d), m);
    }
}
