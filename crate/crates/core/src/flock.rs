//! Flocks: finite linear categories with a strict ternary heap operation on
//! objects and a matching trilinear transport on morphisms.
//!
//! `tau_hom(a,b,c,a',b',c')` realises
//! `A(a,a') (x) A(b',b) (x) A(c,c') -> A(tau(a,b,c), tau(a',b',c'))`
//! with the middle slot contravariant. Its columns are indexed
//! `f + d_f * (g + d_g * h)`.
//!
//! Pairings are stored as Gram matrices: `sigma(a,b)` has rows indexed by a
//! basis of `A(a,b)` and columns by a basis of `A(b,a)`; `rho(a,b,c,d)` pairs
//! `A(b, tau(a,c,d))` (rows) with `A(a, tau(b,d,c))` (columns).

use std::sync::Arc;

use crate::exactlin::{FieldSpec, Mat};
use crate::lincat::{expect_count, FinLinCat, ShapeError, Violation, Violations};

/// Plain tables of a flock, open for editing before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlockParts {
    pub category: FinLinCat,
    /// Indexed `(a * n + b) * n + c`.
    pub tau_obj: Vec<usize>,
    /// Indexed lexicographically by the sextuple `(a,b,c,a',b',c')`.
    pub tau_hom: Vec<Mat>,
    /// Indexed `a * n + b`.
    pub sigma: Vec<Mat>,
    /// Indexed lexicographically by `(a,b,c,d)`.
    pub rho: Option<Vec<Mat>>,
    /// Antipode on hom spaces of the pair category, indexed by
    /// `src * n^2 + dst` where `src = c * n + d`, `dst = a * n + b`; maps
    /// `A(tau(d,c,a), b) -> A(tau(a,b,d), c)`.
    pub s_hom: Option<Vec<Mat>>,
}

/// A shape-validated flock. Its laws are checked by [`check_flock`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlockDatum {
    a: Arc<FinLinCat>,
    tau_obj: Vec<usize>,
    tau_hom: Vec<Mat>,
    sigma: Vec<Mat>,
    rho: Option<Vec<Mat>>,
    s_hom: Option<Vec<Mat>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlockError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("heap table violates {0}")]
    HeapLaw(Violation),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("group is not abelian: {0} and {1} do not commute")]
    NonAbelian(String, String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
}

fn check_matrix(what: impl FnOnce() -> String, m: &Mat, shape: (usize, usize), field: FieldSpec) -> Result<(), ShapeError> {
    if m.shape() != shape || m.field() != field {
        return Err(ShapeError::Other(format!(
            "{}: expected {}x{} over {field}, found {}x{} over {}",
            what(),
            shape.0,
            shape.1,
            m.rows(),
            m.cols(),
            m.field()
        )));
    }
    Ok(())
}

impl FlockDatum {
    pub fn from_parts(parts: FlockParts) -> Result<FlockDatum, ShapeError> {
        let FlockParts { category, tau_obj, tau_hom, sigma, rho, s_hom } = parts;
        let n = category.n();
        let k = category.field();
        expect_count("tau table", tau_obj.len(), n * n * n)?;
        if let Some(bad) = tau_obj.iter().find(|&&t| t >= n) {
            return Err(ShapeError::Other(format!("tau table names object {bad} of {n}")));
        }
        expect_count("tau_hom table", tau_hom.len(), n.pow(6))?;
        expect_count("sigma table", sigma.len(), n * n)?;
        let f = FlockDatum { a: Arc::new(category), tau_obj, tau_hom, sigma, rho: None, s_hom: None };
        let a = &f.a;
        for t in sextuples(n) {
            let [x, y, z, x2, y2, z2] = t;
            let rows = a.homdim(f.tau(x, y, z), f.tau(x2, y2, z2));
            let cols = a.homdim(x, x2) * a.homdim(y2, y) * a.homdim(z, z2);
            check_matrix(|| format!("tau_hom at {}", a.witness(&t)), f.tau_hom(t), (rows, cols), k)?;
        }
        for x in 0..n {
            for y in 0..n {
                let shape = (a.homdim(x, y), a.homdim(y, x));
                check_matrix(|| format!("sigma at {}", a.witness(&[x, y])), f.sigma(x, y), shape, k)?;
            }
        }
        if let Some(rho) = &rho {
            expect_count("rho table", rho.len(), n.pow(4))?;
            for (i, m) in rho.iter().enumerate() {
                let (w, x, y, z) = (i / (n * n * n), i / (n * n) % n, i / n % n, i % n);
                let shape = (a.homdim(x, f.tau(w, y, z)), a.homdim(w, f.tau(x, z, y)));
                check_matrix(|| format!("rho at {}", a.witness(&[w, x, y, z])), m, shape, k)?;
            }
        }
        if let Some(s) = &s_hom {
            expect_count("s_hom table", s.len(), n.pow(4))?;
            for (i, m) in s.iter().enumerate() {
                let (c, d, x, y) = (i / (n * n * n), i / (n * n) % n, i / n % n, i % n);
                let shape = (a.homdim(f.tau(x, y, d), c), a.homdim(f.tau(d, c, x), y));
                check_matrix(|| format!("s_hom at {}", a.witness(&[c, d, x, y])), m, shape, k)?;
            }
        }
        Ok(FlockDatum { rho, s_hom, ..f })
    }

    pub fn into_parts(self) -> FlockParts {
        FlockParts {
            category: Arc::try_unwrap(self.a).unwrap_or_else(|a| (*a).clone()),
            tau_obj: self.tau_obj,
            tau_hom: self.tau_hom,
            sigma: self.sigma,
            rho: self.rho,
            s_hom: self.s_hom,
        }
    }

    pub fn to_parts(&self) -> FlockParts {
        self.clone().into_parts()
    }

    pub fn category(&self) -> &Arc<FinLinCat> {
        &self.a
    }

    pub fn field(&self) -> FieldSpec {
        self.a.field()
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn tau(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.n();
        self.tau_obj[(a * n + b) * n + c]
    }

    pub fn tau_hom(&self, t: [usize; 6]) -> &Mat {
        let n = self.n();
        &self.tau_hom[t.iter().fold(0, |acc, &x| acc * n + x)]
    }

    /// `tau(f, g, h)` for column vectors `f: a -> a'`, `g: b' -> b`, `h: c -> c'`.
    pub fn transport(&self, t: [usize; 6], f: &Mat, g: &Mat, h: &Mat) -> Mat {
        self.tau_hom(t).mul(&f.kron(&g.kron(h)))
    }

    pub fn sigma(&self, a: usize, b: usize) -> &Mat {
        &self.sigma[a * self.n() + b]
    }

    pub fn rho(&self, a: usize, b: usize, c: usize, d: usize) -> Option<&Mat> {
        let n = self.n();
        self.rho.as_ref().map(|r| &r[((a * n + b) * n + c) * n + d])
    }

    pub fn has_rho(&self) -> bool {
        self.rho.is_some()
    }

    /// The supplied antipode map on `H((c,d),(a,b))`, if any.
    pub fn s_hom(&self, c: usize, d: usize, a: usize, b: usize) -> Option<&Mat> {
        let n = self.n();
        self.s_hom.as_ref().map(|s| &s[((c * n + d) * n + a) * n + b])
    }

    pub fn has_s_hom(&self) -> bool {
        self.s_hom.is_some()
    }
}

fn sextuples(n: usize) -> impl Iterator<Item = [usize; 6]> {
    (0..n.pow(6)).map(move |mut i| {
        let mut t = [0; 6];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

/// Heap laws on an object table, in the order right unit, left unit,
/// para-associativity.
pub fn heap_violations(n: usize, tau: impl Fn(usize, usize, usize) -> usize, name: impl Fn(&[usize]) -> String) -> Violations {
    let mut out = Violations::default();
    for a in 0..n {
        for b in 0..n {
            if tau(a, b, b) != a {
                out.push("heap.right_unit", name(&[a, b]));
            }
            if tau(a, a, b) != b {
                out.push("heap.left_unit", name(&[a, b]));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        if tau(tau(a, b, c), d, e) != tau(a, b, tau(c, d, e)) {
                            out.push("heap.para_associativity", name(&[a, b, c, d, e]));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive check of every flock law. Hom-level laws are only examined
/// once the object-level heap laws hold.
pub fn check_flock(f: &FlockDatum) -> Violations {
    let a = &f.a;
    let n = f.n();
    let mut out = a.check();
    let heap = heap_violations(n, |x, y, z| f.tau(x, y, z), |t| a.witness(t));
    if !heap.passed() {
        out.extend(heap);
        return out;
    }
    let basis = |x: usize, y: usize| (0..a.homdim(x, y)).map(move |i| a.basis(x, y, i));

    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let t = f.transport([x, y, z, x, y, z], a.ident(x), a.ident(y), a.ident(z));
                if &t != a.ident(f.tau(x, y, z)) {
                    out.push("tau.identity", a.witness(&[x, y, z]));
                }
            }
        }
    }

    // tau(f'f, g g', h'h) = tau(f',g',h') . tau(f,g,h)
    for idx in 0..n.pow(9) {
        let o: Vec<usize> = (0..9).map(|i| idx / n.pow(8 - i) % n).collect();
        let (x0, x1, x2, y0, y1, y2, z0, z1, z2) = (o[0], o[1], o[2], o[3], o[4], o[5], o[6], o[7], o[8]);
        let (m0, m1) = (f.tau(x0, y0, z0), f.tau(x1, y1, z1));
        let m2 = f.tau(x2, y2, z2);
        'tuple: for f1 in basis(x0, x1) {
            for f2 in basis(x1, x2) {
                let ff = a.compose(x0, x1, x2, &f1, &f2);
                for g1 in basis(y1, y0) {
                    for g2 in basis(y2, y1) {
                        let gg = a.compose(y2, y1, y0, &g2, &g1);
                        for h1 in basis(z0, z1) {
                            let t1 = f.transport([x0, y0, z0, x1, y1, z1], &f1, &g1, &h1);
                            for h2 in basis(z1, z2) {
                                let hh = a.compose(z0, z1, z2, &h1, &h2);
                                let lhs = f.transport([x0, y0, z0, x2, y2, z2], &ff, &gg, &hh);
                                let t2 = f.transport([x1, y1, z1, x2, y2, z2], &f2, &g2, &h2);
                                if lhs != a.compose(m0, m1, m2, &t1, &t2) {
                                    out.push("tau.functoriality", a.witness(&o));
                                    break 'tuple;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for g in basis(y, z) {
                    if f.transport([y, x, x, z, x, x], &g, a.ident(x), a.ident(x)) != g {
                        out.push("tau.strict_first", a.witness(&[y, z, x]));
                        break;
                    }
                }
                for g in basis(y, z) {
                    if f.transport([x, x, y, x, x, z], a.ident(x), a.ident(x), &g) != g {
                        out.push("tau.strict_last", a.witness(&[y, z, x]));
                        break;
                    }
                }
            }
        }
    }

    // tau(tau(f,g,h), k, l) = tau(f, g, tau(h,k,l))
    for idx in 0..n.pow(10) {
        let o: Vec<usize> = (0..10).map(|i| idx / n.pow(9 - i) % n).collect();
        let (p, p2, q, q2, r, r2, s, s2, u, u2) = (o[0], o[1], o[2], o[3], o[4], o[5], o[6], o[7], o[8], o[9]);
        'tuple: for e1 in basis(p, p2) {
            for e2 in basis(q2, q) {
                for e3 in basis(r, r2) {
                    let inner = f.transport([p, q, r, p2, q2, r2], &e1, &e2, &e3);
                    let (t0, t1) = (f.tau(p, q, r), f.tau(p2, q2, r2));
                    for e4 in basis(s2, s) {
                        for e5 in basis(u, u2) {
                            let lhs = f.transport([t0, s, u, t1, s2, u2], &inner, &e4, &e5);
                            let right = f.transport([r, s, u, r2, s2, u2], &e3, &e4, &e5);
                            let (w0, w1) = (f.tau(r, s, u), f.tau(r2, s2, u2));
                            let rhs = f.transport([p, q, w0, p2, q2, w1], &e1, &e2, &right);
                            if lhs != rhs {
                                out.push("tau.para_associativity", a.witness(&o));
                                break 'tuple;
                            }
                        }
                    }
                }
            }
        }
    }

    for x in 0..n {
        for y in 0..n {
            if !f.sigma(x, y).is_invertible() {
                out.push("sigma.nondegenerate", a.witness(&[x, y]));
            }
        }
    }
    // sigma_{x,z}(g.f, h) = sigma_{x,y}(f, h.g)
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                'tuple: for e1 in basis(x, y) {
                    for e2 in basis(y, z) {
                        let gf = a.compose(x, y, z, &e1, &e2);
                        for e3 in basis(z, x) {
                            let hg = a.compose(y, z, x, &e2, &e3);
                            let lhs = gf.transpose().mul(f.sigma(x, z)).mul(&e3);
                            let rhs = e1.transpose().mul(f.sigma(x, y)).mul(&hg);
                            if lhs != rhs {
                                out.push("sigma.trace", a.witness(&[x, y, z]));
                                break 'tuple;
                            }
                        }
                    }
                }
            }
        }
    }
    if f.rho.is_some() {
        for i in 0..n.pow(4) {
            let t = [i / (n * n * n), i / (n * n) % n, i / n % n, i % n];
            if !f.rho(t[0], t[1], t[2], t[3]).is_some_and(Mat::is_invertible) {
                out.push("rho.nondegenerate", a.witness(&t));
            }
        }
    }
    out
}

/// The one-object flock with hom space `k`.
pub fn flock_point(field: FieldSpec) -> FlockDatum {
    let one = Mat::identity(field, 1);
    FlockDatum::from_parts(FlockParts {
        category: FinLinCat::point(field),
        tau_obj: vec![0],
        tau_hom: vec![one.clone()],
        sigma: vec![one.clone()],
        rho: Some(vec![one]),
        s_hom: None,
    })
    .expect("point flock is well shaped")
}

/// A ternary operation on `{0, .., n-1}`, indexed `(a * n + b) * n + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapTable {
    pub size: usize,
    pub table: Vec<usize>,
}

impl HeapTable {
    /// `tau(a,b,c) = a - b + c mod n`.
    pub fn affine_cyclic(n: usize) -> HeapTable {
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    table.push((a + n - b + c) % n);
                }
            }
        }
        HeapTable { size: n, table }
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> usize {
        self.table[(a * self.size + b) * self.size + c]
    }

    pub fn violations(&self) -> Violations {
        heap_violations(self.size, |a, b, c| self.get(a, b, c), |t| format!("{t:?}"))
    }
}

/// The codiscrete category on a heap: every hom space is `k` and every
/// transport and pairing is `[1]`.
pub fn flock_codiscrete(heap: &HeapTable, field: FieldSpec) -> Result<FlockDatum, FlockError> {
    let n = heap.size;
    expect_count("heap table", heap.table.len(), n * n * n)?;
    if heap.table.iter().any(|&t| t >= n) {
        return Err(ShapeError::Other("heap table value out of range".into()).into());
    }
    if let Some(v) = heap.violations().failures.into_iter().next() {
        return Err(FlockError::HeapLaw(v));
    }
    let one = Mat::identity(field, 1);
    let names = (0..n).map(|i| i.to_string()).collect();
    Ok(FlockDatum::from_parts(FlockParts {
        category: FinLinCat::codiscrete(field, names),
        tau_obj: heap.table.clone(),
        tau_hom: vec![one.clone(); n.pow(6)],
        sigma: vec![one.clone(); n * n],
        rho: Some(vec![one; n.pow(4)]),
        s_hom: None,
    })?)
}

/// A finite group by its multiplication table `mul[x * n + y] = x y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    pub names: Vec<String>,
    pub mul: Vec<usize>,
}

impl GroupTable {
    pub fn cyclic(n: usize) -> GroupTable {
        GroupTable { names: (0..n).map(|i| format!("g{i}")).collect(), mul: (0..n * n).map(|i| (i / n + i % n) % n).collect() }
    }

    /// The symmetric group on three letters, elements listed as permutations
    /// of `[0,1,2]` in lexicographic order.
    pub fn symmetric3() -> GroupTable {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mut mul = Vec::with_capacity(36);
        for p in &perms {
            for q in &perms {
                mul.push(find([p[q[0]], p[q[1]], p[q[2]]]));
            }
        }
        GroupTable { names: perms.iter().map(|p| format!("s{}{}{}", p[0], p[1], p[2])).collect(), mul }
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.order() + y]
    }

    /// Validate the table and return the identity and the inverse map.
    pub fn structure(&self) -> Result<(usize, Vec<usize>), FlockError> {
        let n = self.order();
        if n == 0 || self.mul.len() != n * n || self.mul.iter().any(|&m| m >= n) {
            return Err(FlockError::NotAGroup("table has the wrong shape".into()));
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| self.mul(e, x) == x && self.mul(x, e) == x))
            .ok_or_else(|| FlockError::NotAGroup("no identity element".into()))?;
        let mut inv = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| self.mul(x, y) == e && self.mul(y, x) == e)
                .ok_or_else(|| FlockError::NotAGroup(format!("{} has no inverse", self.names[x])))?;
            inv.push(y);
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                        return Err(FlockError::NotAGroup(format!(
                            "associativity fails at ({},{},{})",
                            self.names[x], self.names[y], self.names[z]
                        )));
                    }
                }
            }
        }
        Ok((e, inv))
    }

    pub fn noncommuting_pair(&self) -> Option<(usize, usize)> {
        let n = self.order();
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).find(|&(x, y)| self.mul(x, y) != self.mul(y, x))
    }
}

/// How the group algebra flock transports basis elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupTransport {
    /// `(x, y, z) |-> x y z`.
    #[default]
    Product,
    /// `(x, y, z) |-> x y^-1 z`.
    HeapInverse,
}

/// Some diagnostic when `|G|` is not invertible in the field.
pub fn group_order_warning(g: &GroupTable, field: FieldSpec) -> Option<String> {
    let p = field.characteristic();
    (p != 0 && (g.order() as u64).is_multiple_of(p))
        .then(|| format!("group order {} is divisible by the characteristic {p}", g.order()))
}

/// The one-object flock whose hom space is the group algebra `k[G]`.
pub fn flock_abelian_group_algebra(
    g: &GroupTable,
    field: FieldSpec,
    transport: GroupTransport,
) -> Result<FlockDatum, FlockError> {
    g.structure()?;
    if let Some((x, y)) = g.noncommuting_pair() {
        return Err(FlockError::NonAbelian(g.names[x].clone(), g.names[y].clone()));
    }
    group_algebra_unchecked(g, field, transport)
}

/// As [`flock_abelian_group_algebra`] without the commutativity test; the
/// result fails `tau.functoriality` for non-abelian groups.
pub fn group_algebra_unchecked(g: &GroupTable, field: FieldSpec, transport: GroupTransport) -> Result<FlockDatum, FlockError> {
    let (e, inv) = g.structure()?;
    let n = g.order();
    let mut comp = Mat::zeros(field, n, n * n);
    for x in 0..n {
        for y in 0..n {
            // column x + n*y holds y . x
            comp.set(g.mul(y, x), x + n * y, field.one());
        }
    }
    let category = FinLinCat::new(field, vec!["*".into()], vec![n], vec![comp], vec![Mat::unit(field, n, e)])?;
    let mut tau = Mat::zeros(field, n, n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let mid = match transport {
                    GroupTransport::Product => y,
                    GroupTransport::HeapInverse => inv[y],
                };
                tau.set(g.mul(g.mul(x, mid), z), x + n * (y + n * z), field.one());
            }
        }
    }
    let gram = |pred: &dyn Fn(usize, usize) -> bool| {
        let mut m = Mat::zeros(field, n, n);
        for x in 0..n {
            for y in 0..n {
                if pred(x, y) {
                    m.set(x, y, field.one());
                }
            }
        }
        m
    };
    let sigma = gram(&|x, y| y == inv[x]);
    let rho = match transport {
        GroupTransport::Product => gram(&|x, y| x == inv[y]),
        GroupTransport::HeapInverse => gram(&|x, y| x == y),
    };
    Ok(FlockDatum::from_parts(FlockParts {
        category,
        tau_obj: vec![0],
        tau_hom: vec![tau],
        sigma: vec![sigma],
        rho: Some(vec![rho]),
        s_hom: None,
    })?)
}

/// Componentwise product of two flocks over the same field.
pub fn flock_product(f1: &FlockDatum, f2: &FlockDatum) -> Result<FlockDatum, FlockError> {
    if f1.field() != f2.field() {
        return Err(FlockError::FieldMismatch(f1.field(), f2.field()));
    }
    let (a1, a2) = (f1.category(), f2.category());
    let (n1, n2) = (f1.n(), f2.n());
    let n = n1 * n2;
    let category = a1.tensor(a2);
    let split = |i: usize| (i / n2, i % n2);
    let join = |x: usize, y: usize| x * n2 + y;
    let field = f1.field();

    let mut tau_obj = Vec::with_capacity(n * n * n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let ((x1, x2), (y1, y2), (z1, z2)) = (split(x), split(y), split(z));
                tau_obj.push(join(f1.tau(x1, y1, z1), f2.tau(x2, y2, z2)));
            }
        }
    }

    let mut tau_hom = Vec::with_capacity(n.pow(6));
    for t in sextuples(n) {
        let s: Vec<(usize, usize)> = t.iter().map(|&o| split(o)).collect();
        let t1 = [s[0].0, s[1].0, s[2].0, s[3].0, s[4].0, s[5].0];
        let t2 = [s[0].1, s[1].1, s[2].1, s[3].1, s[4].1, s[5].1];
        let (m1, m2) = (f1.tau_hom(t1), f2.tau_hom(t2));
        let d1 = [a1.homdim(t1[0], t1[3]), a1.homdim(t1[4], t1[1]), a1.homdim(t1[2], t1[5])];
        let d2 = [a2.homdim(t2[0], t2[3]), a2.homdim(t2[4], t2[1]), a2.homdim(t2[2], t2[5])];
        let d = [d1[0] * d2[0], d1[1] * d2[1], d1[2] * d2[2]];
        let mut m = Mat::zeros(field, m1.rows() * m2.rows(), d[0] * d[1] * d[2]);
        for col in 0..m.cols() {
            let (i, j, l) = (col % d[0], col / d[0] % d[1], col / (d[0] * d[1]));
            let c1 = (i % d1[0]) + d1[0] * ((j % d1[1]) + d1[1] * (l % d1[2]));
            let c2 = (i / d1[0]) + d2[0] * ((j / d1[1]) + d2[1] * (l / d1[2]));
            let v = m1.col(c1).kron(&m2.col(c2));
            m.paste(0, col, &v);
        }
        tau_hom.push(m);
    }

    let mut sigma = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let ((x1, x2), (y1, y2)) = (split(x), split(y));
            sigma.push(f1.sigma(x1, y1).kron(f2.sigma(x2, y2)));
        }
    }

    let quad = |i: usize| [i / (n * n * n), i / (n * n) % n, i / n % n, i % n];
    let rho = (f1.has_rho() && f2.has_rho()).then(|| {
        (0..n.pow(4))
            .map(|i| {
                let q = quad(i).map(split);
                let r1 = f1.rho(q[0].0, q[1].0, q[2].0, q[3].0).unwrap();
                let r2 = f2.rho(q[0].1, q[1].1, q[2].1, q[3].1).unwrap();
                r1.kron(r2)
            })
            .collect()
    });
    let s_hom = (f1.has_s_hom() && f2.has_s_hom()).then(|| {
        (0..n.pow(4))
            .map(|i| {
                let q = quad(i).map(split);
                let s1 = f1.s_hom(q[0].0, q[1].0, q[2].0, q[3].0).unwrap();
                let s2 = f2.s_hom(q[0].1, q[1].1, q[2].1, q[3].1).unwrap();
                s1.kron(s2)
            })
            .collect()
    });
    Ok(FlockDatum::from_parts(FlockParts { category, tau_obj, tau_hom, sigma, rho, s_hom })?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn point_passes() {
        let f = flock_point(gf(5));
        assert_eq!(f.n(), 1);
        assert_eq!(f.category().homdim(0, 0), 1);
        assert!(check_flock(&f).passed());
    }

    #[test]
    fn codiscrete_heaps_pass() {
        for n in [2, 3] {
            let f = flock_codiscrete(&HeapTable::affine_cyclic(n), gf(5)).unwrap();
            assert_eq!(f.n(), n);
            assert!(check_flock(&f).passed());
        }
    }

    #[test]
    fn bad_heap_names_the_law() {
        let mut h = HeapTable::affine_cyclic(2);
        h.table[1] = 0; // tau(0,0,1) = 0
        match flock_codiscrete(&h, gf(5)) {
            Err(FlockError::HeapLaw(v)) => assert_eq!(v.law, "heap.left_unit"),
            other => panic!("expected heap law error, got {other:?}"),
        }
    }

    #[test]
    fn group_algebras_pass() {
        for (n, p) in [(2, 5), (3, 7)] {
            for t in [GroupTransport::Product, GroupTransport::HeapInverse] {
                let f = flock_abelian_group_algebra(&GroupTable::cyclic(n), gf(p), t).unwrap();
                assert_eq!(f.category().homdim(0, 0), n);
                assert!(check_flock(&f).passed(), "{n} {t:?}: {:?}", check_flock(&f));
            }
        }
    }

    #[test]
    fn symmetric_group_rejected_and_fails_functoriality() {
        let s3 = GroupTable::symmetric3();
        assert!(matches!(flock_abelian_group_algebra(&s3, gf(7), GroupTransport::Product), Err(FlockError::NonAbelian(..))));
        let f = group_algebra_unchecked(&s3, gf(7), GroupTransport::Product).unwrap();
        let v = check_flock(&f);
        assert!(v.failures.iter().any(|x| x.law == "tau.functoriality"));
        assert!(v.failures.iter().all(|x| x.law.starts_with("tau.")));
    }

    #[test]
    fn products() {
        let c2 = flock_codiscrete(&HeapTable::affine_cyclic(2), gf(5)).unwrap();
        let g2 = flock_abelian_group_algebra(&GroupTable::cyclic(2), gf(5), GroupTransport::Product).unwrap();
        let p = flock_product(&c2, &g2).unwrap();
        assert_eq!(p.n(), 2);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(p.category().homdim(x, y), 2);
            }
        }
        assert!(check_flock(&p).passed());
        let unit = flock_product(&flock_point(gf(5)), &g2).unwrap();
        assert_eq!(unit.to_parts().tau_hom, g2.to_parts().tau_hom);
        assert!(matches!(flock_product(&c2, &flock_point(gf(7))), Err(FlockError::FieldMismatch(..))));
    }

    #[test]
    fn order_warning() {
        assert!(group_order_warning(&GroupTable::cyclic(5), gf(5)).is_some());
        assert!(group_order_warning(&GroupTable::cyclic(2), gf(5)).is_none());
    }
}
