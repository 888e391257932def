//! Finite `Vect_k`-enriched categories, linear functors and modules.
//!
//! Conventions used throughout the crate:
//!
//! * `hom(a, b)` is the space of maps `a -> b`.
//! * `comp(a, b, c)` has shape `homdim(a,c) x (homdim(a,b) * homdim(b,c))`
//!   and sends `f (x) g` (column `f + homdim(a,b) * g`) to `g . f`.
//! * A module is a covariant linear functor into `Vect_k`. Its action matrix at
//!   `(x, y)` sends `phi (x) m` (column `phi + homdim(x,y) * m`) to `M(phi)(m)`.
//! * A linear map `V -> W` is vectorised with the `W` index running fastest
//!   (`w + dim W * v`), i.e. as an element of `W (x) V*`.

use std::fmt;
use std::sync::Arc;

use crate::exactlin::{kernel, FieldSpec, Mat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("{what}: expected shape {expected:?}, found {found:?}")]
    Matrix { what: String, expected: (usize, usize), found: (usize, usize) },
    #[error("{what}: expected {expected} entries, found {found}")]
    Count { what: String, expected: usize, found: usize },
    #[error("{0}")]
    Other(String),
}

fn expect_shape(what: impl FnOnce() -> String, m: &Mat, expected: (usize, usize)) -> Result<(), ShapeError> {
    if m.shape() != expected {
        return Err(ShapeError::Matrix { what: what(), expected, found: m.shape() });
    }
    Ok(())
}

pub(crate) fn expect_count(what: &str, found: usize, expected: usize) -> Result<(), ShapeError> {
    if found != expected {
        return Err(ShapeError::Count { what: what.to_string(), expected, found });
    }
    Ok(())
}

/// One failed law, with the object tuple that witnesses it.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Violation {
    pub law: String,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.law, self.witness)
    }
}

/// Result of an axiom check. Entries are in lexicographic order of the
/// witnessing object indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Violations {
    pub failures: Vec<Violation>,
}

impl Violations {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, law: impl Into<String>, witness: impl Into<String>) {
        self.failures.push(Violation { law: law.into(), witness: witness.into() });
    }

    pub fn extend(&mut self, other: Violations) {
        self.failures.extend(other.failures);
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        for v in &mut self.failures {
            v.law = format!("{prefix}.{}", v.law);
        }
        self
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failures.as_slice() {
            [] => write!(f, "no failures"),
            [only] => write!(f, "{only}"),
            [first, rest @ ..] => write!(f, "{first} (and {} more)", rest.len()),
        }
    }
}

/// A finite linear category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinLinCat {
    field: FieldSpec,
    objects: Vec<String>,
    homdim: Vec<usize>,
    comp: Vec<Mat>,
    ident: Vec<Mat>,
}

impl FinLinCat {
    /// Assemble a category from its tables. `homdim` and `ident` are indexed by
    /// `a * n + b` and `a`; `comp` by `(a * n + b) * n + c`. Only shapes are
    /// validated here; the axioms are checked by [`FinLinCat::check`].
    pub fn new(
        field: FieldSpec,
        objects: Vec<String>,
        homdim: Vec<usize>,
        comp: Vec<Mat>,
        ident: Vec<Mat>,
    ) -> Result<Self, ShapeError> {
        let n = objects.len();
        expect_count("homdim table", homdim.len(), n * n)?;
        expect_count("composition table", comp.len(), n * n * n)?;
        expect_count("identity table", ident.len(), n)?;
        let cat = FinLinCat { field, objects, homdim, comp, ident };
        for a in 0..n {
            expect_shape(|| format!("identity at {}", cat.objects[a]), &cat.ident[a], (cat.homdim(a, a), 1))?;
            for b in 0..n {
                for c in 0..n {
                    let expected = (cat.homdim(a, c), cat.homdim(a, b) * cat.homdim(b, c));
                    expect_shape(|| format!("composition at {}", cat.witness(&[a, b, c])), cat.comp(a, b, c), expected)?;
                }
            }
        }
        if let Some(m) = cat.comp.iter().chain(&cat.ident).find(|m| m.field() != field) {
            return Err(ShapeError::Other(format!("matrix over {} in a category over {field}", m.field())));
        }
        Ok(cat)
    }

    /// The one-object category whose only hom space is `k`.
    pub fn point(field: FieldSpec) -> Self {
        FinLinCat {
            field,
            objects: vec!["*".into()],
            homdim: vec![1],
            comp: vec![Mat::identity(field, 1)],
            ident: vec![Mat::identity(field, 1)],
        }
    }

    /// Codiscrete category: every hom space is `k`, composition is multiplication.
    pub fn codiscrete(field: FieldSpec, objects: Vec<String>) -> Self {
        let n = objects.len();
        FinLinCat {
            field,
            objects,
            homdim: vec![1; n * n],
            comp: vec![Mat::identity(field, 1); n * n * n],
            ident: vec![Mat::identity(field, 1); n],
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_name(&self, a: usize) -> &str {
        &self.objects[a]
    }

    pub fn homdim(&self, a: usize, b: usize) -> usize {
        self.homdim[a * self.n() + b]
    }

    pub fn comp(&self, a: usize, b: usize, c: usize) -> &Mat {
        let n = self.n();
        &self.comp[(a * n + b) * n + c]
    }

    pub fn ident(&self, a: usize) -> &Mat {
        &self.ident[a]
    }

    /// Replace one composition matrix (used to build deliberately broken instances).
    pub fn set_comp(&mut self, a: usize, b: usize, c: usize, m: Mat) {
        let n = self.n();
        self.comp[(a * n + b) * n + c] = m;
    }

    pub fn set_ident(&mut self, a: usize, v: Mat) {
        self.ident[a] = v;
    }

    pub fn total_hom_dim(&self) -> usize {
        self.homdim.iter().sum()
    }

    /// `g . f` for column vectors `f in hom(a,b)`, `g in hom(b,c)`.
    pub fn compose(&self, a: usize, b: usize, c: usize, f: &Mat, g: &Mat) -> Mat {
        self.comp(a, b, c).mul(&f.kron(g))
    }

    /// The map `hom(a,b) -> hom(a,c)`, `f |-> g . f`.
    pub fn postcompose(&self, a: usize, b: usize, c: usize, g: &Mat) -> Mat {
        self.comp(a, b, c).mul(&Mat::identity(self.field, self.homdim(a, b)).kron(g))
    }

    /// The map `hom(b,c) -> hom(a,c)`, `g |-> g . f`.
    pub fn precompose(&self, a: usize, b: usize, c: usize, f: &Mat) -> Mat {
        self.comp(a, b, c).mul(&f.kron(&Mat::identity(self.field, self.homdim(b, c))))
    }

    pub fn basis(&self, a: usize, b: usize, k: usize) -> Mat {
        Mat::unit(self.field, self.homdim(a, b), k)
    }

    pub fn witness(&self, objs: &[usize]) -> String {
        let names: Vec<&str> = objs.iter().map(|&o| self.object_name(o)).collect();
        format!("({})", names.join(","))
    }

    /// Check associativity and both unit laws exactly.
    pub fn check(&self) -> Violations {
        let n = self.n();
        let k = self.field;
        let mut out = Violations::default();
        for a in 0..n {
            for b in 0..n {
                let dab = self.homdim(a, b);
                let left = self.comp(a, a, b).mul(&self.ident(a).kron(&Mat::identity(k, dab)));
                if !left.is_identity() {
                    out.push("category.left_unit", self.witness(&[a, b]));
                }
                let right = self.comp(a, b, b).mul(&Mat::identity(k, dab).kron(self.ident(b)));
                if !right.is_identity() {
                    out.push("category.right_unit", self.witness(&[a, b]));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let lhs = self.comp(a, b, d).mul(&Mat::identity(k, self.homdim(a, b)).kron(self.comp(b, c, d)));
                        let rhs = self.comp(a, c, d).mul(&self.comp(a, b, c).kron(&Mat::identity(k, self.homdim(c, d))));
                        if lhs != rhs {
                            out.push("category.associativity", self.witness(&[a, b, c, d]));
                        }
                    }
                }
            }
        }
        out
    }

    /// The opposite category; `opposite(opposite(C)) == C`.
    pub fn opposite(&self) -> FinLinCat {
        let n = self.n();
        let mut homdim = vec![0; n * n];
        let mut comp = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                homdim[a * n + b] = self.homdim(b, a);
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    comp.push(self.comp(c, b, a).swap_tensor_cols(self.homdim(c, b), self.homdim(b, a)));
                }
            }
        }
        FinLinCat { field: self.field, objects: self.objects.clone(), homdim, comp, ident: self.ident.clone() }
    }

    /// Tensor product `C (x) D`. Objects are pairs in lexicographic order
    /// (index `c * |D| + d`), hom spaces are Kronecker products.
    pub fn tensor(&self, other: &FinLinCat) -> FinLinCat {
        assert_eq!(self.field, other.field, "field mismatch");
        let (n1, n2) = (self.n(), other.n());
        let n = n1 * n2;
        let pair = |i: usize| (i / n2, i % n2);
        let objects = (0..n)
            .map(|i| {
                let (x, y) = pair(i);
                format!("({},{})", self.object_name(x), other.object_name(y))
            })
            .collect();
        let mut homdim = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let ((a1, a2), (b1, b2)) = (pair(i), pair(j));
                homdim[i * n + j] = self.homdim(a1, b1) * other.homdim(a2, b2);
            }
        }
        let mut comp = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let ((a1, a2), (b1, b2), (c1, c2)) = (pair(i), pair(j), pair(l));
                    comp.push(tensor_bilinear(
                        self.comp(a1, b1, c1),
                        other.comp(a2, b2, c2),
                        self.homdim(a1, b1),
                        other.homdim(a2, b2),
                    ));
                }
            }
        }
        let ident = (0..n)
            .map(|i| {
                let (x, y) = pair(i);
                self.ident(x).kron(other.ident(y))
            })
            .collect();
        FinLinCat { field: self.field, objects, homdim, comp, ident }
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

/// Given bilinear maps `m1: U1 (x) V1 -> W1` and `m2: U2 (x) V2 -> W2`,
/// the bilinear map `(U1 (x) U2) (x) (V1 (x) V2) -> W1 (x) W2`.
pub(crate) fn tensor_bilinear(m1: &Mat, m2: &Mat, u1: usize, u2: usize) -> Mat {
    let (w1, w2) = (m1.rows(), m2.rows());
    let v1 = m1.cols().checked_div(u1).unwrap_or(0);
    let v2 = m2.cols().checked_div(u2).unwrap_or(0);
    let (u, v) = (u1 * u2, v1 * v2);
    let mut out = Mat::zeros(m1.field(), w1 * w2, u * v);
    for r1 in 0..w1 {
        for r2 in 0..w2 {
            for f1 in 0..u1 {
                for g1 in 0..v1 {
                    let x = m1.get(r1, f1 + u1 * g1);
                    if x.is_zero() {
                        continue;
                    }
                    for f2 in 0..u2 {
                        for g2 in 0..v2 {
                            let y = m2.get(r2, f2 + u2 * g2);
                            if y.is_zero() {
                                continue;
                            }
                            out.set(r1 + w1 * r2, (f1 + u1 * f2) + u * (g1 + v1 * g2), x * y);
                        }
                    }
                }
            }
        }
    }
    out
}

/// A linear functor between finite linear categories.
#[derive(Debug, Clone)]
pub struct LinFunctor {
    pub src: Arc<FinLinCat>,
    pub dst: Arc<FinLinCat>,
    pub objmap: Vec<usize>,
    /// Indexed by `a * n_src + b`; shape `homdim_dst(F a, F b) x homdim_src(a, b)`.
    pub hommap: Vec<Mat>,
}

impl LinFunctor {
    pub fn new(src: Arc<FinLinCat>, dst: Arc<FinLinCat>, objmap: Vec<usize>, hommap: Vec<Mat>) -> Result<Self, ShapeError> {
        let n = src.n();
        expect_count("functor object map", objmap.len(), n)?;
        expect_count("functor hom maps", hommap.len(), n * n)?;
        if let Some(&o) = objmap.iter().find(|&&o| o >= dst.n()) {
            return Err(ShapeError::Other(format!("object map targets missing object {o}")));
        }
        for a in 0..n {
            for b in 0..n {
                let expected = (dst.homdim(objmap[a], objmap[b]), src.homdim(a, b));
                expect_shape(|| format!("functor on hom {}", src.witness(&[a, b])), &hommap[a * n + b], expected)?;
            }
        }
        Ok(LinFunctor { src, dst, objmap, hommap })
    }

    pub fn identity(cat: Arc<FinLinCat>) -> Self {
        let n = cat.n();
        let mut hommap = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                hommap.push(Mat::identity(cat.field(), cat.homdim(a, b)));
            }
        }
        LinFunctor { src: cat.clone(), dst: cat, objmap: (0..n).collect(), hommap }
    }

    pub fn on_hom(&self, a: usize, b: usize) -> &Mat {
        &self.hommap[a * self.src.n() + b]
    }

    /// Identity and composition preservation, checked exactly.
    pub fn check(&self) -> Violations {
        let (s, d) = (&self.src, &self.dst);
        let n = s.n();
        let f = &self.objmap;
        let mut out = Violations::default();
        for a in 0..n {
            if self.on_hom(a, a).mul(s.ident(a)) != *d.ident(f[a]) {
                out.push("functor.identity", s.witness(&[a]));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = self.on_hom(a, c).mul(s.comp(a, b, c));
                    let rhs = d.comp(f[a], f[b], f[c]).mul(&self.on_hom(a, b).kron(self.on_hom(b, c)));
                    if lhs != rhs {
                        out.push("functor.composition", s.witness(&[a, b, c]));
                    }
                }
            }
        }
        out
    }

    /// `other . self`.
    pub fn then(&self, other: &LinFunctor) -> LinFunctor {
        assert!(self.dst.same_as(&other.src), "functors are not composable");
        let n = self.src.n();
        let objmap: Vec<usize> = self.objmap.iter().map(|&o| other.objmap[o]).collect();
        let mut hommap = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                hommap.push(other.on_hom(self.objmap[a], self.objmap[b]).mul(self.on_hom(a, b)));
            }
        }
        LinFunctor { src: self.src.clone(), dst: other.dst.clone(), objmap, hommap }
    }

    pub fn is_surjective_on_objects(&self) -> bool {
        (0..self.dst.n()).all(|o| self.objmap.contains(&o))
    }
}

/// A module: a linear functor from `base` into finite-dimensional spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Module {
    pub base: Arc<FinLinCat>,
    pub valdim: Vec<usize>,
    /// Indexed by `x * n + y`; see the module docs for the layout.
    pub act: Vec<Mat>,
}

impl Module {
    pub fn new(base: Arc<FinLinCat>, valdim: Vec<usize>, act: Vec<Mat>) -> Result<Self, ShapeError> {
        let n = base.n();
        expect_count("module values", valdim.len(), n)?;
        expect_count("module actions", act.len(), n * n)?;
        for x in 0..n {
            for y in 0..n {
                let expected = (valdim[y], base.homdim(x, y) * valdim[x]);
                expect_shape(|| format!("module action at {}", base.witness(&[x, y])), &act[x * n + y], expected)?;
            }
        }
        Ok(Module { base, valdim, act })
    }

    /// Build a module from the matrices `M(e_k)` of basis morphisms.
    pub fn from_basis_actions(
        base: Arc<FinLinCat>,
        valdim: Vec<usize>,
        mut basis_action: impl FnMut(usize, usize, usize) -> Mat,
    ) -> Module {
        let n = base.n();
        let field = base.field();
        let mut act = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let h = base.homdim(x, y);
                let mut m = Mat::zeros(field, valdim[y], h * valdim[x]);
                for k in 0..h {
                    let b = basis_action(x, y, k);
                    debug_assert_eq!(b.shape(), (valdim[y], valdim[x]));
                    for i in 0..valdim[y] {
                        for j in 0..valdim[x] {
                            m.set(i, k + h * j, b.get(i, j).clone());
                        }
                    }
                }
                act.push(m);
            }
        }
        Module { base, valdim, act }
    }

    pub fn field(&self) -> FieldSpec {
        self.base.field()
    }

    pub fn act_matrix(&self, x: usize, y: usize) -> &Mat {
        &self.act[x * self.base.n() + y]
    }

    /// `M(phi)` for the `k`-th basis morphism of `hom(x, y)`.
    pub fn basis_action(&self, x: usize, y: usize, k: usize) -> Mat {
        let h = self.base.homdim(x, y);
        let a = self.act_matrix(x, y);
        let cols: Vec<usize> = (0..self.valdim[x]).map(|m| k + h * m).collect();
        a.select_cols(&cols)
    }

    /// `M(phi)` for an arbitrary column vector `phi` in `hom(x, y)`.
    pub fn action(&self, x: usize, y: usize, phi: &Mat) -> Mat {
        let id = Mat::identity(self.field(), self.valdim[x]);
        self.act_matrix(x, y).mul(&phi.kron(&id))
    }

    pub fn total_dim(&self) -> usize {
        self.valdim.iter().sum()
    }

    /// Unit and composition laws, checked on basis morphisms.
    pub fn check(&self) -> Violations {
        let c = &self.base;
        let n = c.n();
        let mut out = Violations::default();
        for x in 0..n {
            if !self.action(x, x, c.ident(x)).is_identity() {
                out.push("module.unit", c.witness(&[x]));
            }
        }
        for x in 0..n {
            for y in 0..n {
                let fs: Vec<Mat> = (0..c.homdim(x, y)).map(|k| self.basis_action(x, y, k)).collect();
                for z in 0..n {
                    let mut ok = true;
                    'outer: for (i, mf) in fs.iter().enumerate() {
                        for j in 0..c.homdim(y, z) {
                            let gf = c.compose(x, y, z, &c.basis(x, y, i), &c.basis(y, z, j));
                            if self.action(x, z, &gf) != self.basis_action(y, z, j).mul(mf) {
                                ok = false;
                                break 'outer;
                            }
                        }
                    }
                    if !ok {
                        out.push("module.composition", c.witness(&[x, y, z]));
                    }
                }
            }
        }
        out
    }

    pub fn zero(base: Arc<FinLinCat>) -> Module {
        let (n, field) = (base.n(), base.field());
        Module::from_basis_actions(base, vec![0; n], |_, _, _| Mat::zeros(field, 0, 0))
    }

    /// The representable module `C(a, -)`, acting by postcomposition.
    pub fn representable(base: Arc<FinLinCat>, a: usize) -> Module {
        let n = base.n();
        let valdim = (0..n).map(|x| base.homdim(a, x)).collect();
        let cat = base.clone();
        Module::from_basis_actions(base, valdim, move |x, y, k| cat.postcompose(a, x, y, &cat.basis(x, y, k)))
    }

    /// Pull back along `f: D -> base`; values are `M(F x)`.
    pub fn restrict(&self, f: &LinFunctor) -> Module {
        assert!(f.dst.same_as(&self.base), "restriction along a functor into a different category");
        let valdim = f.objmap.iter().map(|&o| self.valdim[o]).collect();
        Module::from_basis_actions(f.src.clone(), valdim, |x, y, k| {
            let phi = f.on_hom(x, y).col(k);
            self.action(f.objmap[x], f.objmap[y], &phi)
        })
    }

    pub fn same_base(&self, other: &Module) -> bool {
        self.base.same_as(&other.base)
    }
}

/// Vectorise a linear map `V -> W` (the `W` index runs fastest).
pub fn vec_hom(m: &Mat) -> Mat {
    let (w, v) = m.shape();
    let mut out = Mat::zeros(m.field(), w * v, 1);
    for i in 0..w {
        for j in 0..v {
            out.set(i + w * j, 0, m.get(i, j).clone());
        }
    }
    out
}

pub fn unvec_hom(col: &Mat, w: usize, v: usize) -> Mat {
    let mut out = Mat::zeros(col.field(), w, v);
    for i in 0..w {
        for j in 0..v {
            out.set(i, j, col.get(i + w * j, 0).clone());
        }
    }
    out
}

/// A family of components `alpha_x: M(x) -> N(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub components: Vec<Mat>,
}

impl NatTrans {
    pub fn identity(m: &Module) -> NatTrans {
        NatTrans { components: m.valdim.iter().map(|&d| Mat::identity(m.field(), d)).collect() }
    }

    pub fn zero(m: &Module, n: &Module) -> NatTrans {
        NatTrans { components: m.valdim.iter().zip(&n.valdim).map(|(&dm, &dn)| Mat::zeros(m.field(), dn, dm)).collect() }
    }

    /// `N(phi) . alpha_x == alpha_y . M(phi)` for every basis morphism.
    pub fn is_natural(&self, m: &Module, n: &Module) -> bool {
        let c = &m.base;
        (0..c.n()).all(|x| {
            (0..c.n()).all(|y| {
                (0..c.homdim(x, y))
                    .all(|k| n.basis_action(x, y, k).mul(&self.components[x]) == self.components[y].mul(&m.basis_action(x, y, k)))
            })
        })
    }

    pub fn is_invertible(&self) -> bool {
        self.components.iter().all(Mat::is_invertible)
    }

    pub fn then(&self, other: &NatTrans) -> NatTrans {
        NatTrans { components: self.components.iter().zip(&other.components).map(|(a, b)| b.mul(a)).collect() }
    }

    /// The linear combination `sum c_i t_i` of transformations `M => N`.
    pub fn combine(terms: &[(crate::exactlin::Scalar, &NatTrans)], m: &Module, n: &Module) -> NatTrans {
        let mut acc = NatTrans::zero(m, n);
        for (c, t) in terms {
            for (a, b) in acc.components.iter_mut().zip(&t.components) {
                *a = a.add(&b.scale(c));
            }
        }
        acc
    }
}

/// The space of natural transformations `M => N`.
#[derive(Debug, Clone)]
pub struct NatSpace {
    pub dim: usize,
    pub basis: Vec<NatTrans>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("natural transformations between modules over different categories")]
pub struct BaseMismatch;

/// Kernel of `prod_x hom(M x, N x) -> prod_{x,y,phi} hom(M x, N y)`,
/// `alpha |-> N(phi) alpha_x - alpha_y M(phi)`.
pub fn nat_space(m: &Module, n: &Module) -> Result<NatSpace, BaseMismatch> {
    if !m.same_base(n) {
        return Err(BaseMismatch);
    }
    let c = &m.base;
    let field = c.field();
    let cnt = c.n();
    let mut offsets = Vec::with_capacity(cnt);
    let mut total = 0;
    for x in 0..cnt {
        offsets.push(total);
        total += m.valdim[x] * n.valdim[x];
    }
    let mut blocks = Vec::new();
    for x in 0..cnt {
        for y in 0..cnt {
            let (mx, ny) = (m.valdim[x], n.valdim[y]);
            for k in 0..c.homdim(x, y) {
                let mut row = Mat::zeros(field, ny * mx, total);
                let post = n.basis_action(x, y, k).kron(&Mat::identity(field, mx));
                let pre = Mat::identity(field, ny).kron(&m.basis_action(x, y, k).transpose());
                add_block(&mut row, 0, offsets[x], &post);
                let neg = pre.scale(&field.from_i64(-1));
                add_block(&mut row, 0, offsets[y], &neg);
                blocks.push(row);
            }
        }
    }
    let constraint = Mat::vstack(field, total, &blocks);
    let ker = kernel(&constraint);
    let basis = (0..ker.dim)
        .map(|j| {
            let v = ker.incl.col(j);
            NatTrans {
                components: (0..cnt)
                    .map(|x| {
                        let (mx, nx) = (m.valdim[x], n.valdim[x]);
                        let block = v.block(offsets[x], 0, mx * nx, 1);
                        unvec_hom(&block, nx, mx)
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(NatSpace { dim: ker.dim, basis })
}

pub(crate) fn add_block(target: &mut Mat, r0: usize, c0: usize, block: &Mat) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = target.get(r0 + i, c0 + j) + block.get(i, j);
            target.set(r0 + i, c0 + j, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf5() -> FieldSpec {
        FieldSpec::prime(5).unwrap()
    }

    /// k[Z/2] as a one-object category.
    fn z2_algebra() -> FinLinCat {
        let f = gf5();
        // basis {e, g}; comp column f + 2 g
        let comp = Mat::from_rows(f, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
        FinLinCat::new(f, vec!["*".into()], vec![2], vec![comp], vec![Mat::unit(f, 2, 0)]).unwrap()
    }

    #[test]
    fn point_and_codiscrete_pass() {
        assert!(FinLinCat::point(gf5()).check().passed());
        let c = FinLinCat::codiscrete(gf5(), vec!["0".into(), "1".into()]);
        assert!(c.check().passed());
    }

    #[test]
    fn zeroed_identity_fails_unit_law_only() {
        let mut c = FinLinCat::codiscrete(gf5(), vec!["0".into(), "1".into()]);
        c.set_ident(1, Mat::zeros(gf5(), 1, 1));
        let v = c.check();
        assert!(!v.passed());
        assert!(v.failures.iter().all(|f| f.law.contains("unit")));
        assert!(v.failures.iter().all(|f| f.witness.contains('1')));
    }

    #[test]
    fn shape_errors_are_distinct() {
        let f = gf5();
        let err = FinLinCat::new(f, vec!["*".into()], vec![2], vec![Mat::zeros(f, 2, 3)], vec![Mat::unit(f, 2, 0)]);
        assert!(matches!(err, Err(ShapeError::Matrix { .. })));
    }

    #[test]
    fn opposite_is_an_involution() {
        let c = z2_algebra().tensor(&FinLinCat::codiscrete(gf5(), vec!["a".into(), "b".into()]));
        assert_eq!(c.opposite().opposite(), c);
        assert!(c.opposite().check().passed());
    }

    #[test]
    fn tensor_dimensions() {
        let c2 = FinLinCat::codiscrete(gf5(), vec!["0".into(), "1".into()]);
        let t = c2.tensor(&z2_algebra());
        assert_eq!(t.n(), 2);
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(t.homdim(a, b), 2);
            }
        }
        assert!(t.check().passed());
        let p = FinLinCat::point(gf5()).tensor(&c2);
        assert_eq!(p.objects(), &["(*,0)".to_string(), "(*,1)".to_string()]);
        assert_eq!(p.homdim(0, 1), 1);
    }

    #[test]
    fn representable_and_zero_modules() {
        let c = Arc::new(FinLinCat::codiscrete(gf5(), vec!["0".into(), "1".into()]));
        assert!(Module::representable(c.clone(), 0).check().passed());
        assert!(Module::zero(c.clone()).check().passed());
        let a = Arc::new(z2_algebra());
        let y = Module::representable(a.clone(), 0);
        assert!(y.check().passed());
        let mut broken = y.clone();
        broken.act[0] = Mat::zeros(gf5(), 2, 4);
        let v = broken.check();
        assert!(!v.passed());
    }

    #[test]
    fn yoneda_dimension() {
        let a = Arc::new(z2_algebra().tensor(&FinLinCat::codiscrete(gf5(), vec!["u".into(), "v".into()])));
        let m = Module::representable(a.clone(), 1);
        for x in 0..a.n() {
            let y = Module::representable(a.clone(), x);
            assert_eq!(nat_space(&y, &m).unwrap().dim, m.valdim[x]);
        }
    }

    #[test]
    fn nat_space_basis_is_natural() {
        let a = Arc::new(z2_algebra());
        let y = Module::representable(a.clone(), 0);
        let ns = nat_space(&y, &y).unwrap();
        assert_eq!(ns.dim, 2);
        assert!(ns.basis.iter().all(|t| t.is_natural(&y, &y)));
    }

    #[test]
    fn functor_composition_is_a_functor() {
        let a = Arc::new(z2_algebra());
        let id = LinFunctor::identity(a.clone());
        let twice = id.then(&id);
        assert!(twice.check().passed());
        assert!(twice.is_surjective_on_objects());
    }
}
