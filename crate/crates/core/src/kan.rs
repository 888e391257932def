//! Coends and ends of diagrams of vector spaces.
//!
//! A [`Diagram`] is a functor of several variables into `Vect_k`: each slot
//! ranges over the objects of a finite linear category and is either
//! covariant or contravariant. Coends and ends pair a contravariant slot with
//! a covariant slot over the same category and are computed as one cokernel
//! (resp. kernel) per assignment of the remaining slots. Actions on the
//! remaining slots descend to the result through the canonical section
//! (resp. retraction).
//!
//! Tuples of objects are indexed mixed-radix with the first slot running
//! fastest, matching the Kronecker convention of [`crate::exactlin::Mat::kron`].

use std::sync::Arc;

use crate::exactlin::{cokernel, kernel, FieldSpec, Mat};
use crate::lincat::{add_block, FinLinCat, LinFunctor, Module, Violations};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variance {
    Co,
    Contra,
}

impl Variance {
    pub fn flip(self) -> Variance {
        match self {
            Variance::Co => Variance::Contra,
            Variance::Contra => Variance::Co,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Slot {
    pub cat: Arc<FinLinCat>,
    pub variance: Variance,
}

impl Slot {
    pub fn co(cat: Arc<FinLinCat>) -> Slot {
        Slot { cat, variance: Variance::Co }
    }

    pub fn contra(cat: Arc<FinLinCat>) -> Slot {
        Slot { cat, variance: Variance::Contra }
    }

    /// Dimension of the morphism space that moves this slot from `x` to `o`:
    /// `C(x, o)` when covariant, `C(o, x)` when contravariant.
    pub fn move_dim(&self, x: usize, o: usize) -> usize {
        match self.variance {
            Variance::Co => self.cat.homdim(x, o),
            Variance::Contra => self.cat.homdim(o, x),
        }
    }

    /// Endpoints `(source, target)` in the category of a move `x -> o`.
    fn move_ends(&self, x: usize, o: usize) -> (usize, usize) {
        match self.variance {
            Variance::Co => (x, o),
            Variance::Contra => (o, x),
        }
    }

    /// The morphism that moves `x -> z` obtained by moving `x -> y` along `phi`
    /// and then `y -> z` along `psi`.
    fn compose_moves(&self, x: usize, y: usize, z: usize, phi: &Mat, psi: &Mat) -> Mat {
        match self.variance {
            Variance::Co => self.cat.compose(x, y, z, phi, psi),
            Variance::Contra => self.cat.compose(z, y, x, psi, phi),
        }
    }
}

/// A multi-variable functor into finite-dimensional spaces.
#[derive(Debug, Clone)]
pub struct Diagram {
    field: FieldSpec,
    slots: Vec<Slot>,
    strides: Vec<usize>,
    dims: Vec<usize>,
    /// `moves[s][t * n_s + o][k]`: the map `D(t) -> D(t[s := o])` along the
    /// `k`-th basis morphism of the slot's move space.
    moves: Vec<Vec<Vec<Mat>>>,
}

impl Diagram {
    pub fn build(
        field: FieldSpec,
        slots: Vec<Slot>,
        dim: impl Fn(&[usize]) -> usize,
        mv: impl Fn(usize, &[usize], usize, usize) -> Mat,
    ) -> Diagram {
        let mut strides = Vec::with_capacity(slots.len());
        let mut total = 1;
        for s in &slots {
            strides.push(total);
            total *= s.cat.n();
        }
        let mut d = Diagram { field, slots, strides, dims: Vec::with_capacity(total), moves: Vec::new() };
        for t in 0..total {
            let tuple = d.tuple_of(t);
            d.dims.push(dim(&tuple));
        }
        let mut moves = Vec::with_capacity(d.slots.len());
        for (s, slot) in d.slots.iter().enumerate() {
            let ns = slot.cat.n();
            let mut per = Vec::with_capacity(total * ns);
            for t in 0..total {
                let tuple = d.tuple_of(t);
                for o in 0..ns {
                    let k_max = slot.move_dim(tuple[s], o);
                    per.push((0..k_max).map(|k| mv(s, &tuple, o, k)).collect());
                }
            }
            moves.push(per);
        }
        d.moves = moves;
        d
    }

    /// The constant diagram with no slots and the given value dimension.
    pub fn constant(field: FieldSpec, dim: usize) -> Diagram {
        Diagram::build(field, Vec::new(), |_| dim, |_, _, _, _| unreachable!())
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn num_tuples(&self) -> usize {
        self.dims.len()
    }

    pub fn tuple_index(&self, tuple: &[usize]) -> usize {
        tuple.iter().zip(&self.strides).map(|(t, s)| t * s).sum()
    }

    pub fn tuple_of(&self, mut idx: usize) -> Vec<usize> {
        self.slots
            .iter()
            .map(|s| {
                let n = s.cat.n();
                let o = idx % n;
                idx /= n;
                o
            })
            .collect()
    }

    pub fn dim(&self, tuple: &[usize]) -> usize {
        self.dims[self.tuple_index(tuple)]
    }

    /// The map along the `k`-th basis morphism moving slot `s` to `o`.
    pub fn move_basis(&self, s: usize, tuple: &[usize], o: usize, k: usize) -> &Mat {
        let n = self.slots[s].cat.n();
        &self.moves[s][self.tuple_index(tuple) * n + o][k]
    }

    /// The map along an arbitrary morphism (column vector) moving slot `s` to `o`.
    pub fn move_along(&self, s: usize, tuple: &[usize], o: usize, phi: &Mat) -> Mat {
        let mut target = tuple.to_vec();
        target[s] = o;
        let mut acc = Mat::zeros(self.field, self.dim(&target), self.dim(tuple));
        for k in 0..phi.rows() {
            let c = phi.get(k, 0);
            if !c.is_zero() {
                acc = acc.add(&self.move_basis(s, tuple, o, k).scale(c));
            }
        }
        acc
    }

    /// Unit, composition and slot-commutation laws, checked exactly.
    pub fn check(&self) -> Violations {
        let mut out = Violations::default();
        let witness = |t: &[usize]| format!("{t:?}");
        for t in 0..self.num_tuples() {
            let tuple = self.tuple_of(t);
            for (s, slot) in self.slots.iter().enumerate() {
                let c = &slot.cat;
                let x = tuple[s];
                if !self.move_along(s, &tuple, x, c.ident(x)).is_identity() {
                    out.push(format!("slot{s}.unit"), witness(&tuple));
                }
                'comp: for y in 0..c.n() {
                    let mut mid = tuple.clone();
                    mid[s] = y;
                    for z in 0..c.n() {
                        for i in 0..slot.move_dim(x, y) {
                            for j in 0..slot.move_dim(y, z) {
                                let (a0, a1) = slot.move_ends(x, y);
                                let (b0, b1) = slot.move_ends(y, z);
                                let phi = c.basis(a0, a1, i);
                                let psi = c.basis(b0, b1, j);
                                let both = slot.compose_moves(x, y, z, &phi, &psi);
                                let lhs = self.move_along(s, &tuple, z, &both);
                                let rhs = self.move_basis(s, &mid, z, j).mul(self.move_basis(s, &tuple, y, i));
                                if lhs != rhs {
                                    out.push(format!("slot{s}.composition"), witness(&tuple));
                                    break 'comp;
                                }
                            }
                        }
                    }
                }
            }
            for s1 in 0..self.slots.len() {
                for s2 in s1 + 1..self.slots.len() {
                    if !self.slots_commute_at(&tuple, s1, s2) {
                        out.push(format!("slots{s1}{s2}.commute"), witness(&tuple));
                    }
                }
            }
        }
        out
    }

    fn slots_commute_at(&self, tuple: &[usize], s1: usize, s2: usize) -> bool {
        let (n1, n2) = (self.slots[s1].cat.n(), self.slots[s2].cat.n());
        for o1 in 0..n1 {
            for o2 in 0..n2 {
                let mut t1 = tuple.to_vec();
                t1[s1] = o1;
                let mut t2 = tuple.to_vec();
                t2[s2] = o2;
                for i in 0..self.slots[s1].move_dim(tuple[s1], o1) {
                    for j in 0..self.slots[s2].move_dim(tuple[s2], o2) {
                        let a = self.move_basis(s2, &t1, o2, j).mul(self.move_basis(s1, tuple, o1, i));
                        let b = self.move_basis(s1, &t2, o1, i).mul(self.move_basis(s2, tuple, o2, j));
                        if a != b {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `self (x) other`: slots concatenated, values Kronecker products with
    /// `self`'s index running fastest.
    pub fn tensor(&self, other: &Diagram) -> Diagram {
        let k = self.field;
        let n1 = self.slots.len();
        let slots = self.slots.iter().chain(&other.slots).cloned().collect();
        Diagram::build(
            k,
            slots,
            |t| self.dim(&t[..n1]) * other.dim(&t[n1..]),
            |s, t, o, idx| {
                let (t1, t2) = (&t[..n1], &t[n1..]);
                if s < n1 {
                    self.move_basis(s, t1, o, idx).kron(&Mat::identity(k, other.dim(t2)))
                } else {
                    Mat::identity(k, self.dim(t1)).kron(other.move_basis(s - n1, t2, o, idx))
                }
            },
        )
    }

    /// The diagram `hom(P(s), Q(t))`: `P`'s slots with flipped variance, then `Q`'s.
    /// Values are vectorised with the `Q` index fastest.
    pub fn hom(p: &Diagram, q: &Diagram) -> Diagram {
        let k = p.field;
        let np = p.slots.len();
        let slots = p
            .slots
            .iter()
            .map(|s| Slot { cat: s.cat.clone(), variance: s.variance.flip() })
            .chain(q.slots.iter().cloned())
            .collect();
        Diagram::build(
            k,
            slots,
            |t| p.dim(&t[..np]) * q.dim(&t[np..]),
            |s, t, o, idx| {
                let (tp, tq) = (&t[..np], &t[np..]);
                if s < np {
                    let mut from = tp.to_vec();
                    from[s] = o;
                    let back = p.move_basis(s, &from, tp[s], idx);
                    Mat::identity(k, q.dim(tq)).kron(&back.transpose())
                } else {
                    q.move_basis(s - np, tq, o, idx).kron(&Mat::identity(k, p.dim(tp)))
                }
            },
        )
    }

    /// Precompose slot `s` with a functor `F: D -> C` into the slot's category.
    pub fn restrict_slot(&self, s: usize, f: &LinFunctor) -> Diagram {
        assert!(f.dst.same_as(&self.slots[s].cat), "functor lands in the wrong category");
        let mut slots = self.slots.clone();
        slots[s] = Slot { cat: f.src.clone(), variance: self.slots[s].variance };
        let old = |t: &[usize]| {
            let mut v = t.to_vec();
            v[s] = f.objmap[t[s]];
            v
        };
        Diagram::build(
            self.field,
            slots,
            |t| self.dim(&old(t)),
            |r, t, o, k| {
                let ot = old(t);
                if r == s {
                    let phi = match self.slots[s].variance {
                        Variance::Co => f.on_hom(t[s], o).col(k),
                        Variance::Contra => f.on_hom(o, t[s]).col(k),
                    };
                    self.move_along(s, &ot, f.objmap[o], &phi)
                } else {
                    self.move_basis(r, &ot, o, k).clone()
                }
            },
        )
    }

    /// Reorder slots: slot `i` of the result is slot `order[i]` of `self`.
    pub fn permute_slots(&self, order: &[usize]) -> Diagram {
        let slots = order.iter().map(|&i| self.slots[i].clone()).collect();
        let old = |t: &[usize]| {
            let mut v = vec![0; t.len()];
            for (i, &src) in order.iter().enumerate() {
                v[src] = t[i];
            }
            v
        };
        Diagram::build(self.field, slots, |t| self.dim(&old(t)), |r, t, o, k| self.move_basis(order[r], &old(t), o, k).clone())
    }

    fn pair_slots(&self, i: usize, j: usize) -> (usize, usize) {
        assert!(i != j, "cannot pair a slot with itself");
        let (si, sj) = (&self.slots[i], &self.slots[j]);
        assert!(si.cat.same_as(&sj.cat), "paired slots range over different categories");
        match (si.variance, sj.variance) {
            (Variance::Contra, Variance::Co) => (i, j),
            (Variance::Co, Variance::Contra) => (j, i),
            _ => panic!("paired slots must have opposite variance"),
        }
    }

    fn remaining(&self, i: usize, j: usize) -> Vec<usize> {
        (0..self.slots.len()).filter(|&s| s != i && s != j).collect()
    }

    fn full_tuple(&self, rest: &[usize], keep: &[usize], ci: usize, cj: usize, x: usize, y: usize) -> Vec<usize> {
        let mut t = vec![0; self.slots.len()];
        for (r, &s) in keep.iter().enumerate() {
            t[s] = rest[r];
        }
        t[ci] = x;
        t[cj] = y;
        t
    }

    /// Coend over the pair of slots `i`, `j` (one contravariant, one covariant).
    pub fn coend(&self, i: usize, j: usize) -> Contraction {
        let (ci, cj) = self.pair_slots(i, j);
        let keep = self.remaining(i, j);
        let cat = self.slots[ci].cat.clone();
        let n = cat.n();
        let k = self.field;
        let rest_slots: Vec<Slot> = keep.iter().map(|&s| self.slots[s].clone()).collect();
        let skeleton = Diagram::build(k, rest_slots.clone(), |_| 0, |_, _, _, _| Mat::zeros(k, 0, 0));
        let mut parts = Vec::with_capacity(skeleton.num_tuples());
        for r in 0..skeleton.num_tuples() {
            let rest = skeleton.tuple_of(r);
            let mut offsets = Vec::with_capacity(n);
            let mut total = 0;
            for x in 0..n {
                offsets.push(total);
                total += self.dim(&self.full_tuple(&rest, &keep, ci, cj, x, x));
            }
            let mut cols = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    // d in D(ci = y, cj = x), phi: x -> y
                    let src = self.full_tuple(&rest, &keep, ci, cj, y, x);
                    let d = self.dim(&src);
                    for kk in 0..cat.homdim(x, y) {
                        let l = self.move_basis(ci, &src, x, kk);
                        let rr = self.move_basis(cj, &src, y, kk);
                        let mut block = Mat::zeros(k, total, d);
                        add_block(&mut block, offsets[x], 0, l);
                        add_block(&mut block, offsets[y], 0, &rr.scale(&k.from_i64(-1)));
                        cols.push(block);
                    }
                }
            }
            let relations = Mat::hstack(k, total, &cols);
            let ck = cokernel(&relations);
            parts.push(CoendPart { offsets, total, relations, proj: ck.proj, section: ck.section });
        }
        let result = Diagram::build(
            k,
            rest_slots,
            |t| parts[skeleton.tuple_index(t)].proj.rows(),
            |s, t, o, kk| {
                let src_part = &parts[skeleton.tuple_index(t)];
                let mut target = t.to_vec();
                target[s] = o;
                let dst_part = &parts[skeleton.tuple_index(&target)];
                let mut lifted = Mat::zeros(k, dst_part.total, src_part.total);
                for x in 0..n {
                    let full = self.full_tuple(t, &keep, ci, cj, x, x);
                    let m = self.move_basis(keep[s], &full, o, kk);
                    lifted.paste(dst_part.offsets[x], src_part.offsets[x], m);
                }
                dst_part.proj.mul(&lifted).mul(&src_part.section)
            },
        );
        Contraction { result, paired: (ci, cj), keep, parts }
    }

    /// End over the pair of slots `i`, `j` (one contravariant, one covariant).
    pub fn end(&self, i: usize, j: usize) -> EndContraction {
        let (ci, cj) = self.pair_slots(i, j);
        let keep = self.remaining(i, j);
        let cat = self.slots[ci].cat.clone();
        let n = cat.n();
        let k = self.field;
        let rest_slots: Vec<Slot> = keep.iter().map(|&s| self.slots[s].clone()).collect();
        let skeleton = Diagram::build(k, rest_slots.clone(), |_| 0, |_, _, _, _| Mat::zeros(k, 0, 0));
        let mut parts = Vec::with_capacity(skeleton.num_tuples());
        for r in 0..skeleton.num_tuples() {
            let rest = skeleton.tuple_of(r);
            let mut offsets = Vec::with_capacity(n);
            let mut total = 0;
            for x in 0..n {
                offsets.push(total);
                total += self.dim(&self.full_tuple(&rest, &keep, ci, cj, x, x));
            }
            let mut rows = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    let tx = self.full_tuple(&rest, &keep, ci, cj, x, x);
                    let ty = self.full_tuple(&rest, &keep, ci, cj, y, y);
                    let d = self.dim(&self.full_tuple(&rest, &keep, ci, cj, x, y));
                    for kk in 0..cat.homdim(x, y) {
                        let mut block = Mat::zeros(k, d, total);
                        add_block(&mut block, 0, offsets[x], self.move_basis(cj, &tx, y, kk));
                        let l = self.move_basis(ci, &ty, x, kk);
                        add_block(&mut block, 0, offsets[y], &l.scale(&k.from_i64(-1)));
                        rows.push(block);
                    }
                }
            }
            let constraints = Mat::vstack(k, total, &rows);
            let ker = kernel(&constraints);
            parts.push(EndPart { offsets, total, constraints, incl: ker.incl, retract: ker.retract });
        }
        let result = Diagram::build(
            k,
            rest_slots,
            |t| parts[skeleton.tuple_index(t)].incl.cols(),
            |s, t, o, kk| {
                let src_part = &parts[skeleton.tuple_index(t)];
                let mut target = t.to_vec();
                target[s] = o;
                let dst_part = &parts[skeleton.tuple_index(&target)];
                let mut lifted = Mat::zeros(k, dst_part.total, src_part.total);
                for x in 0..n {
                    let full = self.full_tuple(t, &keep, ci, cj, x, x);
                    let m = self.move_basis(keep[s], &full, o, kk);
                    lifted.paste(dst_part.offsets[x], src_part.offsets[x], m);
                }
                dst_part.retract.mul(&lifted).mul(&src_part.incl)
            },
        );
        EndContraction { result, paired: (ci, cj), keep, parts }
    }

    /// A module is a diagram with one covariant slot.
    pub fn from_module(m: &Module) -> Diagram {
        Diagram::build(m.field(), vec![Slot::co(m.base.clone())], |t| m.valdim[t[0]], |_, t, o, k| m.basis_action(t[0], o, k))
    }

    pub fn to_module(&self) -> Module {
        assert!(self.slots.len() == 1 && self.slots[0].variance == Variance::Co, "only a one-slot covariant diagram is a module");
        let base = self.slots[0].cat.clone();
        let valdim = (0..base.n()).map(|x| self.dim(&[x])).collect();
        Module::from_basis_actions(base, valdim, |x, y, k| self.move_basis(0, &[x], y, k).clone())
    }

    /// Total dimension of all values; used for cheap sanity reporting.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

/// Per-tuple data of a coend.
#[derive(Debug, Clone)]
pub struct CoendPart {
    /// Offset of the summand `D(x, x)` inside `sum_x D(x, x)`.
    pub offsets: Vec<usize>,
    pub total: usize,
    /// The difference map `sum C(x,y) (x) D(y,x) -> sum_x D(x,x)`.
    pub relations: Mat,
    pub proj: Mat,
    pub section: Mat,
}

#[derive(Debug, Clone)]
pub struct Contraction {
    pub result: Diagram,
    /// (contravariant, covariant) slot indices that were paired.
    pub paired: (usize, usize),
    /// Slots of the input that survive, in order.
    pub keep: Vec<usize>,
    pub parts: Vec<CoendPart>,
}

impl Contraction {
    /// Result tuple of an input tuple lying on the diagonal of the paired slots.
    pub fn result_tuple(&self, input: &[usize]) -> Vec<usize> {
        assert_eq!(input[self.paired.0], input[self.paired.1], "tuple is off the diagonal");
        self.keep.iter().map(|&s| input[s]).collect()
    }

    /// Send vectors (columns of `v`) of `D(input)` to their classes in the coend.
    pub fn push(&self, input: &[usize], v: &Mat) -> (Vec<usize>, Mat) {
        let rest = self.result_tuple(input);
        let part = &self.parts[self.result.tuple_index(&rest)];
        let x = input[self.paired.0];
        let mut embedded = Mat::zeros(v.field(), part.total, v.cols());
        embedded.paste(part.offsets[x], 0, v);
        (rest, part.proj.mul(&embedded))
    }

    pub fn part(&self, rest: &[usize]) -> &CoendPart {
        &self.parts[self.result.tuple_index(rest)]
    }

    /// Factor a map defined on `sum_x D(.., x, .., x, ..)` through the coend
    /// at `rest`; `None` when it does not vanish on the relations.
    pub fn descend(&self, rest: &[usize], eval: &Mat) -> Option<Mat> {
        let part = self.part(rest);
        eval.mul(&part.relations).is_zero().then(|| eval.mul(&part.section))
    }

    /// Dimension of the summand at `x` of the part at `rest`.
    pub fn summand_dim(&self, rest: &[usize], x: usize) -> usize {
        let part = self.part(rest);
        part.offsets.get(x + 1).copied().unwrap_or(part.total) - part.offsets[x]
    }
}

#[derive(Debug, Clone)]
pub struct EndPart {
    pub offsets: Vec<usize>,
    pub total: usize,
    pub constraints: Mat,
    pub incl: Mat,
    pub retract: Mat,
}

#[derive(Debug, Clone)]
pub struct EndContraction {
    pub result: Diagram,
    pub paired: (usize, usize),
    pub keep: Vec<usize>,
    pub parts: Vec<EndPart>,
}

impl EndContraction {
    pub fn part(&self, rest: &[usize]) -> &EndPart {
        &self.parts[self.result.tuple_index(rest)]
    }

    /// The component at `x` of the family represented by end coordinates `v`.
    pub fn component(&self, rest: &[usize], x: usize, v: &Mat) -> Mat {
        let part = self.part(rest);
        let full = part.incl.mul(v);
        let len = if x + 1 < part.offsets.len() { part.offsets[x + 1] - part.offsets[x] } else { part.total - part.offsets[x] };
        full.block(part.offsets[x], 0, len, v.cols())
    }
}

/// A functor `C^op (x) C -> Vect_k`, contravariant in the first variable.
#[derive(Debug, Clone)]
pub struct Bifunctor {
    diagram: Diagram,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BifunctorError {
    #[error("bifunctor slots must be (contravariant, covariant) over one category")]
    Slots,
    #[error("bifunctor actions violate {0}")]
    Axioms(String),
}

impl Bifunctor {
    /// `lact(x, x2, y, k)`: `D(x, y) -> D(x2, y)` along the `k`-th basis
    /// morphism of `C(x2, x)`; `ract(x, y, y2, k)`: `D(x, y) -> D(x, y2)`
    /// along the `k`-th basis morphism of `C(y, y2)`.
    pub fn from_actions(
        base: Arc<FinLinCat>,
        val: impl Fn(usize, usize) -> usize,
        lact: impl Fn(usize, usize, usize, usize) -> Mat,
        ract: impl Fn(usize, usize, usize, usize) -> Mat,
    ) -> Result<Bifunctor, BifunctorError> {
        let diagram = Diagram::build(
            base.field(),
            vec![Slot::contra(base.clone()), Slot::co(base)],
            |t| val(t[0], t[1]),
            |s, t, o, k| {
                if s == 0 {
                    lact(t[0], o, t[1], k)
                } else {
                    ract(t[0], t[1], o, k)
                }
            },
        );
        Bifunctor::from_diagram(diagram)
    }

    pub fn from_diagram(diagram: Diagram) -> Result<Bifunctor, BifunctorError> {
        let s = diagram.slots();
        if s.len() != 2 || s[0].variance != Variance::Contra || s[1].variance != Variance::Co || !s[0].cat.same_as(&s[1].cat) {
            return Err(BifunctorError::Slots);
        }
        let v = diagram.check();
        if let Some(f) = v.failures.first() {
            return Err(BifunctorError::Axioms(f.to_string()));
        }
        Ok(Bifunctor { diagram })
    }

    /// `D(x, y) = C(x, y)`.
    pub fn hom(base: Arc<FinLinCat>) -> Bifunctor {
        let c = base.clone();
        let c2 = base.clone();
        Bifunctor::from_actions(
            base.clone(),
            |x, y| base.homdim(x, y),
            move |x, x2, y, k| c.precompose(x2, x, y, &c.basis(x2, x, k)),
            move |x, y, y2, k| c2.postcompose(x, y, y2, &c2.basis(y, y2, k)),
        )
        .expect("hom bifunctor of a valid category")
    }

    /// `D(x, y) = hom(M x, N y)` for modules `M`, `N`.
    pub fn hom_of_modules(m: &Module, n: &Module) -> Bifunctor {
        Bifunctor::from_diagram(Diagram::hom(&Diagram::from_module(m), &Diagram::from_module(n))).expect("hom of valid modules")
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn base(&self) -> &Arc<FinLinCat> {
        &self.diagram.slots()[0].cat
    }

    pub fn val(&self, x: usize, y: usize) -> usize {
        self.diagram.dim(&[x, y])
    }

    /// The action on the contravariant slot in the layout
    /// `val(x2, y) x (homdim(x2, x) * val(x, y))`.
    pub fn lact(&self, x: usize, x2: usize, y: usize) -> Mat {
        let c = self.base();
        let h = c.homdim(x2, x);
        let (vin, vout) = (self.val(x, y), self.val(x2, y));
        let mut m = Mat::zeros(self.diagram.field(), vout, h * vin);
        for k in 0..h {
            let b = self.diagram.move_basis(0, &[x, y], x2, k);
            for i in 0..vout {
                for j in 0..vin {
                    m.set(i, k + h * j, b.get(i, j).clone());
                }
            }
        }
        m
    }

    /// The action on the covariant slot, `val(x, y2) x (homdim(y, y2) * val(x, y))`.
    pub fn ract(&self, x: usize, y: usize, y2: usize) -> Mat {
        let c = self.base();
        let h = c.homdim(y, y2);
        let (vin, vout) = (self.val(x, y), self.val(x, y2));
        let mut m = Mat::zeros(self.diagram.field(), vout, h * vin);
        for k in 0..h {
            let b = self.diagram.move_basis(1, &[x, y], y2, k);
            for i in 0..vout {
                for j in 0..vin {
                    m.set(i, k + h * j, b.get(i, j).clone());
                }
            }
        }
        m
    }
}

/// The coend of a bifunctor with its canonical projection and section.
#[derive(Debug, Clone)]
pub struct CoendResult {
    pub dim: usize,
    pub offsets: Vec<usize>,
    /// `sum_x D(x, x) -> coend`.
    pub proj: Mat,
    pub section: Mat,
    /// The difference map whose cokernel is the coend.
    pub relations: Mat,
}

pub fn coend(d: &Bifunctor) -> CoendResult {
    let c = d.diagram.coend(0, 1);
    let part = c.parts.into_iter().next().expect("no remaining slots");
    CoendResult {
        dim: part.proj.rows(),
        offsets: part.offsets,
        proj: part.proj,
        section: part.section,
        relations: part.relations,
    }
}

#[derive(Debug, Clone)]
pub struct EndResult {
    pub dim: usize,
    pub offsets: Vec<usize>,
    /// `end -> prod_x D(x, x)`.
    pub incl: Mat,
    pub retract: Mat,
    pub constraints: Mat,
}

pub fn end(d: &Bifunctor) -> EndResult {
    let e = d.diagram.end(0, 1);
    let part = e.parts.into_iter().next().expect("no remaining slots");
    EndResult {
        dim: part.incl.cols(),
        offsets: part.offsets,
        incl: part.incl,
        retract: part.retract,
        constraints: part.constraints,
    }
}

/// The coYoneda isomorphism `coend^x C(x, a) (x) M(x) ~ M(a)`.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub coend: CoendResult,
    /// `[phi (x) m] |-> M(phi)(m)`.
    pub fwd: Mat,
    /// `m |-> [1_a (x) m]`.
    pub bwd: Mat,
}

pub fn coyoneda_collapse(m: &Module, a: usize) -> Collapse {
    let c = m.base.clone();
    let k = c.field();
    let cl = c.clone();
    let cr = c.clone();
    let d = Bifunctor::from_actions(
        c.clone(),
        |x, y| c.homdim(x, a) * m.valdim[y],
        move |x, x2, y, kk| cl.precompose(x2, x, a, &cl.basis(x2, x, kk)).kron(&Mat::identity(k, m.valdim[y])),
        |x, y, y2, kk| Mat::identity(k, cr.homdim(x, a)).kron(&m.basis_action(y, y2, kk)),
    )
    .expect("collapse diagram of a valid module");
    let co = coend(&d);
    let n = c.n();
    let blocks: Vec<Mat> = (0..n).map(|x| m.act_matrix(x, a).clone()).collect();
    let eval = Mat::hstack(k, m.valdim[a], &blocks);
    let fwd = eval.mul(&co.section);
    let mut lift = Mat::zeros(k, co.proj.cols(), m.valdim[a]);
    lift.paste(co.offsets[a], 0, &c.ident(a).kron(&Mat::identity(k, m.valdim[a])));
    let bwd = co.proj.mul(&lift);
    Collapse { coend: co, fwd, bwd }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lincat::nat_space;

    fn gf5() -> FieldSpec {
        FieldSpec::prime(5).unwrap()
    }

    fn z2_algebra() -> Arc<FinLinCat> {
        let f = gf5();
        let comp = Mat::from_rows(f, &[vec![1, 0, 0, 1], vec![0, 1, 1, 0]]);
        Arc::new(FinLinCat::new(f, vec!["*".into()], vec![2], vec![comp], vec![Mat::unit(f, 2, 0)]).unwrap())
    }

    fn c2() -> Arc<FinLinCat> {
        Arc::new(FinLinCat::codiscrete(gf5(), vec!["0".into(), "1".into()]))
    }

    #[test]
    fn hom_coends() {
        assert_eq!(coend(&Bifunctor::hom(z2_algebra())).dim, 2);
        assert_eq!(coend(&Bifunctor::hom(c2())).dim, 1);
        assert_eq!(coend(&Bifunctor::hom(Arc::new(FinLinCat::point(gf5())))).dim, 1);
    }

    #[test]
    fn coend_projection_kills_relations() {
        let r = coend(&Bifunctor::hom(c2()));
        assert!(r.proj.mul(&r.relations).is_zero());
        assert!(r.proj.mul(&r.section).is_identity());
        assert_eq!(r.dim + r.relations.rank(), r.proj.cols());
    }

    #[test]
    fn end_of_module_homs_matches_nat_space() {
        for c in [z2_algebra(), c2()] {
            let y = Module::representable(c.clone(), 0);
            let e = end(&Bifunctor::hom_of_modules(&y, &y));
            assert_eq!(e.dim, nat_space(&y, &y).unwrap().dim);
            assert!(e.constraints.mul(&e.incl).is_zero());
        }
    }

    #[test]
    fn collapse_is_invertible() {
        for c in [z2_algebra(), c2()] {
            let m = Module::representable(c.clone(), 0);
            for a in 0..c.n() {
                let col = coyoneda_collapse(&m, a);
                assert!(col.fwd.mul(&col.bwd).is_identity());
                assert!(col.bwd.mul(&col.fwd).is_identity());
                assert!(col.fwd.mul(&col.coend.proj).mul(&col.coend.relations).is_zero());
            }
        }
    }

    #[test]
    fn bifunctor_layouts() {
        let b = Bifunctor::hom(c2());
        assert_eq!(b.lact(0, 1, 0).shape(), (1, 1));
        assert_eq!(b.ract(0, 0, 1).shape(), (1, 1));
    }

    #[test]
    fn tensor_and_hom_diagrams_are_functors() {
        let d = Bifunctor::hom(z2_algebra()).diagram().clone();
        assert!(d.tensor(&d).check().passed());
        assert!(Diagram::hom(&d, &d).check().passed());
        let p = d.permute_slots(&[1, 0]);
        assert!(p.check().passed());
    }
}
