use std::fmt;

use super::{FieldSpec, LinError, Scalar};

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_entries(field: FieldSpec, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self, LinError> {
        if data.len() != rows * cols {
            return Err(LinError::Malformed(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|x| !field.contains(x)) {
            return Err(LinError::Malformed(format!("entry {bad} is not in {field}")));
        }
        Ok(Mat { field, rows, cols, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows.iter().flatten().map(|&n| field.from_i64(n)).collect();
        Mat { field, rows: r, cols: c, data }
    }

    pub fn column(field: FieldSpec, entries: Vec<Scalar>) -> Self {
        let rows = entries.len();
        Mat { field, rows, cols: 1, data: entries }
    }

    /// Standard basis column vector e_i of length n.
    pub fn unit(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut m = Mat::zeros(field, n, 1);
        m.data[i] = field.one();
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Mat::identity(self.field, self.rows)
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    /// Product `self * rhs`. Panics on shape or field mismatch; use [`mat_mul`]
    /// for a checked version.
    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.cols, rhs.rows, "shape mismatch: {:?} * {:?}", self.shape(), rhs.shape());
        let mut out = Mat::zeros(self.field, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Mat { data, ..*self }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Mat { data, ..*self }
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        let data = self.data.iter().map(|a| a * c).collect();
        Mat { data, ..*self }
    }

    /// Kronecker product. The composite index of `(i, j)`, with `i` ranging
    /// over the first factor, is `i + dim(first) * j`; rows and columns alike.
    pub fn kron(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.field, rhs.field, "field mismatch");
        let (ra, ca) = self.shape();
        let (rb, cb) = rhs.shape();
        let mut out = Mat::zeros(self.field, ra * rb, ca * cb);
        for ib in 0..rb {
            for jb in 0..cb {
                let b = rhs.get(ib, jb);
                if b.is_zero() {
                    continue;
                }
                for ia in 0..ra {
                    for ja in 0..ca {
                        let a = self.get(ia, ja);
                        if a.is_zero() {
                            continue;
                        }
                        out.set(ia + ra * ib, ja + ca * jb, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn col(&self, j: usize) -> Mat {
        let data = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
        Mat::column(self.field, data)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.set(i, k, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut out = Mat::zeros(self.field, rows.len(), self.cols);
        for (k, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(k, j, self.get(i, j).clone());
            }
        }
        out
    }

    /// Horizontal concatenation. All blocks must share the row count `rows`.
    pub fn hstack(field: FieldSpec, rows: usize, blocks: &[Mat]) -> Mat {
        let cols = blocks.iter().map(Mat::cols).sum();
        let mut out = Mat::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            out.paste(0, off, b);
            off += b.cols;
        }
        out
    }

    pub fn vstack(field: FieldSpec, cols: usize, blocks: &[Mat]) -> Mat {
        let rows = blocks.iter().map(Mat::rows).sum();
        let mut out = Mat::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            out.paste(off, 0, b);
            off += b.rows;
        }
        out
    }

    /// Overwrite the block starting at `(r0, c0)` with `block`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Mat) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        let mut out = Mat::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    /// Reindex columns of a map out of `V1 ⊗ V2` (index `i + d1 * j`) so that
    /// it becomes a map out of `V2 ⊗ V1` (index `j + d2 * i`).
    pub fn swap_tensor_cols(&self, d1: usize, d2: usize) -> Mat {
        assert_eq!(self.cols, d1 * d2, "swap_tensor_cols: wrong factor sizes");
        let mut out = Mat::zeros(self.field, self.rows, self.cols);
        for r in 0..self.rows {
            for i in 0..d1 {
                for j in 0..d2 {
                    out.set(r, j + d2 * i, self.get(r, i + d1 * j).clone());
                }
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Mat::hstack(self.field, n, &[self.clone(), Mat::identity(self.field, n)]);
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

fn check_field(a: &Mat, b: &Mat) -> Result<(), LinError> {
    if a.field != b.field {
        return Err(LinError::FieldMismatch(a.field, b.field));
    }
    Ok(())
}

/// Checked matrix product.
pub fn mat_mul(a: &Mat, b: &Mat) -> Result<Mat, LinError> {
    check_field(a, b)?;
    if a.cols != b.rows {
        return Err(LinError::DimensionMismatch { op: "mat_mul", left: a.shape(), right: b.shape() });
    }
    Ok(a.mul(b))
}

/// Checked Kronecker product (see [`Mat::kron`] for the index convention).
pub fn kron(a: &Mat, b: &Mat) -> Result<Mat, LinError> {
    check_field(a, b)?;
    Ok(a.kron(b))
}

/// Basis of the null space, one column per free column of the reduced
/// echelon form. The basis vector for free column `f` has a 1 at `f` and
/// zeros at every other free column.
pub fn kernel_basis(a: &Mat) -> Mat {
    let (r, pivots) = a.rref();
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Mat::zeros(a.field, a.cols, free.len());
    for (k, &f) in free.iter().enumerate() {
        out.set(f, k, a.field.one());
        for (i, &p) in pivots.iter().enumerate() {
            out.set(p, k, -r.get(i, f));
        }
    }
    out
}

/// A canonical cokernel of `A: V -> W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    /// `W -> W / im A`, surjective.
    pub proj: Mat,
    /// Right inverse of `proj`, supported on the pivot-complement coordinates.
    pub section: Mat,
    pub dim: usize,
}

pub fn cokernel(a: &Mat) -> Cokernel {
    let left_null = kernel_basis(&a.transpose());
    let proj = left_null.transpose();
    let dim = proj.rows;
    let (_, pivots) = a.transpose().rref();
    let free: Vec<usize> = (0..a.rows).filter(|c| !pivots.contains(c)).collect();
    let mut section = Mat::zeros(a.field, a.rows, dim);
    for (k, &f) in free.iter().enumerate() {
        section.set(f, k, a.field.one());
    }
    Cokernel { proj, section, dim }
}

/// A canonical kernel of `A: V -> W` with a retraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    /// `ker A -> V`, injective; columns are [`kernel_basis`].
    pub incl: Mat,
    /// Left inverse of `incl`, reading off the free coordinates.
    pub retract: Mat,
    pub dim: usize,
}

pub fn kernel(a: &Mat) -> Kernel {
    let incl = kernel_basis(a);
    let (_, pivots) = a.rref();
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let dim = free.len();
    let mut retract = Mat::zeros(a.field, dim, a.cols);
    for (k, &f) in free.iter().enumerate() {
        retract.set(k, f, a.field.one());
    }
    Kernel { incl, retract, dim }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf5() -> FieldSpec {
        FieldSpec::prime(5).unwrap()
    }

    #[test]
    fn identity_product() {
        let i2 = Mat::identity(gf5(), 2);
        assert_eq!(mat_mul(&i2, &i2).unwrap(), i2);
    }

    #[test]
    fn rank_one_product_vanishes_mod_5() {
        let a = Mat::from_rows(gf5(), &[vec![1, 2], vec![2, 4]]);
        let b = Mat::from_rows(gf5(), &[vec![3], vec![1]]);
        assert!(mat_mul(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn product_with_zero_matrix() {
        let a = Mat::from_rows(gf5(), &[vec![1, 2, 3], vec![4, 0, 1]]);
        assert!(a.mul(&Mat::zeros(gf5(), 3, 4)).is_zero());
    }

    #[test]
    fn mul_errors() {
        let a = Mat::zeros(gf5(), 2, 3);
        assert!(matches!(mat_mul(&a, &a), Err(LinError::DimensionMismatch { .. })));
        let q = Mat::zeros(FieldSpec::Rationals, 3, 1);
        assert!(matches!(mat_mul(&a, &q), Err(LinError::FieldMismatch(..))));
    }

    #[test]
    fn kernel_examples() {
        let a = Mat::from_rows(gf5(), &[vec![1, 2], vec![2, 4]]);
        let k = kernel_basis(&a);
        assert_eq!(k, Mat::from_rows(gf5(), &[vec![3], vec![1]]));
        assert!(a.mul(&k).is_zero());
        assert_eq!(kernel_basis(&Mat::identity(gf5(), 3)).cols(), 0);
        assert_eq!(kernel_basis(&Mat::zeros(gf5(), 2, 3)).cols(), 3);
    }

    #[test]
    fn cokernel_examples() {
        let c = cokernel(&Mat::zeros(gf5(), 2, 2));
        assert_eq!(c.dim, 2);
        assert!(c.proj.is_identity());
        assert_eq!(cokernel(&Mat::identity(gf5(), 2)).dim, 0);
        let q = FieldSpec::Rationals;
        let col = Mat::from_rows(q, &[vec![1], vec![2]]);
        let c = cokernel(&col);
        assert_eq!(c.dim, 1);
        assert!(c.proj.mul(&col).is_zero());
        assert!(c.proj.mul(&c.section).is_identity());
    }

    #[test]
    fn kron_conventions() {
        let a = Mat::zeros(gf5(), 2, 3);
        let b = Mat::zeros(gf5(), 4, 5);
        assert_eq!(kron(&a, &b).unwrap().shape(), (8, 15));
        let m = Mat::from_rows(gf5(), &[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.kron(&Mat::identity(gf5(), 1)), m);
        // e_1 (x) e_2 in 2 (x) 2 dims: index 1 + 2 * 1 = 3
        let e = Mat::unit(gf5(), 2, 1).kron(&Mat::unit(gf5(), 2, 1));
        assert_eq!(e, Mat::unit(gf5(), 4, 3));
    }

    #[test]
    fn inverse_round_trip() {
        let q = FieldSpec::Rationals;
        let m = Mat::from_rows(q, &[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert!(Mat::from_rows(q, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn swap_tensor_cols_matches_kron_order() {
        let f = gf5();
        let a = Mat::from_rows(f, &[vec![1, 2]]);
        let b = Mat::from_rows(f, &[vec![3, 0, 1]]);
        assert_eq!(a.kron(&b).swap_tensor_cols(2, 3), b.kron(&a));
    }
}
