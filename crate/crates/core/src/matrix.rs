//! Dense matrices over a characteristic-2 ring.
//!
//! Determinants and inverses go through the division-free Samuelson–Berkowitz
//! characteristic polynomial, so they are valid over quotient rings with zero
//! divisors as well as over fields.

use std::fmt;

use thiserror::Error;

use crate::ring::{Elem, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch { left: Ring, right: Ring },
    #[error("matrix is singular (determinant {det:#x} is not a unit)")]
    Singular { det: u32 },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:x}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(ring: Ring, rows: usize, cols: usize) -> Self {
        Matrix {
            ring,
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(ring: Ring, n: usize) -> Self {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, Elem::ONE);
        }
        m
    }

    /// Builds from rows of elements; every element must belong to `ring`.
    pub fn from_rows(ring: Ring, rows: Vec<Vec<Elem>>) -> Result<Self, MatrixError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(MatrixError::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            for e in row {
                ring.elem(e.bits())?;
                data.push(e);
            }
        }
        Ok(Matrix {
            ring,
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    /// Builds from raw bitmasks, checking each against the ring.
    pub fn from_masks(ring: Ring, rows: &[&[u32]]) -> Result<Self, MatrixError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&m| ring.elem(m)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::from_rows(ring, rows)
    }

    pub fn from_fn(ring: Ring, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { ring, rows, cols, data }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|r| (0..self.cols).all(|c| self.get(r, c) == if r == c { Elem::ONE } else { Elem::ZERO }))
    }

    fn check_ring(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.ring != other.ring {
            return Err(MatrixError::RingMismatch {
                left: self.ring,
                right: other.ring,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Ok(Matrix {
            data,
            ..self.clone_shape()
        })
    }

    fn clone_shape(&self) -> Matrix {
        Matrix {
            ring: self.ring,
            rows: self.rows,
            cols: self.cols,
            data: Vec::new(),
        }
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.check_ring(other)?;
        if self.cols != other.rows {
            return Err(MatrixError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ring = self.ring;
        let mut out = Matrix::zeros(ring, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = ring.add(*d, ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Elem::ZERO, |acc, (&a, &b)| self.ring.add(acc, self.ring.mul(a, b)))
            })
            .collect()
    }

    pub fn scale(&self, s: Elem) -> Matrix {
        let data = self.data.iter().map(|&a| self.ring.mul(s, a)).collect();
        Matrix {
            data,
            ..self.clone_shape()
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.ring, self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Entrywise involution.
    pub fn star_entries(&self) -> Matrix {
        let data = self.data.iter().map(|&a| self.ring.star(a)).collect();
        Matrix {
            data,
            ..self.clone_shape()
        }
    }

    pub fn pow(&self, mut e: u64) -> Result<Matrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = Matrix::identity(self.ring, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Matrix {
        assert!(row0 + rows <= self.rows && col0 + cols <= self.cols);
        Matrix::from_fn(self.ring, rows, cols, |r, c| self.get(row0 + r, col0 + c))
    }

    /// Assembles a square block matrix from an `n x n` grid of equally sized
    /// square blocks; `None` is a zero block.
    pub fn from_blocks(ring: Ring, block_dim: usize, blocks: &[Vec<Option<&Matrix>>]) -> Result<Matrix, MatrixError> {
        let n = blocks.len();
        let mut out = Matrix::zeros(ring, n * block_dim, n * block_dim);
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::Dimension(format!(
                    "block row {bi} has {} blocks, expected {n}",
                    row.len()
                )));
            }
            for (bj, blk) in row.iter().enumerate() {
                let Some(blk) = blk else { continue };
                if blk.ring != ring {
                    return Err(MatrixError::RingMismatch {
                        left: ring,
                        right: blk.ring,
                    });
                }
                if blk.rows != block_dim || blk.cols != block_dim {
                    return Err(MatrixError::Dimension(format!(
                        "block ({bi},{bj}) is {}x{}, expected {block_dim}x{block_dim}",
                        blk.rows, blk.cols
                    )));
                }
                for r in 0..block_dim {
                    for c in 0..block_dim {
                        out.set(bi * block_dim + r, bj * block_dim + c, blk.get(r, c));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn block_diagonal(block: &Matrix, copies: usize) -> Matrix {
        let d = block.rows;
        let mut out = Matrix::zeros(block.ring, d * copies, block.cols * copies);
        for k in 0..copies {
            for r in 0..d {
                for c in 0..block.cols {
                    out.set(k * d + r, k * block.cols + c, block.get(r, c));
                }
            }
        }
        out
    }

    /// Characteristic polynomial coefficients `[1, c1, ..., cn]` of
    /// `det(λI - A) = λ^n + c1 λ^(n-1) + ... + cn`, by the Samuelson–Berkowitz
    /// recursion on trailing principal submatrices. Signs vanish in
    /// characteristic 2.
    pub fn charpoly(&self) -> Result<Vec<Elem>, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::Dimension("charpoly of a non-square matrix".into()));
        }
        let ring = self.ring;
        let n = self.rows;
        let mut poly = vec![Elem::ONE];
        // Grow from the bottom-right 1x1 block outward.
        for start in (0..n).rev() {
            let m = n - start; // size of current block
            let a11 = self.get(start, start);
            let sub = start + 1;
            let row: Vec<Elem> = (sub..n).map(|c| self.get(start, c)).collect();
            let mut col: Vec<Elem> = (sub..n).map(|r| self.get(r, start)).collect();
            // Toeplitz first column: 1, a11, R·C, R·A1·C, ..., R·A1^(m-2)·C.
            let mut toe = Vec::with_capacity(m + 1);
            toe.push(Elem::ONE);
            toe.push(a11);
            for _ in 0..m.saturating_sub(1) {
                let rc = row
                    .iter()
                    .zip(&col)
                    .fold(Elem::ZERO, |acc, (&a, &b)| ring.add(acc, ring.mul(a, b)));
                toe.push(rc);
                // col ← A1 · col
                col = (sub..n)
                    .map(|r| {
                        (sub..n)
                            .zip(&col)
                            .fold(Elem::ZERO, |acc, (c, &v)| ring.add(acc, ring.mul(self.get(r, c), v)))
                    })
                    .collect();
            }
            // new_poly = Toeplitz(toe) (m+1 x m) · poly (length m)
            let mut next = vec![Elem::ZERO; m + 1];
            for (i, slot) in next.iter_mut().enumerate() {
                for (j, &p) in poly.iter().enumerate() {
                    if i >= j {
                        *slot = ring.add(*slot, ring.mul(toe[i - j], p));
                    }
                }
            }
            poly = next;
        }
        Ok(poly)
    }

    pub fn det(&self) -> Result<Elem, MatrixError> {
        let cp = self.charpoly()?;
        Ok(*cp.last().expect("charpoly is non-empty"))
    }

    /// Adjugate via Cayley–Hamilton: `adj(A) = A^(n-1) + c1 A^(n-2) + ... + c(n-1) I`.
    pub fn adjugate(&self) -> Result<Matrix, MatrixError> {
        let cp = self.charpoly()?;
        let n = self.rows;
        let ring = self.ring;
        if n == 0 {
            return Ok(Matrix::zeros(ring, 0, 0));
        }
        // Horner: B ← B·A + c_i I for i = 1..n-1, starting with B = I.
        let mut acc = Matrix::identity(ring, n);
        for &c in &cp[1..n] {
            acc = acc.mul(self)?;
            for i in 0..n {
                let v = ring.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        Ok(acc)
    }

    pub fn inverse(&self) -> Result<Matrix, MatrixError> {
        let det = self.det()?;
        let dinv = self
            .ring
            .inv(det)
            .map_err(|_| MatrixError::Singular { det: det.bits() })?;
        Ok(self.adjugate()?.scale(dinv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{RingSpec, Star};
    use rand::SeedableRng;

    /// Independent oracle: cofactor expansion along the first row.
    fn laplace_det(m: &Matrix) -> Elem {
        let n = m.rows();
        let r = m.ring();
        if n == 0 {
            return Elem::ONE;
        }
        if n == 1 {
            return m.get(0, 0);
        }
        let mut acc = Elem::ZERO;
        for c in 0..n {
            let minor = Matrix::from_fn(r, n - 1, n - 1, |i, j| m.get(i + 1, if j < c { j } else { j + 1 }));
            acc = r.add(acc, r.mul(m.get(0, c), laplace_det(&minor)));
        }
        acc
    }

    fn random_matrix(ring: Ring, n: usize, rng: &mut impl rand::Rng) -> Matrix {
        Matrix::from_fn(ring, n, n, |_, _| {
            ring.elem(rng.gen_range(0..ring.size()) as u32).unwrap()
        })
    }

    #[test]
    fn mul_examples() {
        let r = Ring::gf2();
        let a = Matrix::from_masks(r, &[&[1, 1], &[0, 1]]).unwrap();
        assert!(a.mul(&a).unwrap().is_identity());
        assert_eq!(a.mul(&Matrix::identity(r, 2)).unwrap(), a);
        let g = Ring::gf4(Star::Identity).unwrap();
        let w = Matrix::from_masks(g, &[&[2]]).unwrap();
        let w1 = Matrix::from_masks(g, &[&[3]]).unwrap();
        assert!(w.mul(&w1).unwrap().is_identity());
    }

    #[test]
    fn mismatched_rings_and_shapes() {
        let a = Matrix::identity(Ring::gf2(), 2);
        let b = Matrix::identity(Ring::gf4(Star::Identity).unwrap(), 2);
        assert!(matches!(a.mul(&b), Err(MatrixError::RingMismatch { .. })));
        assert!(matches!(a.add(&b), Err(MatrixError::RingMismatch { .. })));
        let c = Matrix::identity(Ring::gf2(), 3);
        assert!(matches!(a.mul(&c), Err(MatrixError::Dimension(_))));
        assert!(Matrix::from_masks(Ring::gf2(), &[&[1, 0], &[1]]).is_err());
        assert!(Matrix::from_masks(Ring::gf2(), &[&[2]]).is_err());
    }

    #[test]
    fn det_matches_cofactor_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let rings = [
            Ring::gf2(),
            Ring::gf4(Star::Frobenius(1)).unwrap(),
            Ring::new(RingSpec::gf2k(4, 0b10011, Star::Identity)).unwrap(),
            Ring::new(RingSpec::quotient(3, 0b1001)).unwrap(),
        ];
        for ring in rings {
            for n in 0..=5 {
                for _ in 0..40 {
                    let m = random_matrix(ring, n, &mut rng);
                    assert_eq!(m.det().unwrap(), laplace_det(&m), "{ring} {m:?}");
                    let adj = m.adjugate().unwrap();
                    let prod = m.mul(&adj).unwrap();
                    let det = laplace_det(&m);
                    assert_eq!(prod, Matrix::identity(ring, n).scale(det));
                }
            }
        }
    }

    #[test]
    fn inverse_over_non_local_quotient() {
        // GF(2)[x]/(x²+x) ≅ GF(2)×GF(2); the idempotents x and x+1 give an
        // invertible matrix with no unit entries.
        let r = Ring::new(RingSpec::quotient(2, 0b110)).unwrap();
        let m = Matrix::from_masks(r, &[&[0b10, 0b11], &[0b11, 0b10]]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn singular_is_reported() {
        let r = Ring::gf2();
        let m = Matrix::from_masks(r, &[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(m.inverse(), Err(MatrixError::Singular { det: 0 }));
    }

    #[test]
    fn blocks_and_pow() {
        let r = Ring::gf2();
        let one = Matrix::identity(r, 1);
        let swap = Matrix::from_blocks(r, 1, &[vec![None, Some(&one)], vec![Some(&one), None]]).unwrap();
        assert_eq!(swap, Matrix::from_masks(r, &[&[0, 1], &[1, 0]]).unwrap());
        assert!(swap.pow(2).unwrap().is_identity());
        assert_eq!(swap.pow(3).unwrap(), swap);
        assert!(swap.pow(0).unwrap().is_identity());
        let bd = Matrix::block_diagonal(&swap, 2);
        assert_eq!(bd.submatrix(2, 2, 2, 2), swap);
        assert!(bd.submatrix(0, 2, 2, 2).is_zero());
    }
}
