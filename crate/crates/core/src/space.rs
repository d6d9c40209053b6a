//! Indefinite inner product modules realized as free modules `R^d` with an
//! invertible hermitian Gram matrix.
//!
//! The pairing is `⟨x, y⟩ = xᵀ · G · star(y)`: linear in the first slot and
//! hermitian (`⟨x, y⟩ = star(⟨y, x⟩)`) exactly when `star(Gᵀ) = G`.
//! Nondegeneracy is enforced as invertibility of `G`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::matrix::{Matrix, MatrixError};
use crate::ring::{Elem, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("gram matrix is {rows}x{cols}, expected {dim}x{dim}")]
    GramShape { rows: usize, cols: usize, dim: usize },
    #[error("gram matrix is not hermitian (star of its transpose differs)")]
    GramNotHermitian,
    #[error("gram matrix is singular")]
    GramSingular,
    #[error("vectors or operators belong to different spaces")]
    SpaceMismatch,
    #[error("vector has {got} entries, expected {dim}")]
    VectorLength { got: usize, dim: usize },
    #[error("direct sum needs at least 2 copies, got {0}")]
    TooFewCopies(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct SpaceData {
    ring: Ring,
    dim: usize,
    gram: Matrix,
    gram_inv: Matrix,
}

/// A validated inner product module. Clones share the same data.
#[derive(Clone)]
pub struct Space(Arc<SpaceData>);

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Space {}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({}, d={}, G={:?})", self.0.ring, self.0.dim, self.0.gram)
    }
}

impl Space {
    pub fn new(ring: Ring, dim: usize, gram: Matrix) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::ZeroDimension);
        }
        if gram.rows() != dim || gram.cols() != dim {
            return Err(SpaceError::GramShape {
                rows: gram.rows(),
                cols: gram.cols(),
                dim,
            });
        }
        if gram.ring() != ring {
            return Err(MatrixError::RingMismatch {
                left: ring,
                right: gram.ring(),
            }
            .into());
        }
        if gram.transpose().star_entries() != gram {
            return Err(SpaceError::GramNotHermitian);
        }
        let gram_inv = match gram.inverse() {
            Ok(inv) => inv,
            Err(MatrixError::Singular { .. }) => return Err(SpaceError::GramSingular),
            Err(e) => return Err(e.into()),
        };
        Ok(Space(Arc::new(SpaceData {
            ring,
            dim,
            gram,
            gram_inv,
        })))
    }

    /// `R^d` with the identity Gram matrix.
    pub fn standard(ring: Ring, dim: usize) -> Result<Self, SpaceError> {
        Space::new(ring, dim, Matrix::identity(ring, dim))
    }

    /// GF(2)-style hyperbolic plane, Gram `[[0,1],[1,0]]`.
    pub fn hyperbolic(ring: Ring) -> Self {
        let g = Matrix::from_rows(ring, vec![vec![Elem::ZERO, Elem::ONE], vec![Elem::ONE, Elem::ZERO]])
            .expect("0 and 1 are in every ring");
        Space::new(ring, 2, g).expect("hyperbolic plane is hermitian and invertible")
    }

    pub fn ring(&self) -> Ring {
        self.0.ring
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn gram(&self) -> &Matrix {
        &self.0.gram
    }

    pub fn gram_inv(&self) -> &Matrix {
        &self.0.gram_inv
    }

    /// `copies`-fold orthogonal direct sum: Gram is block-diagonal.
    pub fn direct_sum(&self, copies: usize) -> Result<Space, SpaceError> {
        if copies < 2 {
            return Err(SpaceError::TooFewCopies(copies));
        }
        Ok(self.direct_sum_unchecked(copies))
    }

    pub(crate) fn direct_sum_unchecked(&self, copies: usize) -> Space {
        Space(Arc::new(SpaceData {
            ring: self.0.ring,
            dim: self.0.dim * copies,
            gram: Matrix::block_diagonal(&self.0.gram, copies),
            gram_inv: Matrix::block_diagonal(&self.0.gram_inv, copies),
        }))
    }

    pub fn vector(&self, entries: Vec<Elem>) -> Result<Vector, SpaceError> {
        if entries.len() != self.dim() {
            return Err(SpaceError::VectorLength {
                got: entries.len(),
                dim: self.dim(),
            });
        }
        for &e in &entries {
            self.ring().elem(e.bits()).map_err(MatrixError::from)?;
        }
        Ok(Vector {
            space: self.clone(),
            entries,
        })
    }

    pub fn zero_vector(&self) -> Vector {
        Vector {
            space: self.clone(),
            entries: vec![Elem::ZERO; self.dim()],
        }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(&self, i: usize) -> Vector {
        let mut v = self.zero_vector();
        v.entries[i] = Elem::ONE;
        v
    }

    /// `xᵀ G star(y)` on raw coordinate slices.
    pub fn pairing(&self, x: &[Elem], y: &[Elem]) -> Elem {
        let r = self.ring();
        let g = &self.0.gram;
        let ys: Vec<Elem> = y.iter().map(|&e| r.star(e)).collect();
        let gy = g.apply(&ys);
        x.iter()
            .zip(&gy)
            .fold(Elem::ZERO, |acc, (&a, &b)| r.add(acc, r.mul(a, b)))
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<Elem, SpaceError> {
        if x.space != *self || y.space != *self {
            return Err(SpaceError::SpaceMismatch);
        }
        Ok(self.pairing(&x.entries, &y.entries))
    }

    pub fn random_vector(&self, rng: &mut impl rand::Rng) -> Vector {
        let r = self.ring();
        let entries = (0..self.dim())
            .map(|_| r.elem(rng.gen_range(0..r.size()) as u32).expect("in range"))
            .collect();
        Vector {
            space: self.clone(),
            entries,
        }
    }
}

/// An element of a [`Space`].
#[derive(Clone, PartialEq, Eq)]
pub struct Vector {
    space: Space,
    entries: Vec<Elem>,
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vector[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e:x}")?;
        }
        write!(f, "]")
    }
}

impl Vector {
    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &Vector) -> Result<Vector, SpaceError> {
        if self.space != other.space {
            return Err(SpaceError::SpaceMismatch);
        }
        let r = self.space.ring();
        Ok(Vector {
            space: self.space.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| r.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, a: Elem) -> Vector {
        let r = self.space.ring();
        Vector {
            space: self.space.clone(),
            entries: self.entries.iter().map(|&e| r.mul(a, e)).collect(),
        }
    }

    pub(crate) fn from_parts(space: Space, entries: Vec<Elem>) -> Vector {
        debug_assert_eq!(entries.len(), space.dim());
        Vector { space, entries }
    }
}
