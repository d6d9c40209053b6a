//! Adjointable morphisms on a [`Space`], their adjoints with respect to the
//! Gram form, and the operator-class predicates.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2lin::{kernel_basis, BitVec};
use crate::matrix::{Matrix, MatrixError};
use crate::ring::Elem;
use crate::space::{Space, SpaceError, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error("operators belong to different spaces")]
    SpaceMismatch,
    #[error("matrix is {rows}x{cols}, space has dimension {dim}")]
    Shape { rows: usize, cols: usize, dim: usize },
    #[error("block {block} of size {block_dim} does not fit dimension {dim}")]
    BadBlock { block: usize, block_dim: usize, dim: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Operator {
    space: Space,
    matrix: Matrix,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({:?})", self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OperatorClass {
    pub self_adjoint: bool,
    pub unitary: bool,
    pub isometry: bool,
    pub projection: bool,
}

impl Operator {
    pub fn new(space: Space, matrix: Matrix) -> Result<Self, OperatorError> {
        let dim = space.dim();
        if matrix.rows() != dim || matrix.cols() != dim {
            return Err(OperatorError::Shape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                dim,
            });
        }
        if matrix.ring() != space.ring() {
            return Err(MatrixError::RingMismatch {
                left: space.ring(),
                right: matrix.ring(),
            }
            .into());
        }
        Ok(Operator { space, matrix })
    }

    pub fn from_masks(space: &Space, rows: &[&[u32]]) -> Result<Self, OperatorError> {
        let m = Matrix::from_masks(space.ring(), rows)?;
        Operator::new(space.clone(), m)
    }

    pub fn identity(space: &Space) -> Self {
        Operator {
            matrix: Matrix::identity(space.ring(), space.dim()),
            space: space.clone(),
        }
    }

    pub fn zero(space: &Space) -> Self {
        Operator {
            matrix: Matrix::zeros(space.ring(), space.dim(), space.dim()),
            space: space.clone(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn entry(&self, r: usize, c: usize) -> Elem {
        self.matrix.get(r, c)
    }

    fn same_space(&self, other: &Operator) -> Result<(), OperatorError> {
        if self.space != other.space {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator, OperatorError> {
        self.same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix)?,
        })
    }

    pub fn add(&self, other: &Operator) -> Result<Operator, OperatorError> {
        self.same_space(other)?;
        Ok(Operator {
            space: self.space.clone(),
            matrix: self.matrix.add(&other.matrix)?,
        })
    }

    pub fn pow(&self, n: u64) -> Operator {
        Operator {
            space: self.space.clone(),
            matrix: self.matrix.pow(n).expect("operators are square"),
        }
    }

    /// `I + self`.
    pub fn one_plus(&self) -> Operator {
        self.add(&Operator::identity(&self.space)).expect("same space")
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, OperatorError> {
        if *x.space() != self.space {
            return Err(OperatorError::SpaceMismatch);
        }
        Ok(Vector::from_parts(self.space.clone(), self.matrix.apply(x.entries())))
    }

    /// `star(G⁻¹ · Aᵀ · G)`: the unique `A†` with `⟨Ax, y⟩ = ⟨x, A†y⟩`.
    pub fn adjoint(&self) -> Operator {
        let g = self.space.gram();
        let gi = self.space.gram_inv();
        let m = gi
            .mul(&self.matrix.transpose())
            .and_then(|m| m.mul(g))
            .expect("shapes agree by construction")
            .star_entries();
        Operator {
            space: self.space.clone(),
            matrix: m,
        }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn classify(&self) -> OperatorClass {
        let adj = self.adjoint();
        let id = |m: &Operator| m.matrix.is_identity();
        let adj_u = adj.mul(self).expect("same space");
        let u_adj = self.mul(&adj).expect("same space");
        let isometry = id(&adj_u);
        let self_adjoint = adj == *self;
        OperatorClass {
            self_adjoint,
            unitary: isometry && id(&u_adj),
            isometry,
            projection: self_adjoint && self.mul(self).expect("same space") == *self,
        }
    }

    /// The `(block, block)` diagonal sub-block for a decomposition into
    /// `block_dim`-sized components: `P_V U|_V` when `block = 0`.
    pub fn compress(&self, block: usize, block_dim: usize) -> Result<Operator, OperatorError> {
        let dim = self.dim();
        if block_dim == 0 || !dim.is_multiple_of(block_dim) || block >= dim / block_dim {
            return Err(OperatorError::BadBlock { block, block_dim, dim });
        }
        let off = block * block_dim;
        let gram = self.space.gram().submatrix(off, off, block_dim, block_dim);
        let space = Space::new(self.space.ring(), block_dim, gram)?;
        Ok(Operator {
            space,
            matrix: self.matrix.submatrix(off, off, block_dim, block_dim),
        })
    }

    /// Same matrix, re-bound to another space of equal dimension and ring.
    pub fn rebind(&self, space: &Space) -> Result<Operator, OperatorError> {
        Operator::new(space.clone(), self.matrix.clone())
    }

    /// `S + S†`, always self-adjoint.
    pub fn symmetrize(&self) -> Operator {
        self.add(&self.adjoint()).expect("same space")
    }

    pub fn random(space: &Space, rng: &mut impl Rng) -> Operator {
        let r = space.ring();
        let d = space.dim();
        Operator {
            space: space.clone(),
            matrix: Matrix::from_fn(r, d, d, |_, _| {
                r.elem(rng.gen_range(0..r.size()) as u32).expect("in range")
            }),
        }
    }

    /// Uniform sample from the self-adjoint operators on `space`,
    /// deterministic in `seed`. With `nonzero`, the zero operator is
    /// resampled.
    pub fn random_self_adjoint(space: &Space, seed: u64, nonzero: bool) -> Operator {
        let basis = self_adjoint_basis(space);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let mut acc = Operator::zero(space);
            for b in &basis {
                if rng.gen_bool(0.5) {
                    acc = acc.add(b).expect("same space");
                }
            }
            if !nonzero || !acc.matrix.is_zero() {
                return acc;
            }
        }
    }
}

/// Bit coordinate `(entry, bit)` of a matrix flattened to GF(2)^(d²k).
fn operator_from_bits(space: &Space, bits: &BitVec) -> Operator {
    let k = space.ring().degree() as usize;
    let d = space.dim();
    let mut m = Matrix::zeros(space.ring(), d, d);
    for i in bits.ones() {
        let (entry, bit) = (i / k, i % k);
        let (r, c) = (entry / d, entry % d);
        let cur = m.get(r, c).bits() | (1 << bit);
        m.set(r, c, space.ring().elem(cur).expect("bit below degree"));
    }
    Operator {
        space: space.clone(),
        matrix: m,
    }
}

fn operator_to_bits(op: &Operator) -> BitVec {
    let k = op.space.ring().degree() as usize;
    let entries = op.matrix.entries();
    let mut v = BitVec::zeros(entries.len() * k);
    for (e, val) in entries.iter().enumerate() {
        for bit in 0..k {
            if (val.bits() >> bit) & 1 == 1 {
                v.set(e * k + bit, true);
            }
        }
    }
    v
}

/// GF(2)-basis of the self-adjoint operators: the kernel of `A ↦ A + A†`.
pub fn self_adjoint_basis(space: &Space) -> Vec<Operator> {
    let k = space.ring().degree() as usize;
    let n = space.dim() * space.dim() * k;
    // Column j of the linear map is the image of the j-th unit bit.
    let images: Vec<BitVec> = (0..n)
        .map(|j| {
            let mut unit = BitVec::zeros(n);
            unit.set(j, true);
            operator_to_bits(&operator_from_bits(space, &unit).symmetrize())
        })
        .collect();
    let rows: Vec<BitVec> = (0..n)
        .map(|i| {
            let mut row = BitVec::zeros(n);
            for (j, img) in images.iter().enumerate() {
                if img.get(i) {
                    row.set(j, true);
                }
            }
            row
        })
        .collect();
    kernel_basis(&rows, n)
        .iter()
        .map(|b| operator_from_bits(space, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Ring, RingSpec, Star};

    fn gf2_std(d: usize) -> Space {
        Space::standard(Ring::gf2(), d).unwrap()
    }

    fn test_spaces() -> Vec<Space> {
        let gf4c = Ring::gf4(Star::Frobenius(1)).unwrap();
        let q = Ring::new(RingSpec::quotient(2, 0b110)).unwrap();
        vec![
            gf2_std(2),
            Space::hyperbolic(Ring::gf2()),
            Space::new(gf4c, 2, Matrix::from_masks(gf4c, &[&[0, 2], &[3, 0]]).unwrap()).unwrap(),
            Space::new(
                gf4c,
                3,
                Matrix::from_masks(gf4c, &[&[1, 2, 0], &[3, 1, 1], &[0, 1, 1]]).unwrap(),
            )
            .unwrap(),
            Space::new(q, 2, Matrix::from_masks(q, &[&[0b10, 0b11], &[0b11, 0b10]]).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn mul_examples() {
        let s = gf2_std(2);
        let a = Operator::from_masks(&s, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(a.mul(&Operator::identity(&s)).unwrap(), a);
        assert_eq!(a.mul(&a).unwrap(), Operator::identity(&s));
        let other = Space::hyperbolic(Ring::gf2());
        assert_eq!(a.mul(&Operator::identity(&other)), Err(OperatorError::SpaceMismatch));
    }

    #[test]
    fn adjoint_examples() {
        let s = gf2_std(2);
        let a = Operator::from_masks(&s, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(a.adjoint().matrix, a.matrix.transpose());
        let h = Space::hyperbolic(Ring::gf2());
        let b = Operator::from_masks(&h, &[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(b.adjoint(), b);
        let g4 = Space::standard(Ring::gf4(Star::Frobenius(1)).unwrap(), 1).unwrap();
        let w = Operator::from_masks(&g4, &[&[2]]).unwrap();
        assert_eq!(w.adjoint(), Operator::from_masks(&g4, &[&[3]]).unwrap());
    }

    #[test]
    fn classify_examples() {
        let s = gf2_std(2);
        let all = OperatorClass {
            self_adjoint: true,
            unitary: true,
            isometry: true,
            projection: true,
        };
        assert_eq!(Operator::identity(&s).classify(), all);
        let swap = Operator::from_masks(&s, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(
            swap.classify(),
            OperatorClass {
                self_adjoint: true,
                unitary: true,
                isometry: true,
                projection: false
            }
        );
        assert_eq!(
            Operator::zero(&s).classify(),
            OperatorClass {
                self_adjoint: true,
                unitary: false,
                isometry: false,
                projection: true
            }
        );
    }

    #[test]
    fn compress_examples() {
        let s4 = gf2_std(4);
        let c = Operator::identity(&s4).compress(0, 2).unwrap();
        assert_eq!(c, Operator::identity(&gf2_std(2)));
        assert!(matches!(
            Operator::identity(&s4).compress(2, 2),
            Err(OperatorError::BadBlock { .. })
        ));
        assert!(matches!(
            Operator::identity(&s4).compress(0, 3),
            Err(OperatorError::BadBlock { .. })
        ));
        let s2 = gf2_std(2);
        let swap = Operator::from_masks(&s2, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(swap.compress(0, 1).unwrap().matrix, Matrix::zeros(Ring::gf2(), 1, 1));
        assert_eq!(swap.compress(1, 1).unwrap().matrix, Matrix::zeros(Ring::gf2(), 1, 1));
    }

    #[test]
    fn symmetrize_example_and_determinism() {
        let s = gf2_std(2);
        let sm = Operator::from_masks(&s, &[&[0, 1], &[0, 0]]).unwrap();
        assert_eq!(sm.symmetrize(), Operator::from_masks(&s, &[&[0, 1], &[1, 0]]).unwrap());
        for sp in test_spaces() {
            let a = Operator::random_self_adjoint(&sp, 42, true);
            let b = Operator::random_self_adjoint(&sp, 42, true);
            assert_eq!(a, b);
            assert!(a.is_self_adjoint());
            assert!(!a.matrix.is_zero());
        }
    }

    #[test]
    fn self_adjoint_sampler_reaches_nonzero_diagonals() {
        // S + Sᵀ over GF(2) always has zero diagonal; the sampler must not.
        let s = gf2_std(1);
        let seen: std::collections::HashSet<u32> = (0..32)
            .map(|seed| Operator::random_self_adjoint(&s, seed, false).entry(0, 0).bits())
            .collect();
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn self_adjoint_basis_count_matches_brute_force() {
        for sp in test_spaces().into_iter().chain([gf2_std(3)]) {
            let r = sp.ring();
            let d = sp.dim();
            let total = r.size().pow((d * d) as u32);
            if total > 1 << 16 {
                continue;
            }
            let mut count = 0u64;
            for code in 0..total {
                let mut c = code;
                let m = Matrix::from_fn(r, d, d, |_, _| {
                    let e = r.elem((c % r.size()) as u32).unwrap();
                    c /= r.size();
                    e
                });
                if Operator::new(sp.clone(), m).unwrap().is_self_adjoint() {
                    count += 1;
                }
            }
            assert_eq!(1u64 << self_adjoint_basis(&sp).len(), count, "{sp:?}");
        }
    }

    #[test]
    fn adjoint_identity_and_laws_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for sp in test_spaces() {
            for _ in 0..50 {
                let a = Operator::random(&sp, &mut rng);
                let b = Operator::random(&sp, &mut rng);
                let adj = a.adjoint();
                assert_eq!(adj.adjoint(), a);
                assert_eq!(a.mul(&b).unwrap().adjoint(), b.adjoint().mul(&adj).unwrap());
                for _ in 0..20 {
                    let x = sp.random_vector(&mut rng);
                    let y = sp.random_vector(&mut rng);
                    assert_eq!(
                        sp.inner(&a.apply(&x).unwrap(), &y).unwrap(),
                        sp.inner(&x, &adj.apply(&y).unwrap()).unwrap()
                    );
                }
                let u = a.classify();
                assert_eq!(
                    u.unitary,
                    a.mul(&adj).unwrap().matrix.is_identity() && adj.mul(&a).unwrap().matrix.is_identity()
                );
                assert!(!u.unitary || u.isometry);
                assert!(!u.projection || u.self_adjoint);
            }
        }
    }

    #[test]
    fn adjoint_is_unique_on_basis_pairs() {
        // Any B with ⟨A e_i, e_j⟩ = ⟨e_i, B e_j⟩ for all i, j equals A†.
        let sp = Space::hyperbolic(Ring::gf2());
        let a = Operator::from_masks(&sp, &[&[1, 0], &[1, 1]]).unwrap();
        let mut matches = Vec::new();
        for code in 0..16u32 {
            let b = Operator::from_masks(
                &sp,
                &[&[code & 1, (code >> 1) & 1], &[(code >> 2) & 1, (code >> 3) & 1]],
            )
            .unwrap();
            let ok = (0..2).all(|i| {
                (0..2).all(|j| {
                    sp.inner(&a.apply(&sp.basis(i)).unwrap(), &sp.basis(j)).unwrap()
                        == sp.inner(&sp.basis(i), &b.apply(&sp.basis(j)).unwrap()).unwrap()
                })
            });
            if ok {
                matches.push(b);
            }
        }
        assert_eq!(matches, vec![a.adjoint()]);
    }

    #[test]
    fn adjoint_exhaustive_gf2_small() {
        for sp in [gf2_std(1), gf2_std(2), Space::hyperbolic(Ring::gf2())] {
            let d = sp.dim();
            let vecs: Vec<Vector> = (0..1u32 << d)
                .map(|m| {
                    sp.vector((0..d).map(|i| Elem::from_bit((m >> i) & 1)).collect())
                        .unwrap()
                })
                .collect();
            for code in 0..1u32 << (d * d) {
                let m = Matrix::from_fn(Ring::gf2(), d, d, |r, c| Elem::from_bit((code >> (r * d + c)) & 1));
                let a = Operator::new(sp.clone(), m).unwrap();
                let adj = a.adjoint();
                for x in &vecs {
                    for y in &vecs {
                        assert_eq!(
                            sp.inner(&a.apply(x).unwrap(), y).unwrap(),
                            sp.inner(x, &adj.apply(y).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }
}
