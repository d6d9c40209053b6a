//! Finitely supported sequences of vectors and the banded operators acting on
//! them.
//!
//! A [`FinSuppSeq`] is an element of `⊕_{n∈ℤ} V` (bilateral) or `⊕_{n≥0} V`
//! (unilateral): a sparse map from position to nonzero vector. A
//! [`LazyBandedOp`] stores only the generator `T` and applies the infinite
//! dilation matrix by rule, so `U^n x` stays exact for every `n`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::operator::Operator;
use crate::ring::Elem;
use crate::space::{Space, Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqError {
    #[error("position {0} appears more than once")]
    DuplicatePosition(i64),
    #[error("negative position {0} in a unilateral sequence")]
    NegativePosition(i64),
    #[error("sequences or vectors belong to different spaces")]
    SpaceMismatch,
    #[error("laterality mismatch: expected {expected:?}, got {got:?}")]
    LateralityMismatch { expected: Laterality, got: Laterality },
    #[error("generator is not self-adjoint")]
    NotSelfAdjoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Laterality {
    /// Indexed by all of ℤ.
    Bilateral,
    /// Indexed by n ≥ 0.
    Unilateral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSuppSeq {
    space: Space,
    laterality: Laterality,
    support: BTreeMap<i64, Vec<Elem>>,
}

impl FinSuppSeq {
    pub fn new(space: &Space, entries: Vec<(i64, Vector)>, laterality: Laterality) -> Result<Self, SeqError> {
        let mut support = BTreeMap::new();
        for (pos, v) in entries {
            if v.space() != space {
                return Err(SeqError::SpaceMismatch);
            }
            if laterality == Laterality::Unilateral && pos < 0 {
                return Err(SeqError::NegativePosition(pos));
            }
            match support.entry(pos) {
                Entry::Occupied(_) => return Err(SeqError::DuplicatePosition(pos)),
                Entry::Vacant(slot) => {
                    slot.insert(v.entries().to_vec());
                }
            }
        }
        support.retain(|_, v: &mut Vec<Elem>| v.iter().any(|e| !e.is_zero()));
        Ok(FinSuppSeq {
            space: space.clone(),
            laterality,
            support,
        })
    }

    pub fn zero(space: &Space, laterality: Laterality) -> Self {
        FinSuppSeq {
            space: space.clone(),
            laterality,
            support: BTreeMap::new(),
        }
    }

    /// `δ_pos · v`.
    pub fn delta(pos: i64, v: &Vector, laterality: Laterality) -> Result<Self, SeqError> {
        FinSuppSeq::new(v.space(), vec![(pos, v.clone())], laterality)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn laterality(&self) -> Laterality {
        self.laterality
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Positions with nonzero entries, ascending.
    pub fn positions(&self) -> impl Iterator<Item = i64> + '_ {
        self.support.keys().copied()
    }

    /// Smallest interval containing the support.
    pub fn span(&self) -> Option<(i64, i64)> {
        Some((*self.support.keys().next()?, *self.support.keys().next_back()?))
    }

    pub fn get(&self, pos: i64) -> Vector {
        match self.support.get(&pos) {
            Some(v) => Vector::from_parts(self.space.clone(), v.clone()),
            None => self.space.zero_vector(),
        }
    }

    fn accumulate(&mut self, pos: i64, v: &[Elem]) {
        if v.iter().all(|e| e.is_zero()) {
            return;
        }
        let r = self.space.ring();
        match self.support.entry(pos) {
            Entry::Vacant(slot) => {
                slot.insert(v.to_vec());
            }
            Entry::Occupied(mut slot) => {
                let cur = slot.get_mut();
                for (a, &b) in cur.iter_mut().zip(v) {
                    *a = r.add(*a, b);
                }
                if cur.iter().all(|e| e.is_zero()) {
                    slot.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &FinSuppSeq) -> Result<(), SeqError> {
        if self.space != other.space {
            return Err(SeqError::SpaceMismatch);
        }
        if self.laterality != other.laterality {
            return Err(SeqError::LateralityMismatch {
                expected: self.laterality,
                got: other.laterality,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FinSuppSeq) -> Result<FinSuppSeq, SeqError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&p, v) in &other.support {
            out.accumulate(p, v);
        }
        Ok(out)
    }

    pub fn scale(&self, a: Elem) -> FinSuppSeq {
        let mut out = FinSuppSeq::zero(&self.space, self.laterality);
        let r = self.space.ring();
        for (&p, v) in &self.support {
            let scaled: Vec<Elem> = v.iter().map(|&e| r.mul(a, e)).collect();
            out.accumulate(p, &scaled);
        }
        out
    }

    /// `Σ_n ⟨x_n, y_n⟩` over the common support.
    pub fn inner(&self, other: &FinSuppSeq) -> Result<Elem, SeqError> {
        self.check_compatible(other)?;
        let r = self.space.ring();
        Ok(self
            .support
            .iter()
            .filter_map(|(p, x)| other.support.get(p).map(|y| self.space.pairing(x, y)))
            .fold(Elem::ZERO, |acc, e| r.add(acc, e)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LazyKind {
    /// Bilateral unitary dilation on `⊕_{n∈ℤ} V`.
    SzNagy,
    /// Unilateral isometric dilation on `⊕_{n≥0} V`.
    Isometric,
}

impl LazyKind {
    pub fn laterality(self) -> Laterality {
        match self {
            LazyKind::SzNagy => Laterality::Bilateral,
            LazyKind::Isometric => Laterality::Unilateral,
        }
    }
}

/// Band-radius-1 operator on sequences, generated by a self-adjoint `T`.
///
/// Writing `A = I + T`:
///
/// * `SzNagy`: `(Ux)₋₁ = A x₀ + T x₁`, `(Ux)₀ = T x₀ + A x₁`, otherwise
///   `(Ux)ₙ = xₙ₊₁`. Adjoint: `(U*x)₀ = A x₋₁ + T x₀`,
///   `(U*x)₁ = T x₋₁ + A x₀`, otherwise `(U*x)ₙ = xₙ₋₁`.
/// * `Isometric`: `Ux = (T x₀, A x₀, x₁, x₂, …)`;
///   `U*x = (T x₀ + A x₁, x₂, x₃, …)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyBandedOp {
    generator: Operator,
    complement: Operator,
    kind: LazyKind,
}

impl LazyBandedOp {
    pub fn new(generator: Operator, kind: LazyKind) -> Result<Self, SeqError> {
        if !generator.is_self_adjoint() {
            return Err(SeqError::NotSelfAdjoint);
        }
        Ok(LazyBandedOp {
            complement: generator.one_plus(),
            generator,
            kind,
        })
    }

    pub fn generator(&self) -> &Operator {
        &self.generator
    }

    pub fn kind(&self) -> LazyKind {
        self.kind
    }

    pub fn laterality(&self) -> Laterality {
        self.kind.laterality()
    }

    fn check(&self, x: &FinSuppSeq) -> Result<(), SeqError> {
        if x.space != *self.generator.space() {
            return Err(SeqError::SpaceMismatch);
        }
        if x.laterality != self.laterality() {
            return Err(SeqError::LateralityMismatch {
                expected: self.laterality(),
                got: x.laterality,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &FinSuppSeq) -> Result<FinSuppSeq, SeqError> {
        self.check(x)?;
        let t = self.generator.matrix();
        let a = self.complement.matrix();
        let mut out = FinSuppSeq::zero(&x.space, x.laterality);
        for (&p, v) in &x.support {
            match (self.kind, p) {
                (LazyKind::SzNagy, 0) => {
                    out.accumulate(-1, &a.apply(v));
                    out.accumulate(0, &t.apply(v));
                }
                (LazyKind::SzNagy, 1) => {
                    out.accumulate(-1, &t.apply(v));
                    out.accumulate(0, &a.apply(v));
                }
                (LazyKind::SzNagy, _) => out.accumulate(p - 1, v),
                (LazyKind::Isometric, 0) => {
                    out.accumulate(0, &t.apply(v));
                    out.accumulate(1, &a.apply(v));
                }
                (LazyKind::Isometric, _) => out.accumulate(p + 1, v),
            }
        }
        Ok(out)
    }

    pub fn apply_adjoint(&self, x: &FinSuppSeq) -> Result<FinSuppSeq, SeqError> {
        self.check(x)?;
        let t = self.generator.matrix();
        let a = self.complement.matrix();
        let mut out = FinSuppSeq::zero(&x.space, x.laterality);
        for (&p, v) in &x.support {
            match (self.kind, p) {
                (LazyKind::SzNagy, -1) => {
                    out.accumulate(0, &a.apply(v));
                    out.accumulate(1, &t.apply(v));
                }
                (LazyKind::SzNagy, 0) => {
                    out.accumulate(0, &t.apply(v));
                    out.accumulate(1, &a.apply(v));
                }
                (LazyKind::SzNagy, _) => out.accumulate(p + 1, v),
                (LazyKind::Isometric, 0) => out.accumulate(0, &t.apply(v)),
                (LazyKind::Isometric, 1) => out.accumulate(0, &a.apply(v)),
                (LazyKind::Isometric, _) => out.accumulate(p - 1, v),
            }
        }
        Ok(out)
    }

    fn probe(&self, n: u64, adjoint: bool) -> Operator {
        let space = self.generator.space();
        let d = space.dim();
        let columns: Vec<Vec<Elem>> = (0..d)
            .map(|j| {
                let mut x = FinSuppSeq::delta(0, &space.basis(j), self.laterality()).expect("valid delta");
                for _ in 0..n {
                    x = if adjoint {
                        self.apply_adjoint(&x)
                    } else {
                        self.apply(&x)
                    }
                    .expect("same space and laterality");
                }
                x.get(0).entries().to_vec()
            })
            .collect();
        let m = Matrix::from_fn(space.ring(), d, d, |r, c| columns[c][r]);
        Operator::new(space.clone(), m).expect("square over the component space")
    }

    /// `P_V U^n |_V`, read off by applying `U` to `δ₀ e_j` for each basis
    /// vector.
    pub fn compress_power(&self, n: u64) -> Operator {
        self.probe(n, false)
    }

    /// `P_V (U*)^n |_V`.
    pub fn compress_adjoint_power(&self, n: u64) -> Operator {
        self.probe(n, true)
    }
}
