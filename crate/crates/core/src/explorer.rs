//! Exhaustive verification over small spaces, and a brute-force search for
//! commuting unitary dilations of commuting pairs.

use std::io;

use rayon::prelude::*;
use thiserror::Error;

use crate::dilation::{verify_dilation, DilationError, DilationKind, VerifyParams};
use crate::matrix::Matrix;
use crate::operator::{self_adjoint_basis, Operator, OperatorError};
use crate::space::Space;

/// Largest `|R|^(d²)` accepted by [`enumerate_self_adjoint`].
pub const ENUMERATION_LIMIT: u64 = 1 << 24;
/// Default cap on the number of candidate pairs [`ando_search`] may visit.
pub const DEFAULT_ANDO_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExplorerError {
    #[error("exhaustive enumeration needs a field with at most 16 elements")]
    UnsupportedRing,
    #[error("search space of {size} matrices exceeds the limit {limit}")]
    TooLarge { size: u128, limit: u64 },
    #[error("search space of {size} candidate pairs exceeds the budget {budget}")]
    BudgetExceeded { size: u128, budget: u64 },
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("operators do not commute")]
    NotCommuting,
    #[error("operators act on different spaces")]
    SpaceMismatch,
    #[error(transparent)]
    Dilation(#[from] DilationError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

fn checked_size(base: u64, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
}

/// Every self-adjoint operator on `space` exactly once, ordered
/// lexicographically by row-major entries.
///
/// Generated as the GF(2)-span of a basis of the self-adjoint subspace.
pub fn enumerate_self_adjoint(space: &Space) -> Result<Vec<Operator>, ExplorerError> {
    let ring = space.ring();
    if !ring.is_field() || ring.size() > 16 {
        return Err(ExplorerError::UnsupportedRing);
    }
    let size = checked_size(ring.size(), space.dim() * space.dim());
    if size > ENUMERATION_LIMIT as u128 {
        return Err(ExplorerError::TooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let basis = self_adjoint_basis(space);
    let mut out: Vec<Operator> = (0u64..1 << basis.len())
        .map(|mask| {
            basis
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .fold(Operator::zero(space), |acc, (_, b)| acc.add(b).expect("same space"))
        })
        .collect();
    out.sort_by(|a, b| a.matrix().entries().cmp(b.matrix().entries()));
    Ok(out)
}

/// Rows and entries as `a b;c d` in the hex element encoding.
pub fn serialize_matrix(m: &Matrix) -> String {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|e| format!("{e:x}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CensusRow {
    pub ring: String,
    pub dim: usize,
    pub gram: String,
    pub operator: String,
    pub halmos: bool,
    /// Egervary identities hold for every `N` in `1..=max_n`.
    pub egervary: bool,
    pub sznagy: bool,
    pub isometric: bool,
    /// The Egervary identity also holds at power `N+1`, for every checked `N`.
    pub egervary_n1: bool,
}

impl CensusRow {
    pub fn all_pass(&self) -> bool {
        self.halmos && self.egervary && self.sznagy && self.isometric
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreParams {
    pub max_n: usize,
    pub max_power: u64,
    pub window: i64,
}

impl Default for ExploreParams {
    fn default() -> Self {
        ExploreParams {
            max_n: 3,
            max_power: 6,
            window: 8,
        }
    }
}

fn census_row(space: &Space, t: &Operator, params: ExploreParams) -> Result<CensusRow, ExplorerError> {
    let base = VerifyParams {
        order: 1,
        max_power: params.max_power,
        window: params.window,
    };
    let halmos = verify_dilation(t, DilationKind::Halmos, base)?.holds();
    let mut egervary = true;
    let mut egervary_n1 = true;
    for n in 1..=params.max_n {
        let rep = verify_dilation(t, DilationKind::Egervary, VerifyParams { order: n, ..base })?;
        egervary &= rep.holds();
        egervary_n1 &= rep.power_holds(n as u64 + 1).unwrap_or(false);
    }
    let sznagy = verify_dilation(t, DilationKind::SzNagy, base)?.holds();
    let isometric = verify_dilation(t, DilationKind::Isometric, base)?.holds();
    Ok(CensusRow {
        ring: space.ring().to_string(),
        dim: space.dim(),
        gram: serialize_matrix(space.gram()),
        operator: serialize_matrix(t.matrix()),
        halmos,
        egervary,
        sznagy,
        isometric,
        egervary_n1,
    })
}

/// Verifies all four dilations for every self-adjoint operator on `space`.
/// Rows come back sorted.
pub fn exhaustive_verify(space: &Space, params: ExploreParams) -> Result<Vec<CensusRow>, ExplorerError> {
    let ops = enumerate_self_adjoint(space)?;
    let mut rows = ops
        .par_iter()
        .map(|t| census_row(space, t, params))
        .collect::<Result<Vec<_>, _>>()?;
    rows.sort();
    Ok(rows)
}

pub const CENSUS_HEADER: [&str; 9] = [
    "ring",
    "dim",
    "gram",
    "operator",
    "halmos",
    "egervary",
    "sznagy",
    "isometric",
    "egervary_n1",
];

pub fn write_census_csv<W: io::Write>(rows: &[CensusRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CENSUS_HEADER)?;
    for r in rows {
        w.write_record([
            r.ring.clone(),
            r.dim.to_string(),
            r.gram.clone(),
            r.operator.clone(),
            r.halmos.to_string(),
            r.egervary.to_string(),
            r.sznagy.to_string(),
            r.isometric.to_string(),
            r.egervary_n1.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AndoResult {
    pub t1: Operator,
    pub t2: Operator,
    pub found: bool,
    pub witness: Option<(Operator, Operator)>,
    /// Number of candidate pairs in the searched shape.
    pub search_space: u128,
    /// Candidates that passed the unitarity filter, per side.
    pub unitary_candidates: (usize, usize),
}

impl AndoResult {
    /// Re-checks the witness from scratch: both unitary, commuting, and
    /// compressing to the inputs.
    pub fn reverify(&self) -> bool {
        let Some((u1, u2)) = &self.witness else {
            return !self.found;
        };
        let d = self.t1.dim();
        let compress_ok =
            |u: &Operator, t: &Operator| u.compress(0, d).map(|c| c.matrix() == t.matrix()).unwrap_or(false);
        self.found
            && u1.classify().unitary
            && u2.classify().unitary
            && u1.mul(u2).ok() == u2.mul(u1).ok()
            && compress_ok(u1, &self.t1)
            && compress_ok(u2, &self.t2)
    }

    pub fn describe(&self) -> String {
        let mut s = format!(
            "shape=halmos dim={} search_space={} unitary_candidates={},{} found={}",
            2 * self.t1.dim(),
            self.search_space,
            self.unitary_candidates.0,
            self.unitary_candidates.1,
            self.found
        );
        if let Some((u1, u2)) = &self.witness {
            s.push_str(&format!(
                "\nU1={}\nU2={}",
                serialize_matrix(u1.matrix()),
                serialize_matrix(u2.matrix())
            ));
        }
        s
    }
}

/// Unitaries on `V ⊕ V` whose top-left block is `t`, with the other three
/// blocks brute-forced in lexicographic order.
fn unitary_completions(t: &Operator, big: &Space) -> Vec<Operator> {
    let ring = t.space().ring();
    let d = t.dim();
    let free = 3 * d * d;
    let q = ring.size();
    let total = checked_size(q, free) as u64;
    let mut out = Vec::new();
    let mut digits = vec![0u64; free];
    for code in 0..total {
        let mut c = code;
        for slot in digits.iter_mut().rev() {
            *slot = c % q;
            c /= q;
        }
        let m = Matrix::from_fn(ring, 2 * d, 2 * d, |r, col| {
            if r < d && col < d {
                return t.entry(r, col);
            }
            // Row-major order over the remaining 3d² positions.
            let idx = if r < d {
                r * d + (col - d)
            } else {
                d * d + (r - d) * 2 * d + col
            };
            ring.elem(digits[idx] as u32).expect("digit below ring size")
        });
        let u = Operator::new(big.clone(), m).expect("shape matches");
        if u.classify().unitary {
            out.push(u);
        }
    }
    out
}

/// Searches for commuting unitaries `U1, U2` on `V ⊕ V` with
/// `P_V Uᵢ|_V = Tᵢ`. A negative answer only covers this shape.
pub fn ando_search(t1: &Operator, t2: &Operator, budget: u64) -> Result<AndoResult, ExplorerError> {
    if t1.space() != t2.space() {
        return Err(ExplorerError::SpaceMismatch);
    }
    if !t1.is_self_adjoint() || !t2.is_self_adjoint() {
        return Err(ExplorerError::NotSelfAdjoint);
    }
    if t1.mul(t2)? != t2.mul(t1)? {
        return Err(ExplorerError::NotCommuting);
    }
    let d = t1.dim();
    let per_side = checked_size(t1.space().ring().size(), 3 * d * d);
    let search_space = per_side.saturating_mul(per_side);
    if search_space > budget as u128 {
        return Err(ExplorerError::BudgetExceeded {
            size: search_space,
            budget,
        });
    }
    let big = t1.space().direct_sum(2).map_err(OperatorError::from)?;
    let c1 = unitary_completions(t1, &big);
    let c2 = unitary_completions(t2, &big);
    let witness = c1.iter().find_map(|u1| {
        c2.iter()
            .find(|u2| u1.mul(u2).ok() == u2.mul(u1).ok())
            .map(|u2| (u1.clone(), u2.clone()))
    });
    Ok(AndoResult {
        t1: t1.clone(),
        t2: t2.clone(),
        found: witness.is_some(),
        witness,
        search_space,
        unitary_candidates: (c1.len(), c2.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Ring, RingSpec, Star};

    /// Oracle: filter all |R|^(d²) matrices.
    fn brute_force_self_adjoint(space: &Space) -> Vec<Operator> {
        let r = space.ring();
        let d = space.dim();
        let q = r.size();
        let total = q.pow((d * d) as u32);
        (0..total)
            .filter_map(|code| {
                let mut c = code;
                let mut digits = vec![0u32; d * d];
                for slot in digits.iter_mut().rev() {
                    *slot = (c % q) as u32;
                    c /= q;
                }
                let m = Matrix::from_fn(r, d, d, |i, j| r.elem(digits[i * d + j]).unwrap());
                let op = Operator::new(space.clone(), m).unwrap();
                op.is_self_adjoint().then_some(op)
            })
            .collect()
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let gf4c = Ring::gf4(Star::Frobenius(1)).unwrap();
        let spaces = vec![
            Space::standard(Ring::gf2(), 1).unwrap(),
            Space::standard(Ring::gf2(), 2).unwrap(),
            Space::standard(Ring::gf2(), 3).unwrap(),
            Space::hyperbolic(Ring::gf2()),
            Space::standard(gf4c, 1).unwrap(),
            Space::standard(gf4c, 2).unwrap(),
            Space::new(gf4c, 2, Matrix::from_masks(gf4c, &[&[0, 2], &[3, 0]]).unwrap()).unwrap(),
            Space::standard(Ring::gf4(Star::Identity).unwrap(), 2).unwrap(),
        ];
        for s in spaces {
            assert_eq!(
                enumerate_self_adjoint(&s).unwrap(),
                brute_force_self_adjoint(&s),
                "{s:?}"
            );
        }
    }

    #[test]
    fn enumeration_examples() {
        let s2 = Space::standard(Ring::gf2(), 2).unwrap();
        assert_eq!(enumerate_self_adjoint(&s2).unwrap().len(), 8);
        let s1 = Space::standard(Ring::gf2(), 1).unwrap();
        let ops = enumerate_self_adjoint(&s1).unwrap();
        assert_eq!(ops.iter().map(|o| o.entry(0, 0).bits()).collect::<Vec<_>>(), vec![0, 1]);
        let g = Space::standard(Ring::gf4(Star::Frobenius(1)).unwrap(), 1).unwrap();
        assert_eq!(enumerate_self_adjoint(&g).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_preconditions() {
        let q = Ring::new(RingSpec::quotient(2, 0b101)).unwrap();
        assert_eq!(
            enumerate_self_adjoint(&Space::standard(q, 1).unwrap()),
            Err(ExplorerError::UnsupportedRing)
        );
        let big = Ring::new(RingSpec::gf2k(5, 0b100101, Star::Identity)).unwrap();
        assert_eq!(
            enumerate_self_adjoint(&Space::standard(big, 1).unwrap()),
            Err(ExplorerError::UnsupportedRing)
        );
        let s = Space::standard(Ring::gf2(), 5).unwrap();
        assert!(matches!(
            enumerate_self_adjoint(&s),
            Err(ExplorerError::TooLarge { .. })
        ));
    }

    #[test]
    fn census_rows_for_the_line() {
        let s = Space::standard(Ring::gf2(), 1).unwrap();
        let rows = exhaustive_verify(&s, ExploreParams::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(CensusRow::all_pass));
        let zero = rows.iter().find(|r| r.operator == "0").unwrap();
        assert!(!zero.egervary_n1);
        let one = rows.iter().find(|r| r.operator == "1").unwrap();
        assert!(one.egervary_n1);
    }

    #[test]
    fn census_csv_layout() {
        let s = Space::standard(Ring::gf2(), 1).unwrap();
        let rows = exhaustive_verify(&s, ExploreParams::default()).unwrap();
        let mut buf = Vec::new();
        write_census_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("ring,dim,gram,operator,halmos,egervary,sznagy,isometric,egervary_n1")
        );
        assert_eq!(
            lines.next(),
            Some("gf2k k=1 modulus=2 star=identity,1,1,0,true,true,true,true,false")
        );
    }

    #[test]
    fn ando_examples() {
        let s = Space::standard(Ring::gf2(), 1).unwrap();
        let zero = Operator::from_masks(&s, &[&[0]]).unwrap();
        let one = Operator::from_masks(&s, &[&[1]]).unwrap();
        let res = ando_search(&zero, &zero, DEFAULT_ANDO_BUDGET).unwrap();
        let (u1, u2) = res.witness.clone().unwrap();
        let swap = Matrix::from_masks(Ring::gf2(), &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(u1.matrix(), &swap);
        assert_eq!(u2.matrix(), &swap);
        assert!(res.reverify());
        let res = ando_search(&zero, &one, DEFAULT_ANDO_BUDGET).unwrap();
        let (u1, u2) = res.witness.clone().unwrap();
        assert_eq!(u1.matrix(), &swap);
        assert!(u2.matrix().is_identity());
        assert!(res.reverify());
        assert!(matches!(
            ando_search(&zero, &one, 0),
            Err(ExplorerError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ando_rejects_bad_input() {
        let s = Space::standard(Ring::gf2(), 2).unwrap();
        let a = Operator::from_masks(&s, &[&[1, 0], &[0, 0]]).unwrap();
        let b = Operator::from_masks(&s, &[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(
            ando_search(&a, &b, DEFAULT_ANDO_BUDGET),
            Err(ExplorerError::NotCommuting)
        );
        let n = Operator::from_masks(&s, &[&[0, 1], &[0, 0]]).unwrap();
        assert_eq!(
            ando_search(&n, &a, DEFAULT_ANDO_BUDGET),
            Err(ExplorerError::NotSelfAdjoint)
        );
        let other = Space::hyperbolic(Ring::gf2());
        assert_eq!(
            ando_search(&a, &Operator::identity(&other), DEFAULT_ANDO_BUDGET),
            Err(ExplorerError::SpaceMismatch)
        );
    }

    #[test]
    fn ando_on_a_commuting_pair_in_dimension_two() {
        // 2^(3·4) = 4096 completions per side; 2^24 pairs.
        let s = Space::standard(Ring::gf2(), 2).unwrap();
        let a = Operator::from_masks(&s, &[&[1, 0], &[0, 0]]).unwrap();
        let b = Operator::from_masks(&s, &[&[0, 0], &[0, 1]]).unwrap();
        let res = ando_search(&a, &b, DEFAULT_ANDO_BUDGET).unwrap();
        assert!(res.found);
        assert!(res.reverify());
    }
}
