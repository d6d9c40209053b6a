//! The four dilation constructions for a self-adjoint `T`, the explicit
//! inverses that certify their unitarity, and a verification engine that
//! turns every claimed identity into an exact check.

use std::fmt;

use thiserror::Error;

use crate::explorer::serialize_matrix;
use crate::matrix::Matrix;
use crate::operator::{Operator, OperatorError};
use crate::seqspace::{FinSuppSeq, LazyBandedOp, LazyKind, SeqError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DilationError {
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("Egervary order must be at least 1, got {0}")]
    BadOrder(usize),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DilationKind {
    Halmos,
    Egervary,
    SzNagy,
    Isometric,
}

impl DilationKind {
    pub const ALL: [DilationKind; 4] = [
        DilationKind::Halmos,
        DilationKind::Egervary,
        DilationKind::SzNagy,
        DilationKind::Isometric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DilationKind::Halmos => "halmos",
            DilationKind::Egervary => "egervary",
            DilationKind::SzNagy => "sznagy",
            DilationKind::Isometric => "isometric",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        DilationKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for DilationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn require_self_adjoint(t: &Operator) -> Result<(), DilationError> {
    if !t.is_self_adjoint() {
        return Err(DilationError::NotSelfAdjoint);
    }
    Ok(())
}

/// `[[T, I+T], [I+T, T]]` on `V ⊕ V`.
pub fn halmos_dilate(t: &Operator) -> Result<Operator, DilationError> {
    egervary_dilate(t, 1)
}

/// Block matrix on `N+1` copies of `V`:
///
/// ```text
/// row 0:       [T,   0, …, 0, I+T]
/// row 1:       [I+T, 0, …, 0, T  ]
/// row r ≥ 2:   I in column r-1
/// ```
pub fn egervary_dilate(t: &Operator, order: usize) -> Result<Operator, DilationError> {
    require_self_adjoint(t)?;
    if order < 1 {
        return Err(DilationError::BadOrder(order));
    }
    let size = order + 1;
    let a = t.one_plus();
    let id = Operator::identity(t.space());
    let mut grid: Vec<Vec<Option<&Matrix>>> = vec![vec![None; size]; size];
    grid[0][0] = Some(t.matrix());
    grid[0][order] = Some(a.matrix());
    grid[1][0] = Some(a.matrix());
    grid[1][order] = Some(t.matrix());
    for (r, row) in grid.iter_mut().enumerate().skip(2) {
        row[r - 1] = Some(id.matrix());
    }
    build(t, size, &grid)
}

/// The explicit inverse used to certify unitarity of [`egervary_dilate`]:
///
/// ```text
/// row 0:           [T, I+T, 0, …]
/// row r, 1≤r<N:    I in column r+1
/// row N:           [I+T, T, 0, …]
/// ```
///
/// For `N = 1` this is the Halmos matrix itself.
pub fn egervary_inverse(t: &Operator, order: usize) -> Result<Operator, DilationError> {
    require_self_adjoint(t)?;
    if order < 1 {
        return Err(DilationError::BadOrder(order));
    }
    let size = order + 1;
    let a = t.one_plus();
    let id = Operator::identity(t.space());
    let mut grid: Vec<Vec<Option<&Matrix>>> = vec![vec![None; size]; size];
    grid[0][0] = Some(t.matrix());
    grid[0][1] = Some(a.matrix());
    for (r, row) in grid.iter_mut().enumerate().take(order).skip(1) {
        row[r + 1] = Some(id.matrix());
    }
    grid[order][0] = Some(a.matrix());
    grid[order][1] = Some(t.matrix());
    build(t, size, &grid)
}

fn build(t: &Operator, size: usize, grid: &[Vec<Option<&Matrix>>]) -> Result<Operator, DilationError> {
    let space = t.space().direct_sum(size).map_err(OperatorError::from)?;
    let m = Matrix::from_blocks(t.space().ring(), t.dim(), grid).map_err(OperatorError::from)?;
    Ok(Operator::new(space, m)?)
}

/// Bilateral unitary dilation on `⊕_{n∈ℤ} V`.
pub fn sznagy_dilate(t: &Operator) -> Result<LazyBandedOp, DilationError> {
    require_self_adjoint(t)?;
    Ok(LazyBandedOp::new(t.clone(), LazyKind::SzNagy)?)
}

/// Unilateral isometric dilation on `⊕_{n≥0} V`.
pub fn isometric_sznagy_dilate(t: &Operator) -> Result<LazyBandedOp, DilationError> {
    require_self_adjoint(t)?;
    Ok(LazyBandedOp::new(t.clone(), LazyKind::Isometric)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyParams {
    /// Egervary order `N`.
    pub order: usize,
    /// Highest power checked for the sequence-space dilations.
    pub max_power: u64,
    /// Half-width of the window of basis sequences used for the
    /// unitarity/isometry certificate of the lazy operators.
    pub window: i64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            order: 1,
            max_power: 8,
            window: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerCheck {
    pub power: u64,
    pub holds: bool,
    /// Whether the dilation theorem asserts this identity.
    pub guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilationReport {
    pub kind: DilationKind,
    pub order: Option<usize>,
    pub unitary_ok: bool,
    pub isometry_ok: bool,
    /// `⟨Ux, Uy⟩ = ⟨x, y⟩` on the tested vectors or basis sequences.
    pub inner_preserved: bool,
    /// The explicit inverse from the construction equals `U†` and inverts
    /// `U` on both sides. `None` for the lazy kinds.
    pub inverse_ok: Option<bool>,
    pub power_checks: Vec<PowerCheck>,
    pub adjoint_power_checks: Vec<PowerCheck>,
    pub witness: Option<String>,
}

impl DilationReport {
    /// Every identity the corresponding theorem asserts holds.
    pub fn holds(&self) -> bool {
        let structure = match self.kind {
            DilationKind::Isometric => self.isometry_ok,
            _ => self.unitary_ok && self.isometry_ok,
        };
        structure
            && self.inner_preserved
            && self.inverse_ok.unwrap_or(true)
            && self
                .power_checks
                .iter()
                .chain(&self.adjoint_power_checks)
                .all(|c| c.holds || !c.guaranteed)
    }

    /// Whether the power identity for `power` holds, if it was checked.
    pub fn power_holds(&self, power: u64) -> Option<bool> {
        self.power_checks.iter().find(|c| c.power == power).map(|c| c.holds)
    }

    /// `key=value` lines for scripts.
    pub fn machine_lines(&self) -> Vec<String> {
        let mut out = vec![format!("kind={}", self.kind)];
        if let Some(n) = self.order {
            out.push(format!("order={n}"));
        }
        out.push(format!("unitary_ok={}", self.unitary_ok));
        out.push(format!("isometry_ok={}", self.isometry_ok));
        out.push(format!("inner_preserved={}", self.inner_preserved));
        if let Some(ok) = self.inverse_ok {
            out.push(format!("inverse_ok={ok}"));
        }
        for (label, checks) in [
            ("power", &self.power_checks),
            ("adjoint_power", &self.adjoint_power_checks),
        ] {
            for c in checks.iter() {
                out.push(format!(
                    "{label} k={} holds={} guaranteed={}",
                    c.power, c.holds, c.guaranteed
                ));
            }
        }
        out.push(format!("witness={}", self.witness.as_deref().unwrap_or("none")));
        out.push(format!("status={}", if self.holds() { "pass" } else { "fail" }));
        out
    }
}

impl fmt::Display for DilationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAILED" };
        match self.order {
            Some(n) => writeln!(f, "{} dilation (N = {n})", self.kind)?,
            None => writeln!(f, "{} dilation", self.kind)?,
        }
        if self.kind == DilationKind::Isometric {
            writeln!(f, "  isometry U*U = I: {}", mark(self.isometry_ok))?;
            writeln!(
                f,
                "  co-isometry UU* = I: {}",
                if self.unitary_ok { "yes" } else { "no (not required)" }
            )?;
        } else {
            writeln!(
                f,
                "  unitary UU* = U*U = I: {}",
                mark(self.unitary_ok && self.isometry_ok)
            )?;
        }
        writeln!(f, "  inner product preserved: {}", mark(self.inner_preserved))?;
        if let Some(ok) = self.inverse_ok {
            writeln!(f, "  explicit inverse equals U*: {}", mark(ok))?;
        }
        for (label, checks) in [("T^k", &self.power_checks), ("(T*)^k", &self.adjoint_power_checks)] {
            for c in checks.iter() {
                let note = match (c.holds, c.guaranteed) {
                    (true, _) => "ok",
                    (false, true) => "FAILED",
                    (false, false) => "does not hold (beyond the guaranteed range)",
                };
                writeln!(f, "  {label} = P U^k|_V at k = {}: {note}", c.power)?;
            }
        }
        if let Some(w) = &self.witness {
            writeln!(f, "  first failure: {w}")?;
        }
        write!(f, "  overall: {}", if self.holds() { "PASS" } else { "FAIL" })
    }
}

fn record_witness(witness: &mut Option<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && witness.is_none() {
        *witness = Some(msg());
    }
}

/// Builds the requested dilation of `t` and checks every identity it is
/// supposed to satisfy.
pub fn verify_dilation(
    t: &Operator,
    kind: DilationKind,
    params: VerifyParams,
) -> Result<DilationReport, DilationError> {
    match kind {
        DilationKind::Halmos => verify_finite_dilation(t, kind, 1, 1),
        DilationKind::Egervary => verify_finite_dilation(t, kind, params.order, params.order as u64 + 1),
        DilationKind::SzNagy | DilationKind::Isometric => verify_lazy(t, kind, params),
    }
}

/// Checks a finite dilation of order `order` (1 for Halmos) with the power
/// identities for `k = 1..=top`; those with `k > order` are informational.
pub fn verify_finite_dilation(
    t: &Operator,
    kind: DilationKind,
    order: usize,
    top: u64,
) -> Result<DilationReport, DilationError> {
    debug_assert!(matches!(kind, DilationKind::Halmos | DilationKind::Egervary));
    let u = egervary_dilate(t, order)?;
    let v = egervary_inverse(t, order)?;
    let d = t.dim();
    let mut witness = None;

    let class = u.classify();
    record_witness(&mut witness, class.isometry, || "U*U != I".into());
    record_witness(&mut witness, class.unitary, || "UU* != I".into());

    let adj = u.adjoint();
    let inverse_ok = adj == v && u.mul(&v)?.matrix().is_identity() && v.mul(&u)?.matrix().is_identity();
    record_witness(&mut witness, inverse_ok, || "explicit inverse differs from U*".into());

    // Unitary on the basis implies inner-product preservation; checked
    // directly on basis pairs all the same.
    let space = u.space();
    let inner_preserved = (0..space.dim()).all(|i| {
        (0..space.dim()).all(|j| {
            let (ei, ej) = (space.basis(i), space.basis(j));
            let lhs = space.inner(&u.apply(&ei).expect("same"), &u.apply(&ej).expect("same"));
            lhs == space.inner(&ei, &ej)
        })
    });
    record_witness(&mut witness, inner_preserved, || "<Ux, Uy> != <x, y> on basis".into());

    let t_adj = t.adjoint();
    let mut power_checks = Vec::new();
    let mut adjoint_power_checks = Vec::new();
    let mut up = Operator::identity(space);
    let mut adjp = Operator::identity(space);
    for k in 1..=top {
        up = up.mul(&u)?;
        adjp = adjp.mul(&adj)?;
        let guaranteed = k <= order as u64;
        let got = up.compress(0, d)?;
        let holds = got.matrix() == t.pow(k).matrix();
        record_witness(&mut witness, holds, || {
            format!(
                "k={k}: P U^k|_V = [{}] but T^k = [{}]",
                serialize_matrix(got.matrix()),
                serialize_matrix(t.pow(k).matrix())
            )
        });
        power_checks.push(PowerCheck {
            power: k,
            holds,
            guaranteed,
        });
        let got = adjp.compress(0, d)?;
        let holds = got.matrix() == t_adj.pow(k).matrix();
        record_witness(&mut witness, holds, || {
            format!(
                "k={k}: P (U*)^k|_V = [{}] but (T*)^k = [{}]",
                serialize_matrix(got.matrix()),
                serialize_matrix(t_adj.pow(k).matrix())
            )
        });
        adjoint_power_checks.push(PowerCheck {
            power: k,
            holds,
            guaranteed,
        });
    }

    Ok(DilationReport {
        kind,
        order: (kind == DilationKind::Egervary).then_some(order),
        unitary_ok: class.unitary,
        isometry_ok: class.isometry,
        inner_preserved,
        inverse_ok: Some(inverse_ok),
        power_checks,
        adjoint_power_checks,
        witness,
    })
}

fn verify_lazy(t: &Operator, kind: DilationKind, params: VerifyParams) -> Result<DilationReport, DilationError> {
    let op = match kind {
        DilationKind::SzNagy => sznagy_dilate(t)?,
        _ => isometric_sznagy_dilate(t)?,
    };
    let lat = op.laterality();
    let space = t.space();
    let lo = match op.kind() {
        LazyKind::SzNagy => -params.window,
        LazyKind::Isometric => 0,
    };
    let probes: Vec<FinSuppSeq> = (lo..=params.window)
        .flat_map(|p| (0..space.dim()).map(move |j| (p, j)))
        .map(|(p, j)| FinSuppSeq::delta(p, &space.basis(j), lat))
        .collect::<Result<_, _>>()?;

    let mut witness = None;
    let mut isometry_ok = true;
    let mut co_isometry_ok = true;
    let mut images = Vec::with_capacity(probes.len());
    for x in &probes {
        let ux = op.apply(x)?;
        if op.apply_adjoint(&ux)? != *x {
            isometry_ok = false;
            record_witness(&mut witness, false, || {
                format!("U*U != I on basis sequence at {:?}", x.span())
            });
        }
        if op.apply(&op.apply_adjoint(x)?)? != *x {
            co_isometry_ok = false;
            if kind == DilationKind::SzNagy {
                record_witness(&mut witness, false, || {
                    format!("UU* != I on basis sequence at {:?}", x.span())
                });
            }
        }
        images.push(ux);
    }
    let mut inner_preserved = true;
    'outer: for (i, x) in probes.iter().enumerate() {
        for (j, y) in probes.iter().enumerate() {
            if images[i].inner(&images[j])? != x.inner(y)? {
                inner_preserved = false;
                record_witness(&mut witness, false, || "<Ux, Uy> != <x, y> on basis sequences".into());
                break 'outer;
            }
        }
    }

    let t_adj = t.adjoint();
    let mut power_checks = Vec::new();
    let mut adjoint_power_checks = Vec::new();
    for k in 1..=params.max_power {
        let got = op.compress_power(k);
        let holds = got.matrix() == t.pow(k).matrix();
        record_witness(&mut witness, holds, || {
            format!("k={k}: P U^k|_V = [{}]", serialize_matrix(got.matrix()))
        });
        power_checks.push(PowerCheck {
            power: k,
            holds,
            guaranteed: true,
        });
        let got = op.compress_adjoint_power(k);
        let holds = got.matrix() == t_adj.pow(k).matrix();
        record_witness(&mut witness, holds, || {
            format!("k={k}: P (U*)^k|_V = [{}]", serialize_matrix(got.matrix()))
        });
        adjoint_power_checks.push(PowerCheck {
            power: k,
            holds,
            guaranteed: true,
        });
    }

    Ok(DilationReport {
        kind,
        order: None,
        unitary_ok: isometry_ok && co_isometry_ok,
        isometry_ok,
        inner_preserved,
        inverse_ok: None,
        power_checks,
        adjoint_power_checks,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{Ring, Star};
    use crate::space::Space;

    fn line(r: Ring) -> Space {
        Space::standard(r, 1).unwrap()
    }

    fn scalar(s: &Space, m: u32) -> Operator {
        Operator::from_masks(s, &[&[m]]).unwrap()
    }

    #[test]
    fn halmos_examples() {
        let s = line(Ring::gf2());
        let u = halmos_dilate(&scalar(&s, 0)).unwrap();
        assert_eq!(
            u.matrix(),
            &Matrix::from_masks(Ring::gf2(), &[&[0, 1], &[1, 0]]).unwrap()
        );
        assert!(u.mul(&u).unwrap().matrix().is_identity());
        let u = halmos_dilate(&scalar(&s, 1)).unwrap();
        assert!(u.matrix().is_identity());
        let r = Ring::gf4(Star::Identity).unwrap();
        let s4 = line(r);
        let u = halmos_dilate(&scalar(&s4, 2)).unwrap();
        assert_eq!(u.matrix(), &Matrix::from_masks(r, &[&[2, 3], &[3, 2]]).unwrap());
        assert!(u.mul(&u.adjoint()).unwrap().matrix().is_identity());
        assert_eq!(u.compress(0, 1).unwrap(), scalar(&s4, 2));
    }

    #[test]
    fn not_self_adjoint_rejected() {
        let s = Space::standard(Ring::gf2(), 2).unwrap();
        let t = Operator::from_masks(&s, &[&[0, 1], &[0, 0]]).unwrap();
        assert_eq!(halmos_dilate(&t), Err(DilationError::NotSelfAdjoint));
        assert_eq!(egervary_dilate(&t, 3), Err(DilationError::NotSelfAdjoint));
        assert_eq!(sznagy_dilate(&t), Err(DilationError::NotSelfAdjoint));
        assert_eq!(isometric_sznagy_dilate(&t), Err(DilationError::NotSelfAdjoint));
        assert_eq!(
            egervary_dilate(&Operator::identity(&s), 0),
            Err(DilationError::BadOrder(0))
        );
    }

    #[test]
    fn egervary_examples() {
        let s = line(Ring::gf2());
        let t1 = scalar(&s, 1);
        let u = egervary_dilate(&t1, 2).unwrap();
        assert_eq!(
            u.matrix(),
            &Matrix::from_masks(Ring::gf2(), &[&[1, 0, 0], &[0, 0, 1], &[0, 1, 0]]).unwrap()
        );
        for k in 1..=2 {
            assert!(u.pow(k).compress(0, 1).unwrap().matrix().is_identity());
        }
        let t0 = scalar(&s, 0);
        let u = egervary_dilate(&t0, 1).unwrap();
        assert!(u.pow(2).compress(0, 1).unwrap().matrix().is_identity());
        assert_eq!(egervary_dilate(&t0, 1), halmos_dilate(&t0));
    }

    #[test]
    fn egervary_inverse_matches_adjoint_for_several_orders() {
        let s = Space::hyperbolic(Ring::gf2());
        let t = Operator::from_masks(&s, &[&[1, 1], &[0, 1]]).unwrap();
        assert!(t.is_self_adjoint());
        for n in 1..=5 {
            let u = egervary_dilate(&t, n).unwrap();
            let v = egervary_inverse(&t, n).unwrap();
            assert_eq!(u.adjoint(), v);
            assert!(u.mul(&v).unwrap().matrix().is_identity());
        }
    }

    #[test]
    fn verify_examples() {
        let s = line(Ring::gf2());
        let rep = verify_dilation(&scalar(&s, 1), DilationKind::Halmos, VerifyParams::default()).unwrap();
        assert!(rep.unitary_ok && rep.holds());
        assert!(rep.power_checks.iter().all(|c| c.holds));

        let params = VerifyParams {
            order: 1,
            ..Default::default()
        };
        let rep = verify_dilation(&scalar(&s, 0), DilationKind::Egervary, params).unwrap();
        let pairs: Vec<(u64, bool)> = rep.power_checks.iter().map(|c| (c.power, c.holds)).collect();
        assert_eq!(pairs, vec![(1, true), (2, false)]);
        assert!(rep.witness.as_deref().unwrap().starts_with("k=2"));
        assert!(rep.holds(), "failure beyond N is informational");

        let r = Ring::gf4(Star::Identity).unwrap();
        let s4 = line(r);
        let rep = verify_dilation(&scalar(&s4, 2), DilationKind::SzNagy, VerifyParams::default()).unwrap();
        assert!(rep.holds() && rep.unitary_ok && rep.witness.is_none(), "{rep}");
    }

    #[test]
    fn isometric_report_flags_non_unitary() {
        let s = line(Ring::gf2());
        let rep = verify_dilation(&scalar(&s, 1), DilationKind::Isometric, VerifyParams::default()).unwrap();
        assert!(rep.isometry_ok);
        assert!(!rep.unitary_ok);
        assert!(rep.holds());
        assert!(rep.machine_lines().contains(&"status=pass".to_string()));
    }

    #[test]
    fn index_formula_variant_of_isometric_matrix_fails() {
        // Literal index rules u00 = T, u21 = I+T, u(n+1,n) = I for n ≥ 2
        // leave column 0 as (T, 0, 0, …), so U*U has T² in the corner.
        let s = line(Ring::gf2());
        let t = scalar(&s, 0);
        let n = 6;
        let a = t.one_plus();
        let id = Operator::identity(&s);
        let mut grid: Vec<Vec<Option<&Matrix>>> = vec![vec![None; n]; n];
        grid[0][0] = Some(t.matrix());
        grid[2][1] = Some(a.matrix());
        for (r, row) in grid.iter_mut().enumerate().skip(3) {
            row[r - 1] = Some(id.matrix());
        }
        let m = Matrix::from_blocks(Ring::gf2(), 1, &grid).unwrap();
        let mtm = m.transpose().mul(&m).unwrap();
        assert!(mtm.get(0, 0).is_zero(), "corner is T² = 0, not 1");
    }
}
