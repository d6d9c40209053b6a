//! Commutative characteristic-2 *-rings: `GF(2^k)` and `GF(2)[x]/(p)`.
//!
//! Elements are residues stored as little-endian coefficient bitmasks (bit `i`
//! is the coefficient of `x^i`). Addition is XOR, multiplication is a
//! carry-less product followed by reduction modulo the ring's modulus. The
//! involution is either the identity or the Frobenius power `a ↦ a^(2^m)`
//! with `m = k/2`, which has order exactly 2 on `GF(2^k)`.

use std::fmt;

use thiserror::Error;

/// Largest supported residue degree.
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("degree {0} outside supported range 1..={MAX_DEGREE}")]
    BadDegree(u32),
    #[error("modulus {modulus:#x} does not have degree {degree}")]
    ModulusDegree { modulus: u32, degree: u32 },
    #[error("modulus {0:#x} is reducible over GF(2)")]
    Reducible(u32),
    #[error("frobenius exponent {m} is not an order-2 involution on a degree-{degree} ring")]
    BadFrobenius { m: u32, degree: u32 },
    #[error("element {elem:#x} is not a unit")]
    NotAUnit { elem: u32 },
    #[error("mask {mask:#x} has bits at or above degree {degree}")]
    MaskOutOfRange { mask: u32, degree: u32 },
    #[error("invalid hex element {0:?}")]
    BadHex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingKind {
    /// A field; the modulus must be irreducible.
    Gf2k,
    /// Any quotient `GF(2)[x]/(p)`, possibly with zero divisors.
    Quotient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Star {
    Identity,
    /// `a ↦ a^(2^m)`.
    Frobenius(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RingSpec {
    pub kind: RingKind,
    pub degree: u32,
    pub modulus: u32,
    pub star: Star,
}

impl RingSpec {
    pub fn gf2k(degree: u32, modulus: u32, star: Star) -> Self {
        RingSpec {
            kind: RingKind::Gf2k,
            degree,
            modulus,
            star,
        }
    }

    pub fn quotient(degree: u32, modulus: u32) -> Self {
        RingSpec {
            kind: RingKind::Quotient,
            degree,
            modulus,
            star: Star::Identity,
        }
    }
}

/// A ring element: the residue bitmask. Which ring it belongs to is carried by
/// the containing structure (vector, matrix, space).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    /// GF(2) element from the low bit of `b`.
    pub const fn from_bit(b: u32) -> Elem {
        Elem(b & 1)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Validated ring handle. Cheap to copy and compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    spec: RingSpec,
}

/// Degree of a GF(2) polynomial given as a bitmask; `None` for zero.
#[inline]
pub fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

/// Carry-less product of two polynomials of degree < 16.
#[inline]
fn clmul(a: u32, b: u32) -> u32 {
    let mut acc = 0;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    acc
}

/// Polynomial remainder `a mod m` over GF(2).
#[inline]
fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = 31 - m.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// Polynomial division over GF(2), returning (quotient, remainder).
fn poly_divrem(mut a: u32, m: u32) -> (u32, u32) {
    let dm = 31 - m.leading_zeros();
    let mut q = 0;
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < dm {
            break;
        }
        q |= 1 << (da - dm);
        a ^= m << (da - dm);
    }
    (q, a)
}

/// Exhaustive divisor scan: `p` is irreducible iff no polynomial of degree
/// `1..=deg(p)/2` divides it.
pub fn is_irreducible(p: u32) -> bool {
    let Some(deg) = poly_degree(p) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

impl Ring {
    pub fn new(spec: RingSpec) -> Result<Self, RingError> {
        let k = spec.degree;
        if k == 0 || k > MAX_DEGREE {
            return Err(RingError::BadDegree(k));
        }
        if poly_degree(spec.modulus) != Some(k) {
            return Err(RingError::ModulusDegree {
                modulus: spec.modulus,
                degree: k,
            });
        }
        if spec.kind == RingKind::Gf2k && !is_irreducible(spec.modulus) {
            return Err(RingError::Reducible(spec.modulus));
        }
        if let Star::Frobenius(m) = spec.star {
            if spec.kind != RingKind::Gf2k || !k.is_multiple_of(2) || m != k / 2 {
                return Err(RingError::BadFrobenius { m, degree: k });
            }
        }
        Ok(Ring { spec })
    }

    /// GF(2) with modulus `x`.
    pub fn gf2() -> Self {
        Ring::new(RingSpec::gf2k(1, 0b10, Star::Identity)).expect("GF(2) is valid")
    }

    /// GF(4) = GF(2)[x]/(x²+x+1).
    pub fn gf4(star: Star) -> Result<Self, RingError> {
        Ring::new(RingSpec::gf2k(2, 0b111, star))
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn degree(&self) -> u32 {
        self.spec.degree
    }

    pub fn is_field(&self) -> bool {
        self.spec.kind == RingKind::Gf2k
    }

    /// Number of elements, `2^k`.
    pub fn size(&self) -> u64 {
        1u64 << self.spec.degree
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    pub fn one(&self) -> Elem {
        Elem::ONE
    }

    #[inline]
    fn mask(&self) -> u32 {
        (1u32 << self.spec.degree) - 1
    }

    /// Checked constructor from a residue bitmask.
    pub fn elem(&self, mask: u32) -> Result<Elem, RingError> {
        if mask & !self.mask() != 0 {
            return Err(RingError::MaskOutOfRange {
                mask,
                degree: self.spec.degree,
            });
        }
        Ok(Elem(mask))
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 & !self.mask() == 0
    }

    /// All elements in increasing mask order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..(1u32 << self.spec.degree)).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.spec.degree == 1 {
            return Elem(a.0 & b.0);
        }
        Elem(poly_rem(clmul(a.0, b.0), self.spec.modulus))
    }

    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse by the extended Euclidean algorithm on polynomial
    /// representatives.
    pub fn inv(&self, a: Elem) -> Result<Elem, RingError> {
        if a.0 == 0 {
            return Err(RingError::NotAUnit { elem: 0 });
        }
        // Invariant: s_i * a ≡ r_i (mod modulus).
        let (mut r0, mut r1) = (self.spec.modulus, a.0);
        let (mut s0, mut s1) = (0u32, 1u32);
        while r1 != 0 {
            let (q, r) = poly_divrem(r0, r1);
            r0 = r1;
            r1 = r;
            let s = s0 ^ poly_rem(clmul(q, s1), self.spec.modulus);
            s0 = s1;
            s1 = s;
        }
        if r0 != 1 {
            return Err(RingError::NotAUnit { elem: a.0 });
        }
        Ok(Elem(poly_rem(s0, self.spec.modulus)))
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.inv(a).is_ok()
    }

    #[inline]
    pub fn star(&self, a: Elem) -> Elem {
        match self.spec.star {
            Star::Identity => a,
            Star::Frobenius(m) => {
                let mut x = a;
                for _ in 0..m {
                    x = self.square(x);
                }
                x
            }
        }
    }

    /// Lowercase hex, no prefix.
    pub fn to_hex(&self, a: Elem) -> String {
        format!("{:x}", a.0)
    }

    pub fn from_hex(&self, s: &str) -> Result<Elem, RingError> {
        if s.is_empty() || s.starts_with('+') {
            return Err(RingError::BadHex(s.to_string()));
        }
        let mask = u32::from_str_radix(s, 16).map_err(|_| RingError::BadHex(s.to_string()))?;
        self.elem(mask)
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.spec.kind {
            RingKind::Gf2k => "gf2k",
            RingKind::Quotient => "quotient",
        };
        let star = match self.spec.star {
            Star::Identity => "identity".to_string(),
            Star::Frobenius(m) => format!("frobenius:{m}"),
        };
        write!(
            f,
            "{kind} k={} modulus={:x} star={star}",
            self.spec.degree, self.spec.modulus
        )
    }
}
