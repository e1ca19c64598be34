//! Double-double (compensated) arithmetic for the determinant kernel.
//!
//! The closed orbital-integral formula divides a determinant with
//! unit-modulus entries by two Vandermonde products; near the minimum
//! eigenvalue separation the determinant is many orders below the entry
//! scale and plain f64 elimination loses ~8 digits. Carrying the
//! elimination in ~31-digit double-double arithmetic keeps the route
//! comfortably inside the 1e-8 agreement budget.

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let hi = a + b;
    let bb = hi - a;
    let lo = (a - (hi - bb)) + (b - bb);
    Dd { hi, lo }
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    // requires |a| >= |b|
    let hi = a + b;
    let lo = b - (hi - a);
    Dd { hi, lo }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let hi = a * b;
    // mul_add is correctly rounded, so this recovers the exact error term
    let lo = a.mul_add(b, -hi);
    Dd { hi, lo }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let t = two_sum(self.lo, other.lo);
        let mid = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(mid.hi, mid.lo + t.lo)
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        let lo = p.lo + (self.hi * other.lo + self.lo * other.hi);
        quick_two_sum(p.hi, lo)
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r1 = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = r1.hi / other.hi;
        let r2 = r1.sub(other.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / other.hi;
        quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }
}

/// `2π` split across two doubles.
const TWO_PI: Dd = Dd { hi: std::f64::consts::TAU, lo: 2.4492935982947064e-16 };

/// `e^{i a λ}` in double-double precision: the product is formed exactly
/// with `two_prod`, range-reduced mod 2π, and exponentiated by a complex
/// Taylor loop.
pub(crate) fn dd_cis(a: f64, lambda: f64) -> DdComplex {
    let theta = two_prod(a, lambda);
    let k = (theta.value() / TWO_PI.hi).round();
    let r = theta.sub(TWO_PI.mul(Dd::from_f64(k)));
    let i_r = DdComplex { re: Dd::ZERO, im: r };
    let mut term = DdComplex { re: Dd::from_f64(1.0), im: Dd::ZERO };
    let mut sum = term;
    for m in 1..=64 {
        term = term.mul(i_r);
        let inv = Dd::from_f64(1.0).div(Dd::from_f64(m as f64));
        term = DdComplex { re: term.re.mul(inv), im: term.im.mul(inv) };
        sum = sum.add(term);
        if term.norm_sqr_f64() < 1e-66 {
            break;
        }
    }
    sum
}

/// Complex number with double-double components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DdComplex {
    pub re: Dd,
    pub im: Dd,
}

impl DdComplex {
    pub const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };

    #[inline]
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    #[inline]
    pub fn add(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(other.re), im: self.im.add(other.im) }
    }

    #[inline]
    pub fn sub(self, other: DdComplex) -> DdComplex {
        DdComplex { re: self.re.sub(other.re), im: self.im.sub(other.im) }
    }

    #[inline]
    pub fn mul(self, other: DdComplex) -> DdComplex {
        DdComplex {
            re: self.re.mul(other.re).sub(self.im.mul(other.im)),
            im: self.re.mul(other.im).add(self.im.mul(other.re)),
        }
    }

    #[inline]
    pub fn div(self, other: DdComplex) -> DdComplex {
        let denom = other.re.mul(other.re).add(other.im.mul(other.im));
        let num = self.mul(DdComplex { re: other.re, im: other.im.neg() });
        DdComplex { re: num.re.div(denom), im: num.im.div(denom) }
    }

    /// |z|² in plain f64, for pivot selection.
    #[inline]
    pub fn norm_sqr_f64(self) -> f64 {
        let re = self.re.value();
        let im = self.im.value();
        re * re + im * im
    }
}
