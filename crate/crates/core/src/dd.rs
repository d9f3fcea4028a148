//! Double-double arithmetic (an unevaluated sum `hi + lo` of two f64s,
//! about 106 significant bits).
//!
//! Only what the remainder check needs: the four operations, `exp`, and a
//! Gauss-Legendre rule. The remainder integral of the Euler series and the
//! partial sums it is compared with both reach ~1e10 at `x = 0.2, k = 30`
//! while their difference must be resolved to ~1e-9, which is out of reach
//! for plain f64.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    fn ldexp(self, e: i32) -> Dd {
        let s = 2f64.powi(e);
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn exp(self) -> Dd {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        // exp(a) = 2^m exp(r)^(2^10) with |r| <= ln2 / 2^11
        let m = (self.hi / LN2.hi).round();
        let r = (self - LN2.mul_f64(m)).ldexp(-10);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for n in 1..=20 {
            term = (term * r) / Dd::from_f64(n as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        for _ in 0..10 {
            sum = sum * sum;
        }
        // split the power of two so intermediate scales stay finite
        let m = m as i32;
        let half = m / 2;
        sum.ldexp(half).ldexp(m - half)
    }

    pub fn powi(self, n: u32) -> Dd {
        let mut acc = Dd::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        // long division: two correction steps
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

/// Number of points of the Gauss-Legendre rule used by [`gauss_legendre`].
pub(crate) const GL_POINTS: usize = 20;

/// `GL_POINTS`-point Gauss-Legendre rule on `[-1, 1]` in double-double,
/// as `(nodes, weights)`.
pub(crate) fn gauss_legendre() -> &'static (Vec<Dd>, Vec<Dd>) {
    static RULE: OnceLock<(Vec<Dd>, Vec<Dd>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            // Tricomi's initial guess, then Newton in double-double
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut t = Dd::from_f64(guess);
            for _ in 0..8 {
                let (p, dp) = legendre(n, t);
                t = t - p / dp;
            }
            let (_, dp) = legendre(n, t);
            let w = Dd::from_f64(2.0) / ((Dd::ONE - t * t) * dp * dp);
            nodes.push(t);
            weights.push(w);
        }
        (nodes, weights)
    })
}

/// `(P_n(t), P_n'(t))`.
fn legendre(n: usize, t: Dd) -> (Dd, Dd) {
    let mut p0 = Dd::ONE;
    let mut p1 = t;
    for k in 1..n {
        let k = k as f64;
        let p2 = ((t * p1).mul_f64(2.0 * k + 1.0) - p0.mul_f64(k)) / Dd::from_f64(k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = (p0 - t * p1).mul_f64(n as f64) / (Dd::ONE - t * t);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: Dd, b: Dd) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn exp_matches_reference() {
        // reference values from a 50-digit evaluation at the f64 arguments
        let cases = [
            (0.1, 1.1051709180756477, -8.149523913327619e-17),
            (1.5, 4.4816890703380645, 3.0481759556536343e-16),
            (-37.25, 6.64554417291507e-17, -5.891784267265031e-34),
            (100.0, 2.6881171418161356e+43, -1.6101271449201627e+27),
            (-0.693, 0.5000735956957677, -1.9950320185449292e-17),
        ];
        for (a, hi, lo) in cases {
            let got = Dd::from_f64(a).exp();
            let r = rel(got, Dd { hi, lo });
            assert!(r < 1e-28, "exp({a}): rel err {r:e}");
        }
    }

    #[test]
    fn arithmetic_keeps_low_word() {
        let third = Dd::ONE / Dd::from_f64(3.0);
        let back = third.mul_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let big = Dd::from_f64(1e16) + Dd::from_f64(1.0);
        assert_eq!((big - Dd::from_f64(1e16)).to_f64(), 1.0);
        assert!(
            rel(
                Dd::from_f64(1.1).powi(10) / Dd::from_f64(1.1).powi(9),
                Dd::from_f64(1.1)
            ) < 1e-30
        );
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (t, w) = gauss_legendre();
        // exact through degree 39; int_{-1}^{1} t^38 dt = 2/39
        let s = t.iter().zip(w).fold(Dd::ZERO, |acc, (&t, &w)| acc + w * t.powi(38));
        assert!(rel(s, Dd::from_f64(2.0) / Dd::from_f64(39.0)) < 1e-28);
        let total = w.iter().fold(Dd::ZERO, |acc, &w| acc + w);
        assert!((total - Dd::from_f64(2.0)).to_f64().abs() < 1e-30);
    }
}
