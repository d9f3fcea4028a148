//! Truncated formal power series and the recurrences that generate formal
//! solutions of Euler-type equations.
//!
//! A [`FormalSeries`] stores `a_0..a_N` together with an explicit offset `p`,
//! so it represents `sum_{n>=0} a_n x^(n+p)`. Both `p = 0` and `p = 1` occur in
//! practice (the Borel transform is defined on the `p = 1` form), and the
//! offset is always carried as data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx::{horner, is_finite};
use crate::error::{Error, Result};

/// Largest `n` for which `n!` is a finite double.
pub const MAX_FACTORIAL_ORDER: usize = 170;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct FormalSeries {
    offset: usize,
    coeffs: Vec<Complex64>,
    label: String,
}

/// Wire form: `{"offset": p, "re": [...], "im": [...], "label": "..."}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesRepr {
    offset: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(default)]
    label: String,
}

impl TryFrom<SeriesRepr> for FormalSeries {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        if r.re.len() != r.im.len() {
            return Err(Error::InvalidSeries(format!(
                "re has {} entries but im has {}",
                r.re.len(),
                r.im.len()
            )));
        }
        let coeffs =
            r.re.iter()
                .zip(&r.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        FormalSeries::new(r.offset, coeffs, r.label)
    }
}

impl From<FormalSeries> for SeriesRepr {
    fn from(s: FormalSeries) -> Self {
        SeriesRepr {
            offset: s.offset,
            re: s.coeffs.iter().map(|z| z.re).collect(),
            im: s.coeffs.iter().map(|z| z.im).collect(),
            label: s.label,
        }
    }
}

impl FormalSeries {
    pub fn new(offset: usize, coeffs: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if offset > 1 {
            return Err(Error::InvalidSeries(format!("offset must be 0 or 1, got {offset}")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidSeries("coefficient list is empty".into()));
        }
        if let Some(n) = coeffs.iter().position(|&z| !is_finite(z)) {
            return Err(Error::InvalidSeries(format!("coefficient a_{n} is not finite")));
        }
        Ok(FormalSeries {
            offset,
            coeffs,
            label: label.into(),
        })
    }

    pub fn from_real(offset: usize, coeffs: &[f64], label: impl Into<String>) -> Result<Self> {
        Self::new(offset, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), label)
    }

    /// A polynomial known exactly, stored to `order` (zero-filled past its
    /// degree, truncated if its degree exceeds `order`).
    pub fn polynomial(offset: usize, coeffs: &[Complex64], order: usize, label: impl Into<String>) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        for (dst, &src) in c.iter_mut().zip(coeffs) {
            *dst = src;
        }
        Self::new(offset, c, label)
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index `N` of the last stored coefficient.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> Option<Complex64> {
        self.coeffs.get(n).copied()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Keep `a_0..a_order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OutOfRange {
                index: order,
                max: self.order(),
            });
        }
        Ok(FormalSeries {
            offset: self.offset,
            coeffs: self.coeffs[..=order].to_vec(),
            label: self.label.clone(),
        })
    }

    /// `f_k(x) = sum_{n<k} a_n x^(n+offset)`, by Horner's scheme.
    pub fn eval_partial_sum(&self, x: Complex64, k: usize) -> Result<Complex64> {
        if k > self.coeffs.len() {
            return Err(Error::OutOfRange {
                index: k,
                max: self.coeffs.len(),
            });
        }
        let poly = horner(&self.coeffs[..k], x);
        Ok(if self.offset == 1 { poly * x } else { poly })
    }

    /// Coefficientwise convolution, truncated at the shorter order.
    pub fn cauchy_product(&self, other: &FormalSeries) -> Result<FormalSeries> {
        for s in [self, other] {
            if s.offset != 0 {
                return Err(Error::OffsetMismatch {
                    expected: 0,
                    found: s.offset,
                });
            }
        }
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * other.coeffs[k - i]).sum())
            .collect();
        FormalSeries::new(0, coeffs, format!("({})*({})", self.label, other.label))
    }

    /// Term-by-term derivative. The result always has offset 0.
    pub fn derivative(&self) -> FormalSeries {
        let coeffs: Vec<Complex64> = match self.offset {
            // d/dx sum a_n x^(n+1) = sum (n+1) a_n x^n
            1 => self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, &a)| a * (n as f64 + 1.0))
                .collect(),
            _ if self.coeffs.len() == 1 => vec![Complex64::new(0.0, 0.0)],
            _ => self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &a)| a * n as f64)
                .collect(),
        };
        FormalSeries {
            offset: 0,
            coeffs,
            label: format!("d/dx[{}]", self.label),
        }
    }

    /// `sum a_n x^(n+1) -> sum a_n zeta^n / n!`.
    pub fn borel_transform(&self) -> Result<BorelSeries> {
        if self.offset != 1 {
            return Err(Error::OffsetMismatch {
                expected: 1,
                found: self.offset,
            });
        }
        let mut fact = 1.0_f64;
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, &a)| {
                if n > 0 {
                    fact *= n as f64;
                }
                // past 170! the factorial is +inf and b_n underflows to 0
                a / fact
            })
            .collect();
        Ok(BorelSeries::new(coeffs, 1))
    }
}

/// Coefficients `b_n = a_n / n!` of a Borel transform, with an estimate of
/// their radius of convergence.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelSeries {
    coeffs: Vec<Complex64>,
    source_offset: usize,
    radius_estimate: f64,
}

impl BorelSeries {
    pub fn new(coeffs: Vec<Complex64>, source_offset: usize) -> Self {
        let radius_estimate = radius_from_tail(&coeffs);
        BorelSeries {
            coeffs,
            source_offset,
            radius_estimate,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn source_offset(&self) -> usize {
        self.source_offset
    }

    /// `1 / limsup |b_n|^(1/n)`, fitted on the tail; `+inf` when the tail is
    /// identically zero.
    pub fn radius_estimate(&self) -> f64 {
        self.radius_estimate
    }

    pub fn truncate(&self, order: usize) -> BorelSeries {
        BorelSeries::new(self.coeffs[..=order.min(self.order())].to_vec(), self.source_offset)
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        horner(&self.coeffs, zeta)
    }
}

/// Radius of convergence from a least-squares fit of `ln|c_n|` against `n`
/// over the last `max(5, N/4)` coefficients.
pub(crate) fn radius_from_tail(coeffs: &[Complex64]) -> f64 {
    let n_max = coeffs.len().saturating_sub(1);
    let tail = (n_max / 4).max(5).min(n_max);
    let pts: Vec<(f64, f64)> = (n_max + 1 - tail..=n_max)
        .filter(|&n| n >= 1 && coeffs[n].norm() > 0.0)
        .map(|n| (n as f64, coeffs[n].norm().ln()))
        .collect();
    match pts.len() {
        0 => f64::INFINITY,
        1 => {
            let (n, l) = pts[0];
            (-l / n).exp()
        }
        m => {
            let m = m as f64;
            let mean_n = pts.iter().map(|p| p.0).sum::<f64>() / m;
            let mean_l = pts.iter().map(|p| p.1).sum::<f64>() / m;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mean_n).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mean_n) * (p.1 - mean_l)).sum();
            (-sxy / sxx).exp()
        }
    }
}

/// Formal solution `sum (-1)^n n! x^(n+1)` of `x^2 y' + y = x`, through `a_N`.
pub fn euler_formal_coeffs(order: usize) -> Result<FormalSeries> {
    if order > MAX_FACTORIAL_ORDER {
        return Err(Error::Overflow { order });
    }
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut a = 1.0_f64;
    coeffs.push(Complex64::new(a, 0.0));
    for n in 1..=order {
        a *= -(n as f64);
        coeffs.push(Complex64::new(a, 0.0));
    }
    FormalSeries::new(1, coeffs, "euler")
}

/// Formal solution vanishing at 0 of `x^2 y' + y = g(x)` with `g(0) = 0`.
///
/// Substituting `y = sum c_n x^n` gives `c_n + (n-1) c_{n-1} = g_n`, so
/// `c_0 = 0`, `c_1 = g_1` and `c_n = g_n - (n-1) c_{n-1}`.
pub fn generalized_euler_coeffs(g: &FormalSeries, order: usize) -> Result<FormalSeries> {
    if g.offset() != 0 {
        return Err(Error::OffsetMismatch {
            expected: 0,
            found: g.offset(),
        });
    }
    if g.coeffs[0] != Complex64::new(0.0, 0.0) {
        return Err(Error::Precondition(format!(
            "g(0) must vanish, got g_0 = {}",
            g.coeffs[0]
        )));
    }
    if order > g.order() {
        return Err(Error::Precondition(format!(
            "order {order} exceeds the {} known coefficients of g",
            g.coeffs.len()
        )));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
    for n in 1..=order {
        c[n] = g.coeffs[n] - c[n - 1] * (n as f64 - 1.0);
    }
    FormalSeries::new(0, c, format!("formal solution for g = {}", g.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn reals(s: &FormalSeries) -> Vec<f64> {
        s.coeffs().iter().map(|z| z.re).collect()
    }

    #[test]
    fn euler_coefficients() {
        assert_eq!(reals(&euler_formal_coeffs(3).unwrap()), vec![1.0, -1.0, 2.0, -6.0]);
        assert_eq!(reals(&euler_formal_coeffs(0).unwrap()), vec![1.0]);
        assert_eq!(euler_formal_coeffs(10).unwrap().coeffs()[10].re, 3628800.0);
        assert_eq!(euler_formal_coeffs(3).unwrap().offset(), 1);
    }

    #[test]
    fn euler_overflow_past_170() {
        assert!(euler_formal_coeffs(170).is_ok());
        assert_eq!(euler_formal_coeffs(171), Err(Error::Overflow { order: 171 }));
    }

    #[test]
    fn generalized_euler_reproduces_euler_series() {
        let g = FormalSeries::polynomial(0, &[c(0.0), c(1.0)], 12, "x").unwrap();
        let sol = generalized_euler_coeffs(&g, 12).unwrap();
        let euler = euler_formal_coeffs(11).unwrap();
        assert_eq!(sol.coeffs()[0], c(0.0));
        for n in 0..=11 {
            assert_eq!(sol.coeffs()[n + 1], euler.coeffs()[n]);
        }
    }

    #[test]
    fn generalized_euler_analytic_case() {
        let g = FormalSeries::polynomial(0, &[c(0.0), c(1.0), c(1.0)], 10, "x+x^2").unwrap();
        let sol = generalized_euler_coeffs(&g, 10).unwrap();
        let mut expected = vec![0.0; 11];
        expected[1] = 1.0;
        assert_eq!(reals(&sol), expected);
    }

    #[test]
    fn generalized_euler_cubic_forcing() {
        // c_3 = 1, c_4 = 0 - 3 c_3, c_5 = 0 - 4 c_4
        let g = FormalSeries::polynomial(0, &[c(0.0), c(0.0), c(0.0), c(1.0)], 5, "x^3").unwrap();
        let sol = generalized_euler_coeffs(&g, 5).unwrap();
        assert_eq!(reals(&sol), vec![0.0, 0.0, 0.0, 1.0, -3.0, 12.0]);
    }

    #[test]
    fn generalized_euler_rejects_nonzero_constant() {
        let g = FormalSeries::from_real(0, &[1.0, 1.0], "1+x").unwrap();
        assert!(matches!(generalized_euler_coeffs(&g, 1), Err(Error::Precondition(_))));
        let g = FormalSeries::from_real(0, &[0.0, 1.0], "x").unwrap();
        assert!(matches!(generalized_euler_coeffs(&g, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn borel_transform_examples() {
        let b = euler_formal_coeffs(30).unwrap().borel_transform().unwrap();
        for (n, z) in b.coeffs().iter().enumerate() {
            assert_eq!(*z, c(if n % 2 == 0 { 1.0 } else { -1.0 }));
        }
        assert!((b.radius_estimate() - 1.0).abs() < 1e-12);

        let zero = FormalSeries::from_real(1, &[0.0; 8], "0").unwrap();
        let bz = zero.borel_transform().unwrap();
        assert!(bz.coeffs().iter().all(|z| z.norm() == 0.0));

        let mut fact = 1.0;
        let facts: Vec<f64> = (0..15)
            .map(|n| {
                if n > 0 {
                    fact *= n as f64;
                }
                fact
            })
            .collect();
        let s = FormalSeries::from_real(1, &facts, "n!").unwrap();
        let b = s.borel_transform().unwrap();
        assert!(b.coeffs().iter().all(|z| (*z - c(1.0)).norm() < 1e-15));
    }

    #[test]
    fn borel_transform_needs_offset_one() {
        let s = FormalSeries::from_real(0, &[1.0], "1").unwrap();
        assert_eq!(
            s.borel_transform(),
            Err(Error::OffsetMismatch { expected: 1, found: 0 })
        );
    }

    #[test]
    fn radius_of_geometric_borel_image() {
        let coeffs: Vec<Complex64> = (0..40).map(|n| c((-2.0f64).powi(n))).collect();
        let b = BorelSeries::new(coeffs, 1);
        assert!((b.radius_estimate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cauchy_product_examples() {
        let ones = FormalSeries::from_real(0, &[1.0; 6], "1/(1-x)").unwrap();
        let unit = FormalSeries::from_real(0, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], "1").unwrap();
        assert_eq!(reals(&ones.cauchy_product(&unit).unwrap()), vec![1.0; 6]);

        let a = FormalSeries::polynomial(0, &[c(1.0), c(1.0)], 2, "1+x").unwrap();
        assert_eq!(reals(&a.cauchy_product(&a).unwrap()), vec![1.0, 2.0, 1.0]);

        let sq = ones.cauchy_product(&ones).unwrap();
        assert_eq!(reals(&sq), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);

        let short = FormalSeries::from_real(0, &[1.0, 1.0], "1+x").unwrap();
        assert_eq!(ones.cauchy_product(&short).unwrap().order(), 1);
    }

    #[test]
    fn cauchy_product_rejects_offset_one() {
        let a = FormalSeries::from_real(1, &[1.0], "x").unwrap();
        let b = FormalSeries::from_real(0, &[1.0], "1").unwrap();
        assert!(matches!(a.cauchy_product(&b), Err(Error::OffsetMismatch { .. })));
        assert!(matches!(b.cauchy_product(&a), Err(Error::OffsetMismatch { .. })));
    }

    #[test]
    fn derivative_examples() {
        // x - x^2 + 2x^3 stored with offset 1
        let s = FormalSeries::from_real(1, &[1.0, -1.0, 2.0], "p").unwrap();
        let d = s.derivative();
        assert_eq!(d.offset(), 0);
        assert_eq!(reals(&d), vec![1.0, -2.0, 6.0]);

        let k = FormalSeries::from_real(0, &[3.0], "3").unwrap();
        assert_eq!(reals(&k.derivative()), vec![0.0]);

        let same = FormalSeries::from_real(0, &[0.0, 1.0, -1.0, 2.0], "p").unwrap();
        assert_eq!(reals(&same.derivative()), vec![1.0, -2.0, 6.0]);
    }

    #[test]
    fn euler_derivative_matches_difference_quotient() {
        let e = euler_formal_coeffs(6).unwrap();
        let d = e.derivative();
        for n in 0..=6 {
            assert_eq!(d.coeffs()[n], e.coeffs()[n] * (n as f64 + 1.0));
        }
        // polynomial check: derivative of the degree-7 truncation at x = 0.3
        let x = c(0.3);
        let h = 1e-5;
        let fd = (e.eval_partial_sum(x + h, 7).unwrap() - e.eval_partial_sum(x - h, 7).unwrap()) / (2.0 * h);
        let exact = d.eval_partial_sum(x, 7).unwrap();
        assert!((fd - exact).norm() < 1e-7 * exact.norm().max(1.0));
    }

    #[test]
    fn partial_sums() {
        let e = euler_formal_coeffs(10).unwrap();
        let x = c(0.1);
        assert!((e.eval_partial_sum(x, 2).unwrap() - c(0.09)).norm() < 1e-16);
        assert_eq!(e.eval_partial_sum(x, 0).unwrap(), c(0.0));
        assert!((e.eval_partial_sum(x, 4).unwrap() - c(0.0914)).norm() < 1e-16);
        assert_eq!(e.eval_partial_sum(x, 12), Err(Error::OutOfRange { index: 12, max: 11 }));
        assert!(e.eval_partial_sum(x, 11).is_ok());
    }

    #[test]
    fn invariants_rejected() {
        assert!(FormalSeries::new(0, vec![], "").is_err());
        assert!(FormalSeries::new(2, vec![c(1.0)], "").is_err());
        assert!(FormalSeries::new(0, vec![Complex64::new(f64::NAN, 0.0)], "").is_err());
        assert!(FormalSeries::new(0, vec![c(f64::INFINITY)], "").is_err());
    }

    #[test]
    fn json_shape() {
        let s = FormalSeries::new(1, vec![c(1.0), Complex64::new(-1.0, 0.5)], "demo").unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"offset":1,"re":[1.0,-1.0],"im":[0.0,0.5],"label":"demo"}"#);
        let back: FormalSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"offset":0,"re":[1.0],"im":[],"label":""}"#;
        assert!(serde_json::from_str::<FormalSeries>(bad).is_err());
        let bad = r#"{"offset":3,"re":[1.0],"im":[0.0],"label":""}"#;
        assert!(serde_json::from_str::<FormalSeries>(bad).is_err());
    }

    fn small_int_series(max_len: usize) -> impl Strategy<Value = FormalSeries> {
        prop::collection::vec((-9i32..=9, -9i32..=9), 1..max_len).prop_map(|v| {
            let coeffs = v.into_iter().map(|(a, b)| Complex64::new(a as f64, b as f64)).collect();
            FormalSeries::new(0, coeffs, "p").unwrap()
        })
    }

    proptest! {
        #[test]
        fn horner_matches_monomial_sum(
            coeffs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..31),
            r in 0.0f64..1.0,
            phi in -3.0f64..3.0,
            offset in 0usize..2,
        ) {
            let coeffs: Vec<Complex64> =
                coeffs.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let s = FormalSeries::new(offset, coeffs.clone(), "p").unwrap();
            let x = Complex64::from_polar(r, phi);
            for k in 0..=coeffs.len() {
                let naive: Complex64 = coeffs[..k]
                    .iter()
                    .enumerate()
                    .map(|(n, &a)| a * x.powu((n + offset) as u32))
                    .sum();
                let scale: f64 = coeffs[..k]
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a.norm() * r.powi((n + offset) as i32))
                    .sum();
                let h = s.eval_partial_sum(x, k).unwrap();
                prop_assert!((h - naive).norm() <= 1e-13 * scale.max(f64::MIN_POSITIVE));
            }
        }

        #[test]
        fn cauchy_product_commutes_and_associates(
            a in small_int_series(12),
            b in small_int_series(12),
            c in small_int_series(12),
        ) {
            let ab = a.cauchy_product(&b).unwrap();
            let ba = b.cauchy_product(&a).unwrap();
            prop_assert_eq!(ab.coeffs(), ba.coeffs());
            let left = a.cauchy_product(&b).unwrap().cauchy_product(&c).unwrap();
            let right = a.cauchy_product(&b.cauchy_product(&c).unwrap()).unwrap();
            prop_assert_eq!(left.coeffs(), right.coeffs());
        }

        #[test]
        fn generalized_euler_residual_vanishes(
            g in prop::collection::vec(-3.0f64..3.0, 2..25),
        ) {
            let mut g = g;
            g[0] = 0.0;
            let n = g.len() - 1;
            let gs = FormalSeries::from_real(0, &g, "g").unwrap();
            let y = generalized_euler_coeffs(&gs, n).unwrap();
            let cs = y.coeffs();
            // x^2 y' + y - g at x^m for m <= N
            for m in 0..=n {
                let shifted = if m >= 1 { cs[m - 1] * (m as f64 - 1.0) } else { Complex64::new(0.0, 0.0) };
                let resid = cs[m] + shifted - gs.coeffs()[m];
                let scale = cs[m].norm().max(shifted.norm()).max(1.0);
                prop_assert!(resid.norm() <= 1e-10 * scale);
            }
        }

        #[test]
        fn euler_borel_image_has_unit_modulus(n in 0usize..=170) {
            let b = euler_formal_coeffs(n).unwrap().borel_transform().unwrap();
            prop_assert!(b.coeffs().iter().all(|z| z.norm() == 1.0));
        }
    }
}
