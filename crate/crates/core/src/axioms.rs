//! Borel summation of numeric series and a harness that checks the
//! properties one expects from a good resummation method:
//!
//! 1. a convergent series sums to its usual sum;
//! 2. linearity, `sum(a + C b) = S + C S'`;
//! 3. absolute summability (reported as a classification);
//! 4. the Cauchy product of absolutely summable series sums to `S S'`;
//! 5. dropping the first term, `sum(a_1 + a_2 + ...) = S - a_0`;
//! 6. the termwise derivative of a summable power series sums to `f'(x)`.
//!
//! The numeric sum of `sum a_n` is `int_0^inf B(z) e^(-z) dz` with
//! `B(z) = sum a_n z^n / n!` continued along the positive axis by Pade. This
//! is the Borel sum of `sum a_n x^(n+1)` at `x = 1`, so the engine in
//! [`crate::borel`] does the work.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borel::{borel_sum, borel_sum_power_series};
use crate::cplx::is_finite;
use crate::error::{Error, Result};
use crate::oracle::{euler_exact, EulerMethod, Ray};
use crate::series::FormalSeries;

/// A finite stretch `a_0..a_N` of a numeric series `sum a_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSeries {
    #[serde(with = "crate::cplx::vec")]
    terms: Vec<Complex64>,
    label: String,
}

impl NumericSeries {
    pub fn new(terms: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSeries("a numeric series needs at least one term".into()));
        }
        if let Some(n) = terms.iter().position(|&t| !is_finite(t)) {
            return Err(Error::InvalidSeries(format!("term a_{n} is not finite")));
        }
        Ok(NumericSeries {
            terms,
            label: label.into(),
        })
    }

    pub fn from_real(terms: &[f64], label: impl Into<String>) -> Result<Self> {
        Self::new(terms.iter().map(|&t| Complex64::new(t, 0.0)).collect(), label)
    }

    /// `a_n = r^n`, n = 0..=order.
    pub fn geometric(r: Complex64, order: usize) -> Self {
        let terms = (0..=order).map(|n| r.powu(n as u32)).collect();
        NumericSeries {
            terms,
            label: format!("geometric({r})"),
        }
    }

    /// `a_n = (-1)^n n! x^(n+1)`: the Euler series evaluated at `x`.
    pub fn euler_at(x: f64, order: usize) -> Result<Self> {
        let mut t = x;
        let mut terms = vec![Complex64::new(t, 0.0)];
        for n in 1..=order {
            t *= -(n as f64) * x;
            terms.push(Complex64::new(t, 0.0));
        }
        Self::new(terms, format!("euler({x})"))
    }

    pub fn terms(&self) -> &[Complex64] {
        &self.terms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Index of the last stored term.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `a + c b`, truncated to the shorter of the two.
    pub fn add_scaled(&self, c: Complex64, other: &NumericSeries) -> NumericSeries {
        let terms = self.terms.iter().zip(&other.terms).map(|(&a, &b)| a + c * b).collect();
        NumericSeries {
            terms,
            label: format!("{} + ({c})*{}", self.label, other.label),
        }
    }

    /// `c_k = sum_{i<=k} a_i b_(k-i)`.
    pub fn cauchy_product(&self, other: &NumericSeries) -> NumericSeries {
        let n = self.order().min(other.order());
        let terms = (0..=n)
            .map(|k| (0..=k).map(|i| self.terms[i] * other.terms[k - i]).sum())
            .collect();
        NumericSeries {
            terms,
            label: format!("({})*({})", self.label, other.label),
        }
    }

    /// The series `a_1 + a_2 + ...` (`None` if only `a_0` is stored).
    pub fn tail(&self) -> Option<NumericSeries> {
        (self.terms.len() > 1).then(|| NumericSeries {
            terms: self.terms[1..].to_vec(),
            label: format!("tail({})", self.label),
        })
    }

    /// `sum |a_n|`.
    pub fn abs(&self) -> NumericSeries {
        NumericSeries {
            terms: self.terms.iter().map(|t| Complex64::new(t.norm(), 0.0)).collect(),
            label: format!("|{}|", self.label),
        }
    }

    fn to_formal(&self, order: usize) -> Result<FormalSeries> {
        FormalSeries::new(1, self.terms[..=order].to_vec(), self.label.clone())
    }
}

/// Numeric Borel sum `int_0^inf B(z) e^(-z) dz` using `a_0..a_order`.
///
/// A singularity of the continued transform on the positive axis means the
/// series is not Borel-summable along it; that case is reported as
/// [`Error::NotSummable`].
pub fn borel_sum_numeric(a: &NumericSeries, order: usize, tol: f64) -> Result<Complex64> {
    if order > a.order() {
        return Err(Error::OutOfRange {
            index: order,
            max: a.order(),
        });
    }
    let s = a.to_formal(order)?;
    match borel_sum(&s, Complex64::new(1.0, 0.0), Ray::new(0.0), order, tol) {
        Ok(r) => Ok(r.value),
        Err(Error::PoleOnRay { point, .. }) => Err(Error::NotSummable(format!(
            "{}: Borel transform is singular at {point}",
            a.label
        ))),
        Err(Error::StokesDirection { exceptional, .. }) => Err(Error::NotSummable(format!(
            "{}: the positive axis is next to the exceptional direction {exceptional}",
            a.label
        ))),
        Err(e) => Err(e),
    }
}

/// Settings of [`run_axiom_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomConfig {
    /// Random instances per property, on top of the fixed ones.
    pub instances: usize,
    /// Number of terms used (`a_0..a_order`).
    pub order: usize,
    /// Quadrature tolerance of every sum.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig {
            instances: 4,
            order: 60,
            tol: 1e-12,
            seed: 20_240_601,
        }
    }
}

/// Deviation allowed for the identities (2), (4), (5) and (6).
pub const IDENTITY_TOL: f64 = 1e-8;
/// Deviation allowed between a convergent series and its Borel sum.
pub const CONVERGENT_TOL: f64 = 1e-9;
/// Step of the five-point central difference used for property (6).
pub const DERIVATIVE_STEP: f64 = 1e-3;

/// Geometric ratios on which the Pade continuation of `e^(r z)` is accurate
/// enough at the default order.
const GEOMETRIC_RATIOS: [f64; 10] = [-0.9, -0.7, -0.5, -0.3, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5];
const RANDOM_RATIO_RANGE: (f64, f64) = (-0.9, 0.5);
/// Geometric partners of the Euler series in the linearity check. An
/// exponentially growing entire part (`r > 0`) next to a pole leaves Pade
/// artifacts on the positive axis that are stable under refitting and are
/// then indistinguishable from a genuine singularity.
const LINEARITY_RATIO_RANGE: (f64, f64) = (-0.9, 0.0);
/// Points at which the Euler series enters the linearity check. With the
/// pole at `-1/x` close to the origin, the entire part of the mixture is
/// resolved by too few effective coefficients (deviations near 1e-7 at x = 1).
const LINEARITY_X_RANGE: (f64, f64) = (0.05, 0.3);
/// Ratios whose absolute series `sum |r|^n` is still accurately summable.
const ABSOLUTE_RATIOS: [f64; 6] = [-0.5, -0.3, -0.1, 0.1, 0.3, 0.5];

/// One instance of property (3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
    pub absolutely_summable: bool,
    pub expected: bool,
}

/// Outcome of one property over its instance set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub id: u8,
    pub name: String,
    pub instances: usize,
    /// Largest deviation over the instances (`inf` if an instance failed).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Property (2) only: the deviation with a 100x looser quadrature
    /// tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub looser_tol_deviation: Option<f64>,
    /// Property (3) only.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub classifications: Vec<Classification>,
    /// Instance-level errors, recorded rather than raised.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<String>,
}

/// A closed-form sum that the numeric sum must reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorRecord {
    pub label: String,
    #[serde(with = "crate::cplx")]
    pub expected: Complex64,
    #[serde(with = "crate::cplx::option")]
    pub computed: Option<Complex64>,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub config: AxiomConfig,
    pub properties: Vec<PropertyRecord>,
    pub anchors: Vec<AnchorRecord>,
    pub all_pass: bool,
}

/// Evaluate properties (1)-(6) and the anchor sums.
pub fn run_axiom_suite(cfg: &AxiomConfig) -> Result<AxiomReport> {
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::Configuration(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    if cfg.order < 4 || cfg.order > crate::series::MAX_FACTORIAL_ORDER {
        return Err(Error::Configuration(format!(
            "order must lie in 4..=170, got {}",
            cfg.order
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let properties = vec![
        convergent_consistency(cfg, &mut rng),
        linearity(cfg, &mut rng),
        absolute_summability(cfg),
        cauchy_product(cfg, &mut rng),
        tail_shift(cfg, &mut rng),
        derivative(cfg, &mut rng),
    ];
    let anchors = anchors(cfg);
    let all_pass = properties.iter().all(|p| p.pass) && anchors.iter().all(|a| a.pass);
    Ok(AxiomReport {
        config: *cfg,
        properties,
        anchors,
        all_pass,
    })
}

fn random_ratio(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(RANDOM_RATIO_RANGE.0..RANDOM_RATIO_RANGE.1)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

fn euler_value(x: f64) -> Result<Complex64> {
    Ok(euler_exact(Complex64::new(x, 0.0), EulerMethod::Laplace, 1e-14)?.value)
}

/// Fold per-instance deviations into a record.
fn record(id: u8, name: &str, tolerance: f64, outcomes: Vec<(String, Result<f64>)>) -> PropertyRecord {
    let mut max_deviation = 0.0f64;
    let mut errors = Vec::new();
    for (label, r) in &outcomes {
        match r {
            Ok(d) if d.is_finite() => max_deviation = max_deviation.max(*d),
            Ok(d) => {
                max_deviation = f64::INFINITY;
                errors.push(format!("{label}: deviation {d}"));
            }
            Err(e) => {
                max_deviation = f64::INFINITY;
                errors.push(format!("{label}: {e}"));
            }
        }
    }
    PropertyRecord {
        id,
        name: name.into(),
        instances: outcomes.len(),
        max_deviation,
        tolerance,
        pass: max_deviation <= tolerance,
        looser_tol_deviation: None,
        classifications: Vec::new(),
        errors,
    }
}

fn convergent_consistency(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> PropertyRecord {
    let mut ratios = GEOMETRIC_RATIOS.to_vec();
    ratios.extend((0..cfg.instances).map(|_| random_ratio(rng)));
    let outcomes = ratios
        .par_iter()
        .map(|&r| {
            let a = NumericSeries::geometric(Complex64::new(r, 0.0), cfg.order);
            let dev = borel_sum_numeric(&a, cfg.order, cfg.tol).map(|s| (s - 1.0 / (1.0 - r)).norm());
            (a.label, dev)
        })
        .collect();
    record(1, "convergent series sum to their usual sum", CONVERGENT_TOL, outcomes)
}

fn linearity(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> PropertyRecord {
    let n = cfg.order;
    let mut cases = vec![(0.1, -0.5, Complex64::new(2.0, 1.0))];
    cases.extend((0..cfg.instances).map(|_| {
        (
            rng.random_range(LINEARITY_X_RANGE.0..LINEARITY_X_RANGE.1),
            rng.random_range(LINEARITY_RATIO_RANGE.0..LINEARITY_RATIO_RANGE.1),
            random_complex(rng),
        )
    }));
    let deviation = |tol: f64| -> Vec<(String, Result<f64>)> {
        cases
            .par_iter()
            .map(|&(x, r, c)| {
                let dev = (|| {
                    let a = NumericSeries::euler_at(x, n)?;
                    let b = NumericSeries::geometric(Complex64::new(r, 0.0), n);
                    let lhs = borel_sum_numeric(&a.add_scaled(c, &b), n, tol)?;
                    let rhs = borel_sum_numeric(&a, n, tol)? + c * borel_sum_numeric(&b, n, tol)?;
                    Ok((lhs - rhs).norm())
                })();
                (format!("euler({x}) + ({c})*geometric({r})"), dev)
            })
            .collect()
    };
    let mut rec = record(2, "linearity", IDENTITY_TOL, deviation(cfg.tol));
    let looser = record(2, "", IDENTITY_TOL, deviation(cfg.tol * 100.0));
    rec.looser_tol_deviation = Some(looser.max_deviation);
    rec.pass &= looser.pass;
    rec.errors.extend(looser.errors);
    rec
}

/// Property (3): is `sum |a_n|` Borel-summable along the positive axis?
/// Convergent geometric series are; the Euler series, whose absolute
/// transform has a pole at `z = 1/x`, is not.
fn absolute_summability(cfg: &AxiomConfig) -> PropertyRecord {
    let n = cfg.order;
    let mut cases: Vec<(NumericSeries, bool)> = ABSOLUTE_RATIOS
        .iter()
        .map(|&r| (NumericSeries::geometric(Complex64::new(r, 0.0), n), true))
        .collect();
    for x in [0.1, 0.5, 1.0] {
        if let Ok(a) = NumericSeries::euler_at(x, n) {
            cases.push((a, false));
        }
    }
    let classifications: Vec<std::result::Result<Classification, String>> = cases
        .par_iter()
        .map(|(a, expected)| {
            match borel_sum_numeric(&a.abs(), n, cfg.tol) {
                Ok(_) => Ok(true),
                Err(Error::NotSummable(_)) => Ok(false),
                Err(e) => Err(format!("{}: {e}", a.label)),
            }
            .map(|absolutely_summable| Classification {
                label: a.label.clone(),
                absolutely_summable,
                expected: *expected,
            })
        })
        .collect();
    let mut errors = Vec::new();
    let mut ok = Vec::new();
    for c in classifications {
        match c {
            Ok(c) => ok.push(c),
            Err(e) => errors.push(e),
        }
    }
    let wrong = ok.iter().filter(|c| c.absolutely_summable != c.expected).count();
    PropertyRecord {
        id: 3,
        name: "absolute summability (classification)".into(),
        instances: cases.len(),
        max_deviation: if errors.is_empty() { wrong as f64 } else { f64::INFINITY },
        tolerance: 0.0,
        pass: wrong == 0 && errors.is_empty(),
        looser_tol_deviation: None,
        classifications: ok,
        errors,
    }
}

fn cauchy_product(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> PropertyRecord {
    let n = cfg.order;
    let mut pairs = vec![(-0.5, 0.3), (0.2, -0.7), (-0.9, -0.3), (0.4, 0.1)];
    pairs.extend((0..cfg.instances).map(|_| {
        // keep the product transform within the accurate range
        (rng.random_range(-0.9..0.25), rng.random_range(-0.9..0.25))
    }));
    let outcomes = pairs
        .par_iter()
        .map(|&(r, s)| {
            let a = NumericSeries::geometric(Complex64::new(r, 0.0), n);
            let b = NumericSeries::geometric(Complex64::new(s, 0.0), n);
            let dev = (|| {
                let prod = borel_sum_numeric(&a.cauchy_product(&b), n, cfg.tol)?;
                Ok((prod - borel_sum_numeric(&a, n, cfg.tol)? * borel_sum_numeric(&b, n, cfg.tol)?).norm())
            })();
            (format!("geometric({r})*geometric({s})"), dev)
        })
        .collect();
    record(
        4,
        "Cauchy product of absolutely summable series",
        IDENTITY_TOL,
        outcomes,
    )
}

fn tail_shift(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> PropertyRecord {
    let n = cfg.order;
    let mut xs = vec![1.0, 0.1];
    xs.extend((0..cfg.instances).map(|_| rng.random_range(0.05..1.0)));
    let mut cases: Vec<Result<NumericSeries>> = xs.iter().map(|&x| NumericSeries::euler_at(x, n)).collect();
    cases.push(Ok(NumericSeries::geometric(Complex64::new(-0.5, 0.0), n)));
    cases.push(Ok(NumericSeries::from_real(
        &(0..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>(),
        "alternating",
    )
    .expect("finite terms")));
    let outcomes = cases
        .into_par_iter()
        .map(|a| {
            let a = a?;
            let tail = a.tail().expect("order >= 4");
            let s = borel_sum_numeric(&a, n, cfg.tol)?;
            let t = borel_sum_numeric(&tail, n - 1, cfg.tol)?;
            Ok((a.label.clone(), (t - (s - a.terms[0])).norm()))
        })
        .map(|r: Result<(String, f64)>| match r {
            Ok((label, d)) => (label, Ok(d)),
            Err(e) => ("instance".to_string(), Err(e)),
        })
        .collect();
    record(5, "removing the first term", IDENTITY_TOL, outcomes)
}

/// Sum of a power series at real `x`, along the ray through `x`.
fn sum_at(s: &FormalSeries, x: f64, order: usize, tol: f64) -> Result<Complex64> {
    let ray = Ray::new(if x < 0.0 { std::f64::consts::PI } else { 0.0 });
    let x = Complex64::new(x, 0.0);
    let r = match s.offset() {
        0 => borel_sum_power_series(s, x, ray, order, tol)?,
        _ => borel_sum(s, x, ray, order, tol)?,
    };
    Ok(r.value)
}

/// `(f(x-2h) - 8 f(x-h) + 8 f(x+h) - f(x+2h)) / 12h`.
fn five_point(f: impl Fn(f64) -> Result<Complex64>, x: f64, h: f64) -> Result<Complex64> {
    Ok((f(x - 2.0 * h)? - 8.0 * f(x - h)? + 8.0 * f(x + h)? - f(x + 2.0 * h)?) / (12.0 * h))
}

fn derivative(cfg: &AxiomConfig, rng: &mut ChaCha8Rng) -> PropertyRecord {
    let n = cfg.order;
    let euler = crate::series::euler_formal_coeffs(n);
    let geometric = FormalSeries::from_real(0, &vec![1.0; n + 1], "geometric");
    let mut cases: Vec<(Result<FormalSeries>, f64)> = [0.1, 0.2, 0.3].iter().map(|&x| (euler.clone(), x)).collect();
    cases.extend((0..cfg.instances).map(|_| (euler.clone(), rng.random_range(0.08..0.4))));
    cases.push((geometric.clone(), 0.2));
    cases.push((geometric, -0.3));
    let outcomes = cases
        .par_iter()
        .map(|(s, x)| {
            let dev = (|| {
                let s = s.clone()?;
                let termwise = sum_at(&s.derivative(), *x, n - 1, cfg.tol)?;
                let fd = five_point(|t| sum_at(&s, t, n, cfg.tol), *x, DERIVATIVE_STEP)?;
                Ok((termwise - fd).norm())
            })();
            let label = s.as_ref().map(|s| s.label().to_string()).unwrap_or_default();
            (format!("d/dx {label} at {x}"), dev)
        })
        .collect();
    record(6, "termwise derivative", IDENTITY_TOL, outcomes)
}

fn anchors(cfg: &AxiomConfig) -> Vec<AnchorRecord> {
    let n = cfg.order;
    let alternating: Vec<f64> = (0..=n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let cases = [
        (
            NumericSeries::from_real(&alternating, "sum (-1)^n").expect("finite terms"),
            Ok(Complex64::new(0.5, 0.0)),
        ),
        (
            NumericSeries::geometric(Complex64::new(0.5, 0.0), n).with_label("sum (1/2)^n"),
            Ok(Complex64::new(2.0, 0.0)),
        ),
        (
            NumericSeries::euler_at(1.0, n)
                .expect("n <= 170")
                .with_label("sum (-1)^n n!"),
            euler_value(1.0),
        ),
    ];
    cases
        .into_iter()
        .map(|(a, expected)| {
            let computed = borel_sum_numeric(&a, n, cfg.tol).ok();
            let expected = expected.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            let deviation = computed.map_or(f64::INFINITY, |c| (c - expected).norm());
            AnchorRecord {
                label: a.label,
                expected,
                computed,
                deviation,
                tolerance: CONVERGENT_TOL,
                pass: deviation <= CONVERGENT_TOL,
            }
        })
        .collect()
}
