use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::poly_roots;
use crate::cplx::horner;
use crate::error::{Error, Result};
use crate::series::BorelSeries;

/// Pole-zero pairs closer than this are Froissart doublets.
pub const DOUBLET_DISTANCE: f64 = 1e-6;
/// Poles with smaller residues are discarded as spurious.
pub const MIN_RESIDUE: f64 = 1e-10;
/// Condition number past which the classical linear system is rejected.
pub const MAX_CONDITION: f64 = 1e13;

/// Rational approximant `P/Q` of a Borel transform.
///
/// Coefficients are stored for the scaled variable `w = zeta / scale`,
/// which keeps them of comparable size; [`numerator`](Self::numerator)
/// and [`denominator`](Self::denominator) return them in `zeta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeApproximant {
    #[serde(with = "crate::cplx::vec")]
    p: Vec<Complex64>,
    #[serde(with = "crate::cplx::vec")]
    q: Vec<Complex64>,
    scale: f64,
    /// Poles that survived the doublet and residue filters.
    #[serde(with = "crate::cplx::vec")]
    poles: Vec<Complex64>,
    #[serde(with = "crate::cplx::vec")]
    residues: Vec<Complex64>,
    /// Poles removed by the filters.
    #[serde(with = "crate::cplx::vec")]
    spurious: Vec<Complex64>,
    requested: (usize, usize),
}

impl PadeApproximant {
    /// Numerator coefficients `p_0..p_L` in the variable `zeta`.
    pub fn numerator(&self) -> Vec<Complex64> {
        unscale(&self.p, self.scale)
    }

    /// Denominator coefficients `q_0..q_M` in `zeta`, with `q_0 = 1`.
    pub fn denominator(&self) -> Vec<Complex64> {
        unscale(&self.q, self.scale)
    }

    /// Degrees `(L, M)` actually used; the robust fit may lower them.
    pub fn degrees(&self) -> (usize, usize) {
        (self.p.len() - 1, self.q.len() - 1)
    }

    /// Degrees that were asked for.
    pub fn requested_degrees(&self) -> (usize, usize) {
        self.requested
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex64] {
        &self.residues
    }

    pub fn spurious_poles(&self) -> &[Complex64] {
        &self.spurious
    }

    /// `P(zeta)/Q(zeta)`. Far from the origin the reversed polynomials are
    /// used so that neither side overflows.
    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let w = zeta / self.scale;
        if w.norm() <= 1.0 {
            return horner(&self.p, w) / horner(&self.q, w);
        }
        let v = w.inv();
        let l = self.p.len() - 1;
        let m = self.q.len() - 1;
        // v^L P(1/v) = p_L + p_(L-1) v + ... + p_0 v^L
        let rp = self.p.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * v + c);
        let rq = self.q.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * v + c);
        let ratio = rp / rq;
        if l >= m {
            ratio * w.powu((l - m) as u32)
        } else {
            ratio * v.powu((m - l) as u32)
        }
    }

    /// First `n` Taylor coefficients of `P/Q` at the origin, in `zeta`.
    pub fn taylor(&self, n: usize) -> Vec<Complex64> {
        unscale(&taylor_scaled(&self.p, &self.q, n), self.scale)
    }
}

fn unscale(c: &[Complex64], scale: f64) -> Vec<Complex64> {
    let mut f = 1.0;
    c.iter()
        .map(|&a| {
            let out = a / f;
            f *= scale;
            out
        })
        .collect()
}

fn taylor_scaled(p: &[Complex64], q: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut t: Vec<Complex64> = Vec::with_capacity(n);
    for k in 0..n {
        let mut v = p.get(k).copied().unwrap_or_default();
        for j in 1..q.len().min(k + 1) {
            v -= q[j] * t[k - j];
        }
        t.push(v / q[0]);
    }
    t
}

/// Scale `rho = (|c_0| / |c_N|)^(1/N)` that makes the end coefficients of
/// `c_n rho^n` equal in size; 1 when either end vanishes.
fn scale_for(c: &[Complex64]) -> f64 {
    let n = c.len() - 1;
    if n == 0 {
        return 1.0;
    }
    let (a, b) = (c[0].norm(), c[n].norm());
    if a == 0.0 || b == 0.0 {
        return 1.0;
    }
    let rho = (a.ln() - b.ln()) / n as f64;
    let rho = rho.exp();
    if rho.is_finite() && rho > 0.0 {
        rho
    } else {
        1.0
    }
}

fn scaled(c: &[Complex64], rho: f64) -> Vec<Complex64> {
    let mut f = 1.0;
    c.iter()
        .map(|&a| {
            let out = a * f;
            f *= rho;
            out
        })
        .collect()
}

fn check_orders(b: &BorelSeries, l: usize, m: usize) -> Result<()> {
    if l + m + 1 > b.coeffs().len() {
        return Err(Error::Precondition(format!(
            "Pade order [{l}/{m}] needs {} coefficients, only {} available",
            l + m + 1,
            b.coeffs().len()
        )));
    }
    Ok(())
}

/// Classical `[L/M]` Pade approximant: `Q` from the `M x M` Toeplitz system
/// on coefficients `L+1..L+M`, then `P` by convolution.
pub fn pade_fit(b: &BorelSeries, l: usize, m: usize) -> Result<PadeApproximant> {
    check_orders(b, l, m)?;
    let raw = &b.coeffs()[..=l + m];
    let rho = scale_for(raw);
    let c = scaled(raw, rho);
    let at = |k: isize| if k < 0 { Complex64::new(0.0, 0.0) } else { c[k as usize] };

    let mut q = vec![Complex64::new(1.0, 0.0)];
    if m > 0 {
        let a = DMatrix::from_fn(m, m, |i, j| at(l as isize + i as isize - j as isize));
        let rhs = DVector::from_fn(m, |i, _| -c[l + 1 + i]);
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::DegenerateOrder {
                numerator: l,
                denominator: m,
                condition,
            });
        }
        let sol = svd.solve(&rhs, 0.0).map_err(|_| Error::DegenerateOrder {
            numerator: l,
            denominator: m,
            condition,
        })?;
        q.extend(sol.iter().copied());
    }
    let p = (0..=l).map(|i| (0..=i.min(m)).map(|j| q[j] * c[i - j]).sum()).collect();
    Ok(finish(p, q, rho, (l, m)))
}

/// Robust `[L/M]` approximant after Gonnet, Guttel and Trefethen: the
/// degrees are lowered until the Toeplitz block has full numerical rank
/// (singular values above `tol * |c|`), which removes Froissart doublets
/// at the source. `Q` is taken from the null vector of that block.
pub fn pade_fit_robust(b: &BorelSeries, l: usize, m: usize, tol: f64) -> Result<PadeApproximant> {
    check_orders(b, l, m)?;
    let raw = &b.coeffs()[..=l + m];
    let rho = scale_for(raw);
    let c = scaled(raw, rho);
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let cmax = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if c[..=l].iter().all(|z| z.norm() <= tol * cmax) {
        return Ok(finish(vec![zero], vec![one], rho, (l, m)));
    }
    let ts = tol * norm;
    let (mut l, mut m_) = (l, m);
    let requested = (l, m);
    // rows L+1..L+M of the (L+M+1) x (M+1) lower-triangular Toeplitz matrix
    let block = |l: usize, m: usize| {
        DMatrix::from_fn(m, m + 1, |i, j| {
            let k = l + 1 + i;
            if k >= j {
                c[k - j]
            } else {
                zero
            }
        })
    };
    loop {
        if m_ == 0 {
            return Ok(finish(c[..=l].to_vec(), vec![one], rho, requested));
        }
        let sv = block(l, m_).singular_values();
        let rank = sv.iter().filter(|&&s| s > ts).count();
        if rank == m_ {
            break;
        }
        let drop = m_ - rank;
        l = l.saturating_sub(drop);
        m_ = rank;
    }
    // null vector of the M x (M+1) block via an SVD of its square padding
    let mut padded = DMatrix::<Complex64>::zeros(m_ + 1, m_ + 1);
    padded.view_mut((0, 0), (m_, m_ + 1)).copy_from(&block(l, m_));
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("SVD computed with V");
    let kmin = svd.singular_values.imin();
    let mut bq: Vec<Complex64> = v_t.row(kmin).iter().map(|z| z.conj()).collect();
    let mut ap: Vec<Complex64> = (0..=l)
        .map(|i| (0..=i.min(m_)).map(|j| bq[j] * c[i - j]).sum())
        .collect();
    // a common factor w^lam in P and Q shows up as leading zeros of Q
    let lam = bq.iter().position(|z| z.norm() > tol).unwrap_or(0);
    if lam > 0 {
        bq.drain(..lam);
        ap.drain(..lam.min(ap.len() - 1));
    }
    while bq.len() > 1 && bq[bq.len() - 1].norm() <= tol {
        bq.pop();
    }
    while ap.len() > 1 && ap[ap.len() - 1].norm() <= ts {
        ap.pop();
    }
    let b0 = bq[0];
    let p = ap.iter().map(|&a| a / b0).collect();
    let q = bq.iter().map(|&a| a / b0).collect();
    Ok(finish(p, q, rho, requested))
}

/// Largest componentwise mismatch between the Taylor coefficients of the
/// approximant and `c`, measured as `|t_n - c_n| / (|c_n| + 1e-6 max|c|)`
/// in the scaled variable.
pub(crate) fn taylor_defect(pa: &PadeApproximant, coeffs: &[Complex64]) -> f64 {
    let c = scaled(coeffs, pa.scale);
    let t = taylor_scaled(&pa.p, &pa.q, c.len());
    let cmax = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    c.iter()
        .zip(&t)
        .map(|(a, b)| (a - b).norm() / (a.norm() + 1e-6 * cmax))
        .fold(0.0, f64::max)
}

fn finish(p: Vec<Complex64>, q: Vec<Complex64>, scale: f64, requested: (usize, usize)) -> PadeApproximant {
    let dq: Vec<Complex64> = q.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect();
    let zeros: Vec<Complex64> = poly_roots(&p).into_iter().map(|z| z * scale).collect();
    let mut poles = Vec::new();
    let mut residues = Vec::new();
    let mut spurious = Vec::new();
    for w0 in poly_roots(&q) {
        let pole = w0 * scale;
        let residue = horner(&p, w0) / horner(&dq, w0) * scale;
        let paired = zeros
            .iter()
            .any(|&z| (z - pole).norm() < DOUBLET_DISTANCE * pole.norm().max(1.0));
        if paired || residue.norm() < MIN_RESIDUE || !crate::cplx::is_finite(residue) {
            spurious.push(pole);
        } else {
            poles.push(pole);
            residues.push(residue);
        }
    }
    PadeApproximant {
        p,
        q,
        scale,
        poles,
        residues,
        spurious,
        requested,
    }
}
