//! Log-domain G-transform evaluators, the symmetric matrix-variate t density,
//! a Metropolis sampler for T_{n/2}(I_p/8) and Monte-Carlo estimators.

mod estimators;
mod mcmc;

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub use estimators::{
    estimate_hellinger_sq, estimate_kl_bound, fk_unnormalized, hellinger_terms,
    kl_bound_from_log_ratios, sqrt_construction_sample, HellingerTarget, KlBoundEstimate,
};
pub use mcmc::{map_chains, sample_symmetric_t, sample_symmetric_t_spectra, Kernel, McmcConfig, TChain};

use crate::error::{Error, Result};
use crate::symmat::{trace_powers, SymmetricMatrix};

/// Projection of a real number onto (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = x - two_pi * (x / two_pi - 0.5).ceil();
    if w <= -PI {
        w + two_pi
    } else if w > PI {
        w - two_pi
    } else {
        w
    }
}

/// Complex number as (log-modulus, phase in (−π, π]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_modulus: f64,
    pub phase: f64,
}

impl LogComplex {
    pub fn new(log_modulus: f64, phase: f64) -> Self {
        Self { log_modulus, phase: wrap_phase(phase) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.log_modulus + other.log_modulus, self.phase + other.phase)
    }

    pub fn div(&self, other: &Self) -> Self {
        Self::new(self.log_modulus - other.log_modulus, self.phase - other.phase)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.log_modulus, -self.phase)
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        Self::new(0.5 * self.log_modulus, 0.5 * self.phase)
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }

    /// (re, im); may overflow for large log-moduli.
    pub fn to_cartesian(&self) -> (f64, f64) {
        let r = self.modulus();
        (r * self.phase.cos(), r * self.phase.sin())
    }
}

/// Regime parameters of the degree-K approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GApprox {
    pub n: usize,
    pub p: usize,
    pub k: usize,
}

impl GApprox {
    pub fn new(n: usize, p: usize, k: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDimension("p must be at least 1".into()));
        }
        if n + 2 < p {
            return Err(Error::Domain(format!("need n >= p - 2, got n = {}, p = {}", n, p)));
        }
        Ok(Self { n, p, k })
    }

    /// Upper limit of the n/2-weighted sum.
    pub fn upper_n(&self) -> u32 {
        (2 * self.k + 3 + usize::from(self.k % 2 == 1)) as u32
    }

    /// Upper limit of the (p+1)/2-weighted sum.
    pub fn upper_p(&self) -> u32 {
        (2 * self.k + 2 - usize::from(self.k % 2 == 1)) as u32
    }

    /// Regime classifier p^{K+3}/n^{K+1}.
    pub fn classifier(&self) -> f64 {
        (self.p as f64).powi(self.k as i32 + 3) / (self.n as f64).powi(self.k as i32 + 1)
    }
}

fn log_c_goe(p: f64) -> f64 {
    (p * (3.0 * p + 1.0) / 4.0) * LN_2 - (p * (p + 1.0) / 4.0) * PI.ln()
}

/// ψ_GOE(T): real and positive.
pub fn log_psi_goe(t: &SymmetricMatrix) -> LogComplex {
    LogComplex::new(log_c_goe(t.dim() as f64) - 4.0 * t.frobenius_sq(), 0.0)
}

/// log Γ_p(x) = (p(p−1)/4) log π + Σᵢ log Γ(x − (i−1)/2).
pub fn log_multigamma(p: usize, x: f64) -> Result<f64> {
    let pf = p as f64;
    if x <= (pf - 1.0) / 2.0 {
        return Err(Error::Domain(format!(
            "multivariate gamma argument {} must exceed {}",
            x,
            (pf - 1.0) / 2.0
        )));
    }
    let mut s = pf * (pf - 1.0) / 4.0 * PI.ln();
    for i in 0..p {
        s += ln_gamma(x - i as f64 / 2.0);
    }
    Ok(s)
}

/// log C_{n,p}, the normalization of T_{n/2}(I_p/8).
pub fn log_cnp_exact(n: usize, p: usize) -> Result<f64> {
    if n + 2 < p {
        return Err(Error::Domain(format!("need n >= p - 2, got n = {}, p = {}", n, p)));
    }
    let (nf, pf) = (n as f64, p as f64);
    Ok(pf * (nf + 2.0 * pf) / 2.0 * LN_2 - pf * (pf + 1.0) / 2.0 * PI.ln() - pf * (pf + 1.0) / 4.0 * nf.ln()
        + 2.0 * log_multigamma(p, (nf + pf + 1.0) / 4.0)?
        - log_multigamma(p, nf / 2.0)?)
}

/// log C^{(K)}_{n,p}, the degree-K expansion of log C_{n,p}.
pub fn log_cnp_asymptotic(n: usize, p: usize, k: usize) -> f64 {
    let (nf, pf) = (n as f64, p as f64);
    let mut s = log_c_goe(pf);
    for j in 1..=(k + 1) {
        let jf = j as f64;
        let even = j % 2 == 0;
        if even {
            s -= 0.5 / (jf * (jf + 1.0) * (jf + 2.0)) * pf.powi(j as i32 + 2) / nf.powi(j as i32);
        }
        let c = if even { 3.0 } else { 1.0 };
        s -= 0.25 * c / (jf * (jf + 1.0)) * pf.powi(j as i32 + 1) / nf.powi(j as i32);
    }
    s
}

/// Unwrapped (log-modulus kernel, phase) of ψ_NW without the constant.
fn psi_nw_kernel(eigs: &[f64], n: usize, p: usize) -> (f64, f64) {
    let nf = n as f64;
    let c = (nf + p as f64 + 1.0) / 4.0;
    let sn = nf.sqrt();
    let mut lm = 0.0;
    let mut ph = 0.0;
    for &l in eigs {
        lm -= c * (16.0 * l * l / nf).ln_1p();
        // 2c·atan(x) − 2√n λ with x = 4λ/√n, written to limit cancellation
        let x = 4.0 * l / sn;
        ph += 2.0 * c * (x.atan() - x) + 2.0 * (p as f64 + 1.0) * l / sn;
    }
    (lm, ph)
}

/// ψ_NW(T) from the eigenvalues of T. The phase uses the e^{+i tr TX}
/// convention so that ψ_K is its truncated expansion.
pub fn log_psi_nw_spectrum(eigs: &[f64], n: usize) -> Result<LogComplex> {
    let p = eigs.len();
    let (lm, ph) = psi_nw_kernel(eigs, n, p);
    Ok(LogComplex::new(log_cnp_exact(n, p)? + lm, ph))
}

pub fn log_psi_nw(t: &SymmetricMatrix, n: usize) -> Result<LogComplex> {
    log_psi_nw_spectrum(t.eigenvalues()?.values(), n)
}

/// Unwrapped (log-modulus kernel, phase) of ψ_K from tr T^1..tr T^{upper}.
fn psi_k_kernel(traces: &[f64], g: &GApprox) -> (f64, f64) {
    let nf = g.n as f64;
    let pf = g.p as f64;
    let a = 4.0 / nf.sqrt();
    let mut re = 0.0;
    let mut im = 0.0;
    let mut term = |k: u32, w: f64| {
        let mag = w * a.powi(k as i32) * traces[k as usize - 1] / k as f64;
        match k % 4 {
            0 => re += mag,
            1 => im += mag,
            2 => re -= mag,
            _ => im -= mag,
        }
    };
    for k in 2..=g.upper_n() {
        term(k, nf / 2.0);
    }
    for k in 1..=g.upper_p() {
        term(k, (pf + 1.0) / 2.0);
    }
    (re, im)
}

fn max_order(g: &GApprox) -> u32 {
    g.upper_n().max(g.upper_p())
}

pub fn log_psi_k_traces(traces: &[f64], g: &GApprox) -> LogComplex {
    let (re, im) = psi_k_kernel(traces, g);
    LogComplex::new(log_cnp_asymptotic(g.n, g.p, g.k) + re, im)
}

/// ψ_K(T), the degree-K approximation.
pub fn log_psi_k(t: &SymmetricMatrix, g: &GApprox) -> LogComplex {
    log_psi_k_traces(&trace_powers(t, max_order(g)), g)
}

pub fn log_psi_k_spectrum(eigs: &[f64], g: &GApprox) -> LogComplex {
    log_psi_k_traces(&spectral_traces(eigs, max_order(g)), g)
}

fn spectral_traces(eigs: &[f64], kmax: u32) -> Vec<f64> {
    let mut out = vec![0.0; kmax as usize];
    for &l in eigs {
        let mut x = 1.0;
        for t in out.iter_mut() {
            x *= l;
            *t += x;
        }
    }
    out
}

/// (Re, wrapped Im) of Log(ψ_NW/ψ_K) at a spectrum.
pub fn log_ratio_nw_over_k_spectrum(eigs: &[f64], g: &GApprox) -> Result<(f64, f64)> {
    let (lm_nw, ph_nw) = psi_nw_kernel(eigs, g.n, g.p);
    let (lm_k, ph_k) = psi_k_kernel(&spectral_traces(eigs, max_order(g)), g);
    let re = log_cnp_exact(g.n, g.p)? - log_cnp_asymptotic(g.n, g.p, g.k) + (lm_nw - lm_k);
    Ok((re, wrap_phase(ph_nw - ph_k)))
}

pub fn log_ratio_nw_over_k(t: &SymmetricMatrix, g: &GApprox) -> Result<(f64, f64)> {
    log_ratio_nw_over_k_spectrum(t.eigenvalues()?.values(), g)
}

/// Log-density of the symmetric matrix-variate t distribution T_ν(Ω).
pub fn log_density_symmetric_t(t: &SymmetricMatrix, nu: f64, omega: &SymmetricMatrix) -> Result<f64> {
    let p = t.dim();
    if omega.dim() != p {
        return Err(Error::InvalidDimension("T and Ω differ in dimension".into()));
    }
    let pf = p as f64;
    if nu < pf / 2.0 - 1.0 {
        return Err(Error::Domain(format!("need ν >= p/2 - 1, got {}", nu)));
    }
    let chol = omega
        .to_dense()
        .cholesky()
        .ok_or_else(|| Error::Domain("Ω is not positive definite".into()))?;
    let log_det_omega: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    let td = t.to_dense();
    let inner = &td * chol.solve(&td) / nu + DMatrix::<f64>::identity(p, p);
    let inner = SymmetricMatrix::from_dense_upper(&((&inner + inner.transpose()) * 0.5))?;
    let log_det_inner = inner.log_det_spd()?;
    let a = (nu + (pf + 1.0) / 2.0) / 2.0;
    Ok(pf * (nu - 1.0) * LN_2 + 2.0 * log_multigamma(p, a)? - pf * (pf + 1.0) / 2.0 * PI.ln()
        - pf * (pf + 1.0) / 4.0 * nu.ln()
        - log_multigamma(p, nu)?
        - (pf + 1.0) / 4.0 * log_det_omega
        - a * log_det_inner)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn goe_examples() {
        let z = log_psi_goe(&SymmetricMatrix::zeros(1));
        assert!((z.log_modulus - (2.0 / PI.sqrt()).ln()).abs() < 1e-14);
        let i2 = log_psi_goe(&SymmetricMatrix::identity(2));
        assert!((i2.log_modulus - (3.5 * LN_2 - 1.5 * PI.ln() - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_constant_terms() {
        let (n, p) = (1000usize, 7usize);
        let base = log_c_goe(p as f64);
        let d0 = log_cnp_asymptotic(n, p, 0) - base;
        assert!((d0 + (p * p) as f64 / (8.0 * n as f64)).abs() < 1e-15);
        let d1 = log_cnp_asymptotic(n, p, 1) - log_cnp_asymptotic(n, p, 0);
        let want = -(p as f64).powi(4) / (48.0 * (n as f64).powi(2)) - (p as f64).powi(3) / (8.0 * (n as f64).powi(2));
        assert!((d1 - want).abs() < 1e-15);
    }

    #[test]
    fn psi_zero_display() {
        let g = GApprox::new(400, 3, 0).unwrap();
        let t = SymmetricMatrix::new(3, vec![0.3, -0.2, 0.1, 0.5, 0.05, -0.4]).unwrap();
        let tr = trace_powers(&t, 3);
        let (n, p) = (400.0f64, 3.0f64);
        let re = -4.0 * tr[1] - 4.0 * (p + 1.0) / n * tr[1];
        let im = -32.0 / (3.0 * n.sqrt()) * tr[2] + 2.0 * (p + 1.0) / n.sqrt() * tr[0];
        let v = log_psi_k(&t, &g);
        assert!((v.log_modulus - log_cnp_asymptotic(400, 3, 0) - re).abs() < 1e-12);
        assert!((v.phase - wrap_phase(im)).abs() < 1e-12);
    }

    #[test]
    fn limits_per_k() {
        let g = |k| GApprox::new(100, 3, k).unwrap();
        assert_eq!((g(0).upper_n(), g(0).upper_p()), (3, 2));
        assert_eq!((g(1).upper_n(), g(1).upper_p()), (6, 3));
        assert_eq!((g(2).upper_n(), g(2).upper_p()), (7, 6));
    }
}
