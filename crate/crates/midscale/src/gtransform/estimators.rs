use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mcmc::{map_chains, McmcConfig};
use super::{log_psi_goe, log_psi_k, log_ratio_nw_over_k_spectrum, GApprox};
use crate::error::{Error, Result};
use crate::symmat::{
    sample_goe_with, sample_wishart_with, split_batches, trace_powers, MCEstimate, RngSeed,
    SymmetricMatrix,
};

const BATCHES_PER_CHAIN: usize = 10;
const CHUNK: usize = 1 << 16;

/// Which approximation ψ_NW is compared with; `PsiGoe` compares ψ_K with
/// ψ_GOE under exact GOE(p)/4 draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HellingerTarget {
    PsiK,
    PsiGoe,
}

/// |1 − exp(½ L)|² for L = Log(ψ_target/ψ_sampling) = re + i·im.
pub fn hellinger_terms(re: f64, im: f64) -> f64 {
    let a = 0.5 * re;
    let b = 0.5 * im;
    1.0 - 2.0 * a.exp() * b.cos() + (2.0 * a).exp()
}

fn per_chain(n_samples: usize, cfg: &McmcConfig) -> usize {
    n_samples.div_ceil(cfg.n_chains)
}

fn nw_log_ratios(g: &GApprox, n_samples: usize, cfg: &McmcConfig) -> Result<Vec<Vec<(f64, f64)>>> {
    let g = *g;
    map_chains(g.n, g.p, cfg, per_chain(n_samples, cfg), move |c| {
        log_ratio_nw_over_k_spectrum(&c.spectrum()?, &g)
    })
}

fn chain_batches(chains: &[Vec<f64>]) -> Vec<Vec<f64>> {
    chains.iter().flat_map(|c| split_batches(c, BATCHES_PER_CHAIN)).collect()
}

/// Parallel iid draws in fixed chunks with one derived stream per chunk;
/// the result is independent of the worker count.
fn iid_chunks<T, F>(n_samples: usize, seed: RngSeed, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<T> + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK).max(1);
    (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let len = if c + 1 == n_chunks { n_samples - c * CHUNK } else { CHUNK };
            let mut rng = seed.with_stream(seed.stream ^ ((c as u64) << 32)).rng();
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect()
}

/// Monte-Carlo estimate of H²(ψ_NW, ψ_K) (or H²(ψ_GOE, ψ_K)).
pub fn estimate_hellinger_sq(
    g: &GApprox,
    target: HellingerTarget,
    n_samples: usize,
    cfg: &McmcConfig,
) -> Result<MCEstimate> {
    match target {
        HellingerTarget::PsiK => {
            let chains = nw_log_ratios(g, n_samples, cfg)?;
            let vals: Vec<Vec<f64>> = chains
                .iter()
                .map(|c| c.iter().map(|&(re, im)| hellinger_terms(-re, -im)).collect())
                .collect();
            MCEstimate::from_batches(&chain_batches(&vals))
        }
        HellingerTarget::PsiGoe => {
            let g = *g;
            let chunks = iid_chunks(n_samples, cfg.seed, |rng| {
                let t = sample_goe_with(g.p, rng)?.scale(0.25);
                let k = log_psi_k(&t, &g);
                let goe = log_psi_goe(&t);
                Ok(hellinger_terms(k.log_modulus - goe.log_modulus, k.phase))
            })?;
            let all: Vec<f64> = chunks.into_iter().flatten().collect();
            MCEstimate::from_samples(&all)
        }
    }
}

/// Estimate of the G-transform Kullback-Leibler bound and its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlBoundEstimate {
    pub bound: MCEstimate,
    /// ∫|ψ_K| = E[exp(−Re Log ψ_NW/ψ_K)].
    pub l1_norm: MCEstimate,
    pub mean_re: MCEstimate,
    pub mean_abs_im: MCEstimate,
}

fn kl_value(l1: f64, re: f64, abs_im: f64) -> f64 {
    (l1 - 1.0) + re + 2.0 * l1.max(0.0).sqrt() * abs_im.max(0.0).sqrt()
}

/// Bound from batches of (Re, wrapped Im) of Log ψ_NW/ψ_K drawn under
/// |ψ_NW|; stderr of the bound by jackknife over batches.
pub fn kl_bound_from_log_ratios(batches: &[Vec<(f64, f64)>]) -> Result<KlBoundEstimate> {
    let batches: Vec<&Vec<(f64, f64)>> = batches.iter().filter(|b| !b.is_empty()).collect();
    let nb = batches.len();
    if nb < 2 {
        return Err(Error::Domain("need at least two non-empty batches".into()));
    }
    let sums: Vec<[f64; 4]> = batches
        .iter()
        .map(|b| {
            let mut s = [0.0; 4];
            for &(re, im) in b.iter() {
                s[0] += (-re).exp();
                s[1] += re;
                s[2] += im.abs();
                s[3] += 1.0;
            }
            s
        })
        .collect();
    let mut total = [0.0; 4];
    for s in &sums {
        for i in 0..4 {
            total[i] += s[i];
        }
    }
    let value = |t: &[f64; 4]| kl_value(t[0] / t[3], t[1] / t[3], t[2] / t[3]);
    let full = value(&total);
    let loo: Vec<f64> = sums
        .iter()
        .map(|s| {
            let mut t = total;
            for i in 0..4 {
                t[i] -= s[i];
            }
            value(&t)
        })
        .collect();
    let mean_loo = loo.iter().sum::<f64>() / nb as f64;
    let jk_var = (nb as f64 - 1.0) / nb as f64 * loo.iter().map(|x| (x - mean_loo).powi(2)).sum::<f64>();
    let n_samples = total[3] as usize;
    let part = |f: &dyn Fn(&(f64, f64)) -> f64| -> Result<MCEstimate> {
        let vals: Vec<Vec<f64>> = batches.iter().map(|b| b.iter().map(f).collect()).collect();
        MCEstimate::from_batches(&vals)
    };
    Ok(KlBoundEstimate {
        bound: MCEstimate { mean: full, stderr: jk_var.sqrt(), n_samples },
        l1_norm: part(&|&(re, _)| (-re).exp())?,
        mean_re: part(&|&(re, _)| re)?,
        mean_abs_im: part(&|&(_, im)| im.abs())?,
    })
}

/// Monte-Carlo estimate of the right-hand side of the G-transform
/// Kullback-Leibler inequality for (ψ_NW, ψ_K), sampling T ~ |ψ_NW|.
pub fn estimate_kl_bound(g: &GApprox, n_samples: usize, cfg: &McmcConfig) -> Result<KlBoundEstimate> {
    let chains = nw_log_ratios(g, n_samples, cfg)?;
    let batches: Vec<Vec<(f64, f64)>> = chains
        .iter()
        .flat_map(|c| {
            let k = BATCHES_PER_CHAIN.min(c.len().max(1));
            let len = c.len().div_ceil(k).max(1);
            c.chunks(len).map(|b| b.to_vec()).collect::<Vec<_>>()
        })
        .collect();
    kl_bound_from_log_ratios(&batches)
}

/// Exponent of the f_K integrand at X for one GOE draw Z, as (re, im).
fn fk_exponent(x: &SymmetricMatrix, z: &SymmetricMatrix, g: &GApprox) -> (f64, f64) {
    let nf = g.n as f64;
    let pf = g.p as f64;
    let mut txz = 0.0;
    let p = x.dim();
    for i in 0..p {
        for j in i..p {
            let w = if i == j { 1.0 } else { 2.0 };
            txz += w * x.get(i, j) * z.get(i, j);
        }
    }
    let mut re = 0.0;
    let mut im = txz / 8f64.sqrt();
    let traces = trace_powers(z, g.upper_n().max(g.upper_p()));
    let a = (2.0 / nf).sqrt();
    let mut add = |k: u32, w: f64| {
        let mag = w * a.powi(k as i32) * traces[k as usize - 1] / k as f64;
        match k % 4 {
            0 => re += mag,
            1 => im += mag,
            2 => re -= mag,
            _ => im -= mag,
        }
    };
    for k in 3..=g.upper_n() {
        add(k, nf / 4.0);
    }
    for k in 1..=g.upper_p() {
        add(k, (pf + 1.0) / 4.0);
    }
    (re, im)
}

/// Monte-Carlo estimate of the unnormalized density f_K(X): the squared
/// modulus of the mean of exp(exponent) over `n_z` GOE(p) draws, with a
/// delta-method stderr.
pub fn fk_unnormalized(x: &SymmetricMatrix, g: &GApprox, n_z: usize, seed: RngSeed) -> Result<MCEstimate> {
    let p = x.dim();
    if p != g.p {
        return Err(Error::InvalidDimension(format!("X has dimension {}, expected {}", p, g.p)));
    }
    if p > 4 {
        return Err(Error::Domain(format!("f_K estimation supports p <= 4, got {}", p)));
    }
    if g.n + 3 < 3 * p {
        return Err(Error::Domain(format!("need n >= 3p - 3, got n = {}, p = {}", g.n, p)));
    }
    if n_z < 2 {
        return Err(Error::Domain("need at least two draws".into()));
    }
    let g = *g;
    let chunks = iid_chunks(n_z, seed, |rng| {
        let z = sample_goe_with(p, rng)?;
        let (re, im) = fk_exponent(x, &z, &g);
        let r = re.exp();
        Ok((r * im.cos(), r * im.sin()))
    })?;
    let mut s = [0.0f64; 5];
    for (c, d) in chunks.iter().flatten() {
        s[0] += c;
        s[1] += d;
        s[2] += c * c;
        s[3] += d * d;
        s[4] += c * d;
    }
    let nf = n_z as f64;
    let (u, v) = (s[0] / nf, s[1] / nf);
    let vcc = (s[2] - nf * u * u) / (nf - 1.0);
    let vdd = (s[3] - nf * v * v) / (nf - 1.0);
    let vcd = (s[4] - nf * u * v) / (nf - 1.0);
    let var = 4.0 * (u * u * vcc + v * v * vdd + 2.0 * u * v * vcd) / nf;
    Ok(MCEstimate { mean: u * u + v * v, stderr: var.max(0.0).sqrt(), n_samples: n_z })
}

/// One draw of S^{1/4} Z S^{1/4} with Z ~ GOE(p) and S ~ W_p(ν, I_p/ν)
/// independent.
pub fn sqrt_construction_sample<R: Rng + ?Sized>(nu: usize, p: usize, rng: &mut R) -> Result<SymmetricMatrix> {
    let s = sample_wishart_with(nu, p, rng)?;
    let z = sample_goe_with(p, rng)?;
    let eig = nalgebra::SymmetricEigen::new(s.to_dense());
    let root = eig.eigenvalues.map(|l| l.max(0.0).powf(0.25));
    let q = &eig.eigenvectors;
    let r = q * nalgebra::DMatrix::from_diagonal(&root) * q.transpose();
    let x = &r * z.to_dense() * &r;
    SymmetricMatrix::from_dense_upper(&((&x + x.transpose()) * 0.5))
}
