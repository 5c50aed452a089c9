use nalgebra::DMatrix;
use rand::{Rng, RngExt};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmat::{sample_goe_with, RngSeed, SymmetricMatrix};

/// Transition kernel of the sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Random walk on the upper triangle with GOE-shaped increments; one
    /// step is one proposal.
    Matrix,
    /// Single-site random walk on the eigenvalues under their joint density;
    /// one step is a sweep of p proposals. Full matrices are obtained by a
    /// Haar rotation.
    Spectral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub n_chains: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_scale: f64,
    pub seed: RngSeed,
    pub kernel: Kernel,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            n_chains: 4,
            burn_in: 2000,
            thin: 5,
            step_scale: 1.0,
            seed: RngSeed::new(0x5EED_2017, 0),
            kernel: Kernel::Matrix,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_chains == 0 {
            return Err(Error::Domain("n_chains must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::Domain("thin must be at least 1".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(Error::Domain("step_scale must be positive".into()));
        }
        Ok(())
    }
}

const TARGET_ACCEPT: f64 = 0.3;
const ADAPT_WINDOW: usize = 50;
const MIN_ACCEPT: f64 = 0.05;
const MAX_ACCEPT: f64 = 0.8;

/// One Markov chain with stationary law T_{n/2}(I_p/8).
pub struct TChain {
    n: usize,
    p: usize,
    kernel: Kernel,
    rng: ChaCha8Rng,
    log_step: f64,
    matrix: SymmetricMatrix,
    matrix_logp: f64,
    eigs: Vec<f64>,
    proposed: u64,
    accepted: u64,
}

impl TChain {
    pub fn new(n: usize, p: usize, kernel: Kernel, step_scale: f64, seed: RngSeed) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidDimension("p must be at least 1".into()));
        }
        if n + 2 < p {
            return Err(Error::Domain(format!("need n >= p - 2, got n = {}, p = {}", n, p)));
        }
        let mut rng = seed.rng();
        let start = sample_goe_with(p, &mut rng)?.scale(0.25);
        let (step, matrix_logp, eigs) = match kernel {
            Kernel::Matrix => {
                let d = (p * (p + 1) / 2) as f64;
                (0.6 / d.sqrt(), log_target_matrix(&start, n)?, Vec::new())
            }
            Kernel::Spectral => {
                (0.5 / (p as f64).sqrt(), 0.0, start.eigenvalues()?.values().to_vec())
            }
        };
        Ok(Self {
            n,
            p,
            kernel,
            rng,
            log_step: (step * step_scale).ln(),
            matrix: start,
            matrix_logp,
            eigs,
            proposed: 0,
            accepted: 0,
        })
    }

    pub fn step_size(&self) -> f64 {
        self.log_step.exp()
    }

    /// Acceptance rate since the last reset.
    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn reset_stats(&mut self) {
        self.proposed = 0;
        self.accepted = 0;
    }

    /// One kernel step.
    pub fn advance(&mut self) -> Result<()> {
        match self.kernel {
            Kernel::Matrix => self.advance_matrix(),
            Kernel::Spectral => {
                self.sweep_spectral();
                Ok(())
            }
        }
    }

    fn advance_matrix(&mut self) -> Result<()> {
        let z = sample_goe_with(self.p, &mut self.rng)?;
        let prop = self.matrix.add(&z.scale(self.step_size()));
        let lp = log_target_matrix(&prop, self.n)?;
        self.proposed += 1;
        let u: f64 = self.rng.random();
        if u.ln() < lp - self.matrix_logp {
            self.matrix = prop;
            self.matrix_logp = lp;
            self.accepted += 1;
        }
        Ok(())
    }

    fn sweep_spectral(&mut self) {
        let c = (self.n + self.p + 1) as f64 / 4.0;
        let nf = self.n as f64;
        let step = self.step_size();
        for i in 0..self.p {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            let old = self.eigs[i];
            let new = old + step * z;
            let mut delta = -c * ((16.0 * new * new / nf).ln_1p() - (16.0 * old * old / nf).ln_1p());
            for (j, &l) in self.eigs.iter().enumerate() {
                if j != i {
                    delta += ((new - l).abs() / (old - l).abs()).ln();
                }
            }
            self.proposed += 1;
            let u: f64 = self.rng.random();
            if u.ln() < delta {
                self.eigs[i] = new;
                self.accepted += 1;
            }
        }
    }

    /// Adapts the log step size toward the target acceptance over `steps`
    /// steps, then checks the acceptance of the fixed kernel on a further
    /// window.
    pub fn burn_in(&mut self, steps: usize) -> Result<()> {
        let mut done = 0;
        let mut window = 0usize;
        while done < steps {
            let len = ADAPT_WINDOW.min(steps - done);
            self.reset_stats();
            for _ in 0..len {
                self.advance()?;
            }
            done += len;
            window += 1;
            let rate = self.acceptance();
            let gain = 2.0 / (window as f64).sqrt().max(1.0);
            self.log_step += gain * (rate - TARGET_ACCEPT);
        }
        self.reset_stats();
        for _ in 0..ADAPT_WINDOW {
            self.advance()?;
        }
        let rate = self.acceptance();
        if !(MIN_ACCEPT..=MAX_ACCEPT).contains(&rate) {
            return Err(Error::Mcmc(format!(
                "acceptance {:.3} outside [{}, {}] after burn-in (step {:.3e}, n = {}, p = {})",
                rate,
                MIN_ACCEPT,
                MAX_ACCEPT,
                self.step_size(),
                self.n,
                self.p
            )));
        }
        self.reset_stats();
        Ok(())
    }

    /// Eigenvalues of the current state (unsorted for the spectral kernel).
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        match self.kernel {
            Kernel::Matrix => Ok(self.matrix.eigenvalues()?.values().to_vec()),
            Kernel::Spectral => Ok(self.eigs.clone()),
        }
    }

    /// Current state as a matrix; the spectral kernel draws a Haar rotation.
    pub fn matrix(&mut self) -> Result<SymmetricMatrix> {
        match self.kernel {
            Kernel::Matrix => Ok(self.matrix.clone()),
            Kernel::Spectral => {
                let q = haar_orthogonal(self.p, &mut self.rng);
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigs.clone()));
                let t = &q * d * q.transpose();
                SymmetricMatrix::from_dense_upper(&((&t + t.transpose()) * 0.5))
            }
        }
    }
}

/// log|ψ_NW| up to a constant: −((n+p+1)/4) log|I + 16T²/n|.
fn log_target_matrix(t: &SymmetricMatrix, n: usize) -> Result<f64> {
    let p = t.dim();
    let d = t.to_dense();
    let a = DMatrix::<f64>::identity(p, p) + (&d * &d) * (16.0 / n as f64);
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Numerical("I + 16T²/n not positive definite".into()))?;
    let logdet: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    Ok(-((n + p + 1) as f64) / 4.0 * logdet)
}

/// Haar-distributed orthogonal matrix from the QR decomposition of a
/// Gaussian matrix with the signs of diag(R) fixed.
pub(crate) fn haar_orthogonal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            for i in 0..p {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

fn chain_seed(cfg: &McmcConfig, c: usize) -> RngSeed {
    cfg.seed.with_stream(cfg.seed.stream.wrapping_add(c as u64))
}

/// Runs `cfg.n_chains` chains in parallel, keeping `per_chain` states from
/// each, and maps every kept state through `f`. Output is in chain order.
pub fn map_chains<T, F>(n: usize, p: usize, cfg: &McmcConfig, per_chain: usize, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(&mut TChain) -> Result<T> + Sync,
{
    cfg.validate()?;
    (0..cfg.n_chains)
        .into_par_iter()
        .map(|c| {
            let mut chain = TChain::new(n, p, cfg.kernel, cfg.step_scale, chain_seed(cfg, c))?;
            chain.burn_in(cfg.burn_in)?;
            let mut out = Vec::with_capacity(per_chain);
            for _ in 0..per_chain {
                for _ in 0..cfg.thin {
                    chain.advance()?;
                }
                out.push(f(&mut chain)?);
            }
            let rate = chain.acceptance();
            if per_chain > 0 && !(MIN_ACCEPT..=MAX_ACCEPT).contains(&rate) {
                return Err(Error::Mcmc(format!("sampling acceptance {:.3} in chain {}", rate, c)));
            }
            Ok(out)
        })
        .collect()
}

/// Kept states of every chain, as matrices.
pub fn sample_symmetric_t(n: usize, p: usize, cfg: &McmcConfig, per_chain: usize) -> Result<Vec<Vec<SymmetricMatrix>>> {
    map_chains(n, p, cfg, per_chain, |c| c.matrix())
}

/// Kept states of every chain, as eigenvalue lists.
pub fn sample_symmetric_t_spectra(n: usize, p: usize, cfg: &McmcConfig, per_chain: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    map_chains(n, p, cfg, per_chain, |c| c.spectrum())
}
