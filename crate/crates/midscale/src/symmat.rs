//! Dense symmetric matrices, spectra, GOE and Wishart samplers, and
//! Monte-Carlo estimate plumbing.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric matrix stored as its upper triangle, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

#[inline]
fn tri_len(p: usize) -> usize {
    p * (p + 1) / 2
}

impl SymmetricMatrix {
    pub fn new(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension("dim must be at least 1".into()));
        }
        if upper.len() != tri_len(dim) {
            return Err(Error::InvalidDimension(format!(
                "expected {} upper-triangle entries for dim {}, got {}",
                tri_len(dim),
                dim,
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { dim, upper })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dim must be at least 1");
        Self { dim, upper: vec![0.0; tri_len(dim)] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diag(&vec![1.0; dim])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.set(i, j, v);
            }
        }
        m
    }

    /// Reads the upper triangle of a square dense matrix.
    pub fn from_dense_upper(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidDimension("matrix is not square".into()));
        }
        let p = a.nrows();
        let mut upper = Vec::with_capacity(tri_len(p));
        for i in 0..p {
            for j in i..p {
                upper.push(a[(i, j)]);
            }
        }
        Self::new(p, upper)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.offset(i, j);
        self.upper[k] = v;
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.dim - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let p = self.dim;
        DMatrix::from_fn(p, p, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { dim: self.dim, upper: self.upper.iter().map(|x| a * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            upper: self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Sum of squared entries, i.e. tr M².
    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s
    }

    pub fn eigenvalues(&self) -> Result<Spectrum> {
        let eig = SymmetricEigen::try_new(self.to_dense(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
        Ok(Spectrum::from_values(eig.eigenvalues.iter().copied().collect()))
    }

    /// Inverse of a positive-definite matrix via Cholesky.
    pub fn inverse_spd(&self) -> Result<Self> {
        let c = self
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::Domain("matrix is not positive definite".into()))?;
        Self::from_dense_upper(&c.inverse())
    }

    /// log det of a positive-definite matrix via Cholesky.
    pub fn log_det_spd(&self) -> Result<f64> {
        let c = self
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::Domain("matrix is not positive definite".into()))?;
        Ok(2.0 * c.l_dirty().diagonal().iter().map(|x| x.ln()).sum::<f64>())
    }
}

/// tr(M^k) by repeated multiplication; tr(M^0) = p.
pub fn trace_power(m: &SymmetricMatrix, k: u32) -> f64 {
    match k {
        0 => m.dim() as f64,
        1 => m.trace(),
        2 => m.frobenius_sq(),
        _ => {
            let a = m.to_dense();
            let h = k / 2;
            let mut lo = a.clone();
            for _ in 1..h {
                lo = &lo * &a;
            }
            let hi = if k % 2 == 1 { &lo * &a } else { lo.clone() };
            lo.component_mul(&hi).sum()
        }
    }
}

/// All of tr(M^1), ..., tr(M^kmax) with one multiplication per power.
pub fn trace_powers(m: &SymmetricMatrix, kmax: u32) -> Vec<f64> {
    let a = m.to_dense();
    let mut out = Vec::with_capacity(kmax as usize);
    let mut pw = a.clone();
    for k in 1..=kmax {
        if k > 1 {
            pw = &pw * &a;
        }
        out.push(pw.trace());
    }
    out
}

pub fn eigenvalues(m: &SymmetricMatrix) -> Result<Spectrum> {
    m.eigenvalues()
}

/// Eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn from_values(mut v: Vec<f64>) -> Self {
        v.sort_by(|a, b| b.total_cmp(a));
        Self { eigenvalues: v }
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn power_sum(&self, k: u32) -> f64 {
        self.eigenvalues.iter().map(|x| x.powi(k as i32)).sum()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_values(self.eigenvalues.iter().map(|x| a * x).collect())
    }
}

/// Semicircle CDF on [-2, 2].
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI)
            + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// Kolmogorov-Smirnov distance between the empirical spectral distribution
/// and the semicircle law. The empirical CDF is right-continuous and both
/// one-sided suprema are taken, so a single atom at 0 is at distance 1/2.
pub fn esd_ks_distance(spec: &Spectrum) -> f64 {
    ks_distance(spec.values(), semicircle_cdf)
}

pub fn ks_distance(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut xs = values.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Generator produced by [`RngSeed::rng`].
pub type SeededRng = ChaCha8Rng;

/// Seed plus stream index; identical pairs reproduce identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn rng(&self) -> SeededRng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.stream);
        r
    }
}

pub fn sample_goe(p: usize, seed: RngSeed) -> Result<SymmetricMatrix> {
    sample_goe_with(p, &mut seed.rng())
}

/// GOE(p): independent N(0,2) diagonal and N(0,1) off-diagonal entries.
pub fn sample_goe_with<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<SymmetricMatrix> {
    if p == 0 {
        return Err(Error::InvalidDimension("p must be at least 1".into()));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut upper = Vec::with_capacity(tri_len(p));
    for i in 0..p {
        for j in i..p {
            let z: f64 = StandardNormal.sample(rng);
            upper.push(if i == j { sqrt2 * z } else { z });
        }
    }
    Ok(SymmetricMatrix { dim: p, upper })
}

pub fn sample_wishart(n: usize, p: usize, seed: RngSeed) -> Result<SymmetricMatrix> {
    sample_wishart_with(n, p, &mut seed.rng())
}

/// W_p(n, I_p/n) by the Bartlett decomposition Y = UᵗU.
pub fn sample_wishart_with<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    rng: &mut R,
) -> Result<SymmetricMatrix> {
    if p == 0 {
        return Err(Error::InvalidDimension("p must be at least 1".into()));
    }
    if n < p {
        return Err(Error::InsufficientDof { n, p });
    }
    let nf = n as f64;
    let sd = 1.0 / nf.sqrt();
    let mut u = DMatrix::<f64>::zeros(p, p);
    for k in 0..p {
        let shape = (n - k) as f64 / 2.0;
        let g = Gamma::new(shape, 2.0 / nf).map_err(|e| Error::Numerical(e.to_string()))?;
        u[(k, k)] = g.sample(rng).sqrt();
        for l in (k + 1)..p {
            let z: f64 = StandardNormal.sample(rng);
            u[(k, l)] = sd * z;
        }
    }
    let y = u.transpose() * &u;
    SymmetricMatrix::from_dense_upper(&y)
}

/// X = √n (Y − I).
pub fn normalize_wishart(y: &SymmetricMatrix, n: usize) -> SymmetricMatrix {
    y.sub(&SymmetricMatrix::identity(y.dim())).scale((n as f64).sqrt())
}

/// Monte-Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl MCEstimate {
    /// Independent draws: stderr = sd / √n.
    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::Domain("need at least two samples".into()));
        }
        let (mean, var) = mean_var(xs);
        Ok(Self { mean, stderr: (var / xs.len() as f64).sqrt(), n_samples: xs.len() })
    }

    /// Correlated draws from Markov chains: the stderr is the standard error
    /// of the mean across `batches` (each batch treated as one draw of its
    /// mean). `n_samples` is the total number of draws.
    pub fn from_batches(batches: &[Vec<f64>]) -> Result<Self> {
        let means: Vec<f64> = batches
            .iter()
            .filter(|b| !b.is_empty())
            .map(|b| b.iter().sum::<f64>() / b.len() as f64)
            .collect();
        let total: usize = batches.iter().map(|b| b.len()).sum();
        if means.len() < 2 {
            return Err(Error::Domain("need at least two non-empty batches".into()));
        }
        let sum: f64 = batches.iter().flatten().sum();
        let (_, var) = mean_var(&means);
        Ok(Self { mean: sum / total as f64, stderr: (var / means.len() as f64).sqrt(), n_samples: total })
    }
}

pub(crate) fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Splits `xs` into `k` contiguous batches of nearly equal size.
pub fn split_batches(xs: &[f64], k: usize) -> Vec<Vec<f64>> {
    let k = k.max(1).min(xs.len().max(1));
    let base = xs.len() / k;
    let extra = xs.len() % k;
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for b in 0..k {
        let len = base + usize::from(b < extra);
        out.push(xs[start..start + len].to_vec());
        start += len;
    }
    out
}
