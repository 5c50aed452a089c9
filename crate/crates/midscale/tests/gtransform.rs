use std::f64::consts::{LN_2, PI};

use midscale::gtransform::*;
use midscale::symmat::*;
use midscale::tmoments::{moment_tr_even, moment_tr_squared};
use midscale::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, Continuous, StudentsT};

fn random_t(p: usize, scale: f64, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
    sample_goe_with(p, rng).unwrap().scale(scale)
}

fn integrate_line(f: impl Fn(f64) -> f64, tol: f64) -> f64 {
    // t = u / (1 − u²) maps (−1, 1) onto the real line
    let g = |u: f64| {
        let d = 1.0 - u * u;
        if d <= 0.0 {
            return 0.0;
        }
        f(u / d) * (1.0 + u * u) / (d * d)
    };
    quadrature::integrate(g, -1.0, 1.0, tol).integral
}

#[test]
fn p1_modulus_integrates_to_one() {
    for n in [4usize, 10, 50, 1000] {
        let f = |t: f64| log_psi_nw(&SymmetricMatrix::from_diag(&[t]), n).unwrap().log_modulus.exp();
        let total = integrate_line(f, 1e-12);
        assert!((total - 1.0).abs() < 1e-8, "n = {}: {}", n, total);
    }
}

#[test]
fn p1_modulus_is_scaled_student_t() {
    for n in [6usize, 40, 500] {
        let t = StudentsT::new(0.0, 1.0, n as f64 / 2.0).unwrap();
        let s8 = 8f64.sqrt();
        for i in 0..=60 {
            let x = -3.0 + 0.1 * i as f64;
            let ours = log_psi_nw(&SymmetricMatrix::from_diag(&[x]), n).unwrap().log_modulus;
            let want = (s8 * t.pdf(s8 * x)).ln();
            assert!((ours - want).abs() < 1e-10, "n = {}, t = {}: {} vs {}", n, x, ours, want);
        }
    }
}

#[test]
fn p2_modulus_tensor_quadrature() {
    let n = 50;
    let h = 0.02;
    let l = 2.4;
    let m = (l / h) as i64;
    let mut total = 0.0;
    for a in -m..=m {
        for c in -m..=m {
            for b in -m..=m {
                let (x, y, z) = (a as f64 * h, b as f64 * h, c as f64 * h);
                let tr = x + z;
                let disc = ((x - z) * (x - z) / 4.0 + y * y).sqrt();
                let eig = [tr / 2.0 + disc, tr / 2.0 - disc];
                total += log_psi_nw_spectrum(&eig, n).unwrap().log_modulus.exp();
            }
        }
    }
    total *= h * h * h;
    assert!((total - 1.0).abs() < 2e-3, "{}", total);
}

#[test]
fn symmetric_t_density_matches_modulus() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in 1..=4 {
        for (i, n) in [p + 10, 30, 200].into_iter().enumerate() {
            for j in 0..34 {
                let t = random_t(p, 0.1 + 0.3 * (j + i) as f64 / 10.0, &mut rng);
                let a = log_density_symmetric_t(&t, n as f64 / 2.0, &SymmetricMatrix::identity(p).scale(0.125)).unwrap();
                let b = log_psi_nw(&t, n).unwrap().log_modulus;
                assert!((a - b).abs() < 1e-10, "p = {}, n = {}: {} vs {}", p, n, a, b);
            }
        }
    }
}

#[test]
fn symmetric_t_normal_limit() {
    let nu = 1e6;
    for i in 0..=40 {
        let x = -2.0 + 0.1 * i as f64;
        let a = log_density_symmetric_t(&SymmetricMatrix::from_diag(&[x]), nu, &SymmetricMatrix::identity(1)).unwrap();
        let want = -x * x / 2.0 - 0.5 * (2.0 * PI).ln();
        assert!((a - want).abs() < 1e-4, "{} {}", a, want);
    }
}

#[test]
fn symmetric_t_rejects_bad_scale() {
    let om = SymmetricMatrix::from_diag(&[1.0, -1.0]);
    assert!(matches!(
        log_density_symmetric_t(&SymmetricMatrix::zeros(2), 10.0, &om),
        Err(Error::Domain(_))
    ));
    let at_zero = log_density_symmetric_t(&SymmetricMatrix::zeros(3), 7.0, &SymmetricMatrix::identity(3)).unwrap();
    let p = 3.0;
    let nu = 7.0;
    let a = (nu + 2.0) / 2.0;
    let want = p * (nu - 1.0) * LN_2 + 2.0 * log_multigamma(3, a).unwrap()
        - 6.0 * PI.ln()
        - 3.0 * nu.ln()
        - log_multigamma(3, nu).unwrap();
    assert!((at_zero - want).abs() < 1e-12);
}

#[test]
fn normalization_constants() {
    assert!(log_cnp_exact(4, 1).unwrap().abs() < 1e-14);
    // the expansion omits the −3p/(8n) term
    let d = log_cnp_exact(100, 3).unwrap() - log_cnp_asymptotic(100, 3, 2);
    assert!((d.exp() - 0.98906).abs() < 1e-5, "{}", d.exp());
    for (n, p) in [(1000usize, 3usize), (100_000, 10)] {
        let d = log_cnp_exact(n, p).unwrap() - log_cnp_asymptotic(n, p, 2);
        assert!((d + 3.0 * p as f64 / (8.0 * n as f64)).abs() < 0.01 * p as f64 / n as f64, "{}", d);
    }
    let errs: Vec<f64> = (0..4)
        .map(|k| (log_cnp_exact(10_000, 10).unwrap() - log_cnp_asymptotic(10_000, 10, k)).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{:?}", errs);
    let goe = 2f64.ln() - 0.5 * PI.ln();
    assert!((log_cnp_exact(10_000_000, 1).unwrap() - goe).abs() < 1e-6);
    assert!(matches!(log_cnp_exact(1, 4), Err(Error::Domain(_))));
}

#[test]
fn zero_matrix_values() {
    let z = SymmetricMatrix::zeros(3);
    let nw = log_psi_nw(&z, 40).unwrap();
    assert_eq!(nw.phase, 0.0);
    assert!((nw.log_modulus - log_cnp_exact(40, 3).unwrap()).abs() < 1e-14);
    let g = GApprox::new(40, 3, 1).unwrap();
    let (re, im) = log_ratio_nw_over_k(&z, &g).unwrap();
    assert!((re - (log_cnp_exact(40, 3).unwrap() - log_cnp_asymptotic(40, 3, 1))).abs() < 1e-14);
    assert_eq!(im, 0.0);
}

#[test]
fn psi_k_goe_limit_shape() {
    // as n grows, log ψ_0 − log ψ_GOE → 0 pointwise
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let t = random_t(3, 0.3, &mut rng);
    let g = GApprox::new(1_000_000_000, 3, 0).unwrap();
    let k = log_psi_k(&t, &g);
    let goe = log_psi_goe(&t);
    assert!((k.log_modulus - goe.log_modulus).abs() < 1e-6);
    assert!(k.phase.abs() < 1e-3);
}

#[test]
fn psi_one_display() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let t = random_t(4, 0.2, &mut rng);
    let (n, p) = (500.0f64, 4.0f64);
    let tr = trace_powers(&t, 6);
    let re = -p * p / (8.0 * n) - 4.0 * tr[1] + 32.0 / n * tr[3] - 1024.0 / (3.0 * n * n) * tr[5]
        - 4.0 * (p + 1.0) / n * tr[1];
    let im = -32.0 / (3.0 * n.sqrt()) * tr[2] + 512.0 / (5.0 * n.powf(1.5)) * tr[4] + 2.0 * (p + 1.0) / n.sqrt() * tr[0]
        - 32.0 * (p + 1.0) / (3.0 * n.powf(1.5)) * tr[2];
    let v = log_psi_k(&t, &GApprox::new(500, 4, 1).unwrap());
    // the display keeps only the leading constant −p²/(8n)
    let base = (p * (3.0 * p + 1.0) / 4.0) * LN_2 - (p * (p + 1.0) / 4.0) * PI.ln();
    let dropped = log_cnp_asymptotic(500, 4, 1) - log_cnp_asymptotic(500, 4, 0);
    assert!((v.log_modulus - dropped - base - re).abs() < 1e-12);
    assert!((v.phase - wrap_phase(im)).abs() < 1e-12);
}

#[test]
fn domination_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (n, p) = (200, 5);
    let c = log_cnp_exact(n, p).unwrap();
    for k in 0..3 {
        let g = GApprox::new(n, p, k).unwrap();
        let ck = log_cnp_asymptotic(n, p, k);
        for i in 0..1000 {
            let t = random_t(p, 0.05 + 3.0 * (i as f64 / 1000.0), &mut rng);
            let lhs = log_psi_k(&t, &g).log_modulus + c;
            let rhs = ck + log_psi_nw(&t, n).unwrap().log_modulus;
            assert!(lhs <= rhs + 1e-9 * rhs.abs().max(1.0), "K = {}: {} > {}", k, lhs, rhs);
        }
    }
}

#[test]
fn ratio_phase_is_wrapped() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = GApprox::new(60, 4, 2).unwrap();
    for i in 0..10_000 {
        let t = random_t(4, 0.5 + 10.0 * (i % 100) as f64 / 100.0, &mut rng);
        let (re, im) = log_ratio_nw_over_k(&t, &g).unwrap();
        assert!(re.is_finite());
        assert!(im > -PI && im <= PI);
    }
}

#[test]
fn spectrum_and_matrix_evaluators_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = GApprox::new(90, 5, 1).unwrap();
    for _ in 0..50 {
        let t = random_t(5, 0.4, &mut rng);
        let e = t.eigenvalues().unwrap();
        let a = log_psi_k(&t, &g);
        let b = log_psi_k_spectrum(e.values(), &g);
        assert!((a.log_modulus - b.log_modulus).abs() < 1e-9);
        assert!(wrap_phase(a.phase - b.phase).abs() < 1e-9);
    }
}

fn mcmc_moment_check(n: usize, p: usize, kernel: Kernel, thin: usize) {
    let cfg = McmcConfig { n_chains: 8, burn_in: 4000, thin, kernel, ..Default::default() };
    let chains = map_chains(n, p, &cfg, 12_500, |c| {
        let s = c.spectrum()?;
        Ok((s.iter().sum::<f64>(), s.iter().map(|x| x * x).sum::<f64>()))
    })
    .unwrap();
    let col = |f: &dyn Fn(&(f64, f64)) -> f64| {
        let v: Vec<Vec<f64>> = chains.iter().flat_map(|c| split_batches(&c.iter().map(f).collect::<Vec<_>>(), 10)).collect();
        MCEstimate::from_batches(&v).unwrap()
    };
    let tr = col(&|x| x.0);
    let t2 = col(&|x| x.1);
    let sq = col(&|x| x.1 * x.1);
    assert!(t2.n_samples >= 100_000);
    let e2 = moment_tr_even(1).unwrap().decimal(n as i64, p as i64).unwrap();
    let s2 = moment_tr_squared(2).unwrap().decimal(n as i64, p as i64).unwrap();
    assert!(tr.mean.abs() < 4.0 * tr.stderr, "{:?} tr T {:?}", kernel, tr);
    assert!((t2.mean - e2).abs() < 4.0 * t2.stderr, "{:?} tr T² {:?} vs {}", kernel, t2, e2);
    assert!((sq.mean - s2).abs() < 4.0 * sq.stderr, "{:?} tr²T² {:?} vs {}", kernel, sq, s2);
}

#[test]
fn mcmc_moments_matrix_kernel() {
    mcmc_moment_check(100, 5, Kernel::Matrix, 5);
}

#[test]
fn mcmc_moments_spectral_kernel() {
    mcmc_moment_check(100, 5, Kernel::Spectral, 5);
    mcmc_moment_check(400, 10, Kernel::Spectral, 5);
}

#[test]
fn mcmc_matrices_are_symmetric_t_draws() {
    let cfg = McmcConfig { n_chains: 2, burn_in: 500, kernel: Kernel::Spectral, ..Default::default() };
    let s = sample_symmetric_t(60, 4, &cfg, 10).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.iter().all(|c| c.len() == 10 && c.iter().all(|t| t.dim() == 4)));
}

#[test]
fn ratio_modulus_small_in_classical_regime() {
    let g = GApprox::new(100_000, 4, 0).unwrap();
    let cfg = McmcConfig { n_chains: 4, burn_in: 1000, kernel: Kernel::Spectral, ..Default::default() };
    let chains = map_chains(g.n, g.p, &cfg, 2500, |c| log_ratio_nw_over_k_spectrum(&c.spectrum()?, &g)).unwrap();
    let m: f64 = chains.iter().flatten().map(|x| x.0.abs()).sum::<f64>() / 10_000.0;
    assert!(m < 0.05, "{}", m);
}

fn spectral(n_chains: usize, stream: u64) -> McmcConfig {
    McmcConfig {
        n_chains,
        burn_in: 2000,
        kernel: Kernel::Spectral,
        seed: RngSeed::new(0x5EED_2017, stream),
        ..Default::default()
    }
}

#[test]
fn hellinger_classical_regime() {
    let g = GApprox::new(100_000, 4, 0).unwrap();
    let h = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 100_000, &spectral(8, 0)).unwrap();
    assert!(h.mean <= 0.01, "{:?}", h);
    let goe = estimate_hellinger_sq(&g, HellingerTarget::PsiGoe, 100_000, &spectral(8, 0)).unwrap();
    assert!(goe.mean <= 0.01, "{:?}", goe);
}

#[test]
fn hellinger_degree_ordering() {
    let cfg = spectral(8, 0);
    let h0 = estimate_hellinger_sq(&GApprox::new(3000, 30, 0).unwrap(), HellingerTarget::PsiK, 40_000, &cfg).unwrap();
    let h1 = estimate_hellinger_sq(&GApprox::new(3000, 30, 1).unwrap(), HellingerTarget::PsiK, 40_000, &cfg).unwrap();
    let se = (h0.stderr.powi(2) + h1.stderr.powi(2)).sqrt();
    assert!(h0.mean - h1.mean >= 3.0 * se, "{:?} {:?}", h0, h1);
}

#[test]
fn hellinger_stable_under_chain_doubling() {
    let g = GApprox::new(2000, 6, 0).unwrap();
    let a = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 40_000, &spectral(4, 0)).unwrap();
    let b = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 80_000, &spectral(8, 100)).unwrap();
    let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
    assert!((a.mean - b.mean).abs() <= 2.0 * se, "{:?} {:?}", a, b);
}

#[test]
fn kl_bound_dominates_hellinger() {
    let g = GApprox::new(100_000, 4, 0).unwrap();
    let cfg = spectral(8, 0);
    let kl = estimate_kl_bound(&g, 100_000, &cfg).unwrap();
    let h = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 100_000, &cfg).unwrap();
    let se = (kl.bound.stderr.powi(2) + h.stderr.powi(2)).sqrt();
    assert!(kl.bound.mean >= h.mean - 3.0 * se, "{:?} {:?}", kl, h);
    assert!((0.9..=1.1).contains(&kl.l1_norm.mean));
}

#[test]
fn kl_bound_vanishes_for_identical_arguments() {
    let cfg = spectral(4, 0);
    let chains = map_chains(80, 3, &cfg, 500, |c| {
        let s = c.spectrum()?;
        let a = log_psi_nw_spectrum(&s, 80)?;
        let b = log_psi_nw_spectrum(&s, 80)?;
        Ok((a.log_modulus - b.log_modulus, wrap_phase(a.phase - b.phase)))
    })
    .unwrap();
    let kl = kl_bound_from_log_ratios(&chains).unwrap();
    assert!(kl.bound.mean.abs() <= kl.bound.stderr.max(1e-15));
}

#[test]
fn fk_degree_zero_matches_gaussian_ratio() {
    let g = GApprox::new(10_000, 1, 0).unwrap();
    let seed = RngSeed::new(77, 0);
    let f0 = fk_unnormalized(&SymmetricMatrix::from_diag(&[0.0]), &g, 200_000, seed).unwrap();
    let fx = fk_unnormalized(&SymmetricMatrix::from_diag(&[0.5]), &g, 200_000, seed).unwrap();
    let r = fx.mean / f0.mean;
    assert!((r / (-0.0625f64).exp() - 1.0).abs() < 0.05, "{}", r);
}

#[test]
fn fk_orientation_is_reflected_wishart() {
    // the displayed integrand approximates the density of −X; compare the
    // asymmetry with the exact normalized chi-square density
    let n = 10_000usize;
    let g = GApprox::new(n, 1, 0).unwrap();
    let seed = RngSeed::new(78, 0);
    let fp = fk_unnormalized(&SymmetricMatrix::from_diag(&[0.5]), &g, 400_000, seed).unwrap();
    let fm = fk_unnormalized(&SymmetricMatrix::from_diag(&[-0.5]), &g, 400_000, seed).unwrap();
    let chi = ChiSquared::new(n as f64).unwrap();
    let dens = |x: f64| chi.pdf(n as f64 + x * (n as f64).sqrt());
    let exact = dens(-0.5) / dens(0.5);
    assert!((fp.mean / fm.mean / exact - 1.0).abs() < 2e-3, "{} vs {}", fp.mean / fm.mean, exact);
}

#[test]
fn fk_stderr_scaling() {
    let g = GApprox::new(1000, 2, 1).unwrap();
    let x = SymmetricMatrix::new(2, vec![0.3, 0.1, -0.2]).unwrap();
    let a = fk_unnormalized(&x, &g, 50_000, RngSeed::new(9, 0)).unwrap();
    let b = fk_unnormalized(&x, &g, 200_000, RngSeed::new(9, 0)).unwrap();
    let ratio = a.stderr / b.stderr;
    assert!((ratio / 2.0 - 1.0).abs() < 0.2, "{}", ratio);
}

#[test]
fn estimators_are_deterministic() {
    let g = GApprox::new(500, 3, 0).unwrap();
    let cfg = spectral(3, 0);
    let a = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 3000, &cfg).unwrap();
    let b = estimate_hellinger_sq(&g, HellingerTarget::PsiK, 3000, &cfg).unwrap();
    assert_eq!(a, b);
    let x = SymmetricMatrix::from_diag(&[0.2, 0.1]);
    let g2 = GApprox::new(100, 2, 0).unwrap();
    let s = RngSeed::new(1, 0);
    assert_eq!(
        fk_unnormalized(&x, &g2, 70_000, s).unwrap(),
        fk_unnormalized(&x, &g2, 70_000, s).unwrap()
    );
}

#[test]
fn sqrt_construction_runs() {
    let mut rng = RngSeed::new(5, 0).rng();
    let x = sqrt_construction_sample(20, 3, &mut rng).unwrap();
    assert_eq!(x.dim(), 3);
    assert!(x.upper().iter().all(|v| v.is_finite()));
}
