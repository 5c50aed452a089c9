use midscale::partitions::*;
use midscale::symmat::*;
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Power sums tr Y⁻¹, tr Y⁻², ... of inverse-Wishart draws, in parallel chunks.
fn inverse_wishart_powersums(n: usize, p: usize, draws: usize, kmax: u32, seed: u64) -> Vec<Vec<f64>> {
    let chunks = 16;
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = RngSeed::new(seed, c as u64).rng();
            let len = draws / chunks;
            (0..len)
                .map(move |_| {
                    let y = sample_wishart_with(n, p, &mut rng).unwrap();
                    trace_powers(&y.inverse_spd().unwrap(), kmax)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn approx_f64(r: &RationalFunction, n: i64, p: i64) -> f64 {
    rational_to_f64(&r.eval_i64(n, p).unwrap())
}

#[test]
fn goe_entry_variances() {
    let p = 4;
    let draws = 200_000;
    let mut rng = RngSeed::new(1, 0).rng();
    let mut diag = Vec::new();
    let mut off = Vec::new();
    let mut t2 = Vec::new();
    for _ in 0..draws {
        let z = sample_goe_with(p, &mut rng).unwrap();
        diag.push(z.get(1, 1) * z.get(1, 1));
        off.push(z.get(0, 3) * z.get(0, 3));
        t2.push(trace_power(&z, 2));
    }
    let d = MCEstimate::from_samples(&diag).unwrap();
    let o = MCEstimate::from_samples(&off).unwrap();
    let t = MCEstimate::from_samples(&t2).unwrap();
    assert!((d.mean - 2.0).abs() < 4.0 * d.stderr, "{:?}", d);
    assert!((o.mean - 1.0).abs() < 4.0 * o.stderr, "{:?}", o);
    assert!((t.mean - (p * (p + 1)) as f64).abs() < 4.0 * t.stderr, "{:?}", t);
}

#[test]
fn wishart_mean_and_normalized_second_moment() {
    let (n, p) = (40, 3);
    let draws = 100_000;
    let mut rng = RngSeed::new(2, 0).rng();
    let mut sums = DMatrix::<f64>::zeros(p, p);
    let mut x2 = Vec::with_capacity(draws);
    let mut y00 = Vec::with_capacity(draws);
    for _ in 0..draws {
        let y = sample_wishart_with(n, p, &mut rng).unwrap();
        sums += y.to_dense();
        y00.push(y.get(0, 0));
        x2.push(trace_power(&normalize_wishart(&y, n), 2));
    }
    let mean = sums / draws as f64;
    let e = MCEstimate::from_samples(&y00).unwrap();
    assert!((e.mean - 1.0).abs() < 4.0 * e.stderr);
    // entry sd is at most sqrt(2/n)
    let tol = 4.0 * (2.0 / n as f64 / draws as f64).sqrt();
    assert!((mean - DMatrix::<f64>::identity(p, p)).abs().max() < tol);
    let x = MCEstimate::from_samples(&x2).unwrap();
    assert!((x.mean - (p * (p + 1)) as f64).abs() < 4.0 * x.stderr, "{:?}", x);
}

#[test]
fn inverse_trace_small_case() {
    let (n, p) = (10i64, 2i64);
    let exact = approx_f64(&expected_powersum_inv_wishart(&IntegerPartition::new(vec![1])).unwrap(), n, p);
    let v: Vec<f64> = inverse_wishart_powersums(10, 2, 400_000, 1, 3).iter().map(|t| t[0]).collect();
    let e = MCEstimate::from_samples(&v).unwrap();
    assert!((e.mean - exact).abs() < 4.0 * e.stderr, "{:?} vs {}", e, exact);
}

fn check_powersums(n: usize, p: usize, max_weight: u32, draws: usize, seed: u64) {
    let ps = inverse_wishart_powersums(n, p, draws, max_weight, seed);
    for w in 1..=max_weight {
        for kappa in enumerate_partitions(w).unwrap() {
            let exact = approx_f64(&expected_powersum_inv_wishart(&kappa).unwrap(), n as i64, p as i64);
            let v: Vec<f64> = ps.iter().map(|t| kappa.power_sum_value(t)).collect();
            let e = MCEstimate::from_samples(&v).unwrap();
            assert!((e.mean - exact).abs() < 4.0 * e.stderr, "κ = {} at ({}, {}): {:?} vs {}", kappa, n, p, e, exact);
        }
    }
}

#[test]
fn inverse_wishart_powersums_match_exact() {
    // finite variance needs n − p ≥ 8|κ| − 2
    check_powersums(30, 3, 3, 400_000, 4);
    check_powersums(100, 5, 4, 200_000, 5);
}

#[test]
fn inverse_wishart_zonals_match_exact() {
    let (n, p) = (30usize, 3usize);
    let ps = inverse_wishart_powersums(n, p, 400_000, 2, 6);
    for w in 1..=2 {
        let t = zonal_table(w).unwrap();
        for (li, lambda) in t.partitions().iter().enumerate() {
            let exact = approx_f64(&expected_zonal_inv_wishart(lambda), n as i64, p as i64);
            let row: Vec<f64> = t.to_powersum()[li].iter().map(rational_to_f64).collect();
            let v: Vec<f64> = ps
                .iter()
                .map(|tr| t.partitions().iter().zip(&row).map(|(k, c)| c * k.power_sum_value(tr)).sum())
                .collect();
            let e = MCEstimate::from_samples(&v).unwrap();
            assert!((e.mean - exact).abs() < 4.0 * e.stderr, "λ = {}: {:?} vs {}", lambda, e, exact);
        }
    }
}

#[test]
fn semicircle_for_goe() {
    let p = 400;
    let z = sample_goe(p, RngSeed::new(7, 0)).unwrap();
    let s = z.eigenvalues().unwrap().scaled(1.0 / (p as f64).sqrt());
    assert!(esd_ks_distance(&s) < 0.05);
}
