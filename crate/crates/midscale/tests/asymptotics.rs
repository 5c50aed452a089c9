//! Leading-order L² error ratios and Catalan limits evaluated exactly at large (n, p).

use midscale::partitions::{rational_to_f64, RationalFunction};
use midscale::tmoments::*;
use num::{BigInt, BigRational};

fn at(f: &RationalFunction, n: i64, p: i64) -> f64 {
    rational_to_f64(&f.eval_i64(n, p).unwrap())
}

#[test]
fn table1_ratios() {
    for k in 1..=4 {
        let exact = normalized_l2_error_sq(k).unwrap();
        let claim = claimed_l2_leading(k).unwrap();
        for &(n, p) in &[(100_000_000i64, 1000i64), (10_000_000, 10_000)] {
            let r = at(&exact, n, p) / at(&claim, n, p);
            println!("k={} (n,p)=({},{}) exact={:.6e} ratio={:.6}", k, n, p, at(&exact, n, p), r);
            assert!((0.9..=1.1).contains(&r), "k={} ratio {}", k, r);
        }
    }
    let r = at(&normalized_l2_error_sq(1).unwrap(), 100_000_000, 1000) / at(&claimed_l2_leading(1).unwrap(), 100_000_000, 1000);
    assert!((0.99..=1.01).contains(&r));
}

#[test]
fn catalan_limits() {
    let n = BigInt::from(10_000_000_000i64);
    let p = BigInt::from(10_000);
    for k in 1..=3u32 {
        let e = moment_tr_even(k).unwrap().exact_at(&n, &p).unwrap();
        let scale = BigRational::from_integer(BigInt::from(16).pow(k))
            / BigRational::from_integer(p.pow(k + 1));
        let v = rational_to_f64(&(e * scale));
        let c = catalan(k).unwrap() as f64;
        println!("k={} normalized={} C_k={}", k, v, c);
        assert!((v / c - 1.0).abs() < 0.02);
    }
}
