//! Integer partitions, exact polynomials and rational functions in (n, m, p),
//! zonal polynomial tables and inverse-Wishart expectations.

mod parse;
mod poly;
mod ratfn;
mod zonal;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

pub use parse::{parse_fraction, PolyFraction};
pub use poly::{int, rat, Exp, RationalPoly, M, N, P};
pub use ratfn::{
    manifold_n, rational_string, rational_to_f64, FactorRecord, RationalFunction,
    RationalFunctionRecord,
};
pub use zonal::{zonal_table, ZonalTable, ZONAL_CAP};

use crate::error::{Error, Result};

pub const PARTITION_CAP: u32 = 24;

/// Weakly decreasing positive parts; the empty partition is allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct IntegerPartition(Vec<u32>);

impl IntegerPartition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn norm(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// κ + s: adds a part s.
    pub fn with_part(&self, s: u32) -> Self {
        let mut v = self.0.clone();
        let pos = v.iter().position(|&x| x < s).unwrap_or(v.len());
        v.insert(pos, s);
        Self(v)
    }

    /// κ − κᵢ: removes the part at index i.
    pub fn without_index(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(i);
        Self(v)
    }

    /// Σ κᵢ(κᵢ − i) with 1-based i.
    pub fn rho(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &k)| k as i64 * (k as i64 - (i as i64 + 1)))
            .sum()
    }

    /// Evaluates r_κ from power sums tr^1, tr^2, ... given as `ps[k-1]`.
    pub fn power_sum_value(&self, ps: &[f64]) -> f64 {
        self.0.iter().map(|&k| ps[k as usize - 1]).product()
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Debug for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// All partitions of w in reverse-lexicographic order.
pub fn enumerate_partitions(w: u32) -> Result<Vec<IntegerPartition>> {
    if w > PARTITION_CAP {
        return Err(Error::CapacityExceeded(format!(
            "partition weight {} exceeds cap {}",
            w, PARTITION_CAP
        )));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<IntegerPartition>) {
        if rem == 0 {
            out.push(IntegerPartition(cur.clone()));
            return;
        }
        for k in (1..=rem.min(max)).rev() {
            cur.push(k);
            rec(rem - k, k, cur, out);
            cur.pop();
        }
    }
    rec(w, w, &mut cur, &mut out);
    Ok(out)
}

fn factorial(k: u32) -> num::BigInt {
    (1..=k as u64).fold(num::BigInt::from(1), |a, b| a * b)
}

/// Inverse-Wishart expectations for Y ~ W_p(n, I_p/n) are valid when
/// (n+p+1)/4 > |λ| + (p−1)/2, i.e. n − p ≥ 4|λ| − 2.
pub fn inv_wishart_min_gap(weight: u32) -> i64 {
    4 * weight as i64 - 2
}

/// E[C_λ(Y⁻¹)] for Y ~ W_p(n, I_p/n), as a rational function of (n, m, p).
pub fn expected_zonal_inv_wishart(lambda: &IntegerPartition) -> RationalFunction {
    let k = lambda.norm();
    if k == 0 {
        return RationalFunction::one();
    }
    let q = lambda.len() as i64;
    let parts: Vec<i64> = lambda.parts().iter().map(|&x| x as i64).collect();
    let mut num = num::BigInt::from(2).pow(k) * factorial(k);
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            let (ii, jj) = (i as i64 + 1, j as i64 + 1);
            num *= 2 * parts[i] - 2 * parts[j] - ii + jj;
        }
    }
    let mut den = num::BigInt::from(1);
    for (i, &li) in parts.iter().enumerate() {
        let ii = i as i64 + 1;
        den *= factorial((2 * li + q - ii) as u32);
    }
    let cprime = num::BigRational::new(num, den);
    let mut poly = RationalPoly::constant(cprime).shift([k, 0, 0]);
    let mut f = RationalFunction::one();
    for (i, &li) in parts.iter().enumerate() {
        let ii = i as i64 + 1;
        for l in 0..li {
            let a = 1 - ii + 2 * l;
            poly = &poly * &RationalPoly::var_plus(P, a);
            f = f.div_linear(a, 1);
        }
    }
    f.mul_poly(&poly)
}

fn powersum_cache() -> &'static Mutex<HashMap<IntegerPartition, RationalFunction>> {
    static CACHE: OnceLock<Mutex<HashMap<IntegerPartition, RationalFunction>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// E[r_κ(Y⁻¹)] = Σ_λ c_{κ,λ} E[C_λ(Y⁻¹)].
pub fn expected_powersum_inv_wishart(kappa: &IntegerPartition) -> Result<RationalFunction> {
    if let Some(v) = powersum_cache().lock().unwrap().get(kappa) {
        return Ok(v.clone());
    }
    let w = kappa.norm();
    let table = zonal_table(w)?;
    let row = table.index_of(kappa).expect("partition of the table weight");
    let mut acc = RationalFunction::zero();
    for (j, lambda) in table.partitions().iter().enumerate() {
        let c = &table.from_powersum()[row][j];
        if num::Zero::is_zero(c) {
            continue;
        }
        acc = acc.add(&expected_zonal_inv_wishart(lambda).scale(c));
    }
    powersum_cache().lock().unwrap().insert(kappa.clone(), acc.clone());
    Ok(acc)
}
