//! Symbolic differentiation engine for the moments of T ~ T_{n/2}(I_p/8).
//!
//! A term (b, κ, s) stands for b(n,m,p)·e^{−(n/4)tr L}|L|^{m/4}·r_κ(L⁻¹)·L^{−s}.
//! Repeated application of the diagonal operator D_L followed by a trace
//! yields polynomial weights b_κ, and the moments follow by replacing each
//! r_κ(L⁻¹) with its inverse-Wishart expectation.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num::{BigInt, BigRational, One};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partitions::{
    expected_powersum_inv_wishart, int, rat, rational_string, rational_to_f64, IntegerPartition,
    RationalFunction, RationalFunctionRecord, RationalPoly,
};

pub const MOMENT_CAP: u32 = 5;

/// Sparse sum of terms keyed by (κ, s).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermSum {
    terms: BTreeMap<(IntegerPartition, u32), RationalPoly>,
}

impl TermSum {
    pub fn new() -> Self {
        Self::default()
    }

    /// The single term (1, ∅, 0).
    pub fn unit() -> Self {
        let mut t = Self::new();
        t.add(IntegerPartition::empty(), 0, &RationalPoly::one());
        t
    }

    pub fn add(&mut self, kappa: IntegerPartition, s: u32, b: &RationalPoly) {
        if b.is_zero() {
            return;
        }
        let key = (kappa, s);
        let e = self.terms.entry(key.clone()).or_default();
        e.add_assign_ref(b);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, kappa: IntegerPartition, s: u32, b: &RationalPoly, c: &BigRational) {
        self.add(kappa, s, &b.scale(c));
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(IntegerPartition, u32), &RationalPoly)> {
        self.terms.iter()
    }

    pub fn get(&self, kappa: &IntegerPartition, s: u32) -> Option<&RationalPoly> {
        self.terms.get(&(kappa.clone(), s))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::new();
        for ((k, s), b) in &self.terms {
            out.add(k.clone(), *s, &b.scale(c));
        }
        out
    }

    pub fn merge(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((k, s), b) in &other.terms {
            out.add(k.clone(), *s, b);
        }
        out
    }
}

/// One application of D_L.
pub fn apply_dl(ts: &TermSum) -> TermSum {
    let mn4 = RationalPoly::n().scale(&rat(-1, 4));
    let m4 = RationalPoly::m().scale(&rat(1, 4));
    let half = rat(-1, 2);
    let mut out = TermSum::new();
    for ((kappa, s), b) in ts.terms() {
        let s = *s;
        // exponential factor
        out.add(kappa.clone(), s, &(b * &mn4));
        // determinant factor: (m/4)|L|^{m/4} L⁻¹
        out.add(kappa.clone(), s + 1, &(b * &m4));
        // power-sum factor: D tr L^{-k} = −k L^{-(k+1)}
        for (i, &k) in kappa.parts().iter().enumerate() {
            out.add_scaled(kappa.without_index(i), s + k + 1, b, &int(-(k as i64)));
        }
        // matrix factor L^{-s}
        if s > 0 {
            out.add_scaled(kappa.clone(), s + 1, b, &rat(-(s as i64), 2));
            for t in 1..=s {
                out.add_scaled(kappa.with_part(s + 1 - t), t, b, &half);
            }
        }
    }
    out
}

/// Trace: L^{−s} with s > 0 becomes the factor tr L^{−s}; s = 0 gives p.
pub fn trace_terms(ts: &TermSum) -> TermSum {
    let p = RationalPoly::p();
    let mut out = TermSum::new();
    for ((kappa, s), b) in ts.terms() {
        if *s > 0 {
            out.add(kappa.with_part(*s), 0, b);
        } else {
            out.add(kappa.clone(), 0, &(b * &p));
        }
    }
    out
}

pub fn apply_dl_times(ts: &TermSum, l: u32) -> TermSum {
    let mut cur = ts.clone();
    for _ in 0..l {
        cur = apply_dl(&cur);
    }
    cur
}

/// Checks |κ| + s ≤ l and deg b ≤ l − q(κ) for every term.
pub fn satisfies_membership(ts: &TermSum, l: u32) -> bool {
    ts.terms().all(|((k, s), b)| {
        k.norm() + s <= l && b.degree().unwrap_or(0) as i64 <= l as i64 - k.len() as i64
    })
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::Domain("moment order must be positive".into()));
    }
    if k > MOMENT_CAP {
        return Err(Error::CapacityExceeded(format!(
            "moment order {} exceeds cap {}",
            k, MOMENT_CAP
        )));
    }
    Ok(())
}

/// Traced weights b_κ for E[tr T^{2k}].
pub fn b_coefficients_even(k: u32) -> Result<TermSum> {
    check_k(k)?;
    Ok(trace_terms(&apply_dl_times(&TermSum::unit(), 2 * k)))
}

/// Traced weights b_κ for E[tr² T^k].
pub fn b_coefficients_squared(k: u32) -> Result<TermSum> {
    check_k(k)?;
    let inner = trace_terms(&apply_dl_times(&TermSum::unit(), k));
    Ok(trace_terms(&apply_dl_times(&inner, k)))
}

/// (−1)^k/n^k Σ_κ b_κ E[r_κ(Y⁻¹)].
pub fn assemble(b: &TermSum, k: u32) -> Result<RationalFunction> {
    // group by weight so that terms sharing a denominator are added first
    let mut by_weight: BTreeMap<u32, RationalFunction> = BTreeMap::new();
    for ((kappa, _), coeff) in b.terms() {
        let e = expected_powersum_inv_wishart(kappa)?;
        let term = e.mul_poly(coeff);
        let slot = by_weight.entry(kappa.norm()).or_insert_with(RationalFunction::zero);
        *slot = slot.add(&term);
    }
    let mut acc = RationalFunction::zero();
    for (_, v) in by_weight {
        acc = acc.add(&v);
    }
    let sign = if k.is_multiple_of(2) { BigRational::one() } else { -BigRational::one() };
    Ok(acc.scale(&sign).div_monomial([k, 0, 0]))
}

/// Which moment a result refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MomentKind {
    /// E[tr T^{2k}]
    Even,
    /// E[tr² T^k]
    Squared,
}

/// Exact moment with its validity threshold n ≥ p + gap.
#[derive(Debug, Clone)]
pub struct MomentResult {
    pub kind: MomentKind,
    pub k: u32,
    pub exact: RationalFunction,
    pub min_gap: i64,
}

impl MomentResult {
    pub fn is_valid_at(&self, n: i64, p: i64) -> bool {
        n - p >= self.min_gap
    }

    pub fn exact_at(&self, n: &BigInt, p: &BigInt) -> Result<BigRational> {
        self.exact.eval(n, p)
    }

    pub fn decimal(&self, n: i64, p: i64) -> Result<f64> {
        Ok(rational_to_f64(&self.exact.eval_i64(n, p)?))
    }

    pub fn record(&self) -> MomentRecord {
        MomentRecord {
            kind: self.kind,
            k: self.k,
            exact: self.exact.to_record(),
            validity: format!("n >= p + {}", self.min_gap),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRecord {
    pub kind: MomentKind,
    pub k: u32,
    pub exact: RationalFunctionRecord,
    pub validity: String,
}

fn moment_cache() -> &'static Mutex<HashMap<(MomentKind, u32), MomentResult>> {
    static C: OnceLock<Mutex<HashMap<(MomentKind, u32), MomentResult>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(kind: MomentKind, k: u32, f: impl FnOnce() -> Result<MomentResult>) -> Result<MomentResult> {
    if let Some(v) = moment_cache().lock().unwrap().get(&(kind, k)) {
        return Ok(v.clone());
    }
    let v = f()?;
    moment_cache().lock().unwrap().insert((kind, k), v.clone());
    Ok(v)
}

pub fn validity_gap(k: u32) -> i64 {
    16 * k as i64 + 6
}

/// E[tr T^{2k}] for T ~ T_{n/2}(I_p/8).
pub fn moment_tr_even(k: u32) -> Result<MomentResult> {
    check_k(k)?;
    cached(MomentKind::Even, k, || {
        let b = b_coefficients_even(k)?;
        Ok(MomentResult { kind: MomentKind::Even, k, exact: assemble(&b, k)?, min_gap: validity_gap(k) })
    })
}

/// E[tr² T^k] for T ~ T_{n/2}(I_p/8).
pub fn moment_tr_squared(k: u32) -> Result<MomentResult> {
    check_k(k)?;
    cached(MomentKind::Squared, k, || {
        let b = b_coefficients_squared(k)?;
        Ok(MomentResult {
            kind: MomentKind::Squared,
            k,
            exact: assemble(&b, k)?,
            min_gap: validity_gap(k),
        })
    })
}

/// E[tr T^k]; odd orders vanish by symmetry.
pub fn moment_tr(k: u32) -> Result<RationalFunction> {
    if k % 2 == 1 {
        return Ok(RationalFunction::zero());
    }
    Ok(moment_tr_even(k / 2)?.exact)
}

pub fn catalan(k: u32) -> Result<u64> {
    if k > 30 {
        return Err(Error::CapacityExceeded(format!("catalan index {} exceeds 30", k)));
    }
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    Ok(c as u64)
}

/// E[((1/p)tr(4T/√p)^k − C_{k/2}·1{k even})²] as a rational function.
pub fn normalized_l2_error_sq(k: u32) -> Result<RationalFunction> {
    if k == 0 || k > 4 {
        return Err(Error::CapacityExceeded(format!("L2 error order {} outside 1..=4", k)));
    }
    let sq = moment_tr_squared(k)?.exact;
    let pow16 = BigRational::from_integer(BigInt::from(16u32).pow(k));
    let mut out = sq.scale(&pow16).div_monomial([0, 0, k + 2]);
    if k.is_multiple_of(2) {
        let c = BigRational::from_integer(BigInt::from(catalan(k / 2)?));
        let pow4 = BigRational::from_integer(BigInt::from(4u32).pow(k));
        let first = moment_tr(k)?
            .scale(&(int(2) * pow4 * &c))
            .div_monomial([0, 0, k / 2 + 1]);
        out = out.sub(&first).add(&RationalFunction::constant(&c * &c));
    }
    Ok(out)
}

/// Leading asymptotic form of the normalized L² error claimed for order k.
pub fn claimed_l2_leading(k: u32) -> Result<RationalFunction> {
    let p = RationalPoly::p();
    let over_p2 = |c: i64| RationalFunction::constant(int(c)).div_monomial([0, 0, 2]);
    let f = match k {
        1 => over_p2(2),
        2 => over_p2(5)
            .add(&RationalFunction::constant(int(2)).div_monomial([0, 1, 0]))
            .add(&RationalFunction::from_poly(&p * &p).div_monomial([0, 2, 0])),
        3 => over_p2(24),
        4 => over_p2(97)
            .add(&RationalFunction::constant(int(50)).div_monomial([0, 1, 0]))
            .add(&RationalFunction::from_poly((&p * &p).scale(&int(25))).div_monomial([0, 2, 0])),
        _ => return Err(Error::CapacityExceeded(format!("no claim for order {}", k))),
    };
    Ok(f)
}

/// Exact value as "num/den".
pub fn exact_string(x: &BigRational) -> String {
    rational_string(x)
}
