use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::poly::{Exp, RationalPoly, M, N};
use crate::error::{Error, Result};

/// Ratio of a polynomial in (n, m, p) to a factored denominator made of
/// linear factors (m - a) and a monomial n^a m^b p^c.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: RationalPoly,
    /// a -> multiplicity of (m - a)
    lin: BTreeMap<i64, u32>,
    mono: Exp,
}

impl RationalFunction {
    pub fn new(num: RationalPoly, lin: BTreeMap<i64, u32>, mono: Exp) -> Self {
        let mut f = Self { num, lin, mono };
        f.simplify();
        f
    }

    pub fn from_poly(num: RationalPoly) -> Self {
        Self::new(num, BTreeMap::new(), [0, 0, 0])
    }

    pub fn zero() -> Self {
        Self::from_poly(RationalPoly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(RationalPoly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(RationalPoly::constant(c))
    }

    pub fn numerator(&self) -> &RationalPoly {
        &self.num
    }

    pub fn linear_factors(&self) -> &BTreeMap<i64, u32> {
        &self.lin
    }

    pub fn monomial_denominator(&self) -> Exp {
        self.mono
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Expanded denominator polynomial.
    pub fn denominator(&self) -> RationalPoly {
        let mut d = RationalPoly::monomial(BigRational::one(), self.mono);
        for (&a, &k) in &self.lin {
            d = &d * &RationalPoly::var_plus(M, -a).pow(k);
        }
        d
    }

    fn simplify(&mut self) {
        if self.num.is_zero() {
            self.lin.clear();
            self.mono = [0, 0, 0];
            return;
        }
        let me = self.num.min_exponents();
        let common = [me[0].min(self.mono[0]), me[1].min(self.mono[1]), me[2].min(self.mono[2])];
        if common != [0, 0, 0] {
            self.num = self.num.unshift(common);
            for i in 0..3 {
                self.mono[i] -= common[i];
            }
        }
        let keys: Vec<i64> = self.lin.keys().copied().collect();
        for a in keys {
            while let Some(k) = self.lin.get(&a).copied() {
                match self.num.div_m_minus(a) {
                    Some(q) => {
                        self.num = q;
                        if k == 1 {
                            self.lin.remove(&a);
                        } else {
                            self.lin.insert(a, k - 1);
                        }
                    }
                    None => break,
                }
            }
        }
        // (m - 0) is stored in the monomial part
        if let Some(k) = self.lin.remove(&0) {
            self.mono[M] += k;
            self.simplify();
        }
    }

    /// Multiplies the numerator by the factors of `target` missing from self.
    fn lift_to(&self, lin: &BTreeMap<i64, u32>, mono: Exp) -> RationalPoly {
        let mut num = self.num.shift([
            mono[0] - self.mono[0],
            mono[1] - self.mono[1],
            mono[2] - self.mono[2],
        ]);
        for (&a, &k) in lin {
            let have = self.lin.get(&a).copied().unwrap_or(0);
            if k > have {
                num = &num * &RationalPoly::var_plus(M, -a).pow(k - have);
            }
        }
        num
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut lin = self.lin.clone();
        for (&a, &k) in &other.lin {
            let e = lin.entry(a).or_insert(0);
            *e = (*e).max(k);
        }
        let mono = [
            self.mono[0].max(other.mono[0]),
            self.mono[1].max(other.mono[1]),
            self.mono[2].max(other.mono[2]),
        ];
        let num = &self.lift_to(&lin, mono) + &other.lift_to(&lin, mono);
        Self::new(num, lin, mono)
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, lin: self.lin.clone(), mono: self.mono }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut lin = self.lin.clone();
        for (&a, &k) in &other.lin {
            *lin.entry(a).or_insert(0) += k;
        }
        let mono = [
            self.mono[0] + other.mono[0],
            self.mono[1] + other.mono[1],
            self.mono[2] + other.mono[2],
        ];
        Self::new(&self.num * &other.num, lin, mono)
    }

    pub fn mul_poly(&self, q: &RationalPoly) -> Self {
        Self::new(&self.num * q, self.lin.clone(), self.mono)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.num.scale(c), self.lin.clone(), self.mono)
    }

    /// Divides by n^a m^b p^c.
    pub fn div_monomial(&self, e: Exp) -> Self {
        Self::new(
            self.num.clone(),
            self.lin.clone(),
            [self.mono[0] + e[0], self.mono[1] + e[1], self.mono[2] + e[2]],
        )
    }

    /// Divides by (m - a)^k.
    pub fn div_linear(&self, a: i64, k: u32) -> Self {
        let mut lin = self.lin.clone();
        *lin.entry(a).or_insert(0) += k;
        Self::new(self.num.clone(), lin, self.mono)
    }

    /// Equality as formal rational functions of independent n, m, p.
    pub fn eq_formal(&self, other: &Self) -> bool {
        &self.num * &other.denominator() == &other.num * &self.denominator()
    }

    /// Equality after imposing m = n - p - 1.
    pub fn eq_on_manifold(&self, other: &Self) -> bool {
        let lhs = &self.num * &other.denominator();
        let rhs = &other.num * &self.denominator();
        let diff = &lhs - &rhs;
        diff.substitute(N, &manifold_n()).is_zero()
    }

    /// Exact value at integer (n, p) with m = n - p - 1.
    pub fn eval(&self, n: &BigInt, p: &BigInt) -> Result<BigRational> {
        let m = n - p - BigInt::one();
        self.eval_nmp(
            &BigRational::from_integer(n.clone()),
            &BigRational::from_integer(m),
            &BigRational::from_integer(p.clone()),
        )
    }

    pub fn eval_i64(&self, n: i64, p: i64) -> Result<BigRational> {
        self.eval(&BigInt::from(n), &BigInt::from(p))
    }

    pub fn eval_nmp(&self, n: &BigRational, m: &BigRational, p: &BigRational) -> Result<BigRational> {
        let d = self.denominator().eval([n, m, p]);
        if d.is_zero() {
            return Err(Error::Domain("denominator vanishes at this point".into()));
        }
        Ok(self.num.eval([n, m, p]) / d)
    }

    /// Serializable form: numerator string, factor list, display string.
    pub fn to_record(&self) -> RationalFunctionRecord {
        let mut factors = Vec::new();
        for (i, name) in ["n", "m", "p"].iter().enumerate() {
            if self.mono[i] > 0 {
                factors.push(FactorRecord { factor: name.to_string(), power: self.mono[i] });
            }
        }
        for (&a, &k) in self.lin.iter().rev() {
            factors.push(FactorRecord { factor: linear_str(a), power: k });
        }
        RationalFunctionRecord {
            numerator: self.num.to_string(),
            denominator_factors: factors,
            display: self.to_string(),
        }
    }
}

/// n expressed through m and p on the constraint m = n - p - 1.
pub fn manifold_n() -> RationalPoly {
    &(&RationalPoly::m() + &RationalPoly::p()) + &RationalPoly::one()
}

fn linear_str(a: i64) -> String {
    match a.cmp(&0) {
        std::cmp::Ordering::Greater => format!("m - {}", a),
        std::cmp::Ordering::Less => format!("m + {}", -a),
        std::cmp::Ordering::Equal => "m".into(),
    }
}

fn mono_str(e: &Exp) -> Vec<String> {
    let mut out = Vec::new();
    for (i, name) in ["n", "m", "p"].iter().enumerate() {
        match e[i] {
            0 => {}
            1 => out.push(name.to_string()),
            k => out.push(format!("{}^{}", name, k)),
        }
    }
    out
}

impl fmt::Display for RationalFunction {
    /// Factored form such as `n*p*(m*p + m + 2)/(16*(m - 2)*(m + 1))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            return write!(f, "0");
        }
        let c = self.num.content();
        let prim = self.num.scale(&(BigRational::one() / &c));
        let me = prim.min_exponents();
        let prim = prim.unshift(me);
        let mut top: Vec<String> = Vec::new();
        let cn = c.numer().abs();
        if !cn.is_one() {
            top.push(cn.to_string());
        }
        top.extend(mono_str(&me));
        if prim.len() == 1 && prim.degree() == Some(0) {
            // constant 1
        } else if prim.len() == 1 {
            top.push(prim.to_string());
        } else {
            top.push(format!("({})", prim));
        }
        if top.is_empty() {
            top.push("1".into());
        }
        let mut bot: Vec<String> = Vec::new();
        if !c.denom().is_one() {
            bot.push(c.denom().to_string());
        }
        bot.extend(mono_str(&self.mono));
        for (&a, &k) in self.lin.iter().rev() {
            let s = format!("({})", linear_str(a));
            if k == 1 {
                bot.push(s);
            } else {
                bot.push(format!("{}^{}", s, k));
            }
        }
        if c.is_negative() {
            write!(f, "-")?;
        }
        write!(f, "{}", top.join("*"))?;
        match bot.len() {
            0 => Ok(()),
            1 => write!(f, "/{}", bot[0]),
            _ => write!(f, "/({})", bot.join("*")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorRecord {
    pub factor: String,
    pub power: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalFunctionRecord {
    pub numerator: String,
    pub denominator_factors: Vec<FactorRecord>,
    pub display: String,
}

/// "num/den" with an integer written without a denominator.
pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Nearest double to an exact rational, robust to huge numerators and
/// denominators.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let bits_n = x.numer().bits() as i64;
    let bits_d = x.denom().bits() as i64;
    let shift = 60 - (bits_n - bits_d);
    let scaled = if shift >= 0 {
        (x.numer() << shift as usize) / x.denom()
    } else {
        x.numer() / (x.denom() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}
