use std::collections::HashMap;
use std::sync::OnceLock;

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;

use super::{enumerate_partitions, rational_string, IntegerPartition};
use crate::error::{Error, Result};

pub const ZONAL_CAP: u32 = 12;

type Matrix = Vec<Vec<BigRational>>;

/// Change of basis between zonal polynomials C_λ (Muirhead normalization,
/// Σ_λ C_λ = trʷ) and power sums r_κ for one weight w.
#[derive(Debug, Clone)]
pub struct ZonalTable {
    weight: u32,
    partitions: Vec<IntegerPartition>,
    index: HashMap<IntegerPartition, usize>,
    to_powersum: Matrix,
    from_powersum: Matrix,
}

impl ZonalTable {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Partitions of the weight in reverse-lexicographic order; rows and
    /// columns of both matrices follow this order.
    pub fn partitions(&self) -> &[IntegerPartition] {
        &self.partitions
    }

    pub fn index_of(&self, k: &IntegerPartition) -> Option<usize> {
        self.index.get(k).copied()
    }

    /// Row λ: C_λ = Σ_κ to_powersum[λ][κ] r_κ.
    pub fn to_powersum(&self) -> &Matrix {
        &self.to_powersum
    }

    /// Row κ: r_κ = Σ_λ from_powersum[κ][λ] C_λ.
    pub fn from_powersum(&self) -> &Matrix {
        &self.from_powersum
    }

    pub fn dump(&self) -> ZonalDump {
        let conv = |m: &Matrix| -> Vec<Vec<RationalCell>> {
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|x| RationalCell { num: x.numer().to_string(), den: x.denom().to_string() })
                        .collect()
                })
                .collect()
        };
        ZonalDump {
            weight: self.weight,
            partitions: self.partitions.iter().map(|p| p.parts().to_vec()).collect(),
            to_powersum: conv(&self.to_powersum),
            from_powersum: conv(&self.from_powersum),
        }
    }

    /// Human-readable line for r_κ in the C basis, e.g. `r(2) = C(2) - 1/2*C(1,1)`.
    pub fn describe_powersum(&self, row: usize) -> String {
        let mut terms = Vec::new();
        for (j, c) in self.from_powersum[row].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coef = if c.is_one() { String::new() } else { format!("{}*", rational_string(c)) };
            terms.push(format!("{}C{}", coef, self.partitions[j]));
        }
        format!("r{} = {}", self.partitions[row], terms.join(" + ").replace("+ -", "- "))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RationalCell {
    pub num: String,
    pub den: String,
}

/// JSON layout of one table: rows follow `partitions`.
#[derive(Debug, Clone, Serialize)]
pub struct ZonalDump {
    pub weight: u32,
    pub partitions: Vec<Vec<u32>>,
    pub to_powersum: Vec<Vec<RationalCell>>,
    pub from_powersum: Vec<Vec<RationalCell>>,
}

/// Memoized table for weight w ≤ 12.
pub fn zonal_table(w: u32) -> Result<&'static ZonalTable> {
    if w > ZONAL_CAP {
        return Err(Error::CapacityExceeded(format!("zonal weight {} exceeds cap {}", w, ZONAL_CAP)));
    }
    static TABLES: [OnceLock<ZonalTable>; ZONAL_CAP as usize + 1] =
        [const { OnceLock::new() }; ZONAL_CAP as usize + 1];
    Ok(TABLES[w as usize].get_or_init(|| build(w)))
}

fn build(w: u32) -> ZonalTable {
    let parts = enumerate_partitions(w).expect("weight under cap");
    let index: HashMap<IntegerPartition, usize> =
        parts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let d = parts.len();

    // unnormalized zonal polynomials in the monomial basis, leading coefficient 1
    let mut y: Matrix = vec![vec![BigRational::zero(); d]; d];
    for (ki, kappa) in parts.iter().enumerate() {
        y[ki][ki] = BigRational::one();
        let rho_k = kappa.rho();
        for li in (ki + 1)..d {
            let lambda = &parts[li];
            let denom = rho_k - lambda.rho();
            if denom == 0 {
                continue;
            }
            let mut acc = BigRational::zero();
            let l = lambda.parts();
            for i in 0..l.len() {
                for j in (i + 1)..l.len() {
                    for t in 1..=l[j] {
                        let mut mu = l.to_vec();
                        mu[i] += t;
                        mu[j] -= t;
                        let mu = IntegerPartition::new(mu);
                        let mi = index[&mu];
                        // only μ with λ < μ ≤ κ contribute; lex order is a
                        // linear extension of dominance
                        if mi < ki || mi >= li {
                            continue;
                        }
                        let c = &y[ki][mi];
                        if c.is_zero() {
                            continue;
                        }
                        let f = (l[i] + t) as i64 - (l[j] - t) as i64;
                        acc += c * BigRational::from_integer(BigInt::from(f));
                    }
                }
            }
            y[ki][li] = acc / BigRational::from_integer(BigInt::from(denom));
        }
    }

    // normalize so that Σ_κ C_κ = p₁ʷ = Σ_λ (w!/Πλᵢ!) M_λ
    let target: Vec<BigRational> = parts.iter().map(multinomial).collect();
    let mut scale = vec![BigRational::zero(); d];
    for li in 0..d {
        let mut s = target[li].clone();
        for ki in 0..li {
            s -= &scale[ki] * &y[ki][li];
        }
        scale[li] = s;
    }
    let cm: Matrix = (0..d)
        .map(|ki| y[ki].iter().map(|x| x * &scale[ki]).collect())
        .collect();

    // power sums in the monomial basis
    let pm: Matrix = parts.iter().map(|mu| powersum_in_monomials(mu, &index, d)).collect();

    // C = Cm·M and r = Pm·M, so C = Cm·Pm⁻¹·r and r = Pm·Cm⁻¹·C
    let to_powersum = matmul(&cm, &invert(&pm));
    let from_powersum = matmul(&pm, &invert(&cm));
    ZonalTable { weight: w, partitions: parts, index, to_powersum, from_powersum }
}

fn multinomial(p: &IntegerPartition) -> BigRational {
    let fact = |k: u32| (1..=k as u64).fold(BigInt::one(), |a, b| a * b);
    let mut den = BigInt::one();
    for &x in p.parts() {
        den *= fact(x);
    }
    BigRational::new(fact(p.norm()), den)
}

/// Coefficients of p_μ = Π p_{μᵢ} in the monomial symmetric basis.
fn powersum_in_monomials(
    mu: &IntegerPartition,
    index: &HashMap<IntegerPartition, usize>,
    d: usize,
) -> Vec<BigRational> {
    let mut cur: HashMap<IntegerPartition, BigInt> = HashMap::new();
    cur.insert(IntegerPartition::empty(), BigInt::one());
    for &r in mu.parts() {
        let mut next: HashMap<IntegerPartition, BigInt> = HashMap::new();
        for (lam, c) in &cur {
            // add r to one part value u of λ, or to a new zero part
            let mut values: Vec<u32> = lam.parts().to_vec();
            values.dedup();
            values.push(0);
            for u in values {
                let mut parts = lam.parts().to_vec();
                if u == 0 {
                    parts.push(r);
                } else {
                    let pos = parts.iter().position(|&x| x == u).unwrap();
                    parts[pos] += r;
                }
                let nu = IntegerPartition::new(parts);
                let mult = nu.parts().iter().filter(|&&x| x == u + r).count();
                *next.entry(nu).or_insert_with(BigInt::zero) += c * BigInt::from(mult);
            }
        }
        cur = next;
    }
    let mut row = vec![BigRational::zero(); d];
    for (lam, c) in cur {
        row[index[&lam]] = BigRational::from_integer(c);
    }
    row
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    out
}

/// Exact Gauss-Jordan inverse.
fn invert(a: &Matrix) -> Matrix {
    let n = a.len();
    let mut m: Matrix = a.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("singular basis matrix");
        m.swap(col, piv);
        inv.swap(col, piv);
        let pv = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                if !m[col][j].is_zero() {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
                if !inv[col][j].is_zero() {
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    inv
}
