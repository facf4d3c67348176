//! Classical `SL2` in characteristic `p`: characters, decomposition numbers
//! `[∇(λ):L(μ)]` by character inversion, and the first-extension recursions.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::scalars::is_prime;

/// A character `Σ m_e x^e`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentChar {
    coeffs: BTreeMap<i64, u64>,
}

impl LaurentChar {
    pub fn from_map(coeffs: BTreeMap<i64, u64>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, m)| *m != 0).collect();
        LaurentChar { coeffs }
    }

    pub fn monomial(e: i64) -> Self {
        LaurentChar { coeffs: BTreeMap::from([(e, 1)]) }
    }

    pub fn get(&self, e: i64) -> u64 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, u64> {
        &self.coeffs
    }

    pub fn dim(&self) -> u64 {
        self.coeffs.values().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().all(|(&e, &m)| self.get(-e) == m)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.coeffs.clone();
        for (&e, &m) in &other.coeffs {
            *c.entry(e).or_insert(0) += m;
        }
        LaurentChar { coeffs: c }
    }

    /// `self - other`, or `None` if a coefficient would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut c = self.coeffs.clone();
        for (&e, &m) in &other.coeffs {
            let slot = c.get_mut(&e)?;
            *slot = slot.checked_sub(m)?;
        }
        Some(Self::from_map(c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = BTreeMap::new();
        for (&a, &m) in &self.coeffs {
            for (&b, &n) in &other.coeffs {
                *c.entry(a + b).or_insert(0) += m * n;
            }
        }
        LaurentChar { coeffs: c }
    }

    pub fn scale(&self, k: u64) -> Self {
        Self::from_map(self.coeffs.iter().map(|(&e, &m)| (e, m * k)).collect())
    }

    /// Frobenius twist: exponents multiplied by `q`.
    pub fn twist(&self, q: i64) -> Self {
        LaurentChar { coeffs: self.coeffs.iter().map(|(&e, &m)| (e * q, m)).collect() }
    }
}

/// `ch ∇(λ) = x^λ + x^{λ-2} + … + x^{-λ}`.
pub fn char_costandard(lambda: u64) -> LaurentChar {
    let l = lambda as i64;
    LaurentChar { coeffs: (0..=l).map(|k| (l - 2 * k, 1)).collect() }
}

fn digits(mut n: u64, p: u64) -> Vec<u64> {
    let mut d = Vec::new();
    while n > 0 {
        d.push(n % p);
        n /= p;
    }
    d
}

/// Steinberg: `ch L(λ) = Π_i ch ∇(λ_i)^{(i)}`.
pub fn char_simple(lambda: u64, p: u64) -> LaurentChar {
    let mut out = LaurentChar::monomial(0);
    let mut scale = 1i64;
    for d in digits(lambda, p) {
        out = out.mul(&char_costandard(d).twist(scale));
        scale *= p as i64;
    }
    out
}

/// Nonnegative weights of `L(μ)`, one per weight (all simple weight spaces are one-dimensional).
fn simple_weights_at_least(mu: u64, p: u64, floor: i64) -> Vec<i64> {
    let mut ws = vec![0i64];
    let mut scale = 1i64;
    for d in digits(mu, p) {
        let d = d as i64;
        let mut next = Vec::with_capacity(ws.len() * (d as usize + 1));
        for &w in &ws {
            for t in 0..=d {
                next.push(w + scale * (d - 2 * t));
            }
        }
        ws = next;
        scale *= p as i64;
    }
    ws.retain(|&w| w >= floor);
    ws
}

/// Composition factors `(μ, [∇(λ):L(μ)])` of `∇(λ)`, with `μ` descending.
fn decomposition_row(lambda: u64, p: u64) -> Vec<(u64, u64)> {
    // c[k] is the remaining multiplicity of weight λ - 2k, for nonnegative weights only.
    let half = (lambda / 2) as usize;
    let mut c = vec![1u64; half + 1];
    let l = lambda as i64;
    let mut row = Vec::new();
    for k in 0..=half {
        let m = c[k];
        if m == 0 {
            continue;
        }
        let mu = lambda - 2 * k as u64;
        row.push((mu, m));
        for w in simple_weights_at_least(mu, p, 0) {
            let idx = ((l - w) / 2) as usize;
            c[idx] -= m;
        }
    }
    row
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompTable {
    pub p: u64,
    pub lambda_max: u64,
    rows: Vec<Vec<(u64, u64)>>,
}

impl DecompTable {
    pub fn get(&self, lambda: u64, mu: u64) -> u64 {
        self.rows
            .get(lambda as usize)
            .and_then(|r| r.iter().find(|(m, _)| *m == mu))
            .map_or(0, |(_, k)| *k)
    }

    pub fn row(&self, lambda: u64) -> &[(u64, u64)] {
        &self.rows[lambda as usize]
    }

    /// `lambda,mu,multiplicity` lines for every nonzero entry, `λ` ascending, `μ` ascending.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,mu,multiplicity\n");
        for (l, row) in self.rows.iter().enumerate() {
            for (mu, m) in row.iter().rev() {
                let _ = writeln!(s, "{l},{mu},{m}");
            }
        }
        s
    }
}

pub fn decomposition_numbers(lambda_max: u64, p: u64) -> Result<DecompTable> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let rows = (0..=lambda_max).map(|l| decomposition_row(l, p)).collect();
    Ok(DecompTable { p, lambda_max, rows })
}

/// Memoized oracle for one prime. Internally synchronized; safe to share across threads.
#[derive(Debug)]
pub struct Sl2Oracle {
    p: u64,
    rows: Mutex<HashMap<u64, Arc<Vec<(u64, u64)>>>>,
    ext_costandard: Mutex<HashMap<(u64, u64), u64>>,
    ext_simple: Mutex<HashMap<(u64, u64), u64>>,
}

impl Sl2Oracle {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Sl2Oracle {
            p,
            rows: Mutex::new(HashMap::new()),
            ext_costandard: Mutex::new(HashMap::new()),
            ext_simple: Mutex::new(HashMap::new()),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Factors of `∇(λ)` with `μ` descending.
    pub fn row(&self, lambda: u64) -> Arc<Vec<(u64, u64)>> {
        if let Some(r) = self.rows.lock().expect("poisoned").get(&lambda) {
            return r.clone();
        }
        let r = Arc::new(decomposition_row(lambda, self.p));
        self.rows.lock().expect("poisoned").insert(lambda, r.clone());
        r
    }

    pub fn multiplicity(&self, lambda: u64, mu: u64) -> u64 {
        if mu > lambda || !(lambda - mu).is_multiple_of(2) {
            return 0;
        }
        self.row(lambda).iter().find(|(m, _)| *m == mu).map_or(0, |(_, k)| *k)
    }

    fn require_odd(&self) -> Result<()> {
        if self.p == 2 {
            Err(Error::UnsupportedPrime(2))
        } else {
            Ok(())
        }
    }

    /// `dim Ext¹(L(λ), ∇(μ))`, `p > 2`.
    pub fn ext1_simple_costandard(&self, lambda: u64, mu: u64) -> Result<u64> {
        self.require_odd()?;
        Ok(self.ext_lc(lambda, mu))
    }

    fn ext_lc(&self, lambda: u64, mu: u64) -> u64 {
        let p = self.p;
        if lambda < p && mu < p {
            return 0;
        }
        if let Some(&v) = self.ext_costandard.lock().expect("poisoned").get(&(lambda, mu)) {
            return v;
        }
        let (a, r) = (lambda / p, lambda % p);
        let (b, s) = (mu / p, mu % p);
        let v = if r == s {
            self.ext_lc(a, b)
        } else if r + s == p - 2 {
            u64::from(b + 1 == a)
        } else {
            0
        };
        self.ext_costandard.lock().expect("poisoned").insert((lambda, mu), v);
        v
    }

    /// `dim Ext¹(L(λ), L(μ))`, `p > 2`.
    pub fn ext1_simple_simple(&self, lambda: u64, mu: u64) -> Result<u64> {
        self.require_odd()?;
        Ok(self.ext_ll(lambda, mu))
    }

    fn ext_ll(&self, lambda: u64, mu: u64) -> u64 {
        let p = self.p;
        if lambda < p && mu < p {
            return 0;
        }
        if let Some(&v) = self.ext_simple.lock().expect("poisoned").get(&(lambda, mu)) {
            return v;
        }
        let (a, r) = (lambda / p, lambda % p);
        let (b, s) = (mu / p, mu % p);
        let v = if r == s {
            self.ext_ll(a, b)
        } else if r + s == p - 2 {
            hom_into_tensor_l1(a, b, p)
        } else {
            0
        };
        self.ext_simple.lock().expect("poisoned").insert((lambda, mu), v);
        v
    }
}

/// `dim Hom(L(a), L(b) ⊗ L(1))`.
fn hom_into_tensor_l1(a: u64, b: u64, p: u64) -> u64 {
    let b0 = b % p;
    let hit = if b0 == 0 {
        a == b + 1
    } else if b0 < p - 1 {
        a == b + 1 || a + 1 == b
    } else {
        a + 1 == b
    };
    u64::from(hit)
}

pub fn ext1_simple_costandard(lambda: u64, mu: u64, p: u64) -> Result<u64> {
    Sl2Oracle::new(p)?.ext1_simple_costandard(lambda, mu)
}

pub fn ext1_simple_simple(lambda: u64, mu: u64, p: u64) -> Result<u64> {
    Sl2Oracle::new(p)?.ext1_simple_simple(lambda, mu)
}
