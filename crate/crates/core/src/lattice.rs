//! Free `Z`- and `Z[1/p]`-modules of finite rank and maps between them.
//!
//! All linear algebra here is exact. Integer work goes through
//! [`smith_normal_form`]; rational work (inverses, determinants) uses
//! `BigRational` and is converted back into `Z[1/p]` where required.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{LocalizedRational, Zp};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type QMatrix = Vec<Vec<BigRational>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Z,
    ZInvP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub rank: usize,
    pub ring: Ring,
}

impl Lattice {
    pub fn new(rank: usize, ring: Ring) -> Self {
        Lattice { rank, ring }
    }
}

/// A linear map `domain -> codomain`, acting on column vectors
/// (`codomain.rank` rows, `domain.rank` columns).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeMap {
    matrix: Vec<Vec<LocalizedRational>>,
    domain: Lattice,
    codomain: Lattice,
}

impl LatticeMap {
    pub fn new(matrix: Vec<Vec<LocalizedRational>>, domain: Lattice, codomain: Lattice) -> Result<Self> {
        if matrix.len() != codomain.rank || matrix.iter().any(|r| r.len() != domain.rank) {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape does not match {}x{}",
                codomain.rank, domain.rank
            )));
        }
        let ring = if domain.ring == Ring::Z && codomain.ring == Ring::Z { Ring::Z } else { Ring::ZInvP };
        if ring == Ring::Z && matrix.iter().flatten().any(|x| !x.is_integer()) {
            return Err(Error::InvalidDatum("non-integral entry in a map of Z-lattices".into()));
        }
        Ok(LatticeMap { matrix, domain, codomain })
    }

    /// Map over `Z[1/p]` from an arbitrary rectangular matrix.
    pub fn over_zp(matrix: Vec<Vec<LocalizedRational>>) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, |r| r.len());
        Self::new(matrix, Lattice::new(cols, Ring::ZInvP), Lattice::new(rows, Ring::ZInvP))
    }

    pub fn from_int(zp: &Zp, m: &IntMatrix, ring: Ring) -> Result<Self> {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let matrix = m.iter().map(|r| r.iter().map(|x| zp.int(x.clone())).collect()).collect();
        Self::new(matrix, Lattice::new(cols, ring), Lattice::new(rows, ring))
    }

    pub fn identity(zp: &Zp, rank: usize, ring: Ring) -> Self {
        let matrix = (0..rank)
            .map(|i| (0..rank).map(|j| if i == j { zp.one() } else { LocalizedRational::zero() }).collect())
            .collect();
        LatticeMap { matrix, domain: Lattice::new(rank, ring), codomain: Lattice::new(rank, ring) }
    }

    pub fn matrix(&self) -> &[Vec<LocalizedRational>] {
        &self.matrix
    }

    pub fn domain(&self) -> Lattice {
        self.domain
    }

    pub fn codomain(&self) -> Lattice {
        self.codomain
    }

    pub fn rows(&self) -> usize {
        self.codomain.rank
    }

    pub fn cols(&self) -> usize {
        self.domain.rank
    }

    pub fn is_integral(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_integer())
    }

    pub fn apply(&self, zp: &Zp, v: &[LocalizedRational]) -> Result<Vec<LocalizedRational>> {
        if v.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols())));
        }
        Ok(self
            .matrix
            .iter()
            .map(|row| row.iter().zip(v).fold(LocalizedRational::zero(), |acc, (a, b)| zp.add(&acc, &zp.mul(a, b))))
            .collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, zp: &Zp, other: &LatticeMap) -> Result<LatticeMap> {
        if other.rows() != self.cols() {
            return Err(Error::DimensionMismatch("composition dimensions disagree".into()));
        }
        let matrix = (0..self.rows())
            .map(|i| {
                (0..other.cols())
                    .map(|j| {
                        (0..self.cols()).fold(LocalizedRational::zero(), |acc, k| {
                            zp.add(&acc, &zp.mul(&self.matrix[i][k], &other.matrix[k][j]))
                        })
                    })
                    .collect()
            })
            .collect();
        LatticeMap::new(matrix, other.domain, self.codomain)
    }

    pub fn to_rational(&self, zp: &Zp) -> QMatrix {
        self.matrix.iter().map(|r| r.iter().map(|x| zp.to_rational(x)).collect()).collect()
    }

    pub fn from_rational(zp: &Zp, m: &QMatrix) -> Result<Self> {
        let matrix = m
            .iter()
            .map(|r| r.iter().map(|x| zp.from_rational(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::over_zp(matrix)
    }

    pub fn format(&self, zp: &Zp) -> Vec<Vec<String>> {
        self.matrix.iter().map(|r| r.iter().map(|x| zp.format(x)).collect()).collect()
    }
}

/// `left · A · right = diag(d_1, d_2, …)` with `d_1 | d_2 | …`, `d_i >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub diag: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn int_identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    let (s, d) = if src < dst {
        let (a, b) = m.split_at_mut(dst);
        (&a[src], &mut b[0])
    } else {
        let (a, b) = m.split_at_mut(src);
        (&b[0], &mut a[dst])
    };
    for (x, y) in d.iter_mut().zip(s) {
        *x -= q * y;
    }
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for row in m.iter_mut() {
        let t = q * &row[src];
        row[dst] -= t;
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Smith normal form by elementary row/column operations, pivoting on the
/// entry of least absolute value.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut left = int_identity(m);
    let mut right = int_identity(n);

    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            d.swap(t, pi);
            left.swap(t, pi);
            swap_cols(&mut d, t, pj);
            swap_cols(&mut right, t, pj);

            let mut clean = true;
            for i in t + 1..m {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_rem(&d[t][t]).0;
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                clean &= d[i][t].is_zero();
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_rem(&d[t][t]).0;
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                clean &= d[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad_row = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match bad_row {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    let diag = (0..m.min(n)).map(|i| d[i][i].clone()).collect();
    SmithDecomposition { left, right, diag }
}

/// A `Z`-basis (as columns, returned as a list of vectors) of the integer kernel of `a`.
pub fn integer_kernel_basis(a: &IntMatrix, cols: usize) -> Vec<Vec<BigInt>> {
    if a.is_empty() {
        return int_identity(cols);
    }
    let snf = smith_normal_form(a);
    let r = snf.rank();
    (r..cols).map(|j| snf.right.iter().map(|row| row[j].clone()).collect()).collect()
}

fn clear_denominators(entries: &[&LocalizedRational]) -> u32 {
    entries.iter().map(|x| x.pexp()).max().unwrap_or(0)
}

fn scaled_integer(zp: &Zp, x: &LocalizedRational, e: u32) -> BigInt {
    let y = zp.mul_pow(x, e as i64);
    y.as_integer().expect("denominators cleared").clone()
}

/// Is `v` in the `Z[1/p]`-span of `spanning`?
pub fn in_span_over_zp(zp: &Zp, v: &[LocalizedRational], spanning: &[Vec<LocalizedRational>]) -> Result<bool> {
    let n = v.len();
    if let Some(bad) = spanning.iter().find(|s| s.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {n} against spanning vector of length {}",
            bad.len()
        )));
    }
    if spanning.is_empty() {
        return Ok(v.iter().all(|x| x.is_zero()));
    }
    let all: Vec<&LocalizedRational> = v.iter().chain(spanning.iter().flatten()).collect();
    let e = clear_denominators(&all);
    let a: IntMatrix = (0..n)
        .map(|i| spanning.iter().map(|s| scaled_integer(zp, &s[i], e)).collect())
        .collect();
    let w: Vec<BigInt> = v.iter().map(|x| scaled_integer(zp, x, e)).collect();
    let snf = smith_normal_form(&a);
    let lw: Vec<BigInt> = snf
        .left
        .iter()
        .map(|row| row.iter().zip(&w).fold(BigInt::zero(), |acc, (x, y)| acc + x * y))
        .collect();
    let rank = snf.rank();
    if lw[rank..].iter().any(|x| !x.is_zero()) {
        return Ok(false);
    }
    let shift = snf.diag[..rank].iter().filter_map(|d| zp.int_valuation(d)).max().unwrap_or(0);
    let scale = zp.p_pow(shift);
    Ok(snf.diag[..rank].iter().zip(&lw).all(|(d, x)| (x * &scale).is_multiple_of(d)))
}

pub fn rational_det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

pub fn rational_rank(m: &QMatrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(piv, rank);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for k in c..cols {
                    let t = &f * &a[rank][k];
                    a[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rational_inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(piv, c);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn rational_matmul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn int_to_rational(m: &IntMatrix) -> QMatrix {
    m.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect()
}

/// Is `det(M) = ±p^k` for some integer `k`?
pub fn is_unit_determinant(zp: &Zp, m: &LatticeMap) -> Result<bool> {
    if m.rows() != m.cols() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let det = rational_det(&m.to_rational(zp));
    match zp.from_rational(&det) {
        Ok(d) => Ok(zp.is_unit(&d)),
        Err(_) => Ok(false),
    }
}

/// Adjoint of `m: A -> B` with respect to pairings `A × A' -> D` and `B × B' -> D`
/// given as Gram matrices. Returns `m^∨: B' -> A'`, characterized by
/// `<m x, y>_B = <x, m^∨ y>_A`.
pub fn dual_map(zp: &Zp, m: &LatticeMap, pairing_domain: &IntMatrix, pairing_codomain: &IntMatrix) -> Result<LatticeMap> {
    let (r, c) = (m.rows(), m.cols());
    if pairing_domain.len() != c || pairing_domain.iter().any(|row| row.len() != c) {
        return Err(Error::DimensionMismatch(format!("domain pairing must be {c}x{c}")));
    }
    if pairing_codomain.len() != r || pairing_codomain.iter().any(|row| row.len() != r) {
        return Err(Error::DimensionMismatch(format!("codomain pairing must be {r}x{r}")));
    }
    let pd_inv = rational_inverse(&int_to_rational(pairing_domain))
        .ok_or_else(|| Error::InvalidDatum("domain pairing is degenerate".into()))?;
    let mt = transpose(&m.to_rational(zp));
    let q = rational_matmul(&rational_matmul(&pd_inv, &mt), &int_to_rational(pairing_codomain));
    let out = LatticeMap::from_rational(zp, &q)?;
    let ring = if m.domain().ring == Ring::Z && m.codomain().ring == Ring::Z && out.is_integral() {
        Ring::Z
    } else {
        Ring::ZInvP
    };
    LatticeMap::new(out.matrix, Lattice::new(r, ring), Lattice::new(c, ring))
}
