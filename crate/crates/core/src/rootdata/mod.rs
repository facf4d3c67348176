//! Real-type root data stored in `Z`-form, read with `Z[1/p]` semantics.
//!
//! A [`RootDatum`] holds integral coordinates for `X`, `Y`, the roots and the
//! coroots, plus the prime `p`. Over `Z[1/p]` the listed roots are
//! representatives of `p^Z`-orbits: two roots are identified when they differ
//! by a power of `p`, and the coroot of `p^k α` is `p^{-k} α^∨`.
//!
//! The first `positive_count` roots form the positive system; the remaining
//! roots are their negatives in the same order.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{in_span_over_zp, int_to_rational, rational_det, rational_inverse, rational_matmul, rational_rank, transpose, IntMatrix, QMatrix};
use crate::scalars::{LocalizedRational, Zp};

mod builtin;
mod dynkin;
pub mod json;
mod reflection_form;
mod weyl;

pub use builtin::{builtin, builtin_names};
pub use dynkin::{classify_cartan, dynkin_classify, dynkin_type, DynkinComponent, DynkinKind, DynkinType};
pub use reflection_form::{from_reflection_form, to_reflection_form, Reflection, ReflectionDatum};
pub use weyl::{weyl_group, WeylGroup, DEFAULT_ENUMERATION_CAP};

pub type Vector = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootDatum {
    name: Option<String>,
    p: u64,
    rank: usize,
    pairing: Vec<Vec<i64>>,
    roots: Vec<Vector>,
    coroots: Vec<Vector>,
    positive_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    OnX,
    OnY,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub passed: bool,
    pub offending: Vec<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_axioms(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.axiom.as_str()).collect()
    }

    pub fn check(&self, axiom: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

/// `p`-adic valuation of the gcd of the coordinates; `None` for the zero vector.
pub fn p_content(v: &[i64], p: u64) -> Option<u32> {
    let p = p as i64;
    v.iter()
        .filter(|&&x| x != 0)
        .map(|&x| {
            let mut k = 0;
            let mut y = x;
            while y % p == 0 {
                y /= p;
                k += 1;
            }
            k
        })
        .min()
}

/// Divides out the full `p`-content: returns `(k, w)` with `v = p^k w`.
pub fn p_primitive(v: &[i64], p: u64) -> Option<(u32, Vector)> {
    let k = p_content(v, p)?;
    let d = (p as i64).pow(k);
    Some((k, v.iter().map(|x| x / d).collect()))
}

fn ratio(a: &[i64], b: &[i64]) -> Option<BigRational> {
    // a = c * b for rational c?
    let j = b.iter().position(|&x| x != 0)?;
    if a.iter().zip(b).any(|(&x, &y)| x as i128 * b[j] as i128 != a[j] as i128 * y as i128) {
        return None;
    }
    let c = BigRational::new(BigInt::from(a[j]), BigInt::from(b[j]));
    let ok = a.iter().zip(b).all(|(&x, &y)| BigRational::from_integer(BigInt::from(x)) == &c * BigInt::from(y));
    ok.then_some(c)
}

impl RootDatum {
    /// Assembles a datum after shape checks only; call [`RootDatum::validate`] for the axioms.
    pub fn new(
        p: u64,
        pairing: Vec<Vec<i64>>,
        roots: Vec<Vector>,
        coroots: Vec<Vector>,
        positive_count: usize,
        name: Option<String>,
    ) -> Result<Self> {
        Zp::new(p)?;
        let rank = pairing.len();
        if pairing.iter().any(|r| r.len() != rank) {
            return Err(Error::DimensionMismatch("pairing must be square".into()));
        }
        if roots.len() != coroots.len() {
            return Err(Error::DimensionMismatch(format!("{} roots but {} coroots", roots.len(), coroots.len())));
        }
        if roots.iter().chain(&coroots).any(|v| v.len() != rank) {
            return Err(Error::DimensionMismatch(format!("root or coroot not of length {rank}")));
        }
        if roots.iter().chain(&coroots).any(|v| v.iter().all(|&x| x == 0)) {
            return Err(Error::InvalidDatum("zero root or coroot".into()));
        }
        if 2 * positive_count != roots.len() {
            return Err(Error::InvalidDatum(format!(
                "positive_count {positive_count} is not half of {} roots",
                roots.len()
            )));
        }
        Ok(RootDatum { name, p, rank, pairing, roots, coroots, positive_count })
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn zp(&self) -> Zp {
        Zp::new(self.p).expect("prime checked at construction")
    }

    pub fn with_prime(&self, p: u64) -> Result<Self> {
        Zp::new(p)?;
        let mut out = self.clone();
        out.p = p;
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn pairing(&self) -> &[Vec<i64>] {
        &self.pairing
    }

    pub fn pairing_big(&self) -> IntMatrix {
        self.pairing.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn roots(&self) -> &[Vector] {
        &self.roots
    }

    pub fn coroots(&self) -> &[Vector] {
        &self.coroots
    }

    pub fn positive_count(&self) -> usize {
        self.positive_count
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = (usize, &Vector)> {
        self.roots.iter().enumerate().take(self.positive_count)
    }

    /// `<x, y> = x^T P y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                s += xi * self.pairing[i][j] * yj;
            }
        }
        s
    }

    /// `<λ, y>` for `λ ∈ X ⊗ Z[1/p]` and integral `y`.
    pub fn pair_scalar(&self, zp: &Zp, x: &[LocalizedRational], y: &[i64]) -> Result<LocalizedRational> {
        if x.len() != self.rank || y.len() != self.rank {
            return Err(Error::DimensionMismatch(format!("expected vectors of length {}", self.rank)));
        }
        let mut acc = LocalizedRational::zero();
        for (i, xi) in x.iter().enumerate() {
            let py: i64 = (0..self.rank).map(|j| self.pairing[i][j] * y[j]).sum();
            acc = zp.add(&acc, &zp.mul(xi, &zp.int(py)));
        }
        Ok(acc)
    }

    fn orbit_keys(vs: &[Vector], p: u64) -> HashMap<Vector, usize> {
        vs.iter()
            .enumerate()
            .filter_map(|(i, v)| p_primitive(v, p).map(|(_, w)| (w, i)))
            .collect()
    }

    /// Index of the listed root whose `p^Z`-orbit contains `v`, with `v = p^k · roots[i]`.
    pub fn root_orbit_of(&self, v: &[i64]) -> Option<(usize, i64)> {
        let (kv, w) = p_primitive(v, self.p)?;
        let i = Self::orbit_keys(&self.roots, self.p).get(&w).copied()?;
        let (ki, _) = p_primitive(&self.roots[i], self.p)?;
        Some((i, kv as i64 - ki as i64))
    }

    pub fn coroot_orbit_of(&self, v: &[i64]) -> Option<(usize, i64)> {
        let (kv, w) = p_primitive(v, self.p)?;
        let i = Self::orbit_keys(&self.coroots, self.p).get(&w).copied()?;
        let (ki, _) = p_primitive(&self.coroots[i], self.p)?;
        Some((i, kv as i64 - ki as i64))
    }

    /// `s_α(x) = x - <x, α^∨> α` on `X`.
    pub fn reflect_x(&self, alpha: usize, x: &[i64]) -> Vector {
        let c = self.pair(x, &self.coroots[alpha]);
        x.iter().zip(&self.roots[alpha]).map(|(a, b)| a - c * b).collect()
    }

    /// `s_α(y) = y - <α, y> α^∨` on `Y`.
    pub fn reflect_y(&self, alpha: usize, y: &[i64]) -> Vector {
        let c = self.pair(&self.roots[alpha], y);
        y.iter().zip(&self.coroots[alpha]).map(|(a, b)| a - c * b).collect()
    }

    /// Matrix of `s_α` on `X` or `Y` (acting on column vectors).
    pub fn reflection(&self, root_index: usize, side: Side) -> Result<Vec<Vec<i64>>> {
        if root_index >= self.roots.len() {
            return Err(Error::IndexOutOfRange { index: root_index, len: self.roots.len() });
        }
        let cols: Vec<Vector> = (0..self.rank)
            .map(|j| {
                let e: Vector = (0..self.rank).map(|i| i64::from(i == j)).collect();
                match side {
                    Side::OnX => self.reflect_x(root_index, &e),
                    Side::OnY => self.reflect_y(root_index, &e),
                }
            })
            .collect();
        Ok(transpose(&cols))
    }

    /// Permutation of the root list induced by `s_α` (orbit-wise).
    pub fn reflection_permutation(&self, alpha: usize) -> Option<Vec<u32>> {
        let keys = Self::orbit_keys(&self.roots, self.p);
        self.roots
            .iter()
            .map(|b| {
                let img = self.reflect_x(alpha, b);
                let (_, w) = p_primitive(&img, self.p)?;
                keys.get(&w).map(|&i| i as u32)
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let n = self.roots.len();
        let p = self.p;

        let det = rational_det(&int_to_rational(&self.pairing_big()));
        let unimodular = det.is_integer() && det.numer().abs() == BigInt::from(1);
        checks.push(AxiomCheck {
            axiom: "perfect_pairing".into(),
            passed: unimodular,
            offending: vec![],
            detail: format!("det = {det}"),
        });

        let bad: Vec<usize> = (0..n).filter(|&i| self.pair(&self.roots[i], &self.coroots[i]) != 2).collect();
        checks.push(AxiomCheck {
            axiom: "(1) <alpha, alpha^v> = 2".into(),
            passed: bad.is_empty(),
            detail: if bad.is_empty() { String::new() } else { format!("{} pairs fail", bad.len()) },
            offending: bad,
        });

        let exact: HashMap<&Vector, usize> = self.roots.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let bad: Vec<usize> = (0..n)
            .filter(|&i| {
                let neg: Vector = self.roots[i].iter().map(|x| -x).collect();
                match exact.get(&neg) {
                    Some(&j) => self.coroots[j].iter().zip(&self.coroots[i]).any(|(a, b)| *a != -b),
                    None => true,
                }
            })
            .collect();
        checks.push(AxiomCheck {
            axiom: "negation".into(),
            passed: bad.is_empty(),
            detail: String::new(),
            offending: bad,
        });

        for (axiom, vs) in [("(2') root multiples", &self.roots), ("(2) coroot multiples", &self.coroots)] {
            let mut non_unit = Vec::new();
            let mut repeated = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let Some(c) = ratio(&vs[i], &vs[j]) else { continue };
                    if c.abs() == BigRational::from_integer(1.into()) {
                        if c.is_positive() {
                            repeated.push(i);
                        }
                        continue;
                    }
                    let zp = self.zp();
                    match zp.from_rational(&c) {
                        Ok(u) if zp.is_unit(&u) => repeated.push(i),
                        _ => non_unit.push(i),
                    }
                }
            }
            non_unit.dedup();
            repeated.dedup();
            checks.push(AxiomCheck {
                axiom: axiom.into(),
                passed: non_unit.is_empty(),
                detail: "a root has a non-unit multiple in the list".into(),
                offending: non_unit,
            });
            checks.push(AxiomCheck {
                axiom: format!("{axiom}: distinct orbits"),
                passed: repeated.is_empty(),
                detail: "two listed vectors lie in the same p^Z-orbit".into(),
                offending: repeated,
            });
        }

        let root_keys = Self::orbit_keys(&self.roots, p);
        let coroot_keys = Self::orbit_keys(&self.coroots, p);
        let mut bad_x = Vec::new();
        let mut bad_y = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let img = self.reflect_x(a, &self.roots[b]);
                let img_v = self.reflect_y(a, &self.coroots[b]);
                let hit = p_primitive(&img, p).and_then(|(k, w)| root_keys.get(&w).map(|&g| (k, g)));
                match hit {
                    None => bad_x.push(a),
                    Some((k, g)) => {
                        // s_a(b) = p^t g  =>  s_a(b^v) = p^{-t} g^v
                        let (kg, _) = p_primitive(&self.roots[g], p).unwrap();
                        let t = k as i64 - kg as i64;
                        let q = p as i128;
                        let ok = img_v.iter().zip(&self.coroots[g]).all(|(&x, &y)| {
                            if t >= 0 {
                                x as i128 * q.pow(t as u32) == y as i128
                            } else {
                                x as i128 == y as i128 * q.pow((-t) as u32)
                            }
                        });
                        if !ok {
                            bad_y.push(a);
                        }
                    }
                }
                if p_primitive(&img_v, p).and_then(|(_, w)| coroot_keys.get(&w)).is_none() {
                    bad_y.push(a);
                }
            }
        }
        bad_x.dedup();
        bad_y.sort_unstable();
        bad_y.dedup();
        checks.push(AxiomCheck {
            axiom: "(4') s_alpha preserves R".into(),
            passed: bad_x.is_empty(),
            detail: String::new(),
            offending: bad_x,
        });
        checks.push(AxiomCheck {
            axiom: "(4) s_alpha preserves R^v".into(),
            passed: bad_y.is_empty(),
            detail: String::new(),
            offending: bad_y,
        });

        let pos = self.check_positive_system();
        checks.push(AxiomCheck {
            axiom: "positive_system".into(),
            passed: pos.is_ok(),
            detail: pos.err().unwrap_or_default(),
            offending: vec![],
        });

        ValidationReport { checks }
    }

    fn check_positive_system(&self) -> std::result::Result<(), String> {
        let pc = self.positive_count;
        for i in 0..pc {
            let neg: Vector = self.roots[i].iter().map(|x| -x).collect();
            if self.roots[pc + i] != neg {
                return Err(format!("root {} is not the negative of root {i}", pc + i));
            }
        }
        let pos: HashSet<&Vector> = self.roots[..pc].iter().collect();
        let all: HashSet<&Vector> = self.roots.iter().collect();
        for a in &self.roots[..pc] {
            for b in &self.roots[..pc] {
                let s: Vector = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if all.contains(&s) && !pos.contains(&s) {
                    return Err("positive half is not closed under addition".into());
                }
            }
        }
        let simple = self.simple_root_indices();
        if simple.len() != self.semisimple_rank() {
            return Err(format!(
                "{} indecomposable positive roots but semisimple rank {}",
                simple.len(),
                self.semisimple_rank()
            ));
        }
        for (i, c) in self.simple_coordinates_of_positive()?.iter().enumerate() {
            if c.iter().any(|x| !x.is_integer() || x.is_negative()) {
                return Err(format!("positive root {i} is not a nonnegative integral combination of simple roots"));
            }
        }
        Ok(())
    }

    /// Positive roots that are not a sum of two positive roots.
    pub fn simple_root_indices(&self) -> Vec<usize> {
        let pos: HashSet<&Vector> = self.roots[..self.positive_count].iter().collect();
        (0..self.positive_count)
            .filter(|&i| {
                let a = &self.roots[i];
                !self.roots[..self.positive_count].iter().any(|b| {
                    let d: Vector = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    pos.contains(&d)
                })
            })
            .collect()
    }

    fn simple_coordinates_of_positive(&self) -> std::result::Result<Vec<Vec<BigRational>>, String> {
        let simple = self.simple_root_indices();
        if simple.is_empty() {
            return Ok(vec![]);
        }
        // Columns are simple roots; solve via normal equations.
        let a: QMatrix = (0..self.rank)
            .map(|r| simple.iter().map(|&s| BigRational::from_integer(self.roots[s][r].into())).collect())
            .collect();
        let at = transpose(&a);
        let gram_inv = rational_inverse(&rational_matmul(&at, &a)).ok_or("simple roots are dependent")?;
        let solve = rational_matmul(&gram_inv, &at);
        let mut out = Vec::new();
        for v in &self.roots[..self.positive_count] {
            let col: QMatrix = v.iter().map(|&x| vec![BigRational::from_integer(x.into())]).collect();
            let c = rational_matmul(&solve, &col);
            if rational_matmul(&a, &c) != col {
                return Err("positive root outside the span of simple roots".into());
            }
            out.push(c.into_iter().map(|r| r[0].clone()).collect());
        }
        Ok(out)
    }

    /// `C[i][j] = <α_i, α_j^∨>` over the simple roots in [`Self::simple_root_indices`] order.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let s = self.simple_root_indices();
        s.iter().map(|&i| s.iter().map(|&j| self.pair(&self.roots[i], &self.coroots[j])).collect()).collect()
    }

    pub fn semisimple_rank(&self) -> usize {
        let m: QMatrix = self
            .roots
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        rational_rank(&m)
    }

    pub fn torus_rank(&self) -> usize {
        self.rank - self.semisimple_rank()
    }

    /// Swaps `(X, R)` with `(Y, R^∨)` and transposes the pairing.
    pub fn dual(&self) -> RootDatum {
        RootDatum {
            name: self.name.as_ref().map(|n| match n.strip_prefix("dual(").and_then(|m| m.strip_suffix(')')) {
                Some(inner) => inner.to_string(),
                None => format!("dual({n})"),
            }),
            p: self.p,
            rank: self.rank,
            pairing: transpose(&self.pairing),
            roots: self.coroots.clone(),
            coroots: self.roots.clone(),
            positive_count: self.positive_count,
        }
    }

    /// Rescales every root to its `p`-primitive representative (coroots inversely).
    pub fn normalized(&self) -> RootDatum {
        let p = self.p as i64;
        let mut out = self.clone();
        for (r, c) in out.roots.iter_mut().zip(out.coroots.iter_mut()) {
            let (k, w) = p_primitive(r, self.p).expect("nonzero root");
            *r = w;
            let s = p.pow(k);
            for x in c.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    /// Half-sum of positive roots (convenience accessor).
    pub fn rho(&self) -> Vec<BigRational> {
        (0..self.rank)
            .map(|i| {
                let s: i64 = self.roots[..self.positive_count].iter().map(|r| r[i]).sum();
                BigRational::new(s.into(), 2.into())
            })
            .collect()
    }

    /// `<λ, α^∨> >= 0` (or `> 0` when `strict`) for every positive root `α`.
    pub fn is_dominant(&self, lambda: &[LocalizedRational], strict: bool) -> Result<bool> {
        let zp = self.zp();
        for (i, _) in self.positive_roots() {
            let v = self.pair_scalar(&zp, lambda, &self.coroots[i])?;
            let bad = v.is_negative() || (strict && v.is_zero());
            if bad {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same block iff `λ - μ ∈ Z[1/p] R`.
    pub fn block_equivalent(&self, lambda: &[LocalizedRational], mu: &[LocalizedRational]) -> Result<bool> {
        if lambda.len() != self.rank || mu.len() != self.rank {
            return Err(Error::DimensionMismatch(format!("weights must have length {}", self.rank)));
        }
        let zp = self.zp();
        let diff: Vec<LocalizedRational> = lambda.iter().zip(mu).map(|(a, b)| zp.sub(a, b)).collect();
        let span: Vec<Vec<LocalizedRational>> =
            self.roots.iter().map(|r| r.iter().map(|&x| zp.int(x)).collect()).collect();
        in_span_over_zp(&zp, &diff, &span)
    }
}

/// The reflection `λ ↦ λ - φ(λ) κ` on `Z^n`, as a matrix.
pub fn reflection_from_functional(phi: &[i64], kappa: &[i64]) -> Vec<Vec<i64>> {
    let n = phi.len();
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j) - kappa[i] * phi[j]).collect()).collect()
}

pub fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vector {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().enumerate().map(|(k, x)| x * b[k][j]).sum()).collect())
        .collect()
}
