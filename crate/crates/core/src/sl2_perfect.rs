//! Perfected `SL2`: simples, costandard and Weyl-type modules indexed by
//! `N[1/p]`, first extensions, blocks and the weight fractal.
//!
//! Multiplicity questions are reduced to a `p`-primitive integer highest
//! weight by the scaling `[∇(λ):L(μ)] = [∇(p^j λ):L(p^j μ)]` and then answered
//! from the classical decomposition numbers.

use std::fmt::Write as _;

use serde::Serialize;
use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalars::{LocalizedRational, Zp};
use crate::sl2_classical::Sl2Oracle;

pub type PerfWeight = LocalizedRational;

pub const DEFAULT_TRUNCATION: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExtTarget {
    Simple,
    Costandard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorOrigin {
    E0,
    /// `μ = ν - 2/p^i`.
    Einf { nu: PerfWeight, i: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub mu: PerfWeight,
    pub multiplicity: u8,
    pub origin: FactorOrigin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ModuleKind {
    Costandard,
    WeylType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub module: ModuleKind,
    pub lambda: PerfWeight,
    pub factors: Vec<Factor>,
    pub truncation: u32,
    pub tail_continues: bool,
}

impl MultiplicityReport {
    pub fn to_json(&self, zp: &Zp) -> Value {
        let factors: Vec<Value> = self
            .factors
            .iter()
            .map(|f| {
                let origin = match &f.origin {
                    FactorOrigin::E0 => json!({"kind": "E0"}),
                    FactorOrigin::Einf { nu, i } => json!({"kind": "Einf", "nu": zp.format(nu), "i": i}),
                };
                json!({"mu": zp.format(&f.mu), "multiplicity": f.multiplicity, "origin": origin})
            })
            .collect();
        json!({
            "module": self.module,
            "lambda": zp.format(&self.lambda),
            "p": zp.p(),
            "factors": factors,
            "truncation": self.truncation,
            "tail_continues": self.tail_continues,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocleSeries {
    pub lambda: PerfWeight,
    pub certified: bool,
    /// `layers[0]` is the socle; present only when certified.
    pub layers: Vec<Vec<PerfWeight>>,
    /// Unordered composition factors, reported when not certified.
    pub factors: Vec<PerfWeight>,
    pub tail_continues: bool,
}

impl SocleSeries {
    pub fn to_json(&self, zp: &Zp) -> Value {
        let fmt = |v: &Vec<PerfWeight>| v.iter().map(|x| zp.format(x)).collect::<Vec<_>>();
        let mut v = json!({
            "lambda": zp.format(&self.lambda),
            "p": zp.p(),
            "certified": self.certified,
            "tail_continues": self.tail_continues,
        });
        if self.certified {
            v["layers"] = json!(self.layers.iter().map(fmt).collect::<Vec<_>>());
        } else {
            v["flag"] = json!("NotCertified");
            v["factors"] = json!(fmt(&self.factors));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalImage {
    pub p: u64,
    pub max_n: u64,
    pub depth: u32,
    /// Points `(N, W)` in units of `p^{-depth}`: the weight `W/p^depth` of `L(N/p^depth)`.
    pub points: Vec<(u64, i64)>,
}

impl FractalImage {
    fn unit(&self) -> u64 {
        self.p.pow(self.depth)
    }

    pub fn contains(&self, zp: &Zp, n: &PerfWeight, w: &PerfWeight) -> bool {
        let d = self.depth as i64;
        let (Some(nn), Some(ww)) = (scaled_int(zp, n, d), scaled_int(zp, w, d)) else { return false };
        nn >= 0 && self.points.binary_search_by(|&(a, b)| (a as i64, -b).cmp(&(nn, -ww))).is_ok()
    }

    /// Integer points `(n, w)` of the grid.
    pub fn integer_points(&self) -> Vec<(u64, i64)> {
        let u = self.unit();
        self.points
            .iter()
            .filter(|(n, w)| n % u == 0 && w.rem_euclid(u as i64) == 0)
            .map(|&(n, w)| (n / u, w / u as i64))
            .collect()
    }

    fn label(&self, zp: &Zp, v: i64) -> String {
        zp.format(&zp.mul_pow(&zp.int(v), -(self.depth as i64)))
    }

    /// One square per point; `x` is the weight, `y` the highest weight (top row is `n = 0`).
    pub fn to_svg(&self, zp: &Zp) -> String {
        let top = self.max_n * self.unit();
        let width = 2 * top + 1;
        let height = top + 1;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{}" height="{}" data-p="{}" data-depth="{}">"#,
            width * 4,
            height * 4,
            self.p,
            self.depth
        );
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
        for &(n, w) in &self.points {
            let x = w + top as i64;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{n}" width="1" height="1" fill="black" data-n="{}" data-w="{}"/>"#,
                self.label(zp, n as i64),
                self.label(zp, w)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Plain PGM (`P2`): black pixels are points.
    pub fn to_pgm(&self) -> String {
        let top = self.max_n * self.unit();
        let width = 2 * top + 1;
        let height = top + 1;
        let mut grid = vec![vec![255u8; width as usize]; height as usize];
        for &(n, w) in &self.points {
            grid[n as usize][(w + top as i64) as usize] = 0;
        }
        let mut s = format!("P2\n{width} {height}\n255\n");
        for row in grid {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

fn scaled_int(zp: &Zp, x: &LocalizedRational, k: i64) -> Option<i64> {
    let y = zp.mul_pow(x, k);
    y.as_integer().and_then(|n| i64::try_from(n).ok())
}

fn digits_u64(mut n: u64, p: u64) -> Vec<u64> {
    let mut d = Vec::new();
    while n > 0 {
        d.push(n % p);
        n /= p;
    }
    d
}

/// Engine for one prime, backed by a memoized classical oracle.
#[derive(Debug)]
pub struct PerfectSl2 {
    zp: Zp,
    oracle: Sl2Oracle,
}

/// `λ = p^{-j} λ'` with `λ'` a `p`-primitive positive integer.
struct Primitive {
    lambda: u64,
    j: i64,
}

impl PerfectSl2 {
    pub fn new(p: u64) -> Result<Self> {
        Ok(PerfectSl2 { zp: Zp::new(p)?, oracle: Sl2Oracle::new(p)? })
    }

    pub fn zp(&self) -> &Zp {
        &self.zp
    }

    pub fn oracle(&self) -> &Sl2Oracle {
        &self.oracle
    }

    fn p(&self) -> u64 {
        self.zp.p()
    }

    fn primitive(&self, lambda: &PerfWeight) -> Result<Primitive> {
        let v = self.zp.valuation(lambda).ok_or_else(|| Error::NotStrictlyDominant("0".into()))?;
        let l = self.zp.mul_pow(lambda, -v);
        let n = l
            .as_integer()
            .and_then(|n| u64::try_from(n).ok())
            .ok_or_else(|| Error::NotStrictlyDominant(self.zp.format(lambda)))?;
        Ok(Primitive { lambda: n, j: -v })
    }

    fn unscale(&self, x: &PerfWeight, j: i64) -> PerfWeight {
        self.zp.mul_pow(x, -j)
    }

    /// Simple-module weight multiplicity `dim L(n)_w ∈ {0, 1}`.
    pub fn simple_weight_dim(&self, n: &PerfWeight, w: &PerfWeight) -> u8 {
        if n.is_negative() {
            return 0;
        }
        let zp = &self.zp;
        let diff = zp.to_rational(&zp.sub(n, w));
        let Ok(j) = zp.from_rational(&(diff / num_rational::BigRational::from_integer(2.into()))) else {
            return 0;
        };
        if j.is_negative() || zp.cmp(&j, n).is_gt() {
            return 0;
        }
        u8::from(zp.lucas_digit(n, &j) != 0)
    }

    /// All weights of `L(n)`, descending.
    pub fn weights(&self, n: &PerfWeight) -> Result<Vec<PerfWeight>> {
        let zp = &self.zp;
        let d = zp.to_digits(n)?;
        let mut ws = vec![LocalizedRational::zero()];
        for (i, ni) in d.iter() {
            let mut next = Vec::with_capacity(ws.len() * (ni as usize + 1));
            for w in &ws {
                for t in 0..=ni {
                    let step = zp.mul_pow(&zp.int(ni as i64 - 2 * t as i64), i);
                    next.push(zp.add(w, &step));
                }
            }
            ws = next;
        }
        ws.sort_by(|a, b| zp.cmp(b, a));
        Ok(ws)
    }

    pub fn fractal(&self, max_n: u64, depth: u32) -> FractalImage {
        let p = self.p();
        let top = max_n * p.pow(depth);
        let mut points = Vec::new();
        for n in 0..=top {
            let nd = digits_u64(n, p);
            // All J digit-wise below N, i.e. binom(N, J) ≢ 0 mod p.
            let mut js = vec![0u64];
            let mut scale = 1u64;
            for &d in &nd {
                js = js.iter().flat_map(|&j| (0..=d).map(move |t| j + t * scale)).collect();
                scale *= p;
            }
            let mut ws: Vec<i64> = js.iter().map(|&j| n as i64 - 2 * j as i64).collect();
            ws.sort_unstable_by(|a, b| b.cmp(a));
            points.extend(ws.into_iter().map(|w| (n, w)));
        }
        FractalImage { p, max_n, depth, points }
    }

    pub fn ext1(&self, lambda: &PerfWeight, mu: &PerfWeight, target: ExtTarget) -> u8 {
        if lambda.is_negative() || mu.is_negative() {
            return 0;
        }
        let zp = &self.zp;
        let (Ok(ld), Ok(md)) = (zp.to_digits(lambda), zp.to_digits(mu)) else { return 0 };
        let supports: Vec<(i64, i64)> = [ld.support(), md.support()].into_iter().flatten().collect();
        let Some(lo) = supports.iter().map(|s| s.0).min() else { return 0 };
        let hi = supports.iter().map(|s| s.1).max().expect("nonempty");
        let p = self.p();
        for i in lo - 1..=hi + 1 {
            if ld.digit(i) + md.digit(i) != p - 2 {
                continue;
            }
            let hit = match target {
                ExtTarget::Costandard => {
                    // λ - p^i λ_i = μ - p^i μ_i + p^{i+1}
                    let lhs = zp.sub(lambda, &zp.mul_pow(&zp.int(ld.digit(i)), i));
                    let rhs = zp.add(&zp.sub(mu, &zp.mul_pow(&zp.int(md.digit(i)), i)), &zp.mul_pow(&zp.one(), i + 1));
                    lhs == rhs
                }
                ExtTarget::Simple => {
                    ld.digit(i + 1).abs_diff(md.digit(i + 1)) == 1
                        && (lo - 1..=hi + 1).filter(|&k| k != i && k != i + 1).all(|k| ld.digit(k) == md.digit(k))
                }
            };
            if hit {
                return 1;
            }
        }
        0
    }

    /// Tail contributions `μ' = ν - 2/p^i`, `ν ∈ E^∞(λ')`, for integral `λ' >= 1`.
    fn tail_count(&self, lambda: u64, mu: &PerfWeight) -> u8 {
        let zp = &self.zp;
        let mut count = 0;
        for i in 1..=mu.pexp() as i64 + 1 {
            let nu = zp.add(mu, &zp.mul_pow(&zp.int(2), -i));
            let Some(nu) = nu.as_integer().and_then(|n| u64::try_from(n).ok()) else { continue };
            if nu >= 1 && nu <= lambda && self.oracle.multiplicity(lambda - 1, nu - 1) != 0 {
                count += 1;
            }
        }
        count
    }

    fn integral(x: &PerfWeight) -> Option<u64> {
        x.as_integer().and_then(|n| u64::try_from(n).ok())
    }

    pub fn costandard_multiplicity(&self, lambda: &PerfWeight, mu: &PerfWeight) -> u8 {
        if lambda.is_negative() || mu.is_negative() {
            return 0;
        }
        if lambda.is_zero() {
            return u8::from(mu.is_zero());
        }
        let prim = self.primitive(lambda).expect("positive weight");
        let m = self.zp.mul_pow(mu, prim.j);
        let e0 = Self::integral(&m).is_some_and(|m| self.oracle.multiplicity(prim.lambda, m) != 0);
        u8::from(e0) + self.tail_count(prim.lambda, &m)
    }

    pub fn weyl_type_multiplicity(&self, lambda: &PerfWeight, mu: &PerfWeight) -> Result<u8> {
        if lambda.is_negative() || lambda.is_zero() {
            return Err(Error::NotStrictlyDominant(self.zp.format(lambda)));
        }
        if mu.is_negative() {
            return Ok(0);
        }
        let prim = self.primitive(lambda)?;
        let m = self.zp.mul_pow(mu, prim.j);
        let e0 = prim.lambda >= 2
            && Self::integral(&m).is_some_and(|m| self.oracle.multiplicity(prim.lambda - 2, m) != 0);
        Ok(u8::from(e0) + self.tail_count(prim.lambda, &m))
    }

    fn report(&self, lambda: &PerfWeight, kind: ModuleKind, truncation: u32) -> Result<MultiplicityReport> {
        let zp = &self.zp;
        if lambda.is_negative() {
            return Err(Error::NegativeValue(zp.format(lambda)));
        }
        if lambda.is_zero() {
            if kind == ModuleKind::WeylType {
                return Err(Error::NotStrictlyDominant("0".into()));
            }
            let f = Factor { mu: LocalizedRational::zero(), multiplicity: 1, origin: FactorOrigin::E0 };
            return Ok(MultiplicityReport { module: kind, lambda: lambda.clone(), factors: vec![f], truncation, tail_continues: false });
        }
        let prim = self.primitive(lambda)?;
        let l = prim.lambda;
        let e0_row = match kind {
            ModuleKind::Costandard => Some(self.oracle.row(l)),
            ModuleKind::WeylType if l >= 2 => Some(self.oracle.row(l - 2)),
            ModuleKind::WeylType => None,
        };
        let mut factors = Vec::new();
        for &(mu, m) in e0_row.iter().flat_map(|r| r.iter()) {
            factors.push(Factor { mu: self.unscale(&zp.int(mu), prim.j), multiplicity: m as u8, origin: FactorOrigin::E0 });
        }
        let einf: Vec<u64> = self.oracle.row(l - 1).iter().map(|&(nu, _)| nu + 1).collect();
        for i in 1..=truncation {
            for &nu in &einf {
                let mu = zp.sub(&zp.int(nu), &zp.mul_pow(&zp.int(2), -(i as i64)));
                factors.push(Factor {
                    mu: self.unscale(&mu, prim.j),
                    multiplicity: 1,
                    origin: FactorOrigin::Einf { nu: self.unscale(&zp.int(nu), prim.j), i },
                });
            }
        }
        Ok(MultiplicityReport { module: kind, lambda: lambda.clone(), factors, truncation, tail_continues: !einf.is_empty() })
    }

    /// Composition factors of `∇(λ)`, tails listed for `1 <= i <= truncation`.
    pub fn costandard_factors(&self, lambda: &PerfWeight, truncation: u32) -> Result<MultiplicityReport> {
        self.report(lambda, ModuleKind::Costandard, truncation)
    }

    pub fn weyl_type_factors(&self, lambda: &PerfWeight, truncation: u32) -> Result<MultiplicityReport> {
        self.report(lambda, ModuleKind::WeylType, truncation)
    }

    /// Socle layers `0..=depth` for `0 < λ' < p` and `λ' = 2p - 1`; otherwise a factor list.
    pub fn socle_series(&self, lambda: &PerfWeight, depth: u32) -> Result<SocleSeries> {
        let zp = &self.zp;
        let p = self.p();
        if lambda.is_negative() || lambda.is_zero() {
            let rep = self.costandard_factors(lambda, depth)?;
            return Ok(SocleSeries {
                lambda: lambda.clone(),
                certified: lambda.is_zero(),
                layers: if lambda.is_zero() { vec![vec![LocalizedRational::zero()]] } else { vec![] },
                factors: rep.factors.into_iter().map(|f| f.mu).collect(),
                tail_continues: false,
            });
        }
        let prim = self.primitive(lambda)?;
        let l = prim.lambda;
        let shifted = |base: u64, i: u32| self.unscale(&zp.sub(&zp.int(base), &zp.mul_pow(&zp.int(2), -(i as i64))), prim.j);
        let layers = if l < p {
            let mut layers = vec![vec![self.unscale(&zp.int(l), prim.j)]];
            layers.extend((1..=depth).map(|i| vec![shifted(l, i)]));
            Some(layers)
        } else if l == 2 * p - 1 {
            let mut layers = vec![vec![self.unscale(&zp.int(l), prim.j)]];
            if depth >= 1 {
                layers.push(vec![shifted(l, 1)]);
            }
            layers.extend((1..depth).map(|i| vec![shifted(l, i + 1), shifted(1, i)]));
            Some(layers)
        } else {
            None
        };
        Ok(match layers {
            Some(layers) => SocleSeries { lambda: lambda.clone(), certified: true, layers, factors: vec![], tail_continues: true },
            None => {
                let rep = self.costandard_factors(lambda, depth)?;
                SocleSeries {
                    lambda: lambda.clone(),
                    certified: false,
                    layers: vec![],
                    factors: rep.factors.into_iter().map(|f| f.mu).collect(),
                    tail_continues: rep.tail_continues,
                }
            }
        })
    }

    /// Checks `[∇(λ)] - [W(λ)] = [Δ(λ)] - [Δ(λ-2)]` factor by factor: over integers
    /// `0 <= μ <= λ` and over all tail factors of either side up to depth `window`.
    pub fn grothendieck_identity_check(&self, lambda: u64, window: u32) -> Result<bool> {
        if lambda == 0 {
            return Err(Error::NotStrictlyDominant("0".into()));
        }
        let zp = &self.zp;
        let lam = zp.int(lambda);
        let delta = |l: i64, mu: u64| -> i64 {
            if l < 0 {
                0
            } else {
                self.oracle.multiplicity(l as u64, mu) as i64
            }
        };
        for mu in 0..=lambda {
            let m = zp.int(mu);
            let lhs = self.costandard_multiplicity(&lam, &m) as i64 - self.weyl_type_multiplicity(&lam, &m)? as i64;
            let rhs = delta(lambda as i64, mu) - delta(lambda as i64 - 2, mu);
            if lhs != rhs {
                return Ok(false);
            }
        }
        let mut tails: Vec<PerfWeight> = self.costandard_factors(&lam, window)?.factors.into_iter().map(|f| f.mu).collect();
        tails.extend(self.weyl_type_factors(&lam, window)?.factors.into_iter().map(|f| f.mu));
        for mu in tails.iter().filter(|m| !m.is_integer()) {
            if self.costandard_multiplicity(&lam, mu) != self.weyl_type_multiplicity(&lam, mu)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Class of `λ` in `Z[1/p] / 2Z[1/p]`: `"even"`/`"odd"` for odd `p`, a single class for `p = 2`.
    pub fn block_label(&self, lambda: &PerfWeight) -> &'static str {
        if self.p() == 2 {
            return "all";
        }
        let odd = lambda.num().is_odd();
        if odd {
            "odd"
        } else {
            "even"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(e: &PerfectSl2, s: &str) -> PerfWeight {
        e.zp().parse(s).unwrap()
    }

    fn fmt_all(e: &PerfectSl2, v: &[PerfWeight]) -> Vec<String> {
        v.iter().map(|x| e.zp().format(x)).collect()
    }

    #[test]
    fn weights_of_simples() {
        let e = PerfectSl2::new(3).unwrap();
        assert_eq!(fmt_all(&e, &e.weights(&w(&e, "1")).unwrap()), ["1", "-1"]);
        assert_eq!(fmt_all(&e, &e.weights(&w(&e, "1/3")).unwrap()), ["1/3", "-1/3"]);
        assert_eq!(fmt_all(&e, &e.weights(&w(&e, "4")).unwrap()), ["4", "2", "-2", "-4"]);
        assert_eq!(e.simple_weight_dim(&w(&e, "4"), &w(&e, "0")), 0);
        assert_eq!(e.simple_weight_dim(&w(&e, "4"), &w(&e, "2")), 1);
        assert_eq!(e.simple_weight_dim(&w(&e, "1/3"), &w(&e, "-1/3")), 1);
        assert_eq!(e.simple_weight_dim(&w(&e, "1"), &w(&e, "0")), 0);
    }

    #[test]
    fn fractal_examples() {
        let e = PerfectSl2::new(3).unwrap();
        let f = e.fractal(2, 0);
        assert_eq!(f.points, vec![(0, 0), (1, 1), (1, -1), (2, 2), (2, 0), (2, -2)]);
        let f = e.fractal(3, 1);
        let z = e.zp();
        assert!(f.contains(z, &w(&e, "1"), &w(&e, "-1")));
        assert!(f.contains(z, &w(&e, "3"), &w(&e, "-3")));
        assert!(f.contains(z, &w(&e, "1/3"), &w(&e, "1/3")));
        assert!(!f.contains(z, &w(&e, "3"), &w(&e, "1")));
        let e2 = PerfectSl2::new(2).unwrap();
        let f = e2.fractal(3, 0);
        assert_eq!(f.points, vec![(0, 0), (1, 1), (1, -1), (2, 2), (2, -2), (3, 3), (3, 1), (3, -1), (3, -3)]);
    }

    #[test]
    fn ext_examples() {
        let e = PerfectSl2::new(3).unwrap();
        assert_eq!(e.ext1(&w(&e, "0"), &w(&e, "4"), ExtTarget::Simple), 1);
        assert_eq!(e.ext1(&w(&e, "4"), &w(&e, "0"), ExtTarget::Costandard), 1);
        for p in [2, 3, 5] {
            let e = PerfectSl2::new(p).unwrap();
            for s in ["0", "1", "7", "5/9", "13/4"] {
                if let Ok(x) = e.zp().parse(s) {
                    assert_eq!(e.ext1(&x, &x, ExtTarget::Simple), 0);
                }
            }
        }
    }

    #[test]
    fn costandard_examples() {
        for p in [2, 3, 5] {
            let e = PerfectSl2::new(p).unwrap();
            let one = w(&e, "1");
            assert_eq!(e.costandard_multiplicity(&one, &one), 1);
            for i in 1..=4 {
                let mu = e.zp().sub(&one, &e.zp().mul_pow(&e.zp().int(2), -i));
                assert_eq!(e.costandard_multiplicity(&one, &mu), 1);
            }
        }
        for p in [3, 5] {
            let e = PerfectSl2::new(p).unwrap();
            assert_eq!(e.costandard_multiplicity(&w(&e, "1"), &w(&e, "0")), 0);
        }
        // At p = 2 the weight 0 = 1 - 2/2 is the first tail factor of ∇(1).
        let e2 = PerfectSl2::new(2).unwrap();
        assert_eq!(e2.costandard_multiplicity(&w(&e2, "1"), &w(&e2, "0")), 1);
        let e = PerfectSl2::new(3).unwrap();
        // ∇(5) is simple classically at p = 3, so L(3) does not occur.
        assert_eq!(e.costandard_multiplicity(&w(&e, "5"), &w(&e, "3")), 0);
        assert_eq!(e.costandard_multiplicity(&w(&e, "3"), &w(&e, "1")), 1);
        assert_eq!(e.costandard_multiplicity(&w(&e, "0"), &w(&e, "0")), 1);
    }

    #[test]
    fn weyl_type_examples() {
        for p in [2, 3, 5] {
            let e = PerfectSl2::new(p).unwrap();
            let rep = e.weyl_type_factors(&w(&e, "1"), 4).unwrap();
            let expect: Vec<String> = (1..=4).map(|i| e.zp().format(&e.zp().sub(&e.zp().one(), &e.zp().mul_pow(&e.zp().int(2), -i)))).collect();
            assert_eq!(fmt_all(&e, &rep.factors.iter().map(|f| f.mu.clone()).collect::<Vec<_>>()), expect);
            for l in 1..p {
                let lam = e.zp().int(l);
                assert_eq!(e.weyl_type_multiplicity(&lam, &lam).unwrap(), 0);
            }
            assert!(matches!(e.weyl_type_multiplicity(&w(&e, "0"), &w(&e, "0")), Err(Error::NotStrictlyDominant(_))));
        }
        let e = PerfectSl2::new(3).unwrap();
        assert_eq!(e.weyl_type_multiplicity(&w(&e, "5"), &w(&e, "3")).unwrap(), 1);
    }

    #[test]
    fn socle_examples() {
        let e = PerfectSl2::new(3).unwrap();
        let s = e.socle_series(&w(&e, "2"), 2).unwrap();
        assert!(s.certified);
        let layers: Vec<Vec<String>> = s.layers.iter().map(|l| fmt_all(&e, l)).collect();
        assert_eq!(layers, vec![vec!["2"], vec!["4/3"], vec!["16/9"]]);
        let s = e.socle_series(&w(&e, "5"), 3).unwrap();
        let layers: Vec<Vec<String>> = s.layers.iter().map(|l| fmt_all(&e, l)).collect();
        assert_eq!(layers, vec![vec!["5"], vec!["13/3"], vec!["43/9", "1/3"], vec!["133/27", "7/9"]]);
        let s = e.socle_series(&w(&e, "7"), 3).unwrap();
        assert!(!s.certified);
        assert!(!s.factors.is_empty());
    }

    #[test]
    fn grothendieck_examples() {
        for (p, l) in [(3, 2), (3, 5), (2, 3)] {
            let e = PerfectSl2::new(p).unwrap();
            assert!(e.grothendieck_identity_check(l, 4).unwrap());
        }
    }

    #[test]
    fn blocks() {
        let e = PerfectSl2::new(3).unwrap();
        assert_eq!(e.block_label(&w(&e, "1")), e.block_label(&w(&e, "1/3")));
        assert_ne!(e.block_label(&w(&e, "1")), e.block_label(&w(&e, "2")));
        assert_eq!(e.block_label(&w(&e, "-1")), "odd");
        let e2 = PerfectSl2::new(2).unwrap();
        assert_eq!(e2.block_label(&w(&e2, "1")), e2.block_label(&w(&e2, "2")));
    }

    #[test]
    fn reports_serialize() {
        let e = PerfectSl2::new(3).unwrap();
        let v = e.costandard_factors(&w(&e, "5"), 2).unwrap().to_json(e.zp());
        assert_eq!(v["factors"][0]["mu"], "5");
        assert_eq!(v["factors"][0]["origin"]["kind"], "E0");
        assert_eq!(v["tail_continues"], true);
    }
}
