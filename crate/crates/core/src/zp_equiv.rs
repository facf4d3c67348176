//! Isomorphism and isogeny of root data over `Z[1/p]`.
//!
//! Maps `φ: X1 -> X2` are rational matrices acting on column vectors; a map
//! is admissible only when every entry lies in `Z[1/p]`. The dual map is
//! `φ^∨ = P1^{-1} φ^T P2: Y2 -> Y1`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{
    int_to_rational, integer_kernel_basis, rational_det, rational_inverse, rational_matmul, rational_rank,
    smith_normal_form, transpose, IntMatrix, LatticeMap, QMatrix,
};
use crate::rootdata::{classify_cartan, dynkin_type, p_primitive, DynkinKind, RootDatum, Vector};
use crate::scalars::Zp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    pub coeff_bound: i64,
    pub exp_bound: i64,
    pub node_budget: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { coeff_bound: 8, exp_bound: 2, node_budget: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IsoStatus {
    Isomorphic,
    NotIsomorphic,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub invariant: String,
    pub lhs: Value,
    pub rhs: Value,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BudgetSpent {
    pub nodes: u64,
    pub matchings: u64,
    pub candidates: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoVerdict {
    pub status: IsoStatus,
    pub witness: Option<LatticeMap>,
    pub certificate: Option<Certificate>,
    pub budget_spent: BudgetSpent,
}

impl IsoVerdict {
    pub fn to_json(&self, zp: &Zp) -> Value {
        let mut v = json!({
            "status": self.status,
            "budget_spent": self.budget_spent,
        });
        if let Some(w) = &self.witness {
            v["witness"] = json!(w.format(zp));
        }
        if let Some(c) = &self.certificate {
            v["certificate"] = json!(c);
        }
        v
    }
}

/// Result of checking a candidate map root by root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapCheck {
    pub valid: bool,
    pub reasons: Vec<String>,
    /// `φ(α_i) = p^{exponents[i]} β_{root_bijection[i]}`; empty when the root condition fails.
    pub root_bijection: Vec<usize>,
    pub exponents: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyWitness {
    pub phi: LatticeMap,
    pub root_bijection: Vec<usize>,
    pub steinberg_shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyReport {
    pub valid: bool,
    pub reasons: Vec<String>,
    pub witness: Option<IsogenyWitness>,
}

impl IsogenyReport {
    pub fn to_json(&self, zp: &Zp) -> Value {
        let mut v = json!({ "valid": self.valid, "reasons": self.reasons });
        if let Some(w) = &self.witness {
            v["witness"] = json!({
                "phi": w.phi.format(zp),
                "root_bijection": w.root_bijection,
                "steinberg_shift": w.steinberg_shift,
            });
        }
        v
    }
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qvec(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| q(x)).collect()
}

fn qmat(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|r| qvec(r)).collect()
}

fn mat_vec(m: &QMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)).collect()
}

fn p_power_exponent(n: &BigInt, p: u64) -> Option<u32> {
    // n = p^k exactly?
    let mut n = n.abs();
    let p = BigInt::from(p);
    let mut k = 0;
    while n > BigInt::one() {
        let (d, r) = n.div_rem(&p);
        if !r.is_zero() {
            return None;
        }
        n = d;
        k += 1;
    }
    (n == BigInt::one()).then_some(k)
}

/// Is every entry in `Z[1/p]`?
pub fn entries_in_ring(m: &QMatrix, p: u64) -> bool {
    m.iter().flatten().all(|x| p_power_exponent(x.denom(), p).is_some())
}

fn unit_det(m: &QMatrix, p: u64) -> bool {
    let d = rational_det(m);
    !d.is_zero() && p_power_exponent(d.numer(), p).is_some() && p_power_exponent(d.denom(), p).is_some()
}

struct OrbitIndex {
    p: u64,
    keys: HashMap<Vector, (usize, u32)>,
}

impl OrbitIndex {
    fn new(vs: &[Vector], p: u64) -> Self {
        let keys = vs
            .iter()
            .enumerate()
            .filter_map(|(i, v)| p_primitive(v, p).map(|(k, w)| (w, (i, k))))
            .collect();
        OrbitIndex { p, keys }
    }

    /// `v = p^k · listed[i]` for a vector with entries in `Z[1/p]`.
    fn locate(&self, v: &[BigRational]) -> Option<(usize, i64)> {
        let mut e = 0u32;
        for x in v {
            e = e.max(p_power_exponent(x.denom(), self.p)?);
        }
        let scale = BigInt::from(self.p).pow(e);
        let w: Vec<i64> = v.iter().map(|x| (x.numer() * &scale / x.denom()).to_i64()).collect::<Option<_>>()?;
        let (kw, prim) = p_primitive(&w, self.p)?;
        let &(i, ki) = self.keys.get(&prim)?;
        Some((i, kw as i64 - e as i64 - ki as i64))
    }
}

fn dual_of(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> QMatrix {
    let p1_inv = rational_inverse(&qmat(rd1.pairing())).expect("perfect pairing");
    rational_matmul(&rational_matmul(&p1_inv, &transpose(phi)), &qmat(rd2.pairing()))
}

fn p_pow_q(p: u64, k: i64) -> BigRational {
    let b = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// Root bijection and coroot compatibility, shared by the isomorphism and isogeny checks.
fn check_roots(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix, reasons: &mut Vec<String>) -> (Vec<usize>, Vec<i64>) {
    let p = rd1.p();
    let targets = OrbitIndex::new(rd2.roots(), p);
    let mut bij = Vec::with_capacity(rd1.num_roots());
    let mut exps = Vec::with_capacity(rd1.num_roots());
    for (i, a) in rd1.roots().iter().enumerate() {
        match targets.locate(&mat_vec(phi, &qvec(a))) {
            Some((j, k)) => {
                bij.push(j);
                exps.push(k);
            }
            None => {
                reasons.push(format!("image of root {i} is not in a root orbit"));
                return (vec![], vec![]);
            }
        }
    }
    let mut hit = vec![false; rd2.num_roots()];
    for &j in &bij {
        hit[j] = true;
    }
    if rd1.num_roots() != rd2.num_roots() || hit.iter().any(|h| !h) || {
        let mut s = bij.clone();
        s.sort_unstable();
        s.dedup();
        s.len() != bij.len()
    } {
        reasons.push("roots do not map bijectively onto root orbits".into());
        return (vec![], vec![]);
    }
    let dual = dual_of(rd1, rd2, phi);
    for (i, (&j, &k)) in bij.iter().zip(&exps).enumerate() {
        // φ(α) = p^k β  =>  φ^∨(β^∨) = p^k α^∨
        let lhs = mat_vec(&dual, &qvec(&rd2.coroots()[j]));
        let s = p_pow_q(p, k);
        let rhs: Vec<BigRational> = rd1.coroots()[i].iter().map(|&x| &s * q(x)).collect();
        if lhs != rhs {
            reasons.push(format!("coroot condition fails at root {i}"));
            return (bij, exps);
        }
    }
    (bij, exps)
}

fn check_shape(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> Result<()> {
    if rd1.p() != rd2.p() {
        return Err(Error::PrimeMismatch(rd1.p(), rd2.p()));
    }
    if phi.len() != rd2.rank() || phi.iter().any(|r| r.len() != rd1.rank()) {
        return Err(Error::DimensionMismatch(format!(
            "map must be {}x{} (rank of target by rank of source)",
            rd2.rank(),
            rd1.rank()
        )));
    }
    Ok(())
}

/// Full report for `φ` as a candidate isomorphism `rd1 -> rd2`.
pub fn check_isomorphism_detailed(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> Result<MapCheck> {
    check_shape(rd1, rd2, phi)?;
    let p = rd1.p();
    let mut reasons = Vec::new();
    if !entries_in_ring(phi, p) {
        reasons.push(format!("entry not in Z[1/{p}]"));
    } else if rd1.rank() != rd2.rank() || !unit_det(phi, p) {
        reasons.push(format!("determinant is not a unit of Z[1/{p}]"));
    }
    if !reasons.is_empty() {
        return Ok(MapCheck { valid: false, reasons, root_bijection: vec![], exponents: vec![] });
    }
    let (bij, exps) = check_roots(rd1, rd2, phi, &mut reasons);
    Ok(MapCheck { valid: reasons.is_empty(), reasons, root_bijection: bij, exponents: exps })
}

pub fn check_isomorphism(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> Result<bool> {
    Ok(check_isomorphism_detailed(rd1, rd2, phi)?.valid)
}

/// `φ = p^{-l} θ` with `θ` integral and not divisible by `p`.
pub fn steinberg_normalize(zp: &Zp, phi: &LatticeMap) -> (LatticeMap, i64) {
    let entries: Vec<_> = phi.matrix().iter().flatten().filter(|x| !x.is_zero()).collect();
    if entries.is_empty() {
        return (phi.clone(), 0);
    }
    let l = entries.iter().map(|x| -zp.valuation(x).expect("nonzero")).max().expect("nonempty");
    let theta: Vec<Vec<_>> = phi.matrix().iter().map(|r| r.iter().map(|x| zp.mul_pow(x, l)).collect()).collect();
    let theta = LatticeMap::over_zp(theta).expect("rectangular");
    let theta = LatticeMap::from_rational(zp, &theta.to_rational(zp)).expect("integral");
    (theta, l)
}

pub fn check_isogeny(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> Result<IsogenyReport> {
    check_shape(rd1, rd2, phi)?;
    let p = rd1.p();
    let mut reasons = Vec::new();
    if !entries_in_ring(phi, p) {
        reasons.push(format!("entry not in Z[1/{p}]"));
        return Ok(IsogenyReport { valid: false, reasons, witness: None });
    }
    let r = rational_rank(phi);
    if r != rd1.rank() {
        reasons.push("map is not injective".into());
    }
    if r != rd2.rank() {
        reasons.push("dual map is not injective".into());
    }
    if !reasons.is_empty() {
        return Ok(IsogenyReport { valid: false, reasons, witness: None });
    }
    let (bij, _) = check_roots(rd1, rd2, phi, &mut reasons);
    if !reasons.is_empty() {
        return Ok(IsogenyReport { valid: false, reasons, witness: None });
    }
    let zp = rd1.zp();
    let lm = LatticeMap::from_rational(&zp, phi)?;
    let (_, l) = steinberg_normalize(&zp, &lm);
    Ok(IsogenyReport { valid: true, reasons, witness: Some(IsogenyWitness { phi: lm, root_bijection: bij, steinberg_shift: l }) })
}

/// Free rank of `Z^n / span(vs)` and its invariant factors with the `p`-part removed (those > 1).
pub fn quotient_invariants(vs: &[Vector], rank: usize, p: u64) -> (usize, Vec<BigInt>) {
    if vs.is_empty() {
        return (rank, vec![]);
    }
    let a: IntMatrix = (0..rank).map(|i| vs.iter().map(|v| BigInt::from(v[i])).collect()).collect();
    let snf = smith_normal_form(&a);
    let r = snf.rank();
    let pb = BigInt::from(p);
    let mut factors = Vec::new();
    for d in &snf.diag[..r] {
        let mut d = d.abs();
        while d.is_multiple_of(&pb) {
            d /= &pb;
        }
        if d > BigInt::one() {
            factors.push(d);
        }
    }
    (rank - r, factors)
}

fn type_labels_mod_p(rd: &RootDatum) -> Result<Vec<String>> {
    let t = dynkin_type(rd)?;
    let mut labels: Vec<String> = t
        .components
        .iter()
        .map(|c| {
            if rd.p() == 2 && c.kind == DynkinKind::C {
                format!("B{}", c.rank)
            } else {
                c.label()
            }
        })
        .collect();
    labels.sort();
    Ok(labels)
}

/// The invariant battery; the first mismatch is returned.
pub fn invariant_mismatch(rd1: &RootDatum, rd2: &RootDatum) -> Result<Option<Certificate>> {
    let p = rd1.p();
    let cert = |name: &str, a: Value, b: Value| Some(Certificate { invariant: name.into(), lhs: a, rhs: b });
    if rd1.rank() != rd2.rank() {
        return Ok(cert("rank", json!(rd1.rank()), json!(rd2.rank())));
    }
    if rd1.torus_rank() != rd2.torus_rank() {
        return Ok(cert("torus_rank", json!(rd1.torus_rank()), json!(rd2.torus_rank())));
    }
    if rd1.num_roots() != rd2.num_roots() {
        return Ok(cert("root_count", json!(rd1.num_roots()), json!(rd2.num_roots())));
    }
    let (t1, t2) = (dynkin_type(rd1)?, dynkin_type(rd2)?);
    if t1.weyl_order() != t2.weyl_order() {
        return Ok(cert("weyl_order", json!(t1.weyl_order().to_string()), json!(t2.weyl_order().to_string())));
    }
    let (l1, l2) = (type_labels_mod_p(rd1)?, type_labels_mod_p(rd2)?);
    if l1 != l2 {
        return Ok(cert("dynkin_type_mod_p", json!(l1), json!(l2)));
    }
    let show = |(f, ds): (usize, Vec<BigInt>)| json!({"free_rank": f, "torsion": ds.iter().map(|d| d.to_string()).collect::<Vec<_>>()});
    let x1 = quotient_invariants(rd1.roots(), rd1.rank(), p);
    let x2 = quotient_invariants(rd2.roots(), rd2.rank(), p);
    if x1 != x2 {
        return Ok(cert("X/ZR prime-to-p invariant factors", show(x1), show(x2)));
    }
    let y1 = quotient_invariants(rd1.coroots(), rd1.rank(), p);
    let y2 = quotient_invariants(rd2.coroots(), rd2.rank(), p);
    if y1 != y2 {
        return Ok(cert("Y/ZR^v prime-to-p invariant factors", show(y1), show(y2)));
    }
    Ok(None)
}

struct Search<'a> {
    p: u64,
    budget: SearchBudget,
    spent: BudgetSpent,
    rd1: &'a RootDatum,
    rd2: &'a RootDatum,
    n2: RootDatum,
    s1: Vec<usize>,
    s2: Vec<usize>,
    c1: Vec<Vec<i64>>,
    c2: Vec<Vec<i64>>,
    /// Component index of each simple root of `n1`.
    comp1: Vec<usize>,
    ncomp: usize,
    /// Breadth-first order of the simple roots of `n1`, component by component.
    order: Vec<usize>,
    z1: Vec<Vector>,
    z2: Vec<Vector>,
    b1_inv: QMatrix,
}

enum Outcome {
    Found(QMatrix),
    Exhausted,
    OutOfBudget,
}

fn log_p_ratio(a: i64, b: i64, p: u64) -> Option<i64> {
    // b = p^d a with d in {-1, 0, 1}; a ratio of p is only possible for p <= 3.
    if a == b {
        return Some(0);
    }
    let p = p as i64;
    if p <= 3 {
        if b == p * a {
            return Some(1);
        }
        if a == p * b {
            return Some(-1);
        }
    }
    None
}

fn kernel_of_coroots(rd: &RootDatum, simple: &[usize]) -> Vec<Vector> {
    let n = rd.rank();
    let a: IntMatrix = simple
        .iter()
        .map(|&s| {
            let c = &rd.coroots()[s];
            (0..n).map(|i| BigInt::from((0..n).map(|j| rd.pairing()[i][j] * c[j]).sum::<i64>())).collect()
        })
        .collect();
    integer_kernel_basis(&a, n)
        .into_iter()
        .map(|v| v.iter().map(|x| x.to_i64().expect("small kernel entries")).collect())
        .collect()
}

impl<'a> Search<'a> {
    fn new(rd1: &'a RootDatum, rd2: &'a RootDatum, budget: SearchBudget) -> Result<Self> {
        let n1 = rd1.normalized();
        let n2 = rd2.normalized();
        let s1 = n1.simple_root_indices();
        let s2 = n2.simple_root_indices();
        let c1 = n1.cartan_matrix();
        let c2 = n2.cartan_matrix();
        let comps = classify_cartan(&c1)?;
        let mut comp1 = vec![0; s1.len()];
        let mut order = Vec::with_capacity(s1.len());
        for (ci, c) in comps.iter().enumerate() {
            for &node in &c.nodes {
                comp1[node] = ci;
            }
            let start = order.len();
            order.push(c.nodes[0]);
            let mut head = start;
            while head < order.len() {
                let a = order[head];
                head += 1;
                for &b in &c.nodes {
                    if c1[a][b] != 0 && !order[start..].contains(&b) {
                        order.push(b);
                    }
                }
            }
        }
        let z1 = kernel_of_coroots(&n1, &s1);
        let z2 = kernel_of_coroots(&n2, &s2);
        let mut cols: Vec<Vector> = s1.iter().map(|&i| n1.roots()[i].clone()).collect();
        cols.extend(z1.iter().cloned());
        let b1 = transpose(&qmat(&cols));
        let b1_inv = rational_inverse(&b1).ok_or_else(|| Error::InvalidDatum("simple roots and kernel do not span".into()))?;
        Ok(Search {
            p: rd1.p(),
            budget,
            spent: BudgetSpent::default(),
            rd1,
            rd2,
            n2,
            s1,
            s2,
            c1,
            c2,
            ncomp: comps.len(),
            comp1,
            order,
            z1,
            z2,
            b1_inv,
        })
    }

    fn tick(&mut self) -> bool {
        self.spent.nodes += 1;
        self.spent.nodes <= self.budget.node_budget
    }

    fn run(&mut self) -> Outcome {
        let r = self.s1.len();
        let mut pi = vec![usize::MAX; r];
        let mut d = vec![0i64; r];
        let mut used = vec![false; r];
        self.assign(0, &mut pi, &mut d, &mut used)
    }

    /// Backtracking over twisted Cartan matchings; `d[i]` is the exponent of node `i`
    /// relative to the first node of its component.
    fn assign(&mut self, pos: usize, pi: &mut Vec<usize>, d: &mut Vec<i64>, used: &mut Vec<bool>) -> Outcome {
        if !self.tick() {
            return Outcome::OutOfBudget;
        }
        let r = self.s1.len();
        if pos == r {
            self.spent.matchings += 1;
            return self.shifts(pi, d);
        }
        for j in 0..r {
            if used[j] {
                continue;
            }
            let mut ok = true;
            let mut di: Option<i64> = None;
            let i = self.order[pos];
            for &a in &self.order[..pos] {
                let (x, y) = (self.c1[a][i], self.c1[i][a]);
                let (u, v) = (self.c2[pi[a]][j], self.c2[j][pi[a]]);
                if (x == 0) != (u == 0) || (y == 0) != (v == 0) {
                    ok = false;
                    break;
                }
                if x == 0 {
                    continue;
                }
                // C2[πa][πi] = p^{k_i - k_a} C1[a][i] and C2[πi][πa] = p^{k_a - k_i} C1[i][a]
                match (log_p_ratio(x, u, self.p), log_p_ratio(y, v, self.p)) {
                    (Some(e1), Some(e2)) if e1 == -e2 => {
                        let k = d[a] + e1;
                        if di.is_some_and(|old| old != k) {
                            ok = false;
                            break;
                        }
                        di = Some(k);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            pi[i] = j;
            d[i] = di.unwrap_or(0);
            used[j] = true;
            let out = self.assign(pos + 1, pi, d, used);
            used[j] = false;
            pi[i] = usize::MAX;
            match out {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        Outcome::Exhausted
    }

    fn shifts(&mut self, pi: &[usize], d: &[i64]) -> Outcome {
        let e = self.budget.exp_bound;
        let free = self.ncomp.saturating_sub(1);
        let width = (2 * e + 1) as usize;
        let total = width.pow(free as u32);
        for code in 0..total {
            let mut c = vec![0i64; self.ncomp];
            let mut x = code;
            for slot in c.iter_mut().skip(1) {
                *slot = (x % width) as i64 - e;
                x /= width;
            }
            let k: Vec<i64> = (0..pi.len()).map(|i| d[i] + c[self.comp1[i]]).collect();
            match self.torus(pi, &k) {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        Outcome::Exhausted
    }

    fn torus(&mut self, pi: &[usize], k: &[i64]) -> Outcome {
        let t = self.z1.len();
        let mut images: Vec<Vec<BigRational>> = pi
            .iter()
            .zip(k)
            .map(|(&j, &ki)| {
                let s = p_pow_q(self.p, ki);
                self.n2.roots()[self.s2[j]].iter().map(|&x| &s * q(x)).collect()
            })
            .collect();
        if t == 0 {
            return self.candidate(&images);
        }
        let e = self.budget.exp_bound;
        let z2q: Vec<Vec<BigRational>> = self.z2.iter().map(|v| qvec(v)).collect();
        let base = images.len();
        if t == 1 {
            for exp in -e..=e {
                for sign in [1i64, -1] {
                    let s = p_pow_q(self.p, exp) * q(sign);
                    images.truncate(base);
                    images.push(z2q[0].iter().map(|x| x * &s).collect());
                    match self.candidate(&images) {
                        Outcome::Exhausted => {}
                        other => return other,
                    }
                }
            }
            return Outcome::Exhausted;
        }
        let c = self.budget.coeff_bound;
        let width = (2 * c + 1) as u64;
        let cells = (t * t) as u32;
        let Some(total) = width.checked_pow(cells) else { return Outcome::OutOfBudget };
        for exp in -e..=e {
            let s = p_pow_q(self.p, exp);
            for code in 0..total {
                let mut a = vec![vec![0i64; t]; t];
                let mut x = code;
                for cell in a.iter_mut().flatten() {
                    *cell = (x % width) as i64 - c;
                    x /= width;
                }
                if !unit_det(&qmat(&a), self.p) {
                    if !self.tick() {
                        return Outcome::OutOfBudget;
                    }
                    continue;
                }
                images.truncate(base);
                for col in 0..t {
                    let v: Vec<BigRational> = (0..z2q[0].len())
                        .map(|row| (0..t).fold(BigRational::zero(), |acc, m| acc + &z2q[m][row] * q(a[m][col])) * &s)
                        .collect();
                    images.push(v);
                }
                match self.candidate(&images) {
                    Outcome::Exhausted => {}
                    other => return other,
                }
            }
        }
        Outcome::Exhausted
    }

    fn candidate(&mut self, images: &[Vec<BigRational>]) -> Outcome {
        if !self.tick() {
            return Outcome::OutOfBudget;
        }
        self.spent.candidates += 1;
        let b2 = transpose(images);
        let phi = rational_matmul(&b2, &self.b1_inv);
        if !entries_in_ring(&phi, self.p) || !unit_det(&phi, self.p) {
            return Outcome::Exhausted;
        }
        match check_isomorphism(self.rd1, self.rd2, &phi) {
            Ok(true) => Outcome::Found(phi),
            _ => Outcome::Exhausted,
        }
    }
}

pub fn decide_isomorphism(rd1: &RootDatum, rd2: &RootDatum, budget: SearchBudget) -> Result<IsoVerdict> {
    if rd1.p() != rd2.p() {
        return Err(Error::PrimeMismatch(rd1.p(), rd2.p()));
    }
    if let Some(cert) = invariant_mismatch(rd1, rd2)? {
        return Ok(IsoVerdict {
            status: IsoStatus::NotIsomorphic,
            witness: None,
            certificate: Some(cert),
            budget_spent: BudgetSpent::default(),
        });
    }
    let zp = rd1.zp();
    let mut search = Search::new(rd1, rd2, budget)?;
    let outcome = search.run();
    let spent = search.spent;
    match outcome {
        Outcome::Found(phi) => Ok(IsoVerdict {
            status: IsoStatus::Isomorphic,
            witness: Some(LatticeMap::from_rational(&zp, &phi)?),
            certificate: None,
            budget_spent: spent,
        }),
        Outcome::Exhausted | Outcome::OutOfBudget => {
            Ok(IsoVerdict { status: IsoStatus::Unknown, witness: None, certificate: None, budget_spent: spent })
        }
    }
}

/// At `p = 2`, searches for `φ ∈ GL(Z[1/2])` conjugating the reflections of
/// `rd1` onto reflections of `rd2` (a match of reflection groups), using
/// Coxeter-graph matchings of the simple reflections and scalings `2^k`,
/// `|k| <= 1`. Only semisimple data are handled.
pub fn reflection_group_match(rd1: &RootDatum, rd2: &RootDatum) -> Result<Option<QMatrix>> {
    if rd1.p() != rd2.p() {
        return Err(Error::PrimeMismatch(rd1.p(), rd2.p()));
    }
    if rd1.p() != 2 {
        return Err(Error::UnsupportedPrime(rd1.p()));
    }
    if rd1.torus_rank() != 0 || rd2.torus_rank() != 0 {
        return Err(Error::InvalidDatum("reflection-group matching needs semisimple data".into()));
    }
    let (s1, s2) = (rd1.simple_root_indices(), rd2.simple_root_indices());
    if s1.len() != s2.len() || rd1.num_roots() != rd2.num_roots() || rd1.rank() != rd2.rank() {
        return Ok(None);
    }
    let r = s1.len();
    let (c1, c2) = (rd1.cartan_matrix(), rd2.cartan_matrix());
    let bond = |c: &[Vec<i64>], i: usize, j: usize| c[i][j] * c[j][i];
    let b1 = transpose(&qmat(&s1.iter().map(|&i| rd1.roots()[i].clone()).collect::<Vec<_>>()));
    let Some(b1_inv) = rational_inverse(&b1) else { return Ok(None) };
    let refl2: Vec<QMatrix> = (0..rd2.num_roots())
        .map(|i| qmat(&rd2.reflection(i, crate::rootdata::Side::OnX).expect("index")))
        .collect();
    let refl1: Vec<QMatrix> = (0..rd1.num_roots())
        .map(|i| qmat(&rd1.reflection(i, crate::rootdata::Side::OnX).expect("index")))
        .collect();

    let perms = permutations(r);
    for pi in perms {
        if (0..r).any(|i| (0..r).any(|j| bond(&c1, i, j) != bond(&c2, pi[i], pi[j]))) {
            continue;
        }
        for code in 0..3usize.pow(r as u32) {
            let mut x = code;
            let k: Vec<i64> = (0..r)
                .map(|_| {
                    let v = (x % 3) as i64 - 1;
                    x /= 3;
                    v
                })
                .collect();
            let images: Vec<Vec<BigRational>> = (0..r)
                .map(|i| {
                    let s = p_pow_q(2, k[i]);
                    rd2.roots()[s2[pi[i]]].iter().map(|&v| &s * q(v)).collect()
                })
                .collect();
            let phi = rational_matmul(&transpose(&images), &b1_inv);
            if !entries_in_ring(&phi, 2) || !unit_det(&phi, 2) {
                continue;
            }
            let phi_inv = rational_inverse(&phi).expect("unit determinant");
            let all = refl1.iter().all(|s| {
                let conj = rational_matmul(&rational_matmul(&phi, s), &phi_inv);
                refl2.contains(&conj)
            });
            if all {
                return Ok(Some(phi));
            }
        }
    }
    Ok(None)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Largest minus smallest root-image exponent within each connected set of roots.
pub fn exponent_spread_per_component(rd1: &RootDatum, exponents: &[i64]) -> Vec<i64> {
    let n = rd1.num_roots();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while c[r] != r {
            r = c[r];
        }
        c[x] = r;
        r
    }
    for a in 0..n {
        for b in 0..n {
            if rd1.pair(&rd1.roots()[a], &rd1.coroots()[b]) != 0 {
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra] = rb;
            }
        }
    }
    let mut ranges: HashMap<usize, (i64, i64)> = HashMap::new();
    for (i, &k) in exponents.iter().enumerate() {
        let root = find(&mut comp, i);
        let e = ranges.entry(root).or_insert((k, k));
        e.0 = e.0.min(k);
        e.1 = e.1.max(k);
    }
    let mut out: Vec<i64> = ranges.values().map(|(lo, hi)| hi - lo).collect();
    out.sort_unstable();
    out
}

/// Parses a matrix of scalar strings as general rationals (`"a"` or `"a/b"`).
pub fn parse_rational_matrix(rows: &[Vec<String>]) -> Result<QMatrix> {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|s| {
                    s.trim().parse::<BigRational>().map_err(|e| Error::ParseScalar { input: s.clone(), reason: e.to_string() })
                })
                .collect()
        })
        .collect()
}

pub fn int_matrix_to_q(m: &IntMatrix) -> QMatrix {
    int_to_rational(m)
}
