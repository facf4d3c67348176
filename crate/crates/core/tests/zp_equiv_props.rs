use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use perfred::lattice::{rational_det, rational_inverse, rational_matmul, transpose, QMatrix};
use perfred::rootdata::{builtin, weyl_group, RootDatum, DEFAULT_ENUMERATION_CAP};
use perfred::zp_equiv::{
    check_isomorphism, check_isomorphism_detailed, decide_isomorphism, exponent_spread_per_component,
    reflection_group_match, IsoStatus, SearchBudget,
};

const POOL: &[&str] = &[
    "SL2", "PGL2", "GL1", "T1", "SL3", "PGL3", "GL2", "Sp4", "SO5", "G2_sc", "G2_ad", "T2", "SL4", "PGL4", "GL3",
    "Sp6", "SO7", "B3_ad", "C3_ad",
];

fn q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn qmat(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
}

fn apply(m: &QMatrix, v: &[i64]) -> Vec<BigRational> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, &b)| a * q(b)).sum()).collect()
}

/// `Some(k)` when `x = ±p^k` for an integer `k`.
fn signed_p_power(x: &BigRational, p: u64) -> Option<(i64, bool)> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let strip = |mut n: BigInt| {
        let mut k = 0i64;
        while n.is_multiple_of(&pb) {
            n /= &pb;
            k += 1;
        }
        (n, k)
    };
    let (n, a) = strip(x.numer().abs());
    let (d, b) = strip(x.denom().abs());
    (n.is_one() && d.is_one()).then_some((a - b, x.is_negative()))
}

/// `v = c·w` for a rational `c`?
fn proportion(v: &[BigRational], w: &[i64]) -> Option<BigRational> {
    let j = w.iter().position(|&x| x != 0)?;
    let c = &v[j] / q(w[j]);
    v.iter().zip(w).all(|(a, &b)| *a == &c * q(b)).then_some(c)
}

/// Test-side check of `φ: X1 -> X2`, returning the root-image exponents.
fn verify_witness(rd1: &RootDatum, rd2: &RootDatum, phi: &QMatrix) -> Result<Vec<i64>, String> {
    let p = rd1.p();
    let in_ring = |x: &BigRational| signed_p_power(&BigRational::from_integer(x.denom().clone()), p).is_some();
    if !phi.iter().flatten().all(in_ring) {
        return Err("entry outside Z[1/p]".into());
    }
    let det = rational_det(phi);
    let unit = !det.is_zero()
        && signed_p_power(&BigRational::from_integer(det.numer().clone()), p).is_some()
        && signed_p_power(&BigRational::from_integer(det.denom().clone()), p).is_some();
    if !unit {
        return Err(format!("det {det} is not a unit"));
    }
    // φ∨ = P1^{-1} φ^T P2 on Y2 -> Y1.
    let p1_inv = rational_inverse(&qmat(rd1.pairing())).ok_or("singular pairing")?;
    let dual = rational_matmul(&rational_matmul(&p1_inv, &transpose(phi)), &qmat(rd2.pairing()));
    let mut hit = vec![false; rd2.num_roots()];
    let mut exps = Vec::new();
    for (alpha, alpha_v) in rd1.roots().iter().zip(rd1.coroots()) {
        let img = apply(phi, alpha);
        let found = rd2.roots().iter().enumerate().find_map(|(j, beta)| {
            let c = proportion(&img, beta)?;
            match signed_p_power(&c, p) {
                Some((k, false)) => Some((j, k)),
                _ => None,
            }
        });
        let (j, k) = found.ok_or_else(|| format!("root {alpha:?} does not map into a root orbit"))?;
        if hit[j] {
            return Err("root map is not injective".into());
        }
        hit[j] = true;
        let back = apply(&dual, &rd2.coroots()[j]);
        let scale = if k >= 0 { q(p.pow(k as u32) as i64) } else { BigRational::new(1.into(), BigInt::from(p.pow((-k) as u32))) };
        let want: Vec<BigRational> = alpha_v.iter().map(|&x| &scale * q(x)).collect();
        if back != want {
            return Err(format!("coroot condition fails at {alpha:?}"));
        }
        exps.push(k);
    }
    Ok(exps)
}

fn decide(a: &str, b: &str, p: u64) -> (RootDatum, RootDatum, perfred::zp_equiv::IsoVerdict) {
    let rd1 = builtin(a, p).unwrap();
    let rd2 = builtin(b, p).unwrap();
    let v = decide_isomorphism(&rd1, &rd2, SearchBudget::default()).unwrap();
    (rd1, rd2, v)
}

fn same_rank_pairs() -> Vec<(&'static str, &'static str)> {
    let mut out = Vec::new();
    for (i, a) in POOL.iter().enumerate() {
        for b in &POOL[i..] {
            if builtin(a, 3).unwrap().rank() == builtin(b, 3).unwrap().rank() {
                out.push((*a, *b));
            }
        }
    }
    out
}

#[test]
fn verdicts_are_sound() {
    for p in [2u64, 3, 5] {
        for (a, b) in same_rank_pairs() {
            let (rd1, rd2, v) = decide(a, b, p);
            match v.status {
                IsoStatus::Isomorphic => {
                    let w = v.witness.expect("witness").to_rational(&rd1.zp());
                    let exps = verify_witness(&rd1, &rd2, &w).unwrap_or_else(|e| panic!("{a}/{b} p={p}: {e}"));
                    let detailed = check_isomorphism_detailed(&rd1, &rd2, &w).unwrap();
                    assert!(detailed.valid);
                    assert_eq!(detailed.exponents, exps, "{a}/{b} p={p}");
                    let bound = if p <= 3 { 1 } else { 0 };
                    for s in exponent_spread_per_component(&rd1, &exps) {
                        assert!(s <= bound, "{a}/{b} p={p}: exponent spread {s}");
                    }
                }
                IsoStatus::NotIsomorphic => {
                    let c = v.certificate.expect("certificate");
                    assert_ne!(c.lhs, c.rhs, "{a}/{b} p={p}");
                    let recomputed = match c.invariant.as_str() {
                        "rank" => Some((serde_json::json!(rd1.rank()), serde_json::json!(rd2.rank()))),
                        "root_count" => Some((serde_json::json!(rd1.num_roots()), serde_json::json!(rd2.num_roots()))),
                        "torus_rank" => Some((
                            serde_json::json!(rd1.rank() - rd1.simple_root_indices().len()),
                            serde_json::json!(rd2.rank() - rd2.simple_root_indices().len()),
                        )),
                        "weyl_order" => {
                            let o = |rd: &RootDatum| weyl_group(rd, DEFAULT_ENUMERATION_CAP).unwrap().order.to_string();
                            Some((serde_json::json!(o(&rd1)), serde_json::json!(o(&rd2))))
                        }
                        _ => None,
                    };
                    if let Some((l, r)) = recomputed {
                        assert_eq!((c.lhs, c.rhs), (l, r), "{a}/{b} p={p}");
                    }
                }
                IsoStatus::Unknown => panic!("{a}/{b} p={p}: no definite verdict on a small pair"),
            }
        }
    }
}

#[test]
fn verdicts_are_symmetric() {
    for p in [2u64, 3, 5] {
        for (a, b) in same_rank_pairs() {
            let (rd1, rd2, ab) = decide(a, b, p);
            let (_, _, ba) = decide(b, a, p);
            let definite = |s| s != IsoStatus::Unknown;
            if definite(ab.status) && definite(ba.status) {
                assert_eq!(ab.status, ba.status, "{a}/{b} p={p}");
            }
            if let Some(w) = ab.witness {
                let inv = rational_inverse(&w.to_rational(&rd1.zp())).unwrap();
                assert!(check_isomorphism(&rd2, &rd1, &inv).unwrap(), "{a}/{b} p={p}: inverse witness fails");
            }
        }
    }
}

#[test]
fn reflection_group_match_agrees_at_two() {
    let semisimple = [
        "SL2", "PGL2", "SL3", "PGL3", "Sp4", "SO5", "G2_sc", "SL4", "PGL4", "Sp6", "SO7", "B3_ad", "C3_ad", "SL5",
        "PGL5", "B4_sc", "C4_sc", "B4_ad", "F4_sc", "D4_sc", "D4_ad",
    ];
    for (i, a) in semisimple.iter().enumerate() {
        for b in &semisimple[i..] {
            let (rd1, rd2, v) = decide(a, b, 2);
            if rd1.rank() != rd2.rank() {
                continue;
            }
            let m = reflection_group_match(&rd1, &rd2).unwrap();
            assert_eq!(m.is_some(), v.status == IsoStatus::Isomorphic, "{a}/{b}");
            if let Some(phi) = m {
                assert!(check_isomorphism(&rd1, &rd2, &phi).unwrap(), "{a}/{b}: upgraded match fails");
            }
        }
    }
}

fn weyl_matrix(rd: &RootDatum, word: &[usize]) -> QMatrix {
    let n = rd.rank();
    let simple = rd.simple_root_indices();
    let mut m: QMatrix = (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect();
    for &s in word {
        let r = rd.reflection(simple[s % simple.len()], perfred::rootdata::Side::OnX).unwrap();
        m = rational_matmul(&qmat(&r), &m);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// `p^k w` is an automorphism; perturbing an entry by `1/q`, `q` prime to `p`, is not.
    #[test]
    fn scaled_weyl_elements_are_automorphisms(
        p in prop::sample::select(vec![2u64, 3, 5]),
        name in prop::sample::select(vec!["SL2", "PGL2", "SL3", "Sp4", "SO5", "G2_sc", "SL4", "SO7", "Sp6"]),
        word in prop::collection::vec(0usize..8, 0..12),
        k in -2i64..=2,
        (r, c) in (0usize..3, 0usize..3),
    ) {
        let rd = builtin(name, p).unwrap();
        let scale = if k >= 0 { q(p.pow(k as u32) as i64) } else { BigRational::new(1.into(), BigInt::from(p.pow((-k) as u32))) };
        let phi: QMatrix = weyl_matrix(&rd, &word).into_iter().map(|row| row.into_iter().map(|x| x * &scale).collect()).collect();
        prop_assert!(check_isomorphism(&rd, &rd, &phi).unwrap());
        let exps = verify_witness(&rd, &rd, &phi).unwrap();
        prop_assert!(exps.iter().all(|&e| e == k));

        let n = rd.rank();
        let mut bad = phi.clone();
        bad[r % n][c % n] += BigRational::new(1.into(), BigInt::from(7));
        prop_assert!(!check_isomorphism(&rd, &rd, &bad).unwrap());
    }
}
