use std::collections::{BTreeMap, HashMap};

use proptest::prelude::*;

use perfred::scalars::{LocalizedRational, Zp};
use perfred::sl2_classical::{char_costandard, char_simple, LaurentChar, Sl2Oracle};
use perfred::sl2_perfect::{ExtTarget, PerfectSl2};

/// Rows of Pascal's triangle mod `p` up to `n`.
fn pascal_mod(n: usize, p: u64) -> Vec<Vec<u64>> {
    let mut rows = vec![vec![1u64]];
    for i in 1..=n {
        let prev = &rows[i - 1];
        let row = (0..=i)
            .map(|j| {
                let a = if j > 0 { prev[j - 1] } else { 0 };
                let b = if j < i { prev[j] } else { 0 };
                (a + b) % p
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// `ch L(λ)`: weight `λ - 2j` occurs once iff `binom(λ, j) ≢ 0 mod p`.
fn simple_char_from_pascal(row: &[u64]) -> LaurentChar {
    let l = row.len() as i64 - 1;
    LaurentChar::from_map(row.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, _)| (l - 2 * j as i64, 1)).collect())
}

#[test]
fn character_identity() {
    for p in [2u64, 3, 5, 7] {
        let oracle = Sl2Oracle::new(p).unwrap();
        let pascal = pascal_mod(200, p);
        for lambda in 0..=200u64 {
            let mut total = LaurentChar::default();
            for &(mu, m) in oracle.row(lambda).iter() {
                total = total.add(&simple_char_from_pascal(&pascal[mu as usize]).scale(m));
            }
            assert_eq!(total, char_costandard(lambda), "p={p} λ={lambda}");
            assert_eq!(char_simple(lambda, p), simple_char_from_pascal(&pascal[lambda as usize]));
        }
    }
}

#[test]
fn twist_monotonicity() {
    for p in [2u64, 3, 5, 7] {
        let oracle = Sl2Oracle::new(p).unwrap();
        for lambda in 0..=60u64 {
            for mu in 0..=lambda {
                assert!(
                    oracle.multiplicity(p * lambda, p * mu) >= oracle.multiplicity(lambda, mu),
                    "p={p} λ={lambda} μ={mu}"
                );
            }
        }
    }
}

#[test]
fn frobenius_sequences_on_characters() {
    for p in [2u64, 3, 5, 7] {
        let q = p as i64;
        for kappa in 1..=40u64 {
            let lhs = char_costandard(p * kappa);
            let rhs = char_costandard(kappa).twist(q).add(&char_costandard(kappa - 1).twist(q).mul(&char_simple(p - 2, p)));
            assert_eq!(lhs, rhs, "p={p} κ={kappa}");

            let lhs = char_costandard(p * kappa - 1);
            let rhs = char_costandard(kappa - 1).twist(q).mul(&char_simple(p - 1, p));
            assert_eq!(lhs, rhs, "p={p} κ={kappa}");
        }
    }
}

#[test]
fn simple_characters_are_symmetric() {
    for p in [2u64, 3, 5] {
        for lambda in 0..=120 {
            assert!(char_simple(lambda, p).is_symmetric());
        }
    }
}

#[test]
fn rational_ext_stabilizes() {
    for p in [3u64, 5] {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        for lambda in 0..=40i64 {
            for mu in 0..=40i64 {
                let (l, m) = (zp.int(lambda), zp.int(mu));
                let simple = e.ext1(&l, &m, ExtTarget::Simple) as u64;
                let costandard = e.ext1(&l, &m, ExtTarget::Costandard) as u64;
                for k in 0..=3u32 {
                    let s = p.pow(k);
                    let (a, b) = (lambda as u64 * s, mu as u64 * s);
                    assert_eq!(simple, e.oracle().ext1_simple_simple(a, b).unwrap(), "p={p} {lambda},{mu} m={k}");
                    assert_eq!(costandard, e.oracle().ext1_simple_costandard(a, b).unwrap(), "p={p} {lambda},{mu} m={k}");
                }
            }
        }
    }
}

fn as_u64(zp: &Zp, x: &LocalizedRational, m: u32) -> u64 {
    u64::try_from(zp.mul_pow(x, m as i64).as_integer().unwrap()).unwrap()
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn weight_count_product_rule(p in prime(), (num, e) in (1i64..20_000, 0u32..=4)) {
        let engine = PerfectSl2::new(p).unwrap();
        let zp = engine.zp();
        let n = zp.frac(num, e);
        let expected: u64 = zp.to_digits(&n).unwrap().iter().map(|(_, d)| d + 1).product();
        let ws = engine.weights(&n).unwrap();
        prop_assert_eq!(ws.len() as u64, expected);
        let dims: u64 = ws.iter().map(|w| engine.simple_weight_dim(&n, w) as u64).sum();
        prop_assert_eq!(dims, expected);
        // Count j = k / p^pexp(n) in [0, n] with a nonzero Lucas digit.
        let scale = n.pexp();
        let top = as_u64(zp, &n, scale);
        if top <= 5000 {
            let hits = (0..=top).filter(|&k| zp.lucas_digit(&n, &zp.frac(k as i64, scale)) != 0).count() as u64;
            prop_assert_eq!(hits, expected);
        }
    }

    /// Weight spaces of `∇(λ)` are one-dimensional, so no weight is covered twice by its factors.
    #[test]
    fn factors_do_not_double_count(p in prime(), lambda in (1i64..60, 0u32..=2)) {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        let lambda = zp.frac(lambda.0, lambda.1);
        let report = e.costandard_factors(&lambda, 4).unwrap();
        let mut cover: HashMap<LocalizedRational, u32> = HashMap::new();
        for f in &report.factors {
            prop_assert_eq!(f.multiplicity, 1);
            for w in e.weights(&f.mu).unwrap() {
                *cover.entry(w).or_insert(0) += 1;
            }
        }
        prop_assert!(cover.values().all(|&c| c <= 1), "λ={}", zp.format(&lambda));
        prop_assert_eq!(cover.get(&lambda).copied(), Some(1));
        let mut mus: Vec<&LocalizedRational> = report.factors.iter().map(|f| &f.mu).collect();
        mus.sort_by(|a, b| zp.cmp(a, b));
        mus.dedup();
        prop_assert_eq!(mus.len(), report.factors.len());
    }

    /// Rational `λ, μ` scaled by `p^m` for `m` from the clearing exponent on agree with the classical answer.
    #[test]
    fn ext_stabilizes_for_rational_weights(
        p in prop::sample::select(vec![3u64, 5]),
        a in (0i64..120, 0u32..=2),
        b in (0i64..120, 0u32..=2),
    ) {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        let (l, m) = (zp.frac(a.0, a.1), zp.frac(b.0, b.1));
        let m0 = l.pexp().max(m.pexp());
        for k in m0..=m0 + 2 {
            let (x, y) = (as_u64(zp, &l, k), as_u64(zp, &m, k));
            prop_assert_eq!(e.ext1(&l, &m, ExtTarget::Simple) as u64, e.oracle().ext1_simple_simple(x, y).unwrap());
            prop_assert_eq!(e.ext1(&l, &m, ExtTarget::Costandard) as u64, e.oracle().ext1_simple_costandard(x, y).unwrap());
        }
    }

    #[test]
    fn ext_implies_same_block(p in prime(), a in (0i64..500, 0u32..=3), b in (0i64..500, 0u32..=3)) {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        let (x, y) = (zp.frac(a.0, a.1), zp.frac(b.0, b.1));
        for target in [ExtTarget::Simple, ExtTarget::Costandard] {
            if e.ext1(&x, &y, target) == 1 {
                prop_assert_eq!(e.block_label(&x), e.block_label(&y));
            }
        }
    }

    #[test]
    fn scaling_invariance(p in prime(), a in (0i64..200, 0u32..=3), b in (0i64..200, 0u32..=3), k in -2i64..=2) {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        let (x, y) = (zp.frac(a.0, a.1), zp.frac(b.0, b.1));
        let (sx, sy) = (zp.mul_pow(&x, k), zp.mul_pow(&y, k));
        prop_assert_eq!(e.simple_weight_dim(&x, &y), e.simple_weight_dim(&sx, &sy));
        prop_assert_eq!(e.costandard_multiplicity(&x, &y), e.costandard_multiplicity(&sx, &sy));
        prop_assert_eq!(e.ext1(&x, &y, ExtTarget::Simple), e.ext1(&sx, &sy, ExtTarget::Simple));
        prop_assert_eq!(e.ext1(&x, &y, ExtTarget::Costandard), e.ext1(&sx, &sy, ExtTarget::Costandard));
        prop_assert_eq!(e.block_label(&x), e.block_label(&sx));
        if !x.is_zero() {
            prop_assert_eq!(e.weyl_type_multiplicity(&x, &y).unwrap(), e.weyl_type_multiplicity(&sx, &sy).unwrap());
        }
        let scaled: Vec<LocalizedRational> = e.weights(&x).unwrap().iter().map(|w| zp.mul_pow(w, k)).collect();
        prop_assert_eq!(scaled, e.weights(&sx).unwrap());
    }
}

#[test]
fn multiplicities_stabilize() {
    for p in [2u64, 3, 5] {
        let e = PerfectSl2::new(p).unwrap();
        let zp = e.zp();
        for lambda in 1..=30i64 {
            let l = zp.int(lambda);
            let mut mus: BTreeMap<(i64, u32), LocalizedRational> = BTreeMap::new();
            for mu in 0..=lambda {
                mus.insert((mu, 0), zp.int(mu));
            }
            for f in e.costandard_factors(&l, 3).unwrap().factors {
                mus.insert((f.mu.num().try_into().unwrap(), f.mu.pexp()), f.mu);
            }
            for mu in mus.values() {
                // λ - μ must also clear its factor of 2 after scaling.
                let m0 = (0..=8u32)
                    .find(|&m| {
                        let d = zp.mul_pow(&zp.sub(&l, mu), m as i64);
                        d.as_integer().is_some_and(|v| v % 2 == 0.into()) && zp.mul_pow(mu, m as i64).is_integer()
                    })
                    .unwrap_or(mu.pexp());
                let got = e.costandard_multiplicity(&l, mu) as u64;
                for m in m0..=m0 + 2 {
                    let (a, b) = (as_u64(zp, &l, m), as_u64(zp, mu, m));
                    if a > 4000 {
                        break;
                    }
                    assert_eq!(got, e.oracle().multiplicity(a, b), "p={p} λ={lambda} μ={} m={m}", zp.format(mu));
                }
            }
        }
    }
}
