//! Presentation of a root datum as a reflection group on `V = Y` together
//! with the rank-one modules `P_σ = Z α^∨`.

use serde::Serialize;

use super::{mat_mul, RootDatum, Vector};
use crate::error::{Error, Result};
use crate::lattice::transpose;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Reflection {
    /// `σ` acting on column vectors of `V`.
    pub matrix: Vec<Vec<i64>>,
    /// Generator `b` of `P_σ`.
    pub generator: Vector,
    /// `β ∈ V*` with `σ(λ) = λ - β(λ) b`.
    pub functional: Vector,
    /// `[P_σ : im(1 - σ)]`, which is 1 or 2 for data coming from root data.
    pub image_index: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReflectionDatum {
    pub rank: usize,
    pub reflections: Vec<Reflection>,
}

impl ReflectionDatum {
    pub fn w_generators(&self) -> Vec<&Vec<Vec<i64>>> {
        self.reflections.iter().map(|r| &r.matrix).collect()
    }
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x))
}

pub fn to_reflection_form(rd: &RootDatum) -> ReflectionDatum {
    let pt = transpose(rd.pairing());
    let reflections = (0..rd.positive_count())
        .map(|i| {
            let alpha = &rd.roots()[i];
            let functional: Vector = pt.iter().map(|row| row.iter().zip(alpha).map(|(a, b)| a * b).sum()).collect();
            let generator = rd.coroots()[i].clone();
            let n = rd.rank();
            let matrix = (0..n)
                .map(|r| (0..n).map(|c| i64::from(r == c) - generator[r] * functional[c]).collect())
                .collect();
            Reflection { matrix, image_index: gcd_all(&functional), generator, functional }
        })
        .collect();
    ReflectionDatum { rank: rd.rank(), reflections }
}

/// Rebuilds a root datum with `X = V*` (identity pairing): roots are the
/// functionals `β`, coroots the generators `b`, closed under negation.
pub fn from_reflection_form(rf: &ReflectionDatum, p: u64) -> Result<RootDatum> {
    let n = rf.rank;
    let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut roots = Vec::new();
    let mut coroots = Vec::new();
    for (index, r) in rf.reflections.iter().enumerate() {
        if r.matrix.len() != n || r.matrix.iter().any(|row| row.len() != n) || r.generator.len() != n {
            return Err(Error::DimensionMismatch(format!("reflection {index} is not {n}x{n}")));
        }
        if mat_mul(&r.matrix, &r.matrix) != id || r.matrix == id {
            return Err(Error::OrderNotTwo { index });
        }
        let k = r
            .generator
            .iter()
            .position(|&x| x != 0)
            .ok_or_else(|| Error::InvalidDatum(format!("reflection {index} has zero generator")))?;
        let mut beta = Vec::with_capacity(n);
        for j in 0..n {
            let col: Vec<i64> = (0..n).map(|i| i64::from(i == j) - r.matrix[i][j]).collect();
            if col[k] % r.generator[k] != 0 {
                return Err(Error::InvalidDatum(format!("im(1-σ) of reflection {index} is not in P_σ")));
            }
            let c = col[k] / r.generator[k];
            if col.iter().zip(&r.generator).any(|(a, b)| *a != c * b) {
                return Err(Error::InvalidDatum(format!("im(1-σ) of reflection {index} is not in P_σ")));
            }
            beta.push(c);
        }
        roots.push(beta);
        coroots.push(r.generator.clone());
    }
    let signed = |roots: &[Vector], coroots: &[Vector]| -> Result<RootDatum> {
        let mut rs = roots.to_vec();
        let mut cs = coroots.to_vec();
        rs.extend(roots.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
        cs.extend(coroots.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
        RootDatum::new(p, id.clone(), rs, cs, roots.len(), None)
    };
    let rd = signed(&roots, &coroots)?;
    if rd.check_positive_system().is_ok() {
        return Ok(rd);
    }
    // Re-sign with a generic functional.
    let big = 1 + roots.iter().flatten().map(|x| x.abs()).max().unwrap_or(1) * n as i64 * 2;
    let v: Vec<i64> = (0..n).map(|i| big.pow(i as u32)).collect();
    for (r, c) in roots.iter_mut().zip(coroots.iter_mut()) {
        let s: i64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
        if s < 0 {
            r.iter_mut().for_each(|x| *x = -*x);
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }
    signed(&roots, &coroots)
}

#[cfg(test)]
mod tests {
    use super::super::builtin::{builtin, builtin_names};
    use super::*;

    #[test]
    fn sl2_round_trip() {
        let sl2 = builtin("SL2", 3).unwrap();
        let rf = to_reflection_form(&sl2);
        assert_eq!(rf.reflections.len(), 1);
        assert_eq!(rf.reflections[0].matrix, vec![vec![-1]]);
        assert_eq!(rf.reflections[0].generator, vec![1]);
        let back = from_reflection_form(&rf, 3).unwrap();
        assert_eq!(back.roots(), sl2.roots());
        assert_eq!(back.coroots(), sl2.coroots());
    }

    #[test]
    fn two_p_dichotomy_in_type_b2() {
        let sp4 = builtin("Sp4", 3).unwrap();
        let rf = to_reflection_form(&sp4);
        for (i, r) in rf.reflections.iter().enumerate() {
            let long = sp4.roots()[i].iter().any(|x| x.abs() == 2);
            assert_eq!(r.image_index, if long { 2 } else { 1 });
        }
        let so5 = builtin("SO5", 3).unwrap();
        assert!(to_reflection_form(&so5).reflections.iter().all(|r| r.image_index == 1));
    }

    #[test]
    fn round_trip_all_builtins() {
        for name in builtin_names() {
            let rd = builtin(&name, 5).unwrap();
            let rf = to_reflection_form(&rd);
            assert!(rf.reflections.iter().all(|r| r.image_index == 1 || r.image_index == 2), "{name}");
            let back = from_reflection_form(&rf, 5).unwrap();
            assert!(back.validate().passed(), "{name}");
            assert_eq!(back.roots(), rd.roots(), "{name}");
            assert_eq!(back.coroots(), rd.coroots(), "{name}");
        }
    }

    #[test]
    fn order_two_is_required() {
        let rf = ReflectionDatum {
            rank: 2,
            reflections: vec![Reflection {
                matrix: vec![vec![0, -1], vec![1, 0]],
                generator: vec![1, 0],
                functional: vec![0, 0],
                image_index: 1,
            }],
        };
        assert!(matches!(from_reflection_form(&rf, 2), Err(Error::OrderNotTwo { index: 0 })));
    }
}
