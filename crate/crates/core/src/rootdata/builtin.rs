//! Standard root data.
//!
//! Conventions (pairing is the identity in every case):
//! - `SLn`, `PGLn`: simply connected and adjoint `A_{n-1}`.
//! - `GLn`: `X = Z^n`, roots `e_i - e_j`.
//! - `SO(2n+1)`: `X = Z^n`, roots `±e_i ± e_j` and `±e_i` (coroot `±2e_i`).
//! - `Sp(2n)`: `X = Z^n`, roots `±e_i ± e_j` and `±2e_i` (coroot `±e_i`).
//! - `SO(2n)`: `X = Z^n`, roots `±e_i ± e_j`.
//! - `Tn`: rank `n` torus.
//! - `<type><rank>_sc` / `_ad` for `A1..A8, B2..B4, C2..C4, D4, D5, E6, E7, E8, F4, G2`.
//!   The simply connected form uses fundamental weights as the basis of `X`,
//!   the adjoint form uses simple roots. Simple roots follow Bourbaki numbering.

use std::collections::HashMap;

use super::{RootDatum, Vector};
use crate::error::{Error, Result};

const MAX_CLASSICAL_N: usize = 16;

/// Names accepted by [`builtin`] that are listed in CLI help and exercised in tests.
pub fn builtin_names() -> Vec<String> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push(format!("SL{n}"));
        out.push(format!("PGL{n}"));
    }
    for n in 1..=4 {
        out.push(format!("GL{n}"));
    }
    for n in 1..=3 {
        out.push(format!("Sp{}", 2 * n));
        out.push(format!("SO{}", 2 * n + 1));
    }
    out.push("SO8".into());
    out.push("T1".into());
    out.push("T2".into());
    for (t, ranks) in [
        ('A', &[1usize, 2, 3, 4, 5, 6, 7, 8][..]),
        ('B', &[2, 3, 4]),
        ('C', &[2, 3, 4]),
        ('D', &[4, 5]),
        ('E', &[6, 7, 8]),
        ('F', &[4]),
        ('G', &[2]),
    ] {
        for r in ranks {
            out.push(format!("{t}{r}_sc"));
            out.push(format!("{t}{r}_ad"));
        }
    }
    out
}

pub fn builtin(name: &str, p: u64) -> Result<RootDatum> {
    let unknown = || Error::UnknownName(name.to_string());
    let num = |s: &str| -> Result<usize> {
        let n: usize = s.parse().map_err(|_| unknown())?;
        if n > MAX_CLASSICAL_N * 2 + 1 {
            return Err(unknown());
        }
        Ok(n)
    };
    let rd = if let Some((head, form)) = name.split_once('_') {
        let mut chars = head.chars();
        let t = chars.next().ok_or_else(unknown)?;
        let r = num(chars.as_str())?;
        if !cartan_type_exists(t, r) {
            return Err(unknown());
        }
        let c = cartan(t, r);
        match form {
            "sc" => simply_connected(&c, p)?,
            "ad" => adjoint(&c, p)?,
            _ => return Err(unknown()),
        }
    } else if let Some(rest) = name.strip_prefix("PGL") {
        let n = num(rest)?;
        if n < 2 {
            return Err(unknown());
        }
        adjoint(&cartan('A', n - 1), p)?
    } else if let Some(rest) = name.strip_prefix("SL") {
        let n = num(rest)?;
        if n < 2 {
            return Err(unknown());
        }
        simply_connected(&cartan('A', n - 1), p)?
    } else if let Some(rest) = name.strip_prefix("GL") {
        let n = num(rest)?;
        if n < 1 {
            return Err(unknown());
        }
        gl(n, p)?
    } else if let Some(rest) = name.strip_prefix("Sp") {
        let m = num(rest)?;
        if m < 2 || m % 2 != 0 {
            return Err(unknown());
        }
        sp(m / 2, p)?
    } else if let Some(rest) = name.strip_prefix("SO") {
        let m = num(rest)?;
        match m {
            _ if m >= 3 && m % 2 == 1 => so_odd(m / 2, p)?,
            _ if m >= 4 && m % 2 == 0 => so_even(m / 2, p)?,
            _ => return Err(unknown()),
        }
    } else if let Some(rest) = name.strip_prefix('T') {
        let n = num(rest)?;
        torus(n, p)?
    } else {
        return Err(unknown());
    };
    Ok(rd.with_name(name))
}

fn cartan_type_exists(t: char, r: usize) -> bool {
    match t {
        'A' => (1..=MAX_CLASSICAL_N).contains(&r),
        'B' | 'C' => (2..=MAX_CLASSICAL_N).contains(&r),
        'D' => (4..=MAX_CLASSICAL_N).contains(&r),
        'E' => (6..=8).contains(&r),
        'F' => r == 4,
        'G' => r == 2,
        _ => false,
    }
}

/// `C[i][j] = <α_i, α_j^∨>`, Bourbaki numbering.
pub(crate) fn cartan(t: char, r: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; r]; r];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match t {
        'A' | 'B' | 'C' => {
            for i in 0..r.saturating_sub(1) {
                link(i, i + 1);
            }
        }
        'D' => {
            for i in 0..r - 2 {
                link(i, i + 1);
            }
            link(r - 3, r - 1);
        }
        'E' => {
            link(0, 2);
            link(1, 3);
            for i in 2..r - 1 {
                link(i, i + 1);
            }
        }
        'F' => {
            link(0, 1);
            link(1, 2);
            link(2, 3);
        }
        'G' => link(0, 1),
        _ => unreachable!("checked by cartan_type_exists"),
    }
    match t {
        // α_{r-1} long, α_r short
        'B' => c[r - 2][r - 1] = -2,
        'C' => c[r - 1][r - 2] = -2,
        'F' => c[1][2] = -2,
        'G' => c[1][0] = -3,
        _ => {}
    }
    c
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn unit(n: usize, i: usize) -> Vector {
    (0..n).map(|j| i64::from(i == j)).collect()
}

fn simply_connected(c: &[Vec<i64>], p: u64) -> Result<RootDatum> {
    let r = c.len();
    let roots = c.to_vec();
    let coroots = (0..r).map(|i| unit(r, i)).collect();
    from_simple_system(p, identity(r), roots, coroots)
}

fn adjoint(c: &[Vec<i64>], p: u64) -> Result<RootDatum> {
    let r = c.len();
    let roots = (0..r).map(|i| unit(r, i)).collect();
    let coroots = (0..r).map(|j| (0..r).map(|i| c[i][j]).collect()).collect();
    from_simple_system(p, identity(r), roots, coroots)
}

fn diff(n: usize, i: usize, j: usize) -> Vector {
    let mut v = vec![0; n];
    v[i] += 1;
    v[j] -= 1;
    v
}

fn gl(n: usize, p: u64) -> Result<RootDatum> {
    let simple: Vec<Vector> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
    from_simple_system(p, identity(n), simple.clone(), simple)
}

fn so_odd(n: usize, p: u64) -> Result<RootDatum> {
    let mut roots: Vec<Vector> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
    let mut coroots = roots.clone();
    roots.push(unit(n, n - 1));
    coroots.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
    from_simple_system(p, identity(n), roots, coroots)
}

fn sp(n: usize, p: u64) -> Result<RootDatum> {
    let mut roots: Vec<Vector> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
    let mut coroots = roots.clone();
    roots.push(unit(n, n - 1).iter().map(|x| 2 * x).collect());
    coroots.push(unit(n, n - 1));
    from_simple_system(p, identity(n), roots, coroots)
}

fn so_even(n: usize, p: u64) -> Result<RootDatum> {
    let mut roots: Vec<Vector> = (0..n - 1).map(|i| diff(n, i, i + 1)).collect();
    let mut last = vec![0; n];
    last[n - 2] = 1;
    last[n - 1] = 1;
    roots.push(last);
    from_simple_system(p, identity(n), roots.clone(), roots)
}

fn torus(n: usize, p: u64) -> Result<RootDatum> {
    RootDatum::new(p, identity(n), vec![], vec![], 0, None)
}

/// Closes a simple system under simple reflections and orders the result:
/// positive roots by height (ties broken by simple-root coordinates, descending),
/// then their negatives in the same order.
pub(crate) fn from_simple_system(
    p: u64,
    pairing: Vec<Vec<i64>>,
    simple_roots: Vec<Vector>,
    simple_coroots: Vec<Vector>,
) -> Result<RootDatum> {
    let s = simple_roots.len();
    let pairing_ref = &pairing;
    let pair = |x: &[i64], y: &[i64]| -> i64 {
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * pairing_ref[i][j] * yj;
            }
        }
        acc
    };

    let mut found: Vec<(Vector, Vector, Vec<i64>)> = Vec::new();
    let mut index: HashMap<Vector, usize> = HashMap::new();
    for i in 0..s {
        index.insert(simple_roots[i].clone(), found.len());
        found.push((simple_roots[i].clone(), simple_coroots[i].clone(), unit(s, i)));
    }
    let mut head = 0;
    while head < found.len() {
        let (b, bv, coords) = found[head].clone();
        head += 1;
        for i in 0..s {
            let k = pair(&b, &simple_coroots[i]);
            let kv = pair(&simple_roots[i], &bv);
            let nb: Vector = b.iter().zip(&simple_roots[i]).map(|(x, y)| x - k * y).collect();
            if index.contains_key(&nb) {
                continue;
            }
            let nbv: Vector = bv.iter().zip(&simple_coroots[i]).map(|(x, y)| x - kv * y).collect();
            let mut nc = coords.clone();
            nc[i] -= k;
            index.insert(nb.clone(), found.len());
            found.push((nb, nbv, nc));
            if found.len() > 100_000 {
                return Err(Error::NotCrystallographic("root closure does not terminate".into()));
            }
        }
    }

    let mut positive: Vec<&(Vector, Vector, Vec<i64>)> = found.iter().filter(|r| r.2.iter().all(|&c| c >= 0)).collect();
    if positive.len() * 2 != found.len() {
        return Err(Error::NotCrystallographic("roots are not split into positive and negative halves".into()));
    }
    positive.sort_by(|a, b| {
        let ha: i64 = a.2.iter().sum();
        let hb: i64 = b.2.iter().sum();
        ha.cmp(&hb).then_with(|| b.2.cmp(&a.2))
    });
    let mut roots: Vec<Vector> = positive.iter().map(|r| r.0.clone()).collect();
    let mut coroots: Vec<Vector> = positive.iter().map(|r| r.1.clone()).collect();
    let negs: Vec<Vector> = roots.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    let negcs: Vec<Vector> = coroots.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
    let pc = roots.len();
    roots.extend(negs);
    coroots.extend(negcs);
    RootDatum::new(p, pairing, roots, coroots, pc, None)
}
