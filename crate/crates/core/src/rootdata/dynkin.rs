//! Cartan-matrix classification into irreducible finite types.

use std::fmt;

use serde::Serialize;

use super::RootDatum;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DynkinKind {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl DynkinKind {
    fn letter(self) -> char {
        match self {
            DynkinKind::A => 'A',
            DynkinKind::B => 'B',
            DynkinKind::C => 'C',
            DynkinKind::D => 'D',
            DynkinKind::E => 'E',
            DynkinKind::F => 'F',
            DynkinKind::G => 'G',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DynkinComponent {
    pub kind: DynkinKind,
    pub rank: usize,
    /// Indices into the Cartan matrix, in the standard numbering of the type.
    #[serde(skip)]
    pub nodes: Vec<usize>,
}

impl DynkinComponent {
    pub fn weyl_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.kind {
            DynkinKind::A => fact(n + 1),
            DynkinKind::B | DynkinKind::C => (1u128 << n) * fact(n),
            DynkinKind::D => (1u128 << (n - 1)) * fact(n),
            DynkinKind::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            DynkinKind::F => 1_152,
            DynkinKind::G => 12,
        }
    }

    pub fn label(&self) -> String {
        // B2 and C2 coincide; report B2.
        let kind = if self.kind == DynkinKind::C && self.rank == 2 { DynkinKind::B } else { self.kind };
        format!("{}{}", kind.letter(), self.rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynkinType {
    pub components: Vec<DynkinComponent>,
    pub torus_rank: usize,
}

impl DynkinType {
    pub fn weyl_order(&self) -> u128 {
        self.components.iter().map(DynkinComponent::weyl_order).product()
    }

    /// Component labels, sorted.
    pub fn labels(&self) -> Vec<String> {
        let mut v: Vec<String> = self.components.iter().map(DynkinComponent::label).collect();
        v.sort();
        v
    }
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = self.labels();
        if self.torus_rank > 0 {
            parts.push(format!("T{}", self.torus_rank));
        }
        if parts.is_empty() {
            return write!(f, "T0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn components_of(c: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = c.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            k += 1;
            for j in 0..n {
                if !seen[j] && (c[i][j] != 0 || c[j][i] != 0) {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Walks a path graph from end node `start`.
fn path_from(start: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = adj[cur].iter().copied().find(|&j| j != prev);
        match next {
            Some(j) => {
                order.push(j);
                prev = cur;
                cur = j;
            }
            None => return order,
        }
    }
}

fn classify_component(c: &[Vec<i64>], nodes: &[usize]) -> Result<DynkinComponent> {
    let not_finite = |why: &str| Error::NotCrystallographic(format!("component {nodes:?}: {why}"));
    let n = nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); c.len()];
    let mut edges = 0;
    let mut multi = Vec::new();
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let prod = c[i][j] * c[j][i];
            if c[i][j] > 0 || c[j][i] > 0 || !(0..=3).contains(&prod) || (prod == 0) != (c[i][j] == 0 && c[j][i] == 0) {
                return Err(not_finite("off-diagonal entries are not a valid bond"));
            }
            if prod > 0 {
                edges += 1;
                adj[i].push(j);
                adj[j].push(i);
                if prod > 1 {
                    multi.push((i, j, prod));
                }
            }
        }
    }
    if edges != n - 1 {
        return Err(not_finite("diagram contains a cycle"));
    }
    let degree = |i: usize| adj[i].len();
    let comp = |kind, nodes: Vec<usize>| Ok(DynkinComponent { kind, rank: n, nodes });
    if n == 1 {
        return comp(DynkinKind::A, nodes.to_vec());
    }
    let ends: Vec<usize> = nodes.iter().copied().filter(|&i| degree(i) == 1).collect();
    let branch: Vec<usize> = nodes.iter().copied().filter(|&i| degree(i) >= 3).collect();
    match multi.as_slice() {
        [] => {
            if branch.is_empty() {
                return comp(DynkinKind::A, path_from(ends[0], &adj));
            }
            if branch.len() > 1 || degree(branch[0]) > 3 {
                return Err(not_finite("too many branch points"));
            }
            let b = branch[0];
            let mut arms: Vec<Vec<usize>> = adj[b]
                .iter()
                .map(|&start| {
                    let mut arm = vec![start];
                    let mut prev = b;
                    let mut cur = start;
                    while let Some(j) = adj[cur].iter().copied().find(|&j| j != prev) {
                        arm.push(j);
                        prev = cur;
                        cur = j;
                    }
                    arm
                })
                .collect();
            arms.sort_by_key(|a| (a.len(), a.clone()));
            let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            match lens.as_slice() {
                [1, 1, k] => {
                    // D_n numbering: long arm from its end, branch, then the two short arms.
                    let mut order: Vec<usize> = arms[2].iter().rev().copied().collect();
                    order.push(b);
                    order.push(arms[0][0]);
                    order.push(arms[1][0]);
                    debug_assert_eq!(order.len(), k + 3);
                    comp(DynkinKind::D, order)
                }
                [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => {
                    // E_n numbering: 1 = end of the length-2 arm, 2 = the length-1 arm.
                    let mut order = vec![arms[1][1], arms[0][0], arms[1][0], b];
                    order.extend(arms[2].iter().copied());
                    comp(DynkinKind::E, order)
                }
                _ => Err(not_finite("branch arms do not match D or E")),
            }
        }
        [(i, j, prod)] => {
            if !branch.is_empty() {
                return Err(not_finite("multiple bond on a branched diagram"));
            }
            if *prod == 3 {
                if n != 2 {
                    return Err(not_finite("triple bond outside G2"));
                }
                // G2: short root first.
                let (short, long) = if c[*i][*j] == -1 { (*i, *j) } else { (*j, *i) };
                return comp(DynkinKind::G, vec![short, long]);
            }
            let (long, short) = if c[*i][*j] == -2 { (*i, *j) } else { (*j, *i) };
            if degree(short) == 1 {
                // B_n: the short root is the last node.
                let mut order = path_from(short, &adj);
                order.reverse();
                return comp(DynkinKind::B, order);
            }
            if degree(long) == 1 {
                let mut order = path_from(long, &adj);
                order.reverse();
                return comp(DynkinKind::C, order);
            }
            if n == 4 {
                let start = ends.iter().copied().find(|&e| adj[e][0] == long).ok_or_else(|| not_finite("bad F4"))?;
                return comp(DynkinKind::F, path_from(start, &adj));
            }
            Err(not_finite("double bond in the interior of a long path"))
        }
        _ => Err(not_finite("more than one multiple bond")),
    }
}

/// Irreducible components of a Cartan matrix `C[i][j] = <α_i, α_j^∨>`.
pub fn classify_cartan(c: &[Vec<i64>]) -> Result<Vec<DynkinComponent>> {
    if c.iter().enumerate().any(|(i, row)| row.len() != c.len() || row[i] != 2) {
        return Err(Error::NotCrystallographic("diagonal entries must be 2".into()));
    }
    let mut out: Vec<DynkinComponent> =
        components_of(c).iter().map(|nodes| classify_component(c, nodes)).collect::<Result<_>>()?;
    out.sort_by(|a, b| (a.label(), &a.nodes).cmp(&(b.label(), &b.nodes)));
    Ok(out)
}

pub fn dynkin_type(rd: &RootDatum) -> Result<DynkinType> {
    let comps = classify_cartan(&rd.cartan_matrix())?;
    Ok(DynkinType { components: comps, torus_rank: rd.torus_rank() })
}

/// Type string such as `"A2 + T1"`, `"B2"`, or `"T2"`.
pub fn dynkin_classify(rd: &RootDatum) -> Result<String> {
    Ok(dynkin_type(rd)?.to_string())
}
