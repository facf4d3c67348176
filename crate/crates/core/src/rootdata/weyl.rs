//! Weyl group as permutations of the root list.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::dynkin::dynkin_type;
use super::RootDatum;
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeylGroup {
    pub order: u128,
    /// Elements as permutations of root indices, identity first, in BFS order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<u32>>>,
    pub cartan_type: String,
    /// Length of the longest element `w0`.
    pub longest_length: usize,
    /// `w0` as a permutation of root indices.
    pub longest_element: Vec<u32>,
}

impl WeylGroup {
    pub fn is_enumerated(&self) -> bool {
        self.elements.is_some()
    }
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // (a ∘ b)(i) = a(b(i))
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn weyl_group(rd: &RootDatum, enumeration_cap: usize) -> Result<WeylGroup> {
    let n = rd.num_roots();
    let simple = rd.simple_root_indices();
    let gens: Vec<Vec<u32>> = simple
        .iter()
        .map(|&i| rd.reflection_permutation(i).ok_or_else(|| Error::InvalidDatum("reflection does not permute roots".into())))
        .collect::<Result<_>>()?;
    let classified = dynkin_type(rd);
    let identity: Vec<u32> = (0..n as u32).collect();

    let mut w0 = identity.clone();
    let mut len = 0usize;
    'outer: loop {
        for (g, &a) in gens.iter().zip(&simple) {
            if (w0[a] as usize) < rd.positive_count() {
                w0 = compose(&w0, g);
                len += 1;
                continue 'outer;
            }
        }
        break;
    }

    let skip = matches!(&classified, Ok(t) if t.weyl_order() > enumeration_cap as u128);
    let elements = if skip { None } else { enumerate(&identity, &gens, enumeration_cap) };
    match (elements, classified) {
        (Some(els), Ok(t)) => {
            let order = els.len() as u128;
            Ok(WeylGroup { order, elements: Some(els), cartan_type: t.to_string(), longest_length: len, longest_element: w0 })
        }
        (Some(els), Err(_)) => Ok(WeylGroup {
            order: els.len() as u128,
            elements: Some(els),
            cartan_type: "unclassified".into(),
            longest_length: len,
            longest_element: w0,
        }),
        (None, Ok(t)) => Ok(WeylGroup {
            order: t.weyl_order(),
            elements: None,
            cartan_type: t.to_string(),
            longest_length: len,
            longest_element: w0,
        }),
        (None, Err(_)) => Err(Error::CapExceededWithoutClassification { cap: enumeration_cap }),
    }
}

fn enumerate(identity: &[u32], gens: &[Vec<u32>], cap: usize) -> Option<Vec<Vec<u32>>> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut out = vec![identity.to_vec()];
    seen.insert(identity.to_vec());
    let mut queue = VecDeque::from([identity.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for g in gens {
            let next = compose(g, &w);
            if seen.insert(next.clone()) {
                if out.len() >= cap {
                    return None;
                }
                out.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Some(out)
}
