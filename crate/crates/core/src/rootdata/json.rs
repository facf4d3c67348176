//! JSON wire format for root data.
//!
//! Coordinates may be integers or scalar strings in `Z[1/p]`. On load every
//! root/coroot pair is rescaled by a power of `p` so that both become
//! integral, which is always possible when the pair is `p`-integrally
//! compatible; otherwise the load fails.

use serde::{Deserialize, Serialize};

use super::RootDatum;
use crate::error::{Error, Result};
use crate::scalars::{LocalizedRational, Zp};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Str(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootDatumJson {
    pub p: u64,
    #[serde(rename = "rank_X")]
    pub rank_x: usize,
    #[serde(rename = "rank_Y")]
    pub rank_y: usize,
    pub pairing: Vec<Vec<i64>>,
    pub roots: Vec<Vec<ScalarJson>>,
    pub coroots: Vec<Vec<ScalarJson>>,
    pub positive_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn parse_scalar(zp: &Zp, s: &ScalarJson) -> Result<LocalizedRational> {
    match s {
        ScalarJson::Int(n) => Ok(zp.int(*n)),
        ScalarJson::Str(t) => zp.parse(t),
    }
}

fn to_i64(zp: &Zp, x: &LocalizedRational) -> Result<i64> {
    let n = x.as_integer().ok_or_else(|| Error::InvalidDatum(format!("{} is not integral", zp.format(x))))?;
    i64::try_from(n).map_err(|_| Error::InvalidDatum(format!("coordinate {n} out of range")))
}

/// Exponent range `[lo, hi]` of `k` for which `p^k v` is integral: `lo = -min v_p`.
fn integral_floor(zp: &Zp, v: &[LocalizedRational]) -> i64 {
    v.iter().filter(|x| !x.is_zero()).map(|x| -zp.valuation(x).unwrap_or(0)).max().unwrap_or(0)
}

impl RootDatumJson {
    pub fn from_datum(rd: &RootDatum) -> Self {
        let conv = |vs: &[Vec<i64>]| vs.iter().map(|v| v.iter().map(|&x| ScalarJson::Int(x)).collect()).collect();
        RootDatumJson {
            p: rd.p(),
            rank_x: rd.rank(),
            rank_y: rd.rank(),
            pairing: rd.pairing().to_vec(),
            roots: conv(rd.roots()),
            coroots: conv(rd.coroots()),
            positive_count: rd.positive_count(),
            name: rd.name().map(str::to_string),
        }
    }

    /// Builds the integral form without checking the axioms.
    pub fn to_datum_unvalidated(&self) -> Result<RootDatum> {
        let zp = Zp::new(self.p)?;
        if self.rank_x != self.rank_y {
            return Err(Error::DimensionMismatch(format!("rank_X = {} but rank_Y = {}", self.rank_x, self.rank_y)));
        }
        if self.pairing.len() != self.rank_x {
            return Err(Error::DimensionMismatch("pairing row count differs from rank".into()));
        }
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for (i, (r, c)) in self.roots.iter().zip(&self.coroots).enumerate() {
            let r: Vec<LocalizedRational> = r.iter().map(|s| parse_scalar(&zp, s)).collect::<Result<_>>()?;
            let c: Vec<LocalizedRational> = c.iter().map(|s| parse_scalar(&zp, s)).collect::<Result<_>>()?;
            // p^s r and p^{-s} c must both be integral: s >= floor_r and -s >= floor_c.
            let lo = integral_floor(&zp, &r);
            let hi = -integral_floor(&zp, &c);
            if lo > hi {
                return Err(Error::InvalidDatum(format!("root/coroot pair {i} has no integral rescaling")));
            }
            let s = if lo > 0 { lo } else if hi < 0 { hi } else { 0 };
            roots.push(r.iter().map(|x| to_i64(&zp, &zp.mul_pow(x, s))).collect::<Result<Vec<_>>>()?);
            coroots.push(c.iter().map(|x| to_i64(&zp, &zp.mul_pow(x, -s))).collect::<Result<Vec<_>>>()?);
        }
        if self.roots.len() != self.coroots.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} roots but {} coroots",
                self.roots.len(),
                self.coroots.len()
            )));
        }
        RootDatum::new(self.p, self.pairing.clone(), roots, coroots, self.positive_count, self.name.clone())
    }

    /// Builds and validates; a failed axiom is reported as [`Error::InvalidDatum`].
    pub fn to_datum(&self) -> Result<RootDatum> {
        let rd = self.to_datum_unvalidated()?;
        let rep = rd.validate();
        if !rep.passed() {
            return Err(Error::InvalidDatum(format!("failed axioms: {}", rep.failed_axioms().join(", "))));
        }
        Ok(rd)
    }
}

pub fn parse_root_datum(text: &str) -> Result<RootDatum> {
    let j: RootDatumJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidDatum(format!("malformed JSON: {e}")))?;
    j.to_datum()
}

pub fn root_datum_to_json(rd: &RootDatum) -> serde_json::Value {
    serde_json::to_value(RootDatumJson::from_datum(rd)).expect("serializable")
}
