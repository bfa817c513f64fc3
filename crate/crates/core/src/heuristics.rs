//! Modified Cohen-Lenstra predictions and scans over imaginary quadratic fields.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_fundamental, is_prime, isqrt, kronecker, primes_up_to, valuation};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::GroupLaw;
use crate::quadforms::{class_group_capped, class_number, prime_form, reduce, FormLaw, QuadForm};
use crate::solvability::{provenance, Crater, Outcome, VolcanoSpec};

/// Number of factors used when a prediction is turned into a float.
pub const ETA_TERMS: u32 = 64;

/// prod_{k=1}^{terms} (1 - ell^-k). The truncated product exceeds the infinite one by at most
/// 2 ell^-(terms+1).
pub fn eta_infinity(ell: u64, terms: u32) -> f64 {
    assert!(terms >= 1, "terms must be positive");
    let inv = 1.0 / ell as f64;
    let mut pw = 1.0;
    let mut prod = 1.0;
    for _ in 0..terms {
        pw *= inv;
        prod *= 1.0 - pw;
    }
    prod
}

/// A probability of the form (exact rational) * eta_infinity(ell).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClPrediction {
    pub ell: u64,
    pub e: u32,
    pub rational: Ratio<i128>,
}

impl ClPrediction {
    pub fn probability(&self) -> f64 {
        self.rational.to_f64().expect("finite ratio") * eta_infinity(self.ell, ETA_TERMS)
    }
}

impl fmt::Display for ClPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * eta({})", self.rational, self.ell)
    }
}

/// ell^x as a rational, for possibly negative x.
fn ell_power(ell: u64, x: i64) -> Result<Ratio<i128>> {
    let base = ell as i128;
    let n = base
        .checked_pow(x.unsigned_abs() as u32)
        .ok_or(Error::Overflow("ell power in prediction"))?;
    Ok(if x >= 0 {
        Ratio::from_integer(n)
    } else {
        Ratio::new(1, n)
    })
}

fn check_prediction_args(ell: u64, e: u32) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if e == 0 {
        return Err(Error::HypothesisViolation("e must be at least 1".into()));
    }
    Ok(())
}

/// Probability that the Sylow ell-subgroup is cyclic of order at least ell^e:
/// eta/(ell-1) * ell^(2-e)/(ell-1).
pub fn predicted_prob_cyclic(ell: u64, e: u32) -> Result<ClPrediction> {
    check_prediction_args(ell, e)?;
    let l1 = ell as i128 - 1;
    let rational = ell_power(ell, 2 - e as i64)? / Ratio::from_integer(l1 * l1);
    Ok(ClPrediction { ell, e, rational })
}

/// The same with a non-zero extension class: eta * ell^(1-e)/(ell-1).
pub fn predicted_prob_ext(ell: u64, e: u32) -> Result<ClPrediction> {
    check_prediction_args(ell, e)?;
    let rational = ell_power(ell, 1 - e as i64)? / Ratio::from_integer(ell as i128 - 1);
    Ok(ClPrediction { ell, e, rational })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    I1,
    R2,
}

impl Kind {
    /// Depth of the order whose Sylow rank is compared with that of the maximal order.
    fn depth(self) -> u32 {
        match self {
            Kind::I1 => 2,
            Kind::R2 => 1,
        }
    }

    fn expected(self) -> &'static str {
        match self {
            Kind::I1 => "inert",
            Kind::R2 => "ramified",
        }
    }
}

impl FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i1" => Ok(Kind::I1),
            "r2" => Ok(Kind::R2),
            _ => Err(Error::InvalidSpec(format!("unknown scan kind {s:?}; expected i1 or r2"))),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::I1 => "i1",
            Kind::R2 => "r2",
        })
    }
}

/// Discriminants of the fields in which ell ramifies principally.
pub fn principally_ramified(ell: u64) -> Vec<i64> {
    match ell {
        2 => vec![-4, -8],
        _ if ell % 4 == 3 => vec![-(ell as i64)],
        _ => vec![-4 * ell as i64],
    }
}

/// Whether a fundamental discriminant satisfies the local condition of the scan.
pub fn locally_eligible(d_k: i64, ell: u64, kind: Kind) -> bool {
    match kind {
        Kind::I1 => kronecker(d_k, ell as i64) == -1,
        Kind::R2 => {
            kronecker(d_k, ell as i64) == 0 && !principally_ramified(ell).contains(&d_k)
        }
    }
}

fn check_field(d_k: i64, ell: u64, kind: Kind) -> Result<()> {
    if !is_fundamental(d_k) {
        return Err(Error::NotFundamental(d_k));
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let chi = kronecker(d_k, ell as i64);
    let ok = match kind {
        Kind::I1 => chi == -1,
        Kind::R2 => chi == 0,
    };
    if !ok {
        let actual = match chi {
            1 => "split",
            -1 => "inert",
            _ => "ramified",
        };
        return Err(Error::WrongRamification {
            d: d_k,
            ell,
            expected: kind.expected(),
            actual: actual.into(),
        });
    }
    Ok(())
}

/// The condition from full class-group tables: S_0 cyclic of order ell^N with N >= e, and
/// rk S_m = rk S_0 where m = 2 (I1) or 1 (R2).
pub fn condition_check(d_k: i64, ell: u64, e: u32, kind: Kind, caps: &Caps) -> Result<bool> {
    check_field(d_k, ell, kind)?;
    let s0 = class_group_capped(d_k, caps.class_group)?.descriptor.sylow(ell);
    let exps = s0.p_exponents(ell);
    if exps.len() != 1 || exps[0] < e {
        return Ok(false);
    }
    let f = (ell as i64).pow(kind.depth());
    let deeper = f
        .checked_mul(f)
        .and_then(|x| x.checked_mul(d_k))
        .ok_or(Error::Overflow("deeper discriminant"))?;
    let sm = class_group_capped(deeper, caps.class_group)?.descriptor;
    Ok(sm.rank(ell) == s0.rank(ell))
}

/// The largest e for which the condition holds (0 if it holds for none), without enumerating
/// class groups. `h` is the class number of `d_k` when already known.
pub fn condition_exponent(d_k: i64, ell: u64, kind: Kind, h: Option<u64>) -> Result<u32> {
    check_field(d_k, ell, kind)?;
    let h = match h {
        Some(h) => h,
        None => class_number(d_k)?,
    };
    let n = valuation(h, ell);
    if n == 0 {
        return Ok(0);
    }
    let law = FormLaw { d: d_k };
    let Some(gen) = sylow_generator_if_cyclic(&law, d_k, ell, h, n)? else {
        return Ok(0);
    };
    Ok(if extension_is_nonsplit(&gen, d_k, ell, kind, n)? { n } else { 0 })
}

/// Fast version of [`condition_check`].
pub fn condition_check_fast(d_k: i64, ell: u64, e: u32, kind: Kind) -> Result<bool> {
    Ok(condition_exponent(d_k, ell, kind, None)? >= e.max(1))
}

/// Smallest t with x^(ell^t) = 1, for x in the Sylow ell-subgroup.
fn ell_log_order(law: &FormLaw, x: &QuadForm, ell: u64) -> u32 {
    let id = law.identity();
    let mut y = *x;
    let mut t = 0;
    while y != id {
        y = law.pow(&y, ell);
        t += 1;
    }
    t
}

fn in_cyclic_span(law: &FormLaw, y: &QuadForm, x: &QuadForm) -> bool {
    let id = law.identity();
    let mut cur = id;
    loop {
        if cur == *x {
            return true;
        }
        cur = law.op(&cur, y);
        if cur == id {
            return false;
        }
    }
}

/// A generator of the Sylow ell-subgroup of Cl(d) (order ell^n) if it is cyclic. Prime forms of
/// norm up to sqrt(|d|/3) generate the class group, so the loop always decides.
fn sylow_generator_if_cyclic(
    law: &FormLaw,
    d: i64,
    ell: u64,
    h: u64,
    n: u32,
) -> Result<Option<QuadForm>> {
    let cofactor = h / ell.pow(n);
    let mut gen = law.identity();
    let mut s = 0u32;
    let bound = isqrt(d.unsigned_abs() / 3).max(2);
    for q in primes_up_to(bound) {
        let Some(pf) = prime_form(d, q)?.form() else {
            continue;
        };
        let x = law.pow(&pf, cofactor);
        let t = ell_log_order(law, &x, ell);
        if t == n {
            return Ok(Some(x));
        }
        if t <= s {
            if !in_cyclic_span(law, &gen, &x) {
                return Ok(None);
            }
        } else {
            if !in_cyclic_span(law, &x, &gen) {
                return Ok(None);
            }
            gen = x;
            s = t;
        }
    }
    Err(Error::Inconsistent(format!(
        "prime forms of discriminant {d} did not generate a Sylow subgroup of order {ell}^{n}"
    )))
}

/// Whether the lift of a generator of S_0 to the order of index ell^m has order ell^(n+1) in the
/// Sylow subgroup, i.e. S_m is cyclic.
fn extension_is_nonsplit(gen: &QuadForm, d_k: i64, ell: u64, kind: Kind, n: u32) -> Result<bool> {
    let (a, b, c) = (gen.a, gen.b, gen.c);
    let l = ell as i64;
    let (a, b, c) = if a % l != 0 {
        (a, b, c)
    } else if c % l != 0 {
        (c, -b, a)
    } else {
        (a + b + c, b + 2 * c, c)
    };
    let m = kind.depth();
    let f = l.pow(m);
    let dm = f * f * d_k;
    let lifted = reduce(&QuadForm::new(a, b * f, c * f * f))?;
    debug_assert_eq!(lifted.discriminant(), dm);
    // l'-part of the kernel order ell^(m-1) (ell - chi)
    let mut t = (ell as i64 - kronecker(d_k, l) as i64) as u64;
    while t % ell == 0 {
        t /= ell;
    }
    let law = FormLaw { d: dm };
    let z = law.pow(&law.pow(&lifted, ell.pow(n)), t);
    Ok(z != law.identity())
}

/// Number of reduced forms of discriminant -n for each n in [lo, hi).
pub fn reduced_form_counts(lo: u64, hi: u64) -> Vec<u32> {
    let mut counts = vec![0u32; hi.saturating_sub(lo) as usize];
    if hi <= lo {
        return counts;
    }
    let amax = isqrt(hi / 3) as i64;
    for a in 1..=amax {
        for b in (-a + 1)..=a {
            let b2 = b * b;
            let cmin = ((lo as i64 + b2) + 4 * a - 1).div_euclid(4 * a).max(a);
            let cmax = (hi as i64 - 1 + b2).div_euclid(4 * a);
            for c in cmin..=cmax {
                if c == a && b < 0 {
                    continue;
                }
                let n = 4 * a * c - b2;
                counts[(n as u64 - lo) as usize] += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x: u64,
    pub eligible: u64,
    pub hits: u64,
    pub ratio: f64,
}

/// Six significant digits; NaN when undefined.
pub fn format_ratio(r: f64) -> String {
    if r.is_nan() {
        return "NaN".into();
    }
    if r == 0.0 {
        return "0".into();
    }
    let mag = r.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{r:.decimals$}")
}

impl ScanRow {
    pub fn csv_record(&self) -> [String; 4] {
        [
            self.x.to_string(),
            self.eligible.to_string(),
            self.hits.to_string(),
            format_ratio(self.ratio),
        ]
    }
}

pub const CSV_HEADER: [&str; 4] = ["x", "eligible", "hits", "ratio"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct BlockCounts {
    hi: u64,
    eligible: u64,
    hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    ell: u64,
    e: u32,
    kind: Kind,
    stride: u64,
    blocks: BTreeMap<u64, BlockCounts>,
}

fn load_checkpoint(path: &Path) -> Result<Option<Checkpoint>> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| Error::Data(format!("checkpoint {}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let text = serde_json::to_string(cp).map_err(|e| Error::Data(e.to_string()))?;
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn count_block(lo: u64, hi: u64, ell: u64, e: u32, kind: Kind) -> Result<BlockCounts> {
    let counts = reduced_form_counts(lo, hi);
    let mut eligible = 0;
    let mut hits = 0;
    for n in lo.max(3)..hi {
        let d = -(n as i64);
        if !is_fundamental(d) || !locally_eligible(d, ell, kind) {
            continue;
        }
        eligible += 1;
        let h = counts[(n - lo) as usize] as u64;
        if valuation(h, ell) >= e && condition_exponent(d, ell, kind, Some(h))? >= e {
            hits += 1;
        }
    }
    Ok(BlockCounts { hi, eligible, hits })
}

/// Cumulative counts over fundamental discriminants with |D_K| < x, for x at every multiple of
/// `stride` up to `x_max` (and at `x_max` itself). With a checkpoint path, finished blocks are
/// recorded as they complete and reused on the next call with the same parameters.
pub fn scan(
    ell: u64,
    e: u32,
    kind: Kind,
    x_max: u64,
    stride: u64,
    caps: &Caps,
    checkpoint: Option<&Path>,
) -> Result<Vec<ScanRow>> {
    let prediction = predicted_prob_ext(ell, e)?.probability();
    if stride == 0 {
        return Err(Error::InvalidSpec("stride must be positive".into()));
    }
    if x_max > caps.scan {
        return Err(Error::CapExceeded {
            what: "scan bound x_max",
            size: x_max as u128,
            cap: caps.scan as u128,
        });
    }
    let fresh = Checkpoint {
        ell,
        e,
        kind,
        stride,
        blocks: BTreeMap::new(),
    };
    let state = match checkpoint.map(load_checkpoint).transpose()?.flatten() {
        Some(cp) => {
            if (cp.ell, cp.e, cp.kind, cp.stride) != (ell, e, kind, stride) {
                return Err(Error::Inconsistent(
                    "checkpoint was written for different scan parameters".into(),
                ));
            }
            cp
        }
        None => fresh,
    };
    let nblocks = x_max.div_ceil(stride);
    let todo: Vec<u64> = (0..nblocks)
        .filter(|&i| {
            let hi = ((i + 1) * stride).min(x_max);
            state.blocks.get(&i).map_or(true, |b| b.hi != hi)
        })
        .collect();
    let state = Mutex::new(state);
    todo.par_iter().try_for_each(|&i| -> Result<()> {
        let lo = i * stride;
        let hi = ((i + 1) * stride).min(x_max);
        let counts = count_block(lo, hi, ell, e, kind)?;
        let mut st = state.lock().expect("checkpoint lock");
        st.blocks.insert(i, counts);
        if let Some(path) = checkpoint {
            save_checkpoint(path, &st)?;
        }
        Ok(())
    })?;
    let state = state.into_inner().expect("checkpoint lock");
    let mut rows = Vec::with_capacity(nblocks as usize);
    let (mut eligible, mut hits) = (0u64, 0u64);
    for i in 0..nblocks {
        let b = state.blocks[&i];
        eligible += b.eligible;
        hits += b.hits;
        let ratio = if eligible == 0 {
            f64::NAN
        } else {
            hits as f64 / eligible as f64 / prediction
        };
        rows.push(ScanRow {
            x: b.hi,
            eligible,
            hits,
            ratio,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVerdict {
    pub verdict: Outcome,
    pub provenance: String,
    /// Exponent needed of the cyclic Sylow subgroup.
    pub e: u32,
    /// Predicted proportion of eligible fields satisfying the condition.
    pub predicted_density: f64,
}

/// Conditional existence for (I1, ell >= 3, r >= d) and (R2, ell >= 5, r >= d + 1), where
/// r = v_ell(k).
pub fn decide_conditional(v: &VolcanoSpec, k: u64) -> Result<ConditionalVerdict> {
    if k == 0 {
        return Err(Error::HypothesisViolation("k must be positive".into()));
    }
    let r = valuation(k, v.ell);
    let (e, prov) = match v.crater {
        Crater::I1 if v.ell >= 3 && v.d >= 1 && r >= v.d => (r + 1 - v.d, provenance::HEURISTIC_INERT),
        Crater::R2 if v.ell >= 5 && v.d >= 1 && r > v.d => (r - v.d, provenance::HEURISTIC_RAMIFIED),
        _ => {
            return Err(Error::HypothesisViolation(format!(
                "{v} with k = {k}: needs (I1, ell >= 3, d >= 1, r >= d) or (R2, ell >= 5, d >= 1, r >= d + 1)"
            )))
        }
    };
    Ok(ConditionalVerdict {
        verdict: Outcome::ConditionalCL,
        provenance: prov.to_string(),
        e,
        predicted_density: predicted_prob_ext(v.ell, e)?.probability(),
    })
}
