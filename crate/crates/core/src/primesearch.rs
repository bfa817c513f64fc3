//! Primes at which a volcano occurs, read off from the orders of Frobenius classes in the class
//! groups of O_d and O_{d+1}.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, kronecker, primes_up_to};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::ordertower::OrderTower;
use crate::quadforms::{form_order, prime_form, validate_discriminant, PrimeForm, QuadForm};
use crate::solvability::{TowerStep, XReport};

/// The class of a prime ideal above a split prime p, with its order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusClass {
    pub p: u64,
    pub form: QuadForm,
    pub order: u64,
}

pub fn frobenius_class(p: u64, d: i64) -> Result<FrobeniusClass> {
    validate_discriminant(d)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if kronecker(d, p as i64) != 1 {
        return Err(Error::NotSplit { p, d });
    }
    let form = match prime_form(d, p)? {
        PrimeForm::Form(f) => f,
        PrimeForm::Inert => unreachable!("split prime"),
    };
    Ok(FrobeniusClass {
        p,
        form,
        order: form_order(&form)?,
    })
}

/// Order of the class of a prime above `p` in Cl(d); equal to the residue degree in the ring class field.
pub fn frobenius_order(p: u64, d: i64) -> Result<u64> {
    Ok(frobenius_class(p, d)?.order)
}

fn check_base(d0: i64) -> Result<()> {
    if d0 >= -4 {
        return Err(Error::HypothesisViolation(format!(
            "crater order discriminant {d0} must be < -4"
        )));
    }
    Ok(())
}

/// Whether the volcano with crater order `d0` and depth `d` occurs in the ℓ-isogeny graph over F_{p^k}.
pub fn is_k_explosive(p: u64, d0: i64, ell: u64, d: u32, k: u64) -> Result<bool> {
    if p == ell {
        return Err(Error::PrimeEqualsEll(p));
    }
    check_base(d0)?;
    let tower = OrderTower::from_base(d0, ell)?;
    let lower = tower.disc(d)?;
    let upper = tower.disc(d + 1)?;
    if kronecker(upper, p as i64) != 1 {
        return Err(Error::NotSplit { p, d: upper });
    }
    let below = frobenius_order(p, lower)?;
    let above = frobenius_order(p, upper)?;
    Ok(k % below == 0 && k % above != 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub primes: Vec<u64>,
    /// Primes up to p_max coprime to 2ℓcD_K and split in K.
    pub eligible: u64,
    /// π(p_max).
    pub prime_count: u64,
    pub empirical_density: f64,
    pub predicted_density: f64,
    pub x: XReport,
}

/// All k-explosive primes p <= p_max for the tower over `d0`, with the observed and predicted densities.
pub fn search(d0: i64, ell: u64, d: u32, k: u64, p_max: u64, caps: &Caps) -> Result<SearchResult> {
    if k == 0 {
        return Err(Error::InvalidSpec("k must be positive".into()));
    }
    check_base(d0)?;
    let step = TowerStep::new(d0, ell, d, caps)?;
    let tower = step.tower;
    let x = XReport::new(step.x_indices(k).len() as u64, step.upper.order());
    let bad = 2 * ell as i128 * tower.c as i128 * tower.d_k as i128;
    let primes = primes_up_to(p_max);
    let eligible: Vec<u64> = primes
        .par_iter()
        .copied()
        .filter(|&p| gcd(p as i128, bad) == 1 && kronecker(tower.d_k, p as i64) == 1)
        .collect();
    let order_in = |g: &crate::quadforms::ClassGroup, p: u64| -> Result<u64> {
        let f = prime_form(g.law.d, p)?.form().ok_or(Error::NotSplit { p, d: g.law.d })?;
        g.position(&f)
            .map(|i| g.orders[i])
            .ok_or_else(|| Error::Inconsistent(format!("prime form {f} missing from class group")))
    };
    let hits: Result<Vec<Option<u64>>> = eligible
        .par_iter()
        .map(|&p| {
            let above = order_in(&step.upper, p)?;
            if k % above == 0 {
                return Ok(None);
            }
            let below = order_in(&step.lower, p)?;
            Ok((k % below == 0).then_some(p))
        })
        .collect();
    let found: Vec<u64> = hits?.into_iter().flatten().collect();
    let prime_count = primes.len() as u64;
    Ok(SearchResult {
        empirical_density: if prime_count == 0 {
            0.0
        } else {
            found.len() as f64 / prime_count as f64
        },
        predicted_density: x.density,
        primes: found,
        eligible: eligible.len() as u64,
        prime_count,
        x,
    })
}
