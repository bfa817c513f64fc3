//! Towers of orders O_0 ⊇ O_1 ⊇ ... of conductors c·ℓ^d in a fixed imaginary quadratic field:
//! kernels of the class-group projections, unit-group cokernels, 2-torsion, and rank behaviour.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, ext_gcd, factorize, gcd, is_prime, kronecker};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::group::{AbelianGroupDescriptor, EnumeratedGroup, GroupLaw, QuotientLaw};
use crate::quadforms::{class_group_capped, reduce, ClassGroup, FormLaw, QuadForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ramification {
    Split,
    Inert,
    Ramified,
}

impl fmt::Display for Ramification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Ramification::Split => "split",
            Ramification::Inert => "inert",
            Ramification::Ramified => "ramified",
        };
        f.write_str(s)
    }
}

pub fn ramification(d_k: i64, ell: u64) -> Result<Ramification> {
    if !arith::is_fundamental(d_k) {
        return Err(Error::NotFundamental(d_k));
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    Ok(match kronecker(d_k, ell as i64) {
        1 => Ramification::Split,
        -1 => Ramification::Inert,
        _ => Ramification::Ramified,
    })
}

/// Field discriminant D_K, base conductor c coprime to ℓ, and the prime ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderTower {
    pub d_k: i64,
    pub c: u64,
    pub ell: u64,
}

impl OrderTower {
    pub fn new(d_k: i64, c: u64, ell: u64) -> Result<Self> {
        if !arith::is_fundamental(d_k) {
            return Err(Error::NotFundamental(d_k));
        }
        if !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        if c == 0 || c % ell == 0 {
            return Err(Error::ConductorNotCoprime { c, ell });
        }
        Ok(Self { d_k, c, ell })
    }

    /// Tower whose base order has discriminant `d0`.
    pub fn from_base(d0: i64, ell: u64) -> Result<Self> {
        let disc = crate::quadforms::validate_discriminant(d0)?;
        Self::new(disc.fundamental, disc.conductor, ell)
    }

    /// Discriminant ℓ^(2d) c^2 D_K of O_d.
    pub fn disc(&self, d: u32) -> Result<i64> {
        let f = (self.ell as i128)
            .checked_pow(d)
            .and_then(|x| x.checked_mul(self.c as i128))
            .ok_or(Error::Overflow("tower discriminant"))?;
        let v = f
            .checked_mul(f)
            .and_then(|x| x.checked_mul(self.d_k as i128))
            .ok_or(Error::Overflow("tower discriminant"))?;
        i64::try_from(v).map_err(|_| Error::Overflow("tower discriminant"))
    }

    pub fn ramification(&self) -> Ramification {
        ramification(self.d_k, self.ell).expect("validated on construction")
    }

    /// O_0 has units beyond ±1 and ℓ divides the extra unit index.
    fn extra_units_matter(&self) -> bool {
        self.c == 1 && ((self.d_k == -3 && self.ell == 3) || (self.d_k == -4 && self.ell == 2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    CanonicalQuotient,
    CanonicalTimesIdentity,
    ExplicitElementMap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurjectionDescriptor {
    pub source: AbelianGroupDescriptor,
    pub target: AbelianGroupDescriptor,
    pub kernel: AbelianGroupDescriptor,
    pub kind: MapKind,
}

/// Row of the kernel classification a tower falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KappaCase {
    /// ℓ >= 3 split or inert.
    OddUnramified,
    /// Ramified, cyclic kernels.
    RamifiedCyclic,
    /// Ramified with an extra Z/ℓ factor.
    RamifiedSplitOff,
    /// ℓ = 2 split or inert.
    TwoUnramified,
}

pub fn kappa_case(d_k: i64, ell: u64) -> Result<KappaCase> {
    let ram = ramification(d_k, ell)?;
    Ok(match (ram, ell) {
        (Ramification::Ramified, 2) => match d_k.rem_euclid(16) {
            8 => KappaCase::RamifiedCyclic,
            12 => KappaCase::RamifiedSplitOff,
            r => {
                return Err(Error::Inconsistent(format!(
                    "2 ramified in {d_k} but D_K = {r} mod 16"
                )))
            }
        },
        (Ramification::Ramified, 3) => match d_k.rem_euclid(9) {
            3 => KappaCase::RamifiedCyclic,
            6 => KappaCase::RamifiedSplitOff,
            r => {
                return Err(Error::Inconsistent(format!(
                    "3 ramified in {d_k} but D_K = {r} mod 9"
                )))
            }
        },
        (Ramification::Ramified, _) => KappaCase::RamifiedCyclic,
        (_, 2) => KappaCase::TwoUnramified,
        _ => KappaCase::OddUnramified,
    })
}

fn kappa_closed(case: KappaCase, ell: u64, d: u32) -> AbelianGroupDescriptor {
    if d == 0 {
        return AbelianGroupDescriptor::trivial();
    }
    let pw = |e: u32| ell.pow(e);
    match case {
        KappaCase::OddUnramified => AbelianGroupDescriptor::cyclic(pw(d - 1)),
        KappaCase::RamifiedCyclic => AbelianGroupDescriptor::cyclic(pw(d)),
        KappaCase::RamifiedSplitOff => AbelianGroupDescriptor::from_cyclic_orders(&[pw(d - 1), ell]),
        KappaCase::TwoUnramified => {
            if d == 1 {
                AbelianGroupDescriptor::trivial()
            } else {
                AbelianGroupDescriptor::from_cyclic_orders(&[pw(d - 2), 2])
            }
        }
    }
}

/// Closed-form Sylow ℓ-part of ker(Cl(O_d) → Cl(O_0)), with the projection κ_{d+1} → κ_d.
pub fn kappa_structure(
    tower: &OrderTower,
    d: u32,
) -> Result<(AbelianGroupDescriptor, SurjectionDescriptor)> {
    if tower.c % tower.ell == 0 {
        return Err(Error::ConductorNotCoprime {
            c: tower.c,
            ell: tower.ell,
        });
    }
    if tower.extra_units_matter() && d >= 1 {
        return Err(Error::HypothesisViolation(format!(
            "O_0 of discriminant {} has units beyond ±1 of order divisible by {}",
            tower.d_k, tower.ell
        )));
    }
    let case = kappa_case(tower.d_k, tower.ell)?;
    let kappa = kappa_closed(case, tower.ell, d);
    let source = kappa_closed(case, tower.ell, d + 1);
    let kind = match (case, d) {
        (_, 0) => MapKind::CanonicalQuotient,
        (KappaCase::TwoUnramified, 1) => MapKind::CanonicalQuotient,
        (KappaCase::RamifiedSplitOff, _) | (KappaCase::TwoUnramified, _) => {
            MapKind::CanonicalTimesIdentity
        }
        _ => MapKind::CanonicalQuotient,
    };
    let kernel = if d == 0 {
        source.clone()
    } else {
        AbelianGroupDescriptor::cyclic(tower.ell)
    };
    Ok((
        kappa.clone(),
        SurjectionDescriptor {
            source,
            target: kappa,
            kernel,
            kind,
        },
    ))
}

/// Image of the class of `f` (discriminant m^2 D) under Cl(m^2 D) → Cl(D).
pub fn surject_class(f: &QuadForm, m: u64, d: i64) -> Result<QuadForm> {
    let f = reduce(f)?;
    let m2d = (m as i128 * m as i128)
        .checked_mul(d as i128)
        .ok_or(Error::Overflow("surject_class"))?;
    if f.discriminant() as i128 != m2d {
        return Err(Error::DiscriminantMismatch(f.discriminant(), d));
    }
    if m == 1 {
        return Ok(f);
    }
    let mi = m as i128;
    let mut bound = 20i64;
    loop {
        if let Some((x, y)) = coprime_representation(&f, m, bound) {
            let (_, s, r_neg) = ext_gcd(x as i128, y as i128);
            // x*s - r*y = 1 with r = -r_neg
            let (r, s) = (-r_neg, s);
            let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
            let (x, y) = (x as i128, y as i128);
            let a1 = f.eval(x as i64, y as i64);
            let b1 = 2 * a * x * r + b * (x * s + r * y) + 2 * c * y * s;
            let (g, s0, t0) = ext_gcd(mi, a1);
            debug_assert_eq!(g, 1);
            let two_a = 2 * a1;
            let di = d as i128;
            let big_b = s0
                .checked_mul(b1)
                .zip(t0.checked_mul(a1).and_then(|x| x.checked_mul(di)))
                .and_then(|(u, v)| u.checked_sub(v))
                .ok_or(Error::Overflow("surject_class"))?
                .rem_euclid(two_a);
            let num = big_b * big_b - di;
            debug_assert_eq!(num % (4 * a1), 0);
            let c1 = num / (4 * a1);
            let g = QuadForm::new(
                i64::try_from(a1).map_err(|_| Error::Overflow("surject_class"))?,
                i64::try_from(big_b).map_err(|_| Error::Overflow("surject_class"))?,
                i64::try_from(c1).map_err(|_| Error::Overflow("surject_class"))?,
            );
            return reduce(&g);
        }
        if bound >= 1024 {
            return Err(Error::NoCoprimeRepresentative(m));
        }
        bound *= 2;
    }
}

fn coprime_representation(f: &QuadForm, m: u64, bound: i64) -> Option<(i64, i64)> {
    let ok = |x: i64, y: i64| {
        gcd(x as i128, y as i128) == 1 && gcd(f.eval(x, y), m as i128) == 1
    };
    if ok(1, 0) {
        return Some((1, 0));
    }
    if ok(0, 1) {
        return Some((0, 1));
    }
    for r in 1..=bound {
        for x in -r..=r {
            for y in [-r, r] {
                if ok(x, y) {
                    return Some((x, y));
                }
            }
        }
        for y in (-r + 1)..r {
            for x in [-r, r] {
                if ok(x, y) {
                    return Some((x, y));
                }
            }
        }
    }
    None
}

/// Kernel of S_d → S_0 computed from explicit class-group tables.
pub fn kappa_bruteforce(tower: &OrderTower, d: u32, caps: &Caps) -> Result<AbelianGroupDescriptor> {
    if d == 0 {
        return Ok(AbelianGroupDescriptor::trivial());
    }
    let dd = tower.disc(d)?;
    let d0 = tower.disc(0)?;
    let g = class_group_capped(dd, caps.class_group)?;
    let s = g.sylow(tower.ell);
    let m = tower.ell.pow(d);
    let kernel = projection_kernel_elements(&s, m, d0)?;
    Ok(EnumeratedGroup::new(FormLaw { d: dd }, kernel).descriptor)
}

fn projection_kernel_elements(g: &ClassGroup, m: u64, target: i64) -> Result<Vec<QuadForm>> {
    let id = QuadForm::identity(target);
    let mut out = Vec::new();
    for f in &g.elements {
        if surject_class(f, m, target)? == id {
            out.push(*f);
        }
    }
    Ok(out)
}

/// Kernel of the Sylow projection S_{d+1} → S_d, by brute force.
pub fn sylow_projection_kernel(
    tower: &OrderTower,
    d: u32,
    caps: &Caps,
) -> Result<AbelianGroupDescriptor> {
    let upper = tower.disc(d + 1)?;
    let lower = tower.disc(d)?;
    let s = class_group_capped(upper, caps.class_group)?.sylow(tower.ell);
    let kernel = projection_kernel_elements(&s, tower.ell, lower)?;
    Ok(EnumeratedGroup::new(FormLaw { d: upper }, kernel).descriptor)
}

/// Full kernel of Cl(O_d) → Cl(O_0), by brute force.
pub fn full_kernel_bruteforce(
    tower: &OrderTower,
    d: u32,
    caps: &Caps,
) -> Result<AbelianGroupDescriptor> {
    let dd = tower.disc(d)?;
    let g = class_group_capped(dd, caps.class_group)?;
    let kernel = projection_kernel_elements(&g, tower.ell.pow(d), tower.disc(0)?)?;
    Ok(EnumeratedGroup::new(FormLaw { d: dd }, kernel).descriptor)
}

/// Closed-form cokernel of (Z/ℓ^d)^× → (O_K/ℓ^d O_K)^×.
pub fn lambda_structure(d_k: i64, ell: u64, d: u32) -> Result<AbelianGroupDescriptor> {
    if d == 0 {
        return Err(Error::InvalidSpec("lambda_d needs d >= 1".into()));
    }
    let ram = ramification(d_k, ell)?;
    let case = kappa_case(d_k, ell)?;
    let pw = |e: u32| ell.pow(e);
    Ok(match (case, ram) {
        (KappaCase::OddUnramified, Ramification::Split) => {
            AbelianGroupDescriptor::from_cyclic_orders(&[pw(d - 1), ell - 1])
        }
        (KappaCase::OddUnramified, _) => {
            AbelianGroupDescriptor::from_cyclic_orders(&[pw(d - 1), ell + 1])
        }
        (KappaCase::TwoUnramified, Ramification::Split) => kappa_closed(case, 2, d),
        (KappaCase::TwoUnramified, _) => {
            // F_4^x survives in the cokernel at every depth.
            kappa_closed(case, 2, d).product(&AbelianGroupDescriptor::cyclic(3))
        }
        _ => kappa_closed(case, ell, d),
    })
}

/// Arithmetic in O_K / ℓ^d O_K with basis 1, ω = (D_K + sqrt(D_K))/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueRing {
    pub modulus: u64,
    trace: u64,
    norm: u64,
}

impl ResidueRing {
    pub fn new(d_k: i64, modulus: u64) -> Self {
        let m = modulus as i128;
        let t = (d_k as i128).rem_euclid(m) as u64;
        let n = ((d_k as i128 * d_k as i128 - d_k as i128) / 4).rem_euclid(m) as u64;
        Self {
            modulus,
            trace: t,
            norm: n,
        }
    }

    pub fn mul(&self, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
        let m = self.modulus as u128;
        let (x1, y1) = (a.0 as u128, a.1 as u128);
        let (x2, y2) = (b.0 as u128, b.1 as u128);
        let yy = y1 * y2 % m;
        // ω^2 = T ω − N
        let x = (x1 * x2 + m * m - self.norm as u128 * yy % m) % m;
        let y = (x1 * y2 + x2 * y1 + self.trace as u128 * yy) % m;
        (x as u64, y as u64)
    }

    /// Norm of x + yω.
    pub fn element_norm(&self, a: (u64, u64)) -> u64 {
        let m = self.modulus as u128;
        let (x, y) = (a.0 as u128, a.1 as u128);
        ((x * x + self.trace as u128 * x % m * y + self.norm as u128 * (y * y % m)) % m) as u64
    }
}

impl GroupLaw for ResidueRing {
    type Elem = (u64, u64);

    fn identity(&self) -> (u64, u64) {
        (1 % self.modulus, 0)
    }

    fn op(&self, a: &(u64, u64), b: &(u64, u64)) -> (u64, u64) {
        self.mul(*a, *b)
    }
}

/// Structures of (O_K/ℓ^d)^× and of its quotient by the image of (Z/ℓ^d)^×, by enumeration.
pub fn unit_group_bruteforce(
    d_k: i64,
    ell: u64,
    d: u32,
    caps: &Caps,
) -> Result<(AbelianGroupDescriptor, AbelianGroupDescriptor)> {
    ramification(d_k, ell)?;
    let m = ell.pow(d);
    let size = m as u128 * m as u128;
    if size > caps.unit_ring as u128 {
        return Err(Error::CapExceeded {
            what: "residue ring size",
            size,
            cap: caps.unit_ring as u128,
        });
    }
    let ring = ResidueRing::new(d_k, m);
    let mut units = Vec::new();
    for x in 0..m {
        for y in 0..m {
            if ring.element_norm((x, y)) % ell != 0 {
                units.push((x, y));
            }
        }
    }
    let group = EnumeratedGroup::new(ring, units);
    let scalars: Vec<(u64, u64)> = (0..m).filter(|x| x % ell != 0).map(|x| (x, 0)).collect();
    let (law, reps) = QuotientLaw::new(&group, &scalars);
    let quotient = EnumeratedGroup::new(law, reps);
    Ok((group.descriptor, quotient.descriptor))
}

/// |Cl(D)[2]| from the number of odd primes dividing D.
pub fn two_torsion_card(d: i64) -> Result<u64> {
    crate::quadforms::validate_discriminant(d)?;
    let eta = factorize(d.unsigned_abs())
        .iter()
        .filter(|(p, _)| *p != 2)
        .count() as i64;
    let tau = if d.rem_euclid(4) == 1 {
        eta - 1
    } else {
        let y = d / 4;
        match y.rem_euclid(8) {
            1 | 5 => eta - 1,
            2 | 3 | 6 | 7 => eta,
            4 => eta,
            0 => eta + 1,
            _ => unreachable!(),
        }
    };
    Ok(1u64 << tau.max(0))
}

/// Whether S_d ≅ κ_d × S_0.
pub fn splitting_check(tower: &OrderTower, d: u32, caps: &Caps) -> Result<bool> {
    if d == 0 {
        return Ok(true);
    }
    let s_d = class_group_capped(tower.disc(d)?, caps.class_group)?
        .descriptor
        .sylow(tower.ell);
    let s_0 = class_group_capped(tower.disc(0)?, caps.class_group)?
        .descriptor
        .sylow(tower.ell);
    let kappa = kappa_bruteforce(tower, d, caps)?;
    Ok(s_d.primary_factors() == kappa.product(&s_0).primary_factors())
}

/// Explicit upper bound for h(D_K), D_K < -4.
pub fn class_number_bound(d_k: i64) -> Result<f64> {
    if !arith::is_fundamental(d_k) {
        return Err(Error::NotFundamental(d_k));
    }
    if d_k >= -4 {
        return Err(Error::HypothesisViolation(format!(
            "class number bound needs D_K < -4, got {d_k}"
        )));
    }
    let c = if d_k.rem_euclid(4) == 0 {
        4.0
    } else if d_k.rem_euclid(8) == 1 {
        2.0
    } else {
        6.0
    };
    let x = d_k.unsigned_abs() as f64;
    Ok(x.sqrt() * (x.ln() + 4.2) / (c * std::f64::consts::PI))
}

/// Allowed ℓ-rank of S_d relative to rk(S_0), plus an optional tie to an earlier depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankConstraint {
    pub depth: u32,
    /// rk(S_d) - rk(S_0) lies in this inclusive range.
    pub offset: (u32, u32),
    /// (e, lo, hi): rk(S_d) - rk(S_e) lies in [lo, hi].
    pub relative: Option<(u32, u32, u32)>,
}

impl RankConstraint {
    pub fn exact(depth: u32, k: u32) -> Self {
        Self {
            depth,
            offset: (k, k),
            relative: None,
        }
    }

    /// `ranks[i]` is rk(S_i) for i = 0..=depth.
    pub fn check(&self, ranks: &[u32]) -> bool {
        let r0 = ranks[0];
        let rd = ranks[self.depth as usize];
        if rd < r0 || rd - r0 < self.offset.0 || rd - r0 > self.offset.1 {
            return false;
        }
        if let Some((e, lo, hi)) = self.relative {
            let re = ranks[e as usize];
            if rd < re || rd - re < lo || rd - re > hi {
                return false;
            }
        }
        true
    }
}

pub fn rank_prediction(d_k: i64, ell: u64, d: u32) -> Result<RankConstraint> {
    let case = kappa_case(d_k, ell)?;
    let free = |lo, hi, rel| RankConstraint {
        depth: d,
        offset: (lo, hi),
        relative: rel,
    };
    Ok(match (ell, case) {
        (2, KappaCase::TwoUnramified) => RankConstraint::exact(d, d.saturating_sub(1).min(2)),
        (2, KappaCase::RamifiedCyclic) => RankConstraint::exact(d, d.min(1)),
        (2, KappaCase::RamifiedSplitOff) => RankConstraint::exact(d, if d >= 2 { 1 } else { 0 }),
        (_, KappaCase::OddUnramified) => match d {
            0 | 1 => RankConstraint::exact(d, 0),
            2 => free(0, 1, None),
            _ => free(0, 1, Some((2, 0, 0))),
        },
        (3, KappaCase::RamifiedSplitOff) => match d {
            0 => RankConstraint::exact(0, 0),
            1 => free(0, 1, None),
            2 => free(0, 2, Some((1, 0, 1))),
            _ => free(0, 2, Some((2, 0, 0))),
        },
        (_, KappaCase::RamifiedCyclic) => match d {
            0 => RankConstraint::exact(0, 0),
            1 => free(0, 1, None),
            _ => free(0, 1, Some((1, 0, 0))),
        },
        _ => unreachable!("case table covers every (ell, case)"),
    })
}

/// ℓ-ranks of S_0, ..., S_depth from enumerated class groups.
pub fn sylow_ranks(tower: &OrderTower, depth: u32, caps: &Caps) -> Result<Vec<u32>> {
    (0..=depth)
        .map(|d| {
            Ok(class_group_capped(tower.disc(d)?, caps.class_group)?
                .descriptor
                .rank(tower.ell))
        })
        .collect()
}

/// Counts of elements by order, used as an independent cross-check of descriptors.
pub fn order_histogram(g: &ClassGroup) -> HashMap<u64, usize> {
    let mut h = HashMap::new();
    for &o in &g.orders {
        *h.entry(o).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn ramification_examples() {
        assert_eq!(ramification(-39, 2).unwrap(), Ramification::Split);
        assert_eq!(ramification(-19, 2).unwrap(), Ramification::Inert);
        assert_eq!(ramification(-8, 2).unwrap(), Ramification::Ramified);
    }

    #[test]
    fn kappa_examples() {
        let t = OrderTower::new(-39, 1, 2).unwrap();
        let (k, _) = kappa_structure(&t, 4).unwrap();
        assert_eq!(k.elementary_divisors, vec![2, 4]);
        assert_eq!(kappa_bruteforce(&t, 4, &caps()).unwrap(), k);
        let t = OrderTower::new(-23, 1, 2).unwrap();
        assert!(kappa_structure(&t, 1).unwrap().0.is_trivial());
        let t = OrderTower::new(-3, 2, 3).unwrap();
        assert_eq!(kappa_structure(&t, 1).unwrap().0.elementary_divisors, vec![3]);
        assert_eq!(kappa_bruteforce(&t, 1, &caps()).unwrap().elementary_divisors, vec![3]);
        let t = OrderTower::new(-19, 1, 2).unwrap();
        assert_eq!(kappa_bruteforce(&t, 2, &caps()).unwrap().elementary_divisors, vec![2]);
        assert!(kappa_bruteforce(&t, 0, &caps()).unwrap().is_trivial());
    }

    #[test]
    fn surjection_examples() {
        let f = QuadForm::new(3, 2, 8);
        assert_eq!(surject_class(&f, 2, -23).unwrap(), QuadForm::new(2, -1, 3));
        assert_eq!(
            surject_class(&QuadForm::identity(-92), 2, -23).unwrap(),
            QuadForm::identity(-23)
        );
        assert_eq!(surject_class(&f, 1, -92).unwrap(), reduce(&f).unwrap());
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_structure(-19, 2, 1).unwrap().elementary_divisors, vec![3]);
        assert_eq!(lambda_structure(-8, 2, 3).unwrap().elementary_divisors, vec![8]);
        assert_eq!(lambda_structure(-20, 2, 3).unwrap().elementary_divisors, vec![2, 4]);
        let (u, c) = unit_group_bruteforce(-19, 2, 1, &caps()).unwrap();
        assert_eq!((u.order(), c.elementary_divisors), (3, vec![3]));
        assert_eq!(unit_group_bruteforce(-8, 2, 2, &caps()).unwrap().1.elementary_divisors, vec![4]);
        assert_eq!(
            unit_group_bruteforce(-20, 2, 2, &caps()).unwrap().1.elementary_divisors,
            vec![2, 2]
        );
    }

    #[test]
    fn two_torsion_examples() {
        assert_eq!(two_torsion_card(-15).unwrap(), 2);
        assert_eq!(two_torsion_card(-84).unwrap(), 4);
        assert_eq!(two_torsion_card(-96).unwrap(), 4);
    }

    #[test]
    fn splitting_examples() {
        let t = OrderTower::new(-39, 1, 2).unwrap();
        assert!(splitting_check(&t, 0, &caps()).unwrap());
        assert!(splitting_check(&t, 3, &caps()).unwrap());
        assert!(!splitting_check(&t, 4, &caps()).unwrap());
    }

    #[test]
    fn bound_examples() {
        let b = class_number_bound(-23).unwrap();
        // sqrt(23) (ln 23 + 4.2) / (2 pi)
        assert!((b - 5.599).abs() < 1e-3 && b >= 3.0, "{b}");
        assert!(class_number_bound(-20).unwrap() >= 2.0);
        assert!(class_number_bound(-19).unwrap() >= 1.0);
        assert!(class_number_bound(-4).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_prediction(-39, 2, 3).unwrap(), RankConstraint::exact(3, 2));
        assert_eq!(rank_prediction(-24, 3, 1).unwrap().offset, (0, 1));
        assert_eq!(rank_prediction(-15, 3, 1).unwrap().offset, (0, 1));
        assert_eq!(rank_prediction(-23, 3, 1).unwrap(), RankConstraint::exact(1, 0));
    }

    #[test]
    fn exceptional_units_rejected() {
        let t = OrderTower::new(-4, 1, 2).unwrap();
        assert!(matches!(kappa_structure(&t, 1), Err(Error::HypothesisViolation(_))));
        assert!(matches!(OrderTower::new(-23, 2, 2), Err(Error::ConductorNotCoprime { .. })));
    }
}
