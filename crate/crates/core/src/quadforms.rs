//! Positive definite binary quadratic forms and class groups of imaginary quadratic orders.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::arith::{self, ext_gcd, fundamental_part, gcd, is_prime, kronecker};
use crate::error::{Error, Result};
use crate::group::{AbelianGroupDescriptor, EnumeratedGroup, GroupLaw};

pub const DEFAULT_CLASS_GROUP_CAP: u64 = 10_000_000;

/// A discriminant D = c^2 * D_K of an imaginary quadratic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Discriminant {
    pub value: i64,
    pub conductor: u64,
    pub fundamental: i64,
}

impl Discriminant {
    pub fn new(n: i64) -> Result<Self> {
        validate_discriminant(n)
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor == 1
    }
}

pub fn validate_discriminant(n: i64) -> Result<Discriminant> {
    if !arith::is_order_discriminant(n) {
        return Err(Error::NotADiscriminant(n));
    }
    let (fundamental, conductor) = fundamental_part(n);
    Ok(Discriminant {
        value: n,
        conductor,
        fundamental,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        Self { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Principal form of discriminant `d`.
    pub fn identity(d: i64) -> Self {
        if d.rem_euclid(4) == 0 {
            Self::new(1, 0, -d / 4)
        } else {
            Self::new(1, 1, (1 - d) / 4)
        }
    }

    pub fn inverse(&self) -> Self {
        let f = Self::new(self.a, -self.b, self.c);
        reduce(&f).unwrap_or(f)
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !(b < 0 && (b.abs() == a || a == c))
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a as i128, self.b as i128), self.c as i128) == 1
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.a as i128 * x * x + self.b as i128 * x * y + self.c as i128 * y * y
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

fn check_form(f: &QuadForm) -> Result<()> {
    let d = f.b as i128 * f.b as i128 - 4 * f.a as i128 * f.c as i128;
    if f.a <= 0 || d >= 0 {
        return Err(Error::NotPositiveDefinite {
            a: f.a,
            b: f.b,
            c: f.c,
        });
    }
    if !f.is_primitive() {
        return Err(Error::NotPrimitive {
            a: f.a,
            b: f.b,
            c: f.c,
        });
    }
    Ok(())
}

/// Reduction of a form given by wide coefficients with known discriminant.
fn reduce_wide(mut a: i128, mut b: i128, mut c: i128, d: i128) -> Result<QuadForm> {
    loop {
        if b <= -a || b > a {
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            b = r;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if b < 0 && a == c {
        b = -b;
    }
    let conv = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("reduce"));
    Ok(QuadForm::new(conv(a)?, conv(b)?, conv(c)?))
}

/// The reduced representative of the class of `f`.
pub fn reduce(f: &QuadForm) -> Result<QuadForm> {
    check_form(f)?;
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    reduce_wide(a, b, c, b * b - 4 * a * c)
}

/// Dirichlet composition followed by reduction.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    let dg = g.discriminant();
    if d != dg {
        return Err(Error::DiscriminantMismatch(d, dg));
    }
    match compose_i128(f, g, d as i128) {
        Some(r) => r,
        None => compose_big(f, g, d),
    }
}

fn compose_i128(f: &QuadForm, g: &QuadForm, d: i128) -> Option<Result<QuadForm>> {
    let (a1, b1, _c1) = (f.a as i128, f.b as i128, f.c as i128);
    let (a2, b2, _c2) = (g.a as i128, g.b as i128, g.c as i128);
    let beta = (b1 + b2) / 2;
    let (g1, x1, y1) = ext_gcd(a1, a2);
    let (e, x2, w) = ext_gcd(g1, beta);
    let u = x2.checked_mul(x1)?;
    let v = x2.checked_mul(y1)?;
    let a3 = (a1 / e).checked_mul(a2 / e)?;
    let two_a3 = a3.checked_mul(2)?;
    // B = (u a1 b2 + v a2 b1 + w (b1 b2 + D) / 2) / e, taken mod 2 a3.
    let t1 = u.checked_mul(a1)?.checked_mul(b2)?;
    let t2 = v.checked_mul(a2)?.checked_mul(b1)?;
    let t3 = w.checked_mul(b1.checked_mul(b2)?.checked_add(d)? / 2)?;
    let num = t1.checked_add(t2)?.checked_add(t3)?;
    debug_assert_eq!(num % e, 0);
    let b3 = (num / e).rem_euclid(two_a3);
    let c3 = b3.checked_mul(b3)?.checked_sub(d)? / a3.checked_mul(4)?;
    Some(reduce_wide(a3, b3, c3, d))
}

fn compose_big(f: &QuadForm, g: &QuadForm, d: i64) -> Result<QuadForm> {
    let big = |x: i64| BigInt::from(x);
    let (a1, b1) = (big(f.a), big(f.b));
    let (a2, b2) = (big(g.a), big(g.b));
    let d = big(d);
    let beta: BigInt = (&b1 + &b2) / 2;
    let eg1 = a1.extended_gcd(&a2);
    let eg2 = eg1.gcd.extended_gcd(&beta);
    let e = eg2.gcd.abs();
    let sign = if eg2.gcd.is_negative() { -1 } else { 1 };
    let u = &eg2.x * &eg1.x * sign;
    let v = &eg2.x * &eg1.y * sign;
    let w = &eg2.y * sign;
    let a3: BigInt = (&a1 / &e) * (&a2 / &e);
    let num: BigInt = &u * &a1 * &b2 + &v * &a2 * &b1 + &w * ((&b1 * &b2 + &d) / 2);
    let b3: BigInt = (num / &e).mod_floor(&(&a3 * 2));
    let c3 = (&b3 * &b3 - &d) / (&a3 * 4);
    let (mut a, mut b, mut c) = (a3, b3, c3);
    let four = BigInt::from(4);
    loop {
        if b <= -a.clone() || b > a {
            let two_a: BigInt = &a * 2;
            let mut r = b.mod_floor(&two_a);
            if r > a {
                r -= &two_a;
            }
            b = r;
            c = (&b * &b - &d) / (&a * &four);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        break;
    }
    if b.is_negative() && a == c {
        b = -b;
    }
    let conv = |x: &BigInt| x.to_i64().ok_or(Error::Overflow("compose"));
    Ok(QuadForm::new(conv(&a)?, conv(&b)?, conv(&c)?))
}

/// Group law on reduced forms of a fixed discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormLaw {
    pub d: i64,
}

impl GroupLaw for FormLaw {
    type Elem = QuadForm;

    fn identity(&self) -> QuadForm {
        QuadForm::identity(self.d)
    }

    fn op(&self, a: &QuadForm, b: &QuadForm) -> QuadForm {
        compose(a, b).expect("composition of forms of equal discriminant")
    }
}

pub type ClassGroup = EnumeratedGroup<FormLaw>;

/// All reduced primitive forms of discriminant `d`, in (a, b) order.
pub fn reduced_forms(d: i64) -> Vec<QuadForm> {
    let n = d.unsigned_abs();
    let amax = arith::isqrt(n / 3);
    let mut out = Vec::new();
    for a in 1..=amax as i64 {
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b as i128 * b as i128 - d as i128;
            if num % (4 * a as i128) != 0 {
                continue;
            }
            let c = (num / (4 * a as i128)) as i64;
            if c < a || (c == a && b < 0) {
                continue;
            }
            let f = QuadForm::new(a, b, c);
            if f.is_primitive() {
                out.push(f);
            }
        }
    }
    out
}

/// Number of reduced primitive forms of discriminant `d`.
pub fn class_number(d: i64) -> Result<u64> {
    validate_discriminant(d)?;
    let n = d.unsigned_abs();
    let bmax = arith::isqrt(n / 3) as i64;
    let mut h = 0u64;
    let mut b = (d & 1).abs();
    while b <= bmax {
        let m = ((b as i128 * b as i128 - d as i128) / 4) as i64;
        let mut a = b.max(1);
        while a * a <= m {
            if m % a == 0 {
                let c = m / a;
                if gcd(gcd(a as i128, b as i128), c as i128) == 1 {
                    h += if b == 0 || a == b || a == c { 1 } else { 2 };
                }
            }
            a += 1;
        }
        b += 2;
    }
    Ok(h)
}

pub fn class_group(d: i64) -> Result<ClassGroup> {
    class_group_capped(d, DEFAULT_CLASS_GROUP_CAP)
}

pub fn class_group_capped(d: i64, cap: u64) -> Result<ClassGroup> {
    validate_discriminant(d)?;
    if d.unsigned_abs() > cap {
        return Err(Error::CapExceeded {
            what: "|D| for class group",
            size: d.unsigned_abs() as u128,
            cap: cap as u128,
        });
    }
    Ok(EnumeratedGroup::new(FormLaw { d }, reduced_forms(d)))
}

/// Sylow subgroup of a fully enumerated class group.
pub fn sylow(g: &ClassGroup, ell: u64) -> ClassGroup {
    g.sylow(ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimeForm {
    Form(QuadForm),
    Inert,
}

impl PrimeForm {
    pub fn form(self) -> Option<QuadForm> {
        match self {
            PrimeForm::Form(f) => Some(f),
            PrimeForm::Inert => None,
        }
    }
}

/// Square root of `a` modulo an odd prime `p`, assuming one exists.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if arith::pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(arith::pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while arith::pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = arith::pow_mod(z, q, p);
    let mut t = arith::pow_mod(a, q, p);
    let mut r = arith::pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = arith::mul_mod(tt, tt, p);
            i += 1;
        }
        let b = arith::pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = arith::mul_mod(b, b, p);
        t = arith::mul_mod(t, c, p);
        r = arith::mul_mod(r, b, p);
    }
    Some(r)
}

/// Reduced form of the class of a prime ideal above `q`, with b >= 0 before reduction.
pub fn prime_form(d: i64, q: u64) -> Result<PrimeForm> {
    validate_discriminant(d)?;
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if kronecker(d, q as i64) == -1 {
        return Ok(PrimeForm::Inert);
    }
    let qi = q as i128;
    let di = d as i128;
    let b = if q == 2 {
        (0..4i128)
            .find(|b| (b - di).rem_euclid(2) == 0 && (b * b - di).rem_euclid(8) == 0)
            .expect("Kronecker symbol guarantees a root")
    } else {
        let r = sqrt_mod(di.rem_euclid(qi) as u64, q).expect("Kronecker symbol guarantees a root") as i128;
        [r, qi - r, r + qi, 2 * qi - r]
            .into_iter()
            .filter(|b| *b >= 0 && (b - di).rem_euclid(2) == 0 && (b * b - di).rem_euclid(4 * qi) == 0)
            .min()
            .expect("parity-adjusted root exists")
    };
    let c = (b * b - di) / (4 * qi);
    let f = QuadForm::new(q as i64, b as i64, c as i64);
    if !f.is_primitive() {
        return Err(Error::NotRepresentable { p: q, d });
    }
    Ok(PrimeForm::Form(reduce(&f)?))
}

/// Least n >= 1 with f^n the identity, by repeated composition.
pub fn form_order(f: &QuadForm) -> Result<u64> {
    let f = reduce(f)?;
    let id = QuadForm::identity(f.discriminant());
    let mut x = f;
    let mut n = 1;
    while x != id {
        x = compose(&x, &f)?;
        n += 1;
    }
    Ok(n)
}

/// h(O) for the order of conductor m in the field of discriminant d_k, from h(d_k).
pub fn class_number_formula(d_k: i64, m: u64) -> Result<u64> {
    if !arith::is_fundamental(d_k) {
        return Err(Error::NotFundamental(d_k));
    }
    let h = class_number(d_k)? as u128;
    Ok(class_number_from(d_k, h as u64, m))
}

/// Class number formula with h(d_k) supplied by the caller.
pub fn class_number_from(d_k: i64, h_k: u64, m: u64) -> u64 {
    let mut num = h_k as u128;
    for (p, e) in arith::factorize(m) {
        let chi = kronecker(d_k, p as i64) as i128;
        num *= (p as u128).pow(e - 1);
        num = (num as i128 * (p as i128 - chi)) as u128;
    }
    let unit_index = match (d_k, m > 1) {
        (-3, true) => 3,
        (-4, true) => 2,
        _ => 1,
    };
    (num / unit_index) as u64
}

/// Descriptor and element table of a class group, in a form convenient for reporting.
pub fn describe(g: &ClassGroup) -> (u64, AbelianGroupDescriptor, Vec<QuadForm>) {
    (g.order(), g.descriptor.clone(), g.generators.clone())
}
