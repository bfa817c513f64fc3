//! F_{p^k} with elements stored as discrete logarithms to a fixed primitive element, so that
//! multiplication is an addition of exponents and addition goes through a Zech table.

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// A field element: the exponent e of g^e, or [`ZERO`].
pub type Elem = u32;

pub const ZERO: Elem = u32::MAX;

#[derive(Debug, Clone)]
pub struct FieldCtx {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    /// Monic irreducible modulus, coefficients from the constant term up.
    pub modulus: Vec<u64>,
    /// Polynomial encoding sum c_i p^i of the primitive element.
    pub generator: u32,
    m: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

/// Polynomials over F_p as coefficient vectors, lowest degree first.
mod fp {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        crate::arith::pow_mod(a, p - 2, p)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let li = inv(b[db], p);
        while r.len() > db {
            let c = r[r.len() - 1] * li % p;
            let shift = r.len() - 1 - db;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mulmod(&result, &base, m, p);
            }
            e >>= 1;
            if e > 0 {
                base = mulmod(&base, &base, m, p);
            }
        }
        rem(&result, m, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Ben-Or: f of degree k is irreducible iff gcd(f, x^(p^i) - x) = 1 for 1 <= i <= k/2.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k <= 1 {
            return k == 1;
        }
        let x = vec![0u64, 1];
        let mut xp = x.clone();
        for _ in 1..=k / 2 {
            xp = powmod(&xp, p, f, p);
            let g = gcd(f, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    pub fn digits(mut n: u64, p: u64, k: usize) -> Vec<u64> {
        let mut d = Vec::with_capacity(k);
        for _ in 0..k {
            d.push(n % p);
            n /= p;
        }
        d
    }

    pub fn encode(c: &[u64], p: u64) -> u64 {
        c.iter().rev().fold(0, |acc, &x| acc * p + x)
    }
}

impl FieldCtx {
    /// F_{p^k}, with the first monic irreducible modulus in the order of its encoding sum c_i p^i
    /// over the non-leading coefficients.
    pub fn new(p: u64, k: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidSpec("extension degree must be positive".into()));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= cap)
            .ok_or(Error::CapExceeded {
                what: "field size p^k",
                size: (p as u128).saturating_pow(k),
                cap: cap as u128,
            })?;
        let ku = k as usize;
        let modulus = (0..p.pow(k))
            .map(|n| {
                let mut f = fp::digits(n, p, ku);
                f.push(1);
                f
            })
            .find(|f| fp::is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        let m = q - 1;
        let group_factors = factorize(m);
        let one = vec![1u64];
        let generator = (1..q)
            .find(|&idx| {
                let g = fp::digits(idx, p, ku);
                let mut gt = g.clone();
                fp::trim(&mut gt);
                group_factors
                    .iter()
                    .all(|&(r, _)| fp::powmod(&gt, m / r, &modulus, p) != one)
            })
            .expect("the multiplicative group is cyclic");
        let gpoly = {
            let mut g = fp::digits(generator, p, ku);
            fp::trim(&mut g);
            g
        };
        let mut exp = vec![0u32; m as usize];
        let mut log = vec![ZERO; q as usize];
        let mut cur = vec![1u64];
        for e in 0..m {
            let idx = fp::encode(&cur, p) as u32;
            exp[e as usize] = idx;
            log[idx as usize] = e as u32;
            cur = fp::mulmod(&cur, &gpoly, &modulus, p);
        }
        let zech = (0..m)
            .map(|e| {
                let idx = exp[e as usize] as u64;
                let c0 = idx % p;
                let shifted = idx - c0 + (c0 + 1) % p;
                log[shifted as usize]
            })
            .collect();
        Ok(Self {
            p,
            k,
            q,
            modulus,
            generator: generator as u32,
            m,
            exp,
            log,
            zech,
        })
    }

    #[inline]
    pub fn zero(&self) -> Elem {
        ZERO
    }

    #[inline]
    pub fn one(&self) -> Elem {
        0
    }

    /// Element with polynomial encoding `idx` (for k = 1, the residue itself).
    #[inline]
    pub fn from_index(&self, idx: u32) -> Elem {
        self.log[idx as usize]
    }

    #[inline]
    pub fn index(&self, a: Elem) -> u32 {
        if a == ZERO {
            0
        } else {
            self.exp[a as usize]
        }
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_index(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_u64(&self, n: u64) -> Elem {
        self.from_index((n % self.p) as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let n = (b as u64 + self.m - a as u64) % self.m;
        let z = self.zech[n as usize];
        if z == ZERO {
            ZERO
        } else {
            ((a as u64 + z as u64) % self.m) as Elem
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        if a == ZERO || self.p == 2 {
            a
        } else {
            ((a as u64 + self.m / 2) % self.m) as Elem
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == ZERO || b == ZERO {
            ZERO
        } else {
            ((a as u64 + b as u64) % self.m) as Elem
        }
    }

    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != ZERO, "inverse of zero");
        ((self.m - a as u64) % self.m) as Elem
    }

    pub fn pow(&self, a: Elem, n: u64) -> Elem {
        if a == ZERO {
            return if n == 0 { 0 } else { ZERO };
        }
        ((a as u128 * (n % self.m) as u128) % self.m as u128) as Elem
    }

    /// Whether a lies in the subfield F_{p^m}.
    pub fn in_subfield(&self, a: Elem, m: u32) -> bool {
        if a == ZERO {
            return true;
        }
        let pm = (self.p as u128).pow(m);
        (a as u128 * (pm - 1)) % self.m as u128 == 0
    }

    /// Quadratic character: 0, 1 or -1 (q odd).
    #[inline]
    pub fn legendre(&self, a: Elem) -> i32 {
        if a == ZERO {
            0
        } else if self.p == 2 || a % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All elements in order of their encoding.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q as u32).map(move |i| self.from_index(i))
    }

    /// Writes an element as a polynomial in the root `a` of the modulus.
    pub fn format(&self, e: Elem) -> String {
        let idx = self.index(e) as u64;
        if self.k == 1 {
            return idx.to_string();
        }
        let c = fp::digits(idx, self.p, self.k as usize);
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate().rev() {
            if ci == 0 {
                continue;
            }
            let t = match (i, ci) {
                (0, _) => ci.to_string(),
                (1, 1) => "a".into(),
                (1, _) => format!("{ci}a"),
                (_, 1) => format!("a^{i}"),
                _ => format!("{ci}a^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Irreducibility over F_p of a monic polynomial given by its coefficients, lowest first.
pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    fp::is_irreducible(f, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moduli_examples() {
        assert_eq!(FieldCtx::new(7, 2, 1000).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(FieldCtx::new(5, 1, 1000).unwrap().modulus, vec![0, 1]);
        let f = FieldCtx::new(3, 4, 1000).unwrap();
        assert_eq!(f.modulus.len(), 5);
        assert!(is_irreducible_mod_p(&f.modulus, 3));
        assert!(FieldCtx::new(4, 1, 1000).is_err());
        assert!(FieldCtx::new(101, 3, 1000).is_err());
    }

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(2u64, 1u32), (2, 3), (3, 2), (5, 1), (7, 2), (2, 5), (3, 3)] {
            let f = FieldCtx::new(p, k, 10_000).unwrap();
            let els: Vec<Elem> = f.elements().collect();
            assert_eq!(els.len() as u64, f.q);
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), ZERO);
                assert_eq!(f.pow(a, f.q), a);
                if a != ZERO {
                    assert_eq!(f.mul(a, f.inv(a)), f.one());
                }
                for &b in els.iter().take(20) {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for &c in els.iter().take(7) {
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c))
                        );
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                    }
                }
            }
            // p * 1 = 0
            let mut s = ZERO;
            for _ in 0..p {
                s = f.add(s, f.one());
            }
            assert_eq!(s, ZERO);
        }
    }
}
