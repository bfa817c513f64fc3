//! Univariate polynomials over a [`FieldCtx`] and their roots in the field.

use super::field::{Elem, FieldCtx, ZERO};

/// Coefficients from the constant term up; no trailing zeros.
pub type Poly = Vec<Elem>;

fn trim(a: &mut Poly) {
    while a.last() == Some(&ZERO) {
        a.pop();
    }
}

fn degree(a: &Poly) -> usize {
    a.len().saturating_sub(1)
}

pub fn eval(f: &FieldCtx, a: &[Elem], x: Elem) -> Elem {
    a.iter().rev().fold(ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

fn sub(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(ZERO);
            let y = b.get(i).copied().unwrap_or(ZERO);
            f.sub(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

fn add(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(ZERO);
            let y = b.get(i).copied().unwrap_or(ZERO);
            f.add(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

fn divrem(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> (Poly, Poly) {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = degree(&b.to_vec());
    let li = f.inv(b[db]);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut quo = vec![ZERO; r.len() - db];
    while r.len() > db {
        let c = f.mul(r[r.len() - 1], li);
        let shift = r.len() - 1 - db;
        quo[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, bi));
        }
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

fn rem(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Poly {
    divrem(f, a, b).1
}

fn mulmod(f: &FieldCtx, a: &[Elem], b: &[Elem], m: &[Elem]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    rem(f, &out, m)
}

fn powmod(f: &FieldCtx, a: &[Elem], mut e: u64, m: &[Elem]) -> Poly {
    let mut result = rem(f, &[f.one()], m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(f, &result, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = mulmod(f, &base, &base, m);
        }
    }
    result
}

fn monic(f: &FieldCtx, a: Poly) -> Poly {
    match a.last() {
        None => a,
        Some(&lead) => {
            let li = f.inv(lead);
            a.into_iter().map(|c| f.mul(c, li)).collect()
        }
    }
}

fn gcd(f: &FieldCtx, a: &[Elem], b: &[Elem]) -> Poly {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, x)
}

/// Splits a monic squarefree product of distinct linear factors into its roots.
fn split_linear(f: &FieldCtx, g: &Poly, out: &mut Vec<Elem>) {
    match degree(g) {
        0 => {}
        1 => out.push(f.neg(g[0])),
        n => {
            if f.q <= 64 {
                out.extend(f.elements().filter(|&x| eval(f, g, x) == ZERO));
                return;
            }
            let one = [f.one()];
            for i in 1..f.q as u32 {
                let delta = f.from_index(i);
                let probe = if f.p == 2 {
                    // absolute trace of delta * Y
                    let dy = vec![ZERO, delta];
                    let mut t = rem(f, &dy, g);
                    let mut acc = t.clone();
                    for _ in 1..f.k {
                        t = mulmod(f, &t, &t, g);
                        acc = add(f, &acc, &t);
                    }
                    acc
                } else {
                    let shifted = vec![delta, f.one()];
                    sub(f, &powmod(f, &shifted, (f.q - 1) / 2, g), &one)
                };
                let d = gcd(f, g, &probe);
                let dd = degree(&d);
                if !d.is_empty() && dd > 0 && dd < n {
                    let (other, _) = divrem(f, g, &d);
                    split_linear(f, &d, out);
                    split_linear(f, &monic(f, other), out);
                    return;
                }
            }
            unreachable!("some shift separates distinct roots");
        }
    }
}

/// Roots of `a` in the field with their multiplicities, sorted by encoding.
pub fn roots_with_multiplicity(f: &FieldCtx, a: &[Elem]) -> Vec<(Elem, u32)> {
    let mut a = a.to_vec();
    trim(&mut a);
    if degree(&a) == 0 {
        return Vec::new();
    }
    let a = monic(f, a);
    let y = vec![ZERO, f.one()];
    let yq = powmod(f, &y, f.q, &a);
    let g = gcd(f, &a, &sub(f, &yq, &y));
    let mut roots = Vec::with_capacity(degree(&g));
    split_linear(f, &g, &mut roots);
    let mut out: Vec<(Elem, u32)> = roots
        .into_iter()
        .map(|r| {
            let lin = vec![f.neg(r), f.one()];
            let mut cur = a.clone();
            let mut mult = 0;
            loop {
                let (quo, re) = divrem(f, &cur, &lin);
                if !re.is_empty() {
                    break;
                }
                mult += 1;
                cur = quo;
            }
            (r, mult)
        })
        .collect();
    out.sort_by_key(|&(r, _)| f.index(r));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(f: &FieldCtx, a: &[Elem]) -> Vec<(Elem, u32)> {
        let mut out = Vec::new();
        for x in f.elements() {
            let lin = vec![f.neg(x), f.one()];
            let mut cur = a.to_vec();
            trim(&mut cur);
            let mut m = 0;
            loop {
                let (q, r) = divrem(f, &cur, &lin);
                if !r.is_empty() {
                    break;
                }
                m += 1;
                cur = q;
            }
            if m > 0 {
                out.push((x, m));
            }
        }
        out
    }

    #[test]
    fn roots_agree_with_scan() {
        for (p, k) in [(101u64, 1u32), (7, 3), (2, 7), (3, 5), (211, 1)] {
            let f = FieldCtx::new(p, k, 100_000).unwrap();
            let mut seed = 12345u64;
            for _ in 0..200 {
                let mut next = || {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    f.from_index(((seed >> 33) % f.q) as u32)
                };
                // product of random linear factors times a random quadratic
                let mut poly = vec![f.one()];
                for _ in 0..4 {
                    let r = next();
                    let lin = vec![f.neg(r), f.one()];
                    let mut out = vec![ZERO; poly.len() + 1];
                    for (i, &c) in poly.iter().enumerate() {
                        for (j, &d) in lin.iter().enumerate() {
                            out[i + j] = f.add(out[i + j], f.mul(c, d));
                        }
                    }
                    poly = out;
                }
                let quad = vec![next(), next(), f.one()];
                let mut out = vec![ZERO; poly.len() + 2];
                for (i, &c) in poly.iter().enumerate() {
                    for (j, &d) in quad.iter().enumerate() {
                        out[i + j] = f.add(out[i + j], f.mul(c, d));
                    }
                }
                assert_eq!(roots_with_multiplicity(&f, &out), {
                    let mut s = scan(&f, &out);
                    s.sort_by_key(|&(r, _)| f.index(r));
                    s
                });
            }
        }
    }
}
