//! Finite abelian groups: descriptors by invariant factors, and structure
//! computation for groups given as an explicit list of elements.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, valuation};

/// A finite abelian group up to isomorphism, as invariant factors d_1 | d_2 | ... | d_t (each >= 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AbelianGroupDescriptor {
    pub elementary_divisors: Vec<u64>,
}

impl AbelianGroupDescriptor {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_cyclic_orders(&[n])
    }

    /// Normal form of the product Z/n_1 x ... x Z/n_k (zeros are not allowed, ones are dropped).
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut by_prime: HashMap<u64, Vec<u32>> = HashMap::new();
        for &n in orders {
            assert!(n >= 1, "cyclic factor of order 0");
            for (p, e) in factorize(n) {
                by_prime.entry(p).or_default().push(e);
            }
        }
        Self::from_prime_exponents(by_prime)
    }

    fn from_prime_exponents(mut by_prime: HashMap<u64, Vec<u32>>) -> Self {
        let t = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut divs = vec![1u64; t];
        for (p, es) in by_prime.iter_mut() {
            es.sort_unstable_by(|a, b| b.cmp(a));
            for (i, &e) in es.iter().enumerate() {
                divs[t - 1 - i] *= p.pow(e);
            }
        }
        divs.retain(|&d| d > 1);
        Self {
            elementary_divisors: divs,
        }
    }

    pub fn order(&self) -> u64 {
        self.elementary_divisors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.elementary_divisors.is_empty()
    }

    pub fn exponent(&self) -> u64 {
        self.elementary_divisors.last().copied().unwrap_or(1)
    }

    /// Number of invariant factors divisible by `p`.
    pub fn rank(&self, p: u64) -> u32 {
        self.elementary_divisors.iter().filter(|&&d| d % p == 0).count() as u32
    }

    /// Exponents e with p^e a cyclic factor of the Sylow p-subgroup, largest first.
    pub fn p_exponents(&self, p: u64) -> Vec<u32> {
        let mut es: Vec<u32> = self
            .elementary_divisors
            .iter()
            .map(|&d| valuation(d, p))
            .filter(|&e| e > 0)
            .collect();
        es.sort_unstable_by(|a, b| b.cmp(a));
        es
    }

    pub fn sylow(&self, p: u64) -> Self {
        let orders: Vec<u64> = self.p_exponents(p).iter().map(|&e| p.pow(e)).collect();
        Self::from_cyclic_orders(&orders)
    }

    /// Prime-power cyclic factors, sorted.
    pub fn primary_factors(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for &d in &self.elementary_divisors {
            for (p, e) in factorize(d) {
                out.push(p.pow(e));
            }
        }
        out.sort_unstable();
        out
    }

    /// Direct product with another group.
    pub fn product(&self, other: &Self) -> Self {
        let mut all = self.elementary_divisors.clone();
        all.extend_from_slice(&other.elementary_divisors);
        Self::from_cyclic_orders(&all)
    }

    /// Order of G / mG.
    pub fn quotient_by_multiple_order(&self, m: u64) -> u64 {
        self.elementary_divisors
            .iter()
            .map(|&d| crate::arith::gcd_u64(d, m))
            .product()
    }

    /// Whether the divisibility chain and size constraints hold.
    pub fn is_normalized(&self) -> bool {
        self.elementary_divisors.iter().all(|&d| d >= 2)
            && self
                .elementary_divisors
                .windows(2)
                .all(|w| w[1] % w[0] == 0)
    }
}

impl fmt::Display for AbelianGroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elementary_divisors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .elementary_divisors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Group law of a finite abelian group, written multiplicatively.
pub trait GroupLaw {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    fn identity(&self) -> Self::Elem;

    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut result = self.identity();
        let mut base = a.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = self.op(&result, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.op(&base, &base);
            }
        }
        result
    }

    /// Order of `a`, given a multiple `n` of it with known factorisation.
    fn order_dividing(&self, a: &Self::Elem, n: u64, factors: &[(u64, u32)]) -> u64 {
        let id = self.identity();
        let mut ord = n;
        for &(p, e) in factors {
            for _ in 0..e {
                if ord % p == 0 && self.pow(a, ord / p) == id {
                    ord /= p;
                } else {
                    break;
                }
            }
        }
        ord
    }
}

/// A group with every element listed, its element orders, and a basis realizing its invariant factors.
#[derive(Debug, Clone)]
pub struct EnumeratedGroup<L: GroupLaw> {
    pub law: L,
    pub elements: Vec<L::Elem>,
    pub index: HashMap<L::Elem, usize>,
    pub orders: Vec<u64>,
    pub descriptor: AbelianGroupDescriptor,
    /// generators[i] has order descriptor.elementary_divisors[i].
    pub generators: Vec<L::Elem>,
    /// For each prime dividing the order: a basis of the Sylow subgroup as (generator, exponent), largest first.
    pub sylow_bases: Vec<(u64, Vec<(L::Elem, u32)>)>,
}

impl<L: GroupLaw> EnumeratedGroup<L> {
    /// Builds the structure from a complete, duplicate-free list of the group's elements.
    pub fn new(law: L, elements: Vec<L::Elem>) -> Self {
        let n = elements.len() as u64;
        assert!(n >= 1);
        let index: HashMap<L::Elem, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        assert_eq!(index.len(), elements.len(), "duplicate group elements");
        let factors = factorize(n);
        let orders: Vec<u64> = elements
            .iter()
            .map(|g| law.order_dividing(g, n, &factors))
            .collect();

        let mut sylow_bases = Vec::new();
        for &(p, _) in &factors {
            let members: Vec<usize> = (0..elements.len())
                .filter(|&i| is_power_of(orders[i], p))
                .collect();
            let basis = p_group_basis(&law, &elements, &members, p);
            sylow_bases.push((p, basis));
        }

        let t = sylow_bases.iter().map(|(_, b)| b.len()).max().unwrap_or(0);
        let mut divisors = vec![1u64; t];
        let mut generators = vec![law.identity(); t];
        for (p, basis) in &sylow_bases {
            // basis is sorted by decreasing exponent; align with the largest invariant factors.
            for (i, (g, e)) in basis.iter().enumerate() {
                let slot = t - 1 - i;
                divisors[slot] *= p.pow(*e);
                generators[slot] = law.op(&generators[slot], g);
            }
        }
        let descriptor = AbelianGroupDescriptor {
            elementary_divisors: divisors,
        };
        debug_assert!(descriptor.is_normalized());
        debug_assert_eq!(descriptor.order(), n);
        Self {
            law,
            elements,
            index,
            orders,
            descriptor,
            generators,
            sylow_bases,
        }
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn identity_index(&self) -> usize {
        self.index[&self.law.identity()]
    }

    pub fn position(&self, e: &L::Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Sylow p-subgroup as its own enumerated group.
    pub fn sylow(&self, p: u64) -> EnumeratedGroup<L>
    where
        L: Clone,
    {
        let elements: Vec<L::Elem> = self
            .elements
            .iter()
            .zip(&self.orders)
            .filter(|(_, &o)| is_power_of(o, p))
            .map(|(e, _)| e.clone())
            .collect();
        EnumeratedGroup::new(self.law.clone(), elements)
    }
}

fn is_power_of(mut n: u64, p: u64) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Basis of a finite abelian p-group: repeatedly take an element of maximal order modulo the
/// span so far, and correct it by an element of the span so its order does not drop in the quotient.
fn p_group_basis<L: GroupLaw>(
    law: &L,
    elements: &[L::Elem],
    members: &[usize],
    p: u64,
) -> Vec<(L::Elem, u32)> {
    let id = law.identity();
    let mut span: HashMap<L::Elem, Vec<u64>> = HashMap::new();
    span.insert(id.clone(), Vec::new());
    let mut basis: Vec<(L::Elem, u32)> = Vec::new();
    while span.len() < members.len() {
        let mut best: Option<(usize, u32, L::Elem)> = None;
        for &i in members {
            let g = &elements[i];
            if span.contains_key(g) {
                continue;
            }
            let mut x = g.clone();
            let mut b = 0u32;
            while !span.contains_key(&x) {
                x = law.pow(&x, p);
                b += 1;
            }
            if best.as_ref().map_or(true, |(_, bb, _)| b > *bb) {
                best = Some((i, b, x));
            }
        }
        let (i, b, landing) = best.expect("span smaller than group but no element outside it");
        let pb = p.pow(b);
        let coords = span[&landing].clone();
        let mut g = elements[i].clone();
        for (j, (gen, e)) in basis.iter().enumerate() {
            let m = coords[j];
            let x = if *e <= b {
                assert_eq!(m, 0, "basis correction failed");
                0
            } else {
                assert_eq!(m % pb, 0, "basis correction failed");
                m / pb
            };
            if x != 0 {
                let ord = p.pow(*e);
                g = law.op(&g, &law.pow(gen, ord - x));
            }
        }
        let mut new_span = HashMap::with_capacity(span.len() * pb as usize);
        for (elem, c) in &span {
            let mut cur = elem.clone();
            for j in 0..pb {
                let mut c2 = c.clone();
                c2.push(j);
                new_span.insert(cur.clone(), c2);
                cur = law.op(&cur, &g);
            }
        }
        span = new_span;
        basis.push((g, b));
    }
    basis.sort_by(|a, b| b.1.cmp(&a.1));
    basis
}

/// Z/n_1 x ... x Z/n_k with componentwise addition; handy for tests and synthetic examples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicProduct {
    pub moduli: Vec<u64>,
}

impl CyclicProduct {
    pub fn new(moduli: &[u64]) -> Self {
        Self {
            moduli: moduli.to_vec(),
        }
    }

    pub fn all_elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &m in &self.moduli {
            let mut next = Vec::with_capacity(out.len() * m as usize);
            for v in &out {
                for x in 0..m {
                    let mut w = v.clone();
                    w.push(x);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    pub fn enumerate(&self) -> EnumeratedGroup<CyclicProduct> {
        EnumeratedGroup::new(self.clone(), self.all_elements())
    }
}

impl GroupLaw for CyclicProduct {
    type Elem = Vec<u64>;

    fn identity(&self) -> Vec<u64> {
        vec![0; self.moduli.len()]
    }

    fn op(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }
}

/// Quotient of an enumerated group by a subgroup; elements are canonical coset representatives.
#[derive(Debug, Clone)]
pub struct QuotientLaw<L: GroupLaw> {
    pub inner: L,
    canonical: HashMap<L::Elem, L::Elem>,
}

impl<L: GroupLaw + Clone> QuotientLaw<L> {
    /// Returns the law and the list of coset representatives.
    pub fn new(group: &EnumeratedGroup<L>, subgroup: &[L::Elem]) -> (Self, Vec<L::Elem>) {
        let mut canonical: HashMap<L::Elem, L::Elem> = HashMap::new();
        let mut reps = Vec::new();
        for g in &group.elements {
            if canonical.contains_key(g) {
                continue;
            }
            reps.push(g.clone());
            for s in subgroup {
                canonical.insert(group.law.op(g, s), g.clone());
            }
        }
        (
            Self {
                inner: group.law.clone(),
                canonical,
            },
            reps,
        )
    }
}

impl<L: GroupLaw> GroupLaw for QuotientLaw<L> {
    type Elem = L::Elem;

    fn identity(&self) -> L::Elem {
        self.canonical[&self.inner.identity()].clone()
    }

    fn op(&self, a: &L::Elem, b: &L::Elem) -> L::Elem {
        self.canonical[&self.inner.op(a, b)].clone()
    }
}
