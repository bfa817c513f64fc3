use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use volcano_core::config::Caps;
use volcano_core::isogeny::field::is_irreducible_mod_p;
use volcano_core::isogeny::*;
use volcano_core::solvability::{Crater, VolcanoSpec};

fn field(p: u64, k: u32) -> FieldCtx {
    build_field(p, k, &Caps::default()).unwrap()
}

// ---------- modular polynomials ----------

/// j(q) * q as a power series with `n` terms, from E4^3 / prod (1 - q^m)^24.
fn j_series(n: usize) -> Vec<BigInt> {
    let mut e4 = vec![BigInt::zero(); n];
    e4[0] = BigInt::one();
    for m in 1..n {
        let sigma3: u64 = (1..=m as u64).filter(|d| m as u64 % d == 0).map(|d| d.pow(3)).sum();
        e4[m] = BigInt::from(240u64 * sigma3);
    }
    let mul = |a: &[BigInt], b: &[BigInt]| {
        let mut out = vec![BigInt::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                out[i + j] += x * y;
            }
        }
        out
    };
    let e4_3 = mul(&mul(&e4, &e4), &e4);
    // eta-product prod (1 - q^m)^24
    let mut eta = vec![BigInt::zero(); n];
    eta[0] = BigInt::one();
    for m in 1..n {
        for _ in 0..24 {
            for i in (m..n).rev() {
                let t = eta[i - m].clone();
                eta[i] -= t;
            }
        }
    }
    // power-series inverse of eta (leading coefficient 1)
    let mut inv = vec![BigInt::zero(); n];
    inv[0] = BigInt::one();
    for i in 1..n {
        let mut s = BigInt::zero();
        for k in 1..=i {
            s += &eta[k] * &inv[i - k];
        }
        inv[i] = -s;
    }
    mul(&e4_3, &inv)
}

#[test]
fn j_series_known_coefficients() {
    let j = j_series(4);
    assert_eq!(j[0], BigInt::from(1));
    assert_eq!(j[1], BigInt::from(744));
    assert_eq!(j[2], BigInt::from(196884));
    assert_eq!(j[3], BigInt::from(21493760));
}

#[test]
fn phi_vanishes_on_q_expansions() {
    for ell in [2u64, 3, 5, 7] {
        let phi = modular_polynomial(ell).unwrap();
        let l = ell as usize;
        let shift = l * (l + 1);
        let checked = 12;
        let n = shift + checked + 1;
        let j = j_series(n);
        // J(q^ell)
        let mut jl = vec![BigInt::zero(); n];
        for (i, c) in j.iter().enumerate() {
            if i * l < n {
                jl[i * l] = c.clone();
            }
        }
        let mul = |a: &[BigInt], b: &[BigInt]| {
            let mut out = vec![BigInt::zero(); n];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (k, y) in b.iter().enumerate().take(n - i) {
                    out[i + k] += x * y;
                }
            }
            out
        };
        let mut one = vec![BigInt::zero(); n];
        one[0] = BigInt::one();
        let mut jpow = vec![one.clone()];
        let mut jlpow = vec![one];
        for i in 1..=l + 1 {
            jpow.push(mul(&jpow[i - 1], &j));
            jlpow.push(mul(&jlpow[i - 1], &jl));
        }
        // q^shift * X^a Y^b = q^(shift - a - ell b) J(q)^a J(q^ell)^b
        let mut total = vec![BigInt::zero(); n];
        for a in 0..=l + 1 {
            for b in 0..=l + 1 {
                let c = phi.coeff(a, b);
                if c.is_zero() {
                    continue;
                }
                let pole = a + l * b;
                assert!(pole <= shift, "ell={ell} a={a} b={b}");
                let term = mul(&jpow[a], &jlpow[b]);
                for (i, t) in term.iter().enumerate() {
                    let at = i + shift - pole;
                    if at < n {
                        total[at] += c * t;
                    }
                }
            }
        }
        for (i, t) in total.iter().enumerate().take(shift + checked) {
            assert!(t.is_zero(), "ell={ell}: coefficient of q^{} is {t}", i as i64 - shift as i64);
        }
    }
}

#[test]
fn kronecker_congruence_mod_ell() {
    for ell in [2u64, 3, 5, 7] {
        let phi = modular_polynomial(ell).unwrap();
        let l = ell as usize;
        // (X^ell - Y)(X - Y^ell) = X^(ell+1) - X^ell Y^ell - X Y + Y^(ell+1)
        let mut expected = BTreeMap::new();
        expected.insert((l + 1, 0), 1i64);
        expected.insert((l, l), -1);
        expected.insert((1, 1), -1);
        expected.insert((0, l + 1), 1);
        let m = BigInt::from(ell);
        for a in 0..=l + 1 {
            for b in 0..=l + 1 {
                let want = BigInt::from(*expected.get(&(a, b)).unwrap_or(&0));
                assert!(
                    (phi.coeff(a, b) - want).mod_floor(&m).is_zero(),
                    "ell={ell} X^{a} Y^{b}"
                );
            }
        }
    }
}

#[test]
fn phi2_spec_values() {
    let phi = modular_polynomial(2).unwrap();
    assert_eq!(*phi.coeff(2, 2), BigInt::from(-1));
    assert_eq!(*phi.coeff(1, 1), BigInt::from(40773375));
    assert!(phi.eval(&BigInt::zero(), &BigInt::from(54000)).is_zero());
    // j = 1728 is 2-isogenous to j = 287496 (the order of discriminant -16)
    assert!(phi.eval(&BigInt::from(1728), &BigInt::from(287496)).is_zero());
}

#[test]
fn unsupported_ell_is_rejected() {
    assert!(modular_polynomial(11).is_err());
    assert!(build_graph(&field(13, 1), 11).is_err());
    assert!(matches!(
        build_graph(&field(7, 1), 7),
        Err(volcano_core::Error::PrimeEqualsEll(7))
    ));
}

// ---------- fields ----------

#[test]
fn spec_field_examples() {
    assert_eq!(field(7, 2).modulus, vec![1, 0, 1]);
    assert_eq!(field(5, 1).q, 5);
    // smallest monic irreducible quartic over F_3, by trial division by every monic
    // polynomial of degree 1 and 2
    let f = field(3, 4);
    let divides = |d: &[u64], g: &[u64]| {
        let mut r = g.to_vec();
        let dd = d.len() - 1;
        while r.len() > dd {
            let c = *r.last().unwrap();
            let s = r.len() - 1 - dd;
            for (i, &x) in d.iter().enumerate() {
                r[s + i] = (r[s + i] + 3 * 3 - c * x % 3) % 3;
            }
            r.pop();
        }
        r.iter().all(|&x| x == 0)
    };
    let irreducible = |g: &[u64]| {
        for deg in 1..=2usize {
            for n in 0..3u64.pow(deg as u32) {
                let mut d: Vec<u64> = (0..deg).map(|i| n / 3u64.pow(i as u32) % 3).collect();
                d.push(1);
                if divides(&d, g) {
                    return false;
                }
            }
        }
        true
    };
    let first = (0..81u64)
        .map(|n| {
            let mut g: Vec<u64> = (0..4).map(|i| n / 3u64.pow(i) % 3).collect();
            g.push(1);
            g
        })
        .find(|g| irreducible(g))
        .unwrap();
    assert_eq!(f.modulus, first);
    assert!(is_irreducible_mod_p(&f.modulus, 3));
}

#[test]
fn field_errors() {
    let caps = Caps::default();
    assert!(matches!(build_field(9, 1, &caps), Err(volcano_core::Error::NotPrime(9))));
    assert!(matches!(
        build_field(3, 12, &caps),
        Err(volcano_core::Error::CapExceeded { .. })
    ));
}

#[test]
fn frobenius_is_identity_on_every_element() {
    for (p, k) in [(2u64, 10u32), (3, 7), (5, 5), (13, 3), (101, 2), (65521, 1)] {
        let f = field(p, k);
        let mut seen = vec![false; f.q as usize];
        for x in f.elements() {
            assert_eq!(f.pow(x, f.q), x);
            seen[f.index(x) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}

// ---------- supersingular j-invariants ----------

#[test]
fn supersingular_spec_examples() {
    let f = field(13, 1);
    assert!(is_supersingular(f.from_u64(5), &f));
    assert!(!is_supersingular(f.from_u64(1), &f));
    let f3 = field(3, 3);
    assert!(f3.elements().all(|j| !is_supersingular(j, &f3)));
}

/// The number of supersingular j-invariants in characteristic p is floor(p/12) plus 0, 1, 1, 2
/// for p = 1, 5, 7, 11 mod 12. All of them lie in F_{p^2}.
#[test]
fn supersingular_counts_over_p_squared() {
    for p in volcano_core::arith::primes_up_to(120).into_iter().filter(|&p| p >= 5) {
        let f = field(p, 2);
        let extra = match p % 12 {
            1 => 0,
            5 | 7 => 1,
            _ => 2,
        };
        let mut count = 0;
        for j in f.elements() {
            // j = 0 and 1728 through the special models
            if is_supersingular_naive(j, &f) {
                count += 1;
            }
        }
        assert_eq!(count, p / 12 + extra, "p={p}");
        let filtered = f
            .elements()
            .filter(|&j| j != ZERO && j != f.from_u64(1728))
            .filter(|&j| is_supersingular(j, &f))
            .count();
        let special = [ZERO, f.from_u64(1728)]
            .iter()
            .filter(|&&j| is_supersingular_naive(j, &f))
            .count() as u64;
        assert_eq!(filtered as u64 + special, p / 12 + extra, "p={p}");
    }
}

// ---------- graphs ----------

/// 2-isogenous j-invariants from the three 2-torsion points, by Velu's formulas.
fn velu_two_neighbours(f: &FieldCtx, j: Elem) -> BTreeMap<u32, u32> {
    let j1728 = f.from_u64(1728);
    let t = f.sub(j1728, j);
    let a = f.mul(f.from_u64(3), f.mul(j, t));
    let b = f.mul(f.from_u64(2), f.mul(j, f.mul(t, t)));
    let mut out = BTreeMap::new();
    for x0 in f.elements() {
        let rhs = f.add(f.add(f.mul(x0, f.mul(x0, x0)), f.mul(a, x0)), b);
        if rhs != ZERO {
            continue;
        }
        let tt = f.add(f.mul(f.from_u64(3), f.mul(x0, x0)), a);
        let w = f.mul(x0, tt);
        let a2 = f.sub(a, f.mul(f.from_u64(5), tt));
        let b2 = f.sub(b, f.mul(f.from_u64(7), w));
        let a3 = f.mul(f.from_u64(4), f.mul(a2, f.mul(a2, a2)));
        let den = f.add(a3, f.mul(f.from_u64(27), f.mul(b2, b2)));
        let j2 = f.mul(f.from_u64(1728), f.mul(a3, f.inv(den)));
        *out.entry(f.index(j2)).or_insert(0) += 1;
    }
    out
}

#[test]
fn two_isogeny_edges_match_velu() {
    for (p, k) in [(7u64, 1u32), (11, 1), (13, 1), (31, 1), (101, 1), (5, 2), (7, 2), (11, 3), (5, 3)] {
        let f = field(p, k);
        let g = build_graph(&f, 2).unwrap();
        let j1728 = f.index(f.from_u64(1728));
        for (v, &j) in g.vertices.iter().enumerate() {
            let mut want = velu_two_neighbours(&f, j);
            want.retain(|&idx, _| {
                idx != 0 && idx != j1728 && !is_supersingular(f.from_index(idx), &f)
            });
            let got: BTreeMap<u32, u32> =
                g.adj[v].iter().map(|&(w, m)| (f.index(g.vertices[w]), m)).collect();
            assert_eq!(got, want, "p={p} k={k} j={}", f.index(j));
        }
    }
}

#[test]
fn graph_invariants_on_many_fields() {
    let cases = [
        (5u64, 2u32, 2u64),
        (7, 1, 3),
        (13, 2, 3),
        (31, 2, 2),
        (101, 1, 5),
        (2, 9, 3),
        (3, 6, 2),
        (3, 5, 7),
        (2, 8, 5),
        (23, 2, 7),
        (1009, 1, 2),
    ];
    for (p, k, ell) in cases {
        let f = field(p, k);
        let g = build_graph(&f, ell).unwrap();
        let j1728 = f.from_u64(1728);
        let n = g.vertices.len();
        let ordinary = f
            .elements()
            .filter(|&j| j != ZERO && j != j1728 && !is_supersingular(j, &f))
            .count();
        assert_eq!(n, ordinary);
        for v in 0..n {
            assert!(g.degree(v) <= ell as u32 + 1);
            for &(w, m) in &g.adj[v] {
                assert_eq!(g.multiplicity(w, v), m, "asymmetric edge p={p} k={k} ell={ell}");
            }
        }
        let comps = g.components();
        let mut all: Vec<usize> = comps.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..n).collect::<Vec<_>>());
        for (c, cls) in g.classify_all() {
            if p >= 5 && !g.touches_excluded(&c) {
                assert!(cls.is_volcano(), "p={p} k={k} ell={ell} component {c:?}");
            }
            if let Some(spec) = cls.spec {
                // crater horizontal degree is 0, 1 or 2
                let crater = &cls.levels[0];
                let inside: u32 = g.adj[crater[0]]
                    .iter()
                    .filter(|(w, _)| crater.contains(w))
                    .map(|&(_, m)| m)
                    .sum();
                assert!(inside <= 2);
                assert_eq!(cls.levels.len() as u32, spec.d + 1);
            }
        }
    }
}

#[test]
fn no_s2_depth_one_over_p_squared_for_small_p() {
    let v = VolcanoSpec::new(Crater::S2, None, 2, 1).unwrap();
    for p in volcano_core::arith::primes_up_to(31).into_iter().filter(|&p| p > 2) {
        let g = build_graph(&field(p, 2), 2).unwrap();
        assert!(!contains_volcano(&g, &v), "p={p}");
    }
}

#[test]
fn dot_output_lists_every_vertex_and_edge() {
    let f = field(31, 2);
    let g = build_graph(&f, 2).unwrap();
    let dot = g.to_dot();
    assert!(dot.starts_with("graph "));
    assert_eq!(dot.matches("subgraph cluster_").count(), g.components().len());
    let edges: u32 = (0..g.vertices.len())
        .flat_map(|v| g.adj[v].iter().filter(move |&&(w, _)| w >= v).map(|&(_, m)| m))
        .sum();
    assert_eq!(dot.matches(" -- ").count() as u32, edges);
    assert!(dot.contains("(S4, 2, 3)"));
}

// ---------- classifier on synthetic volcanoes ----------

/// A volcano built to order: crater of the given shape, then ell + 1 - (crater degree) children
/// under each crater vertex and ell children under each deeper non-floor vertex.
fn synthetic(crater: Crater, n: u32, ell: u64, d: u32) -> Adjacency {
    let mut adj: Adjacency = Vec::new();
    let link = |adj: &mut Adjacency, v: usize, w: usize, m: u32| {
        adj[v].push((w, m));
        if v != w {
            adj[w].push((v, m));
        }
    };
    let size = match crater {
        Crater::I1 | Crater::R1 | Crater::S1 => 1,
        Crater::R2 | Crater::S2 => 2,
        Crater::Sn => n as usize,
    };
    adj.resize(size, Vec::new());
    let crater_deg = match crater {
        Crater::I1 => 0,
        Crater::R1 | Crater::R2 => 1,
        _ => 2,
    };
    match crater {
        Crater::I1 => {}
        Crater::R1 => link(&mut adj, 0, 0, 1),
        Crater::S1 => link(&mut adj, 0, 0, 2),
        Crater::R2 => link(&mut adj, 0, 1, 1),
        Crater::S2 => link(&mut adj, 0, 1, 2),
        Crater::Sn => {
            for i in 0..size {
                link(&mut adj, i, (i + 1) % size, 1);
            }
        }
    }
    let mut frontier: Vec<usize> = (0..size).collect();
    for level in 1..=d {
        let mut next = Vec::new();
        for &v in &frontier {
            let kids = if level == 1 { ell as u32 + 1 - crater_deg } else { ell as u32 };
            for _ in 0..kids {
                let w = adj.len();
                adj.push(Vec::new());
                link(&mut adj, v, w, 1);
                next.push(w);
            }
        }
        frontier = next;
    }
    adj
}

fn all_craters() -> Vec<(Crater, u32)> {
    vec![
        (Crater::I1, 1),
        (Crater::R1, 1),
        (Crater::S1, 1),
        (Crater::R2, 2),
        (Crater::S2, 2),
        (Crater::Sn, 3),
        (Crater::Sn, 5),
    ]
}

#[test]
fn synthetic_volcanoes_classify_exactly() {
    for ell in [2u64, 3] {
        for (crater, n) in all_craters() {
            for d in 0..=3 {
                let adj = synthetic(crater, n, ell, d);
                let comp: Vec<usize> = (0..adj.len()).collect();
                let cls = classify(&adj, &comp, ell);
                let want = VolcanoSpec::new(crater, Some(n), ell, d).unwrap();
                assert_eq!(cls.spec, Some(want), "{crater:?} n={n} ell={ell} d={d}");
                assert_eq!(cls.levels.len() as u32, d + 1);
            }
        }
    }
}

#[test]
fn damaged_volcanoes_are_rejected() {
    for ell in [2u64, 3] {
        for (crater, n) in all_craters() {
            for d in 1..=3 {
                let want = VolcanoSpec::new(crater, Some(n), ell, d).unwrap();
                // drop the last floor vertex: a smaller volcano at best, never the original
                
                let mut adj = synthetic(crater, n, ell, d);
                let last = adj.len() - 1;
                adj.pop();
                for row in adj.iter_mut() {
                    row.retain(|&(w, _)| w != last);
                }
                let comp: Vec<usize> = (0..adj.len()).collect();
                assert_ne!(classify(&adj, &comp, ell).spec, Some(want), "{crater:?} ell={ell} d={d}");

                // an extra edge from a floor vertex back to the crater
                let mut adj = synthetic(crater, n, ell, d);
                let (a, b) = (adj.len() - 1, 0);
                adj[a].push((b, 1));
                adj[b].push((a, 1));
                let comp: Vec<usize> = (0..adj.len()).collect();
                assert_ne!(classify(&adj, &comp, ell).spec, Some(want), "{crater:?} ell={ell} d={d}");
            }
        }
    }
}

#[test]
fn classifier_spec_examples() {
    let single: Adjacency = vec![vec![]];
    assert_eq!(
        classify(&single, &[0], 2).spec,
        Some(VolcanoSpec::new(Crater::I1, None, 2, 0).unwrap())
    );
    let path: Adjacency = vec![vec![(1, 1)], vec![(0, 1), (2, 1)], vec![(1, 1)]];
    assert!(!classify(&path, &[0, 1, 2], 2).is_volcano());
    // double edge with one pendant vertex on each side
    let s2: Adjacency = vec![vec![(1, 2), (2, 1)], vec![(0, 2), (3, 1)], vec![(0, 1)], vec![(1, 1)]];
    assert_eq!(
        classify(&s2, &[0, 1, 2, 3], 2).spec,
        Some(VolcanoSpec::new(Crater::S2, None, 2, 1).unwrap())
    );
}

#[test]
fn empty_graph_contains_nothing() {
    let f = field(13, 1);
    let g = IsogenyGraph {
        field: f,
        ell: 2,
        vertices: vec![],
        adj: vec![],
        meets_excluded: vec![],
    };
    for (crater, n) in all_craters() {
        let v = VolcanoSpec::new(crater, Some(n), 2, 0).unwrap();
        assert!(!contains_volcano(&g, &v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_ignores_vertex_labels(
        which in 0usize..7, ell in 2u64..4, d in 0u32..4, seed in any::<u64>()
    ) {
        let (crater, n) = all_craters()[which];
        let adj = synthetic(crater, n, ell, d);
        let size = adj.len();
        let mut perm: Vec<usize> = (0..size).collect();
        let mut s = seed;
        for i in (1..size).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut shuffled: Adjacency = vec![Vec::new(); size];
        for (v, row) in adj.iter().enumerate() {
            shuffled[perm[v]] = row.iter().map(|&(w, m)| (perm[w], m)).collect();
        }
        let comp: Vec<usize> = (0..size).collect();
        prop_assert_eq!(classify(&shuffled, &comp, ell).spec, classify(&adj, &comp, ell).spec);
    }
}
