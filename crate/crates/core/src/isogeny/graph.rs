//! The ordinary ell-isogeny graph over F_{p^k} and the volcano classifier.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::field::{Elem, FieldCtx, ZERO};
use super::modpoly::modular_polynomial;
use super::poly::roots_with_multiplicity;
use crate::error::{Error, Result};
use crate::solvability::{Crater, VolcanoSpec};

/// Adjacency lists: for each vertex, its distinct neighbours with edge multiplicity.
/// A self-loop appears as the vertex itself, counted once per root occurrence.
pub type Adjacency = Vec<Vec<(usize, u32)>>;

/// Coefficients (a, b) of y^2 = x^3 + a x + b with the given j-invariant.
fn curve_with_j(f: &FieldCtx, j: Elem) -> (Elem, Elem) {
    let j1728 = f.from_u64(1728);
    if j == ZERO {
        (ZERO, f.one())
    } else if j == j1728 {
        (f.one(), ZERO)
    } else {
        let t = f.sub(j1728, j);
        let a = f.mul(f.from_u64(3), f.mul(j, t));
        let b = f.mul(f.from_u64(2), f.mul(j, f.mul(t, t)));
        (a, b)
    }
}

/// #E(F_q) for y^2 = x^3 + a x + b, by summing the quadratic character.
pub fn count_points(f: &FieldCtx, a: Elem, b: Elem) -> u64 {
    let mut s: i64 = 0;
    for x in f.elements() {
        let x3 = f.mul(x, f.mul(x, x));
        let rhs = f.add(f.add(x3, f.mul(a, x)), b);
        s += f.legendre(rhs) as i64;
    }
    (f.q as i64 + 1 + s) as u64
}

/// Supersingularity by point count: #E = 1 mod p.
pub fn is_supersingular_naive(j: Elem, f: &FieldCtx) -> bool {
    if f.p <= 3 {
        return false;
    }
    let (a, b) = curve_with_j(f, j);
    count_points(f, a, b) % f.p == 1
}

type Point = Option<(Elem, Elem)>;

fn ec_add(f: &FieldCtx, a: Elem, p1: Point, p2: Point) -> Point {
    let (Some((x1, y1)), Some((x2, y2))) = (p1, p2) else {
        return p1.or(p2);
    };
    let lambda = if x1 == x2 {
        if f.add(y1, y2) == ZERO {
            return None;
        }
        let x1sq = f.mul(x1, x1);
        let num = f.add(f.mul(f.from_u64(3), x1sq), a);
        f.mul(num, f.inv(f.add(y1, y1)))
    } else {
        f.mul(f.sub(y2, y1), f.inv(f.sub(x2, x1)))
    };
    let x3 = f.sub(f.sub(f.mul(lambda, lambda), x1), x2);
    let y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
    Some((x3, y3))
}

fn ec_mul(f: &FieldCtx, a: Elem, pt: Point, mut n: u64) -> Point {
    let mut acc = None;
    let mut base = pt;
    while n > 0 {
        if n & 1 == 1 {
            acc = ec_add(f, a, acc, base);
        }
        n >>= 1;
        if n > 0 {
            base = ec_add(f, a, base, base);
        }
    }
    acc
}

/// Whether some N = q + 1 - t with p | t and t^2 <= 4q kills the point. Every point on a
/// supersingular curve passes.
fn killed_by_supersingular_order(f: &FieldCtx, a: Elem, pt: Point) -> bool {
    let q = f.q as i128;
    let p = f.p as i128;
    let mut m = 0i128;
    while (p * (m + 1)).pow(2) <= 4 * q {
        m += 1;
    }
    let mut r = ec_mul(f, a, pt, (q + 1 - p * m) as u64);
    let step = ec_mul(f, a, pt, f.p);
    for _ in -m..=m {
        if r.is_none() {
            return true;
        }
        r = ec_add(f, a, r, step);
    }
    false
}

/// Supersingularity of j over F_{p^k}. Candidates must lie in F_{p^2} and pass a group-order
/// test on two points; those are confirmed by a point count.
pub fn is_supersingular(j: Elem, f: &FieldCtx) -> bool {
    if f.p <= 3 || !f.in_subfield(j, 2) {
        return false;
    }
    let (a, b) = curve_with_j(f, j);
    let mut tested = 0;
    for x in f.elements() {
        let rhs = f.add(f.add(f.mul(x, f.mul(x, x)), f.mul(a, x)), b);
        let y = match rhs {
            ZERO => ZERO,
            e if e % 2 == 0 => e / 2,
            _ => continue,
        };
        if !killed_by_supersingular_order(f, a, Some((x, y))) {
            return false;
        }
        tested += 1;
        if tested == 2 {
            break;
        }
    }
    is_supersingular_naive(j, f)
}

#[derive(Debug, Clone)]
pub struct IsogenyGraph {
    pub field: FieldCtx,
    pub ell: u64,
    /// Ordinary j-invariants other than 0 and 1728, in order of encoding.
    pub vertices: Vec<Elem>,
    pub adj: Adjacency,
    /// Whether Phi(j, Y) has a root at 0 or 1728.
    pub meets_excluded: Vec<bool>,
}

pub fn build_graph(f: &FieldCtx, ell: u64) -> Result<IsogenyGraph> {
    if ell == f.p {
        return Err(Error::PrimeEqualsEll(ell));
    }
    let phi = modular_polynomial(ell)?.reduce(f.p);
    let phi: Vec<Vec<Elem>> = phi
        .iter()
        .map(|row| row.iter().map(|&c| f.from_u64(c)).collect())
        .collect();
    let j0 = ZERO;
    let j1728 = f.from_u64(1728);

    let vertices: Vec<Elem> = (0..f.q as u32)
        .into_par_iter()
        .map(|i| f.from_index(i))
        .filter(|&j| j != j0 && j != j1728 && !is_supersingular(j, f))
        .collect();
    let mut position = vec![u32::MAX; f.q as usize];
    for (v, &j) in vertices.iter().enumerate() {
        position[f.index(j) as usize] = v as u32;
    }

    let rows: Vec<(Vec<(usize, u32)>, bool)> = vertices
        .par_iter()
        .map(|&j| {
            let n = ell as usize + 2;
            let mut jpow = vec![f.one(); n];
            for a in 1..n {
                jpow[a] = f.mul(jpow[a - 1], j);
            }
            let coeffs: Vec<Elem> = (0..n)
                .map(|b| (0..n).fold(ZERO, |acc, a| f.add(acc, f.mul(phi[a][b], jpow[a]))))
                .collect();
            let mut nbrs = Vec::new();
            let mut excluded = false;
            for (r, m) in roots_with_multiplicity(f, &coeffs) {
                if r == j0 || r == j1728 {
                    excluded = true;
                    continue;
                }
                let w = position[f.index(r) as usize];
                if w != u32::MAX {
                    nbrs.push((w as usize, m));
                }
            }
            (nbrs, excluded)
        })
        .collect();
    let (adj, meets_excluded) = rows.into_iter().unzip();
    Ok(IsogenyGraph {
        field: f.clone(),
        ell,
        vertices,
        adj,
        meets_excluded,
    })
}

/// Connected components as sorted vertex lists, ordered by smallest vertex.
pub fn components(adj: &Adjacency) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolcanoClassification {
    /// None when the component is not a volcano.
    pub spec: Option<VolcanoSpec>,
    /// Vertices by level, crater first. Empty when not a volcano.
    pub levels: Vec<Vec<usize>>,
}

impl VolcanoClassification {
    fn not_volcano() -> Self {
        Self {
            spec: None,
            levels: Vec::new(),
        }
    }

    pub fn is_volcano(&self) -> bool {
        self.spec.is_some()
    }

    pub fn label(&self) -> String {
        match &self.spec {
            Some(v) => v.to_string(),
            None => "NotVolcano".into(),
        }
    }
}

fn mult(adj: &Adjacency, v: usize, w: usize) -> u32 {
    adj[v].iter().filter(|&&(x, _)| x == w).map(|&(_, m)| m).sum()
}

fn crater_shape(adj: &Adjacency, crater: &[usize]) -> Option<(Crater, u32)> {
    match crater {
        [v] => match mult(adj, *v, *v) {
            0 => Some((Crater::I1, 1)),
            1 => Some((Crater::R1, 1)),
            2 => Some((Crater::S1, 1)),
            _ => None,
        },
        [v, w] => {
            if mult(adj, *v, *v) != 0 || mult(adj, *w, *w) != 0 {
                return None;
            }
            match mult(adj, *v, *w) {
                1 => Some((Crater::R2, 2)),
                2 => Some((Crater::S2, 2)),
                _ => None,
            }
        }
        _ => {
            // a simple cycle: every crater vertex has exactly two single edges inside the crater
            let inside = |v: usize| crater.binary_search(&v).is_ok();
            for &v in crater {
                let edges: Vec<_> = adj[v].iter().filter(|&&(w, _)| inside(w)).collect();
                if edges.len() != 2 || edges.iter().any(|&&(w, m)| m != 1 || w == v) {
                    return None;
                }
            }
            Some((Crater::Sn, crater.len() as u32))
        }
    }
}

/// Classifies one connected component by peeling leaves and then checking the level structure.
pub fn classify(adj: &Adjacency, component: &[usize], ell: u64) -> VolcanoClassification {
    let n = adj.len();
    let mut in_comp = vec![false; n];
    for &v in component {
        in_comp[v] = true;
    }
    let degree = |v: usize| adj[v].iter().map(|&(_, m)| m).sum::<u32>();
    let mut alive = in_comp.clone();
    let mut remaining: Vec<usize> = component.to_vec();
    let mut depth = 0u32;
    loop {
        let live_deg = |v: usize, alive: &[bool]| {
            adj[v].iter().filter(|&&(w, _)| alive[w]).map(|&(_, m)| m).sum::<u32>()
        };
        let leaves: Vec<usize> =
            remaining.iter().copied().filter(|&v| live_deg(v, &alive) == 1).collect();
        if leaves.is_empty() || leaves.len() == remaining.len() {
            break;
        }
        for &v in &leaves {
            alive[v] = false;
        }
        remaining.retain(|&v| alive[v]);
        depth += 1;
    }
    let mut crater = remaining;
    crater.sort_unstable();
    let Some((shape, cycle_len)) = crater_shape(adj, &crater) else {
        return VolcanoClassification::not_volcano();
    };

    let mut level = vec![u32::MAX; n];
    let mut levels: Vec<Vec<usize>> = vec![crater.clone()];
    for &v in &crater {
        level[v] = 0;
    }
    let mut frontier = crater.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &v in &frontier {
            for &(w, _) in &adj[v] {
                if level[w] == u32::MAX {
                    level[w] = level[v] + 1;
                    next.push(w);
                }
            }
        }
        next.sort_unstable();
        if !next.is_empty() {
            levels.push(next.clone());
        }
        frontier = next;
    }
    if levels.len() as u32 != depth + 1 {
        return VolcanoClassification::not_volcano();
    }
    for &v in component {
        let i = level[v];
        let deg = degree(v);
        if depth > 0 && i < depth && deg != ell as u32 + 1 {
            return VolcanoClassification::not_volcano();
        }
        if i > 0 {
            let up: u32 = adj[v].iter().filter(|&&(w, _)| level[w] + 1 == i).map(|&(_, m)| m).sum();
            let same: u32 = adj[v].iter().filter(|&&(w, _)| level[w] == i).map(|&(_, m)| m).sum();
            if up != 1 || same != 0 {
                return VolcanoClassification::not_volcano();
            }
            if i == depth && deg != 1 {
                return VolcanoClassification::not_volcano();
            }
        }
    }
    let spec = VolcanoSpec::new(shape, Some(cycle_len), ell, depth).ok();
    match spec {
        Some(spec) => VolcanoClassification {
            spec: Some(spec),
            levels,
        },
        None => VolcanoClassification::not_volcano(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub shape: String,
    pub size: usize,
    /// Encoding of the smallest j-invariant in the component.
    pub min_j: u32,
    pub adjacent_to_excluded: bool,
}

impl IsogenyGraph {
    pub fn components(&self) -> Vec<Vec<usize>> {
        components(&self.adj)
    }

    pub fn classify_all(&self) -> Vec<(Vec<usize>, VolcanoClassification)> {
        self.components()
            .into_iter()
            .map(|c| {
                let cls = classify(&self.adj, &c, self.ell);
                (c, cls)
            })
            .collect()
    }

    pub fn touches_excluded(&self, component: &[usize]) -> bool {
        component.iter().any(|&v| self.meets_excluded[v])
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].iter().map(|&(_, m)| m).sum()
    }

    pub fn multiplicity(&self, v: usize, w: usize) -> u32 {
        mult(&self.adj, v, w)
    }

    pub fn j_label(&self, v: usize) -> String {
        self.field.format(self.vertices[v])
    }

    pub fn report(&self) -> Vec<ComponentReport> {
        self.classify_all()
            .into_iter()
            .map(|(c, cls)| ComponentReport {
                shape: cls.label(),
                size: c.len(),
                min_j: self.field.index(self.vertices[c[0]]),
                adjacent_to_excluded: self.touches_excluded(&c),
            })
            .collect()
    }

    /// Graphviz rendering with one cluster per component, labelled by its classification.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let f = &self.field;
        let _ = writeln!(s, "graph G{}_F{}_{} {{", self.ell, f.p, f.k);
        for (ci, (comp, cls)) in self.classify_all().into_iter().enumerate() {
            let mut label = cls.label();
            if self.touches_excluded(&comp) {
                label.push_str(" [meets 0/1728]");
            }
            let _ = writeln!(s, "  subgraph cluster_{ci} {{");
            let _ = writeln!(s, "    label=\"{label}\";");
            for &v in &comp {
                let _ = writeln!(s, "    \"{}\";", self.j_label(v));
            }
            for &v in &comp {
                for &(w, m) in &self.adj[v] {
                    if w < v {
                        continue;
                    }
                    for _ in 0..m {
                        let _ = writeln!(s, "    \"{}\" -- \"{}\";", self.j_label(v), self.j_label(w));
                    }
                }
            }
            let _ = writeln!(s, "  }}");
        }
        s.push_str("}\n");
        s
    }
}

pub fn contains_volcano(g: &IsogenyGraph, v: &VolcanoSpec) -> bool {
    v.ell == g.ell
        && g
            .components()
            .iter()
            .any(|c| classify(&g.adj, c, g.ell).spec.as_ref() == Some(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supersingular_examples() {
        let f = FieldCtx::new(13, 1, 1000).unwrap();
        assert!(is_supersingular(f.from_u64(5), &f));
        assert!(!is_supersingular(f.from_u64(1), &f));
        assert!(is_supersingular_naive(f.from_u64(5), &f));
        let f3 = FieldCtx::new(3, 2, 1000).unwrap();
        assert!(f3.elements().all(|j| !is_supersingular(j, &f3)));
    }

    #[test]
    fn order_filter_matches_point_count() {
        for (p, k) in [(5u64, 2u32), (7, 2), (11, 2), (13, 1), (17, 2), (23, 1), (7, 3), (5, 4)] {
            let f = FieldCtx::new(p, k, 100_000).unwrap();
            for j in f.elements() {
                assert_eq!(is_supersingular(j, &f), is_supersingular_naive(j, &f), "p={p} k={k}");
            }
        }
    }
}
