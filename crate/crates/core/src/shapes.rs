//! Refined shapes: joint structures with no unpaired vertices in which every
//! stack has length one and every interior arc covers an exterior arc.
//!
//! `G(x, z, u, v)` counts them with `x` marking interior arcs, `z` exterior
//! arcs, `u` exterior arcs of class A₁ and `v` those of class A₂.

use std::collections::{BTreeMap, HashSet};

use crate::diagram::JointDiagram;
use crate::error::{Error, Result};
use crate::mseries::{Caps, Exponent, MSeries, U, V, X, Z};
use crate::secondary::Arc;
use crate::series::rat;

/// Default brute-force limits on interior and exterior arc counts.
pub const DEFAULT_MAX_INTERIOR: u32 = 4;
pub const DEFAULT_MAX_EXTERIOR: u32 = 4;

/// `(t, h, a1, a2)`: interior arcs, exterior arcs, A₁ arcs, A₂ arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShapeClass {
    pub t: u32,
    pub h: u32,
    pub a1: u32,
    pub a2: u32,
}

impl ShapeClass {
    pub fn exponent(&self) -> Exponent {
        [self.t, self.h, self.a1, self.a2]
    }
}

/// Coefficients of the quadratic `A G² + B G + C = 0`, exact polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeAbc {
    pub a: MSeries,
    pub b: MSeries,
    pub c: MSeries,
}

fn var(i: usize) -> MSeries {
    let mut e = [0; 4];
    e[i] = 1;
    MSeries::monomial(e, rat(1), Caps::unbounded())
}

fn konst(k: i64) -> MSeries {
    MSeries::constant(rat(k), Caps::unbounded())
}

pub fn shape_abc() -> ShapeAbc {
    let (x, z, u, v) = (var(X), var(Z), var(U), var(V));
    let x_x2 = &x * &(&x + &konst(2));
    let z1 = &z + &konst(1);
    let x1 = &x + &konst(1);
    let a = &x_x2 * &z1;
    let marked = &(&(&x * &u).scale(&rat(2)) + &(&(&x * &x) * &v)) * &(&z * &z1);
    let b = -&(&(&(&x_x2 * &(&z1 * &z1)) + &(&x1 * &x1)) - &marked);
    let c = &(&x1 * &x1) * &z1;
    ShapeAbc { a, b, c }
}

impl ShapeAbc {
    /// `B² - 4AC` under the given caps.
    pub fn discriminant(&self, caps: Caps) -> MSeries {
        let b = self.b.truncate(caps);
        &(&b * &b) - &(&self.a.truncate(caps) * &self.c.truncate(caps)).scale(&rat(4))
    }

    /// `A G² + B G + C` under the caps of `g`.
    pub fn residual(&self, g: &MSeries) -> MSeries {
        let caps = g.caps();
        let a = self.a.truncate(caps);
        &(&(&a * &(g * g)) + &(&self.b.truncate(caps) * g)) + &self.c.truncate(caps)
    }
}

fn require_finite(caps: Caps) -> Result<Caps> {
    if caps.grade.is_none() {
        return Err(Error::InvalidParams("shape series need a finite grade cap".into()));
    }
    Ok(caps)
}

/// `G = 2C / (−B + √(B² − 4AC))`, the root of the quadratic that is regular
/// at the origin.
pub fn shape_gf_closed(caps: Caps) -> Result<MSeries> {
    let caps = require_finite(caps)?;
    let abc = shape_abc();
    let root = abc.discriminant(caps).sqrt()?;
    let den = &(-&abc.b.truncate(caps)) + &root;
    abc.c.truncate(caps).scale(&rat(2)).div(&den)
}

/// Intermediate series of the grammar:
/// `G = G_RC·I + I`, `G_RC = G·G_C`, `G_C = G_▽ + G_△ + G_□`,
/// `G_▽ = G_△ = xzu + x·G_DT`, `G_□ = x²zv + x²·G_DT`, `G_DT = G − I − G_C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeGrammarState {
    pub g: MSeries,
    pub g_rc: MSeries,
    pub g_dt: MSeries,
    pub g_c: MSeries,
    pub g_tri_down: MSeries,
    pub g_tri_up: MSeries,
    pub g_square: MSeries,
    pub i: MSeries,
    pub iterations: usize,
}

impl ShapeGrammarState {
    pub fn seed(caps: Caps) -> Self {
        let i = &MSeries::one(caps) + &var(Z).truncate(caps);
        let zero = MSeries::zero(caps);
        ShapeGrammarState {
            g: i.clone(),
            g_rc: zero.clone(),
            g_dt: zero.clone(),
            g_c: zero.clone(),
            g_tri_down: zero.clone(),
            g_tri_up: zero.clone(),
            g_square: zero,
            i,
            iterations: 0,
        }
    }

    /// One sweep through the four equations, each using the freshest values.
    pub fn step(&self) -> Self {
        let caps = self.g.caps();
        let x = var(X).truncate(caps);
        let x2 = &x * &x;
        let xzu = MSeries::monomial([1, 1, 1, 0], rat(1), caps);
        let x2zv = MSeries::monomial([2, 1, 0, 1], rat(1), caps);

        let g_dt = &(&self.g - &self.i) - &self.g_c;
        let g_tri_down = &xzu + &(&x * &g_dt);
        let g_tri_up = g_tri_down.clone();
        let g_square = &x2zv + &(&x2 * &g_dt);
        let g_c = &(&g_tri_down + &g_tri_up) + &g_square;
        let g_rc = &self.g * &g_c;
        let g = &(&g_rc * &self.i) + &self.i;
        ShapeGrammarState {
            g,
            g_rc,
            g_dt,
            g_c,
            g_tri_down,
            g_tri_up,
            g_square,
            i: self.i.clone(),
            iterations: self.iterations + 1,
        }
    }

    fn same_values(&self, other: &Self) -> bool {
        self.g == other.g && self.g_c == other.g_c && self.g_dt == other.g_dt
    }
}

/// Fixed point of the shape grammar from the seed `G = I`.
///
/// Each sweep fixes at least one more grade, so the state is stationary
/// after `grade + 1` sweeps; one further sweep confirms it.
pub fn shape_grammar_solve(caps: Caps) -> Result<ShapeGrammarState> {
    let caps = require_finite(caps)?;
    let limit = caps.grade.unwrap_or(0) as usize + 2;
    let mut state = ShapeGrammarState::seed(caps);
    for _ in 0..limit {
        let next = state.step();
        if next.same_values(&state) {
            return Ok(next);
        }
        state = next;
    }
    Err(Error::NoConvergence { iterations: limit })
}

pub fn shape_gf_grammar(caps: Caps) -> Result<MSeries> {
    Ok(shape_grammar_solve(caps)?.g)
}

/// Noncrossing perfect matchings on the given vertices, in order.
fn perfect_matchings(verts: &[usize]) -> Vec<Vec<Arc>> {
    if verts.is_empty() {
        return vec![Vec::new()];
    }
    let a = verts[0];
    let mut out = Vec::new();
    for idx in (1..verts.len()).step_by(2) {
        for inner in perfect_matchings(&verts[1..idx]) {
            for outer in perfect_matchings(&verts[idx + 1..]) {
                let mut arcs = Vec::with_capacity(1 + inner.len() + outer.len());
                arcs.push((a, verts[idx]));
                arcs.extend(inner.iter().copied());
                arcs.extend(outer.iter().copied());
                out.push(arcs);
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Shape class of a diagram, or `None` if it is not a shape.
pub fn classify_shape(d: &JointDiagram) -> Option<ShapeClass> {
    if d.r_partners().iter().chain(d.s_partners().iter()).any(Option::is_none) {
        return None;
    }
    let r: HashSet<Arc> = d.r_arcs().iter().copied().collect();
    let s: HashSet<Arc> = d.s_arcs().iter().copied().collect();
    let ext: HashSet<(usize, usize)> = d.ext_arcs().iter().copied().collect();
    let parallel = |set: &HashSet<Arc>| set.iter().any(|&(i, j)| set.contains(&(i + 1, j.wrapping_sub(1))));
    if parallel(&r) || parallel(&s) || ext.iter().any(|&(a, b)| ext.contains(&(a + 1, b + 1))) {
        return None;
    }
    if d.r_arcs().iter().any(|&a| d.r_descendants(a).is_empty())
        || d.s_arcs().iter().any(|&a| d.s_descendants(a).is_empty())
    {
        return None;
    }
    if !d.is_joint_structure() {
        return None;
    }
    let (mut a1, mut a2) = (0, 0);
    for &(a, b) in d.ext_arcs() {
        let in_r = a > 0 && r.contains(&(a - 1, a + 1));
        let in_s = b > 0 && s.contains(&(b - 1, b + 1));
        match (in_r as u8) + (in_s as u8) {
            1 => a1 += 1,
            2 => a2 += 1,
            _ => {}
        }
    }
    Some(ShapeClass {
        t: (d.r_arcs().len() + d.s_arcs().len()) as u32,
        h: d.ext_arcs().len() as u32,
        a1,
        a2,
    })
}

/// All shapes with exactly `t` interior and `h` exterior arcs.
pub fn enumerate_shape_diagrams(t: u32, h: u32) -> Vec<(JointDiagram, ShapeClass)> {
    let (t, h) = (t as usize, h as usize);
    let mut out = Vec::new();
    for t_r in 0..=t {
        let (n, m) = (2 * t_r + h, 2 * (t - t_r) + h);
        let r_choices = combinations(n, h);
        let s_choices = combinations(m, h);
        for er in &r_choices {
            let rest_r: Vec<usize> = (0..n).filter(|v| !er.contains(v)).collect();
            let r_matchings = perfect_matchings(&rest_r);
            for es in &s_choices {
                let rest_s: Vec<usize> = (0..m).filter(|v| !es.contains(v)).collect();
                let s_matchings = perfect_matchings(&rest_s);
                let ext: Vec<(usize, usize)> = er.iter().copied().zip(es.iter().copied()).collect();
                for mr in &r_matchings {
                    for ms in &s_matchings {
                        let d = JointDiagram::new(n, m, mr.clone(), ms.clone(), ext.clone())
                            .expect("generated arcs are in range");
                        if let Some(class) = classify_shape(&d) {
                            out.push((d, class));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Brute-force counts per class for every `t ≤ max_interior`,
/// `h ≤ max_exterior`.
pub fn enumerate_shapes_bruteforce(max_interior: u32, max_exterior: u32) -> Result<BTreeMap<ShapeClass, u64>> {
    if max_interior > DEFAULT_MAX_INTERIOR {
        return Err(Error::CapExceeded { requested: max_interior as usize, cap: DEFAULT_MAX_INTERIOR as usize });
    }
    if max_exterior > DEFAULT_MAX_EXTERIOR {
        return Err(Error::CapExceeded { requested: max_exterior as usize, cap: DEFAULT_MAX_EXTERIOR as usize });
    }
    let mut counts = BTreeMap::new();
    for t in 0..=max_interior {
        for h in 0..=max_exterior {
            for (_, class) in enumerate_shape_diagrams(t, h) {
                *counts.entry(class).or_insert(0) += 1;
            }
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Rational;
    use num_traits::Zero;

    fn c(g: &MSeries, e: Exponent) -> i64 {
        i64::try_from(g.coeff(&e).to_integer()).unwrap()
    }

    #[test]
    fn abc_values() {
        let abc = shape_abc();
        let at = [rat(1), rat(1), rat(0), rat(0)];
        assert_eq!(abc.a.eval(&at), rat(6));
        assert_eq!(abc.c.eval(&at), rat(8));
        assert_eq!(abc.b.coeff(&[1, 1, 1, 0]), rat(2));
        assert_eq!(abc.b.coeff(&[2, 2, 0, 1]), rat(1));
    }

    #[test]
    fn closed_form_known_coefficients() {
        let g = shape_gf_closed(Caps::grade(6)).unwrap();
        assert_eq!(c(&g, [0, 0, 0, 0]), 1);
        assert_eq!(c(&g, [0, 1, 0, 0]), 1);
        assert_eq!(c(&g, [1, 1, 1, 0]), 2);
        assert_eq!(c(&g, [2, 1, 0, 1]), 1);
        assert_eq!(c(&g, [1, 2, 1, 0]), 4);
        assert_eq!(c(&g, [2, 2, 1, 0]), 8);
        assert!(g.iter().all(|(_, v)| v.is_integer() && *v > Rational::zero()));
    }

    #[test]
    fn closed_form_is_the_quadratic_root() {
        let caps = Caps::grade(7);
        let g = shape_gf_closed(caps).unwrap();
        let abc = shape_abc();
        assert!(abc.residual(&g).is_empty());
        // 2AG = −B − √(B²−4AC), the unrationalized form.
        let lhs = &abc.a.truncate(caps) * &g.scale(&rat(2));
        let rhs = &(-&abc.b.truncate(caps)) - &abc.discriminant(caps).sqrt().unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn grammar_matches_closed_form() {
        let caps = Caps::grade(8);
        let state = shape_grammar_solve(caps).unwrap();
        assert_eq!(state.g, shape_gf_closed(caps).unwrap());
        assert!(state.iterations <= 8 + 2);
        assert_eq!(c(&state.g_c, [1, 1, 1, 0]), 2);
        assert_eq!(state.i, &MSeries::one(caps) + &MSeries::monomial([0, 1, 0, 0], rat(1), caps));
        // The grammar equations hold at the fixed point.
        assert_eq!(state.g_dt, &(&state.g - &state.i) - &state.g_c);
        assert_eq!(state.g, &(&state.g_rc * &state.i) + &state.i);
    }

    #[test]
    fn marker_erasure() {
        let caps = Caps::grade(6);
        let g = shape_gf_closed(caps).unwrap().erase_markers();
        assert_eq!(c(&g, [0, 1, 0, 0]), 1);
        // Erasing markers in the quadratic gives the same series.
        let abc = shape_abc();
        let plain = ShapeAbc { a: abc.a.erase_markers(), b: abc.b.erase_markers(), c: abc.c.erase_markers() };
        let d = plain.discriminant(caps).sqrt().unwrap();
        let g2 = plain.c.truncate(caps).scale(&rat(2)).div(&(&(-&plain.b.truncate(caps)) + &d)).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn degree_coupling() {
        let g = shape_gf_closed(Caps::grade(8)).unwrap();
        for (e, _) in g.iter() {
            assert!(e[Z] >= e[U] + e[V], "{e:?}");
            assert!(e[X] >= e[U] + 2 * e[V], "{e:?}");
        }
    }

    #[test]
    fn small_bruteforce_classes() {
        let counts = enumerate_shapes_bruteforce(1, 1).unwrap();
        let get = |t, h, a1, a2| counts.get(&ShapeClass { t, h, a1, a2 }).copied().unwrap_or(0);
        assert_eq!(get(0, 1, 0, 0), 1);
        assert_eq!(get(1, 1, 1, 0), 2);
        assert_eq!(get(0, 0, 0, 0), 1);
        assert!(enumerate_shapes_bruteforce(5, 1).is_err());
    }

    #[test]
    fn bruteforce_matches_series() {
        let g = shape_gf_closed(Caps::grade(6)).unwrap();
        let counts = enumerate_shapes_bruteforce(3, 3).unwrap();
        for t in 0..=3u32 {
            for h in 0..=3u32 {
                let from_g: BTreeMap<Exponent, i64> = g
                    .iter()
                    .filter(|(e, _)| e[X] == t && e[Z] == h)
                    .map(|(e, v)| (*e, i64::try_from(v.to_integer()).unwrap()))
                    .collect();
                let from_b: BTreeMap<Exponent, i64> = counts
                    .iter()
                    .filter(|(k, _)| k.t == t && k.h == h)
                    .map(|(k, v)| (k.exponent(), *v as i64))
                    .collect();
                assert_eq!(from_g, from_b, "t={t} h={h}");
            }
        }
    }

    #[test]
    fn classifier_rejects_non_shapes() {
        // Interior arc without an exterior descendant.
        let d = JointDiagram::new(3, 1, vec![(0, 1)], vec![], vec![(2, 0)]).unwrap();
        assert_eq!(classify_shape(&d), None);
        // Parallel exterior arcs.
        let d = JointDiagram::new(2, 2, vec![], vec![], vec![(0, 0), (1, 1)]).unwrap();
        assert_eq!(classify_shape(&d), None);
        // Unpaired vertex.
        assert_eq!(classify_shape(&JointDiagram::empty(1, 0)), None);
    }
}
