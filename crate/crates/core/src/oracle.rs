//! Brute-force joint structures: validity predicates, exhaustive counting,
//! the decomposition into tight blocks and secondary segments, and the
//! projection onto shapes.

use std::collections::HashSet;

use num_bigint::BigInt;

pub use crate::diagram::{ExtArc, JointDiagram};
use crate::error::{Error, Result};
use crate::secondary::{enumerate_secondary, stacks_ok, Arc, SecondaryParams};
use crate::shapes::{classify_shape, ShapeClass};

/// Largest total size the exhaustive counter accepts by default.
pub fn default_cap(sigma: u32) -> usize {
    if sigma <= 1 {
        9
    } else {
        10
    }
}

/// First violated condition for a σ-canonical joint structure with arc
/// length at least σ+2, if any.
pub fn canonical_violation(d: &JointDiagram, sigma: u32) -> Option<String> {
    if let Some(v) = d.structure_violation() {
        return Some(v);
    }
    let min_len = sigma as usize + 2;
    for (name, arcs) in [("R", d.r_arcs()), ("S", d.s_arcs())] {
        if let Some(&(i, j)) = arcs.iter().find(|&&(i, j)| j - i < min_len) {
            return Some(format!("{name} arc ({i},{j}) is shorter than {min_len}"));
        }
        if !stacks_ok(arcs, sigma) {
            return Some(format!("{name} has a stack shorter than {sigma}"));
        }
    }
    if let Some((e, len)) = d.exterior_stacks().into_iter().find(|&(_, len)| len < sigma as usize) {
        return Some(format!("exterior stack at {e:?} has length {len} < {sigma}"));
    }
    None
}

pub fn is_valid_joint(d: &JointDiagram, sigma: u32) -> bool {
    canonical_violation(d, sigma).is_none()
}

fn choose(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for idx in start..items.len() {
            if items.len() - idx < k - cur.len() {
                break;
            }
            cur.push(items[idx]);
            go(items, k, idx + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

fn free_vertices(len: usize, arcs: &[Arc]) -> Vec<usize> {
    let used: HashSet<usize> = arcs.iter().flat_map(|&(i, j)| [i, j]).collect();
    (0..len).filter(|v| !used.contains(v)).collect()
}

/// Every valid diagram on backbones of lengths `n` and `m`: secondary
/// structures on each side, then noncrossing exterior arcs on the free
/// vertices, then the full validity filter.
pub fn enumerate_joint(sigma: u32, n: usize, m: usize) -> Result<Vec<JointDiagram>> {
    let p = SecondaryParams::canonical(sigma)?;
    let rs = enumerate_secondary(p, n);
    let ss = enumerate_secondary(p, m);
    let mut out = Vec::new();
    for r in &rs {
        let free_r = free_vertices(n, r);
        for s in &ss {
            let free_s = free_vertices(m, s);
            for h in 0..=free_r.len().min(free_s.len()) {
                let cs = choose(&free_s, h);
                for cr in choose(&free_r, h) {
                    for c in &cs {
                        let ext: Vec<ExtArc> = cr.iter().copied().zip(c.iter().copied()).collect();
                        let d = JointDiagram::new(n, m, r.clone(), s.clone(), ext)?;
                        if is_valid_joint(&d, sigma) {
                            out.push(d);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All valid diagrams of total size `s`, over every split `n + m = s`.
pub fn enumerate_joint_size(sigma: u32, s: usize) -> Result<Vec<JointDiagram>> {
    let mut out = Vec::new();
    for n in 0..=s {
        out.extend(enumerate_joint(sigma, n, s - n)?);
    }
    Ok(out)
}

pub fn count_joint_bruteforce(sigma: u32, s: usize) -> Result<BigInt> {
    count_joint_bruteforce_capped(sigma, s, default_cap(sigma))
}

pub fn count_joint_bruteforce_capped(sigma: u32, s: usize, cap: usize) -> Result<BigInt> {
    if s > cap {
        return Err(Error::CapExceeded { requested: s, cap });
    }
    Ok(BigInt::from(enumerate_joint_size(sigma, s)?.len()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TightKind {
    /// A lone exterior arc.
    Circle,
    /// Bounded by an `R` arc only.
    TriangleDown,
    /// Bounded by an `S` arc only.
    TriangleUp,
    /// Bounded by an `R` arc and an `S` arc.
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backbone {
    R,
    S,
}

/// A tight block with inclusive ranges `r = (i, j)` and `s = (i', j')`, and
/// its content re-indexed to start at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TightBlock {
    pub kind: TightKind,
    pub r: (usize, usize),
    pub s: (usize, usize),
    pub content: JointDiagram,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Piece {
    /// Maximal run of one backbone free of exterior arcs, with its arcs
    /// re-indexed to start at zero.
    Segment { backbone: Backbone, start: usize, end: usize, arcs: Vec<Arc> },
    Tight(TightBlock),
}

/// Smallest block containing `seed` closed under taking ancestors of its
/// exterior arcs and descendants of its interior arcs.
fn closure(d: &JointDiagram, seed: ExtArc) -> ((usize, usize), (usize, usize)) {
    let (mut r, mut s) = ((seed.0, seed.0), (seed.1, seed.1));
    loop {
        let prev = (r, s);
        for &(a, b) in d.ext_arcs() {
            let inside = (r.0 <= a && a <= r.1) || (s.0 <= b && b <= s.1);
            if inside {
                r = (r.0.min(a), r.1.max(a));
                s = (s.0.min(b), s.1.max(b));
            }
        }
        for &(i, j) in d.r_arcs() {
            let ancestor = d.ext_arcs().iter().any(|&(a, _)| r.0 <= a && a <= r.1 && i < a && a < j);
            if ancestor || (r.0 <= i && j <= r.1) {
                r = (r.0.min(i), r.1.max(j));
            }
        }
        for &(i, j) in d.s_arcs() {
            let ancestor = d.ext_arcs().iter().any(|&(_, b)| s.0 <= b && b <= s.1 && i < b && b < j);
            if ancestor || (s.0 <= i && j <= s.1) {
                s = (s.0.min(i), s.1.max(j));
            }
        }
        // Descendants of interior arcs now inside the block.
        for &(i, j) in d.r_arcs() {
            if r.0 <= i && j <= r.1 {
                for &(a, b) in d.ext_arcs() {
                    if i < a && a < j {
                        r = (r.0.min(a), r.1.max(a));
                        s = (s.0.min(b), s.1.max(b));
                    }
                }
            }
        }
        for &(i, j) in d.s_arcs() {
            if s.0 <= i && j <= s.1 {
                for &(a, b) in d.ext_arcs() {
                    if i < b && b < j {
                        r = (r.0.min(a), r.1.max(a));
                        s = (s.0.min(b), s.1.max(b));
                    }
                }
            }
        }
        if (r, s) == prev {
            return (r, s);
        }
    }
}

fn local_arcs(arcs: &[Arc], lo: usize, hi: usize) -> Result<Vec<Arc>> {
    let mut out = Vec::new();
    for &(i, j) in arcs {
        let in_i = lo <= i && i <= hi;
        let in_j = lo <= j && j <= hi;
        if in_i != in_j {
            return Err(Error::InvalidDiagram(format!("arc ({i},{j}) straddles [{lo},{hi}]")));
        }
        if in_i {
            out.push((i - lo, j - lo));
        }
    }
    Ok(out)
}

/// Splits a valid diagram into tight blocks and maximal secondary segments,
/// ordered left to right; between consecutive blocks the `R` segment comes
/// before the `S` segment. Empty segments are omitted.
pub fn decompose(d: &JointDiagram) -> Result<Vec<Piece>> {
    if let Some(v) = d.structure_violation() {
        return Err(Error::InvalidDiagram(v));
    }
    let mut blocks: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for &e in d.ext_arcs() {
        let b = closure(d, e);
        if blocks.last() != Some(&b) {
            if let Some(last) = blocks.last() {
                if !(last.0 .1 < b.0 .0 && last.1 .1 < b.1 .0) {
                    return Err(Error::InvalidDiagram(format!("tight blocks {last:?} and {b:?} overlap")));
                }
            }
            blocks.push(b);
        }
    }

    let mut pieces = Vec::new();
    let (mut r_next, mut s_next) = (0, 0);
    let push_segments = |pieces: &mut Vec<Piece>, r_end: usize, s_end: usize, r_next: usize, s_next: usize| {
        for (backbone, start, end, arcs) in [(Backbone::R, r_next, r_end, d.r_arcs()), (Backbone::S, s_next, s_end, d.s_arcs())] {
            if start < end {
                pieces.push(Piece::Segment { backbone, start, end: end - 1, arcs: local_arcs(arcs, start, end - 1)? });
            }
        }
        Ok::<(), Error>(())
    };
    for &(r, s) in &blocks {
        push_segments(&mut pieces, r.0, s.0, r_next, s_next)?;
        let r_arcs = local_arcs(d.r_arcs(), r.0, r.1)?;
        let s_arcs = local_arcs(d.s_arcs(), s.0, s.1)?;
        let ext: Vec<ExtArc> = d
            .ext_arcs()
            .iter()
            .filter(|&&(a, _)| r.0 <= a && a <= r.1)
            .map(|&(a, b)| (a - r.0, b - s.0))
            .collect();
        let has_r = r_arcs.contains(&(0, r.1 - r.0));
        let has_s = s_arcs.contains(&(0, s.1 - s.0));
        let kind = match (has_r, has_s) {
            (true, true) => TightKind::Square,
            (true, false) => TightKind::TriangleDown,
            (false, true) => TightKind::TriangleUp,
            (false, false) if r.0 == r.1 && s.0 == s.1 => TightKind::Circle,
            _ => return Err(Error::InvalidDiagram(format!("block {r:?}x{s:?} matches no tight type"))),
        };
        let content = JointDiagram::new(r.1 - r.0 + 1, s.1 - s.0 + 1, r_arcs, s_arcs, ext)?;
        pieces.push(Piece::Tight(TightBlock { kind, r, s, content }));
        r_next = r.1 + 1;
        s_next = s.1 + 1;
    }
    push_segments(&mut pieces, d.n(), d.m(), r_next, s_next)?;
    Ok(pieces)
}

/// Concatenates pieces back into a diagram.
pub fn reassemble(pieces: &[Piece]) -> Result<JointDiagram> {
    let (mut n, mut m) = (0, 0);
    let (mut r_arcs, mut s_arcs, mut ext) = (Vec::new(), Vec::new(), Vec::new());
    for piece in pieces {
        match piece {
            Piece::Segment { backbone, start, end, arcs } => {
                let (off, target) = match backbone {
                    Backbone::R => (&mut n, &mut r_arcs),
                    Backbone::S => (&mut m, &mut s_arcs),
                };
                target.extend(arcs.iter().map(|&(i, j)| (i + *off, j + *off)));
                *off += end + 1 - start;
            }
            Piece::Tight(b) => {
                let c = &b.content;
                r_arcs.extend(c.r_arcs().iter().map(|&(i, j)| (i + n, j + n)));
                s_arcs.extend(c.s_arcs().iter().map(|&(i, j)| (i + m, j + m)));
                ext.extend(c.ext_arcs().iter().map(|&(a, b)| (a + n, b + m)));
                n += c.n();
                m += c.m();
            }
        }
    }
    JointDiagram::new(n, m, r_arcs, s_arcs, ext)
}

fn reindex(d: &JointDiagram, keep_r: &[bool], keep_s: &[bool]) -> JointDiagram {
    let map = |keep: &[bool]| {
        let mut idx = vec![usize::MAX; keep.len()];
        let mut next = 0;
        for (v, &k) in keep.iter().enumerate() {
            if k {
                idx[v] = next;
                next += 1;
            }
        }
        (idx, next)
    };
    let (ri, n) = map(keep_r);
    let (si, m) = map(keep_s);
    let arcs = |arcs: &[Arc], idx: &[usize], keep: &[bool]| -> Vec<Arc> {
        arcs.iter().filter(|&&(i, j)| keep[i] && keep[j]).map(|&(i, j)| (idx[i], idx[j])).collect()
    };
    let ext: Vec<ExtArc> =
        d.ext_arcs().iter().filter(|&&(a, b)| keep_r[a] && keep_s[b]).map(|&(a, b)| (ri[a], si[b])).collect();
    JointDiagram::new(n, m, arcs(d.r_arcs(), &ri, keep_r), arcs(d.s_arcs(), &si, keep_s), ext)
        .expect("re-indexing preserves well-formedness")
}

/// The shape of a diagram: drop every vertex that is unpaired or closes an
/// interior arc without exterior descendants, then collapse parallel runs
/// of interior and of exterior arcs until none remain.
pub fn project_shape(d: &JointDiagram) -> Result<(JointDiagram, ShapeClass)> {
    if let Some(v) = d.structure_violation() {
        return Err(Error::InvalidDiagram(v));
    }
    let mut keep_r = vec![false; d.n()];
    let mut keep_s = vec![false; d.m()];
    for &(a, b) in d.ext_arcs() {
        keep_r[a] = true;
        keep_s[b] = true;
    }
    for &arc in d.r_arcs() {
        if !d.r_descendants(arc).is_empty() {
            keep_r[arc.0] = true;
            keep_r[arc.1] = true;
        }
    }
    for &arc in d.s_arcs() {
        if !d.s_descendants(arc).is_empty() {
            keep_s[arc.0] = true;
            keep_s[arc.1] = true;
        }
    }
    let mut cur = reindex(d, &keep_r, &keep_s);
    loop {
        let mut keep_r = vec![true; cur.n()];
        let mut keep_s = vec![true; cur.m()];
        let r: HashSet<Arc> = cur.r_arcs().iter().copied().collect();
        let s: HashSet<Arc> = cur.s_arcs().iter().copied().collect();
        let e: HashSet<ExtArc> = cur.ext_arcs().iter().copied().collect();
        let mut changed = false;
        for &(i, j) in cur.r_arcs() {
            if r.contains(&(i + 1, j - 1)) {
                keep_r[i + 1] = false;
                keep_r[j - 1] = false;
                changed = true;
            }
        }
        for &(i, j) in cur.s_arcs() {
            if s.contains(&(i + 1, j - 1)) {
                keep_s[i + 1] = false;
                keep_s[j - 1] = false;
                changed = true;
            }
        }
        for &(a, b) in cur.ext_arcs() {
            if e.contains(&(a + 1, b + 1)) {
                keep_r[a + 1] = false;
                keep_s[b + 1] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        cur = reindex(&cur, &keep_r, &keep_s);
    }
    let class = classify_shape(&cur)
        .ok_or_else(|| Error::InvalidDiagram(format!("projection {cur} is not a shape")))?;
    Ok((cur, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::{joint_gf, InflationBundle};
    use crate::mseries::Caps;
    use crate::series::Series;
    use crate::shapes::shape_gf_closed;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn diag(n: usize, m: usize, r: &[Arc], s: &[Arc], e: &[ExtArc]) -> JointDiagram {
        JointDiagram::new(n, m, r.to_vec(), s.to_vec(), e.to_vec()).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_joint_bruteforce(2, 0).unwrap(), BigInt::from(1));
        assert_eq!(count_joint_bruteforce(2, 1).unwrap(), BigInt::from(2));
        assert_eq!(count_joint_bruteforce(2, 2).unwrap(), BigInt::from(3));
        assert_eq!(count_joint_bruteforce(1, 2).unwrap(), BigInt::from(4));
        assert_eq!(count_joint_bruteforce(1, 10), Err(Error::CapExceeded { requested: 10, cap: 9 }));
    }

    #[test]
    fn oracle_matches_gf_small() {
        for (sigma, max) in [(1u32, 7usize), (2, 8), (3, 8)] {
            let h = joint_gf(sigma, max).unwrap().integer_coeffs().unwrap();
            for (s, want) in h.iter().enumerate() {
                assert_eq!(&count_joint_bruteforce_capped(sigma, s, max).unwrap(), want, "sigma={sigma} s={s}");
            }
        }
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_joint(&JointDiagram::empty(0, 0), 2));
        // Exterior stack of two under a stack whose inner arc has length 3.
        let short = diag(6, 2, &[(0, 5), (1, 4)], &[], &[(2, 0), (3, 1)]);
        assert!(canonical_violation(&short, 2).unwrap().contains("shorter than 4"));
        // Three exterior arcs tied into a zig-zag by one arc on each side.
        let zz = diag(6, 5, &[(0, 3)], &[(1, 4)], &[(1, 0), (2, 2), (5, 3)]);
        assert!(canonical_violation(&zz, 1).unwrap().contains("zig-zag"));
        // Lone exterior arc: valid for sigma 1, stack too short for sigma 2.
        let lone = diag(1, 1, &[], &[], &[(0, 0)]);
        assert!(is_valid_joint(&lone, 1));
        assert!(!is_valid_joint(&lone, 2));
    }

    #[test]
    fn decomposition_basic_cases() {
        let plain = diag(5, 4, &[(0, 4)], &[], &[]);
        let pieces = decompose(&plain).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| matches!(p, Piece::Segment { .. })));

        let lone = diag(1, 1, &[], &[], &[(0, 0)]);
        match decompose(&lone).unwrap().as_slice() {
            [Piece::Tight(b)] => assert_eq!(b.kind, TightKind::Circle),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decomposition_kinds() {
        // Square block with a nested S arc inside.
        let d = diag(5, 7, &[(0, 4)], &[(0, 6), (2, 5)], &[(1, 1), (2, 3), (3, 4)]);
        let pieces = decompose(&d).unwrap();
        assert_eq!(pieces.len(), 1);
        match &pieces[0] {
            Piece::Tight(b) => assert_eq!(b.kind, TightKind::Square),
            p => panic!("unexpected {p:?}"),
        }
        // Two R arcs side by side joined by one S arc.
        let d = diag(6, 5, &[(0, 2), (3, 5)], &[(0, 4)], &[(1, 1), (4, 3)]);
        match decompose(&d).unwrap().as_slice() {
            [Piece::Tight(b)] => assert_eq!(b.kind, TightKind::TriangleUp),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(reassemble(&decompose(&d).unwrap()).unwrap(), d);
    }

    #[test]
    fn projection_with_both_classes() {
        let d = diag(8, 5, &[(0, 3), (4, 7)], &[(0, 3)], &[(2, 1), (5, 4)]);
        assert!(is_valid_joint(&d, 1));
        let (shape, class) = project_shape(&d).unwrap();
        assert_eq!(class, ShapeClass { t: 3, h: 2, a1: 1, a2: 1 });
        assert_eq!(shape, diag(6, 4, &[(0, 2), (3, 5)], &[(0, 2)], &[(1, 1), (4, 3)]));
        let (empty, class) = project_shape(&diag(7, 0, &[(0, 6), (1, 5)], &[], &[])).unwrap();
        assert_eq!((empty.n(), empty.m()), (0, 0));
        assert_eq!(class, ShapeClass { t: 0, h: 0, a1: 0, a2: 0 });
    }

    /// Diagram counts per shape class against `G(class) · [x^s] T² η^{t+h} η₁^{a1} η₂^{a2}`.
    fn check_fibers(sigma: u32, max: usize) {
        let bundle = InflationBundle::new(sigma, max).unwrap();
        let g = shape_gf_closed(Caps::grade(max as u32)).unwrap();
        let t2 = &bundle.t * &bundle.t;
        for s in 0..=max {
            let mut fibers: BTreeMap<ShapeClass, u64> = BTreeMap::new();
            for d in enumerate_joint_size(sigma, s).unwrap() {
                let (shape, class) = project_shape(&d).unwrap();
                assert!(shape.is_joint_structure());
                *fibers.entry(class).or_default() += 1;
            }
            let mut expected: BTreeMap<ShapeClass, u64> = BTreeMap::new();
            for (e, c) in g.iter() {
                let inflated: Series = &(&(&t2 * &bundle.eta.pow((e[0] + e[1]) as usize)) * &bundle.eta1.pow(e[2] as usize))
                    * &bundle.eta2.pow(e[3] as usize);
                let k = (c * inflated.coeffs()[s].clone()).to_integer();
                if k != BigInt::from(0) {
                    let class = ShapeClass { t: e[0], h: e[1], a1: e[2], a2: e[3] };
                    expected.insert(class, u64::try_from(k).unwrap());
                }
            }
            assert_eq!(fibers, expected, "sigma={sigma} s={s}");
        }
    }

    #[test]
    fn fibers_match_inflation_sigma2() {
        check_fibers(2, 9);
    }

    #[test]
    fn fibers_match_inflation_sigma1() {
        check_fibers(1, 7);
    }

    fn all_small_diagrams() -> Vec<JointDiagram> {
        let mut v = Vec::new();
        for s in 0..=8 {
            v.extend(enumerate_joint_size(1, s).unwrap());
        }
        for s in 9..=10 {
            v.extend(enumerate_joint_size(2, s).unwrap());
        }
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn decompose_round_trip(idx in any::<prop::sample::Index>()) {
            thread_local! {
                static POOL: Vec<JointDiagram> = all_small_diagrams();
            }
            let d = POOL.with(|p| p[idx.index(p.len())].clone());
            let pieces = decompose(&d).unwrap();
            prop_assert_eq!(reassemble(&pieces).unwrap(), d.clone());
            let blocks: usize = pieces
                .iter()
                .map(|p| if let Piece::Tight(b) = p { b.content.ext_arcs().len() } else { 0 })
                .sum();
            prop_assert_eq!(blocks, d.ext_arcs().len());
            for p in &pieces {
                if let Piece::Tight(b) = p {
                    prop_assert!(b.content.is_joint_structure());
                    // A tight block is a single block of itself.
                    prop_assert_eq!(decompose(&b.content).unwrap().len(), 1);
                }
            }
        }
    }
}
