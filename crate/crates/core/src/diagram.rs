//! Two backbones `R` (vertices `0..n`) and `S` (vertices `0..m`) carrying
//! interior arcs on each backbone and exterior arcs `(r, s)` between them.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::secondary::Arc;

/// Exterior arc `(r, s)`: vertex `r` of `R` paired with vertex `s` of `S`.
pub type ExtArc = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointDiagram {
    n: usize,
    m: usize,
    r_arcs: Vec<Arc>,
    s_arcs: Vec<Arc>,
    ext: Vec<ExtArc>,
}

impl JointDiagram {
    /// Builds a diagram, sorting each arc list. Fails on endpoints out of
    /// range, reversed interior arcs and duplicate arcs; the remaining
    /// axioms are checked by [`JointDiagram::structure_violation`].
    pub fn new(n: usize, m: usize, mut r_arcs: Vec<Arc>, mut s_arcs: Vec<Arc>, mut ext: Vec<ExtArc>) -> Result<Self> {
        for (name, arcs, len) in [("R", &r_arcs, n), ("S", &s_arcs, m)] {
            if let Some(&(i, j)) = arcs.iter().find(|&&(i, j)| i >= j || j >= len) {
                return Err(Error::InvalidDiagram(format!("{name} arc ({i},{j}) on {len} vertices")));
            }
        }
        if let Some(&(a, b)) = ext.iter().find(|&&(a, b)| a >= n || b >= m) {
            return Err(Error::InvalidDiagram(format!("exterior arc ({a},{b}) out of range")));
        }
        r_arcs.sort_unstable();
        s_arcs.sort_unstable();
        ext.sort_unstable();
        for (name, dup) in [
            ("R", r_arcs.windows(2).any(|w| w[0] == w[1])),
            ("S", s_arcs.windows(2).any(|w| w[0] == w[1])),
            ("exterior", ext.windows(2).any(|w| w[0] == w[1])),
        ] {
            if dup {
                return Err(Error::InvalidDiagram(format!("duplicate {name} arc")));
            }
        }
        Ok(JointDiagram { n, m, r_arcs, s_arcs, ext })
    }

    pub fn empty(n: usize, m: usize) -> Self {
        JointDiagram { n, m, r_arcs: Vec::new(), s_arcs: Vec::new(), ext: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        self.n + self.m
    }

    pub fn r_arcs(&self) -> &[Arc] {
        &self.r_arcs
    }

    pub fn s_arcs(&self) -> &[Arc] {
        &self.s_arcs
    }

    /// Exterior arcs sorted by their `R` endpoint.
    pub fn ext_arcs(&self) -> &[ExtArc] {
        &self.ext
    }

    /// Partner of each `R` vertex: `Some(Ok(j))` for an interior partner,
    /// `Some(Err(s))` for an exterior one.
    pub(crate) fn r_partners(&self) -> Vec<Option<std::result::Result<usize, usize>>> {
        let mut p = vec![None; self.n];
        for &(i, j) in &self.r_arcs {
            p[i] = Some(Ok(j));
            p[j] = Some(Ok(i));
        }
        for &(a, b) in &self.ext {
            p[a] = Some(Err(b));
        }
        p
    }

    pub(crate) fn s_partners(&self) -> Vec<Option<std::result::Result<usize, usize>>> {
        let mut p = vec![None; self.m];
        for &(i, j) in &self.s_arcs {
            p[i] = Some(Ok(j));
            p[j] = Some(Ok(i));
        }
        for &(a, b) in &self.ext {
            p[b] = Some(Err(a));
        }
        p
    }

    /// Indices into [`Self::ext_arcs`] of the exterior arcs strictly inside
    /// the `R` arc `(i, j)`, as a half-open range. Meaningful once the
    /// exterior arcs are known to be noncrossing.
    pub fn r_descendants(&self, (i, j): Arc) -> std::ops::Range<usize> {
        let lo = self.ext.partition_point(|e| e.0 <= i);
        let hi = self.ext.partition_point(|e| e.0 < j);
        lo..hi.max(lo)
    }

    /// As [`Self::r_descendants`] for an `S` arc. Noncrossing exterior arcs
    /// are sorted by both endpoints at once, so this is again a range.
    pub fn s_descendants(&self, (k, l): Arc) -> std::ops::Range<usize> {
        let lo = self.ext.partition_point(|e| e.1 <= k);
        let hi = self.ext.partition_point(|e| e.1 < l);
        lo..hi.max(lo)
    }

    /// First violated joint-structure axiom, if any: partial matching,
    /// noncrossing interior arcs per backbone, noncrossing exterior arcs and
    /// absence of zig-zags.
    pub fn structure_violation(&self) -> Option<String> {
        for (name, arcs, ext_side, len) in [
            ("R", &self.r_arcs, self.ext.iter().map(|e| e.0).collect::<Vec<_>>(), self.n),
            ("S", &self.s_arcs, self.ext.iter().map(|e| e.1).collect::<Vec<_>>(), self.m),
        ] {
            let mut used = vec![false; len];
            for v in arcs.iter().flat_map(|&(i, j)| [i, j]).chain(ext_side) {
                if std::mem::replace(&mut used[v], true) {
                    return Some(format!("vertex {v} of {name} is paired twice"));
                }
            }
            if let Some((a, b)) = first_crossing(arcs) {
                return Some(format!("{name} arcs {a:?} and {b:?} cross"));
            }
        }
        if let Some(w) = self.ext.windows(2).find(|w| w[1].1 <= w[0].1) {
            return Some(format!("exterior arcs {:?} and {:?} cross", w[0], w[1]));
        }
        for &ra in &self.r_arcs {
            let dr = self.r_descendants(ra);
            for &sa in &self.s_arcs {
                let ds = self.s_descendants(sa);
                let meet = dr.start.max(ds.start) < dr.end.min(ds.end);
                let nested = (dr.start <= ds.start && ds.end <= dr.end) || (ds.start <= dr.start && dr.end <= ds.end);
                if meet && !nested {
                    return Some(format!("zig-zag between R arc {ra:?} and S arc {sa:?}"));
                }
            }
        }
        None
    }

    pub fn is_joint_structure(&self) -> bool {
        self.structure_violation().is_none()
    }

    /// Maximal exterior stacks `(a,b), (a+1,b+1), …` as (first arc, length).
    pub fn exterior_stacks(&self) -> Vec<(ExtArc, usize)> {
        let set: HashSet<ExtArc> = self.ext.iter().copied().collect();
        self.ext
            .iter()
            .filter(|&&(a, b)| a == 0 || b == 0 || !set.contains(&(a - 1, b - 1)))
            .map(|&(a, b)| {
                let mut len = 1;
                while set.contains(&(a + len, b + len)) {
                    len += 1;
                }
                ((a, b), len)
            })
            .collect()
    }
}

fn first_crossing(arcs: &[Arc]) -> Option<(Arc, Arc)> {
    for (k, &(a, b)) in arcs.iter().enumerate() {
        for &(c, d) in &arcs[k + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                return Some(((a, b), (c, d)));
            }
        }
    }
    None
}

impl fmt::Display for JointDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}:{:?} S{}:{:?} I:{:?}", self.n, self.r_arcs, self.m, self.s_arcs, self.ext)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(JointDiagram::new(3, 0, vec![(2, 1)], vec![], vec![]).is_err());
        assert!(JointDiagram::new(3, 1, vec![], vec![], vec![(3, 0)]).is_err());
        assert!(JointDiagram::new(3, 1, vec![], vec![], vec![(1, 0), (1, 0)]).is_err());
    }

    #[test]
    fn shared_endpoint_is_not_a_joint_structure() {
        let d = JointDiagram::new(4, 1, vec![(0, 3)], vec![], vec![(3, 0)]).unwrap();
        assert!(d.structure_violation().unwrap().contains("paired twice"));
    }

    #[test]
    fn crossing_exterior_arcs() {
        let d = JointDiagram::new(2, 2, vec![], vec![], vec![(0, 1), (1, 0)]).unwrap();
        assert!(!d.is_joint_structure());
    }

    #[test]
    fn zig_zag_three_exterior_arcs() {
        // R arc over the first two exterior arcs, S arc over the last two.
        let d = JointDiagram::new(5, 5, vec![(0, 3)], vec![(1, 4)], vec![(1, 0), (2, 2), (4, 3)]).unwrap();
        assert!(d.structure_violation().unwrap().contains("zig-zag"));
        let nested = JointDiagram::new(5, 5, vec![(0, 4)], vec![(1, 4)], vec![(1, 0), (2, 2), (3, 3)]).unwrap();
        assert!(nested.is_joint_structure());
    }

    #[test]
    fn descendant_ranges_and_stacks() {
        let d = JointDiagram::new(6, 3, vec![(0, 5)], vec![], vec![(1, 0), (2, 1), (4, 2)]).unwrap();
        assert_eq!(d.r_descendants((0, 5)), 0..3);
        assert_eq!(d.s_descendants((0, 2)), 1..2);
        assert_eq!(d.exterior_stacks(), vec![((1, 0), 2), ((4, 2), 1)]);
    }
}
