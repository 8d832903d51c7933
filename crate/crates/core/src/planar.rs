//! Crossingless matchings, slice-word tangle diagrams and circle tracing.
//!
//! Points are 1-based throughout. A slice word is read left to right; the
//! strand count at the left end is `left`, at the right end `right`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanarError {
    #[error("invalid matching {0:?}: {1}")]
    BadMatching(Vec<usize>, &'static str),
    #[error("slice {index} does not fit a diagram of width {width}")]
    BadSlice { index: usize, width: usize },
    #[error("diagram ends with {got} strands, expected {expected}")]
    WidthMismatch { got: usize, expected: usize },
    #[error("crossing indices must be exactly 1..=N, got {0:?}")]
    BadCrossingIndices(Vec<usize>),
    #[error("diagram has crossings; resolve it first")]
    NotFlat,
    #[error("boundary mismatch: {0}")]
    Boundary(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A crossingless matching of `2n` points, stored as its pair array:
/// `pair[i]` is the partner of point `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Matching {
    pair: Vec<usize>,
}

impl std::fmt::Debug for Matching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let arcs: Vec<String> = self.arcs().iter().map(|(p, q)| format!("{p}{q}")).collect();
        write!(f, "{{{}}}", arcs.join(","))
    }
}

impl TryFrom<Vec<usize>> for Matching {
    type Error = PlanarError;
    fn try_from(pair: Vec<usize>) -> Result<Self, PlanarError> {
        Matching::new(pair)
    }
}

impl From<Matching> for Vec<usize> {
    fn from(m: Matching) -> Vec<usize> {
        m.pair
    }
}

impl Matching {
    pub fn new(pair: Vec<usize>) -> Result<Self, PlanarError> {
        let len = pair.len();
        let bad = |why| Err(PlanarError::BadMatching(pair.clone(), why));
        if len % 2 != 0 {
            return bad("odd number of points");
        }
        for (i, &q) in pair.iter().enumerate() {
            let p = i + 1;
            if q == 0 || q > len {
                return bad("partner out of range");
            }
            if q == p {
                return bad("fixed point");
            }
            if pair[q - 1] != p {
                return bad("not an involution");
            }
        }
        // p < r < q < s with p~q, r~s is a crossing
        for (i, &q) in pair.iter().enumerate() {
            let p = i + 1;
            if q < p {
                continue;
            }
            for r in p + 1..q {
                let s = pair[r - 1];
                if s < p || s > q {
                    return bad("arcs cross");
                }
            }
        }
        Ok(Matching { pair })
    }

    pub fn empty() -> Self {
        Matching { pair: Vec::new() }
    }

    /// Number of arcs.
    pub fn n(&self) -> usize {
        self.pair.len() / 2
    }

    pub fn points(&self) -> usize {
        self.pair.len()
    }

    pub fn partner(&self, p: usize) -> usize {
        self.pair[p - 1]
    }

    pub fn pair_array(&self) -> &[usize] {
        &self.pair
    }

    /// Arcs as `(p, q)` with `p < q`, sorted by `p`.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        self.pair.iter().enumerate().filter(|(i, &q)| i + 1 < q).map(|(i, &q)| (i + 1, q)).collect()
    }

    /// Index of the arc containing `p` in [`Matching::arcs`] order.
    pub fn arc_index(&self, p: usize) -> usize {
        let lo = p.min(self.partner(p));
        self.arcs().iter().position(|&(a, _)| a == lo).expect("point on matching")
    }
}

/// All crossingless matchings on `2n` points in lexicographic order of
/// their pair arrays.
pub fn enumerate_matchings(n: usize) -> Vec<Matching> {
    fn fill(lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, rest: &mut Vec<(usize, usize)>) {
        // matches the interval [lo, hi] then continues with the stacked intervals
        if lo > hi {
            match rest.pop() {
                None => out.push(cur.clone()),
                Some((a, b)) => {
                    fill(a, b, cur, out, rest);
                    rest.push((a, b));
                }
            }
            return;
        }
        let mut j = lo + 1;
        while j <= hi {
            cur[lo - 1] = j;
            cur[j - 1] = lo;
            rest.push((j + 1, hi));
            fill(lo + 1, j - 1, cur, out, rest);
            rest.pop();
            j += 2;
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0; 2 * n];
    fill(1, 2 * n, &mut cur, &mut out, &mut Vec::new());
    out.sort();
    out.into_iter().map(|pair| Matching { pair }).collect()
}

pub fn catalan(n: usize) -> u64 {
    let mut c = vec![1u64; n + 1];
    for k in 1..=n {
        c[k] = (0..k).map(|i| c[i] * c[k - 1 - i]).sum();
    }
    c[n]
}

/// One vertical slice of a diagram. Positions are 1-based; `Cross` carries
/// its crossing index `c` (1-based, unique within the diagram).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Slice {
    Id { strands: usize },
    Cup { i: usize },
    Cap { i: usize },
    Cross { i: usize, c: usize },
}

impl Slice {
    /// Output width, or `None` when the slice does not fit `width`.
    pub fn apply(&self, width: usize) -> Option<usize> {
        match *self {
            Slice::Id { strands } => (strands == width).then_some(width),
            Slice::Cup { i } => (i >= 1 && i <= width + 1).then_some(width + 2),
            Slice::Cap { i } => (i >= 1 && i < width).then(|| width - 2),
            Slice::Cross { i, c } => (i >= 1 && i < width && c >= 1).then_some(width),
        }
    }
}

/// Resolution vector, one 0/1 entry per crossing.
pub type Bits = Vec<u8>;

/// A tangle diagram from `left` points to `right` points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SliceWord {
    pub left: usize,
    pub right: usize,
    pub slices: Vec<Slice>,
    /// Free circles that are not drawn by any slice.
    #[serde(default)]
    pub closed_loops: usize,
}

impl SliceWord {
    pub fn identity(width: usize) -> Self {
        SliceWord { left: width, right: width, slices: Vec::new(), closed_loops: 0 }
    }

    pub fn from_slices(left: usize, slices: Vec<Slice>) -> Result<Self, PlanarError> {
        let mut w = left;
        for (index, s) in slices.iter().enumerate() {
            w = s.apply(w).ok_or(PlanarError::BadSlice { index, width: w })?;
        }
        let t = SliceWord { left, right: w, slices, closed_loops: 0 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), PlanarError> {
        let mut w = self.left;
        for (index, s) in self.slices.iter().enumerate() {
            w = s.apply(w).ok_or(PlanarError::BadSlice { index, width: w })?;
        }
        if w != self.right {
            return Err(PlanarError::WidthMismatch { got: w, expected: self.right });
        }
        let mut cs: Vec<usize> = self.crossing_slices().iter().map(|&(_, c)| c).collect();
        cs.sort();
        if cs.iter().enumerate().any(|(k, &c)| c != k + 1) {
            return Err(PlanarError::BadCrossingIndices(cs));
        }
        Ok(())
    }

    /// Width at each slice boundary, `widths()[s]` for `s in 0..=len`.
    pub fn widths(&self) -> Vec<usize> {
        let mut out = vec![self.left];
        let mut w = self.left;
        for s in &self.slices {
            w = s.apply(w).expect("validated diagram");
            out.push(w);
        }
        out
    }

    /// `(slice index, crossing index)` for every crossing slice.
    pub fn crossing_slices(&self) -> Vec<(usize, usize)> {
        self.slices
            .iter()
            .enumerate()
            .filter_map(|(s, sl)| match sl {
                Slice::Cross { c, .. } => Some((s, *c)),
                _ => None,
            })
            .collect()
    }

    /// Same as [`SliceWord::crossing_slices`], sorted by crossing index.
    pub fn crossing_slices_by_index(&self) -> Vec<(usize, usize)> {
        let mut v = self.crossing_slices();
        v.sort_by_key(|x| x.1);
        v
    }

    pub fn num_crossings(&self) -> usize {
        self.crossing_slices().len()
    }

    pub fn is_flat(&self) -> bool {
        self.num_crossings() == 0
    }

    /// Slice index of crossing `c` (1-based).
    pub fn crossing_slice(&self, c: usize) -> usize {
        self.crossing_slices().iter().find(|&&(_, cc)| cc == c).expect("crossing index").0
    }
}

/// `t1` followed by `t2`; crossing indices of `t2` are shifted past those of
/// `t1`, and flat closed components become `closed_loops`.
pub fn compose(t1: &SliceWord, t2: &SliceWord) -> Result<SliceWord, PlanarError> {
    if t1.right != t2.left {
        return Err(PlanarError::Boundary(format!("{} strands meet {}", t1.right, t2.left)));
    }
    let shift = t1.num_crossings();
    let mut slices = t1.slices.clone();
    slices.extend(t2.slices.iter().map(|s| match *s {
        Slice::Cross { i, c } => Slice::Cross { i, c: c + shift },
        other => other,
    }));
    let t = SliceWord { left: t1.left, right: t2.right, slices, closed_loops: t1.closed_loops + t2.closed_loops };
    t.validate()?;
    Ok(normalize(&t))
}

/// Replace crossing `c` by its `v[c-1]` resolution: 0 is two parallel
/// strands, 1 is a cap followed by a cup at the same position.
pub fn resolve(t: &SliceWord, v: &[u8]) -> SliceWord {
    assert_eq!(v.len(), t.num_crossings(), "resolution length");
    let mut slices = Vec::with_capacity(t.slices.len());
    let widths = t.widths();
    for (s, sl) in t.slices.iter().enumerate() {
        match *sl {
            Slice::Cross { i, c } => {
                if v[c - 1] == 0 {
                    slices.push(Slice::Id { strands: widths[s] });
                } else {
                    slices.push(Slice::Cap { i });
                    slices.push(Slice::Cup { i });
                }
            }
            other => slices.push(other),
        }
    }
    SliceWord { left: t.left, right: t.right, slices, closed_loops: t.closed_loops }
}

/// Drops identity slices and turns closed components that avoid every
/// crossing into `closed_loops`.
pub fn normalize(t: &SliceWord) -> SliceWord {
    let widths = t.widths();
    let g = PieceGraph::new(t, &widths);
    let mut uf = UnionFind::new(g.len());
    for &(x, y) in &g.edges {
        uf.union(x, y);
    }
    let s_last = t.slices.len();
    let mut keep_root = vec![false; g.len()];
    for s in [0, s_last] {
        for p in 1..=widths[s] {
            keep_root[uf.find(g.v(s, p))] = true;
        }
    }
    for (s, sl) in t.slices.iter().enumerate() {
        if let Slice::Cross { i, .. } = *sl {
            keep_root[uf.find(g.v(s, i))] = true;
            keep_root[uf.find(g.v(s, i + 1))] = true;
        }
    }
    let removed = |s: usize, p: usize, uf: &mut UnionFind| !keep_root[uf.find(g.v(s, p))];
    let mut out = Vec::new();
    let mut loops = t.closed_loops;
    for (s, sl) in t.slices.iter().enumerate() {
        let below = |p: usize, uf: &mut UnionFind| (1..p).filter(|&q| removed(s, q, uf)).count();
        match *sl {
            Slice::Id { .. } => {}
            Slice::Cup { i } => {
                if removed(s + 1, i, &mut uf) {
                    continue;
                }
                let shift = (1..i).filter(|&q| removed(s + 1, q, &mut uf)).count();
                out.push(Slice::Cup { i: i - shift });
            }
            Slice::Cap { i } => {
                if removed(s, i, &mut uf) {
                    continue;
                }
                out.push(Slice::Cap { i: i - below(i, &mut uf) });
            }
            Slice::Cross { i, c } => out.push(Slice::Cross { i: i - below(i, &mut uf), c }),
        }
    }
    let mut roots: Vec<usize> = (0..g.len()).map(|x| uf.find(x)).filter(|&r| !keep_root[r]).collect();
    roots.sort();
    roots.dedup();
    loops += roots.len();
    SliceWord { left: t.left, right: t.right, slices: out, closed_loops: loops }
}

/// A traced circle: the boundary points it passes, sorted. For diagrams the
/// left points are numbered `1..=left` and the right points
/// `left+1..=left+right`; free loops have no points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Circle {
    pub points: Vec<usize>,
}

pub type CircleSet = Vec<Circle>;

/// Circles of `a ∪ b̄`, ordered by their smallest point.
pub fn circles(a: &Matching, b: &Matching) -> CircleSet {
    assert_eq!(a.points(), b.points(), "matchings of different size");
    let mut uf = UnionFind::new(a.points());
    for m in [a, b] {
        for (p, q) in m.arcs() {
            uf.union(p - 1, q - 1);
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for p in 0..a.points() {
        groups.entry(uf.find(p)).or_default().push(p + 1);
    }
    let mut out: Vec<Circle> = groups.into_values().map(|points| Circle { points }).collect();
    out.sort();
    out
}

/// Result of tracing `a ∪ T ∪ b̄` for a flat `T`.
#[derive(Clone, Debug)]
pub struct FlatTrace {
    pub circles: CircleSet,
    widths: Vec<usize>,
    offsets: Vec<usize>,
    vertex_circle: Vec<usize>,
}

impl FlatTrace {
    /// Circle through strand position `p` at slice boundary `s`.
    pub fn circle_at(&self, s: usize, p: usize) -> usize {
        assert!(p >= 1 && p <= self.widths[s]);
        self.vertex_circle[self.offsets[s] + p - 1]
    }
}

/// Circles of `a ∪ T ∪ b̄` plus the closed loops of `T`. Circles touching the
/// boundary come first, by smallest point; free loops follow ordered by their
/// first piece `(slice, position)`; `closed_loops` come last.
pub fn circles_with_tangle(a: &Matching, t: &SliceWord, b: &Matching) -> Result<CircleSet, PlanarError> {
    trace_flat(a, t, b).map(|tr| tr.circles)
}

pub fn trace_flat(a: &Matching, t: &SliceWord, b: &Matching) -> Result<FlatTrace, PlanarError> {
    if !t.is_flat() {
        return Err(PlanarError::NotFlat);
    }
    if a.points() != t.left || b.points() != t.right {
        return Err(PlanarError::Boundary(format!(
            "matchings on {} and {} points, diagram {} -> {}",
            a.points(),
            b.points(),
            t.left,
            t.right
        )));
    }
    let widths = t.widths();
    let g = PieceGraph::new(t, &widths);
    let s_last = t.slices.len();
    let mut uf = UnionFind::new(g.len());
    for &(x, y) in &g.edges {
        uf.union(x, y);
    }
    for (p, q) in a.arcs() {
        uf.union(g.v(0, p), g.v(0, q));
    }
    for (p, q) in b.arcs() {
        uf.union(g.v(s_last, p), g.v(s_last, q));
    }
    // (has points, first key) per root
    let mut info: BTreeMap<usize, (Vec<usize>, (usize, usize))> = BTreeMap::new();
    for s in 0..=s_last {
        for p in 1..=widths[s] {
            let e = info.entry(uf.find(g.v(s, p))).or_insert((Vec::new(), (usize::MAX, usize::MAX)));
            if s == 0 {
                e.0.push(p);
            }
            if s == s_last {
                e.0.push(t.left + p);
            }
        }
    }
    for (key, x) in &g.piece_keys {
        let e = info.get_mut(&uf.find(*x)).expect("vertex");
        e.1 = e.1.min(*key);
    }
    let mut with_points: Vec<(usize, usize)> = Vec::new();
    let mut loops: Vec<((usize, usize), usize)> = Vec::new();
    for (root, (pts, key)) in info.iter_mut() {
        pts.sort();
        if pts.is_empty() {
            loops.push((*key, *root));
        } else {
            with_points.push((pts[0], *root));
        }
    }
    with_points.sort();
    loops.sort();
    let order: Vec<usize> = with_points.iter().map(|x| x.1).chain(loops.iter().map(|x| x.1)).collect();
    let mut index_of = BTreeMap::new();
    let mut circles = Vec::new();
    for (k, r) in order.iter().enumerate() {
        index_of.insert(*r, k);
        circles.push(Circle { points: info[r].0.clone() });
    }
    for _ in 0..t.closed_loops {
        circles.push(Circle { points: Vec::new() });
    }
    let vertex_circle = (0..g.len()).map(|x| index_of[&uf.find(x)]).collect();
    Ok(FlatTrace { circles, widths, offsets: g.offsets, vertex_circle })
}

/// Vertices `(s, p)` for every slice boundary and every strand, with one edge
/// per piece. Crossings connect diagonally.
struct PieceGraph {
    offsets: Vec<usize>,
    edges: Vec<(usize, usize)>,
    /// `(slice, position)` key of each piece and one of its vertices.
    piece_keys: Vec<((usize, usize), usize)>,
    total: usize,
}

impl PieceGraph {
    fn new(t: &SliceWord, widths: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(widths.len());
        let mut total = 0;
        for w in widths {
            offsets.push(total);
            total += w;
        }
        let mut g = PieceGraph { offsets, edges: Vec::new(), piece_keys: Vec::new(), total };
        for (s, sl) in t.slices.iter().enumerate() {
            let w = widths[s];
            let through = |g: &mut PieceGraph, p: usize, q: usize| {
                let (x, y) = (g.v(s, p), g.v(s + 1, q));
                g.edges.push((x, y));
                g.piece_keys.push(((s, p), x));
            };
            match *sl {
                Slice::Id { .. } => (1..=w).for_each(|p| through(&mut g, p, p)),
                Slice::Cup { i } => {
                    for p in 1..=w {
                        through(&mut g, p, if p < i { p } else { p + 2 });
                    }
                    let (x, y) = (g.v(s + 1, i), g.v(s + 1, i + 1));
                    g.edges.push((x, y));
                    g.piece_keys.push(((s, i), x));
                }
                Slice::Cap { i } => {
                    for p in (1..=w).filter(|&p| p != i && p != i + 1) {
                        through(&mut g, p, if p < i { p } else { p - 2 });
                    }
                    let (x, y) = (g.v(s, i), g.v(s, i + 1));
                    g.edges.push((x, y));
                    g.piece_keys.push(((s, i), x));
                }
                Slice::Cross { i, .. } => {
                    for p in 1..=w {
                        let q = if p == i {
                            i + 1
                        } else if p == i + 1 {
                            i
                        } else {
                            p
                        };
                        through(&mut g, p, q);
                    }
                }
            }
        }
        g
    }

    fn v(&self, s: usize, p: usize) -> usize {
        self.offsets[s] + p - 1
    }

    fn len(&self) -> usize {
        self.total
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// Parses the line-based diagram format: one slice per line (`id`, `cup i`,
/// `cap i`, `x i c`). An optional first line `left k` sets the starting
/// width (default 0). `#` starts a comment; `;` also separates slices.
pub fn parse_diagram(text: &str) -> Result<SliceWord, PlanarError> {
    let mut left = None;
    let mut slices = Vec::new();
    let mut width = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for stmt in line.split(';') {
            let toks: Vec<&str> = stmt.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let err = |msg: String| PlanarError::Parse { line: ln + 1, msg };
            let num = |k: usize| -> Result<usize, PlanarError> {
                toks.get(k)
                    .ok_or_else(|| err(format!("`{}` needs more arguments", toks[0])))?
                    .parse::<usize>()
                    .map_err(|e| err(e.to_string()))
            };
            let arity = match toks[0] {
                "left" => 2,
                "id" => 1,
                "cup" | "cap" => 2,
                "x" => 3,
                other => return Err(err(format!("unknown slice `{other}`"))),
            };
            if toks.len() != arity {
                return Err(err(format!("`{}` takes {} argument(s)", toks[0], arity - 1)));
            }
            let sl = match toks[0] {
                "left" => {
                    if left.is_some() || !slices.is_empty() {
                        return Err(err("`left` must come first".into()));
                    }
                    left = Some(num(1)?);
                    width = num(1)?;
                    continue;
                }
                "id" => Slice::Id { strands: width },
                "cup" => Slice::Cup { i: num(1)? },
                "cap" => Slice::Cap { i: num(1)? },
                _ => Slice::Cross { i: num(1)?, c: num(2)? },
            };
            width = sl.apply(width).ok_or_else(|| err(format!("slice does not fit width {width}")))?;
            slices.push(sl);
        }
    }
    let t = SliceWord { left: left.unwrap_or(0), right: width, slices, closed_loops: 0 };
    t.validate()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(p: &[usize]) -> Matching {
        Matching::new(p.to_vec()).unwrap()
    }

    /// Oracle: every fixed-point-free involution, filtered for crossings.
    fn brute_force(n: usize) -> Vec<Vec<usize>> {
        fn go(cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let Some(i) = cur.iter().position(|&x| x == 0) else {
                out.push(cur.clone());
                return;
            };
            for j in i + 1..cur.len() {
                if cur[j] == 0 {
                    cur[i] = j + 1;
                    cur[j] = i + 1;
                    go(cur, out);
                    cur[i] = 0;
                    cur[j] = 0;
                }
            }
        }
        let mut all = Vec::new();
        go(&mut vec![0; 2 * n], &mut all);
        let mut ok: Vec<Vec<usize>> = all.into_iter().filter(|p| Matching::new(p.clone()).is_ok()).collect();
        ok.sort();
        ok
    }

    #[test]
    fn matching_counts() {
        assert_eq!(enumerate_matchings(0).len(), 1);
        assert_eq!(enumerate_matchings(1).len(), 1);
        let b2 = enumerate_matchings(2);
        assert_eq!(b2, vec![m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1])]);
        assert_eq!(enumerate_matchings(3).len(), 5);
        for n in 0..=7 {
            let got: Vec<Vec<usize>> = enumerate_matchings(n).into_iter().map(Vec::from).collect();
            assert_eq!(got, brute_force(n), "n = {n}");
            assert_eq!(got.len() as u64, catalan(n));
        }
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(Matching::new(vec![3, 4, 1, 2]).is_err());
        assert!(Matching::new(vec![1, 2]).is_err());
        assert!(Matching::new(vec![2, 1, 3]).is_err());
        assert!(Matching::new(vec![2, 3, 2, 1]).is_err());
    }

    #[test]
    fn circle_examples() {
        let (a, b) = (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]));
        assert_eq!(circles(&a, &a).len(), 2);
        assert_eq!(circles(&b, &a).len(), 1);
        assert_eq!(circles(&Matching::empty(), &Matching::empty()).len(), 0);
        assert_eq!(circles(&a, &b)[0].points, vec![1, 2, 3, 4]);
    }

    #[test]
    fn tangle_circle_examples() {
        let a = m(&[2, 1]);
        let t = SliceWord::from_slices(2, vec![Slice::Cap { i: 1 }, Slice::Cup { i: 1 }]).unwrap();
        assert_eq!(circles_with_tangle(&a, &t, &a).unwrap().len(), 2);
        let loop0 = SliceWord::from_slices(0, vec![Slice::Cup { i: 1 }, Slice::Cap { i: 1 }]).unwrap();
        let e = Matching::empty();
        let cs = circles_with_tangle(&e, &loop0, &e).unwrap();
        assert_eq!(cs, vec![Circle { points: vec![] }]);
        // identity diagram agrees with circles(a, b)
        let b = m(&[4, 3, 2, 1]);
        let id = SliceWord::from_slices(4, vec![Slice::Id { strands: 4 }]).unwrap();
        assert_eq!(circles_with_tangle(&a_of(4), &id, &b).unwrap().len(), circles(&a_of(4), &b).len());
    }

    fn a_of(points: usize) -> Matching {
        Matching::new((0..points).map(|i| if i % 2 == 0 { i + 2 } else { i }).collect()).unwrap()
    }

    #[test]
    fn compose_moves_loops() {
        let cup = SliceWord::from_slices(0, vec![Slice::Cup { i: 1 }]).unwrap();
        let cap = SliceWord::from_slices(2, vec![Slice::Cap { i: 1 }]).unwrap();
        let t = compose(&cup, &cap).unwrap();
        assert!(t.slices.is_empty());
        assert_eq!(t.closed_loops, 1);
        let x = SliceWord::from_slices(2, vec![Slice::Cross { i: 1, c: 1 }]).unwrap();
        let xx = compose(&x, &x).unwrap();
        assert_eq!(xx.crossing_slices(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn resolve_examples() {
        let x = SliceWord::from_slices(2, vec![Slice::Cross { i: 1, c: 1 }]).unwrap();
        assert_eq!(resolve(&x, &[0]).slices, vec![Slice::Id { strands: 2 }]);
        assert_eq!(resolve(&x, &[1]).slices, vec![Slice::Cap { i: 1 }, Slice::Cup { i: 1 }]);
    }

    #[test]
    fn parse_dsl() {
        let t = parse_diagram("cup 1\ncup 3\nx 2 1 # first\nx 2 2\ncap 3; cap 1\n").unwrap();
        assert_eq!(t.left, 0);
        assert_eq!(t.right, 0);
        assert_eq!(t.num_crossings(), 2);
        assert!(parse_diagram("cap 1").is_err());
        assert!(parse_diagram("cup 1\nfoo").is_err());
        assert!(parse_diagram("left 2\nx 1 2").is_err());
    }

    fn build_flat(left: usize, raw: &[(u8, usize)]) -> SliceWord {
        let mut w = left;
        let mut slices = Vec::new();
        for &(kind, i) in raw {
            let sl = match kind {
                0 => Slice::Cup { i: 1 + (i - 1) % (w + 1) },
                1 if w >= 2 => Slice::Cap { i: 1 + (i - 1) % (w - 1) },
                _ => Slice::Id { strands: w },
            };
            w = sl.apply(w).unwrap();
            slices.push(sl);
        }
        SliceWord::from_slices(left, slices).unwrap()
    }

    fn arb_raw(max_len: usize) -> impl Strategy<Value = Vec<(u8, usize)>> {
        prop::collection::vec((0u8..3, 1usize..6), 0..max_len)
    }

    fn arb_flat(max_len: usize) -> impl Strategy<Value = SliceWord> {
        (0usize..4, arb_raw(max_len)).prop_map(|(half, raw)| build_flat(2 * half, &raw))
    }

    proptest! {
        #[test]
        fn circle_bounds(n in 1usize..6, i in 0usize..200, j in 0usize..200) {
            let all = enumerate_matchings(n);
            let (a, b) = (&all[i % all.len()], &all[j % all.len()]);
            let c = circles(a, b).len();
            prop_assert!(c >= 1 && c <= n);
            prop_assert_eq!(circles(a, a).len(), n);
            prop_assert_eq!(c, circles(b, a).len());
        }

        #[test]
        fn compose_associative(half in 0usize..3, rx in arb_raw(6), ry in arb_raw(6), rz in arb_raw(6)) {
            let x = build_flat(2 * half, &rx);
            let y = build_flat(x.right, &ry);
            let z = build_flat(y.right, &rz);
            let l = compose(&compose(&x, &y).unwrap(), &z).unwrap();
            let r = compose(&x, &compose(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn normalize_keeps_circle_count(t in arb_flat(8), i in 0usize..100, j in 0usize..100) {
            let la = enumerate_matchings(t.left / 2);
            let lb = enumerate_matchings(t.right / 2);
            let (a, b) = (&la[i % la.len()], &lb[j % lb.len()]);
            let n1 = circles_with_tangle(a, &t, b).unwrap().len();
            let n2 = circles_with_tangle(a, &normalize(&t), b).unwrap().len();
            prop_assert_eq!(n1, n2);
        }
    }
}
