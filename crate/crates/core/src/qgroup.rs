//! Generators and relations of the categorified quantum group for gl_n, their
//! flat shadows (ladder webs with 2-labelled edges forgotten), and the F2
//! relation checker with its up-to-sign Z solver.
//!
//! A 1-morphism word lists letters in the order they act: `letters[0]` is
//! applied to the source weight first. A 2-morphism term is a movie: a list
//! of whiskered generators applied one after another.
//!
//! Shadows. A 1-labelled point sits at every position whose weight entry is 1.
//! Each ladder carries one "rung" piece (a through strand, a cap or a cup);
//! dots live on it. Cups and caps of the biadjunction are the unique
//! elementary cobordism between the two flat tangles (an isotopy, a saddle, a
//! birth or a death depending on the local weight). Crossings of distant
//! colours are isotopies, of adjacent colours a single saddle, and the
//! crossing of two equal letters (only in range at local weight (0,2) for E,
//! (2,0) for F, where the two ladders close up into a loop) cuts the loop:
//! a death followed by a birth.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frames::Event;
use crate::linalg::Matrix;
use crate::planar::{compose, enumerate_matchings, Matching, Slice, SliceWord, UnionFind};
use crate::ring::{Ring, F2};
use crate::tqft::{check_barnatan_f2, describe, events_matrix, CobDescriptor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QError {
    #[error("colour {0} outside 1..{1}")]
    BadIndex(usize, usize),
    #[error("bad weight: {0}")]
    BadWeight(String),
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("shadow: {0}")]
    Shadow(String),
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("{0} terms is too many for the sign search")]
    TooManyTerms(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GLWeight(pub Vec<i32>);

impl GLWeight {
    /// `"0,2,1"`, or digits only (`"021"`).
    pub fn parse(s: &str) -> Result<Self, QError> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<String> = if s.contains(',') {
            s.split(',').map(|x| x.trim().to_string()).collect()
        } else {
            s.chars().map(String::from).collect()
        };
        let k = parts.iter().map(|p| p.parse::<i32>()).collect::<Result<Vec<_>, _>>().map_err(|_| QError::BadWeight(s.into()))?;
        if k.is_empty() {
            return Err(QError::BadWeight(s.into()));
        }
        Ok(GLWeight(k))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn in_range(&self) -> bool {
        self.0.iter().all(|&x| (0..=2).contains(&x))
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&x| x == 1).count()
    }

    /// Sent to the zero bimodule category.
    pub fn is_zero_object(&self) -> bool {
        !self.in_range() || self.ones() % 2 == 1
    }

    pub fn act(&self, l: Letter) -> GLWeight {
        let mut k = self.0.clone();
        let s = if l.e { 1 } else { -1 };
        k[l.i - 1] += s;
        k[l.i] -= s;
        GLWeight(k)
    }

    /// Every weight with entries in {0, 1, 2}.
    pub fn all_in_range(n: usize) -> Vec<GLWeight> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|v: Vec<i32>| (0..=2).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out.into_iter().map(GLWeight).collect()
    }

    /// `k_i - k_{i+1}`.
    pub fn lambda(&self, i: usize) -> i32 {
        self.0[i - 1] - self.0[i]
    }
}

impl fmt::Display for GLWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", v.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub e: bool,
    pub i: usize,
}

impl Letter {
    pub fn e(i: usize) -> Self {
        Letter { e: true, i }
    }
    pub fn f(i: usize) -> Self {
        Letter { e: false, i }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.e { 'E' } else { 'F' }, self.i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OneMorphismWord {
    pub source: GLWeight,
    pub letters: Vec<Letter>,
}

impl OneMorphismWord {
    pub fn new(source: GLWeight, letters: Vec<Letter>) -> Result<Self, QError> {
        for l in &letters {
            if l.i == 0 || l.i >= source.n() {
                return Err(QError::BadIndex(l.i, source.n().saturating_sub(1)));
            }
        }
        Ok(OneMorphismWord { source, letters })
    }

    pub fn identity(source: GLWeight) -> Self {
        OneMorphismWord { source, letters: Vec::new() }
    }

    /// Running weights, `letters.len() + 1` of them.
    pub fn weights(&self) -> Vec<GLWeight> {
        let mut out = vec![self.source.clone()];
        for l in &self.letters {
            let next = out.last().unwrap().act(*l);
            out.push(next);
        }
        out
    }

    pub fn target(&self) -> GLWeight {
        self.weights().pop().unwrap()
    }

    /// Passes through a weight outside the range, or starts at a zero object.
    pub fn is_zero(&self) -> bool {
        self.source.is_zero_object() || self.weights().iter().any(|k| !k.in_range())
    }
}

impl fmt::Display for OneMorphismWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters.iter().rev() {
            write!(f, "{l} ")?;
        }
        write!(f, "1_{}", self.source)
    }
}

/// Index of the first 1-labelled point at or after position `p` (0-based).
fn point_index(k: &GLWeight, p: usize) -> usize {
    k.0[..p].iter().filter(|&&x| x == 1).count()
}

/// Flat tangle underlying the ladder of `l` at `k`; `None` is ZERO.
pub fn ladder_tangle(l: Letter, k: &GLWeight) -> Result<Option<SliceWord>, QError> {
    if l.i == 0 || l.i >= k.n() {
        return Err(QError::BadIndex(l.i, k.n().saturating_sub(1)));
    }
    let t = k.act(l);
    if !k.in_range() || !t.in_range() {
        return Ok(None);
    }
    let c = point_index(k, l.i - 1) + 1;
    let local = (k.0[l.i - 1], k.0[l.i]);
    let slice = match (l.e, local) {
        (true, (1, 1)) | (false, (1, 1)) => Some(Slice::Cap { i: c }),
        (true, (0, 2)) | (false, (2, 0)) => Some(Slice::Cup { i: c }),
        _ => None,
    };
    let w = k.ones();
    Ok(Some(match slice {
        Some(s) => SliceWord::from_slices(w, vec![s]).map_err(|e| QError::Shadow(e.to_string()))?,
        None => SliceWord::identity(w),
    }))
}

/// The composite flat tangle of a word; `None` is ZERO.
pub fn word_tangle(w: &OneMorphismWord) -> Result<Option<SliceWord>, QError> {
    if w.is_zero() {
        return Ok(None);
    }
    let ks = w.weights();
    let mut t = SliceWord::identity(w.source.ones());
    for (j, l) in w.letters.iter().enumerate() {
        let Some(lt) = ladder_tangle(*l, &ks[j])? else { return Ok(None) };
        t = compose(&t, &lt).map_err(|e| QError::Shadow(e.to_string()))?;
    }
    Ok(Some(t))
}

/// Generating 2-morphisms, whiskered into a word at a letter position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case")]
pub enum Gen {
    /// dot on letter `pos`
    Dot { pos: usize },
    /// crossing of letters `pos`, `pos + 1` (both E or both F)
    Cross { pos: usize },
    /// `1 -> F_i E_i` inserted before letter `pos` (the E acts first)
    CupFE { i: usize, pos: usize },
    /// `1 -> E_i F_i` inserted before letter `pos`
    CupEF { i: usize, pos: usize },
    /// `F_i E_i -> 1` on letters `pos`, `pos + 1`
    CapFE { pos: usize },
    /// `E_i F_i -> 1` on letters `pos`, `pos + 1`
    CapEF { pos: usize },
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gen::Dot { pos } => write!(f, "dot@{pos}"),
            Gen::Cross { pos } => write!(f, "x@{pos}"),
            Gen::CupFE { i, pos } => write!(f, "cupFE{i}@{pos}"),
            Gen::CupEF { i, pos } => write!(f, "cupEF{i}@{pos}"),
            Gen::CapFE { pos } => write!(f, "capFE@{pos}"),
            Gen::CapEF { pos } => write!(f, "capEF@{pos}"),
        }
    }
}

/// A vertical composite of whiskered generators, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term(pub Vec<Gen>);

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        let v: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", v.join(" ; "))
    }
}

/// Target word of a generator; type errors for ill-formed applications.
pub fn apply_gen(w: &OneMorphismWord, g: Gen) -> Result<OneMorphismWord, QError> {
    let n = w.letters.len();
    let mut letters = w.letters.clone();
    let bad = |m: &str| Err(QError::Type(format!("{g} on {w}: {m}")));
    match g {
        Gen::Dot { pos } => {
            if pos >= n {
                return bad("no such letter");
            }
        }
        Gen::Cross { pos } => {
            if pos + 1 >= n || letters[pos].e != letters[pos + 1].e {
                return bad("needs two letters of the same kind");
            }
            letters.swap(pos, pos + 1);
        }
        Gen::CupFE { i, pos } | Gen::CupEF { i, pos } => {
            if pos > n {
                return bad("position past the end");
            }
            if i == 0 || i >= w.source.n() {
                return Err(QError::BadIndex(i, w.source.n().saturating_sub(1)));
            }
            let pair = if matches!(g, Gen::CupFE { .. }) { [Letter::e(i), Letter::f(i)] } else { [Letter::f(i), Letter::e(i)] };
            letters.splice(pos..pos, pair);
        }
        Gen::CapFE { pos } | Gen::CapEF { pos } => {
            if pos + 1 >= n {
                return bad("needs two letters");
            }
            let (x, y) = (letters[pos], letters[pos + 1]);
            let want_e_first = matches!(g, Gen::CapFE { .. });
            if x.i != y.i || x.e != want_e_first || y.e == want_e_first {
                return bad("letters do not cancel");
            }
            letters.drain(pos..pos + 2);
        }
    }
    Ok(OneMorphismWord { source: w.source.clone(), letters })
}

// ---------------------------------------------------------------------------
// piece graphs

type Node = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
struct Block {
    /// endpoints as (relative level 0 or 1, position)
    pieces: Vec<(Node, Node)>,
    rung: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Diagram {
    levels: Vec<Vec<bool>>,
    blocks: Vec<Block>,
}

fn ladder_block(l: Letter, k: &GLWeight) -> Block {
    let (p, q) = (l.i - 1, l.i);
    let mut pieces: Vec<(Node, Node)> = Vec::new();
    let rung = match (l.e, k.0[p], k.0[q]) {
        (true, 0, 1) => ((0, q), (1, p)),
        (true, 1, 1) => ((0, p), (0, q)),
        (true, 0, 2) => ((1, p), (1, q)),
        (true, 1, 2) => ((0, p), (1, q)),
        (false, 1, 0) => ((0, p), (1, q)),
        (false, 2, 0) => ((1, p), (1, q)),
        (false, 1, 1) => ((0, p), (0, q)),
        (false, 2, 1) => ((0, q), (1, p)),
        other => unreachable!("ladder out of range {other:?}"),
    };
    pieces.push(rung);
    for r in 0..k.n() {
        if r != p && r != q && k.0[r] == 1 {
            pieces.push(((0, r), (1, r)));
        }
    }
    Block { pieces, rung: Some(0) }
}

fn diagram(w: &OneMorphismWord) -> Diagram {
    let ks = w.weights();
    Diagram {
        levels: ks.iter().map(|k| k.0.iter().map(|&x| x == 1).collect()).collect(),
        blocks: w.letters.iter().zip(&ks).map(|(l, k)| ladder_block(*l, k)).collect(),
    }
}

/// Circles of `a ∪ D ∪ b`, each a sorted node list, ordered by smallest node.
fn diagram_circles(d: &Diagram, a: &Matching, b: &Matching) -> Vec<Vec<Node>> {
    let mut index: BTreeMap<Node, usize> = BTreeMap::new();
    for (l, row) in d.levels.iter().enumerate() {
        for (p, &on) in row.iter().enumerate() {
            if on {
                let n = index.len();
                index.insert((l, p), n);
            }
        }
    }
    let mut uf = UnionFind::new(index.len());
    for (j, blk) in d.blocks.iter().enumerate() {
        for &((l1, p1), (l2, p2)) in &blk.pieces {
            uf.union(index[&(j + l1, p1)], index[&(j + l2, p2)]);
        }
    }
    let last = d.levels.len() - 1;
    for (m, l) in [(a, 0), (b, last)] {
        let pts: Vec<usize> = (0..d.levels[l].len()).filter(|&p| d.levels[l][p]).collect();
        assert_eq!(m.points(), pts.len(), "boundary matching size");
        for (p, q) in m.arcs() {
            uf.union(index[&(l, pts[p - 1])], index[&(l, pts[q - 1])]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<Node>> = BTreeMap::new();
    for (&nd, &i) in &index {
        groups.entry(uf.find(i)).or_default().push(nd);
    }
    let mut out: Vec<Vec<Node>> = groups.into_values().filter(|g| !g.is_empty()).collect();
    // a node with no piece and no arc would be a stray point, not a circle
    out.retain(|g| g.len() > 1 || d.levels.len() == 1);
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Isotopy,
    Saddle,
    Birth,
    Death,
    Dot,
}

#[derive(Clone, Debug)]
enum Move {
    Dot { block: usize },
    /// levels `s..=e` of the old frame become `s..=e2` of the new one
    Replace { s: usize, e: usize, e2: usize, allowed: Vec<StepKind> },
}

#[derive(Clone, Debug)]
struct Movie {
    frames: Vec<Diagram>,
    moves: Vec<Move>,
}

/// Shared labels of a node relative to a replaced range.
fn shared(nd: Node, s: usize, e: usize) -> Vec<(u8, usize, usize)> {
    let (l, p) = nd;
    let mut v = Vec::new();
    if l < s {
        v.push((0, l, p));
    }
    if l == s {
        v.push((1, 0, p));
    }
    if l == e {
        v.push((2, 0, p));
    }
    if l > e {
        v.push((3, l - e, p));
    }
    v
}

/// Events carrying circle ids across one replacement, and the new ids.
fn replace_events(
    before: &[Vec<Node>],
    after: &[Vec<Node>],
    ids: &[u32],
    next: &mut u32,
    (s, e, e2): (usize, usize, usize),
    allowed: &[StepKind],
) -> Result<(Vec<Event>, Vec<u32>), QError> {
    let (m, n) = (before.len(), after.len());
    let mut uf = UnionFind::new(m + n);
    let mut owner: BTreeMap<(u8, usize, usize), usize> = BTreeMap::new();
    for (c, nodes) in before.iter().enumerate() {
        for nd in nodes {
            for key in shared(*nd, s, e) {
                owner.insert(key, c);
            }
        }
    }
    for (c, nodes) in after.iter().enumerate() {
        for nd in nodes {
            for key in shared(*nd, s, e2) {
                if let Some(&b) = owner.get(&key) {
                    uf.union(b, m + c);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for c in 0..m {
        groups.entry(uf.find(c)).or_default().0.push(c);
    }
    for c in 0..n {
        groups.entry(uf.find(m + c)).or_default().1.push(c);
    }
    let mut events = Vec::new();
    let mut out = vec![u32::MAX; n];
    let mut kinds = Vec::new();
    for (bs, as_) in groups.values() {
        let mut fresh = || {
            *next += 1;
            *next - 1
        };
        match (bs.len(), as_.len()) {
            (1, 1) => out[as_[0]] = ids[bs[0]],
            (2, 1) => {
                let o = fresh();
                events.push(Event::Merge { a: ids[bs[0]], b: ids[bs[1]], out: o });
                out[as_[0]] = o;
                kinds.push(StepKind::Saddle);
            }
            (1, 2) => {
                let o = [fresh(), fresh()];
                events.push(Event::Split { input: ids[bs[0]], out: o });
                out[as_[0]] = o[0];
                out[as_[1]] = o[1];
                kinds.push(StepKind::Saddle);
            }
            (0, 1) => {
                let o = fresh();
                events.push(Event::Birth { out: o });
                out[as_[0]] = o;
                kinds.push(StepKind::Birth);
            }
            (1, 0) => {
                events.push(Event::Death { input: ids[bs[0]] });
                kinds.push(StepKind::Death);
            }
            (x, y) => return Err(QError::Shadow(format!("{x} circles become {y} in one step"))),
        }
    }
    let kind = match kinds.as_slice() {
        [] => StepKind::Isotopy,
        [k] => *k,
        _ => return Err(QError::Shadow(format!("several elementary changes {kinds:?} in one step"))),
    };
    if !allowed.contains(&kind) {
        return Err(QError::Shadow(format!("step is a {kind:?}, expected one of {allowed:?}")));
    }
    Ok((events, out))
}

/// The flat cobordism of a term, or `None` when it passes through ZERO.
/// Also returns the target word.
fn build_movie(src: &OneMorphismWord, term: &Term) -> Result<(Option<Movie>, OneMorphismWord), QError> {
    let mut words = vec![src.clone()];
    for g in &term.0 {
        let next = apply_gen(words.last().unwrap(), *g)?;
        words.push(next);
    }
    let target = words.last().unwrap().clone();
    if target.weights().last() != src.weights().last() {
        return Err(QError::Type(format!("term {term} changes the target weight")));
    }
    if words.iter().any(OneMorphismWord::is_zero) {
        return Ok((None, target));
    }
    let mut frames = vec![diagram(src)];
    let mut moves = Vec::new();
    use StepKind::*;
    for (t, g) in term.0.iter().enumerate() {
        let (w, w2) = (&words[t], &words[t + 1]);
        match *g {
            Gen::Dot { pos } => {
                moves.push(Move::Dot { block: pos });
                frames.push(frames.last().unwrap().clone());
            }
            Gen::Cross { pos } => {
                let (x, y) = (w.letters[pos], w.letters[pos + 1]);
                if x.i == y.i {
                    // cut the loop: death, then birth
                    let mut mid = frames.last().unwrap().clone();
                    for blk in &mut mid.blocks[pos..pos + 2] {
                        let r = blk.rung.take().unwrap();
                        blk.pieces.remove(r);
                    }
                    mid.levels[pos + 1][x.i - 1] = false;
                    mid.levels[pos + 1][x.i] = false;
                    moves.push(Move::Replace { s: pos, e: pos + 2, e2: pos + 2, allowed: vec![Death] });
                    frames.push(mid);
                    moves.push(Move::Replace { s: pos, e: pos + 2, e2: pos + 2, allowed: vec![Birth] });
                } else if x.i.abs_diff(y.i) == 1 {
                    moves.push(Move::Replace { s: pos, e: pos + 2, e2: pos + 2, allowed: vec![Saddle] });
                } else {
                    moves.push(Move::Replace { s: pos, e: pos + 2, e2: pos + 2, allowed: vec![Isotopy] });
                }
                frames.push(diagram(w2));
            }
            Gen::CupFE { pos, .. } | Gen::CupEF { pos, .. } => {
                moves.push(Move::Replace { s: pos, e: pos, e2: pos + 2, allowed: vec![Isotopy, Saddle, Birth] });
                frames.push(diagram(w2));
            }
            Gen::CapFE { pos } | Gen::CapEF { pos } => {
                moves.push(Move::Replace { s: pos, e: pos + 2, e2: pos, allowed: vec![Isotopy, Saddle, Death] });
                frames.push(diagram(w2));
            }
        }
    }
    Ok((Some(Movie { frames, moves }), target))
}

/// Event list of a movie on the circles of `a ∪ T ∪ b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockShadow {
    pub a: Matching,
    pub b: Matching,
    pub events: Vec<Event>,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
    pub kinds: Vec<StepKind>,
}

fn run_movie(mv: &Movie, a: &Matching, b: &Matching) -> Result<BlockShadow, QError> {
    let mut circles = diagram_circles(&mv.frames[0], a, b);
    let mut ids: Vec<u32> = (0..circles.len() as u32).collect();
    let inputs = ids.clone();
    let mut next = ids.len() as u32;
    let mut events = Vec::new();
    let mut kinds = Vec::new();
    for (t, m) in mv.moves.iter().enumerate() {
        let frame = &mv.frames[t];
        match m {
            Move::Dot { block } => {
                let blk = &frame.blocks[*block];
                let ((rl, p), _) = blk.pieces[blk.rung.expect("dot on a rung")];
                let nd = (block + rl, p);
                let c = circles.iter().position(|g| g.binary_search(&nd).is_ok()).expect("rung on a circle");
                events.push(Event::Dot { circle: ids[c] });
                kinds.push(StepKind::Dot);
            }
            Move::Replace { s, e, e2, allowed } => {
                let after = diagram_circles(&mv.frames[t + 1], a, b);
                let (ev, out) = replace_events(&circles, &after, &ids, &mut next, (*s, *e, *e2), allowed)?;
                kinds.push(match ev.as_slice() {
                    [] => StepKind::Isotopy,
                    [Event::Birth { .. }] => StepKind::Birth,
                    [Event::Death { .. }] => StepKind::Death,
                    _ => StepKind::Saddle,
                });
                events.extend(ev);
                circles = after;
                ids = out;
            }
        }
    }
    Ok(BlockShadow { a: a.clone(), b: b.clone(), events, inputs, outputs: ids, kinds })
}

fn boundary_pairs(src: &GLWeight, tgt: &GLWeight) -> Vec<(Matching, Matching)> {
    let side = |k: &GLWeight| if k.ones() % 2 == 0 { enumerate_matchings(k.ones() / 2) } else { Vec::new() };
    let (la, lb) = (side(src), side(tgt));
    la.iter().flat_map(|a| lb.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

/// Number of circles of `a ∪ T ∪ b` per boundary pair; empty for ZERO words.
fn block_sizes(w: &OneMorphismWord) -> Vec<usize> {
    if w.is_zero() {
        return Vec::new();
    }
    let d = diagram(w);
    boundary_pairs(&w.source, &w.target()).iter().map(|(a, b)| diagram_circles(&d, a, b).len()).collect()
}

/// Dimension of the bimodule of a word.
pub fn word_dimension(w: &OneMorphismWord) -> usize {
    block_sizes(w).iter().map(|c| 1usize << c).sum()
}

/// The shadow of a term: one event list per boundary pair, or `None` (ZERO).
pub fn term_shadow(src: &OneMorphismWord, term: &Term) -> Result<(Option<Vec<BlockShadow>>, OneMorphismWord), QError> {
    let (mv, target) = build_movie(src, term)?;
    let Some(mv) = mv else { return Ok((None, target)) };
    let blocks = boundary_pairs(&src.source, &src.target())
        .iter()
        .map(|(a, b)| run_movie(&mv, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Some(blocks), target))
}

/// Matrix of a term on the canonical basis (boundary pairs in order, then
/// dot labellings). A ZERO term gives the zero matrix of the right shape.
pub fn evaluate_2morphism<R: Ring>(src: &OneMorphismWord, term: &Term) -> Result<Matrix<R>, QError> {
    let (blocks, target) = term_shadow(src, term)?;
    let (rows, cols) = (word_dimension(&target), word_dimension(src));
    let mut m = Matrix::zeros(rows, cols);
    let Some(blocks) = blocks else { return Ok(m) };
    let (mut r0, mut c0) = (0, 0);
    for bl in &blocks {
        let bm: Matrix<R> = events_matrix(&bl.events, &bl.inputs, &bl.outputs);
        for i in 0..bm.rows() {
            for j in 0..bm.cols() {
                m.set(r0 + i, c0 + j, bm.get(i, j));
            }
        }
        r0 += bm.rows();
        c0 += bm.cols();
    }
    debug_assert_eq!((r0, c0), (rows, cols));
    Ok(m)
}

// ---------------------------------------------------------------------------
// relation catalog

pub const FAMILIES: &[&str] = &[
    "nilhecke-tau2",
    "nilhecke-dot-slide",
    "klr-r2",
    "klr-dot-slide",
    "klr-r3",
    "distant-commute",
    "zigzag",
    "dot-cyclic",
    "bubble",
    "ef-decomposition",
    "ef-mixed",
];

/// One relation at one weight: the terms sum to zero (with signs over Z).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationInstance {
    pub family: String,
    pub label: String,
    pub source: OneMorphismWord,
    pub terms: Vec<Term>,
}

fn dots(pos: usize, m: usize) -> Vec<Gen> {
    vec![Gen::Dot { pos }; m]
}

/// Sideways crossing `E_i F_j 1 -> F_j E_i 1` on the word `[F_j, E_i]`.
fn sideways(j: usize) -> Vec<Gen> {
    vec![Gen::CupFE { i: j, pos: 2 }, Gen::Cross { pos: 1 }, Gen::CapEF { pos: 0 }]
}

/// Sideways crossing `F_j E_i 1 -> E_i F_j 1` on the word `[E_i, F_j]`.
fn sideways_back(i: usize) -> Vec<Gen> {
    vec![Gen::CupEF { i, pos: 2 }, Gen::Cross { pos: 1 }, Gen::CapFE { pos: 0 }]
}

/// Instances of a family at a weight (colours range over `1..n`).
pub fn instances(family: &str, k: &GLWeight) -> Result<Vec<RelationInstance>, QError> {
    let n = k.n();
    let cols: Vec<usize> = (1..n).collect();
    let mut out = Vec::new();
    let mut push = |label: String, letters: Vec<Letter>, terms: Vec<Vec<Gen>>| {
        out.push(RelationInstance {
            family: family.to_string(),
            label,
            source: OneMorphismWord { source: k.clone(), letters },
            terms: terms.into_iter().map(Term).collect(),
        });
    };
    let lt = |e: bool, i: usize| Letter { e, i };
    let kind = |e: bool| if e { "E" } else { "F" };
    use Gen::*;
    match family {
        "nilhecke-tau2" => {
            for e in [true, false] {
                for &i in &cols {
                    push(format!("{}{i}{}{i}", kind(e), kind(e)), vec![lt(e, i), lt(e, i)], vec![vec![Cross { pos: 0 }, Cross { pos: 0 }]]);
                }
            }
        }
        "nilhecke-dot-slide" => {
            for e in [true, false] {
                for &i in &cols {
                    let w = vec![lt(e, i), lt(e, i)];
                    push(
                        format!("{}{i} first", kind(e)),
                        w.clone(),
                        vec![vec![Dot { pos: 0 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 1 }], vec![]],
                    );
                    push(
                        format!("{}{i} second", kind(e)),
                        w,
                        vec![vec![Dot { pos: 1 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 0 }], vec![]],
                    );
                }
            }
        }
        "klr-r2" | "klr-dot-slide" | "distant-commute" => {
            for e in [true, false] {
                for &a in &cols {
                    for &b in &cols {
                        let d = a.abs_diff(b);
                        let w = vec![lt(e, a), lt(e, b)];
                        let name = format!("{}{a},{}{b}", kind(e), kind(e));
                        match family {
                            "klr-r2" if d == 1 => push(
                                name,
                                w,
                                vec![vec![Cross { pos: 0 }, Cross { pos: 0 }], vec![Dot { pos: 0 }], vec![Dot { pos: 1 }]],
                            ),
                            "distant-commute" if d >= 2 => {
                                push(format!("{name} r2"), w.clone(), vec![vec![Cross { pos: 0 }, Cross { pos: 0 }], vec![]]);
                                push(
                                    format!("{name} dot first"),
                                    w.clone(),
                                    vec![vec![Dot { pos: 0 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 1 }]],
                                );
                                push(
                                    format!("{name} dot second"),
                                    w,
                                    vec![vec![Dot { pos: 1 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 0 }]],
                                );
                            }
                            "klr-dot-slide" if d == 1 => {
                                push(
                                    format!("{name} first"),
                                    w.clone(),
                                    vec![vec![Dot { pos: 0 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 1 }]],
                                );
                                push(
                                    format!("{name} second"),
                                    w,
                                    vec![vec![Dot { pos: 1 }, Cross { pos: 0 }], vec![Cross { pos: 0 }, Dot { pos: 0 }]],
                                );
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        "klr-r3" => {
            for e in [true, false] {
                for &a in &cols {
                    for &b in &cols {
                        for &c in &cols {
                            let mut terms = vec![
                                vec![Cross { pos: 0 }, Cross { pos: 1 }, Cross { pos: 0 }],
                                vec![Cross { pos: 1 }, Cross { pos: 0 }, Cross { pos: 1 }],
                            ];
                            if a == c && a.abs_diff(b) == 1 {
                                terms.push(vec![]);
                            }
                            push(format!("{}{a},{b},{c}", kind(e)), vec![lt(e, a), lt(e, b), lt(e, c)], terms);
                        }
                    }
                }
            }
        }
        "zigzag" => {
            for &i in &cols {
                push(format!("E{i} right"), vec![Letter::e(i)], vec![vec![CupFE { i, pos: 0 }, CapEF { pos: 1 }], vec![]]);
                push(format!("E{i} left"), vec![Letter::e(i)], vec![vec![CupEF { i, pos: 1 }, CapFE { pos: 0 }], vec![]]);
                push(format!("F{i} right"), vec![Letter::f(i)], vec![vec![CupEF { i, pos: 0 }, CapFE { pos: 1 }], vec![]]);
                push(format!("F{i} left"), vec![Letter::f(i)], vec![vec![CupFE { i, pos: 1 }, CapEF { pos: 0 }], vec![]]);
            }
        }
        "dot-cyclic" => {
            for &i in &cols {
                push(
                    format!("FE{i}"),
                    vec![Letter::e(i), Letter::f(i)],
                    vec![vec![Dot { pos: 0 }, CapFE { pos: 0 }], vec![Dot { pos: 1 }, CapFE { pos: 0 }]],
                );
                push(
                    format!("EF{i}"),
                    vec![Letter::f(i), Letter::e(i)],
                    vec![vec![Dot { pos: 0 }, CapEF { pos: 0 }], vec![Dot { pos: 1 }, CapEF { pos: 0 }]],
                );
            }
        }
        "bubble" => {
            for &i in &cols {
                let lam = k.lambda(i);
                for m in 0..=3i32 {
                    for fe in [true, false] {
                        let deg = if fe { 2 * (m + lam + 1) } else { 2 * (m - lam + 1) };
                        if deg > 0 {
                            continue;
                        }
                        let mut t = vec![if fe { CupFE { i, pos: 0 } } else { CupEF { i, pos: 0 } }];
                        t.extend(dots(0, m as usize));
                        t.push(if fe { CapFE { pos: 0 } } else { CapEF { pos: 0 } });
                        let mut terms = vec![t];
                        if deg == 0 {
                            terms.push(vec![]);
                        }
                        push(format!("{}{i} dots {m}", if fe { "FE" } else { "EF" }), vec![], terms);
                    }
                }
            }
        }
        "ef-decomposition" => {
            for &i in &cols {
                let lam = k.lambda(i);
                // E_i F_i 1_k on [F_i, E_i]
                let mut terms = vec![vec![], [sideways(i), sideways_back(i)].concat()];
                for f1 in 0..lam.max(0) {
                    let f2 = lam - 1 - f1;
                    terms.push([dots(0, f2 as usize), vec![CapEF { pos: 0 }, CupEF { i, pos: 0 }], dots(0, f1 as usize)].concat());
                }
                push(format!("EF{i}"), vec![Letter::f(i), Letter::e(i)], terms);
                // F_i E_i 1_k on [E_i, F_i]
                let mut terms = vec![vec![], [sideways_back(i), sideways(i)].concat()];
                for f1 in 0..(-lam).max(0) {
                    let f2 = -lam - 1 - f1;
                    terms.push([dots(0, f2 as usize), vec![CapFE { pos: 0 }, CupFE { i, pos: 0 }], dots(0, f1 as usize)].concat());
                }
                push(format!("FE{i}"), vec![Letter::e(i), Letter::f(i)], terms);
            }
        }
        "ef-mixed" => {
            for &i in &cols {
                for &j in &cols {
                    if i == j {
                        continue;
                    }
                    push(format!("E{i}F{j}"), vec![Letter::f(j), Letter::e(i)], vec![[sideways(j), sideways_back(i)].concat(), vec![]]);
                    push(format!("F{j}E{i}"), vec![Letter::e(i), Letter::f(j)], vec![[sideways_back(i), sideways(j)].concat(), vec![]]);
                }
            }
        }
        other => return Err(QError::UnknownRelation(other.to_string())),
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceVerdict {
    pub family: String,
    pub label: String,
    pub weight: GLWeight,
    /// the source word is ZERO
    pub vacuous: bool,
    /// the summed matrices vanish over F2
    pub direct: bool,
    /// the summed shadows reduce to zero by the Bar-Natan relations
    pub barnatan: bool,
}

impl InstanceVerdict {
    pub fn pass(&self) -> bool {
        self.direct && self.barnatan
    }
}

/// F2 check of one instance by both routes.
pub fn check_instance(rel: &RelationInstance) -> Result<InstanceVerdict, QError> {
    let mut verdict = InstanceVerdict {
        family: rel.family.clone(),
        label: rel.label.clone(),
        weight: rel.source.source.clone(),
        vacuous: rel.source.is_zero(),
        direct: true,
        barnatan: true,
    };
    let mut shadows: Vec<Vec<BlockShadow>> = Vec::new();
    let mut total: Option<Matrix<F2>> = None;
    let mut target: Option<OneMorphismWord> = None;
    for t in &rel.terms {
        let (blocks, tgt) = term_shadow(&rel.source, t)?;
        if target.get_or_insert_with(|| tgt.clone()) != &tgt {
            return Err(QError::Type(format!("terms of {} {} end at different words", rel.family, rel.label)));
        }
        let m: Matrix<F2> = evaluate_2morphism(&rel.source, t)?;
        total = Some(match total {
            None => m,
            Some(x) => x.add(&m),
        });
        if let Some(b) = blocks {
            shadows.push(b);
        }
    }
    if verdict.vacuous {
        return Ok(verdict);
    }
    verdict.direct = total.map_or(true, |m| m.is_zero());
    let nblocks = boundary_pairs(&rel.source.source, &rel.source.target()).len();
    for bi in 0..nblocks {
        let descs: Vec<CobDescriptor> =
            shadows.iter().map(|s| describe(&s[bi].events, &s[bi].inputs, &s[bi].outputs)).collect();
        if !check_barnatan_f2(&descs, &[]) {
            verdict.barnatan = false;
        }
    }
    Ok(verdict)
}

/// Every instance of `family` at `k`, checked over F2.
pub fn check_relation(family: &str, k: &GLWeight) -> Result<Vec<InstanceVerdict>, QError> {
    instances(family, k)?.iter().map(check_instance).collect()
}

/// The lexicographically least `eps` in {+1, -1}^t (with +1 before -1) such
/// that the signed sum of the terms vanishes over Z.
pub fn solve_signs(rel: &RelationInstance) -> Result<Option<Vec<i8>>, QError> {
    let t = rel.terms.len();
    if t > 16 {
        return Err(QError::TooManyTerms(t));
    }
    let ms: Vec<Matrix<i64>> = rel.terms.iter().map(|x| evaluate_2morphism(&rel.source, x)).collect::<Result<_, _>>()?;
    for mask in 0u32..1 << t {
        // bit (t - 1 - j) set means eps_j = -1, so counting up is lexicographic
        let eps: Vec<i8> = (0..t).map(|j| if mask >> (t - 1 - j) & 1 == 1 { -1 } else { 1 }).collect();
        let mut acc = ms[0].scale(eps[0] as i64);
        for j in 1..t {
            acc = acc.add(&ms[j].scale(eps[j] as i64));
        }
        if acc.is_zero() {
            return Ok(Some(eps));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QgroupReport {
    pub n: usize,
    pub families: Vec<String>,
    /// (instances checked, vacuous, failures) per family
    pub counts: BTreeMap<String, (usize, usize, usize)>,
    pub failures: Vec<InstanceVerdict>,
    pub pass: bool,
}

/// All in-range weights for rank `n`, every requested family.
pub fn check_all(n: usize, families: &[&str]) -> Result<QgroupReport, QError> {
    let mut rep = QgroupReport { n, families: families.iter().map(|s| s.to_string()).collect(), ..Default::default() };
    for k in GLWeight::all_in_range(n) {
        for fam in families {
            for v in check_relation(fam, &k)? {
                let c = rep.counts.entry(fam.to_string()).or_default();
                if v.vacuous {
                    c.1 += 1;
                } else {
                    c.0 += 1;
                }
                if !v.pass() {
                    c.2 += 1;
                    rep.failures.push(v);
                }
            }
        }
    }
    rep.pass = rep.failures.is_empty();
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSolution {
    pub family: String,
    pub label: String,
    pub weight: GLWeight,
    pub terms: Vec<String>,
    pub signs: Option<Vec<i8>>,
    /// the F2 verdict of the same instance
    pub f2: bool,
}

/// Sign search for every non-vacuous instance at every in-range weight.
pub fn solve_all(n: usize, families: &[&str]) -> Result<Vec<SignSolution>, QError> {
    let mut out = Vec::new();
    for k in GLWeight::all_in_range(n) {
        for fam in families {
            for rel in instances(fam, &k)? {
                if rel.source.is_zero() {
                    continue;
                }
                out.push(SignSolution {
                    family: rel.family.clone(),
                    label: rel.label.clone(),
                    weight: k.clone(),
                    terms: rel.terms.iter().map(|t| t.to_string()).collect(),
                    signs: solve_signs(&rel)?,
                    f2: check_instance(&rel)?.pass(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::circles_with_tangle;

    fn k(s: &str) -> GLWeight {
        GLWeight::parse(s).unwrap()
    }

    #[test]
    fn ladder_examples() {
        let cap = ladder_tangle(Letter::e(1), &k("11")).unwrap().unwrap();
        assert_eq!((cap.left, cap.right, cap.slices.clone()), (2, 0, vec![Slice::Cap { i: 1 }]));
        assert_eq!(ladder_tangle(Letter::e(1), &k("20")).unwrap(), None);
        let cup = ladder_tangle(Letter::f(1), &k("20")).unwrap().unwrap();
        assert_eq!((cup.left, cup.right, cup.slices.clone()), (0, 2, vec![Slice::Cup { i: 1 }]));
        assert!(ladder_tangle(Letter::e(2), &k("11")).is_err());
    }

    #[test]
    fn piece_graph_matches_planar_circles() {
        for n in 2..=3 {
            for kk in GLWeight::all_in_range(n) {
                for len in 0..=3usize {
                    let letters_all: Vec<Letter> = (1..n).flat_map(|i| [Letter::e(i), Letter::f(i)]).collect();
                    let mut words = vec![vec![]];
                    for _ in 0..len {
                        words = words.into_iter().flat_map(|w: Vec<Letter>| letters_all.iter().map(move |l| [w.clone(), vec![*l]].concat())).collect();
                    }
                    for ls in words {
                        let w = OneMorphismWord::new(kk.clone(), ls).unwrap();
                        let Some(t) = word_tangle(&w).unwrap() else { continue };
                        let d = diagram(&w);
                        for (a, b) in boundary_pairs(&w.source, &w.target()) {
                            let c = circles_with_tangle(&a, &t, &b).unwrap().len();
                            assert_eq!(diagram_circles(&d, &a, &b).len(), c, "{w}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn identity_and_dot() {
        let w = OneMorphismWord::new(k("11"), vec![Letter::e(1)]).unwrap();
        let id: Matrix<F2> = evaluate_2morphism(&w, &Term::default()).unwrap();
        assert_eq!(id, Matrix::identity(2));
        // the cap bimodule is A; the dot multiplies by X
        let x: Matrix<F2> = evaluate_2morphism(&w, &Term(vec![Gen::Dot { pos: 0 }])).unwrap();
        let mut want = Matrix::<F2>::zeros(2, 2);
        want.set(1, 0, F2::ONE);
        assert_eq!(x, want);
    }

    #[test]
    fn zero_weights_give_zero() {
        let w = OneMorphismWord::new(k("20"), vec![Letter::e(1)]).unwrap();
        assert!(w.is_zero());
        let m: Matrix<F2> = evaluate_2morphism(&w, &Term(vec![Gen::Dot { pos: 0 }])).unwrap();
        assert_eq!((m.rows(), m.cols()), (0, 0));
        for fam in FAMILIES {
            for v in check_relation(fam, &k("3,-1")).unwrap() {
                assert!(v.vacuous && v.pass());
            }
        }
    }

    #[test]
    fn type_errors() {
        let w = OneMorphismWord::new(k("02"), vec![Letter::e(1), Letter::f(1)]).unwrap();
        assert!(matches!(apply_gen(&w, Gen::Cross { pos: 0 }), Err(QError::Type(_))));
        assert!(matches!(apply_gen(&w, Gen::CapEF { pos: 0 }), Err(QError::Type(_))));
        assert!(apply_gen(&w, Gen::CapFE { pos: 0 }).is_ok());
        assert!(matches!(instances("nope", &k("02")), Err(QError::UnknownRelation(_))));
    }

    #[test]
    fn nilhecke_at_02() {
        for fam in ["nilhecke-tau2", "nilhecke-dot-slide"] {
            let vs = check_relation(fam, &k("02")).unwrap();
            let live: Vec<_> = vs.iter().filter(|v| !v.vacuous).collect();
            assert!(!live.is_empty(), "{fam}");
            assert!(vs.iter().all(InstanceVerdict::pass), "{fam} {vs:?}");
        }
    }

    #[test]
    fn dot_slide_signs_and_corruption() {
        let rel = instances("nilhecke-dot-slide", &k("02")).unwrap().into_iter().find(|r| !r.source.is_zero()).unwrap();
        let eps = solve_signs(&rel).unwrap().expect("signs exist");
        assert_eq!(eps[0], 1);
        let mut broken = rel.clone();
        broken.terms.pop();
        assert_eq!(solve_signs(&broken).unwrap(), None);
        assert!(!check_instance(&broken).unwrap().pass());
        let single = RelationInstance { terms: vec![Term::default()], ..rel };
        assert_eq!(solve_signs(&single).unwrap(), None);
    }

    #[test]
    fn crossing_of_equal_letters_cuts_the_loop() {
        let w = OneMorphismWord::new(k("02"), vec![Letter::e(1), Letter::e(1)]).unwrap();
        let (b, _) = term_shadow(&w, &Term(vec![Gen::Cross { pos: 0 }])).unwrap();
        let b = b.unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].kinds, vec![StepKind::Death, StepKind::Birth]);
    }

    #[test]
    fn rank_two_sweep() {
        let rep = check_all(2, FAMILIES).unwrap();
        assert!(rep.pass, "{:?}", rep.failures);
    }

    fn random_gen(w: &OneMorphismWord, code: (u8, usize, usize), lo: usize, hi: usize) -> Option<Gen> {
        // a generator acting inside letters lo..hi of w
        let (c, p, i) = code;
        let span = hi - lo;
        let n = w.source.n();
        let g = match c % 6 {
            0 if span >= 1 => Gen::Dot { pos: lo + p % span },
            1 if span >= 2 => Gen::Cross { pos: lo + p % (span - 1) },
            2 => Gen::CupFE { i: 1 + i % (n - 1), pos: lo + p % (span + 1) },
            3 => Gen::CupEF { i: 1 + i % (n - 1), pos: lo + p % (span + 1) },
            4 if span >= 2 => Gen::CapFE { pos: lo + p % (span - 1) },
            5 if span >= 2 => Gen::CapEF { pos: lo + p % (span - 1) },
            _ => return None,
        };
        apply_gen(w, g).ok().map(|_| g)
    }

    fn shift(g: Gen, d: isize) -> Gen {
        let m = |p: usize| (p as isize + d) as usize;
        match g {
            Gen::Dot { pos } => Gen::Dot { pos: m(pos) },
            Gen::Cross { pos } => Gen::Cross { pos: m(pos) },
            Gen::CupFE { i, pos } => Gen::CupFE { i, pos: m(pos) },
            Gen::CupEF { i, pos } => Gen::CupEF { i, pos: m(pos) },
            Gen::CapFE { pos } => Gen::CapFE { pos: m(pos) },
            Gen::CapEF { pos } => Gen::CapEF { pos: m(pos) },
        }
    }

    fn letters_from(codes: &[(bool, usize)], n: usize) -> Vec<Letter> {
        codes.iter().map(|&(e, i)| Letter { e, i: 1 + i % (n - 1) }).collect()
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn vertical_composition_is_matrix_product(
            kk in 0usize..27,
            ls in proptest::collection::vec((any::<bool>(), 0usize..2), 0..4),
            codes in proptest::collection::vec((0u8..6, 0usize..4, 0usize..2), 1..5),
            cut in 0usize..5,
        ) {
            let k = GLWeight::all_in_range(3)[kk].clone();
            let mut w = OneMorphismWord::new(k, letters_from(&ls, 3)).unwrap();
            let src = w.clone();
            let mut gens = Vec::new();
            for c in codes {
                let len = w.letters.len();
                if let Some(g) = random_gen(&w, c, 0, len) {
                    w = apply_gen(&w, g).unwrap();
                    gens.push(g);
                }
            }
            let cut = cut.min(gens.len());
            let mid = gens[..cut].iter().fold(src.clone(), |x, g| apply_gen(&x, *g).unwrap());
            let whole: Matrix<i64> = evaluate_2morphism(&src, &Term(gens.clone())).unwrap();
            let first: Matrix<i64> = evaluate_2morphism(&src, &Term(gens[..cut].to_vec())).unwrap();
            let second: Matrix<i64> = evaluate_2morphism(&mid, &Term(gens[cut..].to_vec())).unwrap();
            prop_assert_eq!(whole, second.mul(&first));
        }

        #[test]
        fn disjoint_generators_interchange(
            kk in 0usize..27,
            ls in proptest::collection::vec((any::<bool>(), 0usize..2), 0..5),
            split in 0usize..6,
            g1 in (0u8..6, 0usize..4, 0usize..2),
            g2 in (0u8..6, 0usize..4, 0usize..2),
        ) {
            let k = GLWeight::all_in_range(3)[kk].clone();
            let w = OneMorphismWord::new(k, letters_from(&ls, 3)).unwrap();
            let split = split.min(w.letters.len());
            let (Some(a), Some(b)) = (random_gen(&w, g1, 0, split), random_gen(&w, g2, split, w.letters.len())) else {
                return Ok(());
            };
            // a acts left of `split`, b right of it; cups at the cut are fine
            let grow = |g: Gen| match g {
                Gen::CupFE { .. } | Gen::CupEF { .. } => 2isize,
                Gen::CapFE { .. } | Gen::CapEF { .. } => -2,
                _ => 0,
            };
            let one: Matrix<i64> = evaluate_2morphism(&w, &Term(vec![a, shift(b, grow(a))])).unwrap();
            let two: Matrix<i64> = evaluate_2morphism(&w, &Term(vec![b, a])).unwrap();
            prop_assert_eq!(one, two);
        }
    }
}
