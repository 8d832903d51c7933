//! Frame surfaces: the thickened-bridge surfaces that define multiplication
//! maps, their cell counts, components and genera, and a saddle sweep that
//! decomposes each frame into merges, splits and births.
//!
//! A frame lives inside an [`Ambient`] (the matchings on both sides plus an
//! optional tangle with a cube edge `v -> w`). Local frames of a tree refer to
//! ambient slots by index so that 1-cycles of different frames can be
//! compared in one fixed graph (the ambient spine).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planar::{self, circles, circles_with_tangle, resolve, Bits, CircleSet, Matching, Slice, SliceWord, UnionFind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("matchings of different sizes in one frame")]
    SizeMismatch,
    #[error("resolution {0:?} is not below {1:?}")]
    NotBelow(Bits, Bits),
    #[error("bad frame: {0}")]
    Bad(String),
    #[error(transparent)]
    Planar(#[from] planar::PlanarError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// Edges of the ambient spine graph; a 1-chain is an integer combination.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EKey {
    /// Bridge of arc (min point) in slot `g` on a side, oriented odd -> even.
    Bridge(Side, usize, usize),
    Seg(usize, usize),
    HalfL(usize, usize),
    HalfR(usize, usize),
    Band(usize),
    Cap(usize),
    Cup(usize),
    Loop(usize),
}

pub type Chain = BTreeMap<EKey, i64>;

pub fn chain_add(into: &mut Chain, other: &Chain, sign: i64) {
    for (k, v) in other {
        let e = into.entry(*k).or_insert(0);
        *e += sign * v;
        if *e == 0 {
            into.remove(k);
        }
    }
}

fn single(k: EKey, sign: i64) -> Chain {
    BTreeMap::from([(k, sign)])
}

fn neg(c: &Chain) -> Chain {
    c.iter().map(|(k, v)| (*k, -v)).collect()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum VKey {
    Mid(usize, usize),
    BandMid(usize, u8),
    LoopV(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientTangle {
    pub t: SliceWord,
    pub v: Bits,
    pub w: Bits,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambient {
    pub left: Vec<Matching>,
    pub tangle: Option<AmbientTangle>,
    pub right: Vec<Matching>,
}

impl Ambient {
    pub fn arcs(seq: Vec<Matching>) -> Self {
        Ambient { left: seq, tangle: None, right: Vec::new() }
    }

    fn last_slice(&self) -> usize {
        self.tangle.as_ref().map_or(0, |t| t.t.slices.len())
    }

    pub fn matching(&self, side: Side, g: usize) -> &Matching {
        match side {
            Side::L => &self.left[g],
            Side::R => &self.right[g],
        }
    }

    fn rail(&self, side: Side, p: usize) -> VKey {
        match side {
            Side::L => VKey::Mid(0, p),
            Side::R => VKey::Mid(self.last_slice(), p),
        }
    }

    fn tangle(&self) -> &AmbientTangle {
        self.tangle.as_ref().expect("ambient has a tangle")
    }
}

/// A boundary object of a frame, by ambient slot indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SlotObject {
    /// `a_i ∪ ā_j` on one side.
    Pair { side: Side, i: usize, j: usize },
    /// `a_i ∪ T_u ∪ b̄_j`.
    Triple { i: usize, u: Bits, j: usize },
}

pub fn object_circles(amb: &Ambient, obj: &SlotObject) -> CircleSet {
    match obj {
        SlotObject::Pair { side, i, j } => circles(amb.matching(*side, *i), amb.matching(*side, *j)),
        SlotObject::Triple { i, u, j } => {
            let tg = amb.tangle();
            circles_with_tangle(&amb.left[*i], &resolve(&tg.t, u), &amb.right[*j]).expect("consistent ambient")
        }
    }
}

/// Which ambient slots a frame uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameShape {
    Arc { side: Side, slots: Vec<usize> },
    Tangle { left: Vec<usize>, u: Bits, u2: Bits, right: Vec<usize> },
}

impl FrameShape {
    pub fn inputs(&self) -> Vec<SlotObject> {
        match self {
            FrameShape::Arc { side, slots } => {
                slots.windows(2).map(|w| SlotObject::Pair { side: *side, i: w[0], j: w[1] }).collect()
            }
            FrameShape::Tangle { left, u, right, .. } => {
                let mut out: Vec<SlotObject> =
                    left.windows(2).map(|w| SlotObject::Pair { side: Side::L, i: w[0], j: w[1] }).collect();
                out.push(SlotObject::Triple { i: *left.last().unwrap(), u: u.clone(), j: right[0] });
                out.extend(right.windows(2).map(|w| SlotObject::Pair { side: Side::R, i: w[0], j: w[1] }));
                out
            }
        }
    }

    pub fn output(&self) -> SlotObject {
        match self {
            FrameShape::Arc { side, slots } => {
                SlotObject::Pair { side: *side, i: slots[0], j: *slots.last().unwrap() }
            }
            FrameShape::Tangle { left, u2, right, .. } => {
                SlotObject::Triple { i: left[0], u: u2.clone(), j: *right.last().unwrap() }
            }
        }
    }
}

/// Cell counts of the CW model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub bridges: usize,
    pub rails: usize,
    pub strips: usize,
    pub annuli: usize,
    pub bands: usize,
    pub gluings: usize,
}

impl CellCounts {
    /// Disks count 1, annuli 0, each gluing interval -1.
    pub fn euler_char(&self) -> i64 {
        (self.bridges + self.rails + self.strips + self.bands) as i64 - self.gluings as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameComponent {
    pub euler_char: i64,
    pub genus: usize,
    /// `(input slot, circle index)`, slots 0-based.
    pub inputs: Vec<(usize, usize)>,
    pub outputs: Vec<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Merge { a: u32, b: u32, out: u32 },
    Split { input: u32, out: [u32; 2] },
    Birth { out: u32 },
    Death { input: u32 },
    Dot { circle: u32 },
}

impl Event {
    pub fn consumed(&self) -> Vec<u32> {
        match *self {
            Event::Merge { a, b, .. } => vec![a, b],
            Event::Split { input, .. } | Event::Death { input } => vec![input],
            Event::Birth { .. } | Event::Dot { .. } => vec![],
        }
    }

    pub fn produced(&self) -> Vec<u32> {
        match *self {
            Event::Merge { out, .. } | Event::Birth { out } => vec![out],
            Event::Split { out, .. } => out.to_vec(),
            Event::Death { .. } | Event::Dot { .. } => vec![],
        }
    }
}

/// A sweep of a frame. Input circles get ids first (slot by slot, canonical
/// order), then each event numbers the circles it creates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaddleDecomposition {
    pub inputs: Vec<Vec<u32>>,
    pub outputs: Vec<u32>,
    pub events: Vec<Event>,
    #[serde(skip)]
    pub circle_chain: BTreeMap<u32, Chain>,
    pub circle_comp: BTreeMap<u32, usize>,
}

impl SaddleDecomposition {
    /// Circles joining two events: `(circle, producer, consumer)`.
    pub fn gluing_edges(&self) -> Vec<(u32, usize, usize)> {
        let mut prod = HashMap::new();
        let mut cons = HashMap::new();
        for (k, e) in self.events.iter().enumerate() {
            for c in e.produced() {
                prod.insert(c, k);
            }
            for c in e.consumed() {
                cons.insert(c, k);
            }
        }
        let mut out: Vec<(u32, usize, usize)> =
            prod.iter().filter_map(|(c, p)| cons.get(c).map(|q| (*c, *p, *q))).collect();
        out.sort();
        out
    }

    fn events_in(&self, comp: usize) -> Vec<usize> {
        (0..self.events.len())
            .filter(|&k| {
                let e = &self.events[k];
                e.consumed().iter().chain(e.produced().iter()).any(|c| self.circle_comp[c] == comp)
            })
            .collect()
    }

    /// First Betti number of the gluing graph restricted to a component.
    pub fn betti(&self, comp: usize) -> usize {
        let v = self.events_in(comp).len();
        if v == 0 {
            return 0;
        }
        let e = self.gluing_edges().iter().filter(|(c, _, _)| self.circle_comp[c] == comp).count();
        e + 1 - v
    }

    /// Circles on the unique cycle of a component whose gluing graph has
    /// Betti number one, sorted by id.
    pub fn cycle(&self, comp: usize) -> Vec<u32> {
        let mut edges: Vec<(u32, usize, usize)> =
            self.gluing_edges().into_iter().filter(|(c, _, _)| self.circle_comp[c] == comp).collect();
        loop {
            let mut deg: HashMap<usize, usize> = HashMap::new();
            for (_, a, b) in &edges {
                *deg.entry(*a).or_default() += 1;
                *deg.entry(*b).or_default() += 1;
            }
            let before = edges.len();
            edges.retain(|(_, a, b)| deg[a] > 1 && deg[b] > 1);
            if edges.len() == before {
                break;
            }
        }
        let mut out: Vec<u32> = edges.iter().map(|e| e.0).collect();
        out.sort();
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameSurface {
    pub shape: FrameShape,
    pub inputs: Vec<SlotObject>,
    pub output: SlotObject,
    pub input_circles: Vec<CircleSet>,
    pub output_circles: CircleSet,
    pub cells: CellCounts,
    pub euler_char: i64,
    pub components: Vec<FrameComponent>,
    /// Component of each input circle, per slot.
    pub input_comp: Vec<Vec<usize>>,
    pub output_comp: Vec<usize>,
    pub sweep: SaddleDecomposition,
}

impl FrameSurface {
    pub fn saddle_decompose(&self) -> &SaddleDecomposition {
        &self.sweep
    }

    pub fn input_chain(&self, slot: usize, idx: usize) -> &Chain {
        &self.sweep.circle_chain[&self.sweep.inputs[slot][idx]]
    }

    pub fn output_chain(&self, idx: usize) -> &Chain {
        &self.sweep.circle_chain[&self.sweep.outputs[idx]]
    }

    /// Component/genus summary that ignores how the frame was built.
    pub fn report(&self) -> SurfaceReport {
        SurfaceReport::from_components(
            self.input_circles.iter().map(|c| c.len()).collect(),
            self.output_circles.len(),
            self.components.iter().map(|c| (c.euler_char, c.inputs.clone(), c.outputs.clone())).collect(),
        )
    }
}

/// Frame for the arc chain `a_0, ..., a_m` (all on the left side).
pub fn build_arc_frame(seq: &[Matching]) -> Result<FrameSurface, FrameError> {
    let amb = Ambient::arcs(seq.to_vec());
    build_frame(&amb, &FrameShape::Arc { side: Side::L, slots: (0..seq.len()).collect() })
}

/// Frame for `(a_0..a_k), T, (b_0..b_l)` along the cube edge `v -> w`.
pub fn build_tangle_frame(
    v: &[u8],
    w: &[u8],
    a_seq: &[Matching],
    t: &SliceWord,
    b_seq: &[Matching],
) -> Result<FrameSurface, FrameError> {
    let amb = Ambient {
        left: a_seq.to_vec(),
        tangle: Some(AmbientTangle { t: t.clone(), v: v.to_vec(), w: w.to_vec() }),
        right: b_seq.to_vec(),
    };
    build_frame(
        &amb,
        &FrameShape::Tangle {
            left: (0..a_seq.len()).collect(),
            u: v.to_vec(),
            u2: w.to_vec(),
            right: (0..b_seq.len()).collect(),
        },
    )
}

pub fn below(v: &[u8], w: &[u8]) -> bool {
    v.len() == w.len() && v.iter().zip(w).all(|(a, b)| a <= b)
}

fn check(amb: &Ambient, shape: &FrameShape) -> Result<(), FrameError> {
    let same = |ms: &[Matching]| ms.windows(2).all(|w| w[0].points() == w[1].points());
    if !same(&amb.left) || !same(&amb.right) {
        return Err(FrameError::SizeMismatch);
    }
    match shape {
        FrameShape::Arc { side, slots } => {
            let len = if *side == Side::L { amb.left.len() } else { amb.right.len() };
            if slots.is_empty() || slots.iter().any(|&g| g >= len) || slots.windows(2).any(|w| w[0] > w[1]) {
                return Err(FrameError::Bad(format!("slots {slots:?}")));
            }
        }
        FrameShape::Tangle { left, u, u2, right } => {
            let tg = amb.tangle.as_ref().ok_or(FrameError::Bad("no tangle".into()))?;
            tg.t.validate()?;
            let n = tg.t.num_crossings();
            if u.len() != n || u2.len() != n || tg.v.len() != n || tg.w.len() != n {
                return Err(FrameError::Bad("resolution length".into()));
            }
            for (x, y) in [(&tg.v, u), (u, u2), (u2, &tg.w)] {
                if !below(x, y) {
                    return Err(FrameError::NotBelow(x.clone(), y.clone()));
                }
            }
            if left.is_empty() || right.is_empty() {
                return Err(FrameError::Bad("tangle frame needs a_k and b_0".into()));
            }
            if left.iter().any(|&g| g >= amb.left.len()) || right.iter().any(|&g| g >= amb.right.len()) {
                return Err(FrameError::Bad("slot out of range".into()));
            }
            if amb.left[0].points() != tg.t.left || amb.right[0].points() != tg.t.right {
                return Err(FrameError::SizeMismatch);
            }
        }
    }
    Ok(())
}

/// Pieces of `T_u` in canonical orientation (odd positions run rightward),
/// with chains in the ambient spine for the ambient edge `v -> w`.
struct LevelPiece {
    from: (usize, usize),
    to: (usize, usize),
    chain: Chain,
    key: (usize, u8, usize),
}

fn oriented(a: (usize, usize), b: (usize, usize), chain: Chain, forward: bool, key: (usize, u8, usize)) -> LevelPiece {
    if forward {
        LevelPiece { from: a, to: b, chain, key }
    } else {
        LevelPiece { from: b, to: a, chain: neg(&chain), key }
    }
}

fn cap_part_chain(tg: &AmbientTangle, s: usize, i: usize, c: usize) -> Chain {
    if tg.v[c - 1] == 1 {
        return single(EKey::Cap(s), 1);
    }
    let mut ch = single(EKey::HalfL(s, i), 1);
    chain_add(&mut ch, &single(EKey::Band(c), 1), 1);
    chain_add(&mut ch, &single(EKey::HalfL(s, i + 1), 1), -1);
    ch
}

fn cup_part_chain(tg: &AmbientTangle, s: usize, i: usize, c: usize) -> Chain {
    if tg.v[c - 1] == 1 {
        return single(EKey::Cup(s), 1);
    }
    let mut ch = single(EKey::HalfR(s, i), -1);
    chain_add(&mut ch, &single(EKey::Band(c), 1), 1);
    chain_add(&mut ch, &single(EKey::HalfR(s, i + 1), 1), 1);
    ch
}

fn through_chain(tg: &AmbientTangle, s: usize, p: usize, crossing: Option<usize>) -> Chain {
    match crossing {
        Some(c) if tg.w[c - 1] == 1 => {
            let mut ch = single(EKey::HalfL(s, p), 1);
            chain_add(&mut ch, &single(EKey::HalfR(s, p), 1), 1);
            ch
        }
        _ => single(EKey::Seg(s, p), 1),
    }
}

fn cap_piece(s: usize, i: usize, chain: Chain, key: (usize, u8, usize)) -> LevelPiece {
    // odd end to even end
    oriented((s, i), (s, i + 1), chain, i % 2 == 1, key)
}

fn cup_piece(s1: usize, i: usize, chain: Chain, key: (usize, u8, usize)) -> LevelPiece {
    // even end to odd end
    oriented((s1, i), (s1, i + 1), chain, i % 2 == 0, key)
}

fn through_piece(s: usize, p: usize, q: usize, chain: Chain) -> LevelPiece {
    oriented((s, p), (s + 1, q), chain, p % 2 == 1, (s, 0, p))
}

fn level_pieces(tg: &AmbientTangle, u: &[u8]) -> Vec<LevelPiece> {
    let widths = tg.t.widths();
    let mut out = Vec::new();
    for (s, sl) in tg.t.slices.iter().enumerate() {
        let w = widths[s];
        match *sl {
            Slice::Id { .. } => {
                for p in 1..=w {
                    out.push(through_piece(s, p, p, through_chain(tg, s, p, None)));
                }
            }
            Slice::Cup { i } => {
                for p in 1..=w {
                    out.push(through_piece(s, p, if p < i { p } else { p + 2 }, through_chain(tg, s, p, None)));
                }
                out.push(cup_piece(s + 1, i, single(EKey::Cup(s), 1), (s, 0, i)));
            }
            Slice::Cap { i } => {
                for p in (1..=w).filter(|&p| p != i && p != i + 1) {
                    out.push(through_piece(s, p, if p < i { p } else { p - 2 }, through_chain(tg, s, p, None)));
                }
                out.push(cap_piece(s, i, single(EKey::Cap(s), 1), (s, 0, i)));
            }
            Slice::Cross { i, c } => {
                for p in (1..=w).filter(|&p| p != i && p != i + 1) {
                    out.push(through_piece(s, p, p, through_chain(tg, s, p, None)));
                }
                if u[c - 1] == 1 {
                    out.push(cap_piece(s, i, cap_part_chain(tg, s, i, c), (s, 0, i)));
                    out.push(cup_piece(s + 1, i, cup_part_chain(tg, s, i, c), (s, 1, i)));
                } else {
                    for p in [i, i + 1] {
                        out.push(through_piece(s, p, p, through_chain(tg, s, p, Some(c))));
                    }
                }
            }
        }
    }
    out
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Role {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Label {
    Arc { inst: usize, role: Role, p: usize, q: usize },
    Level((usize, u8, usize)),
    Through,
    Loop(usize),
}

#[derive(Clone, Debug)]
struct SPiece {
    from: usize,
    to: usize,
    chain: Chain,
    label: Label,
    alive: bool,
}

/// Mutable sweep state: oriented pieces between abstract endpoints.
struct Sweep<'a> {
    amb: &'a Ambient,
    pieces: Vec<SPiece>,
    out_of: HashMap<usize, usize>,
    into: HashMap<usize, usize>,
    end_vertex: Vec<VKey>,
    circle_of: HashMap<usize, u32>,
    next_id: u32,
    events: Vec<Event>,
    circle_chain: BTreeMap<u32, Chain>,
    circle_vertex: BTreeMap<u32, VKey>,
}

impl<'a> Sweep<'a> {
    fn new(amb: &'a Ambient, first_free_id: u32) -> Self {
        Sweep {
            amb,
            pieces: Vec::new(),
            out_of: HashMap::new(),
            into: HashMap::new(),
            end_vertex: Vec::new(),
            circle_of: HashMap::new(),
            next_id: first_free_id,
            events: Vec::new(),
            circle_chain: BTreeMap::new(),
            circle_vertex: BTreeMap::new(),
        }
    }

    fn end(&mut self, v: VKey) -> usize {
        self.end_vertex.push(v);
        self.end_vertex.len() - 1
    }

    fn add_piece(&mut self, from: usize, to: usize, chain: Chain, label: Label) -> usize {
        let k = self.pieces.len();
        assert!(self.out_of.insert(from, k).is_none(), "endpoint has two outgoing pieces");
        assert!(self.into.insert(to, k).is_none(), "endpoint has two incoming pieces");
        self.pieces.push(SPiece { from, to, chain, label, alive: true });
        k
    }

    fn remove_piece(&mut self, k: usize) {
        let p = &mut self.pieces[k];
        p.alive = false;
        self.out_of.remove(&p.from);
        self.into.remove(&p.to);
    }

    fn trace(&self, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut cur = self.out_of[&self.pieces[start].to];
        while cur != start {
            out.push(cur);
            cur = self.out_of[&self.pieces[cur].to];
        }
        out
    }

    fn register(&mut self, id: u32, pieces: &[usize]) {
        let mut ch = Chain::new();
        for &k in pieces {
            chain_add(&mut ch, &self.pieces[k].chain, 1);
            self.circle_of.insert(k, id);
        }
        self.circle_chain.insert(id, ch);
        self.circle_vertex.insert(id, self.end_vertex[self.pieces[pieces[0]].from]);
    }

    fn fresh(&mut self) -> u32 {
        self.next_id += 1;
        self.next_id - 1
    }

    /// Circles through the given pieces, as piece lists, one per circle.
    fn circles_among(&self, pieces: &[usize]) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &k in pieces {
            if seen.contains(&k) {
                continue;
            }
            let c = self.trace(k);
            seen.extend(c.iter().copied());
            out.push(c);
        }
        out
    }

    /// Replaces `a: a1->a2` and `b: b1->b2` by `a1->b2` and `b1->a2`.
    fn surgery(&mut self, a: usize, b: usize, new1: (Chain, Label), new2: (Chain, Label)) {
        let (ca, cb) = (self.circle_of[&a], self.circle_of[&b]);
        let (a1, a2, b1, b2) = (self.pieces[a].from, self.pieces[a].to, self.pieces[b].from, self.pieces[b].to);
        self.remove_piece(a);
        self.remove_piece(b);
        let p1 = self.add_piece(a1, b2, new1.0, new1.1);
        let p2 = self.add_piece(b1, a2, new2.0, new2.1);
        if ca != cb {
            let out = self.fresh();
            let c = self.trace(p1);
            self.register(out, &c);
            self.events.push(Event::Merge { a: ca.min(cb), b: ca.max(cb), out });
        } else {
            let c1 = self.trace(p1);
            assert!(!c1.contains(&p2), "non-orientable saddle");
            let c2 = self.trace(p2);
            let (o1, o2) = (self.fresh(), self.fresh());
            self.register(o1, &c1);
            self.register(o2, &c2);
            self.events.push(Event::Split { input: ca, out: [o1, o2] });
        }
    }

    /// Pieces of one boundary object; returns piece lists for its circles in
    /// canonical order.
    fn add_object(&mut self, obj: &SlotObject, inst: usize, left_inst: usize, right_inst: usize) -> Vec<Vec<usize>> {
        let start = self.pieces.len();
        let amb = self.amb;
        match obj {
            SlotObject::Pair { side, i, j } => {
                let m = amb.matching(*side, *i).points();
                let ends: Vec<usize> = (1..=m).map(|p| self.end(amb.rail(*side, p))).collect();
                self.add_arcs(*side, *i, Role::Left, left_inst, &ends);
                self.add_arcs(*side, *j, Role::Right, right_inst, &ends);
                let _ = inst;
            }
            SlotObject::Triple { i, u, j } => {
                let tg = amb.tangle();
                let widths = tg.t.widths();
                let last = widths.len() - 1;
                let mut grid: HashMap<(usize, usize), usize> = HashMap::new();
                for (s, &w) in widths.iter().enumerate() {
                    for p in 1..=w {
                        let e = self.end(VKey::Mid(s, p));
                        grid.insert((s, p), e);
                    }
                }
                let lends: Vec<usize> = (1..=widths[0]).map(|p| grid[&(0, p)]).collect();
                let rends: Vec<usize> = (1..=widths[last]).map(|p| grid[&(last, p)]).collect();
                self.add_arcs(Side::L, *i, Role::Left, left_inst, &lends);
                self.add_arcs(Side::R, *j, Role::Right, right_inst, &rends);
                for lp in level_pieces(tg, u) {
                    self.add_piece(grid[&lp.from], grid[&lp.to], lp.chain, Label::Level(lp.key));
                }
                for k in 0..tg.t.closed_loops {
                    let e = self.end(VKey::LoopV(k));
                    self.add_piece(e, e, single(EKey::Loop(k), 1), Label::Loop(k));
                }
            }
        }
        let new: Vec<usize> = (start..self.pieces.len()).collect();
        let cs = self.circles_among(&new);
        self.canonical_order(cs, obj, left_inst, right_inst)
    }

    fn add_arcs(&mut self, side: Side, g: usize, role: Role, inst: usize, ends: &[usize]) {
        for (p, q) in self.amb.matching(side, g).arcs() {
            let (odd, even) = if p % 2 == 1 { (p, q) } else { (q, p) };
            let (from, to, sign) = match role {
                Role::Right => (odd, even, 1),
                Role::Left => (even, odd, -1),
            };
            self.add_piece(ends[from - 1], ends[to - 1], single(EKey::Bridge(side, g, p), sign), Label::Arc {
                inst,
                role,
                p,
                q,
            });
        }
    }

    /// Sorts circles the way `planar` does: by smallest boundary point, then
    /// free loops by first piece, then closed loops.
    fn canonical_order(&self, cs: Vec<Vec<usize>>, obj: &SlotObject, left_inst: usize, right_inst: usize) -> Vec<Vec<usize>> {
        let offset = match obj {
            SlotObject::Pair { .. } => 0,
            SlotObject::Triple { i, .. } => self.amb.left[*i].points(),
        };
        let mut keyed: Vec<((u8, usize, (usize, u8, usize)), Vec<usize>)> = cs
            .into_iter()
            .map(|c| {
                let mut pt = usize::MAX;
                let mut lv = (usize::MAX, u8::MAX, usize::MAX);
                let mut lp = usize::MAX;
                for &k in &c {
                    match &self.pieces[k].label {
                        Label::Arc { inst, role, p, .. } => {
                            if *role == Role::Left && *inst == left_inst {
                                pt = pt.min(*p);
                            }
                            if *role == Role::Right && *inst == right_inst {
                                pt = pt.min(offset + *p);
                            }
                        }
                        Label::Level(key) => lv = lv.min(*key),
                        Label::Loop(j) => lp = lp.min(*j),
                        Label::Through => {}
                    }
                }
                let key = if pt != usize::MAX {
                    (0, pt, (0, 0, 0))
                } else if lp != usize::MAX {
                    (2, lp, (0, 0, 0))
                } else {
                    (1, 0, lv)
                };
                (key, c)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.into_iter().map(|x| x.1).collect()
    }

    fn saddle_on_arc(&mut self, side: Side, g: usize, p: usize, old_inst: usize, new_inst: usize) {
        let find = |role: Role, inst: usize| {
            self.pieces
                .iter()
                .position(|x| {
                    x.alive && matches!(x.label, Label::Arc { inst: i, role: r, p: pp, .. } if i == inst && r == role && pp == p)
                })
                .unwrap_or_else(|| panic!("arc {p} of slot {g} ({side:?}) not in sweep"))
        };
        let a = find(Role::Right, old_inst);
        let b = find(Role::Left, new_inst);
        self.surgery(a, b, (Chain::new(), Label::Through), (Chain::new(), Label::Through));
    }

    fn band(&mut self, tg: &AmbientTangle, s: usize, i: usize, c: usize) {
        let find = |key: (usize, u8, usize)| {
            self.pieces.iter().position(|x| x.alive && x.label == Label::Level(key)).expect("band attaches to strands")
        };
        let (a, b) = if i % 2 == 1 { (find((s, 0, i)), find((s, 0, i + 1))) } else { (find((s, 0, i + 1)), find((s, 0, i))) };
        // a runs from the cap side's odd end; new1 = cap part (odd end -> even end)
        let cap = cap_part_chain(tg, s, i, c);
        let cup = cup_part_chain(tg, s, i, c);
        let (cap_o, cup_o) = if i % 2 == 1 { (cap, neg(&cup)) } else { (neg(&cap), cup) };
        self.surgery(a, b, (cap_o, Label::Level((s, 0, i))), (cup_o, Label::Level((s, 1, i))));
    }

    fn alive_circles(&self) -> Vec<Vec<usize>> {
        let alive: Vec<usize> = (0..self.pieces.len()).filter(|&k| self.pieces[k].alive).collect();
        self.circles_among(&alive)
    }
}

/// Builds the frame for `shape` inside `amb`.
pub fn build_frame(amb: &Ambient, shape: &FrameShape) -> Result<FrameSurface, FrameError> {
    check(amb, shape)?;
    let inputs = shape.inputs();
    let output = shape.output();
    let input_circles: Vec<CircleSet> = inputs.iter().map(|o| object_circles(amb, o)).collect();
    let output_circles = object_circles(amb, &output);

    // spine of this frame (local: repeated ambient slots give separate bridges)
    let mut verts: BTreeMap<VKey, usize> = BTreeMap::new();
    let mut edges: Vec<(VKey, VKey)> = Vec::new();
    let mut cells = CellCounts::default();
    let bridge_rows = |side: Side, slots: &[usize], edges: &mut Vec<(VKey, VKey)>, cells: &mut CellCounts| {
        for &g in slots {
            for (p, q) in amb.matching(side, g).arcs() {
                edges.push((amb.rail(side, p), amb.rail(side, q)));
                cells.bridges += 1;
                cells.gluings += 2;
            }
        }
    };
    match shape {
        FrameShape::Arc { side, slots } => {
            let pts = amb.matching(*side, slots[0]).points();
            for p in 1..=pts {
                verts.insert(amb.rail(*side, p), 0);
            }
            cells.rails = pts;
            bridge_rows(*side, slots, &mut edges, &mut cells);
        }
        FrameShape::Tangle { left, u, u2, right } => {
            let tg = amb.tangle();
            bridge_rows(Side::L, left, &mut edges, &mut cells);
            bridge_rows(Side::R, right, &mut edges, &mut cells);
            let widths = tg.t.widths();
            for (s, &w) in widths.iter().enumerate() {
                for p in 1..=w {
                    verts.insert(VKey::Mid(s, p), 0);
                }
            }
            cells.rails = tg.t.left + tg.t.right;
            cells.strips = (tg.t.left + tg.t.right) / 2;
            cells.gluings += tg.t.left + tg.t.right;
            let loops = planar::normalize(&resolve(&tg.t, u)).closed_loops;
            cells.annuli = loops;
            for lp in level_pieces(tg, u) {
                let banded = match tg.t.slices[lp.key.0] {
                    Slice::Cross { i, c } if u[c - 1] == 0 && u2[c - 1] == 1 => Some((i, c)),
                    _ => None,
                };
                match banded {
                    Some((i, c)) if lp.key.2 == i || lp.key.2 == i + 1 => {
                        let side = (lp.key.2 - i) as u8;
                        let s = lp.key.0;
                        let mid = VKey::BandMid(c, side);
                        verts.insert(mid, 0);
                        edges.push((VKey::Mid(s, lp.key.2), mid));
                        edges.push((mid, VKey::Mid(s + 1, lp.key.2)));
                        if side == 0 {
                            edges.push((VKey::BandMid(c, 0), VKey::BandMid(c, 1)));
                            cells.bands += 1;
                            cells.gluings += 2;
                        }
                    }
                    _ => edges.push((VKey::Mid(lp.from.0, lp.from.1), VKey::Mid(lp.to.0, lp.to.1))),
                }
            }
            for k in 0..tg.t.closed_loops {
                verts.insert(VKey::LoopV(k), 0);
                edges.push((VKey::LoopV(k), VKey::LoopV(k)));
            }
        }
    }
    for (k, v) in verts.values_mut().enumerate() {
        *v = k;
    }
    let mut uf = UnionFind::new(verts.len());
    for (a, b) in &edges {
        uf.union(verts[a], verts[b]);
    }

    // sweep
    let total_inputs: usize = input_circles.iter().map(|c| c.len()).sum();
    let mut sw = Sweep::new(amb, total_inputs as u32);
    let mut input_ids: Vec<Vec<u32>> = Vec::new();
    let mut offset = 0u32;
    for cs in &input_circles {
        input_ids.push((offset..offset + cs.len() as u32).collect());
        offset += cs.len() as u32;
    }
    let register_slot = |sw: &mut Sweep, slot: usize, obj: &SlotObject, li: usize, ri: usize, ids: &[u32]| {
        let cs = sw.add_object(obj, slot, li, ri);
        assert_eq!(cs.len(), ids.len(), "slot {slot} circle count");
        for (c, id) in cs.iter().zip(ids) {
            sw.register(*id, c);
        }
    };
    let out_pieces: Vec<Vec<usize>>;
    match shape {
        FrameShape::Arc { side, slots } => {
            if slots.len() == 1 {
                let cs = sw.add_object(&output, 0, 0, 0);
                for c in &cs {
                    let id = sw.fresh();
                    sw.register(id, c);
                    sw.events.push(Event::Birth { out: id });
                }
                out_pieces = cs;
            } else {
                for k in 0..inputs.len() {
                    register_slot(&mut sw, k, &inputs[k], k, k, &input_ids[k]);
                    if k > 0 {
                        for (p, _) in amb.matching(*side, slots[k]).arcs() {
                            sw.saddle_on_arc(*side, slots[k], p, k - 1, k);
                        }
                    }
                }
                let cs = sw.alive_circles();
                out_pieces = sw.canonical_order(cs, &output, 0, inputs.len() - 1);
            }
        }
        FrameShape::Tangle { left, u, u2, right } => {
            let tg = amb.tangle();
            let kl = left.len() - 1;
            for k in 0..inputs.len() {
                register_slot(&mut sw, k, &inputs[k], k, k, &input_ids[k]);
                if k == 0 {
                    continue;
                }
                if k <= kl {
                    for (p, _) in amb.left[left[k]].arcs() {
                        sw.saddle_on_arc(Side::L, left[k], p, k - 1, k);
                    }
                } else {
                    let g = right[k - kl - 1];
                    for (p, _) in amb.right[g].arcs() {
                        sw.saddle_on_arc(Side::R, g, p, k - 1, k);
                    }
                }
            }
            for (s, c) in tg.t.crossing_slices_by_index() {
                if u[c - 1] == 0 && u2[c - 1] == 1 {
                    let Slice::Cross { i, .. } = tg.t.slices[s] else { unreachable!() };
                    sw.band(tg, s, i, c);
                }
            }
            let cs = sw.alive_circles();
            out_pieces = sw.canonical_order(cs, &output, 0, inputs.len() - 1);
        }
    }
    let outputs: Vec<u32> = out_pieces.iter().map(|c| sw.circle_of[&c[0]]).collect();
    if outputs.len() != output_circles.len() {
        return Err(FrameError::Bad("output circle count".into()));
    }

    // components, ordered by smallest output circle
    let mut root_order: Vec<usize> = Vec::new();
    for id in &outputs {
        let r = uf.find(verts[&sw.circle_vertex[id]]);
        if !root_order.contains(&r) {
            root_order.push(r);
        }
    }
    let comp_of_vertex = |uf: &mut UnionFind, v: &VKey| {
        let r = uf.find(verts[v]);
        root_order.iter().position(|&x| x == r)
    };
    let ncomp = root_order.len();
    let mut all_roots = BTreeSet::new();
    for &v in verts.values() {
        all_roots.insert(uf.find(v));
    }
    if all_roots.len() != ncomp {
        return Err(FrameError::Bad("component without output circle".into()));
    }
    let mut circle_comp = BTreeMap::new();
    for (id, v) in &sw.circle_vertex {
        circle_comp.insert(*id, comp_of_vertex(&mut uf, v).expect("component"));
    }
    let mut comps: Vec<FrameComponent> =
        (0..ncomp).map(|_| FrameComponent { euler_char: 0, genus: 0, inputs: vec![], outputs: vec![] }).collect();
    for v in verts.keys() {
        let c = comp_of_vertex(&mut uf, v).unwrap();
        comps[c].euler_char += 1;
    }
    for (a, _) in &edges {
        let c = comp_of_vertex(&mut uf, a).unwrap();
        comps[c].euler_char -= 1;
    }
    let input_comp: Vec<Vec<usize>> =
        input_ids.iter().map(|ids| ids.iter().map(|id| circle_comp[id]).collect()).collect();
    let output_comp: Vec<usize> = outputs.iter().map(|id| circle_comp[id]).collect();
    for (slot, cs) in input_comp.iter().enumerate() {
        for (idx, &c) in cs.iter().enumerate() {
            comps[c].inputs.push((slot, idx));
        }
    }
    for (idx, &c) in output_comp.iter().enumerate() {
        comps[c].outputs.push(idx);
    }
    for c in comps.iter_mut() {
        let b = (c.inputs.len() + c.outputs.len()) as i64;
        let twice = 2 - c.euler_char - b;
        if twice < 0 || twice % 2 != 0 {
            return Err(FrameError::Bad(format!("component with chi {} and {} boundary circles", c.euler_char, b)));
        }
        c.genus = (twice / 2) as usize;
    }
    let euler_char = comps.iter().map(|c| c.euler_char).sum();
    let sweep = SaddleDecomposition {
        inputs: input_ids,
        outputs,
        events: sw.events,
        circle_chain: sw.circle_chain,
        circle_comp,
    };
    Ok(FrameSurface {
        shape: shape.clone(),
        inputs,
        output,
        input_circles,
        output_circles,
        cells,
        euler_char,
        components: comps,
        input_comp,
        output_comp,
        sweep,
    })
}

/// Shape-independent summary: per component its Euler characteristic,
/// genus and boundary circles; sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub input_sizes: Vec<usize>,
    pub output_size: usize,
    /// `(euler_char, genus, inputs, outputs)`
    pub components: Vec<(i64, usize, Vec<(usize, usize)>, Vec<usize>)>,
}

impl SurfaceReport {
    fn from_components(input_sizes: Vec<usize>, output_size: usize, comps: Vec<(i64, Vec<(usize, usize)>, Vec<usize>)>) -> Self {
        let mut components: Vec<(i64, usize, Vec<(usize, usize)>, Vec<usize>)> = comps
            .into_iter()
            .map(|(chi, mut ins, mut outs)| {
                ins.sort();
                outs.sort();
                let b = (ins.len() + outs.len()) as i64;
                let g = ((2 - chi - b) / 2).max(0) as usize;
                (chi, g, ins, outs)
            })
            .collect();
        components.sort_by(|a, b| (&a.3, &a.2).cmp(&(&b.3, &b.2)));
        SurfaceReport { input_sizes, output_size, components }
    }

    /// Glues `child` into input slot `slot` of `self` along the child's
    /// output circles (same canonical order as the slot's circles).
    pub fn glue(&self, slot: usize, child: &SurfaceReport) -> SurfaceReport {
        assert_eq!(self.input_sizes[slot], child.output_size, "glued object mismatch");
        let np = self.components.len();
        let mut uf = UnionFind::new(np + child.components.len());
        let parent_comp_of = |idx: usize| {
            self.components.iter().position(|c| c.2.contains(&(slot, idx))).expect("slot circle in a component")
        };
        for (k, c) in child.components.iter().enumerate() {
            for &o in &c.3 {
                uf.union(parent_comp_of(o), np + k);
            }
        }
        let shift = child.input_sizes.len();
        let relabel_parent = |(s, i): (usize, usize)| {
            if s < slot {
                Some((s, i))
            } else if s == slot {
                None
            } else {
                Some((s + shift - 1, i))
            }
        };
        let mut acc: BTreeMap<usize, (i64, Vec<(usize, usize)>, Vec<usize>)> = BTreeMap::new();
        for (k, c) in self.components.iter().enumerate() {
            let e = acc.entry(uf.find(k)).or_default();
            e.0 += c.0;
            e.1.extend(c.2.iter().filter_map(|&x| relabel_parent(x)));
            e.2.extend(c.3.iter().copied());
        }
        for (k, c) in child.components.iter().enumerate() {
            let e = acc.entry(uf.find(np + k)).or_default();
            e.0 += c.0;
            e.1.extend(c.2.iter().map(|&(s, i)| (s + slot, i)));
        }
        let mut sizes: Vec<usize> = self.input_sizes[..slot].to_vec();
        sizes.extend(&child.input_sizes);
        sizes.extend(&self.input_sizes[slot + 1..]);
        SurfaceReport::from_components(sizes, self.output_size, acc.into_values().collect())
    }
}
