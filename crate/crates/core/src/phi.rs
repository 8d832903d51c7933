//! The frame multifunctor from shape multicategories to the Burnside
//! multicategory.
//!
//! A basic entry is read off the frame closed up by the column's dotted
//! disks and the row's dot-reversed disks: genus 0 pieces need exactly one
//! dot, genus 1 pieces none, and anything of higher genus kills the entry.
//! Each genus 1 piece contributes a two-element set whose elements are
//! `0` (plus: no dot on the anchor circle of the sweep cycle) and `1`.
//!
//! Change-of-tree maps compare homology classes. A labelled tree element
//! determines, for every genus 1 component, a class in H1 of the capped-off
//! surface: from the local token when the genus sits in one vertex, and
//! from the dot flow across the cycle of glued circles otherwise. All
//! frames of a tree are built in one ambient spine, so these classes are
//! compared with the anchor of the basic frame by exact linear algebra.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::burnside::{
    compose, hcompose_bijections, identity_correspondence, linearize, AtomKind, Atom, BurnsideError, Correspondence,
    EntrywiseBijection, Key, Token,
};
use crate::frames::{
    build_frame, Ambient, AmbientTangle, Chain, EKey, FrameError, FrameShape, FrameSurface, Side, SlotObject,
};
use crate::linalg::{rank_f2, Matrix};
use crate::linking::{GeneratorMap, LinkingForm};
use crate::planar::{circles, circles_with_tangle, enumerate_matchings, resolve, Matching, SliceWord, UnionFind};
use crate::ring::F2;
use crate::shapes::{
    arc_morphism, basic_tree, cube_between, enumerate_trees, flatten, graft, ChangeOfTree, ShapeError,
    ShapeMultimorphism, ShapeObject, Tree,
};
use crate::tqft::index_dots;

#[derive(Debug, Error)]
pub enum PhiError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
    #[error("triple object without a tangle in context")]
    NoTangle,
    #[error("genus one class not proportional to the anchor: {0}")]
    Convention(String),
}

/// The fixed tangle `T` for triple objects, if any.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiContext {
    pub tangle: Option<SliceWord>,
}

impl PhiContext {
    pub fn arcs() -> Self {
        PhiContext { tangle: None }
    }

    pub fn with_tangle(t: SliceWord) -> Self {
        PhiContext { tangle: Some(t) }
    }

    fn tangle(&self) -> Result<&SliceWord, PhiError> {
        self.tangle.as_ref().ok_or(PhiError::NoTangle)
    }
}

pub fn object_circle_count(ctx: &PhiContext, obj: &ShapeObject) -> Result<usize, PhiError> {
    Ok(match obj {
        ShapeObject::PairM { a, b } | ShapeObject::PairN { a, b } => circles(a, b).len(),
        ShapeObject::Triple { v, a, b } => {
            circles_with_tangle(a, &resolve(ctx.tangle()?, v), b).map_err(FrameError::from)?.len()
        }
    })
}

/// The ordered basis `Disks(obj)`: one dot labelling per element.
pub fn phi_object(ctx: &PhiContext, obj: &ShapeObject) -> Result<Vec<Vec<bool>>, PhiError> {
    let k = object_circle_count(ctx, obj)?;
    Ok((0..1usize << k).map(|i| index_dots(i, k)).collect())
}

fn ambient_of(ctx: &PhiContext, mor: &ShapeMultimorphism) -> Result<(Ambient, Option<usize>), PhiError> {
    Ok(match mor.tangle_data() {
        Some((left, v, w, right)) => {
            let k = left.len() - 1;
            let tangle = Some(AmbientTangle { t: ctx.tangle()?.clone(), v, w });
            (Ambient { left, tangle, right }, Some(k))
        }
        None => (Ambient::arcs(mor.arc_chain()), None),
    })
}

/// Ambient slot object of a tree edge covering leaves `l..r`.
fn span_object(obj: &ShapeObject, l: usize, r: usize, k: Option<usize>) -> SlotObject {
    match (obj, k) {
        (ShapeObject::Triple { v, .. }, Some(k)) => SlotObject::Triple { i: l, u: v.clone(), j: r - k - 1 },
        (ShapeObject::PairN { .. }, Some(k)) => SlotObject::Pair { side: Side::R, i: l - k - 1, j: r - k - 1 },
        _ => SlotObject::Pair { side: Side::L, i: l, j: r },
    }
}

/// Frame shape of a vertex with the given output and input slot objects.
fn vertex_shape(out: &SlotObject, ins: &[SlotObject]) -> FrameShape {
    match out {
        SlotObject::Pair { side, i, .. } => {
            let mut slots = vec![*i];
            for s in ins {
                let SlotObject::Pair { j, .. } = s else { unreachable!("pair vertex with triple input") };
                slots.push(*j);
            }
            FrameShape::Arc { side: *side, slots }
        }
        SlotObject::Triple { u: u2, .. } => {
            let (mut left, mut right, mut u) = (Vec::new(), Vec::new(), Vec::new());
            let mut seen = false;
            for s in ins {
                match s {
                    SlotObject::Pair { i, .. } if !seen => left.push(*i),
                    SlotObject::Pair { j, .. } => right.push(*j),
                    SlotObject::Triple { i, u: uu, j } => {
                        left.push(*i);
                        right.push(*j);
                        u = uu.clone();
                        seen = true;
                    }
                }
            }
            FrameShape::Tangle { left, u, u2: u2.clone(), right }
        }
    }
}

/// The frame of a single multimorphism, in its own ambient.
pub fn frame_of(ctx: &PhiContext, mor: &ShapeMultimorphism) -> Result<FrameSurface, PhiError> {
    let (amb, k) = ambient_of(ctx, mor)?;
    let mut pos = 0;
    let ins: Vec<SlotObject> = mor
        .sources
        .iter()
        .map(|s| {
            pos += 1;
            span_object(s, pos - 1, pos, k)
        })
        .collect();
    let out = span_object(&mor.target, 0, mor.sources.len(), k);
    Ok(build_frame(&amb, &vertex_shape(&out, &ins))?)
}

/// Number of genus 1 components if the entry is nonempty.
fn entry_rule(f: &FrameSurface, cols: &[Vec<bool>], row: &[bool]) -> Option<usize> {
    let mut g1 = 0;
    for c in &f.components {
        let dots = c.inputs.iter().filter(|(s, i)| cols[*s][*i]).count() + c.outputs.iter().filter(|&&o| !row[o]).count();
        match (c.genus, dots) {
            (0, 1) => {}
            (1, 0) => g1 += 1,
            _ => return None,
        }
    }
    Some(g1)
}

/// All nonempty entries of a frame: `(row, cols) -> #genus-1 components`.
fn frame_table(f: &FrameSurface) -> BTreeMap<Key, usize> {
    let sizes: Vec<usize> = f.input_circles.iter().map(|c| c.len()).collect();
    let k_out = f.output_circles.len();
    let ncols: usize = sizes.iter().map(|&k| 1usize << k).product();
    let col_sizes: Vec<usize> = sizes.iter().map(|&k| 1usize << k).collect();
    let mut out = BTreeMap::new();
    for c in 0..ncols {
        let xs = crate::burnside::column_tuple(&col_sizes, c);
        let labels: Vec<Vec<bool>> = xs.iter().zip(&sizes).map(|(&x, &k)| index_dots(x, k)).collect();
        for z in 0..1usize << k_out {
            if let Some(g) = entry_rule(f, &labels, &index_dots(z, k_out)) {
                out.insert((z, xs.clone()), g);
            }
        }
    }
    out
}

fn choice_tokens(g: usize) -> impl Iterator<Item = Vec<u32>> {
    (0..1usize << g).map(move |ch| index_dots(ch, g).into_iter().map(u32::from).collect())
}

/// The basic correspondence of a multimorphism.
pub fn phi_basic(ctx: &PhiContext, mor: &ShapeMultimorphism) -> Result<Correspondence, PhiError> {
    let size = |o: &ShapeObject| object_circle_count(ctx, o).map(|k| 1usize << k);
    if mor.sources.len() == 1 && mor.sources[0] == mor.target {
        return Ok(identity_correspondence(size(&mor.target)?));
    }
    let f = frame_of(ctx, mor)?;
    let sources = mor.sources.iter().map(size).collect::<Result<Vec<_>, _>>()?;
    let entries = frame_table(&f)
        .into_iter()
        .map(|(k, g)| (k, choice_tokens(g).map(Token::vertex).collect::<BTreeSet<_>>()))
        .collect();
    Ok(Correspondence::basic(sources, size(&mor.target)?, entries))
}

/// Composite correspondence of a tree by repeated multicomposition.
pub fn phi_tree(ctx: &PhiContext, t: &Tree) -> Result<Correspondence, PhiError> {
    match t {
        Tree::Leaf(o) => Ok(identity_correspondence(1 << object_circle_count(ctx, o)?)),
        Tree::Node { mor, children } => {
            let inner = children.iter().map(|c| phi_tree(ctx, c)).collect::<Result<Vec<_>, _>>()?;
            Ok(compose(&phi_basic(ctx, mor)?, &inner)?)
        }
    }
}

/// Drops identity vertices.
fn contract(t: &Tree) -> Tree {
    match t {
        Tree::Leaf(_) => t.clone(),
        Tree::Node { mor, children } if mor.sources.len() == 1 && mor.sources[0] == mor.target => contract(&children[0]),
        Tree::Node { mor, children } => Tree::Node { mor: mor.clone(), children: children.iter().map(contract).collect() },
    }
}

#[derive(Clone, Debug)]
enum Child {
    Leaf(usize),
    Vertex(usize),
}

#[derive(Clone, Debug)]
struct GVertex {
    addr: Vec<u32>,
    frame: FrameSurface,
    children: Vec<Child>,
    table: BTreeMap<usize, Vec<(Vec<usize>, usize)>>,
    /// indices of genus 1 components, in order
    genus1: Vec<usize>,
}

thread_local! {
    static FORMS: RefCell<HashMap<String, Rc<LinkingForm>>> = RefCell::new(HashMap::new());
}

/// The linking form depends only on the ambient; sweeps revisit the same few.
fn linking_form(amb: &Ambient) -> Rc<LinkingForm> {
    let key = serde_json::to_string(amb).expect("ambient serializes");
    FORMS.with(|m| m.borrow_mut().entry(key).or_insert_with(|| Rc::new(LinkingForm::new(amb))).clone())
}

/// A tree laid out in the ambient of its composite.
struct Geometry {
    verts: Vec<GVertex>,
    leaf_paths: Vec<Vec<u32>>,
    sources: Vec<usize>,
    target: usize,
    f0: FrameSurface,
    form: Option<Rc<LinkingForm>>,
}

impl Geometry {
    fn new(ctx: &PhiContext, t: &Tree) -> Result<Option<Self>, PhiError> {
        let t = contract(t);
        if let Tree::Leaf(_) = t {
            return Ok(None);
        }
        let mor = flatten(&t);
        let (amb, k) = ambient_of(ctx, &mor)?;
        let f0 = frame_of(ctx, &mor)?;
        let form = f0.components.iter().any(|c| c.genus == 1).then(|| linking_form(&amb));
        let mut g = Geometry {
            verts: Vec::new(),
            leaf_paths: Vec::new(),
            sources: mor.sources.iter().map(|o| object_circle_count(ctx, o).map(|c| 1 << c)).collect::<Result<_, _>>()?,
            target: 1 << object_circle_count(ctx, &mor.target)?,
            f0,
            form,
        };
        let mut pos = 0;
        g.walk(&amb, k, &t, vec![], &mut pos)?;
        Ok(Some(g))
    }

    /// Lays out a vertex; returns its output slot object.
    fn walk(
        &mut self,
        amb: &Ambient,
        k: Option<usize>,
        t: &Tree,
        addr: Vec<u32>,
        pos: &mut usize,
    ) -> Result<SlotObject, PhiError> {
        let Tree::Node { mor, children } = t else { unreachable!("walk on a leaf") };
        let idx = self.verts.len();
        self.verts.push(GVertex {
            addr: addr.clone(),
            frame: self.f0.clone(),
            children: vec![],
            table: BTreeMap::new(),
            genus1: vec![],
        });
        let start = *pos;
        let mut ins = Vec::new();
        let mut kids = Vec::new();
        for (i, c) in children.iter().enumerate() {
            let a = [addr.clone(), vec![i as u32]].concat();
            match c {
                Tree::Leaf(o) => {
                    ins.push(span_object(o, *pos, *pos + 1, k));
                    kids.push(Child::Leaf(self.leaf_paths.len()));
                    self.leaf_paths.push(a);
                    *pos += 1;
                }
                Tree::Node { .. } => {
                    kids.push(Child::Vertex(self.verts.len()));
                    ins.push(self.walk(amb, k, c, a, pos)?);
                }
            }
        }
        let out = span_object(&mor.target, start, *pos, k);
        let frame = build_frame(amb, &vertex_shape(&out, &ins))?;
        let mut table: BTreeMap<usize, Vec<(Vec<usize>, usize)>> = BTreeMap::new();
        for ((z, xs), g1) in frame_table(&frame) {
            table.entry(z).or_default().push((xs, g1));
        }
        let genus1 = (0..frame.components.len()).filter(|&c| frame.components[c].genus == 1).collect();
        self.verts[idx] = GVertex { addr, frame, children: kids, table, genus1 };
        Ok(out)
    }
}

/// One element of a composite tree entry.
#[derive(Clone, Debug)]
struct TreeElement {
    key: Key,
    token: Token,
    /// output label of each vertex
    labels: Vec<usize>,
    /// genus-1 choices of each vertex
    choices: Vec<Vec<u32>>,
}

fn tree_elements(g: &Geometry) -> Vec<TreeElement> {
    let nv = g.verts.len();
    let mut out = Vec::new();
    let mut labels = vec![usize::MAX; nv];
    let mut leaves = vec![usize::MAX; g.leaf_paths.len()];
    let mut genus = vec![0usize; nv];
    for z in 0..g.target {
        labels[0] = z;
        dfs(g, 0, &mut labels, &mut leaves, &mut genus, &mut out);
    }
    out
}

fn dfs(
    g: &Geometry,
    v: usize,
    labels: &mut Vec<usize>,
    leaves: &mut Vec<usize>,
    genus: &mut Vec<usize>,
    out: &mut Vec<TreeElement>,
) {
    if v == g.verts.len() {
        emit(g, labels, leaves, genus, out);
        return;
    }
    let vx = &g.verts[v];
    let Some(opts) = vx.table.get(&labels[v]) else { return };
    for (xs, g1) in opts {
        for (c, &x) in vx.children.iter().zip(xs) {
            match c {
                Child::Leaf(l) => leaves[*l] = x,
                Child::Vertex(w) => labels[*w] = x,
            }
        }
        genus[v] = *g1;
        dfs(g, v + 1, labels, leaves, genus, out);
    }
}

fn emit(g: &Geometry, labels: &[usize], leaves: &[usize], genus: &[usize], out: &mut Vec<TreeElement>) {
    let key: Key = (labels[0], leaves.to_vec());
    let mut combos: Vec<Vec<Vec<u32>>> = vec![vec![]];
    for &gv in genus {
        combos = combos.into_iter().flat_map(|c| choice_tokens(gv).map(move |t| [c.clone(), vec![t]].concat())).collect();
    }
    for choices in combos {
        let mut atoms = Vec::new();
        for (v, vx) in g.verts.iter().enumerate() {
            atoms.push(Atom { path: vx.addr.clone(), kind: AtomKind::Vertex, vals: choices[v].clone() });
            if v > 0 {
                atoms.push(Atom { path: vx.addr.clone(), kind: AtomKind::Edge, vals: vec![labels[v] as u32] });
            }
        }
        atoms.sort();
        out.push(TreeElement { key: key.clone(), token: Token(atoms), labels: labels.to_vec(), choices });
    }
}

/// Composite correspondence of a tree read off directly from labellings of
/// all internal circles and local genus-1 choices.
pub fn phi_tree_direct(ctx: &PhiContext, t: &Tree) -> Result<Correspondence, PhiError> {
    let Some(g) = Geometry::new(ctx, t)? else {
        return Ok(identity_correspondence(1 << object_circle_count(ctx, t.output())?));
    };
    let mut entries: BTreeMap<Key, BTreeSet<Token>> = BTreeMap::new();
    for e in tree_elements(&g) {
        entries.entry(e.key).or_default().insert(e.token);
    }
    Ok(Correspondence { sources: g.sources, target: g.target, entries, identity: false, leaf_paths: g.leaf_paths })
}

/// Image of a tree element in the basic entry: one choice per genus-1
/// component of the composite frame.
fn transport(g: &Geometry, e: &TreeElement) -> Result<Vec<u32>, PhiError> {
    // nodes: (vertex, local component)
    let mut node_id: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (v, vx) in g.verts.iter().enumerate() {
        for c in 0..vx.frame.components.len() {
            let n = node_id.len();
            node_id.insert((v, c), n);
        }
    }
    let mut uf = UnionFind::new(node_id.len());
    // glue edges: (node a, node b, child vertex, circle index)
    let mut glue: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (v, vx) in g.verts.iter().enumerate() {
        for (slot, ch) in vx.children.iter().enumerate() {
            let Child::Vertex(w) = ch else { continue };
            let child = &g.verts[*w].frame;
            for (k, &cc) in child.output_comp.iter().enumerate() {
                let (a, b) = (node_id[&(*w, cc)], node_id[&(v, vx.frame.input_comp[slot][k])]);
                debug_assert_eq!(child.output_chain(k), vx.frame.input_chain(slot, k), "glued circle chains");
                uf.union(a, b);
                glue.push((a, b, *w, k));
            }
        }
    }
    let root = &g.verts[0].frame;
    let mut out = Vec::new();
    for (gc, comp) in g.f0.components.iter().enumerate() {
        if comp.genus != 1 {
            continue;
        }
        let o = comp.outputs[0];
        let r = uf.find(node_id[&(0, root.output_comp[o])]);
        let members: Vec<(usize, usize)> = node_id.iter().filter(|(_, &n)| uf.find(n) == r).map(|(k, _)| *k).collect();
        let local: Vec<(usize, usize)> =
            members.iter().copied().filter(|(v, c)| g.verts[*v].frame.components[*c].genus > 0).collect();
        let (class, sign): (&Chain, i64) = if let Some(&(v, c)) = local.first() {
            if local.len() > 1 || g.verts[v].frame.components[c].genus != 1 {
                return Err(PhiError::Convention("genus spread over several pieces".into()));
            }
            let vx = &g.verts[v];
            let pos = vx.genus1.iter().position(|&x| x == c).unwrap();
            let cyc = vx.frame.sweep.cycle(c);
            (&vx.frame.sweep.circle_chain[&cyc[0]], if e.choices[v][pos] == 0 { 1 } else { -1 })
        } else {
            let mut edges: Vec<(usize, usize, usize, usize)> =
                glue.iter().copied().filter(|(a, _, _, _)| uf.find(*a) == r).collect();
            loop {
                let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
                for (a, b, _, _) in &edges {
                    *deg.entry(*a).or_default() += 1;
                    *deg.entry(*b).or_default() += 1;
                }
                let before = edges.len();
                edges.retain(|(a, b, _, _)| deg[a] > 1 && deg[b] > 1);
                if edges.len() == before {
                    break;
                }
            }
            let Some(&(_, _, w, k)) = edges.first() else {
                return Err(PhiError::Convention("genus one component without a glued cycle".into()));
            };
            let child = &g.verts[w].frame;
            let dotted = index_dots(e.labels[w], child.output_circles.len())[k];
            (child.output_chain(k), if dotted { -1 } else { 1 })
        };
        let keys: BTreeSet<EKey> = g
            .f0
            .sweep
            .circle_chain
            .iter()
            .filter(|(id, _)| g.f0.sweep.circle_comp[id] == gc)
            .flat_map(|(_, c)| c.keys().copied())
            .collect();
        let keys: Vec<EKey> = keys.into_iter().collect();
        let form = g.form.as_ref().expect("linking form of a genus one frame");
        let cycles = form.cycle_basis(&form.component_keys(&keys));
        let gens = GeneratorMap::new(form, &cycles).map_err(PhiError::Convention)?;
        let cyc = g.f0.sweep.cycle(gc);
        let anchor = gens.generator(&g.f0.sweep.circle_chain[&cyc[0]]);
        let here = gens.generator(class);
        match (here, anchor) {
            (Some(x), Some(y)) if x.abs() == 1 && y.abs() == 1 => out.push(u32::from(x * sign != y)),
            _ => return Err(PhiError::Convention(format!("component {gc}: no generator"))),
        }
    }
    Ok(out)
}

thread_local! {
    // set while one morphism is being verified; the context is fixed there
    static TO_BASIC: RefCell<Option<HashMap<String, EntrywiseBijection>>> = const { RefCell::new(None) };
}

/// The change-of-tree bijection from `t` to the basic tree of its composite.
pub fn phi_to_basic(ctx: &PhiContext, t: &Tree) -> Result<EntrywiseBijection, PhiError> {
    let key = TO_BASIC.with(|c| c.borrow().as_ref().map(|_| t.canonical()));
    let Some(key) = key else { return phi_to_basic_uncached(ctx, t) };
    if let Some(b) = TO_BASIC.with(|c| c.borrow().as_ref().and_then(|m| m.get(&key).cloned())) {
        return Ok(b);
    }
    let b = phi_to_basic_uncached(ctx, t)?;
    TO_BASIC.with(|c| {
        if let Some(m) = c.borrow_mut().as_mut() {
            m.insert(key, b.clone());
        }
    });
    Ok(b)
}

fn phi_to_basic_uncached(ctx: &PhiContext, t: &Tree) -> Result<EntrywiseBijection, PhiError> {
    let mor = flatten(t);
    let to = phi_basic(ctx, &mor)?;
    let Some(g) = Geometry::new(ctx, t)? else {
        return Ok(EntrywiseBijection::identity(&to));
    };
    let from = phi_tree_direct(ctx, t)?;
    let identity = to.identity;
    let mut map: BTreeMap<Key, BTreeMap<Token, Token>> = BTreeMap::new();
    for e in tree_elements(&g) {
        let img = if identity { Token::default() } else { Token::vertex(transport(&g, &e)?) };
        map.entry(e.key.clone()).or_default().insert(e.token.clone(), img);
    }
    Ok(EntrywiseBijection::new(from, to, map)?)
}

pub fn phi_change_of_tree(ctx: &PhiContext, c: &ChangeOfTree) -> Result<EntrywiseBijection, PhiError> {
    let a = phi_to_basic(ctx, &c.from)?;
    let b = phi_to_basic(ctx, &c.to)?;
    Ok(a.then(&b.inverse())?)
}

/// Ways to write `t` as a top tree grafted with subtrees.
fn cuts(t: &Tree) -> Vec<(Tree, Vec<Tree>)> {
    let mut out = vec![(Tree::Leaf(t.output().clone()), vec![t.clone()])];
    if let Tree::Node { mor, children } = t {
        let mut acc: Vec<(Vec<Tree>, Vec<Tree>)> = vec![(vec![], vec![])];
        for c in children {
            let opts = if let Tree::Leaf(_) = c { vec![(c.clone(), vec![c.clone()])] } else { cuts(c) };
            acc = acc
                .into_iter()
                .flat_map(|(tops, subs)| {
                    opts.iter().map(move |(top, s)| {
                        ([tops.clone(), vec![top.clone()]].concat(), [subs.clone(), s.clone()].concat())
                    })
                })
                .collect();
        }
        out.extend(acc.into_iter().map(|(tops, subs)| (Tree::Node { mor: mor.clone(), children: tops }, subs)));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStat {
    pub instances: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub instance: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultifunctorReport {
    pub checks: BTreeMap<String, CheckStat>,
    pub counterexamples: Vec<Counterexample>,
    pub pass: bool,
}

/// Counterexamples kept for each named check.
const COUNTEREXAMPLES_PER_CHECK: usize = 5;

impl MultifunctorReport {
    fn record(&mut self, check: &str, instance: impl FnOnce() -> String, r: Result<bool, PhiError>) {
        let st = self.checks.entry(check.to_string()).or_default();
        st.instances += 1;
        let detail = match r {
            Ok(true) => return,
            Ok(false) => "mismatch".to_string(),
            Err(e) => e.to_string(),
        };
        st.failures += 1;
        if st.failures <= COUNTEREXAMPLES_PER_CHECK {
            self.counterexamples.push(Counterexample { check: check.into(), instance: instance(), detail });
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.checks.values().all(|s| s.failures == 0);
        self
    }

    /// Records one instance of `check`; an `Err` counts as a failure with
    /// its message as detail.
    pub fn record_str(&mut self, check: &str, instance: impl FnOnce() -> String, r: Result<bool, String>) {
        let st = self.checks.entry(check.to_string()).or_default();
        st.instances += 1;
        let detail = match r {
            Ok(true) => return,
            Ok(false) => "mismatch".to_string(),
            Err(e) => e,
        };
        st.failures += 1;
        if st.failures <= COUNTEREXAMPLES_PER_CHECK {
            self.counterexamples.push(Counterexample { check: check.into(), instance: instance(), detail });
        }
    }

    pub fn finished(self) -> Self {
        self.finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyBounds {
    pub max_inputs: usize,
    pub max_vertices: usize,
    /// include tangle-shaped morphisms for the built-in small tangles
    pub tangles: bool,
}

impl Default for VerifyBounds {
    fn default() -> Self {
        VerifyBounds { max_inputs: 3, max_vertices: 3, tangles: true }
    }
}

/// Small tangles on `2n` strands used by the sweeps.
pub fn builtin_tangles(n: usize) -> Vec<SliceWord> {
    use crate::planar::parse_diagram;
    let src: &[&str] = match n {
        1 => &["left 2\nx 1 1", "left 2\nx 1 1\nx 1 2"],
        2 => &["left 4\nx 2 1"],
        _ => &[],
    };
    src.iter().map(|s| parse_diagram(s).expect("built-in tangle")).collect()
}

/// Tangle-shaped morphisms with at most `max_inputs` sources.
pub fn tangle_morphisms(t: &SliceWord, max_inputs: usize) -> Vec<ShapeMultimorphism> {
    let (bm, bn) = (enumerate_matchings(t.left / 2), enumerate_matchings(t.right / 2));
    let nc = t.num_crossings();
    let chains = |ms: &[Matching], len: usize| {
        let mut seqs: Vec<Vec<Matching>> = ms.iter().map(|a| vec![a.clone()]).collect();
        for _ in 0..len {
            seqs = seqs.into_iter().flat_map(|s| ms.iter().map(move |m| [s.clone(), vec![m.clone()]].concat())).collect();
        }
        seqs
    };
    let cube = cube_between(&vec![0; nc], &vec![1; nc]);
    let mut out = Vec::new();
    for kl in 0..max_inputs {
        for kr in 0..max_inputs - kl {
            for left in chains(&bm, kl) {
                for right in chains(&bn, kr) {
                    for v in &cube {
                        for w in cube.iter().filter(|w| crate::frames::below(v, w)) {
                            let mut sources: Vec<ShapeObject> = left
                                .windows(2)
                                .map(|p| ShapeObject::PairM { a: p[0].clone(), b: p[1].clone() })
                                .collect();
                            sources.push(ShapeObject::Triple {
                                v: v.clone(),
                                a: left.last().unwrap().clone(),
                                b: right[0].clone(),
                            });
                            sources.extend(
                                right.windows(2).map(|p| ShapeObject::PairN { a: p[0].clone(), b: p[1].clone() }),
                            );
                            let target = ShapeObject::Triple { v: w.clone(), a: left[0].clone(), b: right.last().unwrap().clone() };
                            out.push(ShapeMultimorphism::new(sources, target).expect("valid tangle morphism"));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exhaustive coherence sweep for arc algebras on `n` arcs (and the
/// built-in tangles on `2n` strands).
pub fn verify_multifunctor(n: usize, bounds: &VerifyBounds) -> MultifunctorReport {
    let mut rep = MultifunctorReport::default();
    let mut jobs: Vec<(PhiContext, ShapeMultimorphism)> = Vec::new();
    for k in 0..=bounds.max_inputs {
        for mor in crate::shapes::enumerate_arc_morphisms(n, k) {
            jobs.push((PhiContext::arcs(), mor));
        }
    }
    if bounds.tangles {
        for t in builtin_tangles(n) {
            for mor in tangle_morphisms(&t, bounds.max_inputs) {
                jobs.push((PhiContext::with_tangle(t.clone()), mor));
            }
        }
    }
    for (ctx, mor) in &jobs {
        TO_BASIC.with(|c| *c.borrow_mut() = Some(HashMap::new()));
        verify_morphism(ctx, mor, bounds.max_vertices, &mut rep);
        TO_BASIC.with(|c| *c.borrow_mut() = None);
    }
    rep.finish()
}

fn verify_morphism(ctx: &PhiContext, mor: &ShapeMultimorphism, max_vertices: usize, rep: &mut MultifunctorReport) {
    let name = || serde_json::to_string(mor).unwrap();
    // identities on every source object
    for o in &mor.sources {
        let r = (|| -> Result<bool, PhiError> {
            let id = identity_correspondence(1 << object_circle_count(ctx, o)?);
            let t = basic_tree(&ShapeMultimorphism::identity(o));
            Ok(phi_basic(ctx, &ShapeMultimorphism::identity(o))? == id
                && phi_tree(ctx, &Tree::Leaf(o.clone()))? == id
                && phi_tree(ctx, &t)? == id
                && phi_to_basic(ctx, &t)? == EntrywiseBijection::identity(&id))
        })();
        rep.record("identity", || serde_json::to_string(o).unwrap(), r);
    }
    // an identity vertex on the frame itself must not change the bijection
    let trees = enumerate_trees(mor, max_vertices);
    let basic = match phi_basic(ctx, mor) {
        Ok(b) => b,
        Err(e) => {
            rep.record("flatten", name, Err(e));
            return;
        }
    };
    let mut to_basic: Vec<Option<EntrywiseBijection>> = Vec::new();
    for t in &trees {
        let r = (|| -> Result<(bool, EntrywiseBijection), PhiError> {
            let c = phi_tree(ctx, t)?;
            let d = phi_tree_direct(ctx, t)?;
            let b = phi_to_basic(ctx, t)?;
            let ok = c == d && linearize::<i64>(&c) == linearize::<i64>(&basic) && b.from == c && b.to == basic;
            Ok((ok, b))
        })();
        let tn = || t.canonical();
        match r {
            Ok((ok, b)) => {
                rep.record("flatten", tn, Ok(ok));
                to_basic.push(Some(b));
            }
            Err(e) => {
                rep.record("flatten", tn, Err(e));
                to_basic.push(None);
            }
        }
    }
    // vertical composition along consecutive trees
    for i in 0..trees.len() {
        let idx = [i, (i + 1) % trees.len(), (i + 2) % trees.len()];
        let r = (|| -> Result<bool, PhiError> {
            let c = |a: usize, b: usize| {
                phi_change_of_tree(ctx, &ChangeOfTree::new(trees[a].clone(), trees[b].clone()).expect("same composite"))
            };
            let (ab, bc, ac) = (c(idx[0], idx[1])?, c(idx[1], idx[2])?, c(idx[0], idx[2])?);
            let refl = c(idx[0], idx[0])?;
            Ok(ab.then(&bc)? == ac && refl == EntrywiseBijection::identity(&ab.from))
        })();
        rep.record("vertical", || trees[i].canonical(), r);
    }
    // horizontal composition: factorization through basic pieces, and the
    // two one-sided interchange instances
    for (ti, t) in trees.iter().enumerate() {
        let Some(direct) = &to_basic[ti] else { continue };
        for (top, subs) in cuts(t) {
            let inst = || format!("{} = {} * {:?}", t.canonical(), top.canonical(), subs.iter().map(Tree::canonical).collect::<Vec<_>>());
            let r = (|| -> Result<bool, PhiError> {
                let top0 = basic_or_leaf(&top);
                let subs0: Vec<Tree> = subs.iter().map(basic_or_leaf).collect();
                let g_top = phi_to_basic(ctx, &top)?;
                let g_subs = subs.iter().map(|s| phi_to_basic(ctx, s)).collect::<Result<Vec<_>, _>>()?;
                let h = hcompose_bijections(&g_top, &g_subs)?;
                let glued = graft(&subs0, &top0)?;
                let fact = h.then(&phi_to_basic(ctx, &glued)?)?;
                Ok(&fact == direct)
            })();
            rep.record("factorization", inst, r);
            let r = (|| -> Result<bool, PhiError> {
                let top0 = basic_or_leaf(&top);
                let subs0: Vec<Tree> = subs.iter().map(basic_or_leaf).collect();
                let ids: Vec<EntrywiseBijection> =
                    subs.iter().map(|s| phi_tree(ctx, s).map(|c| EntrywiseBijection::identity(&c))).collect::<Result<_, _>>()?;
                let top_only = hcompose_bijections(&phi_to_basic(ctx, &top)?, &ids)?;
                let want = phi_change_of_tree(ctx, &ChangeOfTree::new(t.clone(), graft(&subs, &top0)?)?)?;
                let id_top = EntrywiseBijection::identity(&phi_tree(ctx, &top)?);
                let g_subs = subs.iter().map(|s| phi_to_basic(ctx, s)).collect::<Result<Vec<_>, _>>()?;
                let subs_only = hcompose_bijections(&id_top, &g_subs)?;
                let want2 = phi_change_of_tree(ctx, &ChangeOfTree::new(t.clone(), graft(&subs0, &top)?)?)?;
                Ok(top_only == want && subs_only == want2)
            })();
            rep.record("interchange", inst, r);
        }
    }
}

fn basic_or_leaf(t: &Tree) -> Tree {
    match t {
        Tree::Leaf(_) => t.clone(),
        _ => basic_tree(&flatten(t)),
    }
}

/// Cube of resolutions of `(a, T, b)` linearized over F2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeComplex {
    pub crossings: usize,
    /// `(vertex bits, dimension)` in lexicographic order
    pub vertices: Vec<(Vec<u8>, usize)>,
    pub total_dim: usize,
    pub rank_d: usize,
    pub d_squared_zero: bool,
    pub homology_dim: usize,
    /// homology dimension per homological degree (number of ones)
    pub by_degree: Vec<usize>,
}

pub fn phi_cube_linearize(t: &SliceWord, a: &Matching, b: &Matching) -> Result<CubeComplex, PhiError> {
    let ctx = PhiContext::with_tangle(t.clone());
    let nc = t.num_crossings();
    let cube = cube_between(&vec![0; nc], &vec![1; nc]);
    let obj = |v: &Vec<u8>| ShapeObject::Triple { v: v.clone(), a: a.clone(), b: b.clone() };
    let dims: Vec<usize> =
        cube.iter().map(|v| object_circle_count(&ctx, &obj(v)).map(|k| 1usize << k)).collect::<Result<_, _>>()?;
    let offs: Vec<usize> = dims.iter().scan(0, |acc, d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let total: usize = dims.iter().sum();
    let mut d = Matrix::<F2>::zeros(total, total);
    for (i, v) in cube.iter().enumerate() {
        for c in 0..nc {
            if v[c] == 1 {
                continue;
            }
            let mut w = v.clone();
            w[c] = 1;
            let j = cube.iter().position(|x| *x == w).unwrap();
            let m = linearize::<F2>(&phi_basic(&ctx, &ShapeMultimorphism::new(vec![obj(v)], obj(&w))?)?);
            for r in 0..m.rows() {
                for s in 0..m.cols() {
                    d.add_at(offs[j] + r, offs[i] + s, m.get(r, s));
                }
            }
        }
    }
    let rank_d = rank_f2(&d);
    // per-degree ranks: d restricted to degree h -> h+1
    let degree = |v: &Vec<u8>| v.iter().filter(|&&x| x == 1).count();
    let mut by_degree = Vec::new();
    let rank_from = |h: usize| {
        let rows: Vec<usize> = cube.iter().enumerate().filter(|(_, v)| degree(v) == h + 1).flat_map(|(i, _)| offs[i]..offs[i] + dims[i]).collect();
        let cols: Vec<usize> = cube.iter().enumerate().filter(|(_, v)| degree(v) == h).flat_map(|(i, _)| offs[i]..offs[i] + dims[i]).collect();
        let mut m = Matrix::<F2>::zeros(rows.len(), cols.len());
        for (r, &rr) in rows.iter().enumerate() {
            for (c, &cc) in cols.iter().enumerate() {
                m.set(r, c, d.get(rr, cc));
            }
        }
        rank_f2(&m)
    };
    for h in 0..=nc {
        let dim: usize = cube.iter().zip(&dims).filter(|(v, _)| degree(v) == h).map(|(_, d)| d).sum();
        let out_rank = if h < nc { rank_from(h) } else { 0 };
        let in_rank = if h > 0 { rank_from(h - 1) } else { 0 };
        by_degree.push(dim - out_rank - in_rank);
    }
    Ok(CubeComplex {
        crossings: nc,
        vertices: cube.into_iter().zip(dims).collect(),
        total_dim: total,
        rank_d,
        d_squared_zero: d.mul(&d).is_zero(),
        homology_dim: total - 2 * rank_d,
        by_degree,
    })
}

/// Closed-link homology from a diagram.
pub fn khovanov_f2(t: &SliceWord) -> Result<CubeComplex, PhiError> {
    phi_cube_linearize(t, &Matching::empty(), &Matching::empty())
}

/// Structure constants of a pair chain as a matrix, via the Frobenius
/// replay of the frame sweep.
pub fn structure_matrix(seq: &[Matching]) -> Matrix<i64> {
    crate::tqft::multiply_matrix(seq)
}

/// Whether `|phi_basic|` reproduces the structure constants on one chain.
pub fn cardinality_law(seq: &[Matching]) -> Result<bool, PhiError> {
    let c = phi_basic(&PhiContext::arcs(), &arc_morphism(seq))?;
    Ok(linearize::<i64>(&c) == structure_matrix(seq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::parse_diagram;

    fn m(p: &[usize]) -> Matching {
        Matching::new(p.to_vec()).unwrap()
    }

    fn ab() -> (Matching, Matching) {
        (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]))
    }

    #[test]
    fn objects() {
        let ctx = PhiContext::arcs();
        let a1 = m(&[2, 1]);
        assert_eq!(phi_object(&ctx, &ShapeObject::PairM { a: a1.clone(), b: a1 }).unwrap().len(), 2);
        let (a, b) = ab();
        assert_eq!(phi_object(&ctx, &ShapeObject::PairM { a, b }).unwrap().len(), 2);
        // a 1-crossing tangle resolved to two through strands closes into two circles
        let t = parse_diagram("left 2\nx 1 1").unwrap();
        let ctx = PhiContext::with_tangle(t);
        let e = m(&[2, 1]);
        let tr = |v: u8| ShapeObject::Triple { v: vec![v], a: e.clone(), b: e.clone() };
        let sizes: Vec<usize> = [0, 1].iter().map(|&v| phi_object(&ctx, &tr(v)).unwrap().len()).collect();
        assert!(sizes.contains(&4) && sizes.contains(&2), "{sizes:?}");
    }

    #[test]
    fn binary_multiplication() {
        let (a, b) = ab();
        let c = phi_basic(&PhiContext::arcs(), &arc_morphism(&[a.clone(), b.clone(), a.clone()])).unwrap();
        // column (1_ab, 1_ba): rows X⊗1 and 1⊗X, singletons
        let rows: Vec<(usize, usize)> =
            (0..4).filter_map(|z| c.entry(&(z, vec![0, 0])).map(|s| (z, s.len()))).collect();
        let want: Vec<(usize, usize)> =
            [vec![false, true], vec![true, false]].iter().map(|d| (crate::tqft::dots_index(d), 1)).collect();
        let mut want = want;
        want.sort();
        assert_eq!(rows, want);
    }

    #[test]
    fn ternary_genus_one() {
        let (a, b) = ab();
        let seq = [a.clone(), b.clone(), a.clone(), b.clone()];
        let c = phi_basic(&PhiContext::arcs(), &arc_morphism(&seq)).unwrap();
        assert_eq!(c.cardinality(&(1, vec![0, 0, 0])), 2);
        assert!(cardinality_law(&seq).unwrap());
    }

    #[test]
    fn identity_is_identity() {
        let (a, b) = ab();
        let o = ShapeObject::PairM { a, b };
        let c = phi_basic(&PhiContext::arcs(), &ShapeMultimorphism::identity(&o)).unwrap();
        assert_eq!(c, identity_correspondence(2));
        // the unary frame itself (not short-circuited) gives the same matrix
        let f = frame_of(&PhiContext::arcs(), &ShapeMultimorphism::identity(&o)).unwrap();
        let tab = frame_table(&f);
        assert_eq!(tab.keys().cloned().collect::<Vec<_>>(), vec![(0, vec![0]), (1, vec![1])]);
    }

    #[test]
    fn routes_agree_and_transport() {
        let (a, b) = ab();
        let mor = arc_morphism(&[a.clone(), b.clone(), a.clone(), b.clone()]);
        let ctx = PhiContext::arcs();
        let trees = enumerate_trees(&mor, 2);
        for t in &trees {
            assert_eq!(phi_tree(&ctx, t).unwrap(), phi_tree_direct(&ctx, t).unwrap(), "{}", t.canonical());
            let bij = phi_to_basic(&ctx, t).unwrap();
            assert_eq!(linearize::<i64>(&bij.from), linearize::<i64>(&bij.to));
        }
        // ((xy)z) against the basic ternary tree: 2-element entries
        let inner = basic_tree(&arc_morphism(&[a.clone(), b.clone(), a.clone()]));
        let outer = basic_tree(&arc_morphism(&[a.clone(), a.clone(), b.clone()]));
        let t = graft(&[inner, Tree::Leaf(ShapeObject::PairM { a: a.clone(), b: b.clone() })], &outer).unwrap();
        let bij = phi_to_basic(&ctx, &t).unwrap();
        let e = bij.map.get(&(1, vec![0, 0, 0])).unwrap();
        assert_eq!(e.len(), 2);
        let imgs: BTreeSet<&Token> = e.values().collect();
        assert_eq!(imgs.len(), 2);
    }

    #[test]
    fn glued_chains_match() {
        // every sweep event is null-homologous in the spine
        let (a, b) = ab();
        let f = frame_of(&PhiContext::arcs(), &arc_morphism(&[a.clone(), b.clone(), a.clone(), b.clone()])).unwrap();
        for e in &f.sweep.events {
            let mut c = Chain::new();
            for x in e.produced() {
                crate::frames::chain_add(&mut c, &f.sweep.circle_chain[&x], 1);
            }
            for x in e.consumed() {
                crate::frames::chain_add(&mut c, &f.sweep.circle_chain[&x], -1);
            }
            assert!(c.is_empty(), "{e:?}");
        }
    }

    #[test]
    fn verify_n1() {
        let rep = verify_multifunctor(1, &VerifyBounds { max_inputs: 3, max_vertices: 2, tangles: true });
        assert!(rep.pass, "{:#?}", rep);
    }

    #[test]
    fn kh_small() {
        let unknot = parse_diagram("cup 1\ncap 1").unwrap();
        assert_eq!(khovanov_f2(&unknot).unwrap().homology_dim, 2);
        let hopf = parse_diagram("cup 1; cup 3; x 2 1; x 2 2; cap 3; cap 1").unwrap();
        let h = khovanov_f2(&hopf).unwrap();
        assert!(h.d_squared_zero);
        assert_eq!(h.homology_dim, 4);
    }
}
