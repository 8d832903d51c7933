//! A concrete embedding of an ambient frame surface in 3-space, used to
//! read off which side of the surface a genus-one class lives on.
//!
//! Coordinates: `x` runs along the castle (left bricks, tangle slices, right
//! bricks), `y` across the strands (point `p` sits at `y = p`), `z` up.
//! Rails and tangle walls are vertical strips over the planar diagram for
//! `0 <= z <= 2`; bridges are semicircular arches below `z = 0`; a changed
//! crossing carries a horizontal saddle square at `z = 1`. Every spine edge
//! becomes a polyline on the surface together with the unit normal pointing
//! into the black region at each vertex.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::frames::{Ambient, Chain, EKey, Side};
use crate::planar::Slice;

pub type P3 = [f64; 3];

/// Vertices of the spine graph, mirroring the frame builder's.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Mid(usize, usize),
    BandMid(usize, u8),
    Loop(usize),
}

#[derive(Clone, Debug)]
pub struct EdgePath {
    pub from: Node,
    pub to: Node,
    pub pts: Vec<P3>,
    pub normals: Vec<P3>,
}

const PATH_Z: f64 = 0.5;
const SADDLE_Z: f64 = 1.0;
const ARCH_STEPS: usize = 16;
const PUSH: f64 = 0.05;

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(a: P3) -> Option<P3> {
    let n = dot(a, a).sqrt();
    (n > 1e-12).then(|| [a[0] / n, a[1] / n, a[2] / n])
}

type Seg2 = ((f64, f64), (f64, f64));

/// Planar picture at the lower wall level.
struct Diagram {
    segs: Vec<Seg2>,
}

impl Diagram {
    fn add(&mut self, poly: &[(f64, f64)]) {
        for w in poly.windows(2) {
            self.segs.push((w[0], w[1]));
        }
    }

    /// Black iff a ray towards `y = -inf` meets the diagram an odd number
    /// of times; the region next to `y = 0` is white.
    fn black(&self, x: f64, y: f64) -> bool {
        let mut n = 0;
        for &((x1, y1), (x2, y2)) in &self.segs {
            let (lo, hi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
            if x1 == x2 || x < lo || x >= hi {
                continue;
            }
            let yy = y1 + (y2 - y1) * (x - x1) / (x2 - x1);
            if yy < y {
                n += 1;
            }
        }
        n % 2 == 1
    }

    /// Unit normal of a wall over the planar direction `d` at `(x, y)`,
    /// pointing into the black side.
    fn wall_normal(&self, x: f64, y: f64, d: (f64, f64)) -> P3 {
        let len = (d.0 * d.0 + d.1 * d.1).sqrt();
        let perp = (-d.1 / len, d.0 / len);
        let e = 0.1;
        if self.black(x + e * perp.0, y + e * perp.1) {
            [perp.0, perp.1, 0.0]
        } else {
            [-perp.0, -perp.1, 0.0]
        }
    }
}

struct Layout {
    x_t0: f64,
    x_t1: f64,
    slices: Vec<Slice>,
    widths: Vec<usize>,
    v: Vec<u8>,
    w: Vec<u8>,
}

impl Layout {
    fn slice_x(&self, s: usize) -> f64 {
        self.x_t0 + 4.0 * s as f64
    }

    fn brick_x(&self, side: Side, g: usize) -> f64 {
        match side {
            Side::L => 4.0 * g as f64 + 1.0,
            Side::R => self.x_t1 + 4.0 * g as f64 + 3.0,
        }
    }

    fn rail_x(&self, side: Side) -> f64 {
        match side {
            Side::L => self.x_t0,
            Side::R => self.x_t1,
        }
    }

    fn last(&self) -> usize {
        self.slices.len()
    }
}

/// Planar polylines of slice `s` at resolution `u`: `(from point, to point,
/// kind, polyline)` where kind 0 = through strand, 1 = cap, 2 = cup.
fn slice_pieces(lay: &Layout, s: usize, u: &[u8]) -> Vec<((usize, usize), (usize, usize), u8, Vec<(f64, f64)>)> {
    let x0 = lay.slice_x(s);
    let w = lay.widths[s];
    let f = |p: usize| p as f64;
    let straight = |p: usize| ((s, p), (s + 1, p), 0u8, vec![(x0, f(p)), (x0 + 4.0, f(p))]);
    let cap = |i: usize| ((s, i), (s, i + 1), 1u8, vec![(x0, f(i)), (x0 + 1.0, f(i)), (x0 + 1.0, f(i + 1)), (x0, f(i + 1))]);
    let cup = |i: usize| {
        ((s + 1, i), (s + 1, i + 1), 2u8, vec![(x0 + 4.0, f(i)), (x0 + 3.0, f(i)), (x0 + 3.0, f(i + 1)), (x0 + 4.0, f(i + 1))])
    };
    let mut out = Vec::new();
    match lay.slices[s] {
        Slice::Id { .. } => out.extend((1..=w).map(straight)),
        Slice::Cup { i } => {
            for p in 1..=w {
                if p < i {
                    out.push(straight(p));
                } else {
                    out.push(((s, p), (s + 1, p + 2), 0, vec![(x0, f(p)), (x0 + 1.0, f(p)), (x0 + 2.0, f(p + 2)), (x0 + 4.0, f(p + 2))]));
                }
            }
            out.push(cup(i));
        }
        Slice::Cap { i } => {
            out.push(cap(i));
            for p in (1..=w).filter(|&p| p != i && p != i + 1) {
                if p < i {
                    out.push(straight(p));
                } else {
                    out.push(((s, p), (s + 1, p - 2), 0, vec![(x0, f(p)), (x0 + 2.0, f(p)), (x0 + 3.0, f(p - 2)), (x0 + 4.0, f(p - 2))]));
                }
            }
        }
        Slice::Cross { i, c } => {
            for p in (1..=w).filter(|&p| p != i && p != i + 1) {
                out.push(straight(p));
            }
            if u[c - 1] == 1 {
                out.push(cap(i));
                out.push(cup(i));
            } else {
                out.push(straight(i));
                out.push(straight(i + 1));
            }
        }
    }
    out
}

fn wall_path(diag: &Diagram, from: Node, to: Node, poly: &[(f64, f64)]) -> EdgePath {
    let mut pts = Vec::new();
    let mut normals = Vec::new();
    for (k, &(x, y)) in poly.iter().enumerate() {
        let dir_in = (k > 0).then(|| (x - poly[k - 1].0, y - poly[k - 1].1));
        let dir_out = (k + 1 < poly.len()).then(|| (poly[k + 1].0 - x, poly[k + 1].1 - y));
        let n = match (dir_in, dir_out) {
            (Some(a), Some(b)) => {
                let (na, nb) = (diag.wall_normal(x - a.0 * 0.5, y - a.1 * 0.5, a), diag.wall_normal(x + b.0 * 0.5, y + b.1 * 0.5, b));
                unit([na[0] + nb[0], na[1] + nb[1], 0.0]).expect("wall corner")
            }
            (Some(a), None) => diag.wall_normal(x - a.0 * 0.5, y - a.1 * 0.5, a),
            (None, Some(b)) => diag.wall_normal(x + b.0 * 0.5, y + b.1 * 0.5, b),
            (None, None) => unreachable!(),
        };
        pts.push([x, y, PATH_Z]);
        normals.push(n);
    }
    EdgePath { from, to, pts, normals }
}

/// The embedded spine of the full ambient surface.
pub fn embed(amb: &Ambient) -> BTreeMap<EKey, EdgePath> {
    let (slices, widths, v, w) = match &amb.tangle {
        Some(tg) => (tg.t.slices.clone(), tg.t.widths(), tg.v.clone(), tg.w.clone()),
        None => (vec![], vec![amb.left[0].points()], vec![], vec![]),
    };
    let x_t0 = 4.0 * amb.left.len() as f64;
    let lay = Layout { x_t0, x_t1: x_t0 + 4.0 * slices.len() as f64, slices, widths, v, w };
    let mut diag = Diagram { segs: Vec::new() };
    let n_l = lay.widths[0];
    // with no tangle the left rails run on past their vertices
    let rail_end = if lay.slices.is_empty() && amb.right.is_empty() { lay.x_t0 + 1.0 } else { lay.x_t0 };
    for p in 1..=n_l {
        diag.add(&[(-1.0, p as f64), (rail_end, p as f64)]);
    }
    let mut pieces = Vec::new();
    for s in 0..lay.slices.len() {
        for pc in slice_pieces(&lay, s, &lay.v) {
            diag.add(&pc.3);
            pieces.push((s, pc));
        }
    }
    if !amb.right.is_empty() {
        let n_r = lay.widths[lay.last()];
        for p in 1..=n_r {
            diag.add(&[(lay.x_t1, p as f64), (lay.x_t1 + 4.0 * amb.right.len() as f64 + 1.0, p as f64)]);
        }
    }

    let mut out = BTreeMap::new();
    // bridges
    for (side, seq, node_s) in [(Side::L, &amb.left, 0), (Side::R, &amb.right, lay.last())] {
        for (g, m) in seq.iter().enumerate() {
            let xb = lay.brick_x(side, g);
            let xv = lay.rail_x(side);
            for (p, q) in m.arcs() {
                let (o, e) = if p % 2 == 1 { (p, q) } else { (q, p) };
                let inside_black = p.min(q) % 2 == 1;
                let rail_n = |pt: usize, x: f64| diag.wall_normal(x, pt as f64, (1.0, 0.0));
                let mut pts = Vec::new();
                let mut normals = Vec::new();
                let mut push = |pt: P3, n: P3| {
                    pts.push(pt);
                    normals.push(n);
                };
                let (yo, ye) = (o as f64, e as f64);
                push([xv, yo, PATH_Z], rail_n(o, xv));
                push([xb, yo, PATH_Z], rail_n(o, xb));
                push([xb, yo, 0.0], rail_n(o, xb));
                let (c, r) = ((yo + ye) / 2.0, (ye - yo).abs() / 2.0);
                let dir = if ye > yo { 1.0 } else { -1.0 };
                for k in 1..ARCH_STEPS {
                    let t = PI * k as f64 / ARCH_STEPS as f64;
                    let y = c - dir * r * t.cos();
                    let z = -r * t.sin();
                    let inward = unit([0.0, c - y, -z]).unwrap();
                    let n = if inside_black { inward } else { [0.0, -inward[1], -inward[2]] };
                    push([xb, y, z], n);
                }
                push([xb, ye, 0.0], rail_n(e, xb));
                push([xb, ye, PATH_Z], rail_n(e, xb));
                push([xv, ye, PATH_Z], rail_n(e, xv));
                // the rail normal at the foot of the arch must agree with the arch
                debug_assert!({
                    let foot = rail_n(o, xb);
                    let first = normals[3];
                    dot(foot, first) > 0.5
                });
                out.insert(
                    EKey::Bridge(side, g, p.min(q)),
                    EdgePath { from: Node::Mid(node_s, o), to: Node::Mid(node_s, e), pts, normals },
                );
            }
        }
    }
    // tangle walls
    for (s, (from, to, kind, poly)) in pieces {
        let x0 = lay.slice_x(s);
        let (fnode, tnode) = (Node::Mid(from.0, from.1), Node::Mid(to.0, to.1));
        match (kind, lay.slices[s]) {
            (1, _) => {
                out.insert(EKey::Cap(s), wall_path(&diag, fnode, tnode, &poly));
            }
            (2, _) => {
                out.insert(EKey::Cup(s), wall_path(&diag, fnode, tnode, &poly));
            }
            (_, Slice::Cross { i, c }) if (from.1 == i || from.1 == i + 1) && lay.w[c - 1] == 1 => {
                let side = (from.1 - i) as u8;
                let mid = Node::BandMid(c, side);
                let y = from.1 as f64;
                out.insert(EKey::HalfL(s, from.1), wall_path(&diag, fnode, mid, &[(x0, y), (x0 + 2.0, y)]));
                out.insert(EKey::HalfR(s, from.1), wall_path(&diag, mid, tnode, &[(x0 + 2.0, y), (x0 + 4.0, y)]));
                if side == 0 {
                    let xm = x0 + 2.0;
                    let (y0, y1) = (i as f64, (i + 1) as f64);
                    let n0 = diag.wall_normal(xm, y0, (1.0, 0.0));
                    let n1 = diag.wall_normal(xm, y1, (1.0, 0.0));
                    // the square's black side faces the region between the strands
                    let inner = n0[1] > 0.0;
                    let nr = if inner { [0.0, 0.0, -1.0] } else { [0.0, 0.0, 1.0] };
                    let c0 = unit([n0[0] + nr[0], n0[1] + nr[1], n0[2] + nr[2]]).unwrap();
                    let c1 = unit([n1[0] + nr[0], n1[1] + nr[1], n1[2] + nr[2]]).unwrap();
                    out.insert(
                        EKey::Band(c),
                        EdgePath {
                            from: Node::BandMid(c, 0),
                            to: Node::BandMid(c, 1),
                            pts: vec![[xm, y0, PATH_Z], [xm, y0, SADDLE_Z], [xm, y1, SADDLE_Z], [xm, y1, PATH_Z]],
                            normals: vec![n0, c0, c1, n1],
                        },
                    );
                }
            }
            _ => {
                out.insert(EKey::Seg(s, from.1), wall_path(&diag, fnode, tnode, &poly));
            }
        }
    }
    out
}

/// Signed solid-angle contribution of two segments to the Gauss integral,
/// in units of full turns.
pub fn segment_linking(p1: P3, p2: P3, p3: P3, p4: P3) -> f64 {
    let (r13, r14, r23, r24) = (sub(p3, p1), sub(p4, p1), sub(p3, p2), sub(p4, p2));
    let ns = [cross(r13, r14), cross(r14, r24), cross(r24, r23), cross(r23, r13)];
    let mut us = [[0.0; 3]; 4];
    for (k, n) in ns.iter().enumerate() {
        match unit(*n) {
            Some(u) => us[k] = u,
            None => return 0.0,
        }
    }
    let mut omega = 0.0;
    for k in 0..4 {
        omega += dot(us[k], us[(k + 1) % 4]).clamp(-1.0, 1.0).asin();
    }
    let s = dot(cross(sub(p4, p3), sub(p2, p1)), r13);
    if s.abs() < 1e-15 {
        return 0.0;
    }
    omega.copysign(s) / (4.0 * PI)
}

fn pushed(e: &EdgePath) -> Vec<P3> {
    e.pts.iter().zip(&e.normals).map(|(p, n)| [p[0] + PUSH * n[0], p[1] + PUSH * n[1], p[2] + PUSH * n[2]]).collect()
}

fn polyline_linking(a: &[P3], b: &[P3]) -> f64 {
    let mut t = 0.0;
    for sa in a.windows(2) {
        for sb in b.windows(2) {
            t += segment_linking(sa[0], sa[1], sb[0], sb[1]);
        }
    }
    t
}

/// `theta[(e, f)] = lk(e⁺, f)` contributions for every pair of spine edges.
pub struct LinkingForm {
    pub paths: BTreeMap<EKey, EdgePath>,
    table: BTreeMap<(EKey, EKey), f64>,
}

impl LinkingForm {
    pub fn new(amb: &Ambient) -> Self {
        let paths = embed(amb);
        let mut table = BTreeMap::new();
        let push: BTreeMap<EKey, Vec<P3>> = paths.iter().map(|(k, e)| (*k, pushed(e))).collect();
        for (ka, pa) in &push {
            for (kb, eb) in &paths {
                table.insert((*ka, *kb), polyline_linking(pa, &eb.pts));
            }
        }
        LinkingForm { paths, table }
    }

    /// `lk(x⁺, y)` for two spine cycles; `None` if not near an integer.
    pub fn theta(&self, x: &Chain, y: &Chain) -> Option<i64> {
        let mut t = 0.0;
        for (ka, ca) in x {
            for (kb, cb) in y {
                t += (*ca * *cb) as f64 * self.table.get(&(*ka, *kb)).copied().unwrap_or(0.0);
            }
        }
        let r = t.round();
        ((t - r).abs() < 1e-6).then_some(r as i64)
    }

    /// Every embedded edge in the connected pieces of the spine touched by `seeds`.
    pub fn component_keys(&self, seeds: &[EKey]) -> Vec<EKey> {
        let mut reached: std::collections::BTreeSet<Node> = std::collections::BTreeSet::new();
        for k in seeds {
            if let Some(e) = self.paths.get(k) {
                reached.insert(e.from);
                reached.insert(e.to);
            }
        }
        loop {
            let before = reached.len();
            for e in self.paths.values() {
                if reached.contains(&e.from) || reached.contains(&e.to) {
                    reached.insert(e.from);
                    reached.insert(e.to);
                }
            }
            if reached.len() == before {
                break;
            }
        }
        self.paths.iter().filter(|(_, e)| reached.contains(&e.from)).map(|(k, _)| *k).collect()
    }

    /// Fundamental cycles of the subgraph spanned by `keys`.
    pub fn cycle_basis(&self, keys: &[EKey]) -> Vec<Chain> {
        let mut nodes: BTreeMap<Node, usize> = BTreeMap::new();
        for k in keys {
            if let Some(e) = self.paths.get(k) {
                for nd in [e.from, e.to] {
                    let l = nodes.len();
                    nodes.entry(nd).or_insert(l);
                }
            }
        }
        // spanning forest by BFS, tree paths as chains to the root
        let mut adj: Vec<Vec<(usize, EKey, i64)>> = vec![vec![]; nodes.len()];
        for k in keys {
            if let Some(e) = self.paths.get(k) {
                let (a, b) = (nodes[&e.from], nodes[&e.to]);
                adj[a].push((b, *k, 1));
                adj[b].push((a, *k, -1));
            }
        }
        let mut to_root: Vec<Option<Chain>> = vec![None; nodes.len()];
        let mut tree = std::collections::BTreeSet::new();
        for r in 0..nodes.len() {
            if to_root[r].is_some() {
                continue;
            }
            to_root[r] = Some(Chain::new());
            let mut queue = std::collections::VecDeque::from([r]);
            while let Some(a) = queue.pop_front() {
                for &(b, k, s) in &adj[a] {
                    if to_root[b].is_none() {
                        // path from b to root: traverse edge b -> a, then a's path
                        let mut c = to_root[a].clone().unwrap();
                        crate::frames::chain_add(&mut c, &Chain::from([(k, -s)]), 1);
                        to_root[b] = Some(c);
                        tree.insert(k);
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for k in keys {
            let Some(e) = self.paths.get(k) else { continue };
            if tree.contains(k) {
                continue;
            }
            // edge from -> to, then to's path to root, minus from's path
            let mut c = Chain::from([(*k, 1)]);
            crate::frames::chain_add(&mut c, to_root[nodes[&e.to]].as_ref().unwrap(), 1);
            crate::frames::chain_add(&mut c, to_root[nodes[&e.from]].as_ref().unwrap(), -1);
            out.push(c);
        }
        out
    }
}

/// The generator map `H1(surface) -> H1(B) = Z` of one genus-one component:
/// `theta = a ⊗ mu` with `a` primitive.
pub struct GeneratorMap<'a> {
    form: &'a LinkingForm,
    x_ref: Chain,
    y_ref: Chain,
    /// theta(x_ref, y_ref) = a(x_ref) * mu(y_ref)
    a_ref: i64,
    mu_ref: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl<'a> GeneratorMap<'a> {
    pub fn new(form: &'a LinkingForm, cycles: &[Chain]) -> Result<Self, String> {
        let k = cycles.len();
        let mut th = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                th[i][j] = form.theta(&cycles[i], &cycles[j]).ok_or("non-integral linking number")?;
            }
        }
        for i in 0..k {
            for j in 0..k {
                for p in 0..k {
                    for q in 0..k {
                        if th[i][j] * th[p][q] != th[i][q] * th[p][j] {
                            return Err("linking form of rank above one".into());
                        }
                    }
                }
            }
        }
        let Some((i0, j0)) = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).find(|&(i, j)| th[i][j] != 0) else {
            return Err("vanishing linking form".into());
        };
        // a over the basis is column j0 divided by its gcd
        let g = (0..k).fold(0, |acc, i| gcd(acc, th[i][j0]));
        let a_ref = th[i0][j0] / g;
        let mu_ref = th[i0][j0] / a_ref;
        Ok(GeneratorMap { form, x_ref: cycles[i0].clone(), y_ref: cycles[j0].clone(), a_ref, mu_ref })
    }

    pub fn a(&self, x: &Chain) -> Option<i64> {
        let t = self.form.theta(x, &self.y_ref)?;
        (t % self.mu_ref == 0).then(|| t / self.mu_ref)
    }

    pub fn mu(&self, y: &Chain) -> Option<i64> {
        let t = self.form.theta(&self.x_ref, y)?;
        (t % self.a_ref == 0).then(|| t / self.a_ref)
    }

    /// Generator picked out by an oriented circle: its black pushoff when
    /// that is nontrivial, otherwise the pushoff of a dual curve `D` with
    /// `D · C = +1`, where `x · y = theta(y, x) - theta(x, y)`.
    pub fn generator(&self, c: &Chain) -> Option<i64> {
        let a = self.a(c)?;
        if a != 0 {
            return Some(a);
        }
        // a(D) * mu(C) = -(D · C) when a(C) = 0
        self.mu(c).map(|m| -m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::build_arc_frame;
    use crate::planar::Matching;

    fn circle(c: P3, r: f64, axis: usize, n: usize) -> Vec<P3> {
        (0..=n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                let (a, b) = (r * t.cos(), r * t.sin());
                match axis {
                    2 => [c[0] + a, c[1] + b, c[2]],
                    1 => [c[0] + a, c[1], c[2] + b],
                    _ => [c[0], c[1] + a, c[2] + b],
                }
            })
            .collect()
    }

    /// Midpoint-rule Gauss integral, as an independent oracle.
    fn gauss(a: &[P3], b: &[P3]) -> f64 {
        let mut t = 0.0;
        for sa in a.windows(2) {
            for sb in b.windows(2) {
                let ma = [(sa[0][0] + sa[1][0]) / 2.0, (sa[0][1] + sa[1][1]) / 2.0, (sa[0][2] + sa[1][2]) / 2.0];
                let mb = [(sb[0][0] + sb[1][0]) / 2.0, (sb[0][1] + sb[1][1]) / 2.0, (sb[0][2] + sb[1][2]) / 2.0];
                let r = sub(ma, mb);
                let d = dot(r, r).sqrt();
                t += dot(r, cross(sub(sa[1], sa[0]), sub(sb[1], sb[0]))) / (d * d * d);
            }
        }
        t / (4.0 * PI)
    }

    #[test]
    fn hopf_linking() {
        let a = circle([0.0, 0.0, 0.0], 1.0, 2, 64);
        let b = circle([1.0, 0.0, 0.0], 1.0, 1, 64);
        let exact = polyline_linking(&a, &b);
        let approx = gauss(&a, &b);
        assert!((exact.abs() - 1.0).abs() < 1e-9, "{exact}");
        assert!((exact - approx).abs() < 0.05, "{exact} vs {approx}");
        let far = circle([5.0, 0.0, 0.0], 1.0, 1, 64);
        assert!(polyline_linking(&a, &far).abs() < 1e-9);
    }

    fn m(p: &[usize]) -> Matching {
        Matching::new(p.to_vec()).unwrap()
    }

    #[test]
    fn slot_circles_do_not_link() {
        let (a, b) = (m(&[2, 1, 4, 3]), m(&[4, 3, 2, 1]));
        let seq = vec![a.clone(), b.clone(), a.clone(), b.clone()];
        let f = build_arc_frame(&seq).unwrap();
        let form = LinkingForm::new(&Ambient::arcs(seq));
        let keys: Vec<EKey> = form.paths.keys().copied().collect();
        let cycles = form.cycle_basis(&keys);
        assert_eq!(cycles.len(), 5);
        for s in 0..3 {
            let c = f.input_chain(s, 0);
            for y in &cycles {
                assert_eq!(form.theta(c, y), Some(0), "slot {s}");
            }
        }
        let g = GeneratorMap::new(&form, &cycles).unwrap();
        let ids = f.sweep.cycle(0);
        for id in ids {
            let v = g.generator(&f.sweep.circle_chain[&id]).unwrap();
            assert_eq!(v.abs(), 1, "circle {id}");
        }
    }
}
