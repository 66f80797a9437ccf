//! The Carter surface of a diagram as an oriented ribbon graph, and the
//! homological intersection pairing of cycles running along it.
//!
//! Passage `k` of a code with `m` tokens owns two half-edges: `2k` (the
//! strand arriving at the crossing) and `2k + 1` (the strand leaving it).
//! Edge `k` runs from half-edge `2k + 1` to half-edge `2((k + 1) % m)`; for
//! a long diagram edge `m - 1` carries the basepoint. Every crossing is a
//! 4-valent vertex whose counterclockwise half-edge order is read off the
//! local picture of the crossing.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::gauss::{Chord, ClosedDiagram, Endpoint, LongDiagram, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("unknown chord {0}")]
    UnknownChord(u32),
    #[error("walks belong to different ribbon graphs")]
    ForeignWalk,
    #[error("smoothing cycles need a long diagram (no basepoint on this surface)")]
    NoBasepoint,
}

/// Orientation of the surface relative to the local crossing pictures.
/// Fixed so that the Γ(n) family reproduces the published intersection
/// table with its printed signs.
const ORIENTATION: i64 = -1;

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

fn in_half(k: usize) -> usize {
    2 * k
}

fn out_half(k: usize) -> usize {
    2 * k + 1
}

#[derive(Debug, Clone)]
pub struct RibbonGraph {
    id: u64,
    endpoints: Vec<Endpoint>,
    chords: Vec<Chord>,
    vertex_of_passage: Vec<usize>,
    rotation: Vec<[usize; 4]>,
    rot_pos: Vec<u8>,
    face_of: Vec<usize>,
    face_count: usize,
    long: bool,
}

/// A vertex passage of a walk: the walk arrives through half-edge `enter`
/// and leaves through half-edge `exit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: usize,
    pub enter: usize,
    pub exit: usize,
}

/// A closed walk on a ribbon graph, stored as its cyclic list of corners.
/// Consecutive corners are joined by the edge leaving through `exit`.
#[derive(Debug, Clone)]
pub struct CycleWalk {
    graph_id: u64,
    corners: Vec<Corner>,
    // corner indices grouped by vertex (CSR layout)
    offsets: Vec<u32>,
    grouped: Vec<u32>,
}

impl CycleWalk {
    fn new(graph: &RibbonGraph, corners: Vec<Corner>) -> Self {
        let v = graph.vertex_count();
        let mut counts = vec![0u32; v + 1];
        for c in &corners {
            counts[c.vertex + 1] += 1;
        }
        for i in 0..v {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut grouped = vec![0u32; corners.len()];
        for (i, c) in corners.iter().enumerate() {
            grouped[fill[c.vertex] as usize] = i as u32;
            fill[c.vertex] += 1;
        }
        Self { graph_id: graph.id, corners, offsets: counts, grouped }
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }

    fn corners_at(&self, vertex: usize) -> impl Iterator<Item = &Corner> + '_ {
        let (a, b) = (self.offsets[vertex] as usize, self.offsets[vertex + 1] as usize);
        self.grouped[a..b].iter().map(move |&i| &self.corners[i as usize])
    }

    /// The walk as a 1-chain: signed traversal count per edge.
    pub fn chain(&self, graph: &RibbonGraph) -> Vec<i64> {
        let mut chain = vec![0i64; graph.edge_count()];
        for c in &self.corners {
            let (edge, forward) = graph.edge_of_half(c.exit);
            chain[edge] += if forward { 1 } else { -1 };
        }
        chain
    }
}

impl RibbonGraph {
    fn build(endpoints: &[Endpoint], chords: Vec<Chord>, long: bool) -> Self {
        let m = endpoints.len();
        let mut vertex_of_passage = vec![0usize; m];
        let mut rotation = Vec::with_capacity(chords.len());
        let mut rot_pos = vec![0u8; 2 * m];
        for (v, c) in chords.iter().enumerate() {
            vertex_of_passage[c.over_pos] = v;
            vertex_of_passage[c.under_pos] = v;
            let (o, u) = (c.over_pos, c.under_pos);
            let rot = match c.sign {
                Sign::Pos => [out_half(o), out_half(u), in_half(o), in_half(u)],
                Sign::Neg => [out_half(o), in_half(u), in_half(o), out_half(u)],
            };
            for (i, h) in rot.iter().enumerate() {
                rot_pos[*h] = i as u8;
            }
            rotation.push(rot);
        }
        let mut g = Self {
            id: NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed),
            endpoints: endpoints.to_vec(),
            chords,
            vertex_of_passage,
            rotation,
            rot_pos,
            face_of: vec![usize::MAX; 2 * m],
            face_count: 0,
            long,
        };
        g.trace_faces();
        g
    }

    /// Carter surface of a long diagram; the basepoint sits on the edge
    /// joining the last passage back to the first.
    pub fn from_long(d: &LongDiagram) -> Self {
        Self::build(d.endpoints(), d.chords().copied().collect(), true)
    }

    pub fn from_closed(d: &ClosedDiagram) -> Self {
        Self::build(d.endpoints(), d.chords().copied().collect(), false)
    }

    pub fn is_long(&self) -> bool {
        self.long
    }

    pub fn vertex_count(&self) -> usize {
        self.chords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn half_edge_count(&self) -> usize {
        2 * self.endpoints.len()
    }

    /// Chord label of each vertex.
    pub fn labels(&self) -> Vec<u32> {
        self.chords.iter().map(|c| c.label).collect()
    }

    pub fn rotation(&self, vertex: usize) -> [usize; 4] {
        self.rotation[vertex]
    }

    pub fn vertex_of_half(&self, h: usize) -> usize {
        self.vertex_of_passage[h / 2]
    }

    /// The other end of the edge containing `h`.
    pub fn twin(&self, h: usize) -> usize {
        let m = self.endpoints.len();
        if h % 2 == 1 {
            in_half((h / 2 + 1) % m)
        } else {
            out_half((h / 2 + m - 1) % m)
        }
    }

    /// Edge containing `h`, and whether `h` is its tail.
    pub fn edge_of_half(&self, h: usize) -> (usize, bool) {
        let m = self.endpoints.len();
        if h % 2 == 1 {
            (h / 2, true)
        } else {
            ((h / 2 + m - 1) % m, false)
        }
    }

    pub fn edge_ends(&self, e: usize) -> (usize, usize) {
        let m = self.endpoints.len();
        (self.vertex_of_passage[e], self.vertex_of_passage[(e + 1) % m])
    }

    fn next_ccw(&self, h: usize) -> usize {
        let v = self.vertex_of_half(h);
        self.rotation[v][(self.rot_pos[h] as usize + 1) % 4]
    }

    fn trace_faces(&mut self) {
        let mut count = 0;
        for start in 0..self.half_edge_count() {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let mut h = start;
            while self.face_of[h] == usize::MAX {
                self.face_of[h] = count;
                h = self.next_ccw(self.twin(h));
            }
            count += 1;
        }
        self.face_count = count;
    }

    /// Face on the side of the dart leaving its vertex through `h`.
    pub fn face_of_dart(&self, h: usize) -> usize {
        self.face_of[h]
    }

    pub fn euler_characteristic(&self) -> i64 {
        if self.endpoints.is_empty() {
            return 2;
        }
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count as i64
    }

    pub fn genus(&self) -> usize {
        let g2 = 2 - self.euler_characteristic();
        debug_assert!(g2 >= 0 && g2 % 2 == 0);
        (g2 / 2) as usize
    }

    fn chord_by_label(&self, label: u32) -> Result<&Chord, SurfaceError> {
        self.chords
            .iter()
            .find(|c| c.label == label)
            .ok_or(SurfaceError::UnknownChord(label))
    }

    /// The arc of the knot leaving passage `from` and arriving at passage
    /// `to` (both passages of one crossing), closed up at that crossing.
    fn arc_cycle(&self, from: usize, to: usize) -> CycleWalk {
        let m = self.endpoints.len();
        let mut corners = Vec::new();
        let mut p = (from + 1) % m;
        while p != to {
            corners.push(Corner {
                vertex: self.vertex_of_passage[p],
                enter: in_half(p),
                exit: out_half(p),
            });
            p = (p + 1) % m;
        }
        corners.push(Corner {
            vertex: self.vertex_of_passage[to],
            enter: in_half(to),
            exit: out_half(from),
        });
        CycleWalk::new(self, corners)
    }

    /// The cycle carried by the whole diagram.
    pub fn diagram_cycle(&self) -> CycleWalk {
        let corners = (0..self.endpoints.len())
            .map(|p| Corner { vertex: self.vertex_of_passage[p], enter: in_half(p), exit: out_half(p) })
            .collect();
        CycleWalk::new(self, corners)
    }

    /// The two loops of the oriented smoothing at a crossing of a long
    /// diagram: the one avoiding the basepoint and the one through it.
    pub fn smoothing_cycles(&self, label: u32) -> Result<(CycleWalk, CycleWalk), SurfaceError> {
        if !self.long {
            return Err(SurfaceError::NoBasepoint);
        }
        let c = self.chord_by_label(label)?;
        let (first, second) = (c.first_pos(), c.second_pos());
        Ok((self.arc_cycle(first, second), self.arc_cycle(second, first)))
    }

    /// The loops running from the over-passage to the under-passage of a
    /// crossing and back. Ignores any basepoint.
    pub fn closed_cycles(&self, label: u32) -> Result<(CycleWalk, CycleWalk), SurfaceError> {
        let c = self.chord_by_label(label)?;
        Ok((self.arc_cycle(c.over_pos, c.under_pos), self.arc_cycle(c.under_pos, c.over_pos)))
    }

    /// Builds a walk from consecutive edge traversals `(leave, arrive)`.
    fn walk_from_traversals(&self, steps: &[(usize, usize)]) -> CycleWalk {
        let n = steps.len();
        let corners = (0..n)
            .map(|j| {
                let arrive = steps[j].1;
                let leave = steps[(j + 1) % n].0;
                Corner { vertex: self.vertex_of_half(arrive), enter: arrive, exit: leave }
            })
            .collect();
        CycleWalk::new(self, corners)
    }

    fn local_sign(&self, x: &Corner, y: &Corner) -> i64 {
        let pos = |h: usize| 2 * self.rot_pos[h] as i64;
        let (a, b) = (pos(x.enter), pos(x.exit));
        // y pushed off to its left: just clockwise of where it enters,
        // just counterclockwise of where it leaves
        let p = (pos(y.enter) + 7) % 8;
        let q = (pos(y.exit) + 1) % 8;
        let span = (b - a).rem_euclid(8);
        let inside = |z: i64| (z - a).rem_euclid(8) < span;
        match (inside(p), inside(q)) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }

    /// Intersection number `x · y` on the closed surface.
    ///
    /// `y` is pushed off to its left; the pushed copy meets `x` only inside
    /// vertex disks, where a crossing happens exactly when the push-off
    /// chord separates the ends of the corner of `x`.
    pub fn pair(&self, x: &CycleWalk, y: &CycleWalk) -> Result<i64, SurfaceError> {
        if x.graph_id != self.id || y.graph_id != self.id {
            return Err(SurfaceError::ForeignWalk);
        }
        let mut total = 0;
        for cx in &x.corners {
            for cy in y.corners_at(cx.vertex) {
                total += self.local_sign(cx, cy);
            }
        }
        Ok(ORIENTATION * total)
    }

    pub fn pairing_tables(&self) -> Result<PairingTables, SurfaceError> {
        let labels = self.labels();
        let gamma = self.diagram_cycle();
        let mut alphas = Vec::with_capacity(labels.len());
        let mut betas = Vec::with_capacity(labels.len());
        for &l in &labels {
            let (a, b) = self.smoothing_cycles(l)?;
            alphas.push(a);
            betas.push(b);
        }
        let n = labels.len();
        let matrix = |xs: &[CycleWalk], ys: &[CycleWalk]| -> Result<Vec<Vec<i64>>, SurfaceError> {
            (0..n)
                .map(|i| (0..n).map(|j| self.pair(&xs[i], &ys[j])).collect())
                .collect()
        };
        Ok(PairingTables {
            alpha_alpha: matrix(&alphas, &alphas)?,
            alpha_beta: matrix(&alphas, &betas)?,
            beta_beta: matrix(&betas, &betas)?,
            alpha_diagram: alphas.iter().map(|a| self.pair(a, &gamma)).collect::<Result<_, _>>()?,
            labels,
        })
    }
}

pub fn build_carter(d: &LongDiagram) -> RibbonGraph {
    RibbonGraph::from_long(d)
}

pub fn pairing_tables(d: &LongDiagram) -> PairingTables {
    RibbonGraph::from_long(d)
        .pairing_tables()
        .expect("walks of one graph")
}

/// Intersection numbers among the smoothing cycles of a long diagram,
/// indexed by chords in ascending label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTables {
    pub labels: Vec<u32>,
    /// `alpha_i · alpha_j`
    pub alpha_alpha: Vec<Vec<i64>>,
    /// `alpha_i · beta_j`
    pub alpha_beta: Vec<Vec<i64>>,
    /// `beta_i · beta_j`
    pub beta_beta: Vec<Vec<i64>>,
    /// `alpha_i · gamma_D`
    pub alpha_diagram: Vec<i64>,
}

impl PairingTables {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Entrywise negation (the tables of the mirror image).
    pub fn negated(&self) -> Self {
        let neg = |m: &Vec<Vec<i64>>| m.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        Self {
            labels: self.labels.clone(),
            alpha_alpha: neg(&self.alpha_alpha),
            alpha_beta: neg(&self.alpha_beta),
            beta_beta: neg(&self.beta_beta),
            alpha_diagram: self.alpha_diagram.iter().map(|x| -x).collect(),
        }
    }

    /// Checks antisymmetry and the linear relations forced by
    /// `alpha_i + beta_i = gamma_D`. Returns the first violated relation.
    pub fn check_relations(&self) -> Result<(), String> {
        let n = self.len();
        let (a, b, c, v) = (&self.alpha_alpha, &self.alpha_beta, &self.beta_beta, &self.alpha_diagram);
        for i in 0..n {
            for j in 0..n {
                if a[i][j] != -a[j][i] {
                    return Err(format!("alpha·alpha not antisymmetric at ({i},{j})"));
                }
                if c[i][j] != -c[j][i] {
                    return Err(format!("beta·beta not antisymmetric at ({i},{j})"));
                }
                if b[i][j] != v[i] - a[i][j] {
                    return Err(format!("alpha·beta != v_i - alpha·alpha at ({i},{j})"));
                }
                if c[i][j] != -v[i] + v[j] + a[i][j] {
                    return Err(format!("beta·beta != -v_i + v_j + alpha·alpha at ({i},{j})"));
                }
            }
        }
        Ok(())
    }

    /// Tab-separated dump of the three matrices and the vector, rows and
    /// columns headed by chord labels.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        for (name, m) in [
            ("alpha.alpha", &self.alpha_alpha),
            ("alpha.beta", &self.alpha_beta),
            ("beta.beta", &self.beta_beta),
        ] {
            let _ = writeln!(out, "{name}\t{}", header.join("\t"));
            for (l, row) in self.labels.iter().zip(m) {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{l}\t{}", cells.join("\t"));
            }
            out.push('\n');
        }
        let _ = writeln!(out, "alpha.gamma\t{}", header.join("\t"));
        let cells: Vec<String> = self.alpha_diagram.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "\t{}", cells.join("\t"));
        out
    }
}

/// A basis of first homology from a tree-cotree decomposition, with the
/// intersection form of the basis computed against dual (push-off) chains.
///
/// Every cycle is reduced to its coordinates in the basis, so pairing two
/// cycles never touches their corners. This is the cross-check for
/// [`RibbonGraph::pair`].
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    leftover: Vec<usize>,
    // cotree edges in dual BFS order, each with the boundary of the face
    // below it, used to push chains off the cotree
    reductions: Vec<(usize, Vec<(usize, i64)>)>,
    basis: Vec<CycleWalk>,
    form: Vec<Vec<i64>>,
}

impl HomologyBasis {
    pub fn new(graph: &RibbonGraph) -> Self {
        let v = graph.vertex_count();
        let e = graph.edge_count();
        if v == 0 {
            return Self { leftover: vec![], reductions: vec![], basis: vec![], form: vec![] };
        }

        // spanning tree of the graph
        let mut in_tree = vec![false; e];
        let mut parent_edge: Vec<Option<usize>> = vec![None; v];
        let mut depth = vec![usize::MAX; v];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); v];
        for k in 0..e {
            let (a, b) = graph.edge_ends(k);
            incident[a].push(k);
            if a != b {
                incident[b].push(k);
            }
        }
        depth[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &k in &incident[x] {
                let (a, b) = graph.edge_ends(k);
                let y = if a == x { b } else { a };
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent_edge[y] = Some(k);
                    in_tree[k] = true;
                    queue.push_back(y);
                }
            }
        }

        // spanning tree of the dual graph avoiding tree edges
        let f = graph.face_count();
        let mut dual_incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); f];
        for k in (0..e).filter(|k| !in_tree[*k]) {
            let left = graph.face_of_dart(out_half(k));
            let right = graph.face_of_dart(graph.twin(out_half(k)));
            dual_incident[left].push((k, right));
            dual_incident[right].push((k, left));
        }
        let mut boundaries: Vec<Vec<(usize, i64)>> = vec![Vec::new(); f];
        for h in 0..graph.half_edge_count() {
            let (edge, tail) = graph.edge_of_half(h);
            boundaries[graph.face_of_dart(h)].push((edge, if tail { 1 } else { -1 }));
        }
        let mut in_cotree = vec![false; e];
        let mut reductions = Vec::new();
        let mut seen = vec![false; f];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &(k, y) in &dual_incident[x] {
                if !seen[y] {
                    seen[y] = true;
                    in_cotree[k] = true;
                    reductions.push((k, std::mem::take(&mut boundaries[y])));
                    queue.push_back(y);
                }
            }
        }

        let leftover: Vec<usize> = (0..e).filter(|&k| !in_tree[k] && !in_cotree[k]).collect();
        let basis: Vec<CycleWalk> = leftover
            .iter()
            .map(|&k| Self::fundamental_cycle(graph, k, &parent_edge, &depth))
            .collect();
        let chains: Vec<Vec<i64>> = basis.iter().map(|w| w.chain(graph)).collect();
        let form = (0..basis.len())
            .map(|i| (0..basis.len()).map(|j| dual_pair(graph, &chains[i], &basis[j])).collect())
            .collect();
        Self { leftover, reductions, basis, form }
    }

    /// Loop formed by edge `k` (tail to head) and the tree path back.
    fn fundamental_cycle(
        graph: &RibbonGraph,
        k: usize,
        parent_edge: &[Option<usize>],
        depth: &[usize],
    ) -> CycleWalk {
        let m = graph.edge_count();
        let (tail, head) = graph.edge_ends(k);
        let traverse = |edge: usize, from: usize| -> (usize, usize, usize) {
            let (a, b) = graph.edge_ends(edge);
            if a == from {
                (out_half(edge), in_half((edge + 1) % m), b)
            } else {
                (in_half((edge + 1) % m), out_half(edge), a)
            }
        };
        let mut steps = vec![(out_half(k), in_half((k + 1) % m))];
        // climb from head and from tail to the common ancestor
        let (mut x, mut y) = (head, tail);
        let mut up_from_head = Vec::new();
        let mut up_from_tail = Vec::new();
        while x != y {
            if depth[x] >= depth[y] {
                let pe = parent_edge[x].expect("non-root has a parent");
                let (leave, arrive, next) = traverse(pe, x);
                up_from_head.push((leave, arrive));
                x = next;
            } else {
                let pe = parent_edge[y].expect("non-root has a parent");
                let (_, _, next) = traverse(pe, y);
                up_from_tail.push((pe, next));
                y = next;
            }
        }
        steps.extend(up_from_head);
        for (pe, parent) in up_from_tail.into_iter().rev() {
            let (leave, arrive, _) = traverse(pe, parent);
            steps.push((leave, arrive));
        }
        graph.walk_from_traversals(&steps)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn form(&self) -> &[Vec<i64>] {
        &self.form
    }

    pub fn basis(&self) -> &[CycleWalk] {
        &self.basis
    }

    /// Coordinates of a cycle in the basis: subtract face boundaries until
    /// the chain avoids the cotree, then read it off the leftover edges
    /// (what remains on the tree is then zero).
    pub fn coordinates(&self, graph: &RibbonGraph, walk: &CycleWalk) -> Vec<i64> {
        let mut chain = walk.chain(graph);
        for (k, boundary) in &self.reductions {
            if chain[*k] == 0 {
                continue;
            }
            let s: i64 = boundary.iter().filter(|(edge, _)| edge == k).map(|(_, c)| c).sum();
            debug_assert!(s.abs() == 1);
            let factor = chain[*k] * s;
            for (edge, c) in boundary {
                chain[*edge] -= factor * c;
            }
        }
        self.leftover.iter().map(|&k| chain[k]).collect()
    }

    pub fn pair(&self, graph: &RibbonGraph, x: &CycleWalk, y: &CycleWalk) -> i64 {
        let cx = self.coordinates(graph, x);
        let cy = self.coordinates(graph, y);
        let mut total = 0;
        for (i, a) in cx.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in cy.iter().enumerate() {
                total += a * self.form[i][j] * b;
            }
        }
        total
    }
}

/// Pairs a 1-chain with the left push-off of a walk by counting the edges
/// the push-off crosses inside vertex disks.
fn dual_pair(graph: &RibbonGraph, chain: &[i64], y: &CycleWalk) -> i64 {
    let mut total = 0;
    for c in &y.corners {
        let rot = graph.rotation(c.vertex);
        let start = graph.rot_pos[c.exit] as usize;
        let end = graph.rot_pos[c.enter] as usize;
        let mut i = (start + 1) % 4;
        while i != end {
            let h = rot[i];
            let (edge, is_tail) = graph.edge_of_half(h);
            // the push-off sweeps clockwise around the vertex
            total += if is_tail { -chain[edge] } else { chain[edge] };
            i = (i + 1) % 4;
        }
    }
    ORIENTATION * total
}
