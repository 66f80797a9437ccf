//! Reidemeister moves on Gauss codes, random diagrams and move walks, and
//! alternating sums over marked diagrams.
//!
//! Only moves that are certainly sound are ever produced: an R3 is applied
//! only to a triangle whose passages and signs fit a planar picture.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauss::{CrossingType, Endpoint, GaussError, LongDiagram, Passage, Sign};
use crate::invariants::{closed_invariants, full_report, Kind};
use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("position {position} out of range 0..={len}")]
    Position { position: usize, len: usize },
    #[error("insertion slots {0} and {1} are out of order")]
    Slots(usize, usize),
    #[error("chord {0} is not a removable kink")]
    NotKink(u32),
    #[error("chords {0} and {1} do not bound a removable bigon")]
    NotBigon(u32, u32),
    #[error("chords {0:?} do not form an admissible triangle")]
    NotTriangle([u32; 3]),
    #[error("marks must be distinct chords of the diagram")]
    BadMarks,
    #[error("unknown invariant selector '{0}'")]
    UnknownSelector(String),
    #[error("no witness among diagrams with at most {0} chords")]
    Exhausted(usize),
    #[error(transparent)]
    Gauss(#[from] GaussError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum R2Variant {
    Parallel,
    Antiparallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strand {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MoveEvent {
    R1Insert { position: usize, sign: Sign, order: CrossingType },
    R1Delete { label: u32 },
    R2Insert { first: usize, second: usize, variant: R2Variant, over: Strand, sign: Sign },
    R2Delete { labels: [u32; 2] },
    R3 { labels: [u32; 3] },
}

impl MoveEvent {
    pub fn apply(&self, d: &LongDiagram) -> Result<LongDiagram, MoveError> {
        match *self {
            MoveEvent::R1Insert { position, sign, order } => r1_insert(d, position, sign, order),
            MoveEvent::R1Delete { label } => r1_delete(d, label),
            MoveEvent::R2Insert { first, second, variant, over, sign } => {
                r2_insert(d, first, second, variant, over, sign)
            }
            MoveEvent::R2Delete { labels } => r2_delete(d, labels[0], labels[1]),
            MoveEvent::R3 { labels } => r3_apply(d, labels),
        }
    }
}

fn rebuild(endpoints: Vec<Endpoint>) -> LongDiagram {
    LongDiagram::from_endpoints(endpoints).expect("move keeps the code well formed")
}

fn remove_chords(d: &LongDiagram, labels: &[u32]) -> LongDiagram {
    rebuild(d.endpoints().iter().filter(|e| !labels.contains(&e.label)).copied().collect())
}

/// Inserts a kink: a fresh chord with adjacent endpoints at `position`.
pub fn r1_insert(
    d: &LongDiagram,
    position: usize,
    sign: Sign,
    order: CrossingType,
) -> Result<LongDiagram, MoveError> {
    let len = d.endpoints().len();
    if position > len {
        return Err(MoveError::Position { position, len });
    }
    let label = d.max_label() + 1;
    let (p, q) = match order {
        CrossingType::OverFirst => (Passage::Over, Passage::Under),
        CrossingType::UnderFirst => (Passage::Under, Passage::Over),
    };
    let mut eps = d.endpoints().to_vec();
    eps.splice(position..position, [Endpoint::new(label, p, sign), Endpoint::new(label, q, sign)]);
    Ok(rebuild(eps))
}

pub fn is_kink(d: &LongDiagram, label: u32) -> bool {
    d.chord(label).map(|c| c.second_pos() - c.first_pos() == 1).unwrap_or(false)
}

pub fn r1_delete(d: &LongDiagram, label: u32) -> Result<LongDiagram, MoveError> {
    if !is_kink(d, label) {
        return Err(MoveError::NotKink(label));
    }
    Ok(remove_chords(d, &[label]))
}

/// Inserts two chords with opposite signs, one strand passing over both.
/// The first strand gets its pair at slot `first`, the second at slot
/// `second`; equal slots put the second pair right after the first.
pub fn r2_insert(
    d: &LongDiagram,
    first: usize,
    second: usize,
    variant: R2Variant,
    over: Strand,
    sign: Sign,
) -> Result<LongDiagram, MoveError> {
    let len = d.endpoints().len();
    if second > len {
        return Err(MoveError::Position { position: second, len });
    }
    if first > second {
        return Err(MoveError::Slots(first, second));
    }
    let (a, b) = (d.max_label() + 1, d.max_label() + 2);
    let (p1, p2) = match over {
        Strand::First => (Passage::Over, Passage::Under),
        Strand::Second => (Passage::Under, Passage::Over),
    };
    let pair1 = [Endpoint::new(a, p1, sign), Endpoint::new(b, p1, sign.flip())];
    let pair2 = match variant {
        R2Variant::Parallel => [Endpoint::new(a, p2, sign), Endpoint::new(b, p2, sign.flip())],
        R2Variant::Antiparallel => [Endpoint::new(b, p2, sign.flip()), Endpoint::new(a, p2, sign)],
    };
    let eps = d.endpoints();
    let mut out = Vec::with_capacity(len + 4);
    out.extend_from_slice(&eps[..first]);
    out.extend(pair1);
    out.extend_from_slice(&eps[first..second]);
    out.extend(pair2);
    out.extend_from_slice(&eps[second..]);
    Ok(rebuild(out))
}

/// Whether chords `a`, `b` have opposite signs and their four endpoints
/// form two adjacent pairs, one pair of over- and one of under-passages.
pub fn is_bigon(d: &LongDiagram, a: u32, b: u32) -> bool {
    if a == b {
        return false;
    }
    let (Ok(ca), Ok(cb)) = (d.chord(a), d.chord(b)) else {
        return false;
    };
    if ca.sign == cb.sign {
        return false;
    }
    let mut pos = [ca.over_pos, ca.under_pos, cb.over_pos, cb.under_pos];
    pos.sort_unstable();
    if pos[1] != pos[0] + 1 || pos[3] != pos[2] + 1 {
        return false;
    }
    let e = d.endpoints();
    let (x, y, z, w) = (e[pos[0]], e[pos[1]], e[pos[2]], e[pos[3]]);
    x.label != y.label && z.label != w.label && x.passage == y.passage && z.passage == w.passage && x.passage != z.passage
}

pub fn r2_delete(d: &LongDiagram, a: u32, b: u32) -> Result<LongDiagram, MoveError> {
    if !is_bigon(d, a, b) {
        return Err(MoveError::NotBigon(a, b));
    }
    Ok(remove_chords(d, &[a, b]))
}

fn adjacent(p: usize, q: usize) -> bool {
    p.abs_diff(q) == 1
}

fn order_sign(p: usize, q: usize) -> i64 {
    if p < q {
        1
    } else {
        -1
    }
}

/// Checks the roles `[tm, tb, mb]`: `tm` is where the top strand crosses
/// the middle one, `tb` top over bottom, `mb` middle over bottom.
fn is_triangle(d: &LongDiagram, roles: [u32; 3]) -> bool {
    let [tm, tb, mb] = roles;
    if tm == tb || tm == mb || tb == mb {
        return false;
    }
    let (Ok(tm), Ok(tb), Ok(mb)) = (d.chord(tm), d.chord(tb), d.chord(mb)) else {
        return false;
    };
    // top strand passes over tm and tb, middle under tm and over mb,
    // bottom under tb and mb
    if !(adjacent(tm.over_pos, tb.over_pos)
        && adjacent(tm.under_pos, mb.over_pos)
        && adjacent(tb.under_pos, mb.under_pos))
    {
        return false;
    }
    let s_top = order_sign(tm.over_pos, tb.over_pos);
    let s_mid = order_sign(tm.under_pos, mb.over_pos);
    let s_bot = order_sign(tb.under_pos, mb.under_pos);
    let (e_tm, e_tb, e_mb) = (tm.sign.value(), tb.sign.value(), mb.sign.value());
    s_mid * s_bot == e_tm * e_tb && s_top * s_bot == e_tm * e_mb
}

fn triangle_roles(d: &LongDiagram, labels: [u32; 3]) -> Option<[u32; 3]> {
    let [x, y, z] = labels;
    [[x, y, z], [x, z, y], [y, x, z], [y, z, x], [z, x, y], [z, y, x]]
        .into_iter()
        .find(|r| is_triangle(d, *r))
}

/// Slides the top strand across the crossing of the other two. `labels`
/// may be given in any order.
pub fn r3_apply(d: &LongDiagram, labels: [u32; 3]) -> Result<LongDiagram, MoveError> {
    let [tm, tb, mb] = triangle_roles(d, labels).ok_or(MoveError::NotTriangle(labels))?;
    let (tm, tb, mb) = (*d.chord(tm)?, *d.chord(tb)?, *d.chord(mb)?);
    let mut eps = d.endpoints().to_vec();
    eps.swap(tm.over_pos, tb.over_pos);
    eps.swap(tm.under_pos, mb.over_pos);
    eps.swap(tb.under_pos, mb.under_pos);
    Ok(rebuild(eps))
}

pub fn find_r1(d: &LongDiagram) -> Vec<u32> {
    d.labels().into_iter().filter(|&l| is_kink(d, l)).collect()
}

pub fn find_r2(d: &LongDiagram) -> Vec<[u32; 2]> {
    let e = d.endpoints();
    let mut out: Vec<[u32; 2]> = e
        .windows(2)
        .filter(|w| w[0].label != w[1].label && w[0].passage == w[1].passage)
        .map(|w| [w[0].label.min(w[1].label), w[0].label.max(w[1].label)])
        .filter(|[a, b]| is_bigon(d, *a, *b))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// All admissible triangles, labels in role order (top-middle,
/// top-bottom, middle-bottom).
pub fn find_r3(d: &LongDiagram) -> Vec<[u32; 3]> {
    let e = d.endpoints();
    let mut out = Vec::new();
    for w in e.windows(2) {
        if w[0].passage != Passage::Over || w[1].passage != Passage::Over || w[0].label == w[1].label {
            continue;
        }
        for (tm, tb) in [(w[0].label, w[1].label), (w[1].label, w[0].label)] {
            let u = d.chord(tm).expect("label from code").under_pos;
            for q in [u.wrapping_sub(1), u + 1] {
                let Some(t) = e.get(q) else { continue };
                if t.passage == Passage::Over && is_triangle(d, [tm, tb, t.label]) {
                    out.push([tm, tb, t.label]);
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A uniformly random interleaving of `n` chords with independent fair
/// signs and over/under orders.
pub fn random_diagram(n: usize, seed: u64) -> LongDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_diagram_with(n, &mut rng)
}

pub fn random_diagram_with<R: Rng>(n: usize, rng: &mut R) -> LongDiagram {
    let mut slots: Vec<u32> = (1..=n as u32).flat_map(|l| [l, l]).collect();
    slots.shuffle(rng);
    let over_first: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let signs: Vec<Sign> = (0..n).map(|_| if rng.gen() { Sign::Pos } else { Sign::Neg }).collect();
    let mut seen = vec![false; n + 1];
    let eps = slots
        .into_iter()
        .map(|l| {
            let i = l as usize;
            let first = !seen[i];
            seen[i] = true;
            let passage = if first == over_first[i - 1] { Passage::Over } else { Passage::Under };
            Endpoint::new(l, passage, signs[i - 1])
        })
        .collect();
    rebuild(eps)
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen() {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

/// Picks a move class uniformly among those available, then its
/// parameters uniformly.
pub fn random_move<R: Rng>(d: &LongDiagram, rng: &mut R) -> MoveEvent {
    let len = d.endpoints().len();
    let r1 = find_r1(d);
    let r2 = find_r2(d);
    let r3 = find_r3(d);
    let mut classes = vec![0u8, 1];
    if !r1.is_empty() {
        classes.push(2);
    }
    if !r2.is_empty() {
        classes.push(3);
    }
    if !r3.is_empty() {
        classes.push(4);
    }
    match *classes.choose(rng).expect("insertions always available") {
        0 => MoveEvent::R1Insert {
            position: rng.gen_range(0..=len),
            sign: random_sign(rng),
            order: if rng.gen() { CrossingType::OverFirst } else { CrossingType::UnderFirst },
        },
        1 => {
            let (x, y) = (rng.gen_range(0..=len), rng.gen_range(0..=len));
            MoveEvent::R2Insert {
                first: x.min(y),
                second: x.max(y),
                variant: if rng.gen() { R2Variant::Parallel } else { R2Variant::Antiparallel },
                over: if rng.gen() { Strand::First } else { Strand::Second },
                sign: random_sign(rng),
            }
        }
        2 => MoveEvent::R1Delete { label: *r1.choose(rng).expect("nonempty") },
        3 => MoveEvent::R2Delete { labels: *r2.choose(rng).expect("nonempty") },
        _ => MoveEvent::R3 { labels: *r3.choose(rng).expect("nonempty") },
    }
}

/// Applies `steps` random sound moves; each entry is the move and the
/// diagram after it.
pub fn random_walk(d: &LongDiagram, steps: usize, seed: u64) -> Vec<(MoveEvent, LongDiagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let ev = random_move(&cur, &mut rng);
        cur = ev.apply(&cur).expect("generated moves are applicable");
        out.push((ev, cur.clone()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarkRule {
    CrossingChange,
    Virtualization,
}

/// A diagram with an ordered list of marked crossings. Variant `delta`
/// applies the rule at mark `i` when bit `i` of `delta` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedDiagram {
    base: LongDiagram,
    marks: Vec<u32>,
    rule: MarkRule,
}

impl MarkedDiagram {
    pub fn new(base: LongDiagram, marks: Vec<u32>, rule: MarkRule) -> Result<Self, MoveError> {
        let mut sorted = marks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != marks.len() || marks.len() > 20 || marks.iter().any(|&l| base.chord(l).is_err()) {
            return Err(MoveError::BadMarks);
        }
        Ok(Self { base, marks, rule })
    }

    pub fn base(&self) -> &LongDiagram {
        &self.base
    }

    pub fn marks(&self) -> &[u32] {
        &self.marks
    }

    pub fn rule(&self) -> MarkRule {
        self.rule
    }

    pub fn variant(&self, delta: u32) -> LongDiagram {
        let mut d = self.base.clone();
        for (i, &l) in self.marks.iter().enumerate() {
            if delta >> i & 1 == 1 {
                d = match self.rule {
                    MarkRule::CrossingChange => d.crossing_change(l),
                    MarkRule::Virtualization => d.virtualize(l),
                }
                .expect("marks are chords of the base");
            }
        }
        d
    }
}

/// Names an invariant with polynomial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Selector {
    Writhe(usize),
    X(Kind, usize, usize),
    TildeW,
    Tilde(Kind),
    ClosedW,
    ClosedI,
    ClosedII,
}

impl Selector {
    pub fn evaluate(&self, d: &LongDiagram) -> LaurentPoly {
        let report = || full_report(d).expect("report checks");
        match *self {
            Selector::Writhe(a) => report().w[a].clone(),
            Selector::X(kind, a, b) => report().x(kind, a, b).clone(),
            Selector::TildeW => report().tilde_w,
            Selector::Tilde(kind) => report().tilde(kind).clone(),
            Selector::ClosedW => closed_invariants(&d.closure()).writhe,
            Selector::ClosedI => closed_invariants(&d.closure()).first,
            Selector::ClosedII => closed_invariants(&d.closure()).second,
        }
    }

    /// The twelve `F/G/H_ab` selectors in report order.
    pub fn intersection_slots() -> Vec<Selector> {
        let mut out = Vec::new();
        for kind in Kind::ALL {
            for a in 0..2 {
                for b in 0..2 {
                    out.push(Selector::X(kind, a, b));
                }
            }
        }
        out
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Writhe(a) => write!(f, "W{a}"),
            Selector::X(kind, a, b) => write!(f, "{}{a}{b}", kind.letter()),
            Selector::TildeW => write!(f, "Wtilde"),
            Selector::Tilde(kind) => write!(f, "{}tilde", kind.letter()),
            Selector::ClosedW => write!(f, "W"),
            Selector::ClosedI => write!(f, "I"),
            Selector::ClosedII => write!(f, "II"),
        }
    }
}

impl FromStr for Selector {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MoveError::UnknownSelector(s.to_string());
        let kind = |c: u8| match c {
            b'F' => Some(Kind::F),
            b'G' => Some(Kind::G),
            b'H' => Some(Kind::H),
            _ => None,
        };
        let bit = |c: u8| match c {
            b'0' => Some(0),
            b'1' => Some(1),
            _ => None,
        };
        let b = s.as_bytes();
        Ok(match s {
            "W" => Selector::ClosedW,
            "I" => Selector::ClosedI,
            "II" => Selector::ClosedII,
            "Wtilde" => Selector::TildeW,
            _ if b.len() == 2 && b[0] == b'W' => Selector::Writhe(bit(b[1]).ok_or_else(bad)?),
            _ if b.len() == 3 => Selector::X(
                kind(b[0]).ok_or_else(bad)?,
                bit(b[1]).ok_or_else(bad)?,
                bit(b[2]).ok_or_else(bad)?,
            ),
            _ if b.len() == 6 && &s[1..] == "tilde" => Selector::Tilde(kind(b[0]).ok_or_else(bad)?),
            _ => return Err(bad()),
        })
    }
}

/// `sum over delta of (-1)^|delta| v(D_delta)`.
pub fn alternating_sum(m: &MarkedDiagram, selector: Selector) -> LaurentPoly {
    let k = m.marks.len();
    let terms: Vec<LaurentPoly> = (0..1u32 << k)
        .into_par_iter()
        .map(|delta| {
            let v = selector.evaluate(&m.variant(delta));
            if delta.count_ones() % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    terms.into_iter().sum()
}

/// Alternating sums of all twelve intersection polynomials at once.
pub fn alternating_sums_all(m: &MarkedDiagram) -> Vec<(Selector, LaurentPoly)> {
    let k = m.marks.len();
    let reports: Vec<(u32, _)> = (0..1u32 << k)
        .into_par_iter()
        .map(|delta| (delta, full_report(&m.variant(delta)).expect("report checks")))
        .collect();
    Selector::intersection_slots()
        .into_iter()
        .map(|sel| {
            let Selector::X(kind, a, b) = sel else { unreachable!() };
            let sum = reports
                .iter()
                .map(|(delta, r)| {
                    let v = r.x(kind, a, b).clone();
                    if delta.count_ones() % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .sum();
            (sel, sum)
        })
        .collect()
}

/// A 2-marked diagram whose crossing-change alternating sums of the
/// intersection polynomials do not vanish.
#[derive(Debug, Clone)]
pub struct Witness {
    pub marked: MarkedDiagram,
    pub sums: Vec<(Selector, LaurentPoly)>,
}

impl Witness {
    pub fn sum(&self, sel: Selector) -> Option<&LaurentPoly> {
        self.sums.iter().find(|(s, _)| *s == sel).map(|(_, p)| p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let sums: serde_json::Map<String, serde_json::Value> =
            self.sums.iter().map(|(s, p)| (s.to_string(), p.to_string().into())).collect();
        serde_json::json!({
            "base": self.marked.base.to_string(),
            "marks": self.marked.marks,
            "rule": self.marked.rule,
            "sums": sums,
        })
    }
}

/// Every Gauss code with `n` chords labeled by first appearance.
pub fn all_diagrams(n: usize) -> Vec<LongDiagram> {
    fn words(cur: &mut Vec<u32>, count: &mut Vec<u8>, n: usize, out: &mut Vec<Vec<u32>>) {
        if cur.len() == 2 * n {
            out.push(cur.clone());
            return;
        }
        let opened = cur.iter().copied().max().unwrap_or(0) as usize;
        for l in 1..=(opened + 1).min(n) {
            if count[l] < 2 {
                count[l] += 1;
                cur.push(l as u32);
                words(cur, count, n, out);
                cur.pop();
                count[l] -= 1;
            }
        }
    }
    let mut seqs = Vec::new();
    words(&mut Vec::new(), &mut vec![0; n + 1], n, &mut seqs);
    let mut out = Vec::new();
    for seq in seqs {
        for orders in 0..1u32 << n {
            for signs in 0..1u32 << n {
                let mut seen = vec![false; n + 1];
                let eps = seq
                    .iter()
                    .map(|&l| {
                        let i = l as usize;
                        let first = !seen[i];
                        seen[i] = true;
                        let over_first = orders >> (i - 1) & 1 == 1;
                        let passage = if first == over_first { Passage::Over } else { Passage::Under };
                        let sign = if signs >> (i - 1) & 1 == 1 { Sign::Pos } else { Sign::Neg };
                        Endpoint::new(l, passage, sign)
                    })
                    .collect();
                out.push(rebuild(eps));
            }
        }
    }
    out
}

/// Searches diagrams with 2 to `max_chords` chords, in order of size, for
/// a crossing-change 2-marked diagram where every one of the twelve
/// alternating sums is nonzero.
pub fn degree_two_witness(max_chords: usize) -> Result<Witness, MoveError> {
    for n in 2..=max_chords {
        let found = all_diagrams(n).into_iter().find_map(|d| {
            for i in 1..=n as u32 {
                for j in i + 1..=n as u32 {
                    let m = MarkedDiagram::new(d.clone(), vec![i, j], MarkRule::CrossingChange)
                        .expect("valid marks");
                    let sums = alternating_sums_all(&m);
                    if sums.iter().all(|(_, p)| !p.is_zero()) {
                        return Some(Witness { marked: m, sums });
                    }
                }
            }
            None
        });
        if let Some(w) = found {
            return Ok(w);
        }
    }
    Err(MoveError::Exhausted(max_chords))
}

/// A reproducible record of a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub base: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<MoveEvent>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub marks: Vec<u32>,
    pub slot: String,
    pub expected: String,
    pub actual: String,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}
