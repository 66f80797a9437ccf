//! Gauss codes of long and closed virtual knot diagrams.
//!
//! A diagram is the sequence of real-crossing passages met along the knot.
//! Virtual crossings leave no trace in the code, so the generalized moves
//! involving them act as the identity here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaussError {
    #[error("syntax error in token {index} (byte {offset}): {msg}")]
    Syntax { index: usize, offset: usize, msg: String },
    #[error("chord {label} appears {count} times, expected 2")]
    Multiplicity { label: u32, count: usize },
    #[error("chord {label} needs one over and one under passage")]
    Passages { label: u32 },
    #[error("chord {label} carries different signs on its two passages")]
    SignMismatch { label: u32 },
    #[error("chord label 0 is not allowed")]
    ZeroLabel,
    #[error("unknown chord {0}")]
    UnknownChord(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Passage {
    #[serde(rename = "O")]
    Over,
    #[serde(rename = "U")]
    Under,
}

impl Passage {
    pub fn flip(self) -> Self {
        match self {
            Passage::Over => Passage::Under,
            Passage::Under => Passage::Over,
        }
    }

    fn letter(self) -> char {
        match self {
            Passage::Over => 'O',
            Passage::Under => 'U',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Pos,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn from_value(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom("sign must be 1 or -1"))
    }
}

/// Whether a crossing of a long diagram is met first as an over-passage
/// (type 0) or first as an under-passage (type 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CrossingType {
    OverFirst,
    UnderFirst,
}

impl CrossingType {
    pub fn index(self) -> usize {
        match self {
            CrossingType::OverFirst => 0,
            CrossingType::UnderFirst => 1,
        }
    }

    pub fn from_index(a: usize) -> Self {
        match a {
            0 => CrossingType::OverFirst,
            1 => CrossingType::UnderFirst,
            _ => panic!("crossing type index must be 0 or 1, got {a}"),
        }
    }
}

/// One token of a Gauss code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endpoint {
    pub label: u32,
    pub passage: Passage,
    pub sign: Sign,
}

impl Endpoint {
    pub fn new(label: u32, passage: Passage, sign: Sign) -> Self {
        Self { label, passage, sign }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.passage.letter(), self.label, self.sign.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chord {
    pub label: u32,
    pub over_pos: usize,
    pub under_pos: usize,
    pub sign: Sign,
}

impl Chord {
    pub fn first_pos(&self) -> usize {
        self.over_pos.min(self.under_pos)
    }

    pub fn second_pos(&self) -> usize {
        self.over_pos.max(self.under_pos)
    }

    pub fn crossing_type(&self) -> CrossingType {
        if self.over_pos < self.under_pos {
            CrossingType::OverFirst
        } else {
            CrossingType::UnderFirst
        }
    }
}

fn index_chords(endpoints: &[Endpoint]) -> Result<BTreeMap<u32, Chord>, GaussError> {
    let mut seen: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (pos, e) in endpoints.iter().enumerate() {
        if e.label == 0 {
            return Err(GaussError::ZeroLabel);
        }
        seen.entry(e.label).or_default().push(pos);
    }
    let mut chords = BTreeMap::new();
    for (label, positions) in seen {
        if positions.len() != 2 {
            return Err(GaussError::Multiplicity { label, count: positions.len() });
        }
        let (a, b) = (endpoints[positions[0]], endpoints[positions[1]]);
        if a.passage == b.passage {
            return Err(GaussError::Passages { label });
        }
        if a.sign != b.sign {
            return Err(GaussError::SignMismatch { label });
        }
        let (over_pos, under_pos) = if a.passage == Passage::Over {
            (positions[0], positions[1])
        } else {
            (positions[1], positions[0])
        };
        chords.insert(label, Chord { label, over_pos, under_pos, sign: a.sign });
    }
    Ok(chords)
}

fn parse_tokens(text: &str) -> Result<Vec<Endpoint>, GaussError> {
    let mut out = Vec::new();
    let tokens = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|tok| !tok.is_empty());
    for (index, raw) in tokens.enumerate() {
        let offset = raw.as_ptr() as usize - text.as_ptr() as usize;
        let syntax = |msg: &str| GaussError::Syntax { index, offset, msg: msg.to_string() };
        let mut chars = raw.chars();
        let passage = match chars.next() {
            Some('O') | Some('o') => Passage::Over,
            Some('U') | Some('u') => Passage::Under,
            _ => return Err(syntax("token must start with 'O' or 'U'")),
        };
        let rest = chars.as_str();
        let (digits, sign) = match rest.chars().last() {
            Some('+') => (&rest[..rest.len() - 1], Sign::Pos),
            Some('-') => (&rest[..rest.len() - 1], Sign::Neg),
            _ => return Err(syntax("token must end with '+' or '-'")),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax("expected a positive integer label"));
        }
        let label: u32 = digits.parse().map_err(|_| syntax("label out of range"))?;
        if label == 0 {
            return Err(syntax("labels start at 1"));
        }
        out.push(Endpoint { label, passage, sign });
    }
    Ok(out)
}

fn render(endpoints: &[Endpoint], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, e) in endpoints.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

/// Relabels chords 1..n in order of first appearance.
fn canonical_labels(endpoints: &[Endpoint]) -> Vec<Endpoint> {
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    endpoints
        .iter()
        .map(|e| {
            let next = map.len() as u32 + 1;
            let label = *map.entry(e.label).or_insert(next);
            Endpoint { label, ..*e }
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct Wire {
    endpoints: Vec<Endpoint>,
}

/// A long virtual knot diagram, read from `-inf` to `+inf`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LongDiagram {
    endpoints: Vec<Endpoint>,
    chords: BTreeMap<u32, Chord>,
}

impl LongDiagram {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_endpoints(endpoints: Vec<Endpoint>) -> Result<Self, GaussError> {
        let chords = index_chords(&endpoints)?;
        Ok(Self { endpoints, chords })
    }

    pub fn parse(text: &str) -> Result<Self, GaussError> {
        Self::from_endpoints(parse_tokens(text)?)
    }

    pub fn endpoints(&self) -> &[Endpoint] {
        &self.endpoints
    }

    pub fn chord_count(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    /// Chords in ascending label order.
    pub fn chords(&self) -> impl Iterator<Item = &Chord> + '_ {
        self.chords.values()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.chords.keys().copied().collect()
    }

    pub fn chord(&self, label: u32) -> Result<&Chord, GaussError> {
        self.chords.get(&label).ok_or(GaussError::UnknownChord(label))
    }

    pub fn max_label(&self) -> u32 {
        self.chords.keys().next_back().copied().unwrap_or(0)
    }

    pub fn crossing_type(&self, label: u32) -> Result<CrossingType, GaussError> {
        Ok(self.chord(label)?.crossing_type())
    }

    /// The index set `I_a`: labels of chords of the given type.
    pub fn index_set(&self, ty: CrossingType) -> BTreeSet<u32> {
        self.chords()
            .filter(|c| c.crossing_type() == ty)
            .map(|c| c.label)
            .collect()
    }

    /// The `a`-writhe: sum of the signs of the chords of type `a`.
    pub fn writhe(&self, ty: CrossingType) -> i64 {
        self.chords()
            .filter(|c| c.crossing_type() == ty)
            .map(|c| c.sign.value())
            .sum()
    }

    pub fn canonical(&self) -> Self {
        Self::from_endpoints(canonical_labels(&self.endpoints)).expect("relabeling keeps validity")
    }

    fn map_tokens(&self, f: impl Fn(&Endpoint) -> Endpoint) -> Self {
        Self::from_endpoints(self.endpoints.iter().map(f).collect())
            .expect("token map keeps validity")
    }

    /// Switches over/under at every crossing (signs flip accordingly).
    pub fn switch_all(&self) -> Self {
        self.map_tokens(|e| Endpoint {
            passage: e.passage.flip(),
            sign: e.sign.flip(),
            ..*e
        })
    }

    /// Reverses the orientation of the line.
    pub fn reverse(&self) -> Self {
        Self::from_endpoints(self.endpoints.iter().rev().copied().collect())
            .expect("reversal keeps validity")
    }

    /// Mirror image: same passages, opposite signs.
    pub fn mirror(&self) -> Self {
        self.map_tokens(|e| Endpoint { sign: e.sign.flip(), ..*e })
    }

    pub fn crossing_change(&self, label: u32) -> Result<Self, GaussError> {
        self.chord(label)?;
        Ok(self.map_tokens(|e| {
            if e.label == label {
                Endpoint { passage: e.passage.flip(), sign: e.sign.flip(), ..*e }
            } else {
                *e
            }
        }))
    }

    /// Replaces a real crossing by a virtual one, i.e. deletes its chord.
    pub fn virtualize(&self, label: u32) -> Result<Self, GaussError> {
        self.chord(label)?;
        Ok(Self::from_endpoints(
            self.endpoints.iter().filter(|e| e.label != label).copied().collect(),
        )
        .expect("chord deletion keeps validity"))
    }

    /// Concatenation `self ∘ other`; chords of `other` are shifted past the
    /// largest label of `self`.
    pub fn product(&self, other: &LongDiagram) -> Self {
        let shift = self.max_label();
        let mut endpoints = self.endpoints.clone();
        endpoints.extend(other.endpoints.iter().map(|e| Endpoint { label: e.label + shift, ..*e }));
        Self::from_endpoints(endpoints).expect("shifted labels are disjoint")
    }

    pub fn closure(&self) -> ClosedDiagram {
        ClosedDiagram { inner: self.clone() }
    }

    /// Crossing changes at every type-1 chord, giving a descending diagram.
    pub fn descending(&self) -> Self {
        let ones = self.index_set(CrossingType::UnderFirst);
        self.map_tokens(|e| {
            if ones.contains(&e.label) {
                Endpoint { passage: e.passage.flip(), sign: e.sign.flip(), ..*e }
            } else {
                *e
            }
        })
    }

    /// Appends canceling kinks at the right end so that both writhes vanish.
    pub fn untwist(&self) -> Self {
        let mut endpoints = self.endpoints.clone();
        let mut next = self.max_label();
        for ty in [CrossingType::OverFirst, CrossingType::UnderFirst] {
            let w = self.writhe(ty);
            let sign = if w > 0 { Sign::Neg } else { Sign::Pos };
            let (first, second) = match ty {
                CrossingType::OverFirst => (Passage::Over, Passage::Under),
                CrossingType::UnderFirst => (Passage::Under, Passage::Over),
            };
            for _ in 0..w.unsigned_abs() {
                next += 1;
                endpoints.push(Endpoint::new(next, first, sign));
                endpoints.push(Endpoint::new(next, second, sign));
            }
        }
        Self::from_endpoints(endpoints).expect("fresh kink labels")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(Wire { endpoints: self.endpoints.clone() }).expect("plain data")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, GaussError> {
        let wire: Wire = serde_json::from_value(value.clone()).map_err(|e| GaussError::Syntax {
            index: 0,
            offset: 0,
            msg: e.to_string(),
        })?;
        Self::from_endpoints(wire.endpoints)
    }
}

impl fmt::Display for LongDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(&self.endpoints, f)
    }
}

impl fmt::Debug for LongDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LongDiagram(\"{self}\")")
    }
}

impl FromStr for LongDiagram {
    type Err = GaussError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for LongDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Wire { endpoints: self.endpoints.clone() }.serialize(s)
    }
}

/// A closed virtual knot diagram: a cyclic Gauss code. Two closed diagrams
/// are equal when their token sequences agree up to rotation.
#[derive(Clone, Default)]
pub struct ClosedDiagram {
    inner: LongDiagram,
}

impl ClosedDiagram {
    pub fn parse(text: &str) -> Result<Self, GaussError> {
        Ok(Self { inner: LongDiagram::parse(text)? })
    }

    pub fn from_endpoints(endpoints: Vec<Endpoint>) -> Result<Self, GaussError> {
        Ok(Self { inner: LongDiagram::from_endpoints(endpoints)? })
    }

    /// Tokens starting from an arbitrary cut point.
    pub fn endpoints(&self) -> &[Endpoint] {
        self.inner.endpoints()
    }

    pub fn chord_count(&self) -> usize {
        self.inner.chord_count()
    }

    pub fn chords(&self) -> impl Iterator<Item = &Chord> + '_ {
        self.inner.chords()
    }

    pub fn chord(&self, label: u32) -> Result<&Chord, GaussError> {
        self.inner.chord(label)
    }

    pub fn labels(&self) -> Vec<u32> {
        self.inner.labels()
    }

    /// Total writhe.
    pub fn writhe(&self) -> i64 {
        self.chords().map(|c| c.sign.value()).sum()
    }

    /// Cuts the circle before position `k`, yielding a long diagram.
    pub fn cut_at(&self, k: usize) -> LongDiagram {
        let e = self.endpoints();
        let mut tokens = Vec::with_capacity(e.len());
        tokens.extend_from_slice(&e[k.min(e.len())..]);
        tokens.extend_from_slice(&e[..k.min(e.len())]);
        LongDiagram::from_endpoints(tokens).expect("rotation keeps validity")
    }
}

impl PartialEq for ClosedDiagram {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.endpoints(), other.endpoints());
        if a.len() != b.len() {
            return false;
        }
        if a.is_empty() {
            return true;
        }
        (0..a.len()).any(|r| (0..a.len()).all(|i| a[(i + r) % a.len()] == b[i]))
    }
}

impl Eq for ClosedDiagram {}

impl fmt::Display for ClosedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render(self.endpoints(), f)
    }
}

impl fmt::Debug for ClosedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedDiagram(\"{self}\")")
    }
}

/// The all-positive diagram on the curve with `n + 1` crossings whose
/// chord `n + 1` is crossed by chords `n, ..., 1` and then `1, ..., n`.
/// Chords `1..=n` are of type 1. `None` for `n < 2`.
pub fn kprime_family(n: u32) -> Option<LongDiagram> {
    if n < 2 {
        return None;
    }
    let mut endpoints = vec![Endpoint::new(n + 1, Passage::Over, Sign::Pos)];
    endpoints.extend((1..=n).rev().map(|i| Endpoint::new(i, Passage::Under, Sign::Pos)));
    endpoints.push(Endpoint::new(n + 1, Passage::Under, Sign::Pos));
    endpoints.extend((1..=n).map(|i| Endpoint::new(i, Passage::Over, Sign::Pos)));
    Some(LongDiagram::from_endpoints(endpoints).expect("well-formed family code"))
}

/// Same curve as [`kprime_family`] with crossings changed at chords
/// `1..=n`, so every chord is of type 0.
pub fn k_family(n: u32) -> Option<LongDiagram> {
    let mut d = kprime_family(n)?;
    for i in 1..=n {
        d = d.crossing_change(i).expect("chord exists");
    }
    Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> LongDiagram {
        LongDiagram::parse(s).unwrap()
    }

    const KPRIME2: &str = "O3+ U2+ U1+ U3+ O1+ O2+";
    const K2: &str = "O3+ O2- O1- U3+ U1- U2-";

    #[test]
    fn parse_basics() {
        assert!(d("").is_empty());
        let one = d("O1+ U1+");
        assert_eq!(one.chord_count(), 1);
        let c = one.chord(1).unwrap();
        assert_eq!((c.over_pos, c.under_pos, c.sign), (0, 1, Sign::Pos));
        let trefoil = d("O1+ U2+ O3+ U1+ O2+ U3+");
        assert_eq!(trefoil.chord_count(), 3);
        assert_eq!(d("O1+,U1+").to_string(), "O1+ U1+");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(LongDiagram::parse("X1+"), Err(GaussError::Syntax { index: 0, .. })));
        assert!(matches!(
            LongDiagram::parse("O1+ U1"),
            Err(GaussError::Syntax { index: 1, offset: 4, .. })
        ));
        assert!(matches!(LongDiagram::parse("O1+"), Err(GaussError::Multiplicity { label: 1, count: 1 })));
        assert!(matches!(LongDiagram::parse("O1+ O1+"), Err(GaussError::Passages { label: 1 })));
        assert!(matches!(LongDiagram::parse("O1+ U1-"), Err(GaussError::SignMismatch { label: 1 })));
        assert!(matches!(LongDiagram::parse("O1+ U1+ O1+"), Err(GaussError::Multiplicity { .. })));
        assert!(LongDiagram::parse("O0+ U0+").is_err());
        assert!(LongDiagram::parse("O+ U+").is_err());
    }

    #[test]
    fn crossing_types() {
        assert_eq!(d("O1+ U1+").crossing_type(1).unwrap(), CrossingType::OverFirst);
        let kp = d(KPRIME2);
        assert_eq!(kp.crossing_type(1).unwrap(), CrossingType::UnderFirst);
        assert_eq!(kp.crossing_type(2).unwrap(), CrossingType::UnderFirst);
        assert_eq!(kp.crossing_type(3).unwrap(), CrossingType::OverFirst);
        assert_eq!(kp.crossing_type(9), Err(GaussError::UnknownChord(9)));
    }

    #[test]
    fn writhes() {
        assert_eq!(LongDiagram::empty().writhe(CrossingType::OverFirst), 0);
        let kp = d(KPRIME2);
        assert_eq!(kp.writhe(CrossingType::OverFirst), 1);
        assert_eq!(kp.writhe(CrossingType::UnderFirst), 2);
        let k = d(K2);
        assert_eq!(k.writhe(CrossingType::OverFirst), -1);
        assert_eq!(k.writhe(CrossingType::UnderFirst), 0);
    }

    #[test]
    fn symmetries() {
        let one = d("O1+ U1+");
        assert_eq!(one.switch_all().to_string(), "U1- O1-");
        assert_eq!(one.reverse().to_string(), "U1+ O1+");
        assert_eq!(one.mirror().to_string(), "O1- U1-");
        assert!(LongDiagram::empty().switch_all().is_empty());
        assert_eq!(one.crossing_change(1).unwrap().to_string(), "U1- O1-");
        assert!(one.crossing_change(2).is_err());
    }

    #[test]
    fn virtualize_and_product() {
        assert!(d("O1+ U1+").virtualize(1).unwrap().is_empty());
        let k3 = d("O4+ U3+ U2+ U1+ U4+ O1+ O2+ O3+");
        assert_eq!(k3.virtualize(1).unwrap().canonical(), d(KPRIME2).canonical());
        assert_eq!(d("O1+ U1+").product(&d("O1- U1-")).to_string(), "O1+ U1+ O2- U2-");
        let x = d(K2);
        assert_eq!(LongDiagram::empty().product(&x), x);
    }

    #[test]
    fn descending_and_untwist() {
        let dk = d(KPRIME2).descending();
        assert!(dk.index_set(CrossingType::UnderFirst).is_empty());
        assert_eq!(dk.chord(1).unwrap().sign, Sign::Neg);
        assert_eq!(dk.chord(2).unwrap().sign, Sign::Neg);
        assert_eq!(dk.chord(3).unwrap().sign, Sign::Pos);
        assert_eq!(d("O1+ U1+").untwist().to_string(), "O1+ U1+ O2- U2-");
        let kp = d(KPRIME2).untwist();
        assert_eq!(kp.writhe(CrossingType::OverFirst), 0);
        assert_eq!(kp.writhe(CrossingType::UnderFirst), 0);
        let flat = d("O1+ U1+ O2- U2-");
        assert_eq!(flat.untwist(), flat);
    }

    #[test]
    fn closure_equality_is_cyclic() {
        let a = d("O1+ U2+ O3+ U1+ O2+ U3+").closure();
        let b = d("O3+ U1+ O2+ U3+ O1+ U2+").closure();
        assert_eq!(a, b);
        assert_ne!(a, d("O1+ U2+ O3+ U1+ U3+ O2+").closure());
        assert_eq!(LongDiagram::empty().closure(), ClosedDiagram::default());
    }

    #[test]
    fn family_codes() {
        assert_eq!(kprime_family(2).unwrap(), d("O3+ U2+ U1+ U3+ O1+ O2+"));
        assert_eq!(k_family(3).unwrap(), d("O4+ O3- O2- O1- U4+ U1- U2- U3-"));
        assert!(kprime_family(1).is_none() && k_family(0).is_none());
        let v = kprime_family(3).unwrap().virtualize(1).unwrap().canonical();
        // relabeling by first appearance sends 4,3,2 to 1,2,3
        assert_eq!(v, d("O1+ U2+ U3+ U1+ O3+ O2+"));
        assert_eq!(v, kprime_family(2).unwrap().canonical());
    }

    #[test]
    fn json_shape() {
        let bad = serde_json::json!({"endpoints":[
            {"label":1,"passage":"O","sign":1},{"label":1,"passage":"U","sign":-1}]});
        assert!(LongDiagram::from_json(&bad).is_err());
        let v = d("O1+ U1+").to_json();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"endpoints":[{"label":1,"passage":"O","sign":1},{"label":1,"passage":"U","sign":1}]}"#
        );
        assert_eq!(LongDiagram::from_json(&v).unwrap(), d("O1+ U1+"));
    }

    fn arb_diagram() -> impl Strategy<Value = LongDiagram> {
        (0usize..8).prop_flat_map(|n| {
            (
                prop::collection::vec(any::<u32>(), 2 * n).prop_map(move |keys| {
                    let mut slots: Vec<(u32, u32)> =
                        keys.into_iter().zip((1..=n as u32).flat_map(|l| [l, l])).collect();
                    slots.sort();
                    slots.into_iter().map(|(_, l)| l).collect::<Vec<u32>>()
                }),
                prop::collection::vec((any::<bool>(), any::<bool>()), n),
            )
                .prop_map(|(slots, flags)| {
                    let mut seen = BTreeSet::new();
                    let eps = slots
                        .iter()
                        .map(|&l| {
                            let (over_first, pos) = flags[l as usize - 1];
                            let sign = if pos { Sign::Pos } else { Sign::Neg };
                            let first = seen.insert(l);
                            let passage = if first == over_first { Passage::Over } else { Passage::Under };
                            Endpoint::new(l, passage, sign)
                        })
                        .collect();
                    LongDiagram::from_endpoints(eps).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(x in arb_diagram()) {
            let c = x.canonical();
            prop_assert_eq!(LongDiagram::parse(&c.to_string()).unwrap(), c.clone());
            prop_assert_eq!(LongDiagram::from_json(&c.to_json()).unwrap(), c);
        }

        #[test]
        fn structural_transforms(x in arb_diagram()) {
            prop_assert_eq!(x.switch_all().switch_all(), x.clone());
            prop_assert_eq!(x.reverse().reverse(), x.clone());
            prop_assert_eq!(x.mirror().mirror(), x.clone());
            prop_assert_eq!(x.switch_all().mirror(), x.mirror().switch_all());
            let i0 = x.index_set(CrossingType::OverFirst);
            let i1 = x.index_set(CrossingType::UnderFirst);
            prop_assert_eq!(i0.len() + i1.len(), x.chord_count());
            prop_assert_eq!(x.switch_all().index_set(CrossingType::OverFirst), i1.clone());
            prop_assert_eq!(x.reverse().index_set(CrossingType::OverFirst), i1.clone());
            prop_assert_eq!(x.mirror().index_set(CrossingType::OverFirst), i0.clone());
            let all = x.labels().into_iter().fold(x.clone(), |acc, l| acc.crossing_change(l).unwrap());
            prop_assert_eq!(all, x.switch_all());
            let desc = x.descending();
            prop_assert!(desc.index_set(CrossingType::UnderFirst).is_empty());
            prop_assert_eq!(desc.descending(), desc.clone());
            for l in x.labels() {
                prop_assert_eq!(x.virtualize(l).unwrap().chord_count() + 1, x.chord_count());
            }
        }

        #[test]
        fn product_associative_up_to_relabel(a in arb_diagram(), b in arb_diagram(), c in arb_diagram()) {
            let left = a.product(&b).product(&c).canonical();
            let right = a.product(&b.product(&c)).canonical();
            prop_assert_eq!(left, right);
        }
    }
}
