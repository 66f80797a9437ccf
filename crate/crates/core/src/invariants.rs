//! Writhe polynomials, the twelve intersection polynomials, their
//! crossing-change stable combinations, and the closed-knot polynomials.

use std::fmt::Write as _;

use serde_json::json;
use thiserror::Error;

use crate::gauss::{ClosedDiagram, LongDiagram};
use crate::laurent::{LaurentPoly, TermAccumulator};
use crate::surface::{PairingTables, RibbonGraph};

pub const REPORT_SCHEMA: &str = "vknot.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    F,
    G,
    H,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::F, Kind::G, Kind::H];

    pub fn letter(self) -> char {
        match self {
            Kind::F => 'F',
            Kind::G => 'G',
            Kind::H => 'H',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

fn exponent(x: i64) -> i32 {
    i32::try_from(x).expect("intersection number exceeds exponent range")
}

/// Pairing data plus signs and types, indexed like the tables.
struct Data {
    tables: PairingTables,
    eps: Vec<i64>,
    ty: Vec<usize>,
}

impl Data {
    fn new(d: &LongDiagram) -> Self {
        let tables = crate::surface::pairing_tables(d);
        let chords: Vec<_> = d.chords().collect();
        Self {
            eps: chords.iter().map(|c| c.sign.value()).collect(),
            ty: chords.iter().map(|c| c.crossing_type().index()).collect(),
            tables,
        }
    }

    fn indices(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.eps.len()).filter(move |&i| self.ty[i] == a)
    }

    fn omega(&self, a: usize) -> i64 {
        self.indices(a).map(|i| self.eps[i]).sum()
    }

    fn writhe(&self, a: usize) -> LaurentPoly {
        let mut acc = TermAccumulator::new();
        for i in self.indices(a) {
            acc.add_shifted(exponent(self.tables.alpha_beta[i][i]), self.eps[i]);
        }
        acc.finish()
    }

    fn raw(&self, kind: Kind, a: usize, b: usize) -> LaurentPoly {
        let m = match kind {
            Kind::F => &self.tables.alpha_alpha,
            Kind::G => &self.tables.alpha_beta,
            Kind::H => &self.tables.beta_beta,
        };
        let mut acc = TermAccumulator::new();
        for i in self.indices(a) {
            for j in self.indices(b) {
                acc.add_shifted(exponent(m[i][j]), self.eps[i] * self.eps[j]);
            }
        }
        acc.finish()
    }

    fn corrected(&self, kind: Kind, a: usize, b: usize) -> LaurentPoly {
        let raw = self.raw(kind, a, b);
        match kind {
            Kind::F => raw,
            Kind::G => raw - self.writhe(a).scale(self.omega(b)),
            Kind::H => {
                raw - self.writhe(b).scale(self.omega(a)) - self.writhe(a).invert_var().scale(self.omega(b))
            }
        }
    }
}

/// `W_a`: signed sum of `t^(alpha_i . beta_i) - 1` over type-`a` crossings.
pub fn writhe_polynomial(d: &LongDiagram, a: usize) -> LaurentPoly {
    Data::new(d).writhe(a)
}

/// The uncorrected double sums `f_ab`, `g_ab`, `h_ab`.
pub fn raw_sum(d: &LongDiagram, kind: Kind, a: usize, b: usize) -> LaurentPoly {
    Data::new(d).raw(kind, a, b)
}

/// `F_ab`, `G_ab` or `H_ab`, with the writhe corrections applied.
pub fn intersection_polynomial(d: &LongDiagram, kind: Kind, a: usize, b: usize) -> LaurentPoly {
    Data::new(d).corrected(kind, a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tilde {
    pub w: LaurentPoly,
    pub f: LaurentPoly,
    pub g: LaurentPoly,
    pub h: LaurentPoly,
}

pub fn tilde_invariants(d: &LongDiagram) -> Tilde {
    let r = full_report(d).expect("report checks");
    Tilde { w: r.tilde_w, f: r.tilde_f, g: r.tilde_g, h: r.tilde_h }
}

fn tilde_of(x: &[[LaurentPoly; 2]; 2]) -> LaurentPoly {
    &(&x[0][0] - &x[0][1]) - &(&x[1][0] - &x[1][1])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantReport {
    pub w: [LaurentPoly; 2],
    pub f: [[LaurentPoly; 2]; 2],
    pub g: [[LaurentPoly; 2]; 2],
    pub h: [[LaurentPoly; 2]; 2],
    pub tilde_w: LaurentPoly,
    pub tilde_f: LaurentPoly,
    pub tilde_g: LaurentPoly,
    pub tilde_h: LaurentPoly,
    pub omega: [i64; 2],
}

pub fn full_report(d: &LongDiagram) -> Result<InvariantReport, InvariantError> {
    let data = Data::new(d);
    let grid = |kind| {
        [
            [data.corrected(kind, 0, 0), data.corrected(kind, 0, 1)],
            [data.corrected(kind, 1, 0), data.corrected(kind, 1, 1)],
        ]
    };
    let w = [data.writhe(0), data.writhe(1)];
    let (f, g, h) = (grid(Kind::F), grid(Kind::G), grid(Kind::H));
    let report = InvariantReport {
        tilde_w: &w[0] - &w[1],
        tilde_f: tilde_of(&f),
        tilde_g: tilde_of(&g),
        tilde_h: tilde_of(&h),
        w,
        f,
        g,
        h,
        omega: [data.omega(0), data.omega(1)],
    };
    report.check()?;
    Ok(report)
}

impl InvariantReport {
    pub fn x(&self, kind: Kind, a: usize, b: usize) -> &LaurentPoly {
        match kind {
            Kind::F => &self.f[a][b],
            Kind::G => &self.g[a][b],
            Kind::H => &self.h[a][b],
        }
    }

    pub fn tilde(&self, kind: Kind) -> &LaurentPoly {
        match kind {
            Kind::F => &self.tilde_f,
            Kind::G => &self.tilde_g,
            Kind::H => &self.tilde_h,
        }
    }

    /// All polynomials in report order: W0, W1, F00..F11, G00..G11,
    /// H00..H11, then the four tilde combinations.
    pub fn polynomials(&self) -> Vec<(String, &LaurentPoly)> {
        let mut out = vec![("W0".to_string(), &self.w[0]), ("W1".to_string(), &self.w[1])];
        for kind in Kind::ALL {
            for a in 0..2 {
                for b in 0..2 {
                    out.push((format!("{}{a}{b}", kind.letter()), self.x(kind, a, b)));
                }
            }
        }
        out.push(("Wtilde".into(), &self.tilde_w));
        out.push(("Ftilde".into(), &self.tilde_f));
        out.push(("Gtilde".into(), &self.tilde_g));
        out.push(("Htilde".into(), &self.tilde_h));
        out
    }

    /// Equality of every knot invariant; the writhes are diagram data and
    /// are not compared.
    pub fn same_invariants(&self, other: &Self) -> bool {
        self.w == other.w && self.f == other.f && self.g == other.g && self.h == other.h
    }

    /// First polynomial slot where two reports differ.
    pub fn first_difference(&self, other: &Self) -> Option<(String, LaurentPoly, LaurentPoly)> {
        self.polynomials()
            .into_iter()
            .zip(other.polynomials())
            .find(|((_, p), (_, q))| p != q)
            .map(|((name, p), (_, q))| (name, p.clone(), q.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.polynomials().iter().all(|(_, p)| p.is_zero())
    }

    /// The reciprocity relations between the diagonal and mixed slots.
    pub fn reciprocity_holds(&self) -> bool {
        self.f[0][0].is_reciprocal()
            && self.f[1][1].is_reciprocal()
            && self.h[0][0].is_reciprocal()
            && self.h[1][1].is_reciprocal()
            && self.f[0][1] == self.f[1][0].invert_var()
            && self.h[0][1] == self.h[1][0].invert_var()
    }

    pub fn check(&self) -> Result<(), InvariantError> {
        for (name, p) in self.polynomials() {
            if !num_traits::Zero::is_zero(&p.eval_at_one()) {
                return Err(InvariantError::Inconsistent(format!("{name} does not vanish at t = 1")));
            }
        }
        if !self.reciprocity_holds() {
            return Err(InvariantError::Inconsistent("reciprocity relations fail".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut polys = serde_json::Map::new();
        for (name, p) in self.polynomials() {
            polys.insert(name, json!(p.to_string()));
        }
        json!({
            "schema": REPORT_SCHEMA,
            "omega": self.omega,
            "polynomials": polys,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "omega0 = {}", self.omega[0]);
        let _ = writeln!(out, "omega1 = {}", self.omega[1]);
        for (name, p) in self.polynomials() {
            let _ = writeln!(out, "{name} = {p}");
        }
        out
    }

    /// An `align*` block with one line per polynomial.
    pub fn to_latex(&self) -> String {
        let mut lines = vec![
            format!(r"W_0(K;t) &= {}", self.w[0].to_latex()),
            format!(r"W_1(K;t) &= {}", self.w[1].to_latex()),
        ];
        for kind in Kind::ALL {
            for a in 0..2 {
                for b in 0..2 {
                    lines.push(format!(r"{}_{{{a}{b}}}(K;t) &= {}", kind.letter(), self.x(kind, a, b).to_latex()));
                }
            }
        }
        lines.push(format!(r"\widetilde{{W}}(K;t) &= {}", self.tilde_w.to_latex()));
        for kind in Kind::ALL {
            lines.push(format!(r"\widetilde{{{}}}(K;t) &= {}", kind.letter(), self.tilde(kind).to_latex()));
        }
        format!("\\begin{{align*}}\n{}\n\\end{{align*}}\n", lines.join(", \\\\\n"))
    }
}

/// Writhe polynomial and the first and second intersection polynomials of
/// a closed virtual knot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedInvariants {
    pub writhe: LaurentPoly,
    pub first: LaurentPoly,
    pub second: LaurentPoly,
}

impl ClosedInvariants {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "W": self.writhe.to_string(),
            "I": self.first.to_string(),
            "II": self.second.to_string(),
        })
    }
}

/// Computed on the surface of the closed diagram, with the loops from
/// over- to under-passage at each crossing.
pub fn closed_invariants(d: &ClosedDiagram) -> ClosedInvariants {
    let graph = RibbonGraph::from_closed(d);
    let labels = graph.labels();
    let eps: Vec<i64> = d.chords().map(|c| c.sign.value()).collect();
    let (gammas, gbars): (Vec<_>, Vec<_>) = labels
        .iter()
        .map(|&l| graph.closed_cycles(l).expect("label of this graph"))
        .unzip();
    let pair = |x, y| exponent(graph.pair(x, y).expect("walks of one graph"));
    let n = labels.len();
    let omega = d.writhe();

    let mut w = TermAccumulator::new();
    for i in 0..n {
        w.add_shifted(pair(&gammas[i], &gbars[i]), eps[i]);
    }
    let w = w.finish();

    let mut first = TermAccumulator::new();
    let mut second = TermAccumulator::new();
    for i in 0..n {
        for j in 0..n {
            let e = eps[i] * eps[j];
            first.add_shifted(pair(&gammas[i], &gbars[j]), e);
            second.add_shifted(pair(&gammas[i], &gammas[j]), e);
            second.add_shifted(pair(&gbars[i], &gbars[j]), e);
        }
    }
    let first = first.finish() - w.scale(omega);
    let second = second.finish() - (&w + &w.invert_var()).scale(omega);
    ClosedInvariants { writhe: w, first, second }
}

pub fn closed_writhe_polynomial(d: &ClosedDiagram) -> LaurentPoly {
    closed_invariants(d).writhe
}

pub fn closed_first(d: &ClosedDiagram) -> LaurentPoly {
    closed_invariants(d).first
}

pub fn closed_second(d: &ClosedDiagram) -> LaurentPoly {
    closed_invariants(d).second
}

/// The closed-knot polynomials of the closure, expressed through the long
/// invariants.
pub fn closure_from_long(r: &InvariantReport) -> ClosedInvariants {
    let inv = LaurentPoly::invert_var;
    let writhe = &r.w[0] + &inv(&r.w[1]);
    let first = &(&r.f[0][1] + &r.g[0][0]) + &(&inv(&r.g[1][1]) + &inv(&r.h[0][1]));
    let second = [
        r.f[0][0].clone(),
        r.f[1][1].clone(),
        r.g[0][1].clone(),
        inv(&r.g[0][1]),
        r.g[1][0].clone(),
        inv(&r.g[1][0]),
        r.h[0][0].clone(),
        r.h[1][1].clone(),
    ]
    .into_iter()
    .sum();
    ClosedInvariants { writhe, first, second }
}

/// Outcome of the five identities among first and second derivatives at
/// `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivativeChecks {
    pub writhe: bool,
    pub g_diagonal: bool,
    pub g_mixed: bool,
    pub f_equals_h: bool,
    pub second_order: bool,
}

impl DerivativeChecks {
    pub fn from_report(r: &InvariantReport) -> Self {
        let d1 = |p: &LaurentPoly| p.derivative_at_one(1).expect("order 1");
        let d2 = |p: &LaurentPoly| p.derivative_at_one(2).expect("order 2");
        let zero = num_bigint::BigInt::from(0);
        let second = d2(&r.f[0][0]) + d2(&r.f[1][1]) + d2(&r.h[0][0]) + d2(&r.h[1][1]);
        Self {
            writhe: d1(&r.w[0]) == d1(&r.w[1]),
            g_diagonal: d1(&r.g[0][0]) == zero && d1(&r.g[1][1]) == zero,
            g_mixed: d1(&r.g[0][1]) + d1(&r.g[1][0]) == zero,
            f_equals_h: d1(&r.f[0][1]) == d1(&r.h[0][1]) && d1(&r.f[1][0]) == d1(&r.h[1][0]),
            second_order: second % 4 == zero,
        }
    }

    pub fn all(&self) -> bool {
        self.writhe && self.g_diagonal && self.g_mixed && self.f_equals_h && self.second_order
    }

    pub fn as_array(&self) -> [bool; 5] {
        [self.writhe, self.g_diagonal, self.g_mixed, self.f_equals_h, self.second_order]
    }
}

pub fn check_derivative_identities(d: &LongDiagram) -> Result<DerivativeChecks, InvariantError> {
    Ok(DerivativeChecks::from_report(&full_report(d)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{k_family, kprime_family};

    fn d(s: &str) -> LongDiagram {
        LongDiagram::parse(s).unwrap()
    }

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn small_writhe_examples() {
        let k = d("O1+ O2+ U1+ U2+");
        assert_eq!(writhe_polynomial(&k, 0), p("t - 2 + t^-1"));
        assert!(writhe_polynomial(&k, 1).is_zero());
        assert!(raw_sum(&d("O1+ U1+"), Kind::H, 0, 0).is_zero());
        for kind in Kind::ALL {
            assert!(raw_sum(&LongDiagram::empty(), kind, 0, 1).is_zero());
        }
    }

    #[test]
    fn k2_and_kprime2() {
        let r = full_report(&k_family(2).unwrap()).unwrap();
        assert_eq!(r.w[0], p("t^2 - 2*t + 1"));
        assert_eq!(r.f[0][0], p("-t + 2 - t^-1"));
        assert!(r.g[0][0].is_zero());
        assert_eq!(r.h[0][0], p("t^2 - 3*t + 4 - 3*t^-1 + t^-2"));
        assert_eq!(r.tilde_w, p("t^2 - 2*t + 1"));

        let r = full_report(&kprime_family(2).unwrap()).unwrap();
        assert_eq!(r.f[0][1], p("t - 1"));
        assert_eq!(r.g[0][1], p("-t^2 + t"));
        assert_eq!(r.g[1][0], p("t^2 - t"));
        assert_eq!(r.h[0][0], p("-t^2 + 2 - t^-2"));
        assert_eq!(r.h[0][1], p("-2*t^-2 + t^-1 + 3 - 2*t"));
        assert_eq!(r.h[1][1], p("-4*t + 8 - 4*t^-1"));
        let checks = DerivativeChecks::from_report(&r);
        assert!(checks.all());
        assert_eq!(r.w[0].derivative_at_one(1).unwrap(), 2.into());
    }

    #[test]
    fn flat_invariants_agree_on_family_pair() {
        for n in 2..6 {
            let a = tilde_invariants(&k_family(n).unwrap());
            let b = tilde_invariants(&kprime_family(n).unwrap());
            assert_eq!(a, b);
        }
    }

    #[test]
    fn closed_small_cases() {
        let empty = closed_invariants(&LongDiagram::empty().closure());
        assert!(empty.writhe.is_zero() && empty.first.is_zero() && empty.second.is_zero());
        let kink = closed_invariants(&d("O1- U1-").closure());
        assert!(kink.writhe.is_zero() && kink.first.is_zero() && kink.second.is_zero());
        let c = closed_invariants(&kprime_family(2).unwrap().closure());
        assert_eq!(c.writhe, p("t^2 - 3 + 2*t^-1"));
    }

    #[test]
    fn closure_matches_long_side() {
        for code in ["O1+ O2+ U1+ U2+", "O1- U2+ O3- U1- O2+ U3-", "U1+ O2- U3+ O1+ O3+ U2-"] {
            let k = d(code);
            let r = full_report(&k).unwrap();
            assert_eq!(closed_invariants(&k.closure()), closure_from_long(&r), "{code}");
        }
    }

    #[test]
    fn classical_codes_vanish() {
        for code in ["O1+ U2+ O3+ U1+ O2+ U3+", "O1- U2- O3+ U4+ O2- U1- O4+ U3+"] {
            let r = full_report(&d(code)).unwrap();
            assert!(r.is_zero(), "{code}");
        }
    }

    #[test]
    fn report_views() {
        let r = full_report(&LongDiagram::empty()).unwrap();
        assert!(r.is_zero());
        let v = r.to_json();
        assert_eq!(v["schema"], REPORT_SCHEMA);
        let keys: Vec<&String> = v["polynomials"].as_object().unwrap().keys().collect();
        assert_eq!(keys[0], "W0");
        assert_eq!(keys[2], "F00");
        assert_eq!(keys[14], "Wtilde");
        let tex = full_report(&k_family(2).unwrap()).unwrap().to_latex();
        assert!(tex.contains(r"W_0(K;t) &= t^{2}-2t+1"));
    }
}
