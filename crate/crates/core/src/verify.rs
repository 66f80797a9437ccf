//! Seeded randomized suites checking the identities the invariants obey.
//! Every trial draws from its own ChaCha stream, so results do not depend
//! on scheduling; failures come back as certificates.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::families::expected_k;
use crate::gauss::{k_family, kprime_family, LongDiagram};
use crate::invariants::{closed_invariants, closure_from_long, full_report, DerivativeChecks, InvariantReport, Kind};
use crate::laurent::LaurentPoly;
use crate::moves::{
    alternating_sum, alternating_sums_all, degree_two_witness, random_diagram_with, random_walk, Certificate,
    MarkRule, MarkedDiagram, MoveEvent, Selector,
};
use crate::surface::pairing_tables;

pub const DEFAULT_MAX_CHORDS: usize = 12;
pub const WALK_STEPS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Moves,
    Symmetry,
    Product,
    CrossingChange,
    FiniteType,
    Closure,
    Derivatives,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Moves,
        Suite::Symmetry,
        Suite::Product,
        Suite::CrossingChange,
        Suite::FiniteType,
        Suite::Closure,
        Suite::Derivatives,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Moves => "moves",
            Suite::Symmetry => "symmetry",
            Suite::Product => "product",
            Suite::CrossingChange => "crossing-change",
            Suite::FiniteType => "finite-type",
            Suite::Closure => "closure",
            Suite::Derivatives => "derivatives",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub passed: usize,
    pub failures: Vec<Certificate>,
    /// Summary lines (counts, witnesses) in a fixed order.
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": "vknot.verify/1",
            "suite": self.suite.name(),
            "trials": self.trials,
            "seed": self.seed,
            "passed": self.passed,
            "ok": self.ok(),
            "notes": self.notes,
            "failures": self.failures.iter().map(Certificate::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} seed {}: {}/{} trials passed, {}\n",
            self.suite,
            self.seed,
            self.passed,
            self.trials,
            if self.ok() { "PASS" } else { "FAIL" }
        );
        for n in &self.notes {
            out.push_str(&format!("  {n}\n"));
        }
        if let Some(c) = self.failures.first() {
            out.push_str(&format!(
                "  first failure: {}\n",
                serde_json::to_string(&c.to_json()).expect("plain data")
            ));
        }
        out
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn cert(check: &str, base: &LongDiagram, slot: impl Into<String>, expected: &LaurentPoly, actual: &LaurentPoly) -> Certificate {
    Certificate {
        check: check.into(),
        base: base.to_string(),
        events: vec![],
        marks: vec![],
        slot: slot.into(),
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

fn report(d: &LongDiagram) -> Result<InvariantReport, Certificate> {
    full_report(d).map_err(|e| Certificate {
        check: "report".into(),
        base: d.to_string(),
        events: vec![],
        marks: vec![],
        slot: "internal".into(),
        expected: "consistent report".into(),
        actual: e.to_string(),
    })
}

/// Compares two polynomials, producing a certificate on mismatch.
fn expect_eq(check: &str, base: &LongDiagram, slot: &str, expected: &LaurentPoly, actual: &LaurentPoly) -> Result<(), Certificate> {
    if expected == actual {
        Ok(())
    } else {
        Err(cert(check, base, slot, expected, actual))
    }
}

fn slot_name(kind: Kind, a: usize, b: usize) -> String {
    format!("{}{a}{b}", kind.letter())
}

/// Result of one trial: pass (with optional counters) or a certificate.
type Trial = Result<Vec<(String, usize)>, Certificate>;

pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> SuiteOutcome {
    run_suite_with(suite, trials, seed, DEFAULT_MAX_CHORDS)
}

pub fn run_suite_with(suite: Suite, trials: usize, seed: u64, max_chords: usize) -> SuiteOutcome {
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            match suite {
                Suite::Moves => moves_trial(&mut rng, max_chords),
                Suite::Symmetry => symmetry_trial(&mut rng, max_chords),
                Suite::Product => product_trial(&mut rng, max_chords),
                Suite::CrossingChange => crossing_change_trial(&mut rng, max_chords),
                Suite::FiniteType => finite_type_trial(&mut rng, max_chords.min(8)),
                Suite::Closure => closure_trial(&mut rng, max_chords),
                Suite::Derivatives => derivatives_trial(&mut rng, max_chords),
            }
        })
        .collect();

    let mut failures = Vec::new();
    let mut counters: Vec<(String, usize)> = Vec::new();
    let mut passed = 0;
    for r in results {
        match r {
            Ok(counts) => {
                passed += 1;
                for (name, c) in counts {
                    match counters.iter_mut().find(|(n, _)| *n == name) {
                        Some((_, total)) => *total += c,
                        None => counters.push((name, c)),
                    }
                }
            }
            Err(c) => failures.push(c),
        }
    }
    let mut notes: Vec<String> = counters.into_iter().map(|(n, c)| format!("{n}: {c}")).collect();
    let fixed = match suite {
        Suite::Symmetry => distinctness_check(),
        Suite::FiniteType => finite_type_fixed_checks(),
        _ => Ok(vec![]),
    };
    match fixed {
        Ok(lines) => notes.extend(lines),
        Err(c) => failures.push(c),
    }
    SuiteOutcome { suite, trials, seed, passed, failures, notes }
}

fn random_base(rng: &mut ChaCha8Rng, max_chords: usize) -> LongDiagram {
    let n = rng.gen_range(0..=max_chords);
    random_diagram_with(n, rng)
}

fn moves_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let base = random_base(rng, max_chords);
    let r = report(&base)?;
    let walk = random_walk(&base, WALK_STEPS, rng.gen());
    let mut r3 = 0;
    for (step, (_, d)) in walk.iter().enumerate() {
        let s = report(d)?;
        if let Some((slot, expected, actual)) = r.first_difference(&s) {
            let mut c = cert("move invariance", &base, slot, &expected, &actual);
            c.events = walk[..=step].iter().map(|(e, _)| e.clone()).collect();
            return Err(c);
        }
    }
    for (e, _) in &walk {
        if matches!(e, MoveEvent::R3 { .. }) {
            r3 += 1;
        }
    }
    Ok(vec![("moves applied".into(), walk.len()), ("R3 moves applied".into(), r3)])
}

fn symmetry_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let d = random_base(rng, max_chords);
    let r = report(&d)?;
    let sharp = report(&d.switch_all())?;
    let rev = report(&d.reverse())?;
    let star = report(&d.mirror())?;
    for a in 0..2 {
        let b = 1 - a;
        expect_eq("switch writhe", &d, &format!("W{a}"), &-&r.w[b], &sharp.w[a])?;
        expect_eq("reverse writhe", &d, &format!("W{a}"), &r.w[b], &rev.w[a])?;
        expect_eq("mirror writhe", &d, &format!("W{a}"), &-r.w[a].invert_var(), &star.w[a])?;
    }
    for kind in Kind::ALL {
        for a in 0..2 {
            for b in 0..2 {
                let slot = slot_name(kind, a, b);
                let swapped = r.x(kind, 1 - a, 1 - b);
                expect_eq("switch", &d, &slot, swapped, sharp.x(kind, a, b))?;
                expect_eq("reverse", &d, &slot, swapped, rev.x(kind, a, b))?;
                expect_eq("mirror", &d, &slot, &r.x(kind, a, b).invert_var(), star.x(kind, a, b))?;
            }
        }
    }
    if pairing_tables(&d.mirror()) != pairing_tables(&d).negated() {
        return Err(cert("mirror pairing", &d, "tables", &LaurentPoly::zero(), &LaurentPoly::one()));
    }
    Ok(vec![])
}

/// The eight writhe polynomials `+-W_a(t^(+-1))` of the all-positive family
/// member are pairwise distinct for `n = 2..=8`.
pub fn distinctness_check() -> Result<Vec<String>, Certificate> {
    for n in 2..=8 {
        let d = kprime_family(n).expect("n >= 2");
        let r = report(&d)?;
        let mut eight = Vec::new();
        for w in &r.w {
            for p in [w.clone(), w.invert_var()] {
                eight.push(-&p);
                eight.push(p);
            }
        }
        for i in 0..8 {
            for j in i + 1..8 {
                if eight[i] == eight[j] {
                    return Err(cert("eight writhe polynomials distinct", &d, format!("{i},{j}"), &eight[i], &eight[j]));
                }
            }
        }
    }
    Ok(vec!["eight symmetric writhe polynomials distinct for n = 2..8".into()])
}

fn product_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let d = random_base(rng, max_chords / 2 + 1);
    let e = random_base(rng, max_chords / 2 + 1);
    let p = d.product(&e);
    let (r, s, q) = (report(&d)?, report(&e)?, report(&p)?);
    for a in 0..2 {
        expect_eq("product writhe", &p, &format!("W{a}"), &(&r.w[a] + &s.w[a]), &q.w[a])?;
    }
    for kind in Kind::ALL {
        for a in 0..2 {
            for b in 0..2 {
                let mut expected = r.x(kind, a, b) + s.x(kind, a, b);
                if kind == Kind::H {
                    expected += &(&r.w[a].invert_var() * &s.w[b]);
                    expected += &(&s.w[a].invert_var() * &r.w[b]);
                }
                expect_eq("product", &p, &slot_name(kind, a, b), &expected, q.x(kind, a, b))?;
            }
        }
    }
    // block structure of the tables
    let (t, u, pt) = (pairing_tables(&d), pairing_tables(&e), pairing_tables(&p));
    let n = t.len();
    let m = n + u.len();
    let bad = |what: &str| Err(cert(what, &p, "tables", &LaurentPoly::zero(), &LaurentPoly::one()));
    for i in 0..m {
        for j in 0..m {
            let (a, b, c) = (pt.alpha_alpha[i][j], pt.alpha_beta[i][j], pt.beta_beta[i][j]);
            let expected = match (i < n, j < n) {
                (true, true) => (t.alpha_alpha[i][j], t.alpha_beta[i][j], t.beta_beta[i][j]),
                (false, false) => {
                    let (x, y) = (i - n, j - n);
                    (u.alpha_alpha[x][y], u.alpha_beta[x][y], u.beta_beta[x][y])
                }
                (true, false) => {
                    let y = j - n;
                    (0, t.alpha_beta[i][i], -t.alpha_beta[i][i] + u.alpha_beta[y][y])
                }
                (false, true) => {
                    let x = i - n;
                    (0, u.alpha_beta[x][x], -u.alpha_beta[x][x] + t.alpha_beta[j][j])
                }
            };
            if (a, b, c) != expected {
                return bad("product block structure");
            }
        }
    }
    Ok(vec![])
}

fn crossing_change_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let n = rng.gen_range(1..=max_chords.max(1));
    let d = random_diagram_with(n, rng);
    let label = *d.labels().choose(rng).expect("at least one chord");
    let e = d.crossing_change(label).expect("chord exists");
    let (r, s) = (report(&d)?, report(&e)?);
    expect_eq("crossing change", &d, "Wtilde", &r.tilde_w, &s.tilde_w)?;
    for kind in Kind::ALL {
        expect_eq("crossing change", &d, &format!("{}tilde", kind.letter()), r.tilde(kind), s.tilde(kind))?;
    }
    let desc = report(&d.descending())?;
    let zero = LaurentPoly::zero();
    expect_eq("descending", &d, "W0", &r.tilde_w, &desc.w[0])?;
    expect_eq("descending", &d, "W1", &zero, &desc.w[1])?;
    for kind in Kind::ALL {
        for a in 0..2 {
            for b in 0..2 {
                let expected = if a == 0 && b == 0 { r.tilde(kind) } else { &zero };
                expect_eq("descending", &d, &slot_name(kind, a, b), expected, desc.x(kind, a, b))?;
            }
        }
    }
    Ok(vec![])
}

fn random_marks(rng: &mut ChaCha8Rng, d: &LongDiagram, k: usize) -> Vec<u32> {
    let mut labels = d.labels();
    labels.shuffle(rng);
    labels.truncate(k);
    labels
}

fn finite_type_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let zero = LaurentPoly::zero();
    let n = rng.gen_range(3..=max_chords.max(3));
    let d = random_diagram_with(n, rng);
    let marks = random_marks(rng, &d, 2);
    let m = MarkedDiagram::new(d.clone(), marks.clone(), MarkRule::CrossingChange).expect("valid marks");
    for a in 0..2 {
        let sum = alternating_sum(&m, Selector::Writhe(a));
        if !sum.is_zero() {
            let mut c = cert("degree one", &d, format!("W{a}"), &zero, &sum);
            c.marks = marks;
            return Err(c);
        }
    }
    let marks = random_marks(rng, &d, 3);
    let m = MarkedDiagram::new(d.clone(), marks.clone(), MarkRule::CrossingChange).expect("valid marks");
    for (sel, sum) in alternating_sums_all(&m) {
        if !sum.is_zero() {
            let mut c = cert("degree two", &d, sel.to_string(), &zero, &sum);
            c.marks = marks;
            return Err(c);
        }
    }
    Ok(vec![])
}

/// Degree witnesses and the growth of virtualization sums on the
/// families.
pub fn finite_type_fixed_checks() -> Result<Vec<String>, Certificate> {
    let mut notes = Vec::new();
    let w = degree_two_witness(4).map_err(|e| Certificate {
        check: "degree two witness".into(),
        base: String::new(),
        events: vec![],
        marks: vec![],
        slot: String::new(),
        expected: "witness".into(),
        actual: e.to_string(),
    })?;
    let f: LaurentPoly = "t - 2 + t^-1".parse().expect("literal");
    let g = -&f;
    for (sel, sum) in &w.sums {
        let Selector::X(kind, _, _) = sel else { continue };
        let expected = if *kind == Kind::F { &f } else { &g };
        expect_eq("degree two witness", w.marked.base(), &sel.to_string(), expected, sum)?;
    }
    notes.push(format!(
        "degree two witness: {} marks {:?}: F sum {}, G sum {}, H sum {}",
        w.marked.base(),
        w.marked.marks(),
        w.sum(Selector::X(Kind::F, 0, 0)).expect("slot"),
        w.sum(Selector::X(Kind::G, 0, 0)).expect("slot"),
        w.sum(Selector::X(Kind::H, 0, 0)).expect("slot"),
    ));

    // a 1-marked diagram with nonzero writhe sum
    let one = MarkedDiagram::new("O1+ O2+ U1+ U2+".parse().expect("literal"), vec![1], MarkRule::CrossingChange)
        .expect("valid marks");
    let s = alternating_sum(&one, Selector::Writhe(0));
    if s.is_zero() {
        return Err(cert("degree one witness", one.base(), "W0", &f, &s));
    }
    notes.push(format!("degree one witness: {} marks [1]: W0 sum {s}", one.base()));

    for n in 4..=8u32 {
        let check = virtualization_growth(n)?;
        notes.push(check);
    }
    Ok(notes)
}

fn binomial(n: i64, k: i64) -> i64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Virtualization sums over marks `1..=n-2` of the family members.
pub fn virtualization_growth(n: u32) -> Result<String, Certificate> {
    let marks: Vec<u32> = (1..=n - 2).collect();
    let k = k_family(n).expect("n >= 2");
    let kp = kprime_family(n).expect("n >= 2");
    let mk = MarkedDiagram::new(k.clone(), marks.clone(), MarkRule::Virtualization).expect("valid marks");
    let mkp = MarkedDiagram::new(kp.clone(), marks, MarkRule::Virtualization).expect("valid marks");

    let w0 = alternating_sum(&mk, Selector::Writhe(0));
    let mut expected = LaurentPoly::zero();
    let r = (n - 2) as i64;
    for s in 0..=r {
        let sign = if (r - s) % 2 == 0 { 1 } else { -1 };
        let w = expected_k(s as u32 + 2).swap_remove(0).1;
        expected += &w.scale(sign * binomial(r, s));
    }
    expect_eq("virtualization", &k, "W0", &expected, &w0)?;

    let n = n as i32;
    let degrees = [
        (&mk, Selector::Writhe(0), n),
        (&mk, Selector::X(Kind::F, 0, 0), n - 1),
        (&mk, Selector::X(Kind::G, 0, 0), n),
        (&mk, Selector::X(Kind::H, 0, 0), n),
        (&mkp, Selector::X(Kind::F, 0, 1), n - 1),
        (&mkp, Selector::X(Kind::G, 0, 1), n),
        (&mkp, Selector::X(Kind::H, 1, 0), n),
    ];
    for (m, sel, deg) in degrees {
        let sum = alternating_sum(m, sel);
        if sum.max_degree() != Some(deg) {
            let mut c = cert("virtualization degree", m.base(), sel.to_string(), &LaurentPoly::monomial(deg, 1), &sum);
            c.marks = m.marks().to_vec();
            return Err(c);
        }
    }
    Ok(format!("virtualization sums on n = {n}: W0 = {w0}; degrees as expected"))
}

fn closure_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let d = random_base(rng, max_chords);
    let r = report(&d)?;
    let closed = closed_invariants(&d.closure());
    let predicted = closure_from_long(&r);
    expect_eq("closure", &d, "W", &predicted.writhe, &closed.writhe)?;
    expect_eq("closure", &d, "I", &predicted.first, &closed.first)?;
    expect_eq("closure", &d, "II", &predicted.second, &closed.second)?;
    Ok(vec![])
}

fn derivatives_trial(rng: &mut ChaCha8Rng, max_chords: usize) -> Trial {
    let d = random_base(rng, max_chords);
    let checks = DerivativeChecks::from_report(&report(&d)?);
    if !checks.all() {
        return Err(Certificate {
            check: "derivative identities".into(),
            base: d.to_string(),
            events: vec![],
            marks: vec![],
            slot: format!("{:?}", checks.as_array()),
            expected: "[true, true, true, true, true]".into(),
            actual: format!("{:?}", checks.as_array()),
        });
    }
    Ok(vec![])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_runs_pass_and_repeat() {
        for s in Suite::ALL {
            let a = run_suite_with(s, 4, 11, 6);
            assert!(a.ok(), "{}", a.to_text());
            let b = run_suite_with(s, 4, 11, 6);
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 0), 1);
    }
}
