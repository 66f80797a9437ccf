//! Closed forms for the two diagram families on the curve with `n + 1`
//! crossings, used by the CLI to flag mismatches.

use crate::invariants::InvariantReport;
use crate::laurent::LaurentPoly;
use crate::surface::PairingTables;

fn poly(terms: &[(i32, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().copied())
}

/// `t^lo + ... + t^hi` (empty when `lo > hi`).
fn run(lo: i32, hi: i32) -> LaurentPoly {
    LaurentPoly::from_terms((lo..=hi).map(|k| (k, 1i64)))
}

fn sym(k: i32) -> LaurentPoly {
    poly(&[(k, 1), (-k, 1)])
}

fn constant(c: i64) -> LaurentPoly {
    poly(&[(0, c)])
}

/// Expected values in report slot order W0, W1, F00..F11, G00..G11,
/// H00..H11 for the all-type-0 family member.
pub fn expected_k(n: u32) -> Vec<(String, LaurentPoly)> {
    let n = n as i32;
    let ni = n as i64;
    let zero = LaurentPoly::zero;
    let w0 = poly(&[(n, 1), (1, -ni), (0, ni - 1)]);
    let f00 = -(1..n).map(sym).sum::<LaurentPoly>() + constant(2 * (ni - 1));
    let g00 = poly(&[(n, ni - 2), (1, ni)]) - run(1, n - 1).scale(2);
    let h00 = sym(n).scale(ni - 1) - (1..n).map(sym).sum::<LaurentPoly>() - sym(1).scale(ni * (ni - 1))
        + constant(2 * ni * (ni - 1));
    let mut out = vec![("W0".to_string(), w0), ("W1".to_string(), zero())];
    for (letter, diag) in [('F', f00), ('G', g00), ('H', h00)] {
        out.push((format!("{letter}00"), diag));
        for slot in ["01", "10", "11"] {
            out.push((format!("{letter}{slot}"), zero()));
        }
    }
    out
}

/// Expected values in report slot order for the all-positive member.
pub fn expected_kprime(n: u32) -> Vec<(String, LaurentPoly)> {
    let n = n as i32;
    let ni = n as i64;
    let zero = LaurentPoly::zero;
    let f01 = run(1, n - 1) + constant(1 - ni);
    let g01 = poly(&[(n, 1 - ni)]) + run(1, n - 1);
    let g10 = run(2, n) + poly(&[(1, 1 - ni)]);
    let h00 = poly(&[(n, -1), (0, 2), (-n, -1)]);
    let h01 = poly(&[(-n, -ni), (0, ni + 1), (1, -ni)]) + run(-(n - 1), -1);
    let h11 = poly(&[(1, 1), (0, -2), (-1, 1)]).scale(-ni * ni);
    vec![
        ("W0".into(), poly(&[(n, 1), (0, -1)])),
        ("W1".into(), poly(&[(1, ni), (0, -ni)])),
        ("F00".into(), zero()),
        ("F01".into(), f01.clone()),
        ("F10".into(), f01.invert_var()),
        ("F11".into(), zero()),
        ("G00".into(), zero()),
        ("G01".into(), g01),
        ("G10".into(), g10),
        ("G11".into(), zero()),
        ("H00".into(), h00),
        ("H01".into(), h01.clone()),
        ("H10".into(), h01.invert_var()),
        ("H11".into(), h11),
    ]
}

/// Slots where a report disagrees with expected values.
pub fn mismatches(report: &InvariantReport, expected: &[(String, LaurentPoly)]) -> Vec<String> {
    let actual = report.polynomials();
    expected
        .iter()
        .filter(|(name, p)| actual.iter().find(|(n, _)| n == name).map(|(_, q)| *q != p).unwrap_or(true))
        .map(|(name, _)| name.clone())
        .collect()
}

/// Expected pairing tables of the family curve, chords `1..=n+1`.
pub fn expected_tables(n: u32) -> PairingTables {
    let n = n as usize;
    let size = n + 1;
    let mut a = vec![vec![0i64; size]; size];
    for j in 0..n {
        a[n][j] = j as i64;
        a[j][n] = -(j as i64);
    }
    let v: Vec<i64> = (0..size).map(|i| if i < n { 1 } else { n as i64 }).collect();
    let b = (0..size).map(|i| (0..size).map(|j| v[i] - a[i][j]).collect()).collect();
    let c = (0..size).map(|i| (0..size).map(|j| -v[i] + v[j] + a[i][j]).collect()).collect();
    PairingTables {
        labels: (1..=size as u32).collect(),
        alpha_alpha: a,
        alpha_beta: b,
        beta_beta: c,
        alpha_diagram: v,
    }
}
