//! Weighted theta series of ternary class forms and their assembly into a
//! single eigenform whose coefficients feed the central-value formula.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ternary::TernaryForm;
use crate::weights::ClassWeights;

/// t[n] = (1/2) Σ_{Q(v) = l·n} w(v) for n ≤ n_max, where l is the index
/// divisor of the weight data. Entry 0 is always 0.
pub fn weighted_theta(form: &TernaryForm, weights: &ClassWeights, n_max: usize) -> Vec<i64> {
    let l = weights.index_divisor();
    let bound = l * n_max as i64;
    let mut acc = vec![0i64; n_max + 1];
    form.for_each_point(bound, |v, value| {
        if value % l == 0 {
            let n = (value / l) as usize;
            if n >= 1 && n <= n_max {
                acc[n] += weights.weight(v);
            }
        }
    });
    assert!(
        acc.iter().all(|a| a % 2 == 0),
        "weighted counts must pair up under negation"
    );
    acc.iter().map(|a| a / 2).collect()
}

/// c[n] = scale · Σ_i eigenvector[i] · signs[i] · thetas[i][n], normalized so
/// the first nonzero coefficient is positive. Errors if any coefficient is
/// not an integer.
pub fn assemble(
    thetas: &[Vec<i64>],
    eigenvector: &[i64],
    signs: &[i64],
    scale: Ratio<i64>,
) -> Result<Vec<i64>> {
    assert_eq!(thetas.len(), eigenvector.len());
    assert_eq!(thetas.len(), signs.len());
    let len = thetas.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = vec![0i64; len];
    for n in 0..len {
        let raw: i64 = thetas
            .iter()
            .zip(eigenvector)
            .zip(signs)
            .map(|((t, &v), &e)| v * e * t[n])
            .sum();
        let c = Ratio::from_integer(raw) * scale;
        if !c.is_integer() {
            return Err(Error::Mismatch(format!(
                "eigenform coefficient at {n} is {c}, not an integer"
            )));
        }
        out[n] = c.to_integer();
    }
    if let Some(&first) = out.iter().find(|&&c| c != 0) {
        if first < 0 {
            for c in &mut out {
                *c = -*c;
            }
        }
    }
    Ok(out)
}

/// e[n] = Σ_i (2 / unit_halves[i]) · signs[i] · thetas[i][n], normalized so
/// the first nonzero coefficient is positive.
pub fn eisenstein_combination(
    thetas: &[Vec<i64>],
    unit_halves: &[i64],
    signs: &[i64],
) -> Vec<Ratio<i64>> {
    let len = thetas.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = vec![Ratio::zero(); len];
    for n in 0..len {
        for ((t, &w), &e) in thetas.iter().zip(unit_halves).zip(signs) {
            out[n] += Ratio::new(2 * e, w) * Ratio::from_integer(t[n]);
        }
    }
    if let Some(first) = out.iter().find(|c| !c.is_zero()) {
        if *first < Ratio::zero() {
            for c in &mut out {
                *c = -c.clone();
            }
        }
    }
    out
}

/// Renders coefficients as a q-expansion like "q^4 - 2q^7 + q^13", omitting
/// zero terms and unit magnitudes, up to exponent `limit`.
pub fn format_q_expansion(coeffs: &[i64], limit: usize) -> String {
    let mut s = String::new();
    for (n, &c) in coeffs.iter().enumerate().take(limit + 1).skip(1) {
        if c == 0 {
            continue;
        }
        if s.is_empty() {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            s.push_str(&c.abs().to_string());
        }
        if n == 1 {
            s.push('q');
        } else {
            s.push_str(&format!("q^{n}"));
        }
    }
    s
}

/// Inverse of `format_q_expansion`: reads a dense coefficient vector back out
/// of a rendered expansion. The result runs up to the largest exponent used.
pub fn parse_q_expansion(text: &str) -> Result<Vec<i64>> {
    let bad = |term: &str| Error::Parse {
        line: 0,
        msg: format!("bad q-expansion term '{term}'"),
    };
    let t = text.trim();
    if t.is_empty() || t == "0" {
        return Ok(vec![0]);
    }
    let mut terms: Vec<(usize, i64)> = Vec::new();
    for raw in t.replace(" - ", " + -").split(" + ") {
        let term = raw.trim();
        let (sign, rest) = match term.strip_prefix('-') {
            Some(r) => (-1, r.trim()),
            None => (1, term),
        };
        let (coef, exp) = rest.split_once('q').ok_or_else(|| bad(term))?;
        let coef = coef.trim();
        let magnitude: i64 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| bad(term))?
        };
        let exp = exp.trim();
        let exponent: usize = if exp.is_empty() {
            1
        } else {
            exp.strip_prefix('^')
                .ok_or_else(|| bad(term))?
                .trim()
                .parse()
                .map_err(|_| bad(term))?
        };
        terms.push((exponent, sign * magnitude));
    }
    let top = terms.iter().map(|&(e, _)| e).max().unwrap();
    let mut coeffs = vec![0i64; top + 1];
    for (e, c) in terms {
        coeffs[e] += c;
    }
    Ok(coeffs)
}
