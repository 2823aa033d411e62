//! The central-value formula: admissible twist discriminants are graded by
//! their splitting pattern at the level primes, and each family carries a
//! proportionality constant k with L(f, D, 1) = star(D) * k * c(|D|)^2 / sqrt|D|.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::lift::assemble;
use crate::numbers::{is_fundamental_discriminant, is_prime, kronecker, type_pattern};

/// One family of twist discriminants sharing a theta lift.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub name: String,
    /// Sign of the discriminants in the family (+1 real, -1 imaginary).
    pub sign: i64,
    /// Splitting pattern at the level primes mapped to the star factor.
    pub star: Vec<(String, i64)>,
    /// Signed auxiliary discriminant (±1, or a prime ≡ 1 mod 4 up to sign).
    pub aux: i64,
    /// Required kronecker values of the auxiliary discriminant.
    pub aux_conditions: Vec<(i64, i32)>,
    /// Primes whose rank-one character weights the theta series.
    pub second_kind: Vec<i64>,
    /// Rational scale applied to the eigenvector combination.
    pub scale: Ratio<i64>,
    /// Proportionality constant of the central-value formula.
    pub k: f64,
    /// Optional closed form k = coeff * L(f, d, 1).
    pub identity: Option<(Ratio<i64>, i64)>,
}

impl Family {
    pub fn star_factor(&self, pattern: &str) -> Option<i64> {
        self.star
            .iter()
            .find(|(p, _)| p == pattern)
            .map(|&(_, s)| s)
    }

    /// Fundamental, of the family's sign, with a recognized splitting pattern.
    pub fn is_admissible(&self, d: i64, level_primes: &[i64]) -> bool {
        is_fundamental_discriminant(d)
            && d.signum() == self.sign
            && self
                .star_factor(&type_pattern(d, level_primes))
                .is_some()
    }

    /// star(D) * k * c^2 / sqrt|D| for an admissible discriminant.
    pub fn central_value(&self, d: i64, coeff: i64, level_primes: &[i64]) -> Result<f64> {
        let star = self
            .star_factor(&type_pattern(d, level_primes))
            .ok_or_else(|| Error::Inadmissible {
                d,
                family: self.name.clone(),
            })?;
        Ok(star as f64 * self.k * (coeff * coeff) as f64 / (d.abs() as f64).sqrt())
    }
}

/// Sign of the functional equation of the twist by a fundamental discriminant
/// coprime to squareful level primes. `atkin_lehner` maps each maximal prime
/// power q || level to its eigenvalue.
pub fn twist_sign(
    curve_sign: i64,
    atkin_lehner: &[(i64, i64)],
    level: i64,
    d: i64,
) -> Result<i64> {
    assert!(level % 2 == 1, "only odd levels are handled");
    let mut sign = curve_sign * d.signum();
    let mut m = level;
    let mut p = 3;
    while m > 1 {
        while m % p != 0 {
            p += 2;
        }
        let mut e = 0u32;
        let mut q = 1i64;
        while m % p == 0 {
            m /= p;
            e += 1;
            q *= p;
        }
        if d % p != 0 {
            sign *= (kronecker(d, p) as i64).pow(e);
        } else if e == 1 {
            let w = atkin_lehner
                .iter()
                .find(|&&(qq, _)| qq == q)
                .map(|&(_, w)| w)
                .ok_or(Error::Mismatch(format!(
                    "missing atkin-lehner eigenvalue at {q}"
                )))?;
            sign *= w;
        } else {
            return Err(Error::UnsupportedGcd { d, level });
        }
    }
    Ok(sign)
}

/// Smallest prime l, coprime to twice the level, such that d = -sign * l is a
/// fundamental discriminant satisfying the kronecker conditions and the
/// oracle reports a nonvanishing central value.
pub fn find_auxiliary_discriminant(
    family_sign: i64,
    conditions: &[(i64, i32)],
    level: i64,
    mut central: impl FnMut(i64) -> Result<f64>,
    bound: i64,
) -> Result<i64> {
    let mut l = 3;
    while l <= bound {
        if is_prime(l) && (2 * level) % l != 0 {
            let d = -family_sign * l;
            if d.rem_euclid(4) == 1
                && conditions.iter().all(|&(p, v)| kronecker(d, p) == v)
                && central(d)?.abs() > 1e-3
            {
                return Ok(d);
            }
        }
        l += 2;
    }
    Err(Error::NoAuxiliaryPrime { bound })
}

/// A discriminant with its star factor and independently computed central
/// value, used to pin down the per-class signs.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationProbe {
    pub d: i64,
    pub star: i64,
    pub l_value: f64,
}

#[derive(Debug, Clone)]
pub struct CalibrationOutcome {
    pub signs: Vec<i64>,
    pub k: f64,
    pub relative_spread: f64,
    pub nonzero_probes: usize,
}

/// Central values below this are treated as vanishing.
pub const NONZERO_L: f64 = 1e-3;
/// Largest tolerated relative spread of the probe ratios.
pub const SPREAD_TOL: f64 = 1e-6;

/// Searches per-class signs (first class with nonzero eigenvector entry fixed
/// to +1) so that sqrt|D| * L / (star * c^2) is constant over the probes and
/// vanishing coefficients match vanishing central values. Returns the unique
/// surviving assignment with the fitted constant.
pub fn calibrate(
    thetas: &[Vec<i64>],
    eigenvector: &[i64],
    scale: Ratio<i64>,
    probes: &[CalibrationProbe],
    need: usize,
) -> Result<CalibrationOutcome> {
    let mut winners = calibrate_all(thetas, eigenvector, scale, probes, need)?;
    match winners.len() {
        0 => Err(Error::Calibration(
            "no sign assignment makes the probe ratios constant",
        )),
        1 => Ok(winners.pop().unwrap().0),
        _ => Err(Error::Calibration(
            "multiple sign assignments fit the probes",
        )),
    }
}

/// All sign assignments surviving the probe test, each with its assembled
/// series; assignments producing the same series are reported once. When the
/// space the eigenform lives in has extra multiplicity, several genuinely
/// different series can survive, and some outside datum must pick one.
pub fn calibrate_all(
    thetas: &[Vec<i64>],
    eigenvector: &[i64],
    scale: Ratio<i64>,
    probes: &[CalibrationProbe],
    need: usize,
) -> Result<Vec<(CalibrationOutcome, Vec<i64>)>> {
    let strong = probes
        .iter()
        .filter(|p| p.l_value.abs() > NONZERO_L)
        .count();
    if strong < need {
        return Err(Error::TooFewProbes {
            need,
            found: strong,
        });
    }
    let free: Vec<usize> = (0..eigenvector.len())
        .filter(|&i| eigenvector[i] != 0)
        .collect();
    assert!(!free.is_empty(), "eigenvector is zero");
    // Distinct sign masks can assemble to the same series when classes repeat
    // a form, so winners are deduplicated by the series itself.
    let mut winners: Vec<(CalibrationOutcome, Vec<i64>)> = Vec::new();
    for mask in 0u32..1 << (free.len() - 1) {
        let mut signs = vec![1i64; eigenvector.len()];
        for (bit, &idx) in free[1..].iter().enumerate() {
            if mask >> bit & 1 == 1 {
                signs[idx] = -1;
            }
        }
        let Ok(coeffs) = assemble(thetas, eigenvector, &signs, scale) else {
            continue;
        };
        let mut ratios = Vec::new();
        let mut coherent = true;
        for probe in probes {
            let c = coeffs[probe.d.unsigned_abs() as usize];
            let vanishing = probe.l_value.abs() <= NONZERO_L;
            if (c == 0) != vanishing {
                coherent = false;
                break;
            }
            if c != 0 {
                let ratio = (probe.d.abs() as f64).sqrt() * probe.l_value
                    / ((probe.star * c * c) as f64);
                ratios.push(ratio);
            }
        }
        if !coherent || ratios.len() < need {
            continue;
        }
        let (k, spread) = fit_constant(&ratios);
        if k > 0.0 && spread < SPREAD_TOL && !winners.iter().any(|(_, c)| *c == coeffs) {
            winners.push((
                CalibrationOutcome {
                    signs,
                    k,
                    relative_spread: spread,
                    nonzero_probes: ratios.len(),
                },
                coeffs,
            ));
        }
    }
    Ok(winners)
}

/// Median of the ratios and the largest relative deviation from it.
pub fn fit_constant(ratios: &[f64]) -> (f64, f64) {
    assert!(!ratios.is_empty());
    let mut sorted = ratios.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    let spread = sorted
        .iter()
        .map(|r| (r - median).abs() / median.abs())
        .fold(0.0f64, f64::max);
    (median, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::weighted_theta;
    use crate::lseries::CurveOracle;
    use crate::ternary::TernaryForm;
    use crate::weights::ClassWeights;

    fn g17_family() -> Family {
        Family {
            name: "g17".into(),
            sign: -1,
            star: vec![
                ("+-".into(), 1),
                ("+0".into(), 2),
                ("0-".into(), 2),
                ("00".into(), 4),
            ],
            aux: 17,
            aux_conditions: vec![(3, -1), (5, -1)],
            second_kind: vec![],
            scale: Ratio::new(1, 2),
            k: 0.1995302777664729,
            identity: None,
        }
    }

    #[test]
    fn star_factors_follow_the_splitting_pattern() {
        let fam = g17_family();
        assert_eq!(fam.star_factor(&type_pattern(-68, &[3, 5])), Some(1));
        assert_eq!(fam.star_factor(&type_pattern(-20, &[3, 5])), Some(2));
        assert_eq!(fam.star_factor(&type_pattern(-15, &[3, 5])), Some(4));
        assert_eq!(fam.star_factor(&type_pattern(-23, &[3, 5])), Some(1));
        assert_eq!(fam.star_factor(&type_pattern(-4, &[3, 5])), None);
        assert!(fam.is_admissible(-68, &[3, 5]));
        assert!(!fam.is_admissible(-67, &[3, 5]));
        assert!(!fam.is_admissible(68, &[3, 5]));
        assert!(!fam.is_admissible(-72, &[3, 5]));
    }

    #[test]
    fn twist_signs_track_the_functional_equation() {
        // level 27, curve sign +1
        assert_eq!(twist_sign(1, &[(27, -1)], 27, -4).unwrap(), 1);
        assert_eq!(twist_sign(1, &[(27, -1)], 27, 5).unwrap(), -1);
        assert_eq!(twist_sign(1, &[(27, -1)], 27, -7).unwrap(), 1);
        assert!(matches!(
            twist_sign(1, &[(27, -1)], 27, -3),
            Err(Error::UnsupportedGcd { .. })
        ));
        // level 15, W3 = +1, W5 = -1
        let al = [(3, 1), (5, -1)];
        assert_eq!(twist_sign(1, &al, 15, -20).unwrap(), 1);
        assert_eq!(twist_sign(1, &al, 15, -15).unwrap(), 1);
        assert_eq!(twist_sign(1, &al, 15, -7).unwrap(), -1);
        // level 75 rejects discriminants sharing the squareful prime
        assert!(matches!(
            twist_sign(1, &[(3, 1), (25, -1)], 75, -20),
            Err(Error::UnsupportedGcd { .. })
        ));
    }

    #[test]
    fn auxiliary_search_recovers_known_discriminants() {
        let oracle = CurveOracle::new([0, 0, 1, 0, -7], 27, 1);
        let d = find_auxiliary_discriminant(
            1,
            &[(3, -1)],
            27,
            |d| oracle.l_value(d),
            100,
        )
        .unwrap();
        assert_eq!(d, -7);

        let oracle = CurveOracle::new([1, 1, 1, -10, -10], 15, 1);
        let d = find_auxiliary_discriminant(
            -1,
            &[(3, -1), (5, -1)],
            15,
            |d| oracle.l_value(d),
            100,
        )
        .unwrap();
        assert_eq!(d, 17);
    }

    #[test]
    fn auxiliary_search_reports_exhaustion() {
        assert!(matches!(
            find_auxiliary_discriminant(1, &[(3, 0)], 27, |_| Ok(1.0), 50),
            Err(Error::NoAuxiliaryPrime { bound: 50 })
        ));
    }

    fn real_thetas(n_max: usize) -> Vec<Vec<i64>> {
        [[4, 27, 28, 0, -4, 0], [7, 16, 31, 16, 2, 4]]
            .iter()
            .map(|&q| {
                let form = TernaryForm::new(q).unwrap();
                let w = ClassWeights::new(&form, -7, &[3]).unwrap();
                weighted_theta(&form, &w, n_max)
            })
            .collect()
    }

    #[test]
    fn calibration_recovers_planted_signs() {
        let thetas = real_thetas(40);
        let scale = Ratio::from_integer(1);
        let truth = assemble(&thetas, &[1, -1], &[1, 1], scale).unwrap();
        let k = 0.5888795834284833;
        let probes: Vec<CalibrationProbe> = [1i64, 13, 37, 40]
            .iter()
            .map(|&d| CalibrationProbe {
                d,
                star: 1,
                l_value: k * (truth[d as usize].pow(2)) as f64 / (d as f64).sqrt(),
            })
            .collect();
        let out = calibrate(&thetas, &[1, -1], scale, &probes, 3).unwrap();
        assert_eq!(out.signs, vec![1, 1]);
        assert!((out.k - k).abs() / k < 1e-9);
        assert_eq!(out.nonzero_probes, 4);
    }

    #[test]
    fn calibration_rejects_incoherent_probes() {
        let thetas = real_thetas(40);
        let scale = Ratio::from_integer(1);
        let truth = assemble(&thetas, &[1, -1], &[1, 1], scale).unwrap();
        let k = 0.5888795834284833;
        let mut probes: Vec<CalibrationProbe> = [1i64, 13, 37]
            .iter()
            .map(|&d| CalibrationProbe {
                d,
                star: 1,
                l_value: k * (truth[d as usize].pow(2)) as f64 / (d as f64).sqrt(),
            })
            .collect();
        // a vanishing central value where the coefficient is nonzero
        probes.push(CalibrationProbe {
            d: 40,
            star: 1,
            l_value: 0.0,
        });
        assert!(matches!(
            calibrate(&thetas, &[1, -1], scale, &probes, 3),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn calibration_needs_enough_nonzero_probes() {
        let thetas = real_thetas(40);
        let probes = [CalibrationProbe {
            d: 1,
            star: 1,
            l_value: 0.5,
        }];
        assert!(matches!(
            calibrate(&thetas, &[1, -1], Ratio::from_integer(1), &probes, 3),
            Err(Error::TooFewProbes { need: 3, found: 1 })
        ));
    }

    #[test]
    fn central_value_uses_the_star_factor() {
        let fam = g17_family();
        let l = fam.central_value(-20, 2, &[3, 5]).unwrap();
        let expected = 2.0 * fam.k * 4.0 / 20f64.sqrt();
        assert!((l - expected).abs() < 1e-12);
        assert!(matches!(
            fam.central_value(-4, 1, &[3, 5]),
            Err(Error::Inadmissible { .. })
        ));
    }
}
