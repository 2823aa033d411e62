//! Independent oracle for central values of quadratic twists. Coefficients
//! come from counting points on the curve over prime fields, extended
//! multiplicatively; central values come from a smoothed Dirichlet series
//! truncated so that the tail stays below 1e-12.

use crate::error::{Error, Result};
use crate::numbers::{inv_mod, is_fundamental_discriminant, is_prime, kronecker};
use std::cell::RefCell;

pub struct CurveOracle {
    a: [i64; 5],
    level: i64,
    sign: i64,
    cache: RefCell<Vec<i64>>,
}

impl CurveOracle {
    /// Curve [a1, a2, a3, a4, a6] of the given conductor, together with the
    /// sign of the functional equation of its L-series.
    pub fn new(coeffs: [i64; 5], level: i64, sign: i64) -> Self {
        assert!(sign == 1 || sign == -1);
        CurveOracle {
            a: coeffs,
            level,
            sign,
            cache: RefCell::new(vec![0, 1]),
        }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// Atkin-Lehner signs (p, w_p) at the primes exactly dividing the level,
    /// where w_p = -a_p.
    pub fn atkin_lehner(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        let mut n = self.level;
        let mut p = 2;
        while n > 1 {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                if e == 1 {
                    out.push((p, -self.ap(p)));
                }
            }
            p += 1;
        }
        out
    }

    fn rhs(&self, x: i64, p: i64) -> i64 {
        let [_, a2, _, a4, a6] = self.a;
        (((x * x % p * x) + a2 * x % p * x + a4 * x + a6) % p).rem_euclid(p)
    }

    /// Points (x, y) where both partial derivatives vanish on the reduction.
    fn singular_points(&self, p: i64) -> Vec<(i64, i64)> {
        let [a1, a2, a3, a4, _] = self.a;
        let mut out = Vec::new();
        for x in 0..p {
            for y in 0..p {
                let on = (y * y + a1 * x * y + a3 * y - self.rhs(x, p)).rem_euclid(p) == 0;
                let dy = (2 * y + a1 * x + a3).rem_euclid(p) == 0;
                let dx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)).rem_euclid(p) == 0;
                if on && dy && dx {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn ap(&self, p: i64) -> i64 {
        debug_assert!(is_prime(p));
        let [a1, _, a3, _, _] = self.a;
        let bad = self.level % p == 0;
        if p == 2 {
            let mut affine = 0;
            for x in 0..2 {
                for y in 0..2 {
                    if (y * y + a1 * x * y + a3 * y - self.rhs(x, 2)).rem_euclid(2) == 0 {
                        affine += 1;
                    }
                }
            }
            return if bad {
                p - 1 - (affine - self.singular_points(p).len() as i64)
            } else {
                p - affine
            };
        }
        let mut chi = vec![-1i64; p as usize];
        chi[0] = 0;
        for t in 1..p {
            chi[(t * t % p) as usize] = 1;
        }
        let mut s = 0i64;
        for x in 0..p {
            let disc = ((a1 * x + a3) * (a1 * x + a3) + 4 * self.rhs(x, p)).rem_euclid(p);
            s += chi[disc as usize];
        }
        if !bad {
            return -s;
        }
        let half = inv_mod(2, p);
        let mut singular = 0;
        for x in 0..p {
            let y = (-(a1 * x + a3) * half).rem_euclid(p);
            let on = (y * y + a1 * x * y + a3 * y - self.rhs(x, p)).rem_euclid(p) == 0;
            let dx = (a1 * y - (3 * x * x + 2 * self.a[1] * x + self.a[3])).rem_euclid(p) == 0;
            if on && dx {
                singular += 1;
            }
        }
        -1 - s + singular
    }

    /// a(m) for 0 <= m <= max (a(0) = 0), by multiplicative extension of the
    /// prime-power recursion.
    pub fn coefficients(&self, max: usize) -> Vec<i64> {
        self.ensure(max);
        self.cache.borrow()[..=max].to_vec()
    }

    fn ensure(&self, max: usize) {
        if self.cache.borrow().len() > max {
            return;
        }
        let max = max.max(2 * (self.cache.borrow().len() - 1));
        let mut spf = vec![0usize; max + 1];
        for i in 2..=max {
            if spf[i] == 0 {
                for j in (i..=max).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                }
            }
        }
        let mut a = vec![0i64; max + 1];
        a[1] = 1;
        for m in 2..=max {
            let p = spf[m];
            let mut rest = m;
            let mut pe = 1usize;
            while rest % p == 0 {
                rest /= p;
                pe *= p;
            }
            a[m] = if pe == m {
                if pe == p {
                    self.ap(p as i64)
                } else if self.level % p as i64 == 0 {
                    a[p] * a[m / p]
                } else {
                    a[p] * a[m / p] - p as i64 * a[m / (p * p)]
                }
            } else {
                a[pe] * a[rest]
            };
        }
        *self.cache.borrow_mut() = a;
    }

    /// Conductor of the twist by a fundamental discriminant d.
    pub fn twisted_conductor(&self, d: i64) -> Result<i64> {
        let mut c = self.level * d * d;
        let mut g = crate::numbers::gcd(d.abs(), self.level);
        let mut p = 2;
        while g > 1 {
            if g % p == 0 {
                if (self.level / p) % p == 0 {
                    return Err(Error::UnsupportedGcd {
                        d,
                        level: self.level,
                    });
                }
                c /= p;
                while g % p == 0 {
                    g /= p;
                }
            }
            p += 1;
        }
        Ok(c)
    }

    /// Sign of the functional equation of the twist by d.
    pub fn twist_sign(&self, d: i64) -> Result<i64> {
        crate::waldspurger::twist_sign(self.sign, &self.atkin_lehner(), self.level, d)
    }

    /// Central value of the twist by the fundamental discriminant d. Twists
    /// with odd functional equation vanish exactly and skip the series.
    pub fn l_value(&self, d: i64) -> Result<f64> {
        if !is_fundamental_discriminant(d) {
            return Err(Error::NotFundamental(d));
        }
        if self.twist_sign(d)? == -1 {
            return Ok(0.0);
        }
        let c = self.twisted_conductor(d)?;
        Ok(self.smoothed_sum(d, c as f64))
    }

    /// 2 Σ a(m) (d|m) exp(-2πm/√C) / m, truncated where the tail drops
    /// below 1e-12.
    pub fn smoothed_sum(&self, d: i64, conductor: f64) -> f64 {
        let len = series_length(conductor);
        self.smoothed_sum_with_length(d, conductor, len)
    }

    pub fn smoothed_sum_with_length(&self, d: i64, conductor: f64, len: usize) -> f64 {
        let lambda = 2.0 * std::f64::consts::PI / conductor.sqrt();
        self.ensure(len);
        let coeffs = self.cache.borrow();
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for m in 1..=len {
            let twist = kronecker(d, m as i64);
            if twist == 0 || coeffs[m] == 0 {
                continue;
            }
            let term =
                (coeffs[m] * twist as i64) as f64 / m as f64 * (-lambda * m as f64).exp();
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        2.0 * sum
    }
}

/// Series length making 4 e^{-λ(M+1)} / (1 - e^{-λ}) < 1e-12 with
/// λ = 2π/√conductor.
pub fn series_length(conductor: f64) -> usize {
    let lambda = 2.0 * std::f64::consts::PI / conductor.sqrt();
    let rhs = 1e-12 * (1.0 - (-lambda).exp()) / 4.0;
    ((-rhs.ln() / lambda).ceil() as usize).max(16)
}
