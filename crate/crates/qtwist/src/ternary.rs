//! Positive definite integral ternary quadratic forms: exact lattice-point
//! enumeration, canonical reduction, equivalence testing, and representation
//! counts. A coefficient tuple (a, b, c, d, e, f) stands for the form
//! ax² + by² + cz² + dyz + exz + fxy.

use crate::error::{Error, Result};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use std::fmt;

type Q128 = Ratio<i128>;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct TernaryForm {
    coeffs: [i64; 6],
}

impl fmt::Display for TernaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e, g] = self.coeffs;
        write!(f, "({a}, {b}, {c}, {d}, {e}, {g})")
    }
}

impl TernaryForm {
    pub fn new(coeffs: [i64; 6]) -> Result<Self> {
        let [a, b, _, _, _, f] = coeffs;
        let form = TernaryForm { coeffs };
        if a <= 0 || 4 * a * b - f * f <= 0 || form.disc() <= 0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(form)
    }

    pub fn coeffs(&self) -> [i64; 6] {
        self.coeffs
    }

    pub fn evaluate(&self, v: [i64; 3]) -> i64 {
        let [a, b, c, d, e, f] = self.coeffs;
        let [x, y, z] = v;
        a * x * x + b * y * y + c * z * z + d * y * z + e * x * z + f * x * y
    }

    /// Gram matrix with doubled diagonal, so evaluate(v) = v^T G v / 2.
    pub fn gram(&self) -> [[i64; 3]; 3] {
        let [a, b, c, d, e, f] = self.coeffs;
        [[2 * a, f, e], [f, 2 * b, d], [e, d, 2 * c]]
    }

    /// Associated bilinear map v^T G w = Q(v + w) - Q(v) - Q(w).
    pub fn bilinear(&self, v: [i64; 3], w: [i64; 3]) -> i64 {
        let g = self.gram();
        let mut acc = 0;
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * g[i][j] * w[j];
            }
        }
        acc
    }

    /// 4abc + def - ad² - be² - cf², which is half the Gram determinant.
    pub fn disc(&self) -> i64 {
        let [a, b, c, d, e, f] = self.coeffs;
        4 * a * b * c + d * e * f - a * d * d - b * e * e - c * f * f
    }

    fn ldl(&self) -> ([Q128; 3], [[Q128; 3]; 3]) {
        let g = self.gram();
        let mut m = [[Q128::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = Q128::new(g[i][j] as i128, 2);
            }
        }
        let mut diag = [Q128::zero(); 3];
        let mut unit = [[Q128::zero(); 3]; 3];
        for k in 0..3 {
            diag[k] = m[k][k];
            assert!(diag[k] > Q128::zero(), "form checked definite on construction");
            unit[k][k] = Q128::one();
            for j in k + 1..3 {
                unit[k][j] = m[k][j] / diag[k];
            }
            for i in k + 1..3 {
                for j in k + 1..3 {
                    let delta = m[k][i] * m[k][j] / diag[k];
                    m[i][j] = m[i][j] - delta;
                }
            }
        }
        (diag, unit)
    }

    /// Calls the visitor with every nonzero lattice vector v (both signs)
    /// satisfying Q(v) <= bound, together with the value Q(v).
    pub fn for_each_point<F: FnMut([i64; 3], i64)>(&self, bound: i64, mut f: F) {
        if bound < 1 {
            return;
        }
        let (diag, unit) = self.ldl();
        let b = Q128::from_integer(bound as i128);
        let [a0, b0, c0, d0, e0, f0] = self.coeffs.map(|c| c as i128);
        let Some((zlo, zhi)) = quad_interval(diag[2], Q128::zero(), -b) else {
            return;
        };
        for z in zlo..=zhi {
            let zq = Q128::from_integer(z);
            let shift = unit[1][2] * zq;
            let alpha = diag[1];
            let beta = Q128::from_integer(2) * diag[1] * shift;
            let gamma = diag[1] * shift * shift + diag[2] * zq * zq - b;
            let Some((ylo, yhi)) = quad_interval(alpha, beta, gamma) else {
                continue;
            };
            for y in ylo..=yhi {
                let beta_x = f0 * y + e0 * z;
                let gamma_x = b0 * y * y + c0 * z * z + d0 * y * z - bound as i128;
                let Some((xlo, xhi)) = quad_interval(
                    Q128::from_integer(a0),
                    Q128::from_integer(beta_x),
                    Q128::from_integer(gamma_x),
                ) else {
                    continue;
                };
                for x in xlo..=xhi {
                    if x == 0 && y == 0 && z == 0 {
                        continue;
                    }
                    let v = [x as i64, y as i64, z as i64];
                    f(v, self.evaluate(v));
                }
            }
        }
    }

    /// All nonzero v with Q(v) <= bound, in lexicographic order.
    pub fn points_up_to(&self, bound: i64) -> Vec<[i64; 3]> {
        let mut pts = Vec::new();
        self.for_each_point(bound, |v, _| pts.push(v));
        pts.sort_unstable();
        pts
    }

    /// Representation counts r(n) for 0 <= n <= bound, with r(0) = 1.
    pub fn representation_counts(&self, bound: i64) -> Vec<i64> {
        let mut counts = vec![0i64; bound as usize + 1];
        counts[0] = 1;
        self.for_each_point(bound, |_, n| counts[n as usize] += 1);
        counts
    }

    /// Successive minima of the form, as attained values m1 <= m2 <= m3.
    pub fn successive_minima(&self) -> [i64; 3] {
        let [a, b, c, ..] = self.coeffs;
        let cap = a.max(b).max(c);
        let pts = self.points_up_to(cap);
        let mut by_val: Vec<([i64; 3], i64)> = pts.iter().map(|&v| (v, self.evaluate(v))).collect();
        by_val.sort_unstable_by_key(|&(v, n)| (n, v));
        let mut indep: Vec<[i64; 3]> = Vec::new();
        let mut minima = [0i64; 3];
        for (v, n) in by_val {
            let mut trial = indep.clone();
            trial.push(v);
            if rank(&trial) > indep.len() {
                minima[indep.len()] = n;
                indep.push(v);
                if indep.len() == 3 {
                    break;
                }
            }
        }
        assert_eq!(minima[2] > 0, true, "unit vectors make rank 3 reachable");
        minima
    }

    /// Canonical representative of the equivalence class, together with a
    /// unimodular U such that canonical(v) = self(U v).
    pub fn reduce(&self) -> (TernaryForm, [[i64; 3]; 3]) {
        let [m1, m2, m3] = self.successive_minima();
        let pts = self.points_up_to(m3);
        let layer = |m: i64| -> Vec<[i64; 3]> {
            pts.iter().copied().filter(|&v| self.evaluate(v) == m).collect()
        };
        let (s1, s2, s3) = (layer(m1), layer(m2), layer(m3));
        let mut best: Option<([i64; 3], [[i64; 3]; 3])> = None;
        for &v1 in &s1 {
            for &v2 in &s2 {
                for &v3 in &s3 {
                    let u = [v1, v2, v3];
                    if det3(&u).abs() != 1 {
                        continue;
                    }
                    let off = [
                        self.bilinear(v2, v3),
                        self.bilinear(v1, v3),
                        self.bilinear(v1, v2),
                    ];
                    if best.as_ref().is_none_or(|(o, _)| off < *o) {
                        best = Some((off, u));
                    }
                }
            }
        }
        let (off, rows) = best.expect("minima are attained by a basis in rank 3");
        let u = transpose(&rows);
        let canonical = TernaryForm::new([m1, m2, m3, off[0], off[1], off[2]])
            .expect("equivalent form stays positive definite");
        debug_assert_eq!(compose(self, &u).coeffs, canonical.coeffs);
        (canonical, u)
    }

    /// A unimodular T with self(T v) = other(v) for all v, if the forms are
    /// equivalent.
    pub fn equivalence_to(&self, other: &TernaryForm) -> Option<[[i64; 3]; 3]> {
        let (c1, u1) = self.reduce();
        let (c2, u2) = other.reduce();
        if c1 != c2 {
            return None;
        }
        let t = mat_mul(&u1, &inv_unimodular(&u2));
        debug_assert_eq!(compose(self, &t).coeffs, other.coeffs);
        Some(t)
    }
}

/// Integer interval where alpha t² + beta t + gamma <= 0, for alpha > 0.
fn quad_interval(alpha: Q128, beta: Q128, gamma: Q128) -> Option<(i128, i128)> {
    debug_assert!(alpha > Q128::zero());
    let l = [alpha, beta, gamma]
        .iter()
        .fold(1i128, |acc, r| acc.lcm(r.denom()));
    let scale = |r: Q128| (r * Q128::from_integer(l)).to_integer();
    let (a, b, c) = (scale(alpha), scale(beta), scale(gamma));
    let disc = b * b - 4 * a * c;
    if disc < 0 {
        return None;
    }
    let r = isqrt(disc);
    let sat = |t: i128| a * t * t + b * t + c <= 0;
    let mut lo = Integer::div_ceil(&(-b - r), &(2 * a));
    let mut hi = Integer::div_floor(&(-b + r), &(2 * a));
    while sat(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !sat(lo) {
        lo += 1;
    }
    while sat(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !sat(hi) {
        hi -= 1;
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

fn isqrt(n: i128) -> i128 {
    debug_assert!(n >= 0);
    let mut x = (n as f64).sqrt() as i128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn rank(rows: &[[i64; 3]]) -> usize {
    let mut m: Vec<[i128; 3]> = rows.iter().map(|r| r.map(|x| x as i128)).collect();
    let mut rank = 0;
    for col in 0..3 {
        let Some(pivot) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let lead = m[rank][col];
        for i in rank + 1..m.len() {
            let factor = m[i][col];
            for j in 0..3 {
                m[i][j] = m[i][j] * lead - m[rank][j] * factor;
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub(crate) fn mat_mul(a: &[[i64; 3]; 3], b: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub(crate) fn transpose(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub(crate) fn inv_unimodular(m: &[[i64; 3]; 3]) -> [[i64; 3]; 3] {
    let det = det3(m);
    assert!(det.abs() == 1, "inverse requires determinant ±1");
    let cof = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let minor = m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]];
        if (r + c) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = cof(j, i) * det;
        }
    }
    out
}

/// The form v -> q(U v).
pub(crate) fn compose(q: &TernaryForm, u: &[[i64; 3]; 3]) -> TernaryForm {
    let g = q.gram();
    let gu = mat_mul(&g, u);
    let new_gram = mat_mul(&transpose(u), &gu);
    TernaryForm::new([
        new_gram[0][0] / 2,
        new_gram[1][1] / 2,
        new_gram[2][2] / 2,
        new_gram[1][2],
        new_gram[0][2],
        new_gram[0][1],
    ])
    .expect("unimodular image of a definite form is definite")
}
