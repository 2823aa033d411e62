//! Definite rational quaternion algebras (a, b), lattices in them, orders,
//! one-sided ideals, and Brandt matrices. Lattices are kept in Hermite normal
//! form over a common denominator, so equality is structural.

use crate::error::{Error, Result};
use crate::ternary::TernaryForm;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Vec4 = [BigRational; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
}

pub fn qint(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qvec(coords: [i64; 4]) -> Vec4 {
    coords.map(qint)
}

impl QuaternionAlgebra {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if a >= 0 || b >= 0 {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(QuaternionAlgebra { a, b })
    }

    pub fn one() -> Vec4 {
        qvec([1, 0, 0, 0])
    }

    /// Product in the basis 1, i, j, k with i² = a, j² = b, k = ij = -ji.
    pub fn mul(&self, x: &Vec4, y: &Vec4) -> Vec4 {
        let (a, b) = (qint(self.a), qint(self.b));
        let ab = &a * &b;
        [
            &x[0] * &y[0] + &a * &x[1] * &y[1] + &b * &x[2] * &y[2] - &ab * &x[3] * &y[3],
            &x[0] * &y[1] + &x[1] * &y[0] - &b * &x[2] * &y[3] + &b * &x[3] * &y[2],
            &x[0] * &y[2] + &x[2] * &y[0] + &a * &x[1] * &y[3] - &a * &x[3] * &y[1],
            &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1],
        ]
    }

    pub fn conjugate(x: &Vec4) -> Vec4 {
        [x[0].clone(), -x[1].clone(), -x[2].clone(), -x[3].clone()]
    }

    pub fn trace(x: &Vec4) -> BigRational {
        &x[0] + &x[0]
    }

    pub fn norm(&self, x: &Vec4) -> BigRational {
        let (a, b) = (qint(self.a), qint(self.b));
        let ab = &a * &b;
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &ab * &x[3] * &x[3]
    }

    /// Matrix of y -> x·y in column convention: coords(x·y) = M · coords(y).
    fn left_mul_matrix(&self, x: &Vec4) -> [[BigRational; 4]; 4] {
        let mut m = [[BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()]];
        for (col, e) in basis_vectors().iter().enumerate() {
            let prod = self.mul(x, e);
            for row in 0..4 {
                m[row][col] = prod[row].clone();
            }
        }
        m
    }

    /// Matrix of y -> y·x in column convention.
    fn right_mul_matrix(&self, x: &Vec4) -> [[BigRational; 4]; 4] {
        let mut m = [[BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()],
                     [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()]];
        for (col, e) in basis_vectors().iter().enumerate() {
            let prod = self.mul(e, x);
            for row in 0..4 {
                m[row][col] = prod[row].clone();
            }
        }
        m
    }
}

fn basis_vectors() -> [Vec4; 4] {
    [
        qvec([1, 0, 0, 0]),
        qvec([0, 1, 0, 0]),
        qvec([0, 0, 1, 0]),
        qvec([0, 0, 0, 1]),
    ]
}

/// Full-rank Z-lattice in the algebra: rows/den form a basis in Hermite
/// normal form (upper triangular, positive pivots, entries above a pivot
/// reduced modulo it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    den: BigInt,
    rows: [[BigInt; 4]; 4],
}

impl Lattice {
    pub fn from_generators(gens: &[Vec4]) -> Result<Lattice> {
        let mut den = BigInt::one();
        for g in gens {
            for c in g {
                den = den.lcm(c.denom());
            }
        }
        let rows: Vec<[BigInt; 4]> = gens
            .iter()
            .map(|g| {
                let mut row = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
                for (i, c) in g.iter().enumerate() {
                    row[i] = (c * BigRational::from_integer(den.clone())).to_integer();
                }
                row
            })
            .collect();
        Lattice::from_rows(den, rows)
    }

    fn from_rows(den: BigInt, rows: Vec<[BigInt; 4]>) -> Result<Lattice> {
        let mut rows = hnf(rows)?;
        let mut g = den.clone();
        for row in &rows {
            for e in row {
                g = g.gcd(e);
            }
        }
        let mut den = den;
        if g > BigInt::one() {
            den /= &g;
            for row in &mut rows {
                for e in row.iter_mut() {
                    *e /= &g;
                }
            }
        }
        Ok(Lattice { den, rows })
    }

    pub fn basis(&self) -> [Vec4; 4] {
        let den = BigRational::from_integer(self.den.clone());
        self.rows.clone().map(|row| {
            row.map(|e| BigRational::from_integer(e) / den.clone())
        })
    }

    /// Absolute value of the determinant of a basis matrix.
    pub fn det(&self) -> BigRational {
        let mut num = BigInt::one();
        for i in 0..4 {
            num *= &self.rows[i][i];
        }
        BigRational::new(num.abs(), self.den.pow(4))
    }

    pub fn contains(&self, x: &Vec4) -> bool {
        let den = BigRational::from_integer(self.den.clone());
        let mut t: Vec4 = [
            &x[0] * &den,
            &x[1] * &den,
            &x[2] * &den,
            &x[3] * &den,
        ];
        for i in 0..4 {
            let pivot = BigRational::from_integer(self.rows[i][i].clone());
            let c = &t[i] / &pivot;
            if !c.is_integer() {
                return false;
            }
            for j in 0..4 {
                let sub = &c * BigRational::from_integer(self.rows[i][j].clone());
                t[j] = &t[j] - sub;
            }
        }
        t.iter().all(|e| e.is_zero())
    }

    pub fn scaled(&self, factor: &BigRational) -> Lattice {
        let gens: Vec<Vec4> = self
            .basis()
            .into_iter()
            .map(|b| b.map(|c| &c * factor))
            .collect();
        Lattice::from_generators(&gens).expect("scaling keeps full rank")
    }

    pub fn conjugated(&self) -> Lattice {
        let gens: Vec<Vec4> = self
            .basis()
            .iter()
            .map(QuaternionAlgebra::conjugate)
            .collect();
        Lattice::from_generators(&gens).expect("conjugation keeps full rank")
    }
}

/// Row-style Hermite normal form of a generating set; errors if the span has
/// rank below four.
fn hnf(mut rows: Vec<[BigInt; 4]>) -> Result<[[BigInt; 4]; 4]> {
    let mut pivot = 0usize;
    for col in 0..4 {
        loop {
            let mut best: Option<(usize, BigInt)> = None;
            for r in pivot..rows.len() {
                if !rows[r][col].is_zero() {
                    let mag = rows[r][col].abs();
                    if best.as_ref().is_none_or(|(_, m)| &mag < m) {
                        best = Some((r, mag));
                    }
                }
            }
            let Some((r, _)) = best else {
                break;
            };
            rows.swap(pivot, r);
            let head = rows[pivot].clone();
            let mut cleared = true;
            for row in rows.iter_mut().skip(pivot + 1) {
                if row[col].is_zero() {
                    continue;
                }
                let q = Integer::div_floor(&row[col], &head[col]);
                for c in 0..4 {
                    row[c] = &row[c] - &q * &head[c];
                }
                if !row[col].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                pivot += 1;
                break;
            }
        }
    }
    if pivot < 4 {
        return Err(Error::RankDeficient);
    }
    let mut m: [[BigInt; 4]; 4] = std::array::from_fn(|i| rows[i].clone());
    for i in 0..4 {
        if m[i][i].is_negative() {
            for c in 0..4 {
                m[i][c] = -m[i][c].clone();
            }
        }
    }
    for i in 1..4 {
        for r in 0..i {
            let q = Integer::div_floor(&m[r][i], &m[i][i]);
            if q.is_zero() {
                continue;
            }
            for c in 0..4 {
                m[r][c] = &m[r][c] - &q * &m[i][c];
            }
        }
    }
    Ok(m)
}

fn mat_inv4(m: &[[BigRational; 4]; 4]) -> [[BigRational; 4]; 4] {
    let mut a: Vec<Vec<BigRational>> = (0..4)
        .map(|i| {
            let mut row: Vec<BigRational> = m[i].to_vec();
            for j in 0..4 {
                row.push(if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
            }
            row
        })
        .collect();
    for col in 0..4 {
        let pivot = (col..4)
            .find(|&r| !a[r][col].is_zero())
            .expect("matrix is invertible");
        a.swap(col, pivot);
        let lead = a[col][col].clone();
        for j in 0..8 {
            a[col][j] = &a[col][j] / &lead;
        }
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..8 {
                let sub = &f * &a[col][j];
                a[r][j] = &a[r][j] - sub;
            }
        }
    }
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][4 + j].clone()))
}

fn mat_mul4(a: &[[BigRational; 4]; 4], b: &[[BigRational; 4]; 4]) -> [[BigRational; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| &a[i][k] * &b[k][j]).sum()))
}

/// Lattice generated by all products xy, x in l1, y in l2.
pub fn product(alg: &QuaternionAlgebra, l1: &Lattice, l2: &Lattice) -> Result<Lattice> {
    let mut gens = Vec::with_capacity(16);
    for x in l1.basis().iter() {
        for y in l2.basis().iter() {
            gens.push(alg.mul(x, y));
        }
    }
    Lattice::from_generators(&gens)
}

pub fn is_order(alg: &QuaternionAlgebra, lat: &Lattice) -> bool {
    if !lat.contains(&QuaternionAlgebra::one()) {
        return false;
    }
    let basis = lat.basis();
    for x in basis.iter() {
        for y in basis.iter() {
            if !lat.contains(&alg.mul(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Gram matrix Tr(bᵢ · conj(bⱼ)) of the norm form on a lattice basis.
pub fn norm_gram(alg: &QuaternionAlgebra, lat: &Lattice) -> [[BigRational; 4]; 4] {
    let basis = lat.basis();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            QuaternionAlgebra::trace(&alg.mul(&basis[i], &QuaternionAlgebra::conjugate(&basis[j])))
        })
    })
}

fn det4(m: &[[BigRational; 4]; 4]) -> BigRational {
    let mut a: Vec<Vec<BigRational>> = (0..4).map(|i| m[i].to_vec()).collect();
    let mut det = BigRational::one();
    for col in 0..4 {
        let Some(pivot) = (col..4).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        let lead = a[col][col].clone();
        det *= lead.clone();
        for r in col + 1..4 {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &lead;
            for j in col..4 {
                let sub = &f * &a[col][j];
                a[r][j] = &a[r][j] - sub;
            }
        }
    }
    det
}

/// Determinant of the norm Gram matrix; equals the square of the reduced
/// discriminant for an order.
pub fn gram_determinant(alg: &QuaternionAlgebra, lat: &Lattice) -> BigRational {
    det4(&norm_gram(alg, lat))
}

fn order_from_constraints(rows16: Vec<Vec4>) -> Result<Lattice> {
    let span = Lattice::from_generators(&rows16)?;
    let basis = span.basis();
    let r: [[BigRational; 4]; 4] = std::array::from_fn(|i| basis[i].clone());
    let inv = mat_inv4(&r);
    let cols: Vec<Vec4> = (0..4)
        .map(|j| std::array::from_fn(|i| inv[i][j].clone()))
        .collect();
    Lattice::from_generators(&cols)
}

/// Right order {x : I x ⊆ I}.
pub fn right_order(alg: &QuaternionAlgebra, ideal: &Lattice) -> Result<Lattice> {
    let basis = ideal.basis();
    let b_cols: [[BigRational; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| basis[j][i].clone()));
    let b_inv = mat_inv4(&b_cols);
    let mut rows16 = Vec::with_capacity(16);
    for b in basis.iter() {
        let block = mat_mul4(&b_inv, &alg.left_mul_matrix(b));
        for r in 0..4 {
            rows16.push(std::array::from_fn(|c| block[r][c].clone()));
        }
    }
    order_from_constraints(rows16)
}

/// Left order {x : x I ⊆ I}.
pub fn left_order(alg: &QuaternionAlgebra, ideal: &Lattice) -> Result<Lattice> {
    let basis = ideal.basis();
    let b_cols: [[BigRational; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| basis[j][i].clone()));
    let b_inv = mat_inv4(&b_cols);
    let mut rows16 = Vec::with_capacity(16);
    for b in basis.iter() {
        let block = mat_mul4(&b_inv, &alg.right_mul_matrix(b));
        for r in 0..4 {
            rows16.push(std::array::from_fn(|c| block[r][c].clone()));
        }
    }
    order_from_constraints(rows16)
}

/// Norm of a left ideal of `order`: the square root of the index-style
/// determinant ratio.
pub fn ideal_norm(order: &Lattice, ideal: &Lattice) -> Result<BigRational> {
    let ratio = ideal.det() / order.det();
    let num = ratio.numer().sqrt();
    let den = ratio.denom().sqrt();
    if &num * &num != *ratio.numer() || &den * &den != *ratio.denom() {
        return Err(Error::IndexNotSquare);
    }
    Ok(BigRational::new(num, den))
}

/// Inverse of a left ideal: conj(I) / N(I).
pub fn ideal_inverse(order: &Lattice, ideal: &Lattice) -> Result<Lattice> {
    let n = ideal_norm(order, ideal)?;
    Ok(ideal.conjugated().scaled(&n.recip()))
}

/// Integers m with (m - center)² <= t.
fn sqrt_range(center: &BigRational, t: &BigRational) -> Option<(i64, i64)> {
    if t.is_negative() {
        return None;
    }
    let c = center.to_f64().expect("small rational");
    let r = t.to_f64().expect("small rational").max(0.0).sqrt();
    let ok = |m: i64| {
        let d = qint(m) - center;
        &d * &d <= *t
    };
    let mut lo = (c - r).floor() as i64;
    let mut hi = (c + r).ceil() as i64;
    while ok(lo - 1) {
        lo -= 1;
    }
    while lo <= hi && !ok(lo) {
        lo += 1;
    }
    while ok(hi + 1) {
        hi += 1;
    }
    while hi >= lo && !ok(hi) {
        hi -= 1;
    }
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

fn ldl4(a: &[[BigRational; 4]; 4]) -> Result<([BigRational; 4], [[BigRational; 4]; 4])> {
    let mut m: Vec<Vec<BigRational>> = (0..4).map(|i| a[i].to_vec()).collect();
    let mut diag: [BigRational; 4] = std::array::from_fn(|_| BigRational::zero());
    let mut unit: [[BigRational; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| BigRational::zero()));
    for k in 0..4 {
        diag[k] = m[k][k].clone();
        if !diag[k].is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        unit[k][k] = BigRational::one();
        for j in k + 1..4 {
            unit[k][j] = &m[k][j] / &diag[k];
        }
        for i in k + 1..4 {
            for j in k + 1..4 {
                let delta = &m[k][i] * &m[k][j] / &diag[k];
                m[i][j] = &m[i][j] - delta;
            }
        }
    }
    Ok((diag, unit))
}

/// Number of lattice elements of norm exactly `target`.
pub fn count_by_norm(alg: &QuaternionAlgebra, lat: &Lattice, target: &BigRational) -> Result<i64> {
    let gram = norm_gram(alg, lat);
    let half: [[BigRational; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| &gram[i][j] / qint(2)));
    let (diag, unit) = ldl4(&half)?;
    let mut count = 0i64;
    let mut c = [0i64; 4];
    descend(&diag, &unit, &mut c, 3, target.clone(), &mut count);
    Ok(count)
}

fn descend(
    diag: &[BigRational; 4],
    unit: &[[BigRational; 4]; 4],
    c: &mut [i64; 4],
    level: usize,
    rem: BigRational,
    count: &mut i64,
) {
    let shift: BigRational = (level + 1..4).map(|j| &unit[level][j] * qint(c[j])).sum();
    let t = &rem / &diag[level];
    let center = -shift;
    let Some((lo, hi)) = sqrt_range(&center, &t) else {
        return;
    };
    for m in lo..=hi {
        c[level] = m;
        let d = qint(m) - &center;
        let next = &rem - &diag[level] * &d * &d;
        if level == 0 {
            if next.is_zero() {
                *count += 1;
            }
        } else {
            descend(diag, unit, c, level - 1, next, count);
        }
    }
    c[level] = 0;
}

/// Half the number of norm-one units of an order.
pub fn unit_half_count(alg: &QuaternionAlgebra, order: &Lattice) -> Result<i64> {
    let units = count_by_norm(alg, order, &BigRational::one())?;
    assert_eq!(units % 2, 0, "units pair up under negation");
    Ok(units / 2)
}

/// Brandt matrix B(n) for left ideal classes of a common order, n coprime to
/// the level. Entry (i, j) counts x in I_j⁻¹ I_i with Nr(x) N(I_j) / N(I_i) = n,
/// divided by twice the unit half-count of the right order of I_j.
pub fn brandt_matrix(
    alg: &QuaternionAlgebra,
    order: &Lattice,
    classes: &[Lattice],
    level: i64,
    n: i64,
) -> Result<Vec<Vec<i64>>> {
    if n.gcd(&level) != 1 {
        return Err(Error::BrandtNotCoprime { n, level });
    }
    let norms: Vec<BigRational> = classes
        .iter()
        .map(|cl| ideal_norm(order, cl))
        .collect::<Result<_>>()?;
    let h = classes.len();
    let mut out = vec![vec![0i64; h]; h];
    for j in 0..h {
        let right = right_order(alg, &classes[j])?;
        let w = unit_half_count(alg, &right)?;
        let inv = ideal_inverse(order, &classes[j])?;
        for i in 0..h {
            let m = product(alg, &inv, &classes[i])?;
            let target = qint(n) * &norms[i] / &norms[j];
            let raw = count_by_norm(alg, &m, &target)?;
            assert_eq!(raw % (2 * w), 0, "orbit counts divide by unit group");
            out[i][j] = raw / (2 * w);
        }
    }
    Ok(out)
}

/// Sum of unit half-counts over the right orders of the classes.
pub fn height(alg: &QuaternionAlgebra, classes: &[Lattice]) -> Result<i64> {
    let mut total = 0;
    for cl in classes {
        let right = right_order(alg, cl)?;
        total += unit_half_count(alg, &right)?;
    }
    Ok(total)
}

/// Canonical ternary form of the trace-zero part of 2O + Z, carrying the
/// quaternion norm.
pub fn ternary_form_of_order(alg: &QuaternionAlgebra, order: &Lattice) -> Result<TernaryForm> {
    let mut gens: Vec<Vec4> = order
        .basis()
        .into_iter()
        .map(|b| b.map(|c| &c * qint(2)))
        .collect();
    gens.push(QuaternionAlgebra::one());
    let s = Lattice::from_generators(&gens)?;
    let basis = s.basis();
    for row in basis.iter().skip(1) {
        assert!(row[0].is_zero(), "trace-zero rows sit below the pivot row");
    }
    let t = [&basis[1], &basis[2], &basis[3]];
    let pairing = |x: &Vec4, y: &Vec4| -> Result<i64> {
        let val = QuaternionAlgebra::trace(&alg.mul(x, &QuaternionAlgebra::conjugate(y)));
        if !val.is_integer() {
            return Err(Error::NotAnOrder("norm form on trace-zero part is not integral"));
        }
        val.to_i64().ok_or(Error::NotAnOrder("norm form overflows"))
    };
    let half = |v: i64| v / 2;
    let coeffs = [
        half(pairing(t[0], t[0])?),
        half(pairing(t[1], t[1])?),
        half(pairing(t[2], t[2])?),
        pairing(t[1], t[2])?,
        pairing(t[0], t[2])?,
        pairing(t[0], t[1])?,
    ];
    let raw = TernaryForm::new(coeffs)?;
    Ok(raw.reduce().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> QuaternionAlgebra {
        QuaternionAlgebra::new(-1, -3).unwrap()
    }

    fn qr(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn order_27() -> Lattice {
        Lattice::from_generators(&[
            qvec([1, 0, 0, 0]),
            qvec([0, 3, 0, 0]),
            [qr(1, 2), qr(0, 1), qr(3, 2), qr(0, 1)],
            [qr(0, 1), qr(1, 2), qr(0, 1), qr(1, 2)],
        ])
        .unwrap()
    }

    fn ideal_27() -> Lattice {
        Lattice::from_generators(&[
            qvec([4, 0, 0, 0]),
            qvec([0, 12, 0, 0]),
            [qr(7, 2), qr(3, 1), qr(3, 2), qr(0, 1)],
            [qr(3, 1), qr(13, 2), qr(0, 1), qr(1, 2)],
        ])
        .unwrap()
    }

    fn order_15() -> Lattice {
        Lattice::from_generators(&[
            qvec([1, 0, 0, 0]),
            qvec([0, 1, 0, 0]),
            [qr(1, 2), qr(0, 1), qr(5, 2), qr(0, 1)],
            [qr(1, 2), qr(1, 2), qr(3, 2), qr(1, 2)],
        ])
        .unwrap()
    }

    fn ideal_15() -> Lattice {
        Lattice::from_generators(&[
            qvec([2, 0, 0, 0]),
            qvec([0, 2, 0, 0]),
            [qr(3, 2), qr(1, 1), qr(5, 2), qr(0, 1)],
            [qr(3, 2), qr(1, 2), qr(3, 2), qr(1, 2)],
        ])
        .unwrap()
    }

    fn order_75() -> Lattice {
        Lattice::from_generators(&[
            qvec([1, 0, 0, 0]),
            qvec([0, 1, 0, 0]),
            [qr(1, 2), qr(0, 1), qr(5, 2), qr(0, 1)],
            [qr(0, 1), qr(1, 2), qr(0, 1), qr(5, 2)],
        ])
        .unwrap()
    }

    #[test]
    fn multiplication_table() {
        let a = alg();
        let i = qvec([0, 1, 0, 0]);
        let j = qvec([0, 0, 1, 0]);
        let k = qvec([0, 0, 0, 1]);
        assert_eq!(a.mul(&i, &i), qvec([-1, 0, 0, 0]));
        assert_eq!(a.mul(&j, &j), qvec([-3, 0, 0, 0]));
        assert_eq!(a.mul(&i, &j), k);
        assert_eq!(a.mul(&j, &i), qvec([0, 0, 0, -1]));
        assert_eq!(a.mul(&k, &k), qvec([-3, 0, 0, 0]));
        assert_eq!(a.norm(&qvec([1, 1, 1, 1])), qint(8));
        assert_eq!(QuaternionAlgebra::trace(&qvec([5, 1, 2, 3])), qint(10));
    }

    #[test]
    fn algebra_identities_on_sample_points() {
        for params in [(-1, -3), (-1, -1), (-2, -5)] {
            let a = QuaternionAlgebra::new(params.0, params.1).unwrap();
            let pts = [
                qvec([1, 2, -1, 0]),
                qvec([0, 1, 3, -2]),
                qvec([2, 0, 1, 1]),
                [qr(1, 2), qr(-3, 2), qr(0, 1), qr(5, 2)],
            ];
            for x in &pts {
                for y in &pts {
                    let xy = a.mul(x, y);
                    assert_eq!(a.norm(&xy), a.norm(x) * a.norm(y));
                    assert_eq!(
                        QuaternionAlgebra::conjugate(&xy),
                        a.mul(&QuaternionAlgebra::conjugate(y), &QuaternionAlgebra::conjugate(x))
                    );
                    assert_eq!(
                        QuaternionAlgebra::trace(&a.mul(x, y)),
                        QuaternionAlgebra::trace(&a.mul(y, x))
                    );
                    for z in &pts {
                        assert_eq!(a.mul(&xy, z), a.mul(x, &a.mul(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn hnf_is_generator_order_independent() {
        let l1 = order_27();
        let l2 = Lattice::from_generators(&{
            let mut b = l1.basis().to_vec();
            b.reverse();
            let extra = b[0].clone().map(|c| c * qint(3));
            b.push(extra);
            b
        })
        .unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn containment_follows_basis() {
        let o = order_27();
        for v in o.basis().iter() {
            assert!(o.contains(v));
            assert!(!o.contains(&v.clone().map(|c| c / qint(2))));
        }
        assert!(o.contains(&QuaternionAlgebra::one()));
    }

    #[test]
    fn rank_deficient_generators_rejected() {
        let gens = [qvec([1, 0, 0, 0]), qvec([0, 1, 0, 0])];
        assert!(matches!(
            Lattice::from_generators(&gens),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn fixture_lattices_are_orders_with_level_discriminant() {
        let a = alg();
        for (order, level) in [(order_27(), 27), (order_15(), 15), (order_75(), 75)] {
            assert!(is_order(&a, &order));
            assert_eq!(gram_determinant(&a, &order), qint(level * level));
        }
    }

    #[test]
    fn lipschitz_style_order_unit_counts() {
        let a = alg();
        let o = Lattice::from_generators(&basis_vectors()).unwrap();
        assert!(is_order(&a, &o));
        assert_eq!(unit_half_count(&a, &o).unwrap(), 2);
        let quat = QuaternionAlgebra::new(-1, -1).unwrap();
        assert_eq!(unit_half_count(&quat, &o).unwrap(), 4);
    }

    #[test]
    fn ideals_have_expected_structure() {
        let a = alg();
        for (order, ideal) in [(order_27(), ideal_27()), (order_15(), ideal_15())] {
            assert_eq!(left_order(&a, &ideal).unwrap(), order);
            let basis = ideal.basis();
            for x in order.basis().iter() {
                for y in basis.iter() {
                    assert!(ideal.contains(&a.mul(x, y)));
                }
            }
            let n = ideal_norm(&order, &ideal).unwrap();
            assert!(n.is_integer());
            let inv = ideal_inverse(&order, &ideal).unwrap();
            let back = product(&a, &ideal, &inv).unwrap();
            assert_eq!(back, order, "I · I⁻¹ recovers the left order");
        }
    }

    #[test]
    fn right_order_of_an_order_is_itself() {
        let a = alg();
        for o in [order_27(), order_15(), order_75()] {
            assert_eq!(right_order(&a, &o).unwrap(), o);
            assert_eq!(left_order(&a, &o).unwrap(), o);
        }
    }

    #[test]
    fn trace_zero_forms_match_expected_classes() {
        let a = alg();
        let q27 = ternary_form_of_order(&a, &order_27()).unwrap();
        assert_eq!(q27.coeffs(), [4, 27, 28, 0, -4, 0]);

        let expected = [
            (order_15(), [4, 15, 16, 0, -4, 0]),
            (order_75(), [4, 75, 76, 0, -4, 0]),
        ];
        for (order, coeffs) in expected {
            let derived = ternary_form_of_order(&a, &order).unwrap();
            let printed = TernaryForm::new(coeffs).unwrap();
            assert!(derived.equivalence_to(&printed).is_some());
        }

        let second = right_order(&a, &ideal_27()).unwrap();
        let derived = ternary_form_of_order(&a, &second).unwrap();
        let printed = TernaryForm::new([7, 16, 31, 16, 2, 4]).unwrap();
        assert!(derived.equivalence_to(&printed).is_some());

        let second_15 = right_order(&a, &ideal_15()).unwrap();
        let derived_15 = ternary_form_of_order(&a, &second_15).unwrap();
        let printed_15 = TernaryForm::new([4, 15, 16, 0, -4, 0]).unwrap();
        assert!(derived_15.equivalence_to(&printed_15).is_some());
    }

    #[test]
    fn brandt_matrices_have_eichler_structure() {
        let a = alg();
        let order = order_27();
        let classes = vec![order.clone(), ideal_27()];
        let weights: Vec<i64> = classes
            .iter()
            .map(|cl| unit_half_count(&a, &right_order(&a, cl).unwrap()).unwrap())
            .collect();
        assert_eq!(weights, vec![2, 1]);
        assert_eq!(height(&a, &classes).unwrap(), 3);

        for n in [2, 5, 7, 11, 13] {
            let b = brandt_matrix(&a, &order, &classes, 27, n).unwrap();
            let sigma: i64 = (1..=n).filter(|d| n % d == 0).sum();
            for row in &b {
                assert_eq!(row.iter().sum::<i64>(), sigma, "row sum at {n}");
            }
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(weights[j] * b[i][j], weights[i] * b[j][i], "symmetry at {n}");
                }
            }
        }

        let b2 = brandt_matrix(&a, &order, &classes, 27, 2).unwrap();
        assert_eq!(b2, vec![vec![1, 2], vec![1, 2]]);
        assert!(matches!(
            brandt_matrix(&a, &order, &classes, 27, 3),
            Err(Error::BrandtNotCoprime { n: 3, level: 27 })
        ));
    }

    #[test]
    fn brandt_structure_at_level_fifteen() {
        let a = alg();
        let order = order_15();
        let classes = vec![order.clone(), ideal_15()];
        let weights: Vec<i64> = classes
            .iter()
            .map(|cl| unit_half_count(&a, &right_order(&a, cl).unwrap()).unwrap())
            .collect();
        assert_eq!(weights, vec![2, 2]);
        assert_eq!(height(&a, &classes).unwrap(), 4);
        let b2 = brandt_matrix(&a, &order, &classes, 15, 2).unwrap();
        assert_eq!(b2, vec![vec![1, 2], vec![2, 1]]);
        let eigenvalue: i64 = b2[0][0] - b2[1][0];
        assert_eq!(eigenvalue, -1);
    }

    #[test]
    fn brandt_eigenvector_pairs_with_curve_coefficients() {
        let a = alg();
        let order = order_27();
        let classes = vec![order.clone(), ideal_27()];
        let v = [1i64, -1];
        for (n, a_n) in [(2i64, 0i64), (5, 0), (7, -1), (11, 0), (13, 5)] {
            let b = brandt_matrix(&a, &order, &classes, 27, n).unwrap();
            let transposed: Vec<i64> = (0..2)
                .map(|i| (0..2).map(|j| b[j][i] * v[j]).sum())
                .collect();
            assert_eq!(transposed, vec![a_n * v[0], a_n * v[1]], "eigenvalue at {n}");
        }
    }
}
