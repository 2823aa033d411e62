//! Sign-valued weights on lattice vectors of a ternary class form: a linear
//! character read off the rank-one reduction at primes dividing the level,
//! and a conic character at an auxiliary prime.

use crate::error::{Error, Result};
use crate::numbers::{inv_mod, is_prime, kronecker, rank_one_decompose};
use crate::ternary::TernaryForm;

/// 0 at zero, +1 on residues with minimal representative in 1..=(p-1)/2,
/// -1 on the rest. Agrees with the quadratic character mod 3.
pub fn half_sign(t: i64, p: i64) -> i64 {
    let r = t.rem_euclid(p);
    if r == 0 {
        0
    } else if r <= (p - 1) / 2 {
        1
    } else {
        -1
    }
}

/// First nonzero point of the cone Q ≡ 0 (mod l) in lexicographic order of
/// coordinates taken in 0..l.
pub fn cone_base_point(q: &TernaryForm, l: i64) -> Result<[i64; 3]> {
    for x in 0..l {
        for y in 0..l {
            for z in 0..l {
                let v = [x, y, z];
                if v != [0, 0, 0] && q.evaluate(v).rem_euclid(l) == 0 {
                    return Ok(v);
                }
            }
        }
    }
    Err(Error::DegenerateModP(l))
}

/// Weight data prepared for one class form.
pub struct ClassWeights {
    form: TernaryForm,
    cone: Option<(i64, [i64; 3])>,
    linear: Vec<(i64, [i64; 3])>,
}

impl ClassWeights {
    /// `aux` is a signed auxiliary discriminant: ±1 for no conic factor,
    /// otherwise ±l for a prime l. `second_kind` lists the primes whose
    /// rank-one reduction contributes a linear character.
    pub fn new(form: &TernaryForm, aux: i64, second_kind: &[i64]) -> Result<Self> {
        let shapes: Vec<(i64, i64)> = second_kind.iter().map(|&p| (p, 1)).collect();
        Self::with_shapes(form, aux, &shapes)
    }

    /// Like `new`, but each second-kind prime comes with a scale applied to
    /// the rank-one functional before the half-system sign is read off. For
    /// p = 1 mod 4 the sign of a scaled functional is not a global sign times
    /// the unscaled one, so scales 1 and a non-residue give genuinely
    /// different weights; which one matches a given eigenform is settled by
    /// calibration.
    pub fn with_shapes(form: &TernaryForm, aux: i64, second_kind: &[(i64, i64)]) -> Result<Self> {
        let cone = if aux.abs() == 1 {
            None
        } else {
            let l = aux.abs();
            assert!(is_prime(l), "auxiliary discriminant must be ±1 or a signed prime");
            Some((l, cone_base_point(form, l)?))
        };
        let linear = second_kind
            .iter()
            .map(|&(p, scale)| {
                rank_one_decompose(&form.gram(), p)
                    .map(|(l, _)| (p, l.map(|c| (c * scale).rem_euclid(p))))
            })
            .collect::<Result<_>>()?;
        Ok(ClassWeights {
            form: *form,
            cone,
            linear,
        })
    }

    /// Index divisor: theta coefficients sit at Q(v)/l.
    pub fn index_divisor(&self) -> i64 {
        self.cone.map_or(1, |(l, _)| l)
    }

    /// Product of all characters at v, in {-1, 0, 1}.
    pub fn weight(&self, v: [i64; 3]) -> i64 {
        let mut w = 1;
        for &(p, l) in &self.linear {
            let t = l[0] * v[0] + l[1] * v[1] + l[2] * v[2];
            w *= half_sign(t, p);
            if w == 0 {
                return 0;
            }
        }
        if let Some((l, base)) = self.cone {
            if self.form.evaluate(v).rem_euclid(l) != 0 {
                return 0;
            }
            let b = self.form.bilinear(v, base).rem_euclid(l);
            if b != 0 {
                w *= kronecker(b, l) as i64;
            } else {
                let i = (0..3)
                    .find(|&i| base[i].rem_euclid(l) != 0)
                    .expect("base point is nonzero mod l");
                let lambda = (v[i].rem_euclid(l) * inv_mod(base[i], l)).rem_euclid(l);
                debug_assert!(
                    (0..3).all(|j| (v[j] - lambda * base[j]).rem_euclid(l) == 0),
                    "vector orthogonal to the base point lies on its line"
                );
                w *= kronecker(lambda, l) as i64;
            }
        }
        w
    }

    /// Sign picked up under v -> -v; the weight is usable only when the
    /// family product is even.
    pub fn negation_parity(&self) -> i64 {
        let linear: i64 = self.linear.iter().map(|_| -1).product();
        let conic = self.cone.map_or(1, |(l, _)| kronecker(-1, l) as i64);
        linear * conic
    }
}
