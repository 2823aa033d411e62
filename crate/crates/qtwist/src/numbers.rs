//! Elementary number theory: Kronecker symbols, fundamental discriminants,
//! modular arithmetic, and rank-one reduction of integral forms mod p.

use crate::error::{Error, Result};

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: i64) -> i64 {
    (2..p)
        .find(|&n| kronecker(n, p) == -1)
        .expect("odd primes have a non-residue below p")
}

/// Kronecker symbol (a|n), defined for all integer pairs.
pub fn kronecker(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 {
        1
    } else {
        match a.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        }
    };
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n.rem_euclid(8), 3 | 5) {
                k = -k;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            k = -k;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// True for discriminants of quadratic fields, together with 1.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m)
        }
        _ => false,
    }
}

pub fn is_squarefree(n: i64) -> bool {
    let mut n = n.abs();
    if n == 0 {
        return false;
    }
    if n % 4 == 0 {
        return false;
    }
    if n % 2 == 0 {
        n /= 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 2;
    }
    true
}

pub fn is_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut p = 5;
    while p * p <= n {
        if n % p == 0 || n % (p + 2) == 0 {
            return false;
        }
        p += 6;
    }
    true
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of a modulo m (m > 1, gcd(a, m) = 1), in [0, m).
pub fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "inv_mod of non-unit {a} mod {m}");
    t0.rem_euclid(m)
}

pub fn pow_mod(base: i64, mut exp: u64, m: i64) -> i64 {
    let mut base = base.rem_euclid(m) as i128;
    let m = m as i128;
    let mut acc = 1i128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as i64
}

/// Splitting pattern of d at each prime: '+', '-', or '0'.
pub fn type_pattern(d: i64, primes: &[i64]) -> String {
    primes
        .iter()
        .map(|&p| match kronecker(d, p) {
            1 => '+',
            -1 => '-',
            _ => '0',
        })
        .collect()
}

/// Writes the matrix of a ternary form as u * l * l^T over Z/p (p odd),
/// where l is normalized so its first nonzero coefficient is 1.
/// Returns (l, u) with the form congruent to u * l(v)^2 mod p.
pub fn rank_one_decompose(gram: &[[i64; 3]; 3], p: i64) -> Result<([i64; 3], i64)> {
    assert!(p > 2 && is_prime(p));
    let half = inv_mod(2, p);
    let mut a = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] = (gram[i][j].rem_euclid(p) * half).rem_euclid(p);
        }
    }
    let pivot = match (0..3).find(|&i| a[i][i] != 0) {
        Some(i) => i,
        None => {
            let rank = if a.iter().flatten().all(|&x| x == 0) { 0 } else { 2 };
            return Err(Error::RankNotOne { p, rank });
        }
    };
    let u0 = a[pivot][pivot];
    let row = a[pivot];
    let inv_u0 = inv_mod(u0, p);
    for i in 0..3 {
        for j in 0..3 {
            if a[i][j] != (row[i] * row[j] % p * inv_u0).rem_euclid(p) {
                return Err(Error::RankNotOne { p, rank: 2 });
            }
        }
    }
    let lead = row.iter().copied().find(|&c| c != 0).unwrap();
    let scale = inv_mod(lead, p);
    let l = [
        row[0] * scale % p,
        row[1] * scale % p,
        row[2] * scale % p,
    ];
    let u = (lead * lead % p * inv_u0).rem_euclid(p);
    Ok((l, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn legendre(a: i64, p: i64) -> i32 {
        let a = a.rem_euclid(p);
        if a == 0 {
            return 0;
        }
        if pow_mod(a, ((p - 1) / 2) as u64, p) == 1 {
            1
        } else {
            -1
        }
    }

    fn kronecker_by_factoring(a: i64, n: i64) -> i32 {
        if n == 0 {
            return if a.abs() == 1 { 1 } else { 0 };
        }
        let mut n = n;
        let mut r = 1i32;
        if n < 0 {
            n = -n;
            if a < 0 {
                r = -r;
            }
        }
        while n % 2 == 0 {
            n /= 2;
            r *= match a.rem_euclid(8) {
                1 | 7 => 1,
                3 | 5 => -1,
                _ => 0,
            };
        }
        let mut p = 3;
        while p * p <= n {
            while n % p == 0 {
                n /= p;
                r *= legendre(a, p);
            }
            p += 2;
        }
        if n > 1 {
            r *= legendre(a, n);
        }
        r
    }

    #[test]
    fn kronecker_matches_factoring_oracle() {
        for a in -60..=60 {
            for n in -60..=60 {
                assert_eq!(
                    kronecker(a, n),
                    kronecker_by_factoring(a, n),
                    "({a}|{n})"
                );
            }
        }
    }

    #[test]
    fn kronecker_spot_values() {
        assert_eq!(kronecker(1, 5), 1);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(-23, 5), -1);
        assert_eq!(kronecker(12, 7), -1);
        assert_eq!(kronecker(13, 3), 1);
        assert_eq!(kronecker(0, 1), 1);
        assert_eq!(kronecker(0, 7), 0);
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative_in_top(a in -500i64..500, b in -500i64..500, n in 2i64..300) {
            for n in [n, -n] {
                prop_assert_eq!(kronecker(a * b, n), kronecker(a, n) * kronecker(b, n));
            }
        }

        #[test]
        fn kronecker_multiplicative_in_bottom(a in -500i64..500, m in -60i64..60, n in -60i64..60) {
            prop_assume!(m != 0 && n != 0);
            prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
        }

        #[test]
        fn inv_mod_inverts(a in 1i64..10_000, m in 2i64..10_000) {
            let g = {
                let (mut x, mut y) = (a, m);
                while y != 0 { (x, y) = (y, x % y); }
                x
            };
            prop_assume!(g == 1);
            let inv = inv_mod(a, m);
            prop_assert!((0..m).contains(&inv));
            prop_assert_eq!((a * inv).rem_euclid(m), 1);
        }
    }

    #[test]
    fn fundamental_discriminants_match_field_discriminants() {
        let mut oracle = std::collections::HashSet::new();
        oracle.insert(1i64);
        for m in -600i64..=600 {
            if m == 0 || m == 1 || !is_squarefree(m) {
                continue;
            }
            let disc = if m.rem_euclid(4) == 1 { m } else { 4 * m };
            oracle.insert(disc);
        }
        for d in -500i64..=500 {
            assert_eq!(
                is_fundamental_discriminant(d),
                oracle.contains(&d),
                "d = {d}"
            );
        }
    }

    #[test]
    fn fundamental_discriminant_spot_values() {
        for d in [1, -3, -4, -7, -8, 5, 8, 12, 13, -20, -23, 28] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [0, -1, 2, 3, 4, -9, 9, -12, 16, 25, 45] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
    }

    #[test]
    fn primality_matches_sieve() {
        let n = 10_000usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=n {
            if sieve[i] {
                for j in (i * i..=n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for i in 0..=n {
            assert_eq!(is_prime(i as i64), sieve[i], "{i}");
        }
    }

    #[test]
    fn squarefree_matches_naive() {
        fn naive(n: i64) -> bool {
            let n = n.abs();
            if n == 0 {
                return false;
            }
            for d in 2..=n {
                if d * d > n {
                    break;
                }
                if n % (d * d) == 0 {
                    return false;
                }
            }
            true
        }
        for n in -2000..=2000 {
            assert_eq!(is_squarefree(n), naive(n), "{n}");
        }
    }

    #[test]
    fn type_pattern_examples() {
        assert_eq!(type_pattern(-4, &[3]), "-");
        assert_eq!(type_pattern(13, &[3, 5]), "+-");
        assert_eq!(type_pattern(-20, &[3, 5]), "+0");
        assert_eq!(type_pattern(12, &[3, 5]), "0-");
    }

    fn gram(q: [i64; 6]) -> [[i64; 3]; 3] {
        let [a, b, c, d, e, f] = q;
        [[2 * a, f, e], [f, 2 * b, d], [e, d, 2 * c]]
    }

    #[test]
    fn rank_one_examples() {
        let q1_27 = gram([4, 27, 28, 0, -4, 0]);
        assert_eq!(rank_one_decompose(&q1_27, 3).unwrap(), ([1, 0, 1], 1));

        let q2_27 = gram([7, 16, 31, 16, 2, 4]);
        assert_eq!(rank_one_decompose(&q2_27, 3).unwrap(), ([1, 2, 1], 1));

        let q1_75 = gram([4, 75, 76, 0, -4, 0]);
        assert_eq!(rank_one_decompose(&q1_75, 5).unwrap(), ([1, 0, 2], 4));
    }

    #[test]
    fn rank_one_reconstructs_the_form() {
        let forms = [
            ([4, 27, 28, 0, -4, 0], 3),
            ([7, 16, 31, 16, 2, 4], 3),
            ([4, 15, 16, 0, -4, 0], 3),
            ([4, 15, 16, 0, -4, 0], 5),
            ([4, 75, 76, 0, -4, 0], 5),
            ([16, 19, 79, 2, 16, 4], 5),
            ([24, 31, 39, 6, 12, 24], 5),
        ];
        for (q, p) in forms {
            let g = gram(q);
            let (l, u) = rank_one_decompose(&g, p).unwrap();
            let lead = l.iter().copied().find(|&c| c != 0).unwrap();
            assert_eq!(lead, 1, "leading coefficient normalized for {q:?} mod {p}");
            let half = inv_mod(2, p);
            for i in 0..3 {
                for j in 0..3 {
                    let lhs = (g[i][j].rem_euclid(p) * half).rem_euclid(p);
                    let rhs = (u * l[i] % p * l[j]).rem_euclid(p);
                    assert_eq!(lhs, rhs, "{q:?} mod {p} at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn rank_one_rejects_nondegenerate_reduction() {
        let g = gram([4, 27, 28, 0, -4, 0]);
        assert!(matches!(
            rank_one_decompose(&g, 5),
            Err(Error::RankNotOne { p: 5, rank: 2 })
        ));
    }
}
