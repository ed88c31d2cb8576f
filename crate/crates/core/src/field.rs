//! Finite fields GF(q) backed by full lookup tables.
//!
//! Elements of GF(p^k) are encoded as integers `0..q` whose base-p digits
//! are the coefficients (lowest degree first) of a polynomial over GF(p),
//! reduced modulo a fixed irreducible monic polynomial of degree k. The
//! modulus is the lexicographically least irreducible monic polynomial, so
//! two fields of the same order always have identical tables.

use thiserror::Error;

/// Largest supported field order; elements must fit in a `u8`.
pub const MAX_FIELD_ORDER: u64 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field order {0} exceeds the supported maximum of {MAX_FIELD_ORDER}")]
    TooLarge(u64),
}

/// Splits `q` as `p^k` with `p` prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0;
    let mut d = 2u64;
    while d * d <= q {
        if q % d == 0 {
            p = d;
            break;
        }
        d += 1;
    }
    if p == 0 {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power(q).is_some()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    q: usize,
    p: usize,
    k: usize,
    /// Coefficients of the modulus, lowest degree first; monic of degree k.
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

impl FieldSpec {
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if q > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let (q, p, k) = (q as usize, p as usize, k as usize);
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, k)
        };

        let digits = |x: usize| -> Vec<usize> {
            let mut v = vec![0; k];
            let mut x = x;
            for d in v.iter_mut() {
                *d = x % p;
                x /= p;
            }
            v
        };
        let encode = |v: &[usize]| -> usize { v.iter().rev().fold(0, |acc, &d| acc * p + d) };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = encode(&sum) as u8;
                let prod = poly_mul_mod(&da, &db, &modulus, p);
                mul[a * q + b] = encode(&prod) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
            }
        }
        Ok(FieldSpec { q, p, k, modulus, add, mul, neg, inv })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// The reduction polynomial, lowest-degree coefficient first.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// Row-major `q x q` addition table.
    pub fn add_table(&self) -> &[u8] {
        &self.add
    }

    pub fn mul_table(&self) -> &[u8] {
        &self.mul
    }

    /// Inverses by element; index 0 is unused and holds 0.
    pub fn inv_table(&self) -> &[u8] {
        &self.inv
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse. `a` must be nonzero.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "zero has no inverse");
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let mut base = a;
        let mut acc = 1u8;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Whether `a` lies in the subfield of order `p^sub_degree`.
    pub fn in_subfield(&self, a: u8, sub_degree: usize) -> bool {
        self.pow(a, (self.p as u64).pow(sub_degree as u32)) == a
    }
}

fn poly_mul_mod(a: &[usize], b: &[usize], modulus: &[u8], p: usize) -> Vec<usize> {
    let k = a.len();
    let mut prod = vec![0usize; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // Reduce from the top using x^k = -(m_0 + ... + m_{k-1} x^{k-1}).
    for deg in (k..2 * k).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        prod[deg] = 0;
        for (i, &m) in modulus[..k].iter().enumerate() {
            let t = deg - k + i;
            prod[t] = (prod[t] + (p - c) * m as usize) % p;
        }
    }
    prod.truncate(k);
    prod
}

/// Least monic irreducible polynomial of degree `k` over GF(p), comparing
/// coefficient vectors from the leading term down.
fn least_irreducible(p: usize, k: usize) -> Vec<u8> {
    let lo = p.pow(k as u32);
    (lo..2 * lo)
        .map(|code| poly_digits(code, p, k + 1))
        .find(|cand| is_irreducible(cand, p))
        .expect("an irreducible polynomial exists in every degree")
}

fn poly_digits(mut code: usize, p: usize, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for d in v.iter_mut() {
        *d = (code % p) as u8;
        code /= p;
    }
    v
}

fn is_irreducible(poly: &[u8], p: usize) -> bool {
    let k = poly.len() - 1;
    for d in 1..=k / 2 {
        let lo = p.pow(d as u32);
        for code in lo..2 * lo {
            if poly_rem_is_zero(poly, &poly_digits(code, p, d + 1), p) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_is_zero(num: &[u8], den: &[u8], p: usize) -> bool {
    let mut r: Vec<usize> = num.iter().map(|&c| c as usize).collect();
    let dd = den.len() - 1;
    for top in (dd..r.len()).rev() {
        let c = r[top];
        if c == 0 {
            continue;
        }
        // den is monic
        for (i, &m) in den.iter().enumerate() {
            let t = top - dd + i;
            r[t] = (r[t] + (p - c) * m as usize) % p;
        }
    }
    r.iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent polynomial arithmetic: schoolbook product followed by
    /// long division, with polynomials as plain coefficient vectors.
    fn naive_mul(a: usize, b: usize, p: usize, modulus: &[usize]) -> usize {
        let to_poly = |mut x: usize| {
            let mut v = Vec::new();
            while x > 0 {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let (pa, pb) = (to_poly(a), to_poly(b));
        let mut prod = vec![0usize; pa.len() + pb.len() + 1];
        for (i, x) in pa.iter().enumerate() {
            for (j, y) in pb.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let deg_m = modulus.len() - 1;
        for i in (deg_m..prod.len()).rev() {
            let c = prod[i] % p;
            for (j, m) in modulus.iter().enumerate() {
                prod[i - deg_m + j] += (p - c) * m;
            }
        }
        prod.iter().take(deg_m).rev().fold(0, |acc, c| acc * p + c % p)
    }

    const SMALL_ORDERS: [u64; 10] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16];

    #[test]
    fn gf2_identities() {
        let f = FieldSpec::new(2).unwrap();
        assert_eq!(f.add(1, 1), 0);
        assert_eq!(f.mul(1, 1), 1);
    }

    #[test]
    fn gf4_omega_squared() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(naive_mul(2, 2, 2, &[1, 1, 1]), 3);
    }

    #[test]
    fn table_products_match_naive_oracle() {
        for q in [4u64, 8, 9, 16, 25, 27] {
            let f = FieldSpec::new(q).unwrap();
            let m: Vec<usize> = f.modulus().iter().map(|&c| c as usize).collect();
            for a in 0..q as usize {
                for b in 0..q as usize {
                    assert_eq!(
                        f.mul(a as u8, b as u8) as usize,
                        naive_mul(a, b, f.characteristic(), &m),
                        "q={q} a={a} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert_eq!(FieldSpec::new(6), Err(FieldError::NotPrimePower(6)));
        assert_eq!(FieldSpec::new(1), Err(FieldError::NotPrimePower(1)));
        assert_eq!(FieldSpec::new(12), Err(FieldError::NotPrimePower(12)));
        assert_eq!(FieldSpec::new(512), Err(FieldError::TooLarge(512)));
    }

    #[test]
    fn gf5_inverse() {
        let f = FieldSpec::new(5).unwrap();
        assert_eq!(f.inv(2), 3);
        assert_eq!(f.inv_table()[2], 3);
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(FieldSpec::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(FieldSpec::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldSpec::new(16).unwrap().modulus(), &[1, 1, 0, 0, 1]);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in SMALL_ORDERS {
            let f = FieldSpec::new(q).unwrap();
            let q = q as u8;
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    if a != 0 && b != 0 {
                        assert_ne!(f.mul(a, b), 0, "zero divisor in GF({q})");
                    }
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for q in SMALL_ORDERS {
            let f = FieldSpec::new(q).unwrap();
            let p = f.characteristic() as u64;
            for a in 0..q as u8 {
                for b in 0..q as u8 {
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                }
            }
        }
    }

    #[test]
    fn construction_is_reproducible() {
        for q in SMALL_ORDERS {
            assert_eq!(FieldSpec::new(q).unwrap(), FieldSpec::new(q).unwrap());
        }
    }

    #[test]
    fn subfield_membership() {
        let f = FieldSpec::new(4).unwrap();
        let sub: Vec<u8> = (0..4).filter(|&a| f.in_subfield(a, 1)).collect();
        assert_eq!(sub, vec![0, 1]);
        let f = FieldSpec::new(16).unwrap();
        assert_eq!((0..16).filter(|&a| f.in_subfield(a, 2)).count(), 4);
    }
}
