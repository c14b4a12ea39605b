//! A deliberately small primality test for relation ideals over QQ. It only
//! ever answers "prime" when one of a few structural rules applies; anything
//! else is reported as unknown.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cas::{Field, Poly};
use crate::error::Result;
use crate::rings::FpAlgebra;

/// Largest absolute value whose divisors are enumerated by the rational root test.
const MAX_ROOT_SEARCH: u64 = 1_000_000_000_000;

/// `true` when the relations are visibly a prime ideal of `QQ[gens]`:
/// zero; or principal with a generator that is linear with constant
/// coefficient in some variable; or principal in at most two variables and
/// irreducible by the rational root test (one variable, degree <= 3) or by
/// the discriminant test (degree 2 in a variable with constant top
/// coefficient).
pub fn structurally_prime(a: &FpAlgebra) -> Result<bool> {
    if a.field() != Field::Rationals {
        return Ok(false);
    }
    let gb = a.basis()?;
    let f = match gb.polys() {
        [] => return Ok(true),
        [f] => f,
        _ => return Ok(false),
    };
    if f.is_constant() {
        return Ok(false);
    }
    let support = f.support();
    for &y in &support {
        if f.degree_in(y) == 1 && f.coefficient_of_power(y, 1).is_constant() {
            return Ok(true);
        }
    }
    Ok(match support[..] {
        [x] => {
            let c = univariate(f, x);
            match c.len() - 1 {
                1 => true,
                2 | 3 => !has_rational_root(&c),
                _ => false,
            }
        }
        [x, y] => [(x, y), (y, x)].into_iter().any(|(x, y)| quadratic_irreducible(f, x, y)),
        _ => false,
    })
}

/// Coefficients of `f` by ascending powers of `x`; `f` must only involve `x`.
fn univariate(f: &Poly, x: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); f.degree_in(x) as usize + 1];
    for (m, s) in f.terms() {
        c[m.exponents()[x] as usize] = s.as_rational().cloned().unwrap_or_else(BigRational::zero);
    }
    c
}

fn has_rational_root(c: &[BigRational]) -> bool {
    if c[0].is_zero() {
        return true;
    }
    // clear denominators
    let lcm = c.iter().fold(BigInt::one(), |l, q| num_integer::Integer::lcm(&l, q.denom()));
    let ints: Vec<BigInt> = c.iter().map(|q| (q * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let (Some(ps), Some(qs)) = (divisors(&ints[0]), divisors(ints.last().unwrap())) else {
        // too large to search: claim a root, which only weakens the answer
        return true;
    };
    for p in &ps {
        for q in &qs {
            for sign in [1, -1] {
                let r = BigRational::new(BigInt::from(sign * p), BigInt::from(*q));
                let mut acc = BigRational::zero();
                for a in c.iter().rev() {
                    acc = acc * &r + a;
                }
                if acc.is_zero() {
                    return true;
                }
            }
        }
    }
    false
}

fn divisors(n: &BigInt) -> Option<Vec<i64>> {
    let n: u64 = n.abs().try_into().ok()?;
    if n > MAX_ROOT_SEARCH {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d as i64);
            if d * d != n {
                out.push((n / d) as i64);
            }
        }
        d += 1;
    }
    Some(out)
}

/// `f = a y^2 + b(x) y + c(x)` with constant `a` is irreducible iff the
/// discriminant is not a square in `QQ[x]`.
fn quadratic_irreducible(f: &Poly, x: usize, y: usize) -> bool {
    if f.degree_in(y) != 2 {
        return false;
    }
    let a = f.coefficient_of_power(y, 2);
    if !a.is_constant() {
        return false;
    }
    let b = f.coefficient_of_power(y, 1);
    let c = f.coefficient_of_power(y, 0);
    let four = Poly::from_i64(f.ring(), 4);
    let disc = &(&b * &b) - &(&(&four * &a) * &c);
    if disc.is_zero() {
        return false;
    }
    !is_square(&univariate(&disc, x))
}

fn is_square(d: &[BigRational]) -> bool {
    let n = d.len() - 1;
    if n % 2 == 1 {
        return false;
    }
    let Some(top) = rational_sqrt(&d[n]) else { return false };
    let m = n / 2;
    // r_m = sqrt(lc); solve downwards for the remaining coefficients
    let mut r = vec![BigRational::zero(); m + 1];
    r[m] = top;
    let two_top = &r[m] * BigRational::from_integer(2.into());
    for k in (0..m).rev() {
        let mut s = d[m + k].clone();
        for i in (k + 1)..=m {
            let j = m + k - i;
            if j > k && j <= m {
                s -= &r[i] * &r[j];
            }
        }
        r[k] = s / &two_top;
    }
    let mut sq = vec![BigRational::zero(); n + 1];
    for i in 0..=m {
        for j in 0..=m {
            sq[i + j] += &r[i] * &r[j];
        }
    }
    sq == d
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cas::PolyRing;

    fn algebra(names: &[&str], rels: &[&str]) -> Arc<FpAlgebra> {
        let ring = PolyRing::new(Field::Rationals, names);
        let rels = rels.iter().map(|r| Poly::parse(&ring, r).unwrap()).collect();
        Arc::new(FpAlgebra::new(&ring, rels).unwrap())
    }

    #[test]
    fn recognises_simple_primes() {
        assert!(structurally_prime(&algebra(&["x", "y"], &[])).unwrap());
        assert!(structurally_prime(&algebra(&["u", "v"], &["u^3 + u^2 - v^2"])).unwrap());
        assert!(structurally_prime(&algebra(&["x"], &["x^2 + 1"])).unwrap());
        assert!(structurally_prime(&algebra(&["x", "y", "z"], &["z - x*y"])).unwrap());
        assert!(structurally_prime(&algebra(&["x", "y"], &["y^2 - x^2 - 2*x - 1 + x^3"])).unwrap());
    }

    #[test]
    fn never_claims_reducible_ideals() {
        assert!(!structurally_prime(&algebra(&["x", "y"], &["x*y"])).unwrap());
        assert!(!structurally_prime(&algebra(&["x"], &["x^2 - 1"])).unwrap());
        assert!(!structurally_prime(&algebra(&["x"], &["2*x^3 - x^2 - 2*x + 1"])).unwrap());
        assert!(!structurally_prime(&algebra(&["x", "y"], &["y^2 - x^2"])).unwrap());
        assert!(!structurally_prime(&algebra(&["x", "y"], &["y^2 - 2*x*y + x^2 - 1"])).unwrap());
        assert!(!structurally_prime(&algebra(&["x"], &["1"])).unwrap());
    }
}
