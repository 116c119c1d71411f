//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! Elements are stored as rational coefficient vectors modulo `x^m - 1`
//! (exponent basis), which keeps products of sparse elements cheap even for
//! large `m`. The canonical form reduces modulo the m-th cyclotomic
//! polynomial to the power basis `1, zeta, ..., zeta^(phi(m)-1)`; equality,
//! rationality checks and inversion go through that form.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::rational_to_f64;

/// Euler totient.
pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(m: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for d in 1..=m {
        if m % d == 0 {
            out.push(d);
        }
    }
    out
}

/// Exact division of integer polynomials; the divisor must be monic and the
/// division must be exact. Coefficients ascending.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let out_len = rem.len() - den.len() + 1;
    let mut quot = vec![BigInt::zero(); out_len];
    for i in (0..out_len).rev() {
        let c = rem[i + dn].clone();
        if !c.is_zero() {
            quot[i] = c.clone();
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// The m-th cyclotomic polynomial, integer coefficients ascending, memoized.
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let poly = if m == 1 {
        vec![BigInt::from(-1), BigInt::one()]
    } else {
        // (x^m - 1) / prod_{d | m, d < m} Phi_d
        let mut num = vec![BigInt::zero(); m as usize + 1];
        num[0] = BigInt::from(-1);
        num[m as usize] = BigInt::one();
        for d in divisors(m) {
            if d < m {
                let phi_d = cyclotomic_polynomial(d);
                num = poly_div_exact(&num, &phi_d);
            }
        }
        num
    };
    let arc = Arc::new(poly);
    cache.lock().unwrap().insert(m, arc.clone());
    arc
}

/// An element of `Q(zeta_m)`.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn zero(order: u32) -> Self {
        assert!(order >= 1);
        Self {
            order,
            coeffs: vec![BigRational::zero(); order as usize],
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut z = Self::zero(1);
        z.coeffs[0] = q;
        z
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(order: u32, k: i64) -> Self {
        let mut z = Self::zero(order);
        let k = k.rem_euclid(order as i64) as usize;
        z.coeffs[k] = BigRational::one();
        z
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Reinterprets the element in `Q(zeta_to)`, `order | to`.
    pub fn promote(&self, to: u32) -> Self {
        assert!(to % self.order == 0);
        if to == self.order {
            return self.clone();
        }
        let step = (to / self.order) as usize;
        let mut out = Self::zero(to);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k * step] = c.clone();
            }
        }
        out
    }

    fn common_order(&self, rhs: &Self) -> u32 {
        let l = (self.order as u64).lcm(&(rhs.order as u64));
        u32::try_from(l).expect("cyclotomic order overflow")
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let m = self.common_order(rhs);
        let mut a = self.promote(m);
        let b = rhs.promote(m);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= q;
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let m = self.common_order(rhs);
        let a = self.promote(m);
        let b = rhs.promote(m);
        let mut out = Self::zero(m);
        let ml = m as usize;
        for (i, ci) in a.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in b.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let k = (i + j) % ml;
                out.coeffs[k] += ci * cj;
            }
        }
        out
    }

    /// Complex conjugation `zeta -> zeta^(-1)`.
    pub fn conj(&self) -> Self {
        let m = self.order as usize;
        let mut out = Self::zero(self.order);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[(m - k) % m] = c.clone();
            }
        }
        out
    }

    /// Coefficients in the power basis of length `phi(order)` after
    /// reduction by the cyclotomic polynomial.
    pub fn canonical_coeffs(&self) -> Vec<BigRational> {
        let m = self.order;
        let phi = euler_phi(m) as usize;
        let phi_poly = cyclotomic_polynomial(m);
        let mut a = self.coeffs.clone();
        for i in (phi..a.len()).rev() {
            if a[i].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut a[i], BigRational::zero());
            let base = i - phi;
            for (j, pj) in phi_poly.iter().take(phi).enumerate() {
                if !pj.is_zero() {
                    a[base + j] -= &c * BigRational::from_integer(pj.clone());
                }
            }
        }
        a.truncate(phi);
        a
    }

    pub fn is_zero(&self) -> bool {
        self.canonical_coeffs().iter().all(|c| c.is_zero())
    }

    pub fn is_real(&self) -> bool {
        self.sub(&self.conj()).is_zero()
    }

    /// Exact rational value, if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        let c = self.canonical_coeffs();
        if c.iter().skip(1).all(|x| x.is_zero()) {
            Some(c[0].clone())
        } else {
            None
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in the
    /// power basis.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.order;
        let a = trim(self.canonical_coeffs());
        if a.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(m)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let (g, u, _v) = ext_gcd(&a, &phi);
        // Phi_m is irreducible over Q, so the gcd with a nonzero element of
        // smaller degree is a nonzero constant.
        assert_eq!(g.len(), 1, "cyclotomic polynomial must be coprime to a");
        let ginv = g[0].recip();
        let mut out = Self::zero(m);
        for (k, c) in u.iter().enumerate() {
            out.coeffs[k] = c * &ginv;
        }
        Ok(out)
    }

    /// `1 / (1 - zeta_order^e)` in closed form; requires `e != 0 (mod order)`.
    ///
    /// For a primitive q-th root `w` one has `(1 - w) * sum k*w^k = -q`
    /// (k = 1..q-1), hence the inverse is `-(1/q) * sum k*w^k`.
    pub fn one_minus_root_inverse(order: u32, e: i64) -> Result<Self> {
        let e = e.rem_euclid(order as i64) as u32;
        if e == 0 {
            return Err(Error::DivisionByZero);
        }
        let g = e.gcd(&order);
        let q = order / g;
        let mut out = Self::zero(order);
        let scale = BigRational::new(BigInt::from(-1), BigInt::from(q));
        for k in 1..q {
            let idx = ((e as u64 * k as u64) % order as u64) as usize;
            out.coeffs[idx] += BigRational::from_integer(BigInt::from(k)) * &scale;
        }
        Ok(out)
    }

    /// Floating-point evaluation at `zeta_m = exp(2 pi i / m)`.
    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / m;
                acc += Complex64::from_polar(1.0, theta) * rational_to_f64(c);
            }
        }
        acc
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl Eq for Cyclotomic {}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().map(|c| c.is_zero()).unwrap_or(false) {
        v.pop();
    }
    v
}

fn poly_sub_scaled(a: &mut Vec<BigRational>, b: &[BigRational], c: &BigRational, shift: usize) {
    if a.len() < b.len() + shift {
        a.resize(b.len() + shift, BigRational::zero());
    }
    for (j, bj) in b.iter().enumerate() {
        if !bj.is_zero() {
            a[j + shift] -= c * bj;
        }
    }
    while a.last().map(|x| x.is_zero()).unwrap_or(false) {
        a.pop();
    }
}

fn poly_rem_div(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead = b.last().expect("division by zero polynomial").clone();
    let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(b.len()) + 1];
    while rem.len() >= b.len() && !rem.is_empty() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() / &lead;
        quot[shift] = c.clone();
        poly_sub_scaled(&mut rem, &b, &c, shift);
    }
    (trim(quot), rem)
}

/// Returns `(g, u, v)` with `u*a + v*b = g = gcd(a, b)` over `Q[x]`.
fn ext_gcd(
    a: &[BigRational],
    b: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>, Vec<BigRational>) {
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut s0 = vec![BigRational::one()];
    let mut s1: Vec<BigRational> = Vec::new();
    let mut t0: Vec<BigRational> = Vec::new();
    let mut t1 = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = poly_rem_div(&r0, &r1);
        let next_s = poly_sub_mul(&s0, &q, &s1);
        let next_t = poly_sub_mul(&t0, &q, &t1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, next_s);
        t0 = std::mem::replace(&mut t1, next_t);
    }
    (r0, s0, t0)
}

/// `a - q*b` over `Q[x]`.
fn poly_sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = a.to_vec();
    if !q.is_empty() && !b.is_empty() {
        out.resize(out.len().max(q.len() + b.len() - 1), BigRational::zero());
        for (i, qi) in q.iter().enumerate() {
            if qi.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    out[i + j] -= qi * bj;
                }
            }
        }
    }
    trim(out)
}
