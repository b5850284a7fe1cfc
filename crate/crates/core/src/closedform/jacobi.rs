//! Jacobi polynomials through their terminating hypergeometric series
//!
//! `P^{ν,μ}_n(x) = (ν+1)_n / n! · ₂F₁(-n, n+ν+μ+1; ν+1; (1-x)/2)`.
//!
//! The series alternates, and at `x = 0` with a large second parameter the
//! cancellation wipes out double precision long before degree 30. The
//! amplitude identities therefore go through [`jacobi_p_exact`], which sums
//! the same series in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Floating-point evaluation for real parameters `ν, μ > -1`.
pub fn jacobi_p(degree: usize, nu: f64, mu: f64, x: f64) -> Result<f64> {
    if !(nu > -1.0) || !(mu > -1.0) {
        return Err(Error::invalid(format!(
            "Jacobi parameters must exceed -1, got nu={nu}, mu={mu}"
        )));
    }
    if !x.is_finite() {
        return Err(Error::invalid(format!(
            "Jacobi argument must be finite, got {x}"
        )));
    }
    let n = degree as f64;
    let z = 0.5 * (1.0 - x);
    let mut term = 1.0;
    let mut series = 1.0;
    let mut prefactor = 1.0;
    for k in 0..degree {
        let k = k as f64;
        term *= (k - n) * (n + nu + mu + 1.0 + k) / ((nu + 1.0 + k) * (k + 1.0)) * z;
        series += term;
        prefactor *= (k + 1.0 + nu) / (k + 1.0);
    }
    Ok(prefactor * series)
}

/// Exact evaluation for integer parameters `ν, μ >= 0` at a rational point.
pub fn jacobi_p_exact(degree: usize, nu: i64, mu: i64, x: &BigRational) -> Result<BigRational> {
    if nu < 0 || mu < 0 {
        return Err(Error::invalid(format!(
            "exact Jacobi evaluation needs integer nu, mu >= 0, got nu={nu}, mu={mu}"
        )));
    }
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let n = degree as i64;
    let z = (BigRational::one() - x) / int(2);
    let mut term = BigRational::one();
    let mut series = BigRational::one();
    for k in 0..n {
        let ratio = BigRational::new(
            BigInt::from(k - n) * BigInt::from(n + nu + mu + 1 + k),
            BigInt::from(nu + 1 + k) * BigInt::from(k + 1),
        );
        term = term * ratio * &z;
        series += &term;
    }
    // (ν+1)_n / n! = C(n+ν, n) for integer ν.
    let prefactor = BigRational::from_integer(binomial_big(n + nu, n));
    Ok(prefactor * series)
}

/// `P^{ν,μ}_n(0)` exactly.
pub fn jacobi_at_zero(degree: usize, nu: i64, mu: i64) -> Result<BigRational> {
    jacobi_p_exact(degree, nu, mu, &BigRational::zero())
}

pub fn binomial_big(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn check_identity_range(k: usize, n: usize) -> Result<()> {
    if k == 0 || 2 * k > n {
        return Err(Error::invalid(format!(
            "identity needs 1 <= k <= n/2, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// `Σ_{γ=1}^{k} (-1)^{γ-1} (1/γ) C(k-1, γ-1) C(n-k-1, γ-1)`, exactly.
pub fn weighted_alternating_sum(k: usize, n: usize) -> Result<BigRational> {
    check_identity_range(k, n)?;
    let (k, n) = (k as i64, n as i64);
    let mut acc = BigRational::zero();
    for g in 1..=k {
        let term = BigRational::new(
            binomial_big(k - 1, g - 1) * binomial_big(n - k - 1, g - 1),
            BigInt::from(g),
        );
        if g % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `Σ_{γ=1}^{k} (-1)^{γ-1} C(k-1, γ-1) C(n-k-1, γ-1)`, exactly.
pub fn alternating_sum(k: usize, n: usize) -> Result<BigInt> {
    check_identity_range(k, n)?;
    let (k, n) = (k as i64, n as i64);
    let mut acc = BigInt::zero();
    for g in 1..=k {
        let term = binomial_big(k - 1, g - 1) * binomial_big(n - k - 1, g - 1);
        if g % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `(1/k) 2^{k-1} P^{1, n-2k}_{k-1}(0)`, the Jacobi form of
/// [`weighted_alternating_sum`].
pub fn weighted_alternating_sum_jacobi(k: usize, n: usize) -> Result<BigRational> {
    check_identity_range(k, n)?;
    let p = jacobi_at_zero(k - 1, 1, (n - 2 * k) as i64)?;
    Ok(p * BigRational::new(BigInt::one() << (k - 1), BigInt::from(k)))
}

/// `2^{k-1} P^{0, n-2k}_{k-1}(0)`, the Jacobi form of [`alternating_sum`].
pub fn alternating_sum_jacobi(k: usize, n: usize) -> Result<BigRational> {
    check_identity_range(k, n)?;
    let p = jacobi_at_zero(k - 1, 0, (n - 2 * k) as i64)?;
    Ok(p * BigRational::from_integer(BigInt::one() << (k - 1)))
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: &BigRational, b: &BigRational) -> f64 {
    let scale = if a.abs() > b.abs() { a.abs() } else { b.abs() };
    if scale.is_zero() {
        return 0.0;
    }
    ((a - b).abs() / scale).to_f64().unwrap_or(f64::INFINITY)
}
