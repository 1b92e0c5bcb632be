use crate::error::{Error, Result};
use crate::exact::{falling_factorial, Rational};

use super::DiffOperator;

/// Moments `mu_0..=mu_n` of any law annihilated by `op`, propagated from
/// `seeds` through `E[(A x^k)(W)] = 0`.
///
/// With `d0 = deg p_0`, relation `k` reads
/// `lead(p_0) mu_{k+d0} + (terms in mu_j, j < k + d0) = 0`, which needs
/// `deg p_m - m < d0` for every `m >= 1`. Seeds must supply
/// `mu_0..mu_{d0-1}`; any further seeds are checked against the relations.
pub fn moment_recursion(op: &DiffOperator, seeds: &[Rational], n: usize) -> Result<Vec<Rational>> {
    let p0 = op.coefficient(0);
    let Some(d0) = p0.degree() else {
        return Err(Error::RecursionNotClosed("p_0 is zero".into()));
    };
    if d0 == 0 {
        return Err(Error::RecursionNotClosed(
            "p_0 is constant, so no relation reaches a new moment".into(),
        ));
    }
    for (m, p) in op.coefficients().iter().enumerate().skip(1) {
        if let Some(dm) = p.degree() {
            if dm >= d0 + m {
                return Err(Error::RecursionNotClosed(format!(
                    "p_{m} has degree {dm}, which reaches moment order k + {} >= k + {d0}",
                    dm - m
                )));
            }
        }
    }
    if seeds.len() < d0 {
        return Err(Error::InsufficientSeeds {
            needed: d0,
            given: seeds.len(),
        });
    }

    let lead = p0.leading_coeff().expect("nonzero").clone();
    let mut mu: Vec<Rational> = seeds.iter().take(d0).cloned().collect();
    let top = n.max(seeds.len().saturating_sub(1));
    let mut k = 0;
    while k + d0 <= top {
        // sum over m of p_m(x) * k^(m) x^{k-m}, every exponent below k + d0
        // except p_0's leading term.
        let mut rest = Rational::zero();
        for (m, p) in op.coefficients().iter().enumerate().take(k + 1) {
            let ff = Rational::from_bigint(falling_factorial(k, m));
            for (e, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() || (m == 0 && e == d0) {
                    continue;
                }
                rest += &(c * &ff * &mu[k - m + e]);
            }
        }
        let forced = -rest / &lead;
        let index = k + d0;
        if let Some(seed) = seeds.get(index) {
            if *seed != forced {
                return Err(Error::SeedMismatch {
                    index,
                    seed: seed.to_string(),
                    forced: forced.to_string(),
                });
            }
        }
        mu.push(forced);
        k += 1;
    }
    mu.truncate(n + 1);
    Ok(mu)
}
