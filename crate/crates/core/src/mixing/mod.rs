//! Restricted operator products, the exchange lemmas and the mixing theorems.

mod exchange;
mod products;
mod theorem;

use crate::error::{Error, Result};
use crate::scalar::factorial;

pub use exchange::{verify_exchange_lemmas, ExchangeReport};
pub use products::{
    bottom_product_value, restricted_lower_product, restricted_upper_product, spanning_indicator, BottomProduct,
    ProductContext,
};
pub use theorem::{
    random_family, random_partite_family, verify_mixing, verify_partite_mixing, Bracket, Hypothesis, MixingReport,
    RegularForm,
};

/// (k+1)(k+2)^{n-k} - (k+1)^{n-k+1}, the k-th summand of C_n.
pub fn bracket_constant(n: usize, k: usize) -> Result<u128> {
    if k >= n {
        return Err(Error::LevelOutOfRange { k: k as isize, min: 0, max: n as isize - 1 });
    }
    let e = (n - k) as u32;
    let k1 = (k + 1) as u128;
    let a = (k + 2) as u128;
    let hi = a.checked_pow(e).and_then(|p| p.checked_mul(k1)).ok_or(Error::Overflow(n))?;
    let lo = k1.checked_pow(e + 1).ok_or(Error::Overflow(n))?;
    Ok(hi - lo)
}

/// C_n = Σ_{k=0}^{n-1} ((k+1)(k+2)^{n-k} - (k+1)^{n-k+1}).
pub fn constant_c(n: usize) -> Result<u128> {
    if n < 1 {
        return Err(Error::InvalidArgument("C_n needs n >= 1".into()));
    }
    (0..n).try_fold(0u128, |acc, k| acc.checked_add(bracket_constant(n, k)?).ok_or(Error::Overflow(n)))
}

/// Σ_{k=0}^{n-1} n! (n+1-k)^{n-k} / (n-k-1)! · ((k+1)(k+2)^{n-k} - (k+1)^{n-k+1}).
pub fn constant_c_partite(n: usize) -> Result<u128> {
    if n < 1 {
        return Err(Error::InvalidArgument("C_n needs n >= 1".into()));
    }
    (0..n).try_fold(0u128, |acc, k| {
        let falling = factorial(n) / factorial(n - k - 1);
        let pow = ((n + 1 - k) as u128).checked_pow((n - k) as u32).ok_or(Error::Overflow(n))?;
        let term = falling
            .checked_mul(pow)
            .and_then(|t| t.checked_mul(bracket_constant(n, k).ok()?))
            .ok_or(Error::Overflow(n))?;
        acc.checked_add(term).ok_or(Error::Overflow(n))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_oracle(n: usize) -> f64 {
        (0..n)
            .map(|k| (k as f64 + 1.0) * (k as f64 + 2.0).powi((n - k) as i32) - (k as f64 + 1.0).powi((n - k + 1) as i32))
            .sum()
    }

    #[test]
    fn constants() {
        assert_eq!(constant_c(1).unwrap(), 1);
        assert_eq!(constant_c(2).unwrap(), 5);
        assert_eq!(constant_c(3).unwrap(), 20);
        assert_eq!(bracket_constant(2, 0).unwrap(), 3);
        assert_eq!(bracket_constant(2, 1).unwrap(), 2);
        assert_eq!(constant_c_partite(1).unwrap(), 2);
        assert_eq!(constant_c_partite(2).unwrap(), 62);
        for n in 1..10 {
            assert_eq!(constant_c(n).unwrap() as f64, c_oracle(n));
        }
        assert!(constant_c(0).is_err());
        assert!(constant_c_partite(0).is_err());
    }
}
