//! The explicit lower bounds on `p`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `C(n, d-1) · (2N)^{n-d+1}`: above this, some `Λ ≤ Λδ` holds.
pub fn bound_prop(n: usize, d: usize, n_value: u64) -> BigUint {
    let base = BigUint::from(2u64) * BigUint::from(n_value);
    binomial(n, d - 1) * base.pow((n - d + 1) as u32)
}

/// `2 C(n,d) C(n,d-1) (2 C(n,d-1) N + 1)^{n-d+1}`: above this, some integral
/// weight is certified.
pub fn bound_m(n: usize, d: usize, n_value: u64) -> BigUint {
    let c_d = binomial(n, d);
    let c_dm1 = binomial(n, d - 1);
    let base = BigUint::from(2u64) * &c_dm1 * BigUint::from(n_value) + BigUint::one();
    BigUint::from(2u64) * c_d * c_dm1 * base.pow((n - d + 1) as u32)
}
