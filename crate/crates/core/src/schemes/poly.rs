//! Arithmetic in `Z₂[x]/(xⁿ + 1)` with polynomials packed as bitmasks
//! (bit `i` is the coefficient of `xⁱ`).

use crate::bits::mask;

/// Multiplication by `xᵏ` is a cyclic rotation of the `n` coefficients.
#[inline]
pub fn rotate(a: u64, k: u32, n: u32) -> u64 {
    let k = k % n;
    if k == 0 {
        return a & mask(n);
    }
    ((a << k) | (a >> (n - k))) & mask(n)
}

#[inline]
pub fn mul(a: u64, b: u64, n: u32) -> u64 {
    let mut acc = 0;
    let mut b = b & mask(n);
    while b != 0 {
        let k = b.trailing_zeros();
        acc ^= rotate(a, k, n);
        b &= b - 1;
    }
    acc
}

/// Multiplicative inverse by exhaustive search; `n` is at most a few bits here.
pub fn inverse(a: u64, n: u32) -> Option<u64> {
    (1..=mask(n)).find(|&z| mul(a, z, n) == 1)
}
