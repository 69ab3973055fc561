//! Exact arbitrary-precision counting primitives.
//!
//! Everything counted in this crate (binomials, Stirling partition numbers,
//! falling factorials, tree-shape counts) is kept as an exact unbounded
//! integer; floats only ever appear after taking logarithms. Binomials and
//! Stirling numbers are memoized in tables grown on demand because the bound
//! recursions request the same arguments heavily.

use std::collections::HashMap;
use std::sync::{LazyLock, Mutex};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact nonnegative integer of unbounded magnitude.
pub type BigCount = BigUint;

/// Pascal-triangle rows are cached up to this `n`; larger arguments fall back
/// to the multiplicative formula.
const PASCAL_ROW_CAP: u64 = 256;

static PASCAL: LazyLock<Mutex<Vec<Vec<BigUint>>>> = LazyLock::new(|| Mutex::new(vec![vec![BigUint::one()]]));

static STIRLING: LazyLock<Mutex<HashMap<(u64, u64), BigUint>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

static WEDDERBURN: LazyLock<Mutex<Vec<BigUint>>> =
    LazyLock::new(|| Mutex::new(vec![BigUint::zero(), BigUint::one()]));

/// Binomial coefficient C(n, k); zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    if k == 0 {
        return BigUint::one();
    }
    if n <= PASCAL_ROW_CAP {
        let mut table = PASCAL.lock().unwrap();
        while (table.len() as u64) <= n {
            let prev = table.last().unwrap();
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(BigUint::one());
            for w in prev.windows(2) {
                row.push(&w[0] + &w[1]);
            }
            row.push(BigUint::one());
            table.push(row);
        }
        return table[n as usize][k as usize].clone();
    }
    // C(n, k) = prod_{i=1..k} (n-k+i)/i, integral at every step when the
    // factors are multiplied in this order.
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// n! for small n.
pub fn factorial(n: u64) -> BigCount {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// Stirling number of the second kind S(m, c): the number of ways to split an
/// m-element set into c nonempty unlabeled parts. S(0, 0) = 1 and
/// S(m, c) = 0 for c > m.
pub fn stirling2(m: u64, c: u64) -> BigCount {
    if c > m {
        return BigUint::zero();
    }
    if c == m {
        return BigUint::one(); // covers S(0, 0) = 1
    }
    if c == 0 {
        return BigUint::zero(); // m > 0 here
    }
    if c == 1 {
        return BigUint::one();
    }
    if let Some(v) = STIRLING.lock().unwrap().get(&(m, c)) {
        return v.clone();
    }
    // S(m, c) = (1/c!) * sum_{j=0}^{c-1} (-1)^j C(c, j) (c-j)^m
    let mut sum = BigInt::zero();
    for j in 0..c {
        let term = BigInt::from(binomial(c, j)) * BigInt::from(c - j).pow(m as u32);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    debug_assert!(!sum.is_negative());
    let fact = factorial(c);
    debug_assert!((sum.magnitude() % &fact).is_zero());
    let quot = sum.magnitude() / fact;
    STIRLING.lock().unwrap().insert((m, c), quot.clone());
    quot
}

/// Falling factorial (n)_a = n (n-1) ... (n-a+1); the number of ways to
/// injectively label a parts with n classes. Zero when `a > n`, one when
/// `a == 0`.
pub fn falling_factorial(n: u64, a: u64) -> BigCount {
    if a > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..a {
        acc *= n - i;
    }
    acc
}

/// Number of structurally distinct binary trees with `leaves` leaves, where
/// mirror images count once.
pub fn wedderburn_etherington(leaves: u64) -> Result<BigCount> {
    if leaves == 0 {
        return Err(Error::InvalidArgument(
            "wedderburn_etherington requires at least one leaf".into(),
        ));
    }
    let mut table = WEDDERBURN.lock().unwrap();
    while (table.len() as u64) <= leaves {
        let l = table.len() as u64;
        let mut acc = BigUint::zero();
        for i in 1..=(l - 1) / 2 {
            acc += &table[i as usize] * &table[(l - i) as usize];
        }
        if l.is_multiple_of(2) {
            let half = &table[(l / 2) as usize];
            acc += (half * (half + BigUint::one())) >> 1;
        }
        table.push(acc);
    }
    Ok(table[leaves as usize].clone())
}

/// Natural logarithm of a huge exact integer, from its bit length plus the
/// high-order bits. Relative error stays far below 1e-12.
pub fn ln_big(x: &BigCount) -> Result<f64> {
    if x.is_zero() {
        return Err(Error::InvalidArgument("ln_big requires x >= 1".into()));
    }
    let bits = x.bits();
    if bits <= 64 {
        return Ok(x.to_f64().expect("fits in f64 range").ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit head fits");
    Ok(top.ln() + shift as f64 * std::f64::consts::LN_2)
}
