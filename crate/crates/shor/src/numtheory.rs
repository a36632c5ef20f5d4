//! Classical number theory for instance setup and post-processing.

use num_integer::Integer;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mod_mul(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub fn mod_pow(base: u64, mut exp: u64, n: u64) -> u64 {
    if n == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mod_mul(result, b, n);
        }
        b = mod_mul(b, b, n);
        exp >>= 1;
    }
    result
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inv(a: u64, n: u64) -> Option<u64> {
    let e = (a as i128 % n as i128).extended_gcd(&(n as i128));
    (e.gcd == 1).then(|| e.x.rem_euclid(n as i128) as u64)
}

/// Prime factorization by trial division, as ascending `(prime, exponent)`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// True for `p^k` with `p` prime and `k >= 1`.
pub fn is_prime_power(n: u64) -> bool {
    factorize(n).len() == 1
}

/// Carmichael function: the largest multiplicative order modulo `n`.
pub fn carmichael(n: u64) -> u64 {
    factorize(n).into_iter().fold(1, |acc, (p, e)| {
        let pe = p.pow(e);
        let l = if p == 2 && e >= 3 {
            pe / 4
        } else {
            pe / p * (p - 1)
        };
        lcm(acc, l)
    })
}

/// Multiplicative order of `g` modulo `n`, or `None` if `g` is not a unit.
pub fn multiplicative_order(g: u64, n: u64) -> Option<u64> {
    if n < 2 || gcd(g, n) != 1 {
        return None;
    }
    let lambda = carmichael(n);
    // The order divides lambda; strip prime factors while g^(order/p) = 1.
    let mut order = lambda;
    for (p, _) in factorize(lambda) {
        while order.is_multiple_of(p) && mod_pow(g, order / p, n) == 1 {
            order /= p;
        }
    }
    Some(order)
}

/// Smallest unit of maximal order whose half-order power is not `-1`, so
/// that finding the order always yields a nontrivial split of `n`.
pub fn find_factoring_generator(n: u64) -> Option<u64> {
    let lambda = carmichael(n);
    (2..n).find(|&g| {
        multiplicative_order(g, n) == Some(lambda)
            && lambda.is_multiple_of(2)
            && mod_pow(g, lambda / 2, n) != n - 1
    })
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> Option<u64> {
    if !is_prime(p) {
        return None;
    }
    if p == 2 {
        return Some(1);
    }
    (2..p).find(|&g| multiplicative_order(g, p) == Some(p - 1))
}

/// Continued-fraction convergents `(numerator, denominator)` of `num / den`.
pub fn convergents(num: u64, den: u64) -> Vec<(u64, u64)> {
    let (mut a, mut b) = (num as u128, den as u128);
    let (mut h0, mut h1) = (0u128, 1u128);
    let (mut k0, mut k1) = (1u128, 0u128);
    let mut out = Vec::new();
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (h0, h1) = (h1, q * h1 + h0);
        (k0, k1) = (k1, q * k1 + k0);
        out.push((h1 as u64, k1 as u64));
    }
    out
}

/// Order candidate from a measured phase `j / 2^m`: the smallest convergent
/// denominator `r < n` with `g^r = 1 (mod n)`.
pub fn continued_fraction_order(j: u64, m: u32, n: u64, g: u64) -> Option<u64> {
    if j == 0 {
        return None;
    }
    convergents(j, 1u64 << m)
        .into_iter()
        .map(|(_, r)| r)
        .filter(|&r| r > 0 && r < n)
        .filter(|&r| mod_pow(g, r, n) == 1)
        .min()
}

/// Denominators of all convergents of `j / 2^m` below `n`.
pub fn convergent_denominators(j: u64, m: u32, n: u64) -> Vec<u64> {
    convergents(j, 1u64 << m)
        .into_iter()
        .map(|(_, r)| r)
        .filter(|&r| r > 0 && r < n)
        .collect()
}

/// Nontrivial factor pair of `n` from an even order `r` of `g`.
pub fn factors_from_order(g: u64, r: u64, n: u64) -> Option<(u64, u64)> {
    if !r.is_multiple_of(2) {
        return None;
    }
    let half = mod_pow(g, r / 2, n);
    if half == n - 1 || half == 1 {
        return None;
    }
    [half + 1, half + n - 1].into_iter().find_map(|v| {
        let f = gcd(v % n, n);
        (f > 1 && f < n).then(|| (f.min(n / f), f.max(n / f)))
    })
}

/// Nearest integer to `j * r / 2^m`, reduced modulo `r`.
pub fn round_phase(j: u64, m: u32, r: u64) -> u64 {
    let num = j as u128 * r as u128;
    let half = 1u128 << (m - 1);
    (((num + half) >> m) % r as u128) as u64
}

/// All `d` in `[0, r)` with `s * d = t (mod r)`, provided there are at most
/// `max_candidates` of them.
pub fn solve_linear_congruence(s: u64, t: u64, r: u64, max_candidates: u64) -> Vec<u64> {
    let g = gcd(s, r);
    if !t.is_multiple_of(g) || g > max_candidates {
        return Vec::new();
    }
    let r1 = r / g;
    let d0 = if r1 == 1 {
        0
    } else {
        mod_mul(t / g % r1, mod_inv(s / g % r1, r1).expect("coprime"), r1)
    };
    (0..g).map(|i| d0 + i * r1).collect()
}
