//! Small integer helpers shared by the group code.

use num_integer::Integer;

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
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

/// Prime-power components of `n`, e.g. 104 -> [8, 13].
pub fn prime_power_parts(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, e)| p.pow(e)).collect()
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    factorize(n).into_iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn inv_mod(a: u64, n: u64) -> Option<u64> {
    if n == 1 {
        return Some(0);
    }
    let e = (a as i64).extended_gcd(&(n as i64));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n as i64) as u64)
}

/// Order of GL(2, Z/nZ).
pub fn gl2_order(n: u64) -> u64 {
    sl2_order(n) * phi(n)
}

/// Order of SL(2, Z/nZ).
pub fn sl2_order(n: u64) -> u64 {
    factorize(n).into_iter().fold(1, |acc, (p, e)| {
        let pk = p.pow(e);
        acc * pk * pk * pk / (p * p) * (p * p - 1)
    })
}

/// A generating set of the unit group (Z/nZ)^x, chosen greedily in increasing order.
pub fn unit_generators(n: u64) -> Vec<u64> {
    let target = phi(n) as usize;
    let mut gens = Vec::new();
    let mut span = vec![false; n as usize];
    let mut size = 1;
    if n > 1 {
        span[1] = true;
    }
    for u in 2..n {
        if size == target {
            break;
        }
        if u.gcd(&n) != 1 || span[u as usize] {
            continue;
        }
        gens.push(u);
        let mut stack: Vec<u64> = (0..n).filter(|&x| span[x as usize]).collect();
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = x * g % n;
                if !span[y as usize] {
                    span[y as usize] = true;
                    size += 1;
                    stack.push(y);
                }
            }
        }
    }
    gens
}

/// Chinese remainder combination of `a mod m` and `b mod n` for coprime `m`, `n`.
pub fn crt(a: u64, m: u64, b: u64, n: u64) -> Option<u64> {
    let mn = m * n;
    let m_inv = inv_mod(m % n, n)?;
    let diff = (b + n - a % n) % n;
    let k = diff * m_inv % n;
    Some((a + m * k) % mn)
}
