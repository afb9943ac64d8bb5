//! Small exact combinatorics helpers.

use num_bigint::BigInt;
use num_traits::One;

pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// `(Σ e)! / Π e!`
pub fn multinomial(exps: &[u32]) -> BigInt {
    let mut acc = BigInt::one();
    let mut total = 0;
    for &e in exps {
        total += e;
        acc *= binomial(total, e);
    }
    acc
}

/// All vectors of `parts` non-negative integers summing to `total`, in
/// lexicographically decreasing order of the first entry.
pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = rest;
            out.push(cur.clone());
            return;
        }
        for e in (0..=rest).rev() {
            cur[slot] = e;
            rec(rest - e, slot + 1, cur, out);
        }
    }
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(total, 0, &mut vec![0; parts], &mut out);
    out
}

/// Distinct permutations of `word` in lexicographic order.
pub fn distinct_permutations(word: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = word.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Set partitions of `{0..n}` as restricted growth strings, in
/// lexicographic order. Entry `i` is the block of element `i`.
pub fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[pos] = b;
            rec(pos + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    rec(1, 0, &mut cur, &mut out);
    out
}
