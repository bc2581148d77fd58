//! Perfect ranking of fixed-size multisets (occupation vectors).
//!
//! An occupation vector over `m` modes with total `n` is read as the sorted
//! list of occupied mode indices `i_0 <= .. <= i_{n-1}`, shifted to the strictly
//! increasing combination `c_r = i_r + r`. Its rank is `sum_r C(c_r, r + 1)`
//! (combinatorial number system), so the induced order is colexicographic in
//! the combination.

/// Number of occupation vectors of total `n` over `m` modes, `C(n + m - 1, n)`.
/// `None` on `u128` overflow.
pub fn multiset_count(n: u32, m: usize) -> Option<u128> {
    if m == 0 {
        return Some(u128::from(n == 0));
    }
    let mut acc: u128 = 1;
    for i in 1..=n as u128 {
        acc = acc.checked_mul(m as u128 - 1 + i)? / i;
    }
    Some(acc)
}

/// Pascal table `C(a, b)` for `a <= a_max`, `b <= b_max`, saturating at
/// `u64::MAX` (only comparisons against in-range ranks are ever made).
#[derive(Clone, Debug)]
pub struct Binomials {
    b_max: usize,
    table: Vec<u64>,
}

impl Binomials {
    pub fn new(a_max: usize, b_max: usize) -> Self {
        let w = b_max + 1;
        let mut table = vec![0u64; (a_max + 1) * w];
        for a in 0..=a_max {
            table[a * w] = 1;
            for b in 1..=b_max.min(a) {
                let up = table[(a - 1) * w + b - 1];
                let left = if b <= a - 1 { table[(a - 1) * w + b] } else { 0 };
                table[a * w + b] = up.saturating_add(left);
            }
        }
        Self { b_max, table }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        debug_assert!(b <= self.b_max);
        let w = self.b_max + 1;
        if a * w + b >= self.table.len() {
            return 0;
        }
        self.table[a * w + b]
    }
}

/// Rank of `occ` among occupation vectors with the same total.
#[inline]
pub fn rank_multiset(binom: &Binomials, occ: &[u32]) -> u64 {
    let mut rank = 0u64;
    let mut r = 0usize;
    for (mode, &count) in occ.iter().enumerate() {
        for _ in 0..count {
            rank += binom.get(mode + r, r + 1);
            r += 1;
        }
    }
    rank
}

/// Inverse of [`rank_multiset`]: writes the occupation vector of total `n`
/// over `occ.len()` modes with the given rank.
pub fn unrank_multiset(binom: &Binomials, mut rank: u64, n: u32, occ: &mut [u32]) {
    occ.iter_mut().for_each(|o| *o = 0);
    let m = occ.len();
    if n == 0 {
        return;
    }
    let mut c = n as usize + m - 2;
    for r in (0..n as usize).rev() {
        while binom.get(c, r + 1) > rank {
            c -= 1;
        }
        rank -= binom.get(c, r + 1);
        occ[c - r] += 1;
        if c > 0 {
            c -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enumerate_brute(n: u32, m: usize) -> Vec<Vec<u32>> {
        fn rec(n: u32, m: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == m - 1 {
                prefix.push(n);
                out.push(prefix.clone());
                prefix.pop();
                return;
            }
            for k in 0..=n {
                prefix.push(k);
                rec(n - k, m, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, m, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn counts() {
        assert_eq!(multiset_count(2, 3), Some(6));
        assert_eq!(multiset_count(5, 1), Some(1));
        assert_eq!(multiset_count(20, 5), Some(10626));
        assert_eq!(multiset_count(0, 0), Some(1));
        assert_eq!(multiset_count(3, 0), Some(0));
        assert_eq!(multiset_count(20, 5).unwrap() as usize, enumerate_brute(20, 5).len());
    }

    #[test]
    fn rank_is_a_bijection_onto_prefix() {
        for m in 1..=5 {
            for n in 0..=6u32 {
                let b = Binomials::new(n as usize + m, n as usize + 1);
                let all = enumerate_brute(n, m);
                let mut ranks: Vec<u64> = all.iter().map(|o| rank_multiset(&b, o)).collect();
                ranks.sort_unstable();
                let expected: Vec<u64> = (0..all.len() as u64).collect();
                assert_eq!(ranks, expected, "m={m} n={n}");
                let mut occ = vec![0; m];
                for o in &all {
                    unrank_multiset(&b, rank_multiset(&b, o), n, &mut occ);
                    assert_eq!(&occ, o);
                }
            }
        }
    }

    #[test]
    fn saturation_does_not_break_small_ranks() {
        let b = Binomials::new(200, 100);
        assert_eq!(b.get(200, 100), u64::MAX);
        let mut occ = vec![0; 3];
        unrank_multiset(&b, 5, 2, &mut occ);
        assert_eq!(rank_multiset(&b, &occ), 5);
    }
}
