//! Small combinatorics helpers shared by the enumerators and the verifier.

use num_bigint::BigUint;

/// Calls `f` on every strictly increasing `k`-subset of `0..n`, in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance the rightmost index that can still move
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Ordered compositions of `total` into `parts` nonnegative summands.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; parts];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
    }
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_counted() {
        for n in 0..9 {
            for k in 0..=n {
                let mut count = 0u128;
                let mut last: Option<Vec<usize>> = None;
                for_each_combination(n, k, |c| {
                    count += 1;
                    assert!(c.windows(2).all(|w| w[0] < w[1]));
                    if let Some(l) = &last {
                        assert!(l.as_slice() < c);
                    }
                    last = Some(c.to_vec());
                });
                assert_eq!(count, binomial_u128(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn binomials_agree() {
        assert_eq!(binomial(255, 127).to_string().len(), 76);
        assert_eq!(binomial(31, 3), BigUint::from(4495u32));
        assert_eq!(binomial_u128(31, 3), 4495);
    }

    #[test]
    fn composition_counts() {
        // C(w + b - 1, b - 1)
        assert_eq!(compositions(3, 4).len(), 20);
        assert!(compositions(2, 3).iter().all(|c| c.iter().sum::<usize>() == 2));
        assert_eq!(compositions(0, 0).len(), 1);
    }
}
