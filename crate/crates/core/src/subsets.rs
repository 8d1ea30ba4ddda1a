//! Colexicographic enumeration of fixed-size subsets of {0..n-1}.
//!
//! Colex order lists a subset S before T exactly when the largest element of
//! the symmetric difference lies in T. Verification sweeps iterate in this
//! order so that failure witnesses are canonical, and parallel sweeps unrank
//! indices so the order is independent of the worker count.

/// Number of k-subsets of an n-set, as u128 (saturating).
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The subset at position `rank` (0-based) of colex order, ascending elements.
pub fn colex_unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    debug_assert!(rank < binomial_u128(n, k));
    let mut out = vec![0usize; k];
    let mut kk = k;
    // choose elements from largest down: the largest element c is the
    // greatest value with binomial(c, kk) <= rank.
    let mut c = n;
    while kk > 0 {
        c -= 1;
        let b = binomial_u128(c, kk);
        if b <= rank {
            rank -= b;
            out[kk - 1] = c;
            kk -= 1;
        }
    }
    out
}

/// Colex position of an ascending subset.
pub fn colex_rank(set: &[usize]) -> u128 {
    set.iter()
        .enumerate()
        .map(|(i, &c)| binomial_u128(c, i + 1))
        .sum()
}

/// In-place advance to the next subset in colex order; false at the end.
pub fn colex_next(set: &mut [usize], n: usize) -> bool {
    let k = set.len();
    for i in 0..k {
        let cap = if i + 1 < k { set[i + 1] } else { n };
        if set[i] + 1 < cap {
            set[i] += 1;
            for (j, slot) in set.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// The subset at position `rank` (0-based) of ascending lexicographic
/// order, ascending elements.
pub fn lex_unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    debug_assert!(rank < binomial_u128(n, k));
    let mut out = Vec::with_capacity(k);
    let mut next = 0usize;
    for i in 0..k {
        let mut c = next;
        loop {
            let with_c = binomial_u128(n - 1 - c, k - 1 - i);
            if rank < with_c {
                break;
            }
            rank -= with_c;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    out
}

/// Iterator over all k-subsets of {0..n-1} in colex order.
pub fn colex_subsets(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur: Option<Vec<usize>> = if k <= n {
        Some((0..k).collect())
    } else {
        None
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let more = {
            let c = cur.as_mut().unwrap();
            colex_next(c, n)
        };
        if !more {
            cur = None;
        }
        Some(out)
    })
}
