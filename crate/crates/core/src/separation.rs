//! Separation verdicts and the exhaustive ground-truth oracle.
//!
//! A matrix H whose rows lie in the dual code is S-separating when
//! rank(H(S)) = n - k - |S|, and l-separating when that holds for every
//! coordinate set of size at most l. For l <= min(d, n-k) - 1 it suffices
//! to check the sets of size exactly l; the one exceptional case, erasure
//! sets of size n - k in an MDS code, is separating unconditionally.

use rayon::prelude::*;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::GFMatrix;
use crate::subsets::{binomial_u128, colex_subsets, colex_unrank, lex_unrank};

/// Outcome of a separation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationVerdict {
    pub separating: bool,
    /// First failing coordinate set in colex order, when not separating.
    pub witness: Option<Vec<usize>>,
    pub achieved_rank: usize,
    pub required_rank: usize,
    pub note: Option<String>,
}

impl SeparationVerdict {
    fn pass(required: usize) -> SeparationVerdict {
        SeparationVerdict {
            separating: true,
            witness: None,
            achieved_rank: required,
            required_rank: required,
            note: None,
        }
    }

    fn fail(witness: Vec<usize>, achieved: usize, required: usize) -> SeparationVerdict {
        SeparationVerdict {
            separating: false,
            witness: Some(witness),
            achieved_rank: achieved,
            required_rank: required,
            note: None,
        }
    }
}

/// Reject rows of `h` outside the dual code of `code`.
fn validate_rows_in_dual(code: &LinearCode, h: &GFMatrix) -> Result<()> {
    if h.field() != code.field() {
        return Err(Error::MismatchedFields);
    }
    if h.cols() != code.params().n {
        return Err(Error::DimensionMismatch(format!(
            "{} columns vs code length {}",
            h.cols(),
            code.params().n
        )));
    }
    for r in 0..h.rows() {
        if !code.pcm().row_space_contains(h.row(r)) {
            return Err(Error::RowNotInDual { row: r });
        }
    }
    Ok(())
}

/// Is `h` S-separating for the given coordinate set?
pub fn is_s_separating(
    code: &LinearCode,
    h: &GFMatrix,
    s: &[usize],
) -> Result<SeparationVerdict> {
    validate_rows_in_dual(code, h)?;
    let p = code.params();
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() >= p.d {
        return Err(Error::ErasureTooLarge {
            size: s.len(),
            d: p.d,
        });
    }
    let required = p.n - p.k - s.len();
    let (hs, _) = h.extract_hs(&s)?;
    let achieved = hs.rank();
    if achieved == required {
        Ok(SeparationVerdict::pass(required))
    } else {
        Ok(SeparationVerdict::fail(s, achieved, required))
    }
}

fn check_l_range(code: &LinearCode, l: usize) -> Result<LKind> {
    let p = code.params();
    let max = p.max_l();
    if (1..=max).contains(&l) {
        Ok(LKind::Regular)
    } else if p.is_mds() && l == p.n - p.k && l >= 1 {
        Ok(LKind::MdsFull)
    } else {
        Err(Error::LOutOfRange { l, max })
    }
}

enum LKind {
    Regular,
    /// l = n - k for an MDS code: every parity-check matrix is S-separating
    /// for every set of that size, unconditionally.
    MdsFull,
}

/// Is `h` S-separating for every coordinate set of size exactly `l`?
/// For l <= min(d, n-k) - 1 this is equivalent to the full definition over
/// all sizes <= l. Subsets are swept from the high coordinates down
/// (descending lexicographic order) and the first failure is the canonical
/// witness; the sweep parallelizes with a worker-count-independent result.
pub fn is_l_separating(code: &LinearCode, h: &GFMatrix, l: usize) -> Result<SeparationVerdict> {
    validate_rows_in_dual(code, h)?;
    let p = code.params();
    match check_l_range(code, l)? {
        LKind::MdsFull => {
            let mut v = SeparationVerdict::pass(0);
            v.note = Some(
                "erasure sets of size n-k in an MDS code are separating for any \
                 parity-check matrix; sets of size exactly l were certified"
                    .into(),
            );
            return Ok(v);
        }
        LKind::Regular => {}
    }
    let required = p.n - p.k - l;
    let total = binomial_u128(p.n, l);
    if total > 100_000_000 {
        return Err(Error::SearchGuard(format!("{total} subsets of size {l}")));
    }
    let total = total as u64;
    let failure = (0..total)
        .into_par_iter()
        .find_first(|&idx| {
            let s = lex_unrank(p.n, l, (total - 1 - idx) as u128);
            let (hs, _) = h.extract_hs(&s).expect("indices in range");
            hs.rank() != required
        })
        .map(|idx| lex_unrank(p.n, l, (total - 1 - idx) as u128));
    match failure {
        None => Ok(SeparationVerdict::pass(required)),
        Some(s) => {
            let (hs, _) = h.extract_hs(&s)?;
            let achieved = hs.rank();
            Ok(SeparationVerdict::fail(s, achieved, required))
        }
    }
}

/// The definitional check over every size 1..=l, for cross-validation.
pub fn is_l_separating_all_sizes(
    code: &LinearCode,
    h: &GFMatrix,
    l: usize,
) -> Result<SeparationVerdict> {
    validate_rows_in_dual(code, h)?;
    let p = code.params();
    if l == 0 || l >= p.d {
        return Err(Error::LOutOfRange {
            l,
            max: p.d.saturating_sub(1),
        });
    }
    for size in 1..=l {
        let required = p.n - p.k - size;
        let total = binomial_u128(p.n, size);
        for idx in 0..total {
            let s = lex_unrank(p.n, size, total - 1 - idx);
            let (hs, _) = h.extract_hs(&s)?;
            let achieved = hs.rank();
            if achieved != required {
                return Ok(SeparationVerdict::fail(s, achieved, required));
            }
        }
    }
    Ok(SeparationVerdict::pass(p.n - p.k - l))
}

/// Guards for the exhaustive minimum search.
#[derive(Debug, Clone)]
pub struct OracleOptions {
    /// Give up above this many rows (search is m = n-k, n-k+1, ...).
    pub max_rows: usize,
    /// Cap on the number of projective dual representatives.
    pub max_projective: usize,
    /// Cap on candidate row subsets examined per row-count level.
    pub max_subsets_per_level: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_rows: 24,
            max_projective: 64,
            max_subsets_per_level: 100_000_000,
        }
    }
}

/// An exact separating-redundancy value with a witnessing minimum matrix.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub value: usize,
    pub matrix: GFMatrix,
}

/// Exact l-separating redundancy of a tiny code by exhaustive search over
/// row subsets of the projective representatives of the nonzero dual
/// codewords (row scaling and duplicate rows never help, so this loses no
/// generality). Deterministic: representatives are ordered lexicographically
/// by their coordinate tuples and subsets searched in colex order.
pub fn exact_separating_redundancy(
    code: &LinearCode,
    l: usize,
    opts: &OracleOptions,
) -> Result<OracleOutcome> {
    let p = *code.params();
    match check_l_range(code, l)? {
        LKind::MdsFull => {
            // s_{n-k} = s_{n-k-1} for an MDS code; the size-(n-k) sets are
            // free, so minimize over the next level down (or any full-rank
            // parity-check matrix when there is no smaller level).
            return if l == 1 {
                let m = code.pcm().clone();
                Ok(OracleOutcome {
                    value: m.rows(),
                    matrix: m,
                })
            } else {
                exact_separating_redundancy(code, l - 1, opts)
            };
        }
        LKind::Regular => {}
    }

    let reps = projective_dual_representatives(code, opts.max_projective)?;
    let np = reps.len();
    let field = code.field().clone();
    let required = p.n - p.k - l;

    // support masks for the cheap pruning pass (codes here have n <= 64)
    if p.n > 64 {
        return Err(Error::SearchGuard(format!(
            "oracle supports lengths up to 64, got {}",
            p.n
        )));
    }
    let row_masks: Vec<u64> = reps
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let smasks: Vec<u64> = colex_subsets(p.n, l)
        .map(|s| s.iter().fold(0u64, |m, &i| m | 1 << i))
        .collect();

    for m in (p.n - p.k)..=opts.max_rows.min(np) {
        let count = binomial_u128(np, m);
        if count > opts.max_subsets_per_level {
            return Err(Error::SearchGuard(format!(
                "{count} candidate row sets at {m} rows"
            )));
        }
        let hit = (0..count as u64).into_par_iter().find_first(|&rank| {
            let subset = colex_unrank(np, m, rank as u128);
            // necessary condition: every size-l set must leave at least
            // n-k-l rows vanishing on it
            for &sm in &smasks {
                let vanishing = subset
                    .iter()
                    .filter(|&&ri| row_masks[ri] & sm == 0)
                    .count();
                if vanishing < required {
                    return false;
                }
            }
            // full rank checks
            for &sm in &smasks {
                let rows: Vec<&Vec<FieldElement>> = subset
                    .iter()
                    .filter(|&&ri| row_masks[ri] & sm == 0)
                    .map(|&ri| &reps[ri])
                    .collect();
                if punctured_rank(&field, &rows, sm, p.n) != required {
                    return false;
                }
            }
            true
        });
        if let Some(rank) = hit {
            let subset = colex_unrank(np, m, rank as u128);
            let rows: Vec<Vec<u64>> = subset
                .iter()
                .map(|&ri| reps[ri].iter().map(|e| e.index() as u64).collect())
                .collect();
            let matrix = GFMatrix::from_rows(field, &rows)?;
            debug_assert!(is_l_separating(code, &matrix, l)?.separating);
            return Ok(OracleOutcome { value: m, matrix });
        }
    }
    Err(Error::NoSolution {
        l,
        max_rows: opts.max_rows,
    })
}

/// One representative per projective class of nonzero dual codewords
/// (first nonzero coordinate scaled to 1), in lexicographic coordinate
/// order.
pub fn projective_dual_representatives(
    code: &LinearCode,
    max: usize,
) -> Result<Vec<Vec<FieldElement>>> {
    let f = code.field().clone();
    let words = code.dual_codewords(1 << 24)?;
    let mut reps: Vec<Vec<FieldElement>> = Vec::new();
    for w in words {
        let Some(first) = w.iter().find(|e| !e.is_zero()) else {
            continue;
        };
        let inv = f.inv(*first)?;
        let scaled: Vec<FieldElement> = w.iter().map(|&e| f.mul(e, inv)).collect();
        if !reps.contains(&scaled) {
            reps.push(scaled);
        }
    }
    reps.sort();
    if reps.len() > max {
        return Err(Error::SearchGuard(format!(
            "{} projective dual classes exceeds the oracle cap {max}",
            reps.len()
        )));
    }
    Ok(reps)
}

/// Rank of the given rows after deleting the columns in `smask`.
fn punctured_rank(
    f: &crate::field::Field,
    rows: &[&Vec<FieldElement>],
    smask: u64,
    n: usize,
) -> usize {
    let keep: Vec<usize> = (0..n).filter(|&c| smask >> c & 1 == 0).collect();
    let mut work: Vec<Vec<FieldElement>> = rows
        .iter()
        .map(|r| keep.iter().map(|&c| r[c]).collect())
        .collect();
    let mut rank = 0;
    for col in 0..keep.len() {
        let Some(pr) = (rank..work.len()).find(|&r| !work[r][col].is_zero()) else {
            continue;
        };
        work.swap(rank, pr);
        let inv = f.inv(work[rank][col]).expect("nonzero pivot");
        for c in col..keep.len() {
            work[rank][c] = f.mul(work[rank][c], inv);
        }
        let pivot_row = work[rank].clone();
        for r in rank + 1..work.len() {
            let factor = work[r][col];
            if factor.is_zero() {
                continue;
            }
            for c in col..keep.len() {
                let sub = f.mul(factor, pivot_row[c]);
                work[r][c] = f.sub(work[r][c], sub);
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    rank
}
