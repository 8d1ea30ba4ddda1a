//! Builders of actual l-separating parity-check matrices. Every output is
//! run through the verifier before being returned.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::bounds;
use crate::code::LinearCode;
use crate::covering::{Covering, GeneralizedCovering};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::matrix::GFMatrix;
use crate::separation::{is_l_separating, is_s_separating};
use crate::subsets::colex_subsets;

/// A verified construction together with its provenance.
#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub matrix: GFMatrix,
    pub method: String,
    pub rows: usize,
    pub verified: bool,
    /// The row count guaranteed by the construction's own accounting
    /// (covering stacks) or by the matching closed-form bound (sampling
    /// methods).
    pub bound_value: Option<BigInt>,
    /// One note per row of `matrix`, in order.
    pub provenance: Vec<String>,
    pub seed: Option<u64>,
}

impl ConstructionResult {
    fn finish(
        code: &LinearCode,
        l: usize,
        matrix: GFMatrix,
        method: &str,
        bound_value: Option<BigInt>,
        provenance: Vec<String>,
        seed: Option<u64>,
    ) -> Result<ConstructionResult> {
        let verdict = is_l_separating(code, &matrix, l)?;
        if !verdict.separating {
            return Err(Error::VerificationFailed {
                witness: verdict.witness.unwrap_or_default(),
            });
        }
        let lower = bounds::lower_schonheim(code.params(), l)?;
        assert!(
            BigInt::from(matrix.rows()) >= lower,
            "construction beat the lower bound; arithmetic is broken"
        );
        Ok(ConstructionResult {
            rows: matrix.rows(),
            matrix,
            method: method.to_string(),
            verified: true,
            bound_value,
            provenance,
            seed,
        })
    }

    /// Write in GFMAT format with a provenance comment block.
    pub fn write_gfmat<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# method: {}", self.method)?;
        if let Some(seed) = self.seed {
            writeln!(w, "# seed: {seed}")?;
        }
        if let Some(tb) = &self.bound_value {
            writeln!(w, "# bound: {tb}")?;
        }
        for (i, p) in self.provenance.iter().enumerate() {
            writeln!(w, "# row {i}: {p}")?;
        }
        self.matrix.write_gfmat(w)
    }
}

/// Reduce the code's parity-check matrix to standard form: the result has
/// an identity submatrix on its pivot columns (returned alongside; the
/// identity need not sit on the last columns).
pub fn standard_form_pcm(code: &LinearCode) -> (GFMatrix, Vec<usize>) {
    let (r, pivots) = code.pcm().rref();
    (r.take_rows(&(0..pivots.len()).collect::<Vec<_>>()), pivots)
}

/// From any matrix whose rows span the dual code, extract
///
/// - `I_B`: |B| rows whose columns indexed by B form the identity, and
/// - `M_B`: rank (n-k-|B|) rows that vanish on every column of B,
///
/// both as combinations of the input rows (row reduction pivoting on B
/// first). Fails when the columns indexed by B are dependent.
pub fn extract_is_ms_from(h: &GFMatrix, b: &[usize]) -> Result<(GFMatrix, GFMatrix)> {
    let n = h.cols();
    for &c in b {
        if c >= n {
            return Err(Error::CoordinateOutOfRange { index: c, n });
        }
    }
    let mut b = b.to_vec();
    b.sort_unstable();
    b.dedup();
    // permuted column order: B first, the rest in ascending order
    let mut order: Vec<usize> = b.clone();
    order.extend((0..n).filter(|c| !b.contains(c)));
    let permuted = permute_cols(h, &order);
    let (r, pivots) = permuted.rref();
    if pivots.iter().take_while(|&&p| p < b.len()).count() < b.len() {
        return Err(Error::DependentColumns { cols: b });
    }
    let rank = pivots.len();
    // invert the permutation
    let mut inverse = vec![0usize; n];
    for (i, &c) in order.iter().enumerate() {
        inverse[c] = i;
    }
    let unpermuted = permute_cols(&r.take_rows(&(0..rank).collect::<Vec<_>>()), &inverse);
    let i_b = unpermuted.take_rows(&(0..b.len()).collect::<Vec<_>>());
    let m_b = unpermuted.take_rows(&(b.len()..rank).collect::<Vec<_>>());
    Ok((i_b, m_b))
}

/// [`extract_is_ms_from`] on the code's own parity-check matrix.
pub fn extract_is_ms(code: &LinearCode, b: &[usize]) -> Result<(GFMatrix, GFMatrix)> {
    extract_is_ms_from(code.pcm(), b)
}

fn permute_cols(m: &GFMatrix, order: &[usize]) -> GFMatrix {
    let mut entries = Vec::with_capacity(m.rows() * m.cols());
    for r in 0..m.rows() {
        let row = m.row(r);
        entries.extend(order.iter().map(|&c| row[c]));
    }
    GFMatrix::from_elements(m.field().clone(), m.rows(), m.cols(), entries)
        .expect("permutation preserves shape")
}

/// Options for the covering-based construction.
#[derive(Debug, Clone, Copy)]
pub struct CoveringBuildOptions {
    /// Stack only the vanishing part M_B of each block (valid only when
    /// every block has size exactly l).
    pub ms_only: bool,
    /// Drop exact duplicate rows (scalar multiples are kept).
    pub dedup: bool,
}

impl Default for CoveringBuildOptions {
    fn default() -> Self {
        CoveringBuildOptions {
            ms_only: false,
            dedup: true,
        }
    }
}

/// Blocks accepted by the covering-based construction.
pub enum BlockSource<'a> {
    Uniform(&'a Covering),
    Generalized(&'a GeneralizedCovering),
}

impl BlockSource<'_> {
    fn check(&self, n: usize, l: usize) -> Result<&[Vec<usize>]> {
        let (cn, cl, blocks, witness) = match self {
            BlockSource::Uniform(c) => (c.n, c.l, &c.blocks, c.verify()),
            BlockSource::Generalized(g) => (g.n, g.l, &g.blocks, g.verify()),
        };
        if cn != n || cl != l {
            return Err(Error::InvalidCovering(format!(
                "covering is over {cn} points at strength {cl}, need {n} points at strength {l}"
            )));
        }
        if let Some(w) = witness {
            return Err(Error::InvalidCovering(format!(
                "covering fails at {w:?}"
            )));
        }
        Ok(blocks)
    }
}

/// Stack a separating block matrix I_B + M_B for every block of an
/// l-covering (rank argument: the identity part handles erased coordinates
/// inside the block, the vanishing part supplies the remaining rank).
pub fn construct_covering_based(
    code: &LinearCode,
    l: usize,
    blocks: BlockSource<'_>,
    opts: CoveringBuildOptions,
) -> Result<ConstructionResult> {
    let p = *code.params();
    let blocks = blocks.check(p.n, l)?;
    if opts.ms_only {
        if let Some(bad) = blocks.iter().find(|b| b.len() != l) {
            return Err(Error::InvalidCovering(format!(
                "vanishing-only stacking needs blocks of size exactly {l}, found {bad:?}"
            )));
        }
    }
    let mut stacked: Option<GFMatrix> = None;
    let mut provenance = Vec::new();
    for (bi, b) in blocks.iter().enumerate() {
        let (i_b, m_b) = extract_is_ms(code, b)?;
        let part = if opts.ms_only {
            for r in 0..m_b.rows() {
                provenance.push(format!("block {bi} {b:?} vanishing row {r}"));
            }
            m_b
        } else {
            for r in 0..i_b.rows() {
                provenance.push(format!("block {bi} {b:?} identity row {r}"));
            }
            for r in 0..m_b.rows() {
                provenance.push(format!("block {bi} {b:?} vanishing row {r}"));
            }
            i_b.stack(&m_b)?
        };
        stacked = Some(match stacked {
            None => part,
            Some(acc) => acc.stack(&part)?,
        });
    }
    let matrix = stacked.ok_or_else(|| Error::InvalidCovering("no blocks".into()))?;
    let per_block = if opts.ms_only { p.n - p.k - l } else { p.n - p.k };
    let accounting = BigInt::from(per_block) * BigInt::from(blocks.len());
    debug_assert_eq!(BigInt::from(matrix.rows()), accounting);
    let (matrix, provenance) = if opts.dedup {
        dedup_with_provenance(matrix, provenance)
    } else {
        (matrix, provenance)
    };
    ConstructionResult::finish(
        code,
        l,
        matrix,
        if opts.ms_only {
            "covering-vanishing"
        } else {
            "covering-stack"
        },
        Some(accounting),
        provenance,
        None,
    )
}

fn dedup_with_provenance(m: GFMatrix, prov: Vec<String>) -> (GFMatrix, Vec<String>) {
    let mut seen: std::collections::HashMap<Vec<FieldElement>, ()> = Default::default();
    let mut keep = Vec::new();
    for r in 0..m.rows() {
        if seen.insert(m.row(r).to_vec(), ()).is_none() {
            keep.push(r);
        }
    }
    let newprov = keep.iter().map(|&r| prov[r].clone()).collect();
    (m.take_rows(&keep), newprov)
}

/// Sample t dual codewords uniformly (per `nonzero`, from the whole dual or
/// from its nonzero part), then repair every deficient l-subset by appending
/// rows from the corresponding shortened dual until full rank; the repaired
/// matrix is automatically a parity-check matrix. Deterministic given seed:
/// sampling uses a ChaCha12 counter-mode stream, deficient subsets are
/// processed in colex order, and repairs append the first shortened-dual
/// basis row outside the current span.
pub fn construct_randomized(
    code: &LinearCode,
    l: usize,
    t: usize,
    seed: u64,
    nonzero: bool,
) -> Result<ConstructionResult> {
    let p = *code.params();
    if l == 0 || l > p.max_l() {
        return Err(Error::LOutOfRange { l, max: p.max_l() });
    }
    let f = code.field().clone();
    let pcm = code.pcm();
    let r = p.n - p.k;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<FieldElement>> = Vec::with_capacity(t);
    let mut provenance = Vec::with_capacity(t);
    for i in 0..t {
        let word = loop {
            let coeffs: Vec<FieldElement> = (0..r)
                .map(|_| FieldElement(rng.gen_range(0..p.q) as u32))
                .collect();
            if nonzero && coeffs.iter().all(|c| c.is_zero()) {
                continue;
            }
            break combine(&f, pcm, &coeffs);
        };
        rows.push(word);
        provenance.push(format!("sample {i}"));
    }
    let (rows, provenance) = repair(code, l, rows, provenance)?;
    let matrix = rows_to_matrix(&f, p.n, &rows);
    let bound = if nonzero {
        bounds::upper_prob_nonzero(&p, l)?.value
    } else {
        bounds::upper_prob_basic(&p, l)?.value
    };
    ConstructionResult::finish(
        code,
        l,
        matrix,
        if nonzero {
            "sample-repair-nonzero"
        } else {
            "sample-repair"
        },
        Some(bound),
        provenance,
        Some(seed),
    )
}

/// Standard-form rows already separate every l-subset of the identity
/// coordinate set; sample and repair only the remaining subsets.
pub fn construct_hybrid(
    code: &LinearCode,
    l: usize,
    t: usize,
    seed: u64,
) -> Result<ConstructionResult> {
    let p = *code.params();
    if l == 0 || l > p.max_l() {
        return Err(Error::LOutOfRange { l, max: p.max_l() });
    }
    let f = code.field().clone();
    let (std_form, pivots) = standard_form_pcm(code);
    let mut rows: Vec<Vec<FieldElement>> = (0..std_form.rows())
        .map(|r| std_form.row(r).to_vec())
        .collect();
    let mut provenance: Vec<String> = (0..rows.len())
        .map(|r| format!("standard-form row {r} (pivot {})", pivots[r]))
        .collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for i in 0..t {
        let coeffs: Vec<FieldElement> = (0..p.n - p.k)
            .map(|_| FieldElement(rng.gen_range(0..p.q) as u32))
            .collect();
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        rows.push(combine(&f, code.pcm(), &coeffs));
        provenance.push(format!("sample {i}"));
    }
    let skip = |s: &[usize]| s.iter().all(|c| pivots.contains(c));
    let (rows, provenance) = repair_filtered(code, l, rows, provenance, skip)?;
    let matrix = rows_to_matrix(&f, p.n, &rows);
    let bound = bounds::upper_prob_hybrid(&p, l)?.value;
    ConstructionResult::finish(
        code,
        l,
        matrix,
        "standard-form-hybrid",
        Some(bound),
        provenance,
        Some(seed),
    )
}

/// All combinations of at most l+1 parity-check rows whose first nonzero
/// coefficient is 1: a subspace of codimension l always has a reduced basis
/// of such combinations, so the stack separates every l-subset. Verification
/// failures are surfaced, never silently repaired.
pub fn construct_generic(code: &LinearCode, l: usize) -> Result<ConstructionResult> {
    let p = *code.params();
    if l == 0 || l > p.max_l() {
        return Err(Error::LOutOfRange { l, max: p.max_l() });
    }
    let f = code.field().clone();
    let r = p.n - p.k;
    let mut rows = Vec::new();
    let mut provenance = Vec::new();
    for support_size in 1..=(l + 1).min(r) {
        for support in colex_subsets(r, support_size) {
            // first (lowest-index) coefficient fixed to 1, the rest range
            // over the q-1 nonzero elements in index order
            let free = support_size - 1;
            let mut counters = vec![0u64; free];
            loop {
                let mut coeffs = vec![FieldElement::ZERO; r];
                coeffs[support[0]] = FieldElement::ONE;
                for (ci, &row) in support[1..].iter().enumerate() {
                    coeffs[row] = FieldElement((counters[ci] + 1) as u32);
                }
                rows.push(combine(&f, code.pcm(), &coeffs));
                provenance.push(format!("combination of rows {support:?}"));
                // advance the base-(q-1) counter
                let mut done = true;
                for c in counters.iter_mut() {
                    *c += 1;
                    if *c < p.q - 1 {
                        done = false;
                        break;
                    }
                    *c = 0;
                }
                if done {
                    break;
                }
            }
        }
    }
    let expected = bounds::upper_generic(&p, l)?;
    debug_assert_eq!(BigInt::from(rows.len()), expected);
    let matrix = rows_to_matrix(&f, p.n, &rows);
    ConstructionResult::finish(
        code,
        l,
        matrix,
        "generic-combination",
        Some(expected),
        provenance,
        None,
    )
}

fn combine(
    f: &crate::field::Field,
    pcm: &GFMatrix,
    coeffs: &[FieldElement],
) -> Vec<FieldElement> {
    let mut word = vec![FieldElement::ZERO; pcm.cols()];
    for (ri, &c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (slot, &entry) in word.iter_mut().zip(pcm.row(ri)) {
            *slot = f.add(*slot, f.mul(c, entry));
        }
    }
    word
}

fn rows_to_matrix(f: &crate::field::Field, n: usize, rows: &[Vec<FieldElement>]) -> GFMatrix {
    let entries: Vec<FieldElement> = rows.iter().flatten().copied().collect();
    GFMatrix::from_elements(f.clone(), rows.len(), n, entries).expect("rows are well-formed")
}

fn repair(
    code: &LinearCode,
    l: usize,
    rows: Vec<Vec<FieldElement>>,
    provenance: Vec<String>,
) -> Result<(Vec<Vec<FieldElement>>, Vec<String>)> {
    repair_filtered(code, l, rows, provenance, |_| false)
}

/// Walk the l-subsets in colex order; wherever rank(A(S)) < n-k-l, append
/// shortened-dual basis rows (canonical reduced order) whose punctured image
/// lies outside the current span, until the rank is full. Each append
/// strictly increases rank(A(S)).
fn repair_filtered(
    code: &LinearCode,
    l: usize,
    mut rows: Vec<Vec<FieldElement>>,
    mut provenance: Vec<String>,
    skip: impl Fn(&[usize]) -> bool,
) -> Result<(Vec<Vec<FieldElement>>, Vec<String>)> {
    let p = *code.params();
    let f = code.field().clone();
    let required = p.n - p.k - l;
    for s in colex_subsets(p.n, l) {
        if skip(&s) {
            continue;
        }
        loop {
            let current = punctured_span(&f, p.n, &rows, &s);
            if current.rank() == required {
                break;
            }
            let basis = shortened_dual_basis(code, &s)?;
            let mut appended = false;
            for (bi, w) in basis.iter().enumerate() {
                let punctured: Vec<FieldElement> = (0..p.n)
                    .filter(|c| !s.contains(c))
                    .map(|c| w[c])
                    .collect();
                if !current.row_space_contains(&punctured) {
                    rows.push(w.clone());
                    provenance.push(format!("repair {s:?} basis {bi}"));
                    appended = true;
                    break;
                }
            }
            assert!(
                appended,
                "shortened dual has rank {required}; a row outside the span must exist"
            );
        }
    }
    Ok((rows, provenance))
}

/// The rows of A that vanish on s, punctured on s, as a matrix.
fn punctured_span(
    f: &crate::field::Field,
    n: usize,
    rows: &[Vec<FieldElement>],
    s: &[usize],
) -> GFMatrix {
    let keep: Vec<usize> = (0..n).filter(|c| !s.contains(c)).collect();
    let selected: Vec<Vec<FieldElement>> = rows
        .iter()
        .filter(|r| s.iter().all(|&c| r[c].is_zero()))
        .map(|r| keep.iter().map(|&c| r[c]).collect())
        .collect();
    rows_to_matrix(f, keep.len(), &selected)
}

/// Basis (canonical reduced order) of the dual codewords vanishing on s;
/// has n-k-|s| rows whenever |s| <= d-1.
pub fn shortened_dual_basis(code: &LinearCode, s: &[usize]) -> Result<Vec<Vec<FieldElement>>> {
    let p = *code.params();
    let f = code.field().clone();
    let pcm = code.pcm();
    // coefficient vectors x with (x * pcm) vanishing on s: null space of
    // the |s| x (n-k) matrix of the s-columns transposed
    let mut entries = Vec::with_capacity(s.len() * (p.n - p.k));
    for &c in s {
        for r in 0..p.n - p.k {
            entries.push(pcm.get(r, c));
        }
    }
    let cols_t = GFMatrix::from_elements(f.clone(), s.len(), p.n - p.k, entries)?;
    let coeff_basis = cols_t.null_space();
    let mut out = Vec::with_capacity(coeff_basis.rows());
    for b in 0..coeff_basis.rows() {
        out.push(combine(&f, pcm, coeff_basis.row(b)));
    }
    Ok(out)
}

/// Verify one block of a construction directly (test support): a random
/// l-subset inside a certified block must reach full required rank.
pub fn spot_check_subset(code: &LinearCode, h: &GFMatrix, s: &[usize]) -> Result<bool> {
    Ok(is_s_separating(code, h, s)?.separating)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::presets::{preset, sec2_redundant_pcm, vandermonde_mds};
    use crate::covering::greedy_covering;
    use crate::subsets::binomial_u128;

    #[test]
    fn standard_form_has_identity_on_pivots() {
        for name in ["hamming7", "exthamming8", "golay24"] {
            let code = preset(name).unwrap().full().unwrap();
            let (m, pivots) = standard_form_pcm(&code);
            assert_eq!(pivots.len(), m.rows());
            for (r, &c) in pivots.iter().enumerate() {
                for rr in 0..m.rows() {
                    let expect = if rr == r {
                        FieldElement::ONE
                    } else {
                        FieldElement::ZERO
                    };
                    assert_eq!(m.get(rr, c), expect);
                }
            }
        }
    }

    #[test]
    fn extract_is_ms_worked_example() {
        let code = preset("exthamming8").unwrap().full().unwrap();
        let (i_b, m_b) = extract_is_ms(&code, &[6, 7]).unwrap();
        assert_eq!(i_b.rows(), 2);
        assert_eq!(m_b.rows(), 2);
        // M_B vanishes on {6,7} and spans the same space as the two
        // vanishing rows of the redundant worked-example matrix
        let h = sec2_redundant_pcm();
        let (hs_rows, surv) = h.extract_hs(&[6, 7]).unwrap();
        assert_eq!(surv, vec![3, 4]);
        for r in 0..m_b.rows() {
            assert!(m_b.get(r, 6).is_zero() && m_b.get(r, 7).is_zero());
        }
        let (ms_punct, _) = m_b.extract_hs(&[6, 7]).unwrap();
        for r in 0..ms_punct.rows() {
            assert!(hs_rows.row_space_contains(ms_punct.row(r)));
        }
        // identity part: columns 6,7 of I_B form the identity
        for (r, &c) in [6usize, 7].iter().enumerate() {
            for rr in 0..2 {
                let expect = if rr == r {
                    FieldElement::ONE
                } else {
                    FieldElement::ZERO
                };
                assert_eq!(i_b.get(rr, c), expect);
            }
        }

        // empty block: no identity part, full-rank vanishing part
        let (i0, m0) = extract_is_ms(&code, &[]).unwrap();
        assert_eq!(i0.rows(), 0);
        assert_eq!(m0.rank(), 4);

        // stacked rank for a small block
        let h7 = preset("hamming7").unwrap().full().unwrap();
        let (i, m) = extract_is_ms(&h7, &[0, 1]).unwrap();
        assert_eq!((i.rows(), m.rows()), (2, 1));
        assert_eq!(i.stack(&m).unwrap().rank(), 3);
    }

    #[test]
    fn extract_is_ms_rejects_dependent_columns() {
        // repetition code: dual words vanish on nothing much; columns of the
        // 1-row generator... use hamming7 with 4 columns (rank 3)
        let code = preset("hamming7").unwrap().full().unwrap();
        let err = extract_is_ms(&code, &[0, 1, 2, 3]);
        assert!(matches!(err, Err(Error::DependentColumns { .. })));
    }

    #[test]
    fn covering_based_small() {
        let code = preset("exthamming8").unwrap().full().unwrap();
        let cov = Covering {
            n: 8,
            mu: 3,
            l: 1,
            lambda: 1,
            blocks: vec![vec![0, 1, 2], vec![3, 4, 5], vec![5, 6, 7]],
        };
        let r = construct_covering_based(
            &code,
            1,
            BlockSource::Uniform(&cov),
            CoveringBuildOptions::default(),
        )
        .unwrap();
        assert!(r.verified);
        assert!(r.rows <= 12);
        assert_eq!(r.bound_value, Some(BigInt::from(12)));
    }

    #[test]
    fn covering_vanishing_only_branch() {
        let code = preset("hamming7").unwrap().full().unwrap();
        let all_pairs: Vec<Vec<usize>> =
            crate::subsets::colex_subsets(7, 2).collect();
        let cov = Covering {
            n: 7,
            mu: 2,
            l: 2,
            lambda: 1,
            blocks: all_pairs,
        };
        let r = construct_covering_based(
            &code,
            2,
            BlockSource::Uniform(&cov),
            CoveringBuildOptions {
                ms_only: true,
                dedup: false,
            },
        )
        .unwrap();
        assert_eq!(r.rows, 21); // (n-k-l) * C(n,l) = 1 * 21
        assert_eq!(BigInt::from(r.rows), BigInt::from(binomial_u128(7, 2) as u64));
    }

    #[test]
    fn covering_based_golay_within_bound() {
        let code = preset("golay24").unwrap().full().unwrap();
        let cov = greedy_covering(24, 7, 1, None).unwrap();
        let r = construct_covering_based(
            &code,
            1,
            BlockSource::Uniform(&cov),
            CoveringBuildOptions::default(),
        )
        .unwrap();
        assert!(r.rows <= 48);
        assert!(r.verified);
    }

    #[test]
    fn randomized_construction_verifies_and_is_deterministic() {
        let code = preset("hamming7").unwrap().full().unwrap();
        let a = construct_randomized(&code, 2, 10, 99, false).unwrap();
        let b = construct_randomized(&code, 2, 10, 99, false).unwrap();
        assert!(a.verified);
        assert_eq!(a.matrix, b.matrix);
        assert_eq!(a.provenance, b.provenance);

        // pure repair: t = 0 stays within the vanishing-stack accounting
        let r = construct_randomized(&code, 2, 0, 1, false).unwrap();
        assert!(r.verified);
        assert!(r.rows <= 21);

        let nz = construct_randomized(&code, 1, 6, 7, true).unwrap();
        assert!(nz.verified);
    }

    #[test]
    fn repair_appends_strictly_increase_rank() {
        // covered by the assert! inside repair_filtered; exercise it
        let code = preset("exthamming8").unwrap().full().unwrap();
        for seed in 0..6 {
            let r = construct_randomized(&code, 2, 3, seed, false).unwrap();
            assert!(r.verified);
        }
    }

    #[test]
    fn generic_construction_counts_and_verifies() {
        let code = preset("hamming7").unwrap().full().unwrap();
        let r = construct_generic(&code, 1).unwrap();
        assert_eq!(r.rows, 6); // C(3,1) + C(3,2)
        assert!(r.verified);

        let mds = vandermonde_mds(4, 2, 3).unwrap();
        let r = construct_generic(&mds, 1).unwrap();
        assert_eq!(BigInt::from(r.rows), bounds::upper_generic(mds.params(), 1).unwrap());
        assert!(r.verified);
    }

    #[test]
    fn hybrid_construction_verifies() {
        let code = preset("hamming7").unwrap().full().unwrap();
        let r = construct_hybrid(&code, 1, 0, 3).unwrap();
        assert!(r.verified);
        let r = construct_hybrid(&code, 2, 5, 3).unwrap();
        assert!(r.verified);
    }

    #[test]
    fn golay_sampling_examples() {
        let g = preset("golay24").unwrap().full().unwrap();
        // realized row counts are seed-dependent and only verified, never
        // asserted; the matching closed-form bound values are recorded
        let r = construct_randomized(&g, 1, 30, 2024, false).unwrap();
        assert!(r.verified);
        assert_eq!(r.bound_value, Some(BigInt::from(35)));
        let h = construct_hybrid(&g, 1, 25, 2024).unwrap();
        assert!(h.verified);
        assert_eq!(h.bound_value, Some(BigInt::from(44)));
    }

    #[test]
    fn gfmat_output_carries_provenance() {
        let code = preset("hamming7").unwrap().full().unwrap();
        let r = construct_randomized(&code, 1, 4, 5, false).unwrap();
        let mut buf = Vec::new();
        r.write_gfmat(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("# method: sample-repair"));
        assert!(text.contains("# seed: 5"));
        let back = GFMatrix::read_gfmat(&buf[..]).unwrap();
        assert_eq!(back, r.matrix);
    }
}
