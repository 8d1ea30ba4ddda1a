//! Dense matrices over GF(q): rank, reduced row-echelon form, null space,
//! submatrix extraction for erasure patterns, and orthogonal-array checks.
//!
//! Matrices are immutable values; every operation builds a new matrix.
//! Rank and reduction run a bit-packed elimination for q = 2 and exact
//! table-driven elimination otherwise; the two paths are behaviorally
//! identical and property-tested against each other.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::subsets::colex_subsets;

#[derive(Clone, PartialEq, Eq)]
pub struct GFMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
}

impl std::fmt::Debug for GFMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "GFMatrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows.min(12) {
            let row: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        if self.rows > 12 {
            writeln!(f, "  ... ({} more rows)", self.rows - 12)?;
        }
        Ok(())
    }
}

impl GFMatrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> GFMatrix {
        GFMatrix {
            field,
            rows,
            cols,
            entries: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> GFMatrix {
        let mut m = GFMatrix::zero(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = FieldElement::ONE;
        }
        m
    }

    /// Build from rows of canonical element indices.
    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<GFMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "ragged rows: {} vs {}",
                    row.len(),
                    cols
                )));
            }
            for &v in row {
                entries.push(field.element(v)?);
            }
        }
        Ok(GFMatrix {
            field,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn from_elements(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<GFMatrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        for &e in &entries {
            field.element(e.index() as u64)?;
        }
        Ok(GFMatrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_indices(&self, r: usize) -> Vec<u64> {
        self.row(r).iter().map(|e| e.index() as u64).collect()
    }

    pub fn all_row_indices(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row_indices(r)).collect()
    }

    /// Stack `other` below `self`.
    pub fn stack(&self, other: &GFMatrix) -> Result<GFMatrix> {
        if self.field != other.field {
            return Err(Error::MismatchedFields);
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(GFMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn take_rows(&self, which: &[usize]) -> GFMatrix {
        let mut entries = Vec::with_capacity(which.len() * self.cols);
        for &r in which {
            entries.extend_from_slice(self.row(r));
        }
        GFMatrix {
            field: self.field.clone(),
            rows: which.len(),
            cols: self.cols,
            entries,
        }
    }

    pub fn scale_row(&self, r: usize, by: FieldElement) -> GFMatrix {
        let mut m = self.clone();
        for c in 0..self.cols {
            m.entries[r * self.cols + c] = self.field.mul(self.get(r, c), by);
        }
        m
    }

    /// Remove duplicate rows, keeping first occurrences in order.
    pub fn dedup_rows(&self) -> GFMatrix {
        let mut seen: HashMap<&[FieldElement], ()> = HashMap::new();
        let mut keep = Vec::new();
        for r in 0..self.rows {
            if seen.insert(self.row(r), ()).is_none() {
                keep.push(r);
            }
        }
        self.take_rows(&keep)
    }

    /// Rank over GF(q) by Gaussian elimination with exact field arithmetic.
    pub fn rank(&self) -> usize {
        if self.field.q() == 2 {
            return self.rank_gf2();
        }
        self.rref_generic(false).1.len()
    }

    fn rank_gf2(&self) -> usize {
        let words = self.cols.div_ceil(64);
        let mut packed: Vec<Vec<u64>> = (0..self.rows)
            .map(|r| {
                let mut w = vec![0u64; words];
                for (c, e) in self.row(r).iter().enumerate() {
                    if !e.is_zero() {
                        w[c / 64] |= 1 << (c % 64);
                    }
                }
                w
            })
            .collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let (wi, bi) = (c / 64, c % 64);
            let Some(p) = (rank..packed.len()).find(|&r| packed[r][wi] >> bi & 1 == 1) else {
                continue;
            };
            packed.swap(rank, p);
            let (pivot, rest) = packed.split_at_mut(rank + 1);
            let pivot = &pivot[rank];
            for row in rest.iter_mut() {
                if row[wi] >> bi & 1 == 1 {
                    for (w, pw) in row.iter_mut().zip(pivot) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
            if rank == packed.len() {
                break;
            }
        }
        rank
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (GFMatrix, Vec<usize>) {
        self.rref_generic(true)
    }

    fn rref_generic(&self, reduce: bool) -> (GFMatrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..self.cols {
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            // swap rows p, row
            for c in 0..m.cols {
                m.entries.swap(p * m.cols + c, row * m.cols + c);
            }
            let inv = f.inv(m.get(row, col)).expect("pivot nonzero");
            for c in 0..m.cols {
                m.entries[row * m.cols + c] = f.mul(m.get(row, c), inv);
            }
            let range: Box<dyn Iterator<Item = usize>> = if reduce {
                Box::new((0..m.rows).filter(|&r| r != row))
            } else {
                Box::new(row + 1..m.rows)
            };
            for r in range {
                let factor = m.get(r, col);
                if factor.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let sub = f.mul(factor, m.get(row, c));
                    m.entries[r * m.cols + c] = f.sub(m.get(r, c), sub);
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        (m, pivots)
    }

    /// Basis of the right null space, one vector per row; has
    /// `cols - rank` rows.
    pub fn null_space(&self) -> GFMatrix {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = GFMatrix::zero(self.field.clone(), free.len(), self.cols);
        for (bi, &fc) in free.iter().enumerate() {
            basis.entries[bi * self.cols + fc] = FieldElement::ONE;
            for (pi, &pc) in pivots.iter().enumerate() {
                // x_pc = -R[pi][fc]
                basis.entries[bi * self.cols + pc] = f.neg(r.get(pi, fc));
            }
        }
        basis
    }

    /// Is `v` a GF(q)-combination of the rows?
    pub fn row_space_contains(&self, v: &[FieldElement]) -> bool {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut w = v.to_vec();
        for (pi, &pc) in pivots.iter().enumerate() {
            let factor = w[pc];
            if factor.is_zero() {
                continue;
            }
            for c in 0..self.cols {
                let sub = f.mul(factor, r.get(pi, c));
                w[c] = f.sub(w[c], sub);
            }
        }
        w.iter().all(|e| e.is_zero())
    }

    /// Submatrix for an erasure pattern: the rows that vanish on every
    /// coordinate in `s`, restricted to the columns outside `s`. Returns the
    /// surviving row indices alongside, so constructions can cite provenance.
    /// An empty `s` returns the matrix itself.
    pub fn extract_hs(&self, s: &[usize]) -> Result<(GFMatrix, Vec<usize>)> {
        for &i in s {
            if i >= self.cols {
                return Err(Error::CoordinateOutOfRange {
                    index: i,
                    n: self.cols,
                });
            }
        }
        let mut in_s = vec![false; self.cols];
        for &i in s {
            in_s[i] = true;
        }
        let keep_cols: Vec<usize> = (0..self.cols).filter(|&c| !in_s[c]).collect();
        let mut survivors = Vec::new();
        let mut entries = Vec::new();
        for r in 0..self.rows {
            let row = self.row(r);
            if s.iter().all(|&c| row[c].is_zero()) {
                survivors.push(r);
                entries.extend(keep_cols.iter().map(|&c| row[c]));
            }
        }
        Ok((
            GFMatrix {
                field: self.field.clone(),
                rows: survivors.len(),
                cols: keep_cols.len(),
                entries,
            },
            survivors,
        ))
    }

    /// True iff every selection of `strength` columns carries each vector of
    /// GF(q)^strength exactly rows/q^strength times.
    pub fn verify_orthogonal_array(&self, strength: usize) -> bool {
        if strength == 0 || strength > self.cols {
            return false;
        }
        let q = self.field.q() as u128;
        let cells = q.checked_pow(strength as u32);
        let Some(cells) = cells else { return false };
        if (self.rows as u128) % cells != 0 {
            return false;
        }
        let expected = (self.rows as u128 / cells) as usize;
        for cols in colex_subsets(self.cols, strength) {
            let mut counts: HashMap<Vec<FieldElement>, usize> = HashMap::new();
            for r in 0..self.rows {
                let key: Vec<FieldElement> = cols.iter().map(|&c| self.get(r, c)).collect();
                *counts.entry(key).or_insert(0) += 1;
            }
            if counts.len() as u128 != cells || counts.values().any(|&v| v != expected) {
                return false;
            }
        }
        true
    }

    // ---- GFMAT text format ----
    //
    //   line 1:            GFMAT p e m n
    //   lines 2..=m+1:     n canonical element indices per row
    //
    // `#`-prefixed lines and blank lines are ignored, so writers may prepend
    // provenance comments.

    pub fn write_gfmat<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(
            w,
            "GFMAT {} {} {} {}",
            self.field.p(),
            self.field.e(),
            self.rows,
            self.cols
        )?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|e| e.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_gfmat<R: BufRead>(r: R) -> Result<GFMatrix> {
        let mut lines = r
            .lines()
            .collect::<std::io::Result<Vec<String>>>()?
            .into_iter()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            });
        let (hline, header) = lines.next().ok_or(Error::MatrixParse {
            line: 0,
            msg: "empty input".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 5 || parts[0] != "GFMAT" {
            return Err(Error::MatrixParse {
                line: hline + 1,
                msg: "expected header `GFMAT p e m n`".into(),
            });
        }
        let parse = |s: &str, what: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::MatrixParse {
                line: hline + 1,
                msg: format!("bad {what} `{s}`"),
            })
        };
        let p = parse(parts[1], "characteristic")?;
        let e = parse(parts[2], "extension degree")? as u32;
        let m = parse(parts[3], "row count")? as usize;
        let n = parse(parts[4], "column count")? as usize;
        let field = Field::new(p, e)?;
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (lno, line) = lines.next().ok_or(Error::MatrixParse {
                line: hline + 1,
                msg: format!("expected {m} rows"),
            })?;
            let vals: Vec<u64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u64>().map_err(|_| Error::MatrixParse {
                        line: lno + 1,
                        msg: format!("bad element `{tok}`"),
                    })
                })
                .collect::<Result<_>>()?;
            if vals.len() != n {
                return Err(Error::MatrixParse {
                    line: lno + 1,
                    msg: format!("expected {n} entries, found {}", vals.len()),
                });
            }
            for &v in &vals {
                if v >= field.q() {
                    return Err(Error::MatrixParse {
                        line: lno + 1,
                        msg: format!("element index {v} >= field order {}", field.q()),
                    });
                }
            }
            rows.push(vals);
        }
        GFMatrix::from_rows(field, &rows)
    }
}
