//! Affine-plane machinery: AG(2, 2^h), its line-by-point incidence code,
//! a generalized 5-covering built from conics and line unions, and the
//! resulting certified 5-separating parity-check matrix.
//!
//! The plane has q^2 points (q = 2^h) and q(q+1) lines in q+1 parallel
//! classes. Points are indexed x*q + y by the canonical field indices of
//! their coordinates; lines and classes are in canonical slope order.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bounds::comb::binomial;
use crate::code::{CodeParams, LinearCode};
use crate::covering::GeneralizedCovering;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::GFMatrix;

/// AG(2, 2^h): points, lines, and parallel-class structure.
#[derive(Debug, Clone)]
pub struct AffinePlane {
    pub h: u32,
    pub q: usize,
    pub field: Field,
    /// Lines as ascending point lists; index order: slope classes first
    /// (slope 0..q-1, intercept 0..q-1), vertical class last.
    pub lines: Vec<Vec<usize>>,
    /// Parallel classes as lists of line indices; each partitions the points.
    pub classes: Vec<Vec<usize>>,
}

/// Build AG(2, 2^h) for 1 <= h <= 4.
pub fn build_plane(h: u32) -> Result<AffinePlane> {
    if !(1..=4).contains(&h) {
        return Err(Error::Geometry(format!("plane exponent {h} outside 1..=4")));
    }
    let field = Field::new(2, h)?;
    let q = field.q() as usize;
    let mut lines = Vec::with_capacity(q * (q + 1));
    let mut classes = Vec::with_capacity(q + 1);
    for m in 0..q {
        let m = FieldElement(m as u32);
        let mut class = Vec::with_capacity(q);
        for c in 0..q {
            let c = FieldElement(c as u32);
            let mut pts: Vec<usize> = (0..q)
                .map(|x| {
                    let xe = FieldElement(x as u32);
                    let y = field.add(field.mul(m, xe), c);
                    x * q + y.index() as usize
                })
                .collect();
            pts.sort_unstable();
            class.push(lines.len());
            lines.push(pts);
        }
        classes.push(class);
    }
    let mut vertical = Vec::with_capacity(q);
    for x in 0..q {
        vertical.push(lines.len());
        lines.push((0..q).map(|y| x * q + y).collect());
    }
    classes.push(vertical);
    Ok(AffinePlane {
        h,
        q,
        field,
        lines,
        classes,
    })
}

impl AffinePlane {
    pub fn n_points(&self) -> usize {
        self.q * self.q
    }

    /// Line point sets as bitmasks (points fit in u64 for h <= 3).
    pub fn line_masks(&self) -> Result<Vec<u64>> {
        if self.n_points() > 64 {
            return Err(Error::Geometry(format!(
                "{} points exceed the 64-point packed representation",
                self.n_points()
            )));
        }
        Ok(self
            .lines
            .iter()
            .map(|l| l.iter().fold(0u64, |m, &p| m | 1 << p))
            .collect())
    }

    /// Line-by-point incidence matrix over GF(2): q(q+1) rows.
    pub fn incidence_matrix(&self) -> GFMatrix {
        let f = Field::new(2, 1).unwrap();
        let n = self.n_points();
        let rows: Vec<Vec<u64>> = self
            .lines
            .iter()
            .map(|l| (0..n).map(|p| u64::from(l.contains(&p))).collect())
            .collect();
        GFMatrix::from_rows(f, &rows).unwrap()
    }

    /// Parallel class index of a line.
    pub fn class_of(&self, line: usize) -> usize {
        line / self.q
    }
}

/// The binary code with the incidence matrix as (redundant) parity-check
/// matrix: parameters \[4^h, 4^h - 3^h, 2^h + 2\]. The incidence rank is
/// verified to be 3^h. The minimum distance is verified by enumeration for
/// h <= 2 and taken as 2^h + 2 above that; the dual distance is always
/// computed exactly.
pub struct IncidenceCode {
    pub code: LinearCode,
    pub incidence: GFMatrix,
    pub d_verified: bool,
}

pub fn incidence_code(plane: &AffinePlane) -> Result<IncidenceCode> {
    if plane.h > 3 {
        return Err(Error::Geometry("incidence code is built for h <= 3".into()));
    }
    let incidence = plane.incidence_matrix();
    let expected_rank = 3usize.pow(plane.h);
    let rank = incidence.rank();
    if rank != expected_rank {
        return Err(Error::Geometry(format!(
            "incidence rank {rank}, expected {expected_rank}"
        )));
    }
    let n = plane.n_points();
    let k = n - rank;
    let (rref, pivots) = incidence.rref();
    let pcm = rref.take_rows(&(0..pivots.len()).collect::<Vec<_>>());
    let ddual = packed_min_weight(&pcm);
    let claimed_d = plane.q + 2;
    let (d, d_verified) = if k <= 20 {
        (min_distance_via_nullspace(&pcm), true)
    } else {
        (claimed_d, false)
    };
    if d_verified && d != claimed_d {
        return Err(Error::Geometry(format!(
            "incidence code distance {d}, expected {claimed_d}"
        )));
    }
    let code = LinearCode::new(
        CodeParams::new(n, k, d, ddual, 2)?,
        pcm,
        Some(format!("ag2-{}", plane.q)),
    )?;
    Ok(IncidenceCode {
        code,
        incidence,
        d_verified,
    })
}

fn pack_rows(m: &GFMatrix) -> Vec<u64> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .fold(0u64, |acc, (c, _)| acc | 1 << c)
        })
        .collect()
}

/// Exact minimum weight of the row span of a packed GF(2) basis, by
/// Gray-code enumeration of all 2^rows combinations.
fn packed_min_weight(basis: &GFMatrix) -> usize {
    let rows = pack_rows(basis);
    let dim = rows.len();
    assert!(dim <= 27, "gray-code enumeration capped at 2^27 words");
    let mut acc = 0u64;
    let mut best = usize::MAX;
    for i in 1u64..(1 << dim) {
        acc ^= rows[i.trailing_zeros() as usize];
        let w = acc.count_ones() as usize;
        if w < best {
            best = w;
        }
    }
    best
}

fn min_distance_via_nullspace(pcm: &GFMatrix) -> usize {
    packed_min_weight(&pcm.null_space())
}

/// The q^5 + q^4 + q^3 closed-form accounting of the conic family used by
/// the published bound (it counts quadratic loci including degenerate ones).
pub fn conic_family_accounting(h: u32) -> u64 {
    (1u64 << (5 * h)) + (1 << (4 * h)) + (1 << (3 * h))
}

/// Point sets of the irreducible conics of AG(2, 2^h), 2 <= h <= 3:
/// sweep every quadratic form a x^2 + b xy + c y^2 + d x + e y + f with
/// (a,b,c) != 0, deduplicate by zero set, and reject the degenerate loci
/// (empty, single point, a line, or a union of two lines). The surviving
/// family has exactly q^5 - q^2 members for h = 3, one per irreducible
/// conic; at h = 2 distinct conics can share a zero set, so the family is
/// smaller than the conic count.
pub fn enumerate_conics(plane: &AffinePlane) -> Result<Vec<u64>> {
    if !(2..=3).contains(&plane.h) {
        return Err(Error::Geometry("conic sweep supports h in {2, 3}".into()));
    }
    let q = plane.q;
    let f = &plane.field;
    let n = plane.n_points();
    let line_masks = plane.line_masks()?;
    let mut reject: HashSet<u64> = line_masks.iter().copied().collect();
    for i in 0..line_masks.len() {
        for j in i + 1..line_masks.len() {
            reject.insert(line_masks[i] | line_masks[j]);
        }
    }
    // per-point monomials (x^2, xy, y^2, x, y)
    let monomials: Vec<[FieldElement; 5]> = (0..n)
        .map(|p| {
            let x = FieldElement((p / q) as u32);
            let y = FieldElement((p % q) as u32);
            [f.mul(x, x), f.mul(x, y), f.mul(y, y), x, y]
        })
        .collect();
    // sweep (a,b,c,d,e); the q choices of f come out of one evaluation pass
    let outer = (q * q * q) as u64;
    let mut masks: Vec<u64> = (1..outer)
        .into_par_iter()
        .flat_map_iter(|abc| {
            let a = FieldElement((abc / (q * q) as u64) as u32);
            let b = FieldElement((abc / q as u64 % q as u64) as u32);
            let c = FieldElement((abc % q as u64) as u32);
            let mut local = Vec::with_capacity(q * q * q);
            for d in 0..q as u32 {
                for e in 0..q as u32 {
                    let (d, e) = (FieldElement(d), FieldElement(e));
                    // bucket points by the value of the f-free part; the
                    // zero set for constant term f is then bucket[f]
                    let mut buckets = vec![0u64; q];
                    for (p, m) in monomials.iter().enumerate() {
                        let mut v = f.mul(a, m[0]);
                        v = f.add(v, f.mul(b, m[1]));
                        v = f.add(v, f.mul(c, m[2]));
                        v = f.add(v, f.mul(d, m[3]));
                        v = f.add(v, f.mul(e, m[4]));
                        buckets[v.index() as usize] |= 1 << p;
                    }
                    // characteristic 2: v + f = 0 iff f = v
                    local.extend(buckets.into_iter().filter(|m| m.count_ones() >= 2));
                }
            }
            local
        })
        .collect();
    masks.par_sort_unstable();
    masks.dedup();
    masks.retain(|m| !reject.contains(m));
    Ok(masks)
}

/// The generalized 5-covering of the plane: irreducible conics, unions of
/// nonparallel line pairs, and parallel line pairs punctured by one of six
/// chosen transversals.
pub struct PlaneCovering {
    pub l0: Vec<u64>,
    pub l1: Vec<u64>,
    pub l2: Vec<u64>,
    /// Closed-form accounting of the published block family
    /// (l0 counted as q^5 + q^4 + q^3).
    pub accounting_total: u64,
}

impl PlaneCovering {
    pub fn all_blocks(&self) -> impl Iterator<Item = u64> + '_ {
        self.l0
            .iter()
            .chain(self.l1.iter())
            .chain(self.l2.iter())
            .copied()
    }

    pub fn total(&self) -> usize {
        self.l0.len() + self.l1.len() + self.l2.len()
    }

    pub fn to_generalized(&self, n: usize, l: usize) -> GeneralizedCovering {
        let blocks = self
            .all_blocks()
            .map(|m| mask_points(m, n))
            .collect();
        GeneralizedCovering {
            n,
            l,
            lambda: 1,
            blocks,
        }
    }
}

fn mask_points(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&p| mask >> p & 1 == 1).collect()
}

/// Build the 5-covering for h = 3. The six transversals for each parallel
/// pair are the first six lines of the first other parallel class in
/// canonical order, or a seeded sample of six transversals when requested.
pub fn build_generalized_covering(
    plane: &AffinePlane,
    seed: Option<u64>,
) -> Result<PlaneCovering> {
    if plane.h != 3 {
        return Err(Error::Geometry(
            "the 5-covering construction is desk-scaled to h = 3".into(),
        ));
    }
    let q = plane.q;
    let masks = plane.line_masks()?;
    let l0 = enumerate_conics(plane)?;
    let expected_l0 = (1u64 << (5 * plane.h)) - (1 << (2 * plane.h));
    if l0.len() as u64 != expected_l0 {
        return Err(Error::Geometry(format!(
            "irreducible conic family has {} members, expected q^5 - q^2 = {expected_l0}",
            l0.len()
        )));
    }

    let mut l1 = Vec::new();
    for ci in 0..plane.classes.len() {
        for cj in ci + 1..plane.classes.len() {
            for &a in &plane.classes[ci] {
                for &b in &plane.classes[cj] {
                    l1.push(masks[a] | masks[b]);
                }
            }
        }
    }
    l1.sort_unstable();
    l1.dedup();

    let mut rng = seed.map(ChaCha12Rng::seed_from_u64);
    let mut l2 = Vec::new();
    for (ci, class) in plane.classes.iter().enumerate() {
        // transversals: every line outside this class meets both pair lines
        let other_class = if ci == 0 { 1 } else { 0 };
        for ai in 0..class.len() {
            for bi in ai + 1..class.len() {
                let pair = masks[class[ai]] | masks[class[bi]];
                let transversals: Vec<usize> = match &mut rng {
                    None => plane.classes[other_class][..6].to_vec(),
                    Some(rng) => {
                        let mut pool: Vec<usize> = (0..plane.lines.len())
                            .filter(|&li| plane.class_of(li) != ci)
                            .collect();
                        for i in (1..pool.len()).rev() {
                            pool.swap(i, rng.gen_range(0..=i));
                        }
                        pool.truncate(6);
                        pool
                    }
                };
                for &t in &transversals {
                    l2.push(pair & !masks[t]);
                }
            }
        }
    }
    l2.sort_unstable();
    l2.dedup();

    let expected_l1 = binomial(q + 1, 2) * BigInt::from(q * q);
    let expected_l2 = BigInt::from(6 * (q + 1)) * binomial(q, 2);
    if BigInt::from(l1.len()) != expected_l1 {
        return Err(Error::Geometry(format!(
            "nonparallel pair family has {} members, expected {expected_l1}",
            l1.len()
        )));
    }
    if BigInt::from(l2.len()) != expected_l2 {
        return Err(Error::Geometry(format!(
            "punctured parallel pair family has {} members, expected {expected_l2}",
            l2.len()
        )));
    }
    // families are disjoint (block sizes 7..9, 15, 14)
    let covering = PlaneCovering {
        l0,
        l1,
        l2,
        accounting_total: (1u64 << (5 * plane.h))
            + 3 * (1 << (4 * plane.h - 1))
            + 9 * (1 << (3 * plane.h - 1))
            - 3 * (1 << plane.h),
    };
    verify_five_coverage(plane, &covering)?;
    Ok(covering)
}

/// Full sweep: every 5-subset of the points lies in some block.
fn verify_five_coverage(plane: &AffinePlane, cov: &PlaneCovering) -> Result<()> {
    let n = plane.n_points();
    // colex rank tables C(i, j) for j <= 5
    let mut c = [[0u32; 6]; 65];
    for (i, row) in c.iter_mut().enumerate().take(n + 1) {
        row[0] = 1;
        for j in 1..6.min(i + 1) {
            row[j] = binomial(i, j).try_into().unwrap();
        }
    }
    let total = c[n][5] as usize;
    let mut covered = vec![false; total];
    let mut marks = 0u64;
    for mask in cov.all_blocks() {
        let pts = mask_points(mask, n);
        let s = pts.len();
        if s < 5 {
            continue;
        }
        for i0 in 0..s {
            let r0 = c[pts[i0]][1];
            for i1 in i0 + 1..s {
                let r1 = r0 + c[pts[i1]][2];
                for i2 in i1 + 1..s {
                    let r2 = r1 + c[pts[i2]][3];
                    for i3 in i2 + 1..s {
                        let r3 = r2 + c[pts[i3]][4];
                        for i4 in i3 + 1..s {
                            covered[(r3 + c[pts[i4]][5]) as usize] = true;
                            marks += 1;
                        }
                    }
                }
            }
        }
    }
    let _ = marks;
    if let Some(rank) = covered.iter().position(|&b| !b) {
        let witness = crate::subsets::colex_unrank(n, 5, rank as u128);
        return Err(Error::Geometry(format!(
            "5-subset {witness:?} is not covered"
        )));
    }
    Ok(())
}

/// A certified 5-separating stack over the h = 3 incidence code.
pub struct GeometryBuild {
    pub code: LinearCode,
    pub covering: PlaneCovering,
    /// Stacked parity rows, one packed 64-column GF(2) row per entry.
    pub rows: Vec<u64>,
    pub report: CertificationReport,
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub h: u32,
    pub incidence_rank: usize,
    pub l0: usize,
    pub l1: usize,
    pub l2: usize,
    pub total_blocks: usize,
    pub realized_rows: usize,
    /// Closed-form block accounting of the published construction
    /// (conics counted as quadratic loci, q^5 + q^4 + q^3 of them).
    pub accounting_blocks: u64,
    /// The closed-form bound value 3^h * accounting_blocks.
    pub bound_value: BigInt,
    /// The block-size-free floor (n-k) C(n,5) / C(d-1,5).
    pub comparison_floor: BigRational,
    pub blocks_certified: usize,
    pub coverage_verified: bool,
    pub spot_checks: usize,
    pub spot_failures: usize,
    /// Minimum distance taken from the parameter formula rather than
    /// verified by enumeration.
    pub d_assumed: bool,
}

impl CertificationReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        use std::fmt::Write;
        let _ = writeln!(s, "affine plane AG(2,{}), h = {}", 1 << self.h, self.h);
        let _ = writeln!(s, "incidence rank: {}", self.incidence_rank);
        let _ = writeln!(
            s,
            "block families: conics {} + line pairs {} + punctured parallel pairs {} = {}",
            self.l0, self.l1, self.l2, self.total_blocks
        );
        let _ = writeln!(
            s,
            "closed-form accounting: {} blocks -> bound value {} rows",
            self.accounting_blocks, self.bound_value
        );
        let _ = writeln!(
            s,
            "note: the closed-form conic count q^5+q^4+q^3 counts quadratic loci \
             including degenerate ones; the realized family keeps the q^5-q^2 \
             irreducible conics, all of which certify, so the realized stack is \
             smaller than the accounting and the bound value remains valid"
        );
        let _ = writeln!(s, "realized stacked rows: {}", self.realized_rows);
        let _ = writeln!(
            s,
            "blocks certified column-independent: {}/{}",
            self.blocks_certified, self.total_blocks
        );
        let _ = writeln!(s, "5-subset coverage sweep: {}", if self.coverage_verified { "complete" } else { "FAILED" });
        let _ = writeln!(
            s,
            "random 5-subset separation spot checks: {} run, {} failures",
            self.spot_checks, self.spot_failures
        );
        let strictly_below =
            BigRational::from_integer(self.bound_value.clone()) < self.comparison_floor;
        let _ = writeln!(
            s,
            "comparison floor (n-k) C(n,5)/C(d-1,5) = {} (bound value is smaller: {})",
            self.comparison_floor, strictly_below
        );
        if self.d_assumed {
            let _ = writeln!(
                s,
                "minimum distance {} taken from the parameter formula (enumeration \
                 infeasible at this size)",
                (1 << self.h) + 2
            );
        }
        s
    }
}

/// Build and certify the 5-separating stack for h = 3: per block, certify
/// that the incidence columns of the block are independent, extract the
/// identity and vanishing parts, and stack all of them. Full 5-separation
/// is certified structurally per block (that is the construction's own
/// argument); in addition, random 5-subsets are spot-checked by a direct
/// rank computation on the stack.
pub fn build_5separating(plane: &AffinePlane, spot_checks: usize, seed: u64) -> Result<GeometryBuild> {
    if plane.h != 3 {
        return Err(Error::Geometry("the stack construction is desk-scaled to h = 3".into()));
    }
    let ic = incidence_code(plane)?;
    let covering = build_generalized_covering(plane, None)?;
    let n = plane.n_points();
    let r = n - ic.code.params().k; // 27
    let incidence_rows = pack_rows(&ic.incidence);
    let pcm_rows = pack_rows(ic.code.pcm());

    // certification + extraction per block, in parallel, deterministic order
    let blocks: Vec<u64> = covering.all_blocks().collect();
    let parts: Vec<Result<Vec<u64>>> = blocks
        .par_iter()
        .map(|&mask| {
            let pts = mask_points(mask, n);
            // columns of the incidence matrix indexed by the block must be
            // independent: rank of the transposed selection equals |B|
            if column_rank(&incidence_rows, &pts) != pts.len() {
                return Err(Error::DependentColumns { cols: pts });
            }
            let (i_rows, m_rows) = packed_extract(&pcm_rows, &pts, r)
                .ok_or(Error::DependentColumns { cols: pts.clone() })?;
            let mut part = i_rows;
            part.extend(m_rows);
            debug_assert_eq!(part.len(), r);
            Ok(part)
        })
        .collect();
    let mut rows = Vec::with_capacity(r * blocks.len());
    let mut certified = 0usize;
    for p in parts {
        rows.extend(p?);
        certified += 1;
    }

    // spot checks: random 5-subsets, half of them inside random blocks
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    for i in 0..spot_checks {
        let s: Vec<usize> = if i % 2 == 0 {
            sample_subset(&mut rng, n, 5)
        } else {
            let b = mask_points(blocks[rng.gen_range(0..blocks.len())], n);
            sample_from(&mut rng, &b, 5)
        };
        let smask = s.iter().fold(0u64, |m, &p| m | 1 << p);
        if stack_rank_vanishing(&rows, smask, r - 5) != r - 5 {
            failures += 1;
        }
    }

    let accounting_blocks = covering.accounting_total;
    let bound_value = BigInt::from(3u64.pow(plane.h)) * BigInt::from(accounting_blocks);
    let p = ic.code.params();
    let comparison_floor = crate::bounds::geometry_comparison_floor(p, 5)?;
    let report = CertificationReport {
        h: plane.h,
        incidence_rank: r,
        l0: covering.l0.len(),
        l1: covering.l1.len(),
        l2: covering.l2.len(),
        total_blocks: covering.total(),
        realized_rows: rows.len(),
        accounting_blocks,
        bound_value,
        comparison_floor,
        blocks_certified: certified,
        coverage_verified: true,
        spot_checks,
        spot_failures: failures,
        d_assumed: !ic.d_verified,
    };
    if failures > 0 {
        return Err(Error::Geometry(format!(
            "{failures} of {spot_checks} spot checks failed"
        )));
    }
    Ok(GeometryBuild {
        code: ic.code,
        covering,
        rows,
        report,
    })
}

impl GeometryBuild {
    /// Stream the stacked matrix in GFMAT format without materializing a
    /// dense element matrix.
    pub fn write_stack_gfmat<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        let n = self.code.params().n;
        writeln!(w, "# 5-separating stack over AG(2,8); one block of {} rows per covering block", self.code.params().n - self.code.params().k)?;
        writeln!(w, "GFMAT 2 1 {} {}", self.rows.len(), n)?;
        let mut line = String::with_capacity(2 * n);
        for &row in &self.rows {
            line.clear();
            for c in 0..n {
                if c > 0 {
                    line.push(' ');
                }
                line.push(if row >> c & 1 == 1 { '1' } else { '0' });
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Rank of the rows vanishing on `s`, after puncturing, directly on the
    /// packed stack (the vanished columns are zero, so no removal needed).
    pub fn punctured_rank(&self, s: &[usize]) -> usize {
        let smask = s.iter().fold(0u64, |m, &p| m | 1 << p);
        stack_rank_vanishing(&self.rows, smask, usize::MAX)
    }
}

fn sample_subset(rng: &mut ChaCha12Rng, n: usize, k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.gen_range(0..=i));
    }
    let mut s = pool[..k].to_vec();
    s.sort_unstable();
    s
}

fn sample_from(rng: &mut ChaCha12Rng, pts: &[usize], k: usize) -> Vec<usize> {
    let mut pool = pts.to_vec();
    for i in (1..pool.len()).rev() {
        pool.swap(i, rng.gen_range(0..=i));
    }
    let mut s = pool[..k].to_vec();
    s.sort_unstable();
    s
}

/// Rank over GF(2) of the selected columns of a packed row list.
fn column_rank(rows: &[u64], cols: &[usize]) -> usize {
    // work with column vectors: bit r of column c = rows[r] >> c
    let mut basis: Vec<u128> = Vec::with_capacity(cols.len());
    let mut rank = 0;
    for &c in cols {
        let mut v: u128 = 0;
        for (ri, &row) in rows.iter().enumerate() {
            if row >> c & 1 == 1 {
                v |= 1 << ri;
            }
        }
        for &b in &basis {
            let top = 127 - b.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
            rank += 1;
        }
    }
    rank
}

/// Gaussian elimination on packed rows with pivot columns taken from `b`
/// first: returns (identity part, vanishing part) or None when the b
/// columns are dependent.
fn packed_extract(rows: &[u64], b: &[usize], expected_rank: usize) -> Option<(Vec<u64>, Vec<u64>)> {
    let mut work: Vec<u64> = rows.to_vec();
    let ncols = 64usize;
    let mut order: Vec<usize> = b.to_vec();
    order.extend((0..ncols).filter(|c| !b.contains(c)));
    let mut rank = 0usize;
    for (oi, &c) in order.iter().enumerate() {
        let bit = 1u64 << c;
        let Some(p) = (rank..work.len()).find(|&ri| work[ri] & bit != 0) else {
            if oi < b.len() {
                return None;
            }
            continue;
        };
        work.swap(rank, p);
        let pivot = work[rank];
        for (ri, wrow) in work.iter_mut().enumerate() {
            if ri != rank && *wrow & bit != 0 {
                *wrow ^= pivot;
            }
        }
        rank += 1;
        if rank == work.len() {
            break;
        }
    }
    if rank != expected_rank {
        return None;
    }
    Some((work[..b.len()].to_vec(), work[b.len()..rank].to_vec()))
}

/// Rank of the rows vanishing on smask, with early exit once `need` is
/// reached (pass usize::MAX for the exact rank).
fn stack_rank_vanishing(rows: &[u64], smask: u64, need: usize) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for &row in rows {
        if row & smask != 0 || row == 0 {
            continue;
        }
        let mut v = row;
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
        if rank >= need {
            return rank;
        }
    }
    rank
}
