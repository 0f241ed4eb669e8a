//! Sparse and dense rank computation over prime fields.
//!
//! The sparse path is a left-looking elimination: pivot rows are kept
//! normalized (leading coefficient 1) and indexed by leading column;
//! incoming rows reduce against them until their leading column is free.
//! With the `parallel` feature, incoming rows are pre-reduced in chunks
//! against a frozen pivot snapshot before sequential insertion. Reduction
//! against a fixed pivot set is a deterministic function of the row, so the
//! chunked result is bitwise identical to the sequential one.

use super::matrix::{IntegerMatrix, TopologyError};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(v: u64, p: u64) -> u64 {
    mod_pow(v, p - 2, p)
}

fn reduce_entry(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Rank of a dense matrix over F_p by Gaussian elimination.
pub fn rank_mod_p(m: &IntegerMatrix, p: u64) -> Result<usize, TopologyError> {
    if !is_prime(p) {
        return Err(TopologyError::NotPrime { p });
    }
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| reduce_entry(m.get(i, j), p)).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..m.cols {
        let Some(pivot) = (rank..m.rows).find(|&i| a[i][col] != 0) else { continue };
        a.swap(rank, pivot);
        let inv = mod_inv(a[rank][col], p);
        for j in col..m.cols {
            a[rank][j] = a[rank][j] * inv % p;
        }
        let (pivot_row, rest) = a.split_at_mut(rank + 1);
        let prow = &pivot_row[rank];
        for row in rest.iter_mut() {
            let f = row[col];
            if f != 0 {
                for j in col..m.cols {
                    row[j] = (row[j] + (p - f) * prow[j] % p) % p;
                }
            }
        }
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    Ok(rank)
}

/// A sparse row over F_p: strictly ascending columns, values in 1..p.
type Row = Vec<(u32, u64)>;

fn normalize_row(row: &[(u32, i64)], p: u64) -> Row {
    let mut out: Row = row
        .iter()
        .filter_map(|&(c, v)| {
            let v = reduce_entry(v, p);
            (v != 0).then_some((c, v))
        })
        .collect();
    out.sort_unstable_by_key(|&(c, _)| c);
    out
}

/// result = a - f * b (mod p), both sorted by column.
fn row_sub_scaled(a: &[(u32, u64)], b: &[(u32, u64)], f: u64, p: u64) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                let v = (va + (p - f % p) * vb % p) % p;
                if v != 0 {
                    out.push((ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                out.push((ca, va));
                i += 1;
            }
            (Some(_), Some(&(cb, vb))) => {
                let v = (p - f % p) * vb % p;
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (Some(&(ca, va)), None) => {
                out.push((ca, va));
                i += 1;
            }
            (None, Some(&(cb, vb))) => {
                let v = (p - f % p) * vb % p;
                if v != 0 {
                    out.push((cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Reduces a row against the pivot set until its leading column is free.
/// Returns None when the row vanishes.
fn reduce_against(mut row: Row, pivots: &[Option<Row>], p: u64) -> Option<Row> {
    loop {
        let &(c, v) = row.first()?;
        match &pivots[c as usize] {
            Some(pivot) => row = row_sub_scaled(&row, pivot, v, p),
            None => return Some(row),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRankOutcome {
    pub rank: usize,
    pub rows_processed: usize,
    pub stopped_early: bool,
}

/// Sparse rank over F_p. `stop_at` allows early exit once a target rank is
/// certified (the rank of a submatrix is a lower bound for the whole).
pub fn sparse_rank_mod_p(
    rows: &[Vec<(u32, i64)>],
    ncols: usize,
    p: u64,
    stop_at: Option<usize>,
) -> Result<SparseRankOutcome, TopologyError> {
    if !is_prime(p) {
        return Err(TopologyError::NotPrime { p });
    }
    let mut pivots: Vec<Option<Row>> = vec![None; ncols];
    let mut rank = 0usize;
    let mut processed = 0usize;

    let chunk_size = 2048usize;
    for chunk in rows.chunks(chunk_size) {
        let pre: Vec<Option<Row>> = {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                chunk
                    .par_iter()
                    .map(|r| reduce_against(normalize_row(r, p), &pivots, p))
                    .collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                chunk.iter().map(|r| reduce_against(normalize_row(r, p), &pivots, p)).collect()
            }
        };
        for row in pre {
            processed += 1;
            let Some(row) = row.and_then(|r| reduce_against(r, &pivots, p)) else { continue };
            let (c, v) = row[0];
            let inv = mod_inv(v, p);
            let normalized: Row = row.iter().map(|&(col, val)| (col, val * inv % p)).collect();
            pivots[c as usize] = Some(normalized);
            rank += 1;
            if stop_at == Some(rank) {
                return Ok(SparseRankOutcome { rank, rows_processed: processed, stopped_early: true });
            }
        }
    }
    Ok(SparseRankOutcome { rank, rows_processed: processed, stopped_early: false })
}

/// Fully sequential variant with identical output, for benchmarks.
pub fn sparse_rank_mod_p_seq(
    rows: &[Vec<(u32, i64)>],
    ncols: usize,
    p: u64,
    stop_at: Option<usize>,
) -> Result<SparseRankOutcome, TopologyError> {
    if !is_prime(p) {
        return Err(TopologyError::NotPrime { p });
    }
    let mut pivots: Vec<Option<Row>> = vec![None; ncols];
    let mut rank = 0usize;
    let mut processed = 0usize;
    for r in rows {
        processed += 1;
        let Some(row) = reduce_against(normalize_row(r, p), &pivots, p) else { continue };
        let (c, v) = row[0];
        let inv = mod_inv(v, p);
        pivots[c as usize] = Some(row.iter().map(|&(col, val)| (col, val * inv % p)).collect());
        rank += 1;
        if stop_at == Some(rank) {
            return Ok(SparseRankOutcome { rank, rows_processed: processed, stopped_early: true });
        }
    }
    Ok(SparseRankOutcome { rank, rows_processed: processed, stopped_early: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(3));
        assert!(is_prime(46337));
        assert!(!is_prime(1));
        assert!(!is_prime(46339 * 3));
    }

    #[test]
    fn dense_rank_examples() {
        assert_eq!(rank_mod_p(&IntegerMatrix::identity(3), 2).unwrap(), 3);
        let m = IntegerMatrix::from_rows(vec![vec![2]]);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 0);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 1);
        assert!(rank_mod_p(&m, 4).is_err());
    }

    #[test]
    fn sparse_matches_dense_on_randoms() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for p in [2u64, 3, 46337] {
            for _ in 0..30 {
                let r = rng.random_range(1..=8);
                let c = rng.random_range(1..=8);
                let dense = IntegerMatrix::from_rows(
                    (0..r).map(|_| (0..c).map(|_| rng.random_range(-6..=6)).collect()).collect(),
                );
                let rows: Vec<Vec<(u32, i64)>> = (0..r)
                    .map(|i| {
                        (0..c)
                            .filter_map(|j| {
                                let v = dense.get(i, j);
                                (v != 0).then_some((j as u32, v))
                            })
                            .collect()
                    })
                    .collect();
                let expected = rank_mod_p(&dense, p).unwrap();
                let got = sparse_rank_mod_p(&rows, c, p, None).unwrap();
                let got_seq = sparse_rank_mod_p_seq(&rows, c, p, None).unwrap();
                assert_eq!(got.rank, expected);
                assert_eq!(got_seq, got);
            }
        }
    }

    #[test]
    fn rank_mod_p_bounded_by_rational_rank() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let r = rng.random_range(1..=6);
            let c = rng.random_range(1..=6);
            let dense = IntegerMatrix::from_rows(
                (0..r).map(|_| (0..c).map(|_| rng.random_range(-5..=5)).collect()).collect(),
            );
            let rational = super::super::snf::rank(&dense);
            let invariants = super::super::snf::smith_normal_form(&dense);
            for p in [2u64, 3, 5, 46337] {
                let modp = rank_mod_p(&dense, p).unwrap();
                assert!(modp <= rational);
                let p_divides_some = invariants
                    .iter()
                    .any(|d| (d % num_bigint::BigInt::from(p)) == num_bigint::BigInt::from(0));
                if !p_divides_some {
                    assert_eq!(modp, rational, "p = {p} divides no invariant");
                }
            }
        }
    }

    #[test]
    fn early_stop_reports_partial_progress() {
        let rows: Vec<Vec<(u32, i64)>> = vec![vec![(0, 1)], vec![(1, 1)], vec![(2, 1)]];
        let out = sparse_rank_mod_p(&rows, 3, 2, Some(2)).unwrap();
        assert_eq!(out.rank, 2);
        assert!(out.stopped_early);
        assert_eq!(out.rows_processed, 2);
    }
}
