//! Smith normal form and rational rank over exact big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntegerMatrix;

fn lift(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect()
}

/// Position of a nonzero entry of least absolute value in the submatrix
/// starting at (t, t).
fn min_pivot(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[bi][bj].abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// The diagonal invariant factors d1 | d2 | ... of the matrix (positive,
/// zeros omitted). The number of invariants is the rank.
pub fn smith_normal_form(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut a = lift(m);
    let rows = m.rows;
    let cols = m.cols;
    let mut t = 0usize;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_pivot(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        'improve: loop {
            // Clear the pivot column. A nonzero remainder becomes the new,
            // strictly smaller pivot, so this terminates.
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    continue 'improve;
                }
            }
            // Clear the pivot row the same way.
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for row in a.iter_mut().take(rows).skip(t) {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    continue 'improve;
                }
            }
            // Pivot must divide every remaining entry; otherwise fold the
            // offending row in and shrink the pivot further.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        for jj in t..cols {
                            let add = a[i][jj].clone();
                            a[t][jj] += add;
                        }
                        continue 'improve;
                    }
                }
            }
            break;
        }
        t += 1;
    }
    let mut invariants: Vec<BigInt> = (0..t).map(|i| a[i][i].abs()).collect();
    invariants.retain(|d| !d.is_zero());
    // The pivoting scheme already yields a divisibility chain; normalize
    // defensively so the contract holds regardless.
    for i in 0..invariants.len() {
        for j in i + 1..invariants.len() {
            let (di, dj) = (invariants[i].clone(), invariants[j].clone());
            let g = di.gcd(&dj);
            let l = &di / &g * &dj;
            invariants[i] = g;
            invariants[j] = l;
        }
    }
    invariants
}

/// Rank over the rationals by fraction-free Bareiss elimination. An
/// independent route from `smith_normal_form`.
pub fn rank(m: &IntegerMatrix) -> usize {
    let mut a = lift(m);
    let rows = m.rows;
    let cols = m.cols;
    let mut rank = 0usize;
    let mut prev = BigInt::from(1);
    for _col_round in 0..cols {
        // Find a pivot in column range [rank..] over rows [rank..].
        let mut pivot: Option<(usize, usize)> = None;
        'outer: for j in rank..cols {
            for i in rank..rows {
                if !a[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        let (pivot_row, rest) = a.split_at_mut(rank + 1);
        let prow = &pivot_row[rank];
        for row in rest {
            for j in rank + 1..cols {
                let num = &prow[rank] * &row[j] - &row[rank] * &prow[j];
                row[j] = &num / &prev;
            }
            row[rank] = BigInt::zero();
        }
        prev = prow[rank].clone();
        rank += 1;
        if rank >= rows.min(cols) {
            // Any remaining nonzero column still counts toward the rank
            // bound; the loop above handles it on later rounds.
        }
        if rank == rows.min(cols) {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows)
    }

    fn snf_u64(mat: &IntegerMatrix) -> Vec<u64> {
        smith_normal_form(mat).iter().map(|d| u64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(snf_u64(&IntegerMatrix::identity(3)), vec![1, 1, 1]);
        assert_eq!(snf_u64(&IntegerMatrix::zeros(2, 3)), Vec::<u64>::new());
    }

    #[test]
    fn diagonal_2_3_gives_1_6() {
        assert_eq!(snf_u64(&m(vec![vec![2, 0], vec![0, 3]])), vec![1, 6]);
    }

    #[test]
    fn torsion_example() {
        // 2x2 with determinant 4 and gcd 2.
        assert_eq!(snf_u64(&m(vec![vec![2, 0], vec![0, 2]])), vec![2, 2]);
    }

    #[test]
    fn rank_agrees_with_snf_on_randoms() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let r = rng.random_range(1..=6);
            let c = rng.random_range(1..=6);
            let mat = m((0..r)
                .map(|_| (0..c).map(|_| rng.random_range(-4..=4)).collect())
                .collect());
            assert_eq!(rank(&mat), smith_normal_form(&mat).len());
        }
    }

    #[test]
    fn snf_matches_minor_gcd_oracle_on_randoms() {
        use num_traits::One;
        use rand::Rng;
        use rand::SeedableRng;

        // Determinant-divisor oracle: the product d1...dr equals the gcd of
        // all r x r minors, computed by brute-force enumeration.
        fn minors_gcd(mat: &IntegerMatrix, r: usize) -> BigInt {
            fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
                if k == 0 {
                    return vec![vec![]];
                }
                let mut out = Vec::new();
                for first in 0..n {
                    for mut rest in combos(n - first - 1, k - 1) {
                        for x in rest.iter_mut() {
                            *x += first + 1;
                        }
                        let mut v = vec![first];
                        v.extend(rest);
                        out.push(v);
                    }
                }
                out
            }
            fn det(a: &Vec<Vec<BigInt>>) -> BigInt {
                let n = a.len();
                if n == 1 {
                    return a[0][0].clone();
                }
                let mut acc = BigInt::zero();
                for j in 0..n {
                    let minor: Vec<Vec<BigInt>> = a[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|(c, _)| *c != j)
                                .map(|(_, v)| v.clone())
                                .collect()
                        })
                        .collect();
                    let term = &a[0][j] * det(&minor);
                    if j % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                acc
            }
            let mut g = BigInt::zero();
            for rows in combos(mat.rows, r) {
                for cols in combos(mat.cols, r) {
                    let sub: Vec<Vec<BigInt>> = rows
                        .iter()
                        .map(|&i| cols.iter().map(|&j| BigInt::from(mat.get(i, j))).collect())
                        .collect();
                    g = g.gcd(&det(&sub));
                }
            }
            g
        }

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let r = rng.random_range(1..=4);
            let c = rng.random_range(1..=4);
            let mat = m((0..r)
                .map(|_| (0..c).map(|_| rng.random_range(-5..=5)).collect())
                .collect());
            let inv = smith_normal_form(&mat);
            // Divisibility chain.
            for w in inv.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "chain broken: {inv:?}");
            }
            // Determinant divisors.
            let mut product = BigInt::one();
            for (idx, d) in inv.iter().enumerate() {
                product *= d;
                assert_eq!(product, minors_gcd(&mat, idx + 1), "minor gcd mismatch at {idx}");
            }
        }
    }
}
