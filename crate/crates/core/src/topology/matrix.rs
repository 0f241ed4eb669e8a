//! Exact integer matrices and simplicial boundary operators.

use thiserror::Error;

use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TopologyError {
    #[error("dimension {d} is out of range for this complex")]
    DimensionOutOfRange { d: usize },
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("complex is empty")]
    EmptyComplex,
    #[error("complex is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

/// Dense row-major matrix of exact 64-bit integers. Boundary operators only
/// ever hold -1, 0, 1; wider intermediate values live in the elimination
/// routines, which lift to arbitrary precision.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntegerMatrix { rows: r, cols: c, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Exact product, for boundary-composition checks.
    pub fn multiply(&self, other: &IntegerMatrix) -> Result<IntegerMatrix, TopologyError> {
        assert_eq!(self.cols, other.rows);
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b == 0 {
                        continue;
                    }
                    let cur = out.get(i, j) as i128 + (a as i128) * (b as i128);
                    out.set(i, j, i64::try_from(cur).map_err(|_| TopologyError::Overflow)?);
                }
            }
        }
        Ok(out)
    }
}

/// The oriented boundary operator from d-simplices to (d-1)-simplices, with
/// simplices in the complex's stored (sorted) order and signs by position
/// parity of the omitted vertex.
pub fn boundary_matrix(k: &SimplicialComplex, d: usize) -> Result<IntegerMatrix, TopologyError> {
    if d == 0 || k.simplices(d).is_none() {
        return Err(TopologyError::DimensionOutOfRange { d });
    }
    let faces = k.simplices(d - 1).ok_or(TopologyError::DimensionOutOfRange { d })?;
    let cells = k.simplices(d).unwrap();
    let mut m = IntegerMatrix::zeros(faces.len(), cells.len());
    let mut face = Vec::with_capacity(d);
    for (j, s) in cells.iter().enumerate() {
        for omit in 0..=d {
            face.clear();
            face.extend(s.iter().take(omit).chain(s.iter().skip(omit + 1)));
            let i = faces
                .position(&face)
                .expect("complexes are closed under faces");
            let sign = if omit % 2 == 0 { 1 } else { -1 };
            m.set(i, j, sign);
        }
    }
    Ok(m)
}

/// Sparse rows of the transposed boundary operator: one row per d-simplex,
/// entries (face index, sign). Streams without materializing the dense
/// matrix; used for rank certification at scale.
pub fn boundary_rows_transposed(
    k: &SimplicialComplex,
    d: usize,
) -> Result<Vec<Vec<(u32, i64)>>, TopologyError> {
    if d == 0 || k.simplices(d).is_none() {
        return Err(TopologyError::DimensionOutOfRange { d });
    }
    let faces = k.simplices(d - 1).ok_or(TopologyError::DimensionOutOfRange { d })?;
    let cells = k.simplices(d).unwrap();
    let mut rows = Vec::with_capacity(cells.len());
    let mut face = Vec::with_capacity(d);
    for s in cells.iter() {
        let mut row = Vec::with_capacity(d + 1);
        for omit in 0..=d {
            face.clear();
            face.extend(s.iter().take(omit).chain(s.iter().skip(omit + 1)));
            let i = faces.position(&face).expect("complexes are closed under faces") as u32;
            row.push((i, if omit % 2 == 0 { 1 } else { -1 }));
        }
        row.sort_unstable_by_key(|&(c, _)| c);
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn single_edge_boundary() {
        let k = SimplicialComplex::from_maximal(labels(2), &[vec![0, 1]]);
        let m = boundary_matrix(&k, 1).unwrap();
        assert_eq!((m.rows, m.cols), (2, 1));
        assert_eq!((m.get(0, 0), m.get(1, 0)), (-1, 1));
    }

    #[test]
    fn hollow_triangle_column_sums_vanish() {
        let k = SimplicialComplex::from_maximal(labels(3), &[vec![0, 1], vec![1, 2], vec![0, 2]]);
        let m = boundary_matrix(&k, 1).unwrap();
        assert_eq!((m.rows, m.cols), (3, 3));
        for j in 0..3 {
            assert_eq!((0..3).map(|i| m.get(i, j)).sum::<i64>(), 0);
        }
    }

    #[test]
    fn filled_triangle_has_alternating_signs() {
        let k = SimplicialComplex::from_maximal(labels(3), &[vec![0, 1, 2]]);
        let m = boundary_matrix(&k, 2).unwrap();
        assert_eq!((m.rows, m.cols), (3, 1));
        let col: Vec<i64> = (0..3).map(|i| m.get(i, 0)).collect();
        // Faces in lex order: [0,1], [0,2], [1,2]; signs +,-,+ reading off
        // omitted positions 2,1,0.
        assert_eq!(col, vec![1, -1, 1]);
    }

    #[test]
    fn boundary_squares_to_zero() {
        let k = SimplicialComplex::from_maximal(
            labels(5),
            &[vec![0, 1, 2, 3], vec![1, 2, 4], vec![0, 4]],
        );
        for d in 2..=3 {
            let a = boundary_matrix(&k, d - 1).unwrap();
            let b = boundary_matrix(&k, d).unwrap();
            assert!(a.multiply(&b).unwrap().is_zero(), "d = {d}");
        }
    }

    #[test]
    fn sparse_rows_match_dense() {
        let k = SimplicialComplex::from_maximal(labels(4), &[vec![0, 1, 2], vec![1, 2, 3]]);
        let dense = boundary_matrix(&k, 2).unwrap();
        let rows = boundary_rows_transposed(&k, 2).unwrap();
        assert_eq!(rows.len(), dense.cols);
        for (j, row) in rows.iter().enumerate() {
            for &(i, v) in row {
                assert_eq!(dense.get(i as usize, j), v);
            }
            assert_eq!(row.len(), 3);
        }
    }
}
