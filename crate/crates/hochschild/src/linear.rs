//! Exact Gaussian elimination over ℚ and F_p.
//!
//! The coboundary solver assembles its systems sparsely (matrix entries come
//! from generator tables) and flattens one homological degree at a time into a
//! [`LinearSystem`]. Elimination is fraction-free only in the sense that all
//! arithmetic is exact; the systems are small enough that no pivoting
//! heuristics are needed.

use crate::scalar::{Field, Scalar};

/// A dense m×n system assembled from sparse entries.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl LinearSystem {
    pub fn new(field: Field, rows: usize, cols: usize) -> LinearSystem {
        LinearSystem { field, rows, cols, entries: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: &Scalar) {
        let e = &mut self.entries[row * self.cols + col];
        *e = &*e + value;
    }

    fn at(&self, row: usize, col: usize) -> &Scalar {
        &self.entries[row * self.cols + col]
    }

    /// Row-reduce `[A | b]` and return a solution of `A x = b` if one exists.
    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(rhs.len(), self.rows);
        let mut m = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut row: Vec<Scalar> = (0..self.cols).map(|j| self.at(i, j).clone()).collect();
            row.push(rhs[i].clone());
            m.push(row);
        }
        let width = self.cols + 1;
        let pivots = reduce(&mut m, width);

        // Inconsistent if some pivot sits in the rhs column.
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(self.field); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = m[r][self.cols].clone();
        }
        Some(x)
    }

    /// A basis of the kernel of `A`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row: Vec<Scalar> = (0..self.cols).map(|j| self.at(i, j).clone()).collect();
            m.push(row);
        }
        let pivots = reduce(&mut m, self.cols);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Scalar::zero(self.field); self.cols];
            v[fc] = Scalar::one(self.field);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m[r][fc].neg();
            }
            basis.push(v);
        }
        basis
    }

    /// True when every stored entry is zero.
    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }
}

/// In-place reduced row echelon form; returns pivot columns in row order.
#[allow(clippy::needless_range_loop)]
fn reduce(m: &mut [Vec<Scalar>], width: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        let inv = m[rank][col].inv().expect("pivot is nonzero");
        for j in col..width {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..width {
                    let delta = &factor * &m[rank][j];
                    m[r][j] = &m[r][j] - &delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Scalar::from_integer(Field::Rationals, n)
    }

    #[test]
    fn solves_square_system() {
        // x + 2y = 5, 3x + 4y = 11  =>  x = 1, y = 2
        let mut sys = LinearSystem::new(Field::Rationals, 2, 2);
        sys.add_to(0, 0, &q(1));
        sys.add_to(0, 1, &q(2));
        sys.add_to(1, 0, &q(3));
        sys.add_to(1, 1, &q(4));
        let x = sys.solve(&[q(5), q(11)]).unwrap();
        assert_eq!(x, vec![q(1), q(2)]);
    }

    #[test]
    fn detects_inconsistency() {
        let mut sys = LinearSystem::new(Field::Rationals, 2, 1);
        sys.add_to(0, 0, &q(1));
        sys.add_to(1, 0, &q(1));
        assert!(sys.solve(&[q(1), q(2)]).is_none());
    }

    #[test]
    fn kernel_over_f3() {
        let f3 = Field::prime(3).unwrap();
        // single equation x + y + z = 0 over F_3: kernel has dimension 2
        let mut sys = LinearSystem::new(f3, 1, 3);
        for j in 0..3 {
            sys.add_to(0, j, &Scalar::one(f3));
        }
        let basis = sys.kernel();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let sum = v.iter().fold(Scalar::zero(f3), |acc, s| &acc + s);
            assert!(sum.is_zero());
        }
    }

    #[test]
    fn underdetermined_solve_verifies() {
        let f5 = Field::prime(5).unwrap();
        let mut sys = LinearSystem::new(f5, 1, 2);
        sys.add_to(0, 0, &Scalar::from_integer(f5, 2));
        sys.add_to(0, 1, &Scalar::from_integer(f5, 3));
        let rhs = [Scalar::from_integer(f5, 4)];
        let x = sys.solve(&rhs).unwrap();
        let lhs = &(&Scalar::from_integer(f5, 2) * &x[0]) + &(&Scalar::from_integer(f5, 3) * &x[1]);
        assert_eq!(lhs, rhs[0]);
    }
}
