//! Sparse LU solve via faer.

use crate::error::{Error, Result};
use faer::linalg::solvers::SolveCore;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};

/// Solution of a square sparse system plus its verified residual.
pub struct LinearSolve {
    pub solution: Vec<f64>,
    /// max_i |b − Ax|_i, computed from the raw triplets after the solve.
    pub residual_inf: f64,
}

/// Solve `A x = b` with a sparse LU factorization. Duplicate triplets are
/// summed. Fails on structurally or numerically singular systems.
pub fn solve_sparse(n: usize, triplets: &[(usize, usize, f64)], rhs: &[f64]) -> Result<LinearSolve> {
    let trips: Vec<Triplet<usize, usize, f64>> = triplets
        .iter()
        .map(|&(i, j, v)| Triplet::new(i, j, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
        .map_err(|e| Error::solver(format!("sparse matrix construction failed: {e:?}")))?;
    let sym = SymbolicLu::try_new(a.symbolic())
        .map_err(|e| Error::solver(format!("symbolic factorization failed: {e:?}")))?;
    let lu = Lu::try_new_with_symbolic(sym, a.as_ref())
        .map_err(|e| Error::solver(format!("numeric factorization failed: {e:?}")))?;
    let mut x = faer::Mat::<f64>::zeros(n, 1);
    for i in 0..n {
        x[(i, 0)] = rhs[i];
    }
    lu.solve_in_place_with_conj(faer::Conj::No, x.as_mut());
    let solution: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    let res = super::assemble::residual(n, triplets, rhs, &solution);
    let residual_inf = res.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if !residual_inf.is_finite() {
        return Err(Error::solver("linear solve produced non-finite residual"));
    }
    Ok(LinearSolve {
        solution,
        residual_inf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_system_and_sums_duplicates() {
        // [2 1; 1 3] x = [5; 10], with the (0,0) entry split into duplicates.
        let trips = vec![
            (0, 0, 1.5),
            (0, 0, 0.5),
            (0, 1, 1.0),
            (1, 0, 1.0),
            (1, 1, 3.0),
        ];
        let s = solve_sparse(2, &trips, &[5.0, 10.0]).unwrap();
        assert!((s.solution[0] - 1.0).abs() < 1e-14);
        assert!((s.solution[1] - 3.0).abs() < 1e-14);
        assert!(s.residual_inf < 1e-13);
    }

    #[test]
    fn singular_system_is_an_error() {
        let trips = vec![(0, 0, 1.0), (1, 0, 1.0)];
        // Column 1 empty: structurally singular.
        assert!(solve_sparse(2, &trips, &[1.0, 1.0]).is_err());
    }
}
