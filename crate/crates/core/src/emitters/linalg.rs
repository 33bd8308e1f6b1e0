use nalgebra::DMatrix;

use crate::Scalar;

/// Eigen-decomposition of a symmetric `n x n` row-major matrix. Returns the
/// eigenvalues and the eigenvectors as the columns of a row-major matrix.
///
/// The decomposition runs in `f64` whatever the scalar type.
pub fn symmetric_eigen<T: Scalar>(a: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let m = DMatrix::from_fn(n, n, |i, j| a[i * n + j].as_f64());
    let eig = m.symmetric_eigen();
    let values = eig.eigenvalues.iter().map(|&v| T::lit(v)).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            vectors.push(T::lit(eig.eigenvectors[(i, j)]));
        }
    }
    (values, vectors)
}
