//! Floating-point LLL reduction of basis columns, tracking the unimodular
//! change of basis.

use nalgebra::DMatrix;

/// A reduced basis `reduced = basis · transform` with `transform ∈ GLₙ(ℤ)`.
#[derive(Debug, Clone)]
pub struct LllOutput {
    pub reduced: DMatrix<f64>,
    pub transform: DMatrix<i64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram–Schmidt data of columns: squared norms of `b*_i` and coefficients
/// `mu[i][j] = <b_i, b*_j> / |b*_j|²` for `j < i`.
pub(crate) fn gram_schmidt(cols: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let n = cols.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = vec![0.0; n];
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = cols[i].clone();
        for j in 0..i {
            let m = if norms[j] > 0.0 { dot(&cols[i], &star[j]) / norms[j] } else { 0.0 };
            mu[i][j] = m;
            for (a, b) in v.iter_mut().zip(&star[j]) {
                *a -= m * b;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (star, norms, mu)
}

/// LLL with Lovász parameter `delta` (0.25 < delta < 1) on the columns of `basis`.
pub fn lll_reduce(basis: &DMatrix<f64>, delta: f64) -> LllOutput {
    let n = basis.ncols();
    let mut cols: Vec<Vec<f64>> = basis.column_iter().map(|c| c.iter().copied().collect()).collect();
    let mut u: Vec<Vec<i64>> = (0..n).map(|j| (0..n).map(|i| i64::from(i == j)).collect()).collect();

    if n > 1 {
        let (_, mut norms, mut mu) = gram_schmidt(&cols);
        let mut k = 1;
        let mut guard = 0usize;
        while k < n {
            guard += 1;
            if guard > 100_000 {
                break;
            }
            for j in (0..k).rev() {
                let q = mu[k][j].round();
                if q != 0.0 {
                    let qi = q as i64;
                    let (head, tail) = cols.split_at_mut(k);
                    for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                        *a -= q * b;
                    }
                    let (uh, ut) = u.split_at_mut(k);
                    for (a, b) in ut[0].iter_mut().zip(&uh[j]) {
                        *a -= qi * b;
                    }
                    mu[k][j] -= q;
                    for i in 0..j {
                        mu[k][i] -= q * mu[j][i];
                    }
                }
            }
            let lhs = norms[k];
            let rhs = (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1];
            if lhs >= rhs {
                k += 1;
            } else {
                cols.swap(k, k - 1);
                u.swap(k, k - 1);
                let (_, nn, mm) = gram_schmidt(&cols);
                norms = nn;
                mu = mm;
                k = (k - 1).max(1);
            }
        }
    }

    let rows = basis.nrows();
    LllOutput {
        reduced: DMatrix::from_fn(rows, n, |i, j| cols[j][i]),
        transform: DMatrix::from_fn(n, n, |i, j| u[j][i]),
    }
}
