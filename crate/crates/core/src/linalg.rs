//! Dense complex helpers: unitarity defects, zero-skipping products and the
//! pivoted Gram–Schmidt factorization of a Gram matrix.

use nalgebra::DMatrix;

use crate::C64;

/// `max_{ij} |(A†A - I)_{ij}|`.
pub fn unitarity_defect(a: &DMatrix<C64>) -> f64 {
    if a.nrows() != a.ncols() {
        return f64::INFINITY;
    }
    let gram = adjoint_mul(a, a);
    identity_deviation(&gram)
}

/// `max_{ij} |(A - I)_{ij}|` for a square matrix.
pub fn identity_deviation(a: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let target = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            worst = worst.max((a[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `A B`, skipping exact zeros of `B` (the span matrices are mostly
/// permutations, so this is far cheaper than a dense product).
pub fn mul_sparse(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), b.ncols());
    for j in 0..b.ncols() {
        for k in 0..b.nrows() {
            let bkj = b[(k, j)];
            if bkj == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..a.nrows() {
                let aik = a[(i, k)];
                if aik != C64::new(0.0, 0.0) {
                    out[(i, j)] += aik * bkj;
                }
            }
        }
    }
    out
}

/// `A† B`, skipping exact zeros.
pub fn adjoint_mul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    mul_sparse(&a.adjoint(), b)
}

/// Pivoted Gram–Schmidt performed on a Gram matrix `G_{ab} = ⟨v_a, v_b⟩`.
///
/// With orthonormal vectors `q_k = Σ_j coeffs[(j, k)] v_{pivots[j]}`, every
/// input satisfies `v_a = Σ_k coords[(a, k)] q_k + residual_a`, where the
/// squared residual norms are `residual_sqr[a]`.
#[derive(Clone, Debug)]
pub struct GramFactor {
    pub pivots: Vec<usize>,
    /// `N × r`, `coords[(a, k)] = ⟨q_k, v_a⟩`.
    pub coords: DMatrix<C64>,
    /// `r × r` upper triangular.
    pub coeffs: DMatrix<C64>,
    pub residual_sqr: Vec<f64>,
}

impl GramFactor {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Factorizes `gram` choosing, at each step, the vector with the largest
/// remaining squared norm. Stops once that squared norm is at most `tol`.
pub fn pivoted_gram_schmidt(gram: &DMatrix<C64>, tol: f64) -> GramFactor {
    let n = gram.nrows();
    assert_eq!(n, gram.ncols(), "Gram matrix must be square");
    let mut residual: Vec<f64> = (0..n).map(|a| gram[(a, a)].re).collect();
    let mut used = vec![false; n];
    let mut pivots = Vec::new();
    // columns of coords, grown one pivot at a time
    let mut columns: Vec<Vec<C64>> = Vec::new();

    loop {
        let best = (0..n)
            .filter(|&a| !used[a])
            .fold(None::<usize>, |best, a| match best {
                Some(b) if residual[b] >= residual[a] => Some(b),
                _ => Some(a),
            });
        let Some(p) = best else { break };
        if residual[p] <= tol {
            break;
        }
        let rho = residual[p].sqrt();
        used[p] = true;

        // nonzero coordinates of the pivot so far
        let support: Vec<(usize, C64)> = columns
            .iter()
            .enumerate()
            .filter_map(|(j, col)| {
                let c = col[p];
                (c != C64::new(0.0, 0.0)).then_some((j, c.conj()))
            })
            .collect();

        let mut col = vec![C64::new(0.0, 0.0); n];
        for a in 0..n {
            if used[a] && a != p {
                continue;
            }
            let mut value = gram[(p, a)];
            for &(j, conj_pj) in &support {
                value -= conj_pj * columns[j][a];
            }
            col[a] = value / rho;
        }
        col[p] = C64::new(rho, 0.0);
        for a in 0..n {
            if !used[a] {
                residual[a] -= col[a].norm_sqr();
            }
        }
        residual[p] = 0.0;
        columns.push(col);
        pivots.push(p);
    }

    let r = pivots.len();
    // a pivot has zero coordinates on every later q
    let mut coords = DMatrix::zeros(n, r);
    for (k, col) in columns.iter().enumerate() {
        for a in 0..n {
            coords[(a, k)] = col[a];
        }
    }

    // T[k, j] = coords[(pivots[j], k)] is upper triangular; coeffs = T^{-1}.
    let mut t = DMatrix::zeros(r, r);
    for (j, &p) in pivots.iter().enumerate() {
        for k in 0..=j {
            t[(k, j)] = coords[(p, k)];
        }
    }
    let coeffs = invert_upper(&t);
    let residual_sqr = residual.into_iter().map(|x| x.max(0.0)).collect();
    GramFactor {
        pivots,
        coords,
        coeffs,
        residual_sqr,
    }
}

/// Inverse of an upper-triangular matrix with nonzero diagonal.
fn invert_upper(t: &DMatrix<C64>) -> DMatrix<C64> {
    let r = t.nrows();
    let mut inv = DMatrix::zeros(r, r);
    for col in 0..r {
        // solve T x = e_col by back substitution; x is zero below `col`
        inv[(col, col)] = C64::new(1.0, 0.0) / t[(col, col)];
        for i in (0..col).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in (i + 1)..=col {
                let tik = t[(i, k)];
                if tik != C64::new(0.0, 0.0) {
                    acc += tik * inv[(k, col)];
                }
            }
            if acc != C64::new(0.0, 0.0) {
                inv[(i, col)] = -acc / t[(i, i)];
            }
        }
    }
    inv
}
