//! Grounded Laplacian solves for conductance networks.
//!
//! Systems are symmetric positive definite once at least one node per
//! component is grounded. Small systems go through an in-place dense Cholesky
//! factorization (computed once, reused across right-hand sides) with
//! iterative refinement; larger ones through conjugate gradients with Jacobi
//! preconditioning. Both paths enforce a relative residual of at most
//! [`RESIDUAL_LIMIT`].

use crate::{NetError, Result};

/// Relative residual above which a solve is reported as a numerical failure.
pub const RESIDUAL_LIMIT: f64 = 1e-12;

/// Free-node count up to which the dense factorization path is used.
pub const DENSE_LIMIT: usize = 1600;

const CG_TARGET: f64 = 1e-14;

/// Compressed sparse rows of a symmetric conductance adjacency.
pub struct Csr {
    pub n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    pub degree: Vec<f64>,
}

impl Csr {
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Csr {
        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in edges {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let nnz = offsets[n];
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0f64; nnz];
        let mut degree = vec![0f64; n];
        for &(u, v, c) in edges {
            cols[cursor[u]] = v;
            vals[cursor[u]] = c;
            cursor[u] += 1;
            cols[cursor[v]] = u;
            vals[cursor[v]] = c;
            cursor[v] += 1;
            degree[u] += c;
            degree[v] += c;
        }
        Csr {
            n,
            offsets,
            cols,
            vals,
            degree,
        }
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[u]..self.offsets[u + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }
}

/// A grounded Laplacian operator: rows and columns restricted to `free`.
pub struct GroundedSystem<'a> {
    csr: &'a Csr,
    /// Global indices of the free nodes.
    pub free: Vec<usize>,
    /// Global index -> local free index (usize::MAX when grounded).
    pub local: Vec<usize>,
}

impl<'a> GroundedSystem<'a> {
    pub fn new(csr: &'a Csr, free: Vec<usize>) -> GroundedSystem<'a> {
        let mut local = vec![usize::MAX; csr.n];
        for (i, &v) in free.iter().enumerate() {
            local[v] = i;
        }
        GroundedSystem { csr, free, local }
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    /// y = L_ff x
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, &v) in self.free.iter().enumerate() {
            let mut acc = self.csr.degree[v] * x[i];
            for (w, c) in self.csr.neighbors(v) {
                let j = self.local[w];
                if j != usize::MAX {
                    acc -= c * x[j];
                }
            }
            y[i] = acc;
        }
    }

    /// One-shot solve; prefer [`GroundedSolver`] for repeated right-hand sides.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        GroundedSolver::new(self)?.solve(rhs)
    }
}

enum Factor {
    /// Dense Cholesky factor (lower triangle, row-major).
    Dense(Vec<f64>),
    /// Preconditioned conjugate gradients; stores the inverse diagonal.
    Iterative(Vec<f64>),
}

/// Reusable solver for one grounded system.
pub struct GroundedSolver<'s, 'a> {
    sys: &'s GroundedSystem<'a>,
    factor: Factor,
}

impl<'s, 'a> GroundedSolver<'s, 'a> {
    pub fn new(sys: &'s GroundedSystem<'a>) -> Result<Self> {
        let n = sys.len();
        let factor = if n <= DENSE_LIMIT {
            let mut a = vec![0.0f64; n * n];
            for (i, &v) in sys.free.iter().enumerate() {
                a[i * n + i] = sys.csr.degree[v];
                for (w, c) in sys.csr.neighbors(v) {
                    let j = sys.local[w];
                    if j != usize::MAX {
                        a[i * n + j] -= c;
                    }
                }
            }
            cholesky_in_place(&mut a, n)?;
            Factor::Dense(a)
        } else {
            Factor::Iterative(sys.free.iter().map(|&v| 1.0 / sys.csr.degree[v]).collect())
        };
        Ok(GroundedSolver { sys, factor })
    }

    /// Solves L_ff x = rhs to the crate residual limit.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.sys.len();
        if n == 0 {
            return Ok(vec![]);
        }
        if rhs.len() != n {
            return Err(NetError::InvalidInput(format!(
                "rhs length {} does not match {} free nodes",
                rhs.len(),
                n
            )));
        }
        let norm_b = norm(rhs);
        if norm_b == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let mut x = self.solve_once(rhs)?;
        // residual check, with refinement through the exact operator
        let mut r = vec![0.0; n];
        for _ in 0..3 {
            self.sys.apply(&x, &mut r);
            for i in 0..n {
                r[i] = rhs[i] - r[i];
            }
            if norm(&r) / norm_b <= RESIDUAL_LIMIT {
                return Ok(x);
            }
            let dx = self.solve_once(&r)?;
            for i in 0..n {
                x[i] += dx[i];
            }
        }
        self.sys.apply(&x, &mut r);
        for i in 0..n {
            r[i] = rhs[i] - r[i];
        }
        let rel = norm(&r) / norm_b;
        if rel <= RESIDUAL_LIMIT {
            Ok(x)
        } else {
            Err(NetError::NumericalFailure(format!(
                "grounded solve stalled at relative residual {rel:.3e}"
            )))
        }
    }

    fn solve_once(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.factor {
            Factor::Dense(a) => {
                let mut x = rhs.to_vec();
                cholesky_solve(a, self.sys.len(), &mut x);
                Ok(x)
            }
            Factor::Iterative(inv_diag) => self.solve_cg(rhs, inv_diag),
        }
    }

    fn solve_cg(&self, rhs: &[f64], inv_diag: &[f64]) -> Result<Vec<f64>> {
        let n = self.sys.len();
        let mut x = vec![0.0; n];
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let norm_b = norm(rhs);
        let target = CG_TARGET * norm_b;
        let max_iter = 40 * n + 200;
        for _ in 0..max_iter {
            if norm(&r) <= target {
                break;
            }
            self.sys.apply(&p, &mut ap);
            let denom = dot(&p, &ap);
            if denom <= 0.0 {
                return Err(NetError::NumericalFailure(
                    "conjugate gradient lost positive definiteness".into(),
                ));
            }
            let alpha = rz / denom;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Ok(x)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return Err(NetError::NumericalFailure(format!(
                "Cholesky pivot {d:.3e} at column {j}; system is singular"
            )));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    Ok(())
}

fn cholesky_solve(a: &[f64], n: usize, x: &mut [f64]) {
    // forward substitution L y = b
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= a[i * n + k] * x[k];
        }
        x[i] = s / a[i * n + i];
    }
    // back substitution L^T x = y
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= a[k * n + i] * x[k];
        }
        x[i] = s / a[i * n + i];
    }
}
