//! Spectral solution `γ_t = V · diag(e^{l t}) · C` of a diagonalizable generator.

use nalgebra::DMatrix;

use super::Generator;

/// Eigenvector matrices with condition number at or above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors `v_i`.
    pub v: DMatrix<f64>,
    /// `C = V⁻¹`; row `i` holds the constants `c_{i,j}`.
    pub c: DMatrix<f64>,
    pub condition: f64,
}

impl EigenSolution {
    /// `γ_t(k | j) = Σ_i c_{i,j} v_{k,i} e^{l_i t}`.
    pub fn kernel_at(&self, t: f64) -> DMatrix<f64> {
        let n = self.eigenvalues.len();
        let mut scaled = self.c.clone();
        for i in 0..n {
            let f = (self.eigenvalues[i] * t).exp();
            scaled.row_mut(i).scale_mut(f);
        }
        &self.v * scaled
    }

    /// Indices grouped by (numerically) equal eigenvalue, in eigenvalue order.
    pub fn clusters(&self) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            match out.last_mut() {
                Some((rep, members)) if same_eigenvalue(*rep, l) => members.push(i),
                _ => out.push((l, vec![i])),
            }
        }
        out
    }

    /// The spectral projector `Σ_{i in cluster} v_i c_i` of one cluster.
    pub fn projector(&self, members: &[usize]) -> DMatrix<f64> {
        let n = self.v.nrows();
        let mut p = DMatrix::zeros(n, n);
        for &i in members {
            p += self.v.column(i) * self.c.row(i);
        }
        p
    }

    /// Largest `|A v_i − l_i v_i|` over all eigenpairs.
    pub fn residual(&self, a: &DMatrix<f64>) -> f64 {
        let lv = &self.v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        (a * &self.v - lv).amax()
    }
}

fn same_eigenvalue(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0)
}

/// Eigendecomposition of the generator, or `None` when an eigenvalue is
/// complex, an eigenspace is deficient, or `V` is ill-conditioned.
pub fn eigen_solution(g: &Generator) -> Option<EigenSolution> {
    let a = g.matrix();
    let n = a.nrows();
    let scale = a.amax().max(1.0);
    let mut values: Vec<f64> = a.clone().schur().eigenvalues()?.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));

    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for l in values {
        match clusters.last_mut() {
            Some(c) if same_eigenvalue(c[0], l) => c.push(l),
            _ => clusters.push(vec![l]),
        }
    }

    let mut eigenvalues = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for cluster in clusters {
        let m = cluster.len();
        let l = cluster.iter().sum::<f64>() / m as f64;
        let shifted = a - DMatrix::identity(n, n) * l;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        if order[..m].iter().any(|&i| svd.singular_values[i] > 1e-7 * scale) {
            return None;
        }
        for &i in &order[..m] {
            eigenvalues.push(l);
            columns.push(v_t.row(i).transpose());
        }
    }
    let v = DMatrix::from_columns(&columns);
    let sv = v.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = smax / smin;
    if !condition.is_finite() || condition >= MAX_CONDITION {
        return None;
    }
    let c = v.clone().try_inverse()?;
    Some(EigenSolution { eigenvalues, v, c, condition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::int;

    #[test]
    fn defective_generator_is_unavailable() {
        // 0 -> 1 -> 2 at equal rates: eigenvalue -1 has a Jordan block.
        let g = Generator::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![int(-1), int(0), int(0)],
                vec![int(1), int(-1), int(0)],
                vec![int(0), int(1), int(0)],
            ],
        )
        .unwrap();
        assert!(eigen_solution(&g).is_none());
    }

    #[test]
    fn two_state_spectrum() {
        let g = Generator::new(
            vec!["u".into(), "v".into()],
            vec![vec![int(-1), int(2)], vec![int(1), int(-2)]],
        )
        .unwrap();
        let e = eigen_solution(&g).unwrap();
        assert!((e.eigenvalues[0]).abs() < 1e-12);
        assert!((e.eigenvalues[1] + 3.0).abs() < 1e-12);
        assert!(e.residual(g.matrix()) < 1e-12);
        let k = e.kernel_at(0.0);
        assert!((k - DMatrix::identity(2, 2)).amax() < 1e-12);
    }
}
