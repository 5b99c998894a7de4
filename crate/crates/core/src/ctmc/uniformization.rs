use nalgebra::DMatrix;

/// Poisson tail mass below which the series is cut.
const TAIL: f64 = 1e-12;
/// Largest `Λt` summed directly; longer horizons are halved and squared.
const MAX_RATE_TIME: f64 = 64.0;

/// `exp(t·Q)` for a (sub-)generator `Q` in column convention.
///
/// With `Λ = max |Q_jj|` and `P = I + Q/Λ` (column-substochastic), the
/// result is `Σ_n Pois(n; Λt) P^n`. All terms are nonnegative, so the
/// kernel has no negative entries.
pub fn uniformized(q: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let n = q.nrows();
    let lambda = (0..n).map(|j| q[(j, j)].abs()).fold(0.0, f64::max);
    if t == 0.0 || lambda == 0.0 {
        return DMatrix::identity(n, n);
    }
    let a = lambda * t;
    let halvings = if a > MAX_RATE_TIME { (a / MAX_RATE_TIME).log2().ceil() as u32 } else { 0 };
    let a = a / f64::from(2u32.pow(halvings));
    let p = DMatrix::identity(n, n) + q / lambda;

    let mut result = DMatrix::zeros(n, n);
    let mut power = DMatrix::identity(n, n);
    let mut log_w = -a;
    let mut cumulative = 0.0;
    let cap = (a + 12.0 * a.sqrt() + 50.0).ceil() as usize;
    for k in 0..=cap {
        if k > 0 {
            power = &p * &power;
            log_w += a.ln() - (k as f64).ln();
        }
        let w = log_w.exp();
        result += &power * w;
        cumulative += w;
        if 1.0 - cumulative < TAIL && k as f64 > a {
            break;
        }
    }
    for _ in 0..halvings {
        result = &result * &result;
    }
    result
}
