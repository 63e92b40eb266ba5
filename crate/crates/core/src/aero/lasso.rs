//! Lasso regression by cyclic coordinate descent with soft thresholding.
//!
//! Solves `min_w 1/2 ||X w - y||^2 + lambda ||w||_1` over standardized features
//! with an unpenalized intercept. Stops on the duality gap or when a full sweep
//! no longer moves any coordinate.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct LassoOptions {
    pub lambda: f64,
    /// Relative duality-gap / coordinate-step tolerance.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            tol: 1e-8,
            max_sweeps: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LassoFit {
    /// Weights on the raw (unstandardized) features.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub rmse: f64,
    pub sweeps: usize,
    pub duality_gap: f64,
    /// Objective value after each sweep, in standardized coordinates.
    pub objective_trace: Vec<f64>,
    pub warnings: Vec<String>,
}

struct Standardized {
    x: DMatrix<f64>,
    y: Vec<f64>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    y_mean: f64,
    /// Columns with (near-)zero variance, frozen at weight zero.
    dead: Vec<bool>,
}

fn standardize(x_raw: &DMatrix<f64>, y_raw: &[f64]) -> Standardized {
    let n = x_raw.nrows();
    let p = x_raw.ncols();
    let nf = n as f64;
    let mut mean = vec![0.0; p];
    let mut scale = vec![1.0; p];
    let mut dead = vec![false; p];
    let mut x = x_raw.clone();
    for j in 0..p {
        let mu = x_raw.column(j).sum() / nf;
        let var = x_raw.column(j).iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / nf;
        let sigma = var.sqrt();
        mean[j] = mu;
        if sigma < 1e-12 {
            dead[j] = true;
            for i in 0..n {
                x[(i, j)] = 0.0;
            }
        } else {
            scale[j] = sigma;
            for i in 0..n {
                x[(i, j)] = (x_raw[(i, j)] - mu) / sigma;
            }
        }
    }
    let y_mean = y_raw.iter().sum::<f64>() / nf;
    let y = y_raw.iter().map(|v| v - y_mean).collect();
    Standardized {
        x,
        y,
        mean,
        scale,
        y_mean,
        dead,
    }
}

fn soft_threshold(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Largest `|X^T y|` over standardized features and centered targets: any
/// lambda at or above this value yields the all-zero weight vector.
pub fn kill_lambda(x_raw: &DMatrix<f64>, y_raw: &[f64]) -> f64 {
    let s = standardize(x_raw, y_raw);
    let mut max_corr: f64 = 0.0;
    for j in 0..s.x.ncols() {
        if s.dead[j] {
            continue;
        }
        let corr: f64 = (0..s.x.nrows()).map(|i| s.x[(i, j)] * s.y[i]).sum();
        max_corr = max_corr.max(corr.abs());
    }
    max_corr
}

fn duality_gap(
    x: &DMatrix<f64>,
    residual: &[f64],
    weights: &[f64],
    y: &[f64],
    lambda: f64,
) -> f64 {
    let primal = 0.5 * residual.iter().map(|r| r * r).sum::<f64>()
        + lambda * weights.iter().map(|w| w.abs()).sum::<f64>();
    if lambda == 0.0 {
        // Pure least squares: gap degenerates to the gradient norm; report the
        // primal-vs-best bound via |X^T r|_inf scaled residual instead.
        let mut g: f64 = 0.0;
        for j in 0..x.ncols() {
            let corr: f64 = (0..x.nrows()).map(|i| x[(i, j)] * residual[i]).sum();
            g = g.max(corr.abs());
        }
        return g;
    }
    let mut max_corr: f64 = 0.0;
    for j in 0..x.ncols() {
        let corr: f64 = (0..x.nrows()).map(|i| x[(i, j)] * residual[i]).sum();
        max_corr = max_corr.max(corr.abs());
    }
    let s = if max_corr > lambda { lambda / max_corr } else { 1.0 };
    let dual: f64 = (0..y.len())
        .map(|i| s * residual[i] * y[i] - 0.5 * s * s * residual[i] * residual[i])
        .sum();
    primal - dual
}

/// Fit one target column. `x_raw` is the feature matrix over raw basis values.
pub fn lasso_fit(x_raw: &DMatrix<f64>, y_raw: &[f64], options: &LassoOptions) -> LassoFit {
    assert_eq!(x_raw.nrows(), y_raw.len());
    let n = x_raw.nrows();
    let p = x_raw.ncols();
    let s = standardize(x_raw, y_raw);
    let lambda = options.lambda;
    let mut warnings = Vec::new();

    let col_sq = n as f64; // standardized columns have squared norm n
    let mut w = vec![0.0; p];
    let mut residual = s.y.clone();
    let mut objective_trace = Vec::new();
    let mut gap = f64::INFINITY;
    let gap_scale = (0.5 * s.y.iter().map(|v| v * v).sum::<f64>()).max(1.0);
    let mut sweeps = 0;

    for sweep in 0..options.max_sweeps {
        sweeps = sweep + 1;
        let mut max_step: f64 = 0.0;
        for j in 0..p {
            if s.dead[j] {
                continue;
            }
            let w_old = w[j];
            let mut rho = 0.0;
            for i in 0..n {
                rho += s.x[(i, j)] * residual[i];
            }
            rho += col_sq * w_old;
            let w_new = soft_threshold(rho, lambda) / col_sq;
            if w_new != w_old {
                let delta = w_old - w_new;
                for i in 0..n {
                    residual[i] += s.x[(i, j)] * delta;
                }
                w[j] = w_new;
            }
            max_step = max_step.max((w_new - w_old).abs());
        }
        let objective = 0.5 * residual.iter().map(|r| r * r).sum::<f64>()
            + lambda * w.iter().map(|v| v.abs()).sum::<f64>();
        objective_trace.push(objective);

        gap = duality_gap(&s.x, &residual, &w, &s.y, lambda);
        if gap <= options.tol * gap_scale || max_step <= options.tol {
            break;
        }
    }
    if gap > options.tol * gap_scale * 10.0 {
        warnings.push(format!(
            "coordinate descent stopped after {sweeps} sweeps with duality gap {gap:.3e}"
        ));
    }

    // Rank-deficient pure least squares has no unique optimum; fall back to the
    // minimum-norm solution in standardized coordinates.
    if lambda == 0.0 {
        let svd = s.x.clone().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|v| **v > 1e-10 * sigma_max)
            .count();
        let live = s.dead.iter().filter(|d| !**d).count();
        if rank < live.min(n) {
            warnings.push(format!(
                "rank-deficient design (rank {rank} of {live} live columns); \
                 returning the minimum-norm least-squares solution"
            ));
            let y_vec = nalgebra::DVector::from_column_slice(&s.y);
            if let Ok(sol) = svd.solve(&y_vec, 1e-10 * sigma_max) {
                for j in 0..p {
                    w[j] = if s.dead[j] { 0.0 } else { sol[j] };
                }
                let pred = &s.x * nalgebra::DVector::from_column_slice(&w);
                for i in 0..n {
                    residual[i] = s.y[i] - pred[i];
                }
            }
        }
    }

    // Back to raw feature coordinates.
    let mut weights = vec![0.0; p];
    let mut intercept = s.y_mean;
    for j in 0..p {
        if !s.dead[j] {
            weights[j] = w[j] / s.scale[j];
            intercept -= weights[j] * s.mean[j];
        }
    }
    let rmse = (residual.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();

    LassoFit {
        weights,
        intercept,
        rmse,
        sweeps,
        duality_gap: gap,
        objective_trace,
        warnings,
    }
}
