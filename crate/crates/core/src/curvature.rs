//! Finite-difference scalar (Ricci) curvature of chart metrics.
//!
//! Sign convention: Ricci is the contraction R_ij = R^a_iaj of the standard
//! curvature tensor built from Christoffel symbols of the induced metric.
//! With the mostly-minus Lorentzian signature used here, the de Sitter
//! slice comes out with negative scalar curvature -n(n-1)H^2. Textbooks
//! differ on this sign; this convention is pinned by that value.

// Tensor assembly walks matched index tuples; iterator rewrites obscure it.
#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::slice::SliceChart;
use crate::tol;

fn mat_norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Scalar curvature of the induced metric at chart coordinates x.
///
/// Second-order central stencils on the Gram matrix with one step of
/// Richardson extrapolation; the base step is 1e-3 * max(1, |x|_inf).
pub fn scalar_curvature(chart: &SliceChart, x: &[f64]) -> Result<f64> {
    if x.len() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: x.len(),
        });
    }
    let h = tol::CURVATURE_STEP_FACTOR * x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    // Interior margin of two coarse steps in every axis direction.
    for k in 0..x.len() {
        for sgn in [-1.0, 1.0] {
            let mut probe = x.to_vec();
            probe[k] += sgn * 2.0 * h;
            if !chart.contains(&probe) {
                return Err(Error::OutsideChart);
            }
        }
    }
    let coarse = ricci_scalar_step(chart, x, h)?;
    let fine = ricci_scalar_step(chart, x, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn ricci_scalar_step(chart: &SliceChart, x: &[f64], h: f64) -> Result<f64> {
    let n = chart.dim();
    let gram_at = |offsets: &[(usize, f64)]| -> Result<DMatrix<f64>> {
        let mut probe = x.to_vec();
        for &(axis, delta) in offsets {
            probe[axis] += delta;
        }
        chart.gram(&probe)
    };

    let g0 = gram_at(&[])?;
    let mut g_plus = Vec::with_capacity(n);
    let mut g_minus = Vec::with_capacity(n);
    for k in 0..n {
        g_plus.push(gram_at(&[(k, h)])?);
        g_minus.push(gram_at(&[(k, -h)])?);
    }

    // First derivatives d_k G and second derivatives d_k d_l G.
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| (&g_plus[k] - &g_minus[k]) / (2.0 * h))
        .collect();
    let mut d2g: Vec<Vec<DMatrix<f64>>> = vec![vec![DMatrix::zeros(n, n); n]; n];
    for k in 0..n {
        d2g[k][k] = (&g_plus[k] + &g_minus[k] - 2.0 * &g0) / (h * h);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let pp = gram_at(&[(k, h), (l, h)])?;
            let pm = gram_at(&[(k, h), (l, -h)])?;
            let mp = gram_at(&[(k, -h), (l, h)])?;
            let mm = gram_at(&[(k, -h), (l, -h)])?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            d2g[k][l] = mixed.clone();
            d2g[l][k] = mixed;
        }
    }

    let ginv = g0.clone().try_inverse().ok_or(Error::DegenerateMetric)?;
    if mat_norm_inf(&g0) * mat_norm_inf(&ginv) > tol::CONDITION_BOUND {
        return Err(Error::DegenerateMetric);
    }
    let dginv: Vec<DMatrix<f64>> = (0..n).map(|l| -&ginv * &dg[l] * &ginv).collect();

    // Christoffel symbols of the first kind and their derivatives.
    let chris1 = |a: usize, i: usize, j: usize| {
        0.5 * (dg[i][(j, a)] + dg[j][(i, a)] - dg[a][(i, j)])
    };
    let dchris1 = |l: usize, a: usize, i: usize, j: usize| {
        0.5 * (d2g[l][i][(j, a)] + d2g[l][j][(i, a)] - d2g[l][a][(i, j)])
    };

    // Second kind Gamma^c_ij and the derivative d_l Gamma^c_ij.
    let mut chris2 = vec![vec![vec![0.0; n]; n]; n];
    for c in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for a in 0..n {
                    acc += ginv[(c, a)] * chris1(a, i, j);
                }
                chris2[c][i][j] = acc;
                chris2[c][j][i] = acc;
            }
        }
    }
    let mut dchris2 = vec![vec![vec![vec![0.0; n]; n]; n]; n];
    for l in 0..n {
        for c in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = 0.0;
                    for a in 0..n {
                        acc += dginv[l][(c, a)] * chris1(a, i, j)
                            + ginv[(c, a)] * dchris1(l, a, i, j);
                    }
                    dchris2[l][c][i][j] = acc;
                    dchris2[l][c][j][i] = acc;
                }
            }
        }
    }

    // Ricci: R_ij = d_a Gamma^a_ij - d_j Gamma^a_ia
    //             + Gamma^a_ab Gamma^b_ij - Gamma^a_jb Gamma^b_ia.
    let mut scalar = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut ricci = 0.0;
            for a in 0..n {
                ricci += dchris2[a][a][i][j] - dchris2[j][a][i][a];
                for b in 0..n {
                    ricci += chris2[a][a][b] * chris2[b][i][j]
                        - chris2[a][j][b] * chris2[b][i][a];
                }
            }
            scalar += ginv[(i, j)] * ricci;
        }
    }
    if !scalar.is_finite() {
        return Err(Error::NonFinite("scalar curvature"));
    }
    Ok(scalar)
}

/// Curvature samples on a symmetric lattice [-radius, radius]^n with
/// `per_axis` points per axis, in lexicographic order.
pub fn curvature_grid(
    chart: &SliceChart,
    radius: f64,
    per_axis: usize,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let n = chart.dim();
    if per_axis == 0 || radius.is_nan() || radius < 0.0 {
        return Err(Error::InvalidSpec(
            "curvature grid needs per_axis >= 1 and radius >= 0".into(),
        ));
    }
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.0]
    } else {
        (0..per_axis)
            .map(|i| -radius + 2.0 * radius * (i as f64) / ((per_axis - 1) as f64))
            .collect()
    };
    let total = per_axis.pow(n as u32);
    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut x = vec![0.0; n];
        for slot in (0..n).rev() {
            x[slot] = axis[rem % per_axis];
            rem /= per_axis;
        }
        let value = scalar_curvature(chart, &x)?;
        samples.push((x, value));
    }
    Ok(samples)
}
