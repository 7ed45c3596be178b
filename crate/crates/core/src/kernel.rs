//! Riemannian kernel: metric jets, Christoffel symbols, curvature tensor,
//! covariant derivatives, brackets and frames on chart-defined manifolds.
//!
//! The primary differentiation path evaluates the metric map on two nested
//! dual levels, yielding g, dg and ddg in one pass; the finite-difference
//! path below reuses the same tensor assembly and exists purely as a
//! cross-check.

use crate::error::{GeomError, Result};
use crate::geometry::{Field, Frame, Manifold, Point, ScalarField, Tangent};
use crate::jet::{seed_second, Dual, Scalar};
use crate::linalg;
use crate::smooth::{value_and_jacobian, MapHandle, Real};

pub const SINGULAR_METRIC_TOL: f64 = 1e-10;
pub const DEGENERATE_TOL: f64 = 1e-12;
pub const UNIT_FIELD_TOL: f64 = 1e-10;

/// Metric components with first and second coordinate derivatives.
/// Index layout: `g[i*n+j]`, `dg[(k*n+i)*n+j] = d_k g_ij`,
/// `ddg[((l*n+k)*n+i)*n+j] = d_l d_k g_ij`.
pub struct MetricJets<T> {
    pub n: usize,
    pub g: Vec<T>,
    pub dg: Vec<T>,
    pub ddg: Vec<T>,
}

pub fn metric_jets<T>(metric: &MapHandle, u: &[T]) -> MetricJets<T>
where
    T: Real,
    Dual<T>: Real,
    Dual<Dual<T>>: Real,
{
    let n = u.len();
    let out = metric.at(&seed_second(u));
    let mut g = Vec::with_capacity(n * n);
    let mut dg = vec![T::zero(); n * n * n];
    let mut ddg = vec![T::zero(); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            let e = &out[i * n + j];
            g.push(e.val.val.clone());
            for k in 0..n {
                dg[(k * n + i) * n + j] = e.val.grad(k);
                for l in 0..n {
                    ddg[((l * n + k) * n + i) * n + j] = e.grad(l).grad(k);
                }
            }
        }
    }
    MetricJets { n, g, dg, ddg }
}

/// Same data filled by central finite differences of the plain metric.
pub fn metric_jets_fd(metric: &MapHandle, u: &[f64], step: f64) -> MetricJets<f64> {
    let n = u.len();
    let at = |v: &[f64]| metric.at::<f64>(v);
    let shift = |k: usize, s: f64| {
        let mut v = u.to_vec();
        v[k] += s;
        v
    };
    let g = at(u);
    let mut dg = vec![0.0; n * n * n];
    let mut ddg = vec![0.0; n * n * n * n];
    for k in 0..n {
        let plus = at(&shift(k, step));
        let minus = at(&shift(k, -step));
        for ij in 0..n * n {
            dg[k * n * n + ij] = (plus[ij] - minus[ij]) / (2.0 * step);
            ddg[(k * n + k) * n * n + ij] = (plus[ij] - 2.0 * g[ij] + minus[ij]) / (step * step);
        }
    }
    for l in 0..n {
        for k in 0..l {
            let mut pp = u.to_vec();
            pp[l] += step;
            pp[k] += step;
            let mut pm = u.to_vec();
            pm[l] += step;
            pm[k] -= step;
            let mut mp = u.to_vec();
            mp[l] -= step;
            mp[k] += step;
            let mut mm = u.to_vec();
            mm[l] -= step;
            mm[k] -= step;
            let (gpp, gpm, gmp, gmm) = (at(&pp), at(&pm), at(&mp), at(&mm));
            for ij in 0..n * n {
                let v = (gpp[ij] - gpm[ij] - gmp[ij] + gmm[ij]) / (4.0 * step * step);
                ddg[(l * n + k) * n * n + ij] = v;
                ddg[(k * n + l) * n * n + ij] = v;
            }
        }
    }
    MetricJets { n, g, dg, ddg }
}

/// Christoffel symbols (and their first derivatives) assembled from metric
/// jets. `gamma[(i*n+a)*n+b]` is the symbol with upper index `i`,
/// `dgamma[((m*n+i)*n+a)*n+b]` its derivative along coordinate `m`.
pub struct Connection<T> {
    pub n: usize,
    pub g: Vec<T>,
    pub ginv: Vec<T>,
    pub gamma: Vec<T>,
    pub dgamma: Vec<T>,
}

impl<T: Scalar> Connection<T> {
    pub fn gamma_at(&self, i: usize, a: usize, b: usize) -> T {
        self.gamma[(i * self.n + a) * self.n + b].clone()
    }
}

pub fn connection_from_jets<T: Scalar>(jets: &MetricJets<T>) -> Option<Connection<T>> {
    let n = jets.n;
    let ginv = linalg::invert(&jets.g, n, SINGULAR_METRIC_TOL)?;
    let half = T::from_f64(0.5);
    let low = |c: usize, a: usize, b: usize| -> T {
        half.clone()
            * (jets.dg[(a * n + c) * n + b].clone() + jets.dg[(b * n + c) * n + a].clone()
                - jets.dg[(c * n + a) * n + b].clone())
    };
    let mut gamma = vec![T::zero(); n * n * n];
    for i in 0..n {
        for a in 0..n {
            for b in 0..=a {
                let mut s = T::zero();
                for c in 0..n {
                    s = s + ginv[i * n + c].clone() * low(c, a, b);
                }
                gamma[(i * n + a) * n + b] = s.clone();
                gamma[(i * n + b) * n + a] = s;
            }
        }
    }

    // d_m gamma = d_m(ginv) low + ginv d_m(low); d_m ginv = -ginv dg_m ginv.
    let dlow = |m: usize, c: usize, a: usize, b: usize| -> T {
        half.clone()
            * (jets.ddg[((m * n + a) * n + c) * n + b].clone()
                + jets.ddg[((m * n + b) * n + c) * n + a].clone()
                - jets.ddg[((m * n + c) * n + a) * n + b].clone())
    };
    let mut dgamma = vec![T::zero(); n * n * n * n];
    for m in 0..n {
        let dg_m = &jets.dg[m * n * n..(m + 1) * n * n];
        let tmp = linalg::mat_mul(&ginv, dg_m, n);
        let dginv_m: Vec<T> = linalg::mat_mul(&tmp, &ginv, n)
            .into_iter()
            .map(|x| -x)
            .collect();
        for i in 0..n {
            for a in 0..n {
                for b in 0..=a {
                    let mut s = T::zero();
                    for c in 0..n {
                        s = s
                            + dginv_m[i * n + c].clone() * low(c, a, b)
                            + ginv[i * n + c].clone() * dlow(m, c, a, b);
                    }
                    dgamma[((m * n + i) * n + a) * n + b] = s.clone();
                    dgamma[((m * n + i) * n + b) * n + a] = s;
                }
            }
        }
    }

    Some(Connection {
        n,
        g: jets.g.clone(),
        ginv,
        gamma,
        dgamma,
    })
}

/// Curvature components `R^i_{jkl}` with the sign fixed by
/// `R(X,Y)Z = grad_X grad_Y Z - grad_Y grad_X Z - grad_{[X,Y]} Z`.
pub fn riemann_from_connection<T: Scalar>(conn: &Connection<T>) -> Vec<T> {
    let n = conn.n;
    let ga = |i: usize, a: usize, b: usize| conn.gamma[(i * n + a) * n + b].clone();
    let dga =
        |m: usize, i: usize, a: usize, b: usize| conn.dgamma[((m * n + i) * n + a) * n + b].clone();
    let mut r = vec![T::zero(); n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = dga(k, i, l, j) - dga(l, i, k, j);
                    for m in 0..n {
                        s = s + ga(i, k, m) * ga(m, l, j) - ga(i, l, m) * ga(m, k, j);
                    }
                    r[((i * n + j) * n + k) * n + l] = s;
                }
            }
        }
    }
    r
}

/// Christoffel symbols only (first-order jets); enough for covariant
/// derivatives and for metric maps derived from the connection.
pub fn christoffel_values<T>(metric: &MapHandle, u: &[T]) -> Option<(Vec<T>, Vec<T>)>
where
    T: Real,
    Dual<T>: Real,
{
    let n = u.len();
    let (g, jac) = value_and_jacobian(metric, u);
    let ginv = linalg::invert(&g, n, SINGULAR_METRIC_TOL)?;
    // jac[(i*n+j)*n + k] = d_k g_ij
    let dg = |k: usize, i: usize, j: usize| jac[(i * n + j) * n + k].clone();
    let half = T::from_f64(0.5);
    let mut gamma = vec![T::zero(); n * n * n];
    for i in 0..n {
        for a in 0..n {
            for b in 0..=a {
                let mut s = T::zero();
                for c in 0..n {
                    let low = half.clone() * (dg(a, c, b) + dg(b, c, a) - dg(c, a, b));
                    s = s + ginv[i * n + c].clone() * low;
                }
                gamma[(i * n + a) * n + b] = s.clone();
                gamma[(i * n + b) * n + a] = s;
            }
        }
    }
    Some((g, gamma))
}

// ---------------------------------------------------------------------------
// Point-level public operations
// ---------------------------------------------------------------------------

pub fn metric_at(m: &Manifold, p: &Point) -> Result<Vec<f64>> {
    m.check_point(p)?;
    Ok(m.chart(p.chart).metric.at(&p.coords))
}

pub fn inverse_metric_at(m: &Manifold, p: &Point) -> Result<Vec<f64>> {
    let g = metric_at(m, p)?;
    linalg::invert(&g, p.coords.len(), SINGULAR_METRIC_TOL).ok_or(GeomError::SingularMetric)
}

pub fn inner(m: &Manifold, p: &Point, x: &[f64], y: &[f64]) -> Result<f64> {
    let g = metric_at(m, p)?;
    Ok(linalg::bilinear(&g, x, y, p.coords.len()))
}

pub fn norm(m: &Manifold, p: &Point, x: &[f64]) -> Result<f64> {
    Ok(inner(m, p, x, x)?.sqrt())
}

#[derive(Clone, Debug)]
pub struct ChristoffelSample {
    pub at: Point,
    pub n: usize,
    pub gamma: Vec<f64>,
}

impl ChristoffelSample {
    pub fn get(&self, i: usize, a: usize, b: usize) -> f64 {
        self.gamma[(i * self.n + a) * self.n + b]
    }
}

pub fn christoffel_at(m: &Manifold, p: &Point) -> Result<ChristoffelSample> {
    m.check_point(p)?;
    let (_, gamma) =
        christoffel_values(&m.chart(p.chart).metric, &p.coords).ok_or(GeomError::SingularMetric)?;
    Ok(ChristoffelSample {
        at: p.clone(),
        n: p.coords.len(),
        gamma,
    })
}

pub fn christoffel_at_fd(m: &Manifold, p: &Point, step: f64) -> Result<ChristoffelSample> {
    m.check_point(p)?;
    let jets = metric_jets_fd(&m.chart(p.chart).metric, &p.coords, step);
    let conn = connection_from_jets(&jets).ok_or(GeomError::SingularMetric)?;
    Ok(ChristoffelSample {
        at: p.clone(),
        n: p.coords.len(),
        gamma: conn.gamma,
    })
}

pub fn connection_at(m: &Manifold, p: &Point) -> Result<Connection<f64>> {
    m.check_point(p)?;
    let jets = metric_jets(&m.chart(p.chart).metric, &p.coords);
    connection_from_jets(&jets).ok_or(GeomError::SingularMetric)
}

/// Full curvature data at a point, reusable across many directions.
pub struct CurvatureSample {
    pub n: usize,
    pub g: Vec<f64>,
    pub r: Vec<f64>,
}

impl CurvatureSample {
    /// R(X, Y)Z in coordinate components.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        s += self.r[((i * n + j) * n + k) * n + l] * z[j] * x[k] * y[l];
                    }
                }
            }
            out[i] = s;
        }
        out
    }
}

pub fn curvature_at(m: &Manifold, p: &Point) -> Result<CurvatureSample> {
    let conn = connection_at(m, p)?;
    let r = riemann_from_connection(&conn);
    Ok(CurvatureSample {
        n: conn.n,
        g: conn.g,
        r,
    })
}

pub fn curvature_at_fd(m: &Manifold, p: &Point, step: f64) -> Result<CurvatureSample> {
    m.check_point(p)?;
    let jets = metric_jets_fd(&m.chart(p.chart).metric, &p.coords, step);
    let conn = connection_from_jets(&jets).ok_or(GeomError::SingularMetric)?;
    let r = riemann_from_connection(&conn);
    Ok(CurvatureSample {
        n: conn.n,
        g: conn.g,
        r,
    })
}

/// R(X, Y)Z at a point.
pub fn riemann_at(m: &Manifold, p: &Point, x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    Ok(curvature_at(m, p)?.apply(x, y, z))
}

/// Covariant derivative of a field along a tangent vector:
/// `(grad_X V)^i = X(V^i) + Gamma^i_jk X^j V^k`.
pub fn covariant_derivative(m: &Manifold, field: &Field, x: &Tangent) -> Result<Vec<f64>> {
    let p = &x.at;
    m.check_point(p)?;
    let n = p.coords.len();
    let (v, jac) = value_and_jacobian(field.map_for(p.chart), &p.coords);
    let chr = christoffel_at(m, p)?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += x.components[k] * jac[i * n + k];
        }
        for j in 0..n {
            for k in 0..n {
                s += chr.get(i, j, k) * x.components[j] * v[k];
            }
        }
        out[i] = s;
    }
    Ok(out)
}

/// Coordinate Lie bracket `[V, W]^i = V^k d_k W^i - W^k d_k V^i`.
pub fn lie_bracket(m: &Manifold, v: &Field, w: &Field, p: &Point) -> Result<Vec<f64>> {
    m.check_point(p)?;
    let n = p.coords.len();
    let (vv, vjac) = value_and_jacobian(v.map_for(p.chart), &p.coords);
    let (wv, wjac) = value_and_jacobian(w.map_for(p.chart), &p.coords);
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut s = 0.0;
        for k in 0..n {
            s += vv[k] * wjac[i * n + k] - wv[k] * vjac[i * n + k];
        }
        out[i] = s;
    }
    Ok(out)
}

/// Directional derivative of a scalar function along a tangent vector.
pub fn scalar_derivative(f: &ScalarField, x: &Tangent) -> f64 {
    let (_, jac) = value_and_jacobian(&f.per_chart[x.at.chart], &x.at.coords);
    x.components
        .iter()
        .enumerate()
        .map(|(k, xk)| xk * jac[k])
        .sum()
}

fn gram_schmidt(
    g: &[f64],
    n: usize,
    candidates: &[Vec<f64>],
    fixed: Vec<Vec<f64>>,
) -> Option<Vec<Vec<f64>>> {
    let mut frame = fixed;
    for cand in candidates {
        if frame.len() == n {
            break;
        }
        let mut v = cand.clone();
        // two projection passes keep orthogonality at round-off level
        for _ in 0..2 {
            for e in &frame {
                let c = linalg::bilinear(g, &v, e, n);
                v = linalg::axpy(-c, e, &v);
            }
        }
        let nv = linalg::bilinear(g, &v, &v, n).sqrt();
        if nv < DEGENERATE_TOL {
            continue;
        }
        frame.push(linalg::scale(1.0 / nv, &v));
    }
    (frame.len() == n).then_some(frame)
}

/// Orthonormal frame from the coordinate basis (no distinguished direction).
pub fn orthonormal_frame(m: &Manifold, p: &Point) -> Result<Frame> {
    let g = metric_at(m, p)?;
    let n = p.coords.len();
    let basis: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let vectors = gram_schmidt(&g, n, &basis, Vec::new()).ok_or(GeomError::DegenerateSeed)?;
    Ok(Frame {
        at: p.clone(),
        vectors,
    })
}

/// Orthonormal basis of the g-orthogonal complement of a vector,
/// Gram-Schmidt from the coordinate basis.
pub fn complement_frame(m: &Manifold, p: &Point, against: &[f64]) -> Result<Vec<Vec<f64>>> {
    let g = metric_at(m, p)?;
    let n = p.coords.len();
    let head = normalize(m, p, against)?;
    let basis: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut vectors = gram_schmidt(&g, n, &basis, vec![head]).ok_or(GeomError::DegenerateSeed)?;
    vectors.remove(0);
    Ok(vectors)
}

/// Adapted frame: `e_1 = xi(p)`, the rest Gram-Schmidt from the seeds (the
/// coordinate basis when none are given).
pub fn adapted_frame(m: &Manifold, xi: &Field, p: &Point, seeds: &[Tangent]) -> Result<Frame> {
    let g = metric_at(m, p)?;
    let n = p.coords.len();
    let xi_p = xi.at(p);
    let xi_norm = linalg::bilinear(&g, &xi_p.components, &xi_p.components, n).sqrt();
    if (xi_norm - 1.0).abs() > UNIT_FIELD_TOL {
        return Err(GeomError::NonUnitField { norm: xi_norm });
    }
    let candidates: Vec<Vec<f64>> = if seeds.is_empty() {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    } else {
        seeds.iter().map(|t| t.components.clone()).collect()
    };
    let vectors =
        gram_schmidt(&g, n, &candidates, vec![xi_p.components]).ok_or(GeomError::DegenerateSeed)?;
    Ok(Frame {
        at: p.clone(),
        vectors,
    })
}

/// Sectional curvature of the plane spanned by `x` and `y`.
pub fn sectional_curvature(m: &Manifold, p: &Point, x: &[f64], y: &[f64]) -> Result<f64> {
    let curv = curvature_at(m, p)?;
    sectional_from_sample(&curv, x, y)
}

pub fn sectional_from_sample(curv: &CurvatureSample, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = curv.n;
    let xx = linalg::bilinear(&curv.g, x, x, n);
    let yy = linalg::bilinear(&curv.g, y, y, n);
    let xy = linalg::bilinear(&curv.g, x, y, n);
    let denom = xx * yy - xy * xy;
    if denom < DEGENERATE_TOL {
        return Err(GeomError::DegeneratePlane);
    }
    let rxyy = curv.apply(x, y, y);
    Ok(linalg::bilinear(&curv.g, &rxyy, x, n) / denom)
}

/// Normalize a vector at a point; rejects near-zero input.
pub fn normalize(m: &Manifold, p: &Point, x: &[f64]) -> Result<Vec<f64>> {
    let nv = norm(m, p, x)?;
    if nv < DEGENERATE_TOL {
        return Err(GeomError::DegenerateSeed);
    }
    Ok(linalg::scale(1.0 / nv, x))
}
