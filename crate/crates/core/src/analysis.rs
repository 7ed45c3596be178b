//! Operator calculus of a unit vector field: the shape operator and its
//! covariant derivative, rough Hessian, harmonicity tensor, the residuals of
//! the harmonicity / minimality / totally-geodesic conditions, classifiers,
//! and total bending.
//!
//! Sign conventions: `A X = -grad_X xi`, `grad_xi xi = -k nu`, and the
//! curvature sign fixed in [`crate::kernel`].

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::{Field, Frame, Manifold, ManifoldKind, Point};
use crate::jet::{seed_second, Dual};
use crate::kernel::{self, christoffel_values, CurvatureSample, UNIT_FIELD_TOL};
use crate::linalg;
use crate::smooth::{value_and_jacobian, DerivedMap, MapHandle, Real};

/// Geodesic-curvature threshold below which a field counts as geodesic at a
/// point and the principal normal is left undefined.
pub const GEODESIC_K_TOL: f64 = 1e-8;

/// A vector residual together with its metric norm.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualValue {
    pub vector: Vec<f64>,
    pub norm: f64,
}

/// All point data the calculus needs, computed once per (field, point).
pub struct PointAnalysis {
    pub n: usize,
    pub point: Point,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    gamma: Vec<f64>,
    dgamma: Vec<f64>,
    pub curvature: CurvatureSample,
    pub xi: Vec<f64>,
    dxi: Vec<f64>,
    ddxi: Vec<f64>,
    /// Coordinate matrix of the shape operator, `a[i*n+k] = A^i_k`.
    pub a: Vec<f64>,
    /// Metric adjoint in coordinates.
    pub a_t: Vec<f64>,
}

impl PointAnalysis {
    pub fn new(m: &Manifold, xi: &Field, p: &Point) -> Result<Self> {
        m.check_point(p)?;
        let n = p.coords.len();
        let jets = kernel::metric_jets(&m.chart(p.chart).metric, &p.coords);
        let conn = kernel::connection_from_jets(&jets).ok_or(GeomError::SingularMetric)?;
        let r = kernel::riemann_from_connection(&conn);

        let out = xi.map_for(p.chart).at(&seed_second(&p.coords));
        let mut xi_v = vec![0.0; n];
        let mut dxi = vec![0.0; n * n];
        let mut ddxi = vec![0.0; n * n * n];
        for i in 0..n {
            xi_v[i] = out[i].val.val;
            for k in 0..n {
                dxi[i * n + k] = out[i].val.grad(k);
                for l in 0..n {
                    ddxi[(i * n + k) * n + l] = out[i].grad(l).grad(k);
                }
            }
        }

        let norm = linalg::bilinear(&conn.g, &xi_v, &xi_v, n).sqrt();
        if (norm - 1.0).abs() > UNIT_FIELD_TOL {
            return Err(GeomError::NonUnitField { norm });
        }

        let gamma = conn.gamma.clone();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let mut s = dxi[i * n + k];
                for j in 0..n {
                    s += gamma[(i * n + j) * n + k] * xi_v[j];
                }
                a[i * n + k] = -s;
            }
        }
        // adjoint: g A^t = A^T g
        let at_g = linalg::mat_mul(&linalg::transpose(&a, n), &conn.g, n);
        let a_t = linalg::mat_mul(&conn.ginv, &at_g, n);

        Ok(PointAnalysis {
            n,
            point: p.clone(),
            g: conn.g.clone(),
            ginv: conn.ginv.clone(),
            gamma: conn.gamma,
            dgamma: conn.dgamma,
            curvature: CurvatureSample { n, g: conn.g, r },
            xi: xi_v,
            dxi,
            ddxi,
            a,
            a_t,
        })
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        linalg::bilinear(&self.g, x, y, self.n)
    }

    pub fn norm_of(&self, x: &[f64]) -> f64 {
        self.inner(x, x).sqrt()
    }

    pub fn apply_shape(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.a, x, self.n)
    }

    pub fn apply_shape_adjoint(&self, x: &[f64]) -> Vec<f64> {
        linalg::mat_vec(&self.a_t, x, self.n)
    }

    fn gamma_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    fn dgamma_at(&self, m: usize, i: usize, j: usize, k: usize) -> f64 {
        self.dgamma[((m * self.n + i) * self.n + j) * self.n + k]
    }

    /// `(grad_X A) Y` with coordinate-constant extensions of both arguments.
    pub fn nabla_shape(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.n;
        // W = grad_Y xi as a field of u (Y held constant)
        let w_at = |i: usize| -> f64 {
            let mut s = 0.0;
            for k in 0..n {
                s += y[k] * self.dxi[i * n + k];
                for j in 0..n {
                    s += self.gamma_at(i, j, k) * self.xi[j] * y[k];
                }
            }
            s
        };
        let dw_at = |l: usize, i: usize| -> f64 {
            let mut s = 0.0;
            for k in 0..n {
                s += y[k] * self.ddxi[(i * n + k) * n + l];
                for j in 0..n {
                    s += self.dgamma_at(l, i, j, k) * self.xi[j] * y[k]
                        + self.gamma_at(i, j, k) * self.dxi[j * n + l] * y[k];
                }
            }
            s
        };
        let w: Vec<f64> = (0..n).map(w_at).collect();
        // grad_X W
        let mut grad_xw = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += x[l] * dw_at(l, i);
            }
            for j in 0..n {
                for l in 0..n {
                    s += self.gamma_at(i, j, l) * x[j] * w[l];
                }
            }
            grad_xw[i] = s;
        }
        // grad_{Gamma(X,Y)} xi
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                for k in 0..n {
                    s += self.gamma_at(i, j, k) * x[j] * y[k];
                }
            }
            z[i] = s;
        }
        let mut grad_z_xi = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += z[k] * self.dxi[i * n + k];
                for j in 0..n {
                    s += self.gamma_at(i, j, k) * self.xi[j] * z[k];
                }
            }
            grad_z_xi[i] = s;
        }
        (0..n).map(|i| grad_z_xi[i] - grad_xw[i]).collect()
    }

    /// `(grad_X A) Y` with `Y` a genuine field; used to assert that the
    /// constant-extension value is extension-independent.
    pub fn nabla_shape_field(&self, x: &[f64], y_map: &MapHandle) -> Vec<f64> {
        let n = self.n;
        let (y, dy) = value_and_jacobian(y_map, &self.point.coords);
        // W = grad_Y xi with the full field Y
        let w_at = |i: usize| -> f64 {
            let mut s = 0.0;
            for k in 0..n {
                s += y[k] * self.dxi[i * n + k];
                for j in 0..n {
                    s += self.gamma_at(i, j, k) * self.xi[j] * y[k];
                }
            }
            s
        };
        let dw_at = |l: usize, i: usize| -> f64 {
            let mut s = 0.0;
            for k in 0..n {
                s += dy[k * n + l] * self.dxi[i * n + k] + y[k] * self.ddxi[(i * n + k) * n + l];
                for j in 0..n {
                    s += self.dgamma_at(l, i, j, k) * self.xi[j] * y[k]
                        + self.gamma_at(i, j, k)
                            * (self.dxi[j * n + l] * y[k] + self.xi[j] * dy[k * n + l]);
                }
            }
            s
        };
        let w: Vec<f64> = (0..n).map(w_at).collect();
        let mut grad_xw = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += x[l] * dw_at(l, i);
            }
            for j in 0..n {
                for l in 0..n {
                    s += self.gamma_at(i, j, l) * x[j] * w[l];
                }
            }
            grad_xw[i] = s;
        }
        // grad_X Y, then grad along it of xi
        let mut z = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for l in 0..n {
                s += x[l] * dy[i * n + l];
            }
            for j in 0..n {
                for k in 0..n {
                    s += self.gamma_at(i, j, k) * x[j] * y[k];
                }
            }
            z[i] = s;
        }
        let mut grad_z_xi = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += z[k] * self.dxi[i * n + k];
                for j in 0..n {
                    s += self.gamma_at(i, j, k) * self.xi[j] * z[k];
                }
            }
            grad_z_xi[i] = s;
        }
        (0..n).map(|i| grad_z_xi[i] - grad_xw[i]).collect()
    }

    /// Symmetrized covariant derivative of the shape operator.
    pub fn rough_hessian(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let a = self.nabla_shape(x, y);
        let b = self.nabla_shape(y, x);
        (0..self.n).map(|i| 0.5 * (a[i] + b[i])).collect()
    }

    /// Symmetrization of `R(xi, A X) Y`.
    pub fn harmonicity_tensor(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let ax = self.apply_shape(x);
        let ay = self.apply_shape(y);
        let rx = self.curvature.apply(&self.xi, &ax, y);
        let ry = self.curvature.apply(&self.xi, &ay, x);
        (0..self.n).map(|i| 0.5 * (rx[i] + ry[i])).collect()
    }

    /// Squared full covariant derivative `|grad xi|^2 = tr(A^t A)`.
    pub fn full_energy_density(&self) -> f64 {
        let prod = linalg::mat_mul(&self.a_t, &self.a, self.n);
        (0..self.n).map(|i| prod[i * self.n + i]).sum()
    }

    /// Rough Laplacian assembled directly in coordinates:
    /// `Delta xi^i = g^{kl} (d_k grad_l xi^i + Gamma^i_km grad_l xi^m
    ///  - Gamma^m_kl grad_m xi^i)`.
    pub fn rough_laplacian_direct(&self) -> Vec<f64> {
        let n = self.n;
        let cov = |l: usize, i: usize| -> f64 {
            let mut s = self.dxi[i * n + l];
            for m in 0..n {
                s += self.gamma_at(i, l, m) * self.xi[m];
            }
            s
        };
        let dcov = |k: usize, l: usize, i: usize| -> f64 {
            let mut s = self.ddxi[(i * n + l) * n + k];
            for m in 0..n {
                s += self.dgamma_at(k, i, l, m) * self.xi[m]
                    + self.gamma_at(i, l, m) * self.dxi[m * n + k];
            }
            s
        };
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let mut v = dcov(k, l, i);
                    for m in 0..n {
                        v +=
                            self.gamma_at(i, k, m) * cov(l, m) - self.gamma_at(m, k, l) * cov(m, i);
                    }
                    s += self.ginv[k * n + l] * v;
                }
            }
            out[i] = s;
        }
        out
    }

    fn residual(&self, vector: Vec<f64>) -> ResidualValue {
        let norm = self.norm_of(&vector);
        ResidualValue { vector, norm }
    }

    /// Left side of the totally-geodesic condition:
    /// `Hess(X,Y) + A Hm(X,Y) - <AX, AY> xi`.
    pub fn tg_residual(&self, x: &[f64], y: &[f64]) -> ResidualValue {
        let hess = self.rough_hessian(x, y);
        let hm = self.harmonicity_tensor(x, y);
        let ahm = self.apply_shape(&hm);
        let ax = self.apply_shape(x);
        let ay = self.apply_shape(y);
        let c = self.inner(&ax, &ay);
        let v = (0..self.n)
            .map(|i| hess[i] + ahm[i] - c * self.xi[i])
            .collect();
        self.residual(v)
    }

    /// Sphere specialization of the totally-geodesic condition; only valid
    /// on the built-in round spheres.
    pub fn sphere_tg_residual(
        &self,
        kind: ManifoldKind,
        x: &[f64],
        y: &[f64],
    ) -> Result<ResidualValue> {
        if kind != ManifoldKind::UnitSphere {
            return Err(GeomError::NotASphere);
        }
        let n = self.n;
        let na = self.nabla_shape(x, y);
        let ax = self.apply_shape(x);
        let ay = self.apply_shape(y);
        let a2x = self.apply_shape(&ax);
        let a2y = self.apply_shape(&ay);
        let lie = -(self.inner(&ax, y) + self.inner(x, &ay));
        let a_xi = self.apply_shape(&self.xi);
        let xi_x = self.inner(&self.xi, x);
        let xi_y = self.inner(&self.xi, y);
        let c = self.inner(&ax, &ay);
        let v = (0..n)
            .map(|i| {
                na[i]
                    - 0.5 * (lie * a_xi[i] + xi_x * (a2y[i] + y[i]) + xi_y * (a2x[i] - x[i]))
                    - c * self.xi[i]
            })
            .collect();
        Ok(self.residual(v))
    }

    /// `Delta xi + |grad xi|^2 xi`, zero exactly when the field is harmonic.
    pub fn harmonic_residual(&self, frame: &Frame) -> ResidualValue {
        let n = self.n;
        let mut lap = vec![0.0; n];
        for e in &frame.vectors {
            let h = self.rough_hessian(e, e);
            for i in 0..n {
                lap[i] -= h[i];
            }
        }
        let dens = self.full_energy_density();
        let v = (0..n).map(|i| lap[i] + dens * self.xi[i]).collect();
        self.residual(v)
    }

    /// Trace of the harmonicity tensor over a frame; zero exactly when the
    /// harmonic field is a harmonic map.
    pub fn harmonic_map_residual(&self, frame: &Frame) -> ResidualValue {
        let n = self.n;
        let mut tr = vec![0.0; n];
        for e in &frame.vectors {
            let h = self.harmonicity_tensor(e, e);
            for i in 0..n {
                tr[i] += h[i];
            }
        }
        self.residual(tr)
    }

    /// Geodesic curvature of the integral trajectory through the point, with
    /// the unit principal normal when defined (`grad_xi xi = -k nu`).
    pub fn geodesic_curvature(&self) -> GeodesicCurvatureSample {
        let v: Vec<f64> = self.apply_shape(&self.xi).iter().map(|t| -t).collect(); // grad_xi xi
        let k = self.norm_of(&v);
        let nu = (k > GEODESIC_K_TOL).then(|| linalg::scale(-1.0 / k, &v));
        GeodesicCurvatureSample {
            at: self.point.clone(),
            k,
            nu,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicCurvatureSample {
    pub at: Point,
    pub k: f64,
    pub nu: Option<Vec<f64>>,
}

/// Shape operator matrix in a declared orthonormal frame, with its adjoint.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeOperatorSample {
    pub at: Point,
    pub matrix_a: Vec<f64>,
    pub matrix_a_t: Vec<f64>,
    pub n: usize,
}

pub fn shape_operator(
    m: &Manifold,
    xi: &Field,
    p: &Point,
    frame: &Frame,
) -> Result<ShapeOperatorSample> {
    let pa = PointAnalysis::new(m, xi, p)?;
    let n = pa.n;
    let mut matrix_a = vec![0.0; n * n];
    let mut matrix_a_t = vec![0.0; n * n];
    for beta in 0..n {
        let col = pa.apply_shape(&frame.vectors[beta]);
        let col_t = pa.apply_shape_adjoint(&frame.vectors[beta]);
        for alpha in 0..n {
            matrix_a[alpha * n + beta] = pa.inner(&col, &frame.vectors[alpha]);
            matrix_a_t[alpha * n + beta] = pa.inner(&col_t, &frame.vectors[alpha]);
        }
    }
    Ok(ShapeOperatorSample {
        at: p.clone(),
        matrix_a,
        matrix_a_t,
        n,
    })
}

// ---------------------------------------------------------------------------
// Derived fields of the trajectory geometry (principal normal, curvature)
// ---------------------------------------------------------------------------

struct TrajectoryData {
    metric: MapHandle,
    xi: MapHandle,
    output: TrajectoryOutput,
}

#[derive(Clone, Copy)]
enum TrajectoryOutput {
    Curvature,
    PrincipalNormal,
}

impl DerivedMap for TrajectoryData {
    fn eval<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real,
    {
        let n = u.len();
        let (g, gamma) = christoffel_values(&self.metric, u).expect("metric singular inside chart");
        let (xi, dxi) = value_and_jacobian(&self.xi, u);
        // V = grad_xi xi
        let mut v: Vec<T> = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = T::zero();
            for k in 0..n {
                s = s + xi[k].clone() * dxi[i * n + k].clone();
                for j in 0..n {
                    s = s + gamma[(i * n + j) * n + k].clone() * xi[j].clone() * xi[k].clone();
                }
            }
            v.push(s);
        }
        let mut k2 = T::zero();
        for i in 0..n {
            for j in 0..n {
                k2 = k2 + g[i * n + j].clone() * v[i].clone() * v[j].clone();
            }
        }
        let k = k2.sqrt();
        match self.output {
            TrajectoryOutput::Curvature => vec![k],
            TrajectoryOutput::PrincipalNormal => {
                let inv = -T::one() / k;
                v.into_iter().map(|c| c * inv.clone()).collect()
            }
        }
    }
}

fn curvature_scalar_map(m: &Manifold, xi: &Field, chart: usize) -> MapHandle {
    let n = m.chart(chart).dim;
    MapHandle::derived(
        n,
        1,
        TrajectoryData {
            metric: m.chart(chart).metric.clone(),
            xi: xi.map_for(chart).clone(),
            output: TrajectoryOutput::Curvature,
        },
    )
}

/// Principal-normal field of the trajectories as a derived map; only valid
/// where the geodesic curvature stays away from zero.
pub fn principal_normal_field(m: &Manifold, xi: &Field) -> Field {
    let per_chart = (0..m.charts.len())
        .map(|c| {
            let n = m.chart(c).dim;
            MapHandle::derived(
                n,
                n,
                TrajectoryData {
                    metric: m.chart(c).metric.clone(),
                    xi: xi.map_for(c).clone(),
                    output: TrajectoryOutput::PrincipalNormal,
                },
            )
        })
        .collect();
    Field {
        name: format!("principal-normal({})", xi.name),
        per_chart,
        declared_unit: true,
        sample_box: xi.sample_box.clone(),
    }
}

/// Minimality residual `k [xi,nu] + xi(k) nu - k A R(nu,xi)xi + k^2 xi`.
/// Returns zero when the point is geodesic (`k < GEODESIC_K_TOL`): every
/// term carries a factor of `k` there and the principal normal is undefined.
pub fn minimality_residual(m: &Manifold, xi: &Field, p: &Point) -> Result<ResidualValue> {
    let pa = PointAnalysis::new(m, xi, p)?;
    let gc = pa.geodesic_curvature();
    if gc.k < GEODESIC_K_TOL {
        return Ok(ResidualValue {
            vector: vec![0.0; pa.n],
            norm: 0.0,
        });
    }
    let nu_field = principal_normal_field(m, xi);
    let bracket = kernel::lie_bracket(m, xi, &nu_field, p)?;
    let k_map = curvature_scalar_map(m, xi, p.chart);
    let (_, dk) = value_and_jacobian(&k_map, &p.coords);
    let xi_k: f64 = (0..pa.n).map(|i| pa.xi[i] * dk[i]).sum();
    let nu = gc
        .nu
        .as_ref()
        .expect("non-geodesic point has a principal normal");
    let r_nu_xi_xi = pa.curvature.apply(nu, &pa.xi, &pa.xi);
    let a_r = pa.apply_shape(&r_nu_xi_xi);
    // The k^2 term carries the sign induced by the orientation
    // grad_xi xi = -k nu; the residual then vanishes exactly on minimal
    // fields (it equals the totally-geodesic residual at (xi, xi)).
    let v = (0..pa.n)
        .map(|i| gc.k * bracket[i] + xi_k * nu[i] - gc.k * a_r[i] - gc.k * gc.k * pa.xi[i])
        .collect();
    Ok(pa.residual(v))
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct FlagResult {
    pub holds: bool,
    pub max_defect: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationRecord {
    pub geodesic: FlagResult,
    pub holonomic: FlagResult,
    pub killing: FlagResult,
    pub covariantly_normal: FlagResult,
    pub strongly_normal: FlagResult,
    pub invariant: FlagResult,
    pub sample_points: Vec<Point>,
    pub notes: Vec<String>,
}

pub const CLASSIFY_TOL: f64 = 1e-6;

/// Classify a unit field over sample points. Operator flags are measured in
/// an adapted orthonormal frame; normality uses the metric adjoint, which is
/// frame-independent.
pub fn classify(
    m: &Manifold,
    xi: &Field,
    points: &[Point],
    tolerance: f64,
) -> Result<ClassificationRecord> {
    let mut defects = [0.0f64; 6];
    for p in points {
        let pa = PointAnalysis::new(m, xi, p)?;
        let n = pa.n;
        let frame = kernel::adapted_frame(m, xi, p, &[])?;
        let op = shape_operator(m, xi, p, &frame)?;
        let f = &op.matrix_a;
        let ft = linalg::transpose(f, n);

        // geodesic: |grad_xi xi|
        defects[0] = defects[0].max(pa.geodesic_curvature().k);
        // holonomic: A symmetric
        let sym: Vec<f64> = (0..n * n).map(|k| f[k] - ft[k]).collect();
        defects[1] = defects[1].max(linalg::max_abs(&sym));
        // killing: A skew
        let skew: Vec<f64> = (0..n * n).map(|k| f[k] + ft[k]).collect();
        defects[2] = defects[2].max(linalg::max_abs(&skew));
        // covariantly normal: [A, A^t] = 0
        let aat = linalg::mat_mul(f, &ft, n);
        let ata = linalg::mat_mul(&ft, f, n);
        let comm: Vec<f64> = (0..n * n).map(|k| aat[k] - ata[k]).collect();
        defects[3] = defects[3].max(linalg::max_abs(&comm));
        // strongly normal: (grad_X A)Y = <AX, AY> xi on the complement frame
        for alpha in 1..n {
            for beta in 1..n {
                let ea = &frame.vectors[alpha];
                let eb = &frame.vectors[beta];
                let na = pa.nabla_shape(ea, eb);
                let c = pa.inner(&pa.apply_shape(ea), &pa.apply_shape(eb));
                let r: Vec<f64> = (0..n).map(|i| na[i] - c * pa.xi[i]).collect();
                defects[4] = defects[4].max(pa.norm_of(&r));
            }
        }
        // invariant: (A, <.,xi>, xi) is an almost contact structure
        let f2 = linalg::mat_mul(f, f, n);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want =
                    if i == j { -1.0 } else { 0.0 } + if i == 0 && j == 0 { 1.0 } else { 0.0 };
                worst = worst.max((f2[i * n + j] - want).abs());
            }
        }
        for i in 0..n {
            worst = worst.max(f[i * n].abs()); // phi(xi) = 0
            worst = worst.max(f[i].abs()); // eta(phi X) = 0
        }
        defects[5] = defects[5].max(worst);
    }
    let flag = |d: f64| FlagResult {
        holds: d < tolerance,
        max_defect: d,
        tolerance,
    };
    Ok(ClassificationRecord {
        geodesic: flag(defects[0]),
        holonomic: flag(defects[1]),
        killing: flag(defects[2]),
        covariantly_normal: flag(defects[3]),
        strongly_normal: flag(defects[4]),
        invariant: flag(defects[5]),
        sample_points: points.to_vec(),
        notes: vec![
            "normality is tested with the metric adjoint (frame-independent), \
             which subsumes the frame-specific statement"
                .into(),
        ],
    })
}

// ---------------------------------------------------------------------------
// Total bending
// ---------------------------------------------------------------------------

/// Tensor-product composite Simpson quadrature of `|grad xi|^2` against the
/// Riemannian volume over a chart box. The normalizing constant is 1.
pub fn total_bending(
    m: &Manifold,
    xi: &Field,
    chart: usize,
    lo: &[f64],
    hi: &[f64],
    resolution: usize,
) -> Result<f64> {
    assert!(
        resolution >= 2 && resolution % 2 == 0,
        "Simpson needs an even interval count"
    );
    let n = m.chart(chart).dim;
    assert_eq!(lo.len(), n);
    let pts = resolution + 1;
    let weight_1d = |i: usize| -> f64 {
        if i == 0 || i == resolution {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let h: Vec<f64> = (0..n)
        .map(|d| (hi[d] - lo[d]) / resolution as f64)
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let coords: Vec<f64> = (0..n).map(|d| lo[d] + idx[d] as f64 * h[d]).collect();
        let p = Point::new(chart, coords);
        m.check_point(&p)?;
        let pa = PointAnalysis::new(m, xi, &p)?;
        let det = determinant(&pa.g, n);
        let mut w = 1.0;
        for d in 0..n {
            w *= weight_1d(idx[d]) * h[d] / 3.0;
        }
        total += w * pa.full_energy_density() * det.sqrt();

        let mut d = 0;
        loop {
            if d == n {
                return Ok(total);
            }
            idx[d] += 1;
            if idx[d] < pts {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Riemannian volume of a chart box by the same quadrature.
pub fn chart_box_volume(
    m: &Manifold,
    chart: usize,
    lo: &[f64],
    hi: &[f64],
    resolution: usize,
) -> Result<f64> {
    assert!(resolution >= 2 && resolution % 2 == 0);
    let n = m.chart(chart).dim;
    let pts = resolution + 1;
    let weight_1d = |i: usize| -> f64 {
        if i == 0 || i == resolution {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let h: Vec<f64> = (0..n)
        .map(|d| (hi[d] - lo[d]) / resolution as f64)
        .collect();
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let coords: Vec<f64> = (0..n).map(|d| lo[d] + idx[d] as f64 * h[d]).collect();
        let g = kernel::metric_at(m, &Point::new(chart, coords))?;
        let mut w = 1.0;
        for d in 0..n {
            w *= weight_1d(idx[d]) * h[d] / 3.0;
        }
        total += w * determinant(&g, n).sqrt();
        let mut d = 0;
        loop {
            if d == n {
                return Ok(total);
            }
            idx[d] += 1;
            if idx[d] < pts {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn determinant(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            if m[row * n + col].abs() > best {
                best = m[row * n + col].abs();
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{
        flat_space, flat_tg_field, hopf_field, make_sphere, make_warped_surface, parallel_field,
        radial_field, warped_unit_field,
    };
    use crate::geometry::Tangent;
    use crate::kernel;
    use crate::ode;
    use crate::smooth::{Real, SmoothMap};
    use approx::assert_relative_eq;

    #[test]
    fn parallel_field_has_trivial_calculus() {
        let m = flat_space(2);
        let f = parallel_field(2);
        let p = Point::on(&[0.3, -0.7]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        assert!(pa.a.iter().all(|v| v.abs() < 1e-15));
        let x = [0.4, 0.9];
        let y = [-0.3, 0.2];
        assert!(pa.nabla_shape(&x, &y).iter().all(|v| v.abs() < 1e-15));
        assert!(pa.rough_hessian(&x, &y).iter().all(|v| v.abs() < 1e-15));
        assert!(pa
            .harmonicity_tensor(&x, &y)
            .iter()
            .all(|v| v.abs() < 1e-15));
        assert_relative_eq!(pa.tg_residual(&x, &y).norm, 0.0, epsilon = 1e-15);
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        assert_relative_eq!(pa.harmonic_residual(&frame).norm, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pa.harmonic_map_residual(&frame).norm, 0.0, epsilon = 1e-15);
        assert_relative_eq!(pa.geodesic_curvature().k, 0.0, epsilon = 1e-15);
        let r = minimality_residual(&m, &f, &p).unwrap();
        assert_relative_eq!(r.norm, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shape_operator_image_is_orthogonal_to_field() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        for coords in [[0.3, -0.2, 0.5], [0.9, 0.1, -0.4], [-0.6, 0.8, 0.2]] {
            let p = Point::on(&coords);
            let pa = PointAnalysis::new(&m, &f, &p).unwrap();
            for x in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.2, -0.7, 0.4]] {
                let ax = pa.apply_shape(&x);
                assert!(pa.inner(&ax, &pa.xi).abs() < 1e-10);
            }
            // adjoint correctness against the metric
            let x = [0.3, 0.8, -0.2];
            let y = [-0.5, 0.1, 0.9];
            let lhs = pa.inner(&pa.apply_shape(&x), &y);
            let rhs = pa.inner(&x, &pa.apply_shape_adjoint(&y));
            assert_relative_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn hopf_operator_structure() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.2, 0.6, -0.3]);
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        let op = shape_operator(&m, &f, &p, &frame).unwrap();
        let a = &op.matrix_a;
        // first column vanishes (geodesic field), matrix is skew
        for i in 0..3 {
            assert!(a[i * 3].abs() < 1e-10);
            for j in 0..3 {
                assert!((a[i * 3 + j] + a[j * 3 + i]).abs() < 1e-9, "skewness");
                assert!((op.matrix_a_t[i * 3 + j] - a[j * 3 + i]).abs() < 1e-11);
            }
        }
        // A^2 = -Id on the complement block
        let a2 = linalg::mat_mul(a, a, 3);
        for i in 1..3 {
            for j in 1..3 {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((a2[i * 3 + j] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn shape_operator_matches_finite_differences() {
        let spec = make_warped_surface(0.5, std::f64::consts::FRAC_PI_4).unwrap();
        let m = spec.manifold();
        let f = warped_unit_field(&spec, 0.3);
        let u0 = spec.u_range.0 + 0.4 * (spec.u_range.1 - spec.u_range.0);
        let p = Point::on(&[u0, 0.5]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();

        // A^i_k = -(d_k xi^i + Gamma^i_jk xi^j) with FD jacobian and FD Christoffels
        let h = 1e-6;
        let chr = kernel::christoffel_at_fd(&m, &p, 1e-5).unwrap();
        let map = f.map_for(0);
        let mut a_fd = vec![0.0; 4];
        for k in 0..2 {
            let mut up = p.coords.clone();
            up[k] += h;
            let mut dn = p.coords.clone();
            dn[k] -= h;
            let vp = map.at::<f64>(&up);
            let vn = map.at::<f64>(&dn);
            for i in 0..2 {
                let mut s = (vp[i] - vn[i]) / (2.0 * h);
                for j in 0..2 {
                    s += chr.get(i, j, k) * pa.xi[j];
                }
                a_fd[i * 2 + k] = -s;
            }
        }
        let tr: f64 = pa.a[0] + pa.a[3];
        let tr_fd = a_fd[0] + a_fd[3];
        assert_relative_eq!(tr, tr_fd, epsilon = 1e-5);
        for (x, y) in pa.a.iter().zip(&a_fd) {
            assert!((x - y).abs() < 1e-5);
        }
    }

    #[test]
    fn codazzi_identity_on_sphere() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.5, -0.1, 0.8]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let x = [0.3, 0.9, -0.4];
        let y = [-0.6, 0.2, 0.7];
        let nyx = pa.nabla_shape(&y, &x);
        let nxy = pa.nabla_shape(&x, &y);
        let r = pa.curvature.apply(&x, &y, &pa.xi);
        for i in 0..3 {
            assert!((nyx[i] - nxy[i] - r[i]).abs() < 1e-8, "codazzi");
        }
    }

    #[test]
    fn killing_derivative_identity_on_sphere() {
        // For a Killing field on the sphere: (grad_X A)Y = R(xi, X)Y,
        // which collapses to <X,Y> xi on arguments orthogonal to the field.
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[-0.2, 0.4, 0.6]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let x = [0.8, -0.3, 0.1];
        let y = [0.2, 0.5, -0.9];
        let na = pa.nabla_shape(&x, &y);
        let r = pa.curvature.apply(&pa.xi, &x, &y);
        for i in 0..3 {
            assert!((na[i] - r[i]).abs() < 1e-8);
        }
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        for a in 1..3 {
            for b in 1..3 {
                let (ea, eb) = (&frame.vectors[a], &frame.vectors[b]);
                let na = pa.nabla_shape(ea, eb);
                let c = pa.inner(ea, eb);
                for i in 0..3 {
                    assert!((na[i] - c * pa.xi[i]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn nabla_shape_is_tensorial_in_y() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.4, 0.1, -0.5]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let x = [0.7, -0.2, 0.3];
        let y = vec![0.1, 0.9, -0.4];

        // Extend y as a field with a linear part vanishing at p.
        struct LinearExtension {
            base: Vec<f64>,
            at: Vec<f64>,
            slope: Vec<f64>,
        }
        impl SmoothMap for LinearExtension {
            fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
                let n = u.len();
                (0..n)
                    .map(|i| {
                        let mut s = T::from_f64(self.base[i]);
                        for j in 0..n {
                            s = s + T::from_f64(self.slope[i * n + j])
                                * (u[j].clone() - T::from_f64(self.at[j]));
                        }
                        s
                    })
                    .collect()
            }
        }
        let ext = MapHandle::primitive(
            3,
            3,
            LinearExtension {
                base: y.clone(),
                at: p.coords.clone(),
                slope: vec![0.9, -0.4, 0.2, 0.3, 0.7, -0.6, 0.1, 0.5, 0.8],
            },
        );
        let constant = pa.nabla_shape(&x, &y);
        let general = pa.nabla_shape_field(&x, &ext);
        for i in 0..3 {
            assert!(
                (constant[i] - general[i]).abs() < 1e-8,
                "extension dependence"
            );
        }
    }

    #[test]
    fn hessian_symmetry_and_trace_is_rough_laplacian() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.3, 0.3, -0.6]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let x = [0.5, -0.8, 0.2];
        let y = [0.1, 0.4, 0.9];
        let h1 = pa.rough_hessian(&x, &y);
        let h2 = pa.rough_hessian(&y, &x);
        for i in 0..3 {
            assert_relative_eq!(h1[i], h2[i], epsilon = 1e-14);
        }
        // trace over an adapted frame against the direct coordinate assembly
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        let mut lap = vec![0.0; 3];
        for e in &frame.vectors {
            let h = pa.rough_hessian(e, e);
            for i in 0..3 {
                lap[i] -= h[i];
            }
        }
        let direct = pa.rough_laplacian_direct();
        for i in 0..3 {
            assert!(
                (lap[i] - direct[i]).abs() < 1e-8,
                "laplacian routes disagree"
            );
        }
    }

    #[test]
    fn hopf_hessian_identity_on_complement() {
        // Hess(X,Y) = <AX, AY> xi for X, Y orthogonal to the field
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.7, 0.2, 0.1]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        for a in 1..3 {
            for b in 1..3 {
                let x = &frame.vectors[a];
                let y = &frame.vectors[b];
                let h = pa.rough_hessian(x, y);
                let c = pa.inner(&pa.apply_shape(x), &pa.apply_shape(y));
                for i in 0..3 {
                    assert!((h[i] - c * pa.xi[i]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn harmonicity_tensor_sphere_expansion() {
        // On the sphere the curvature identity collapses the tensor to
        // -(Lg)(X,Y)/2 xi - [<xi,Y> AX + <xi,X> AY]/2; expanding the
        // totally-geodesic condition with this form reproduces the sphere
        // specialization exactly.
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[-0.3, 0.5, 0.4]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let x = [0.9, 0.2, -0.3];
        let y = [-0.1, 0.6, 0.8];
        let hm = pa.harmonicity_tensor(&x, &y);
        let ax = pa.apply_shape(&x);
        let ay = pa.apply_shape(&y);
        let lie = -(pa.inner(&ax, &y) + pa.inner(&x, &ay));
        let xi_x = pa.inner(&pa.xi, &x);
        let xi_y = pa.inner(&pa.xi, &y);
        for i in 0..3 {
            let want = -0.5 * lie * pa.xi[i] - 0.5 * (xi_y * ax[i] + xi_x * ay[i]);
            assert!((hm[i] - want).abs() < 1e-8);
        }
        // Killing field: the Lie-derivative term itself vanishes
        assert!(lie.abs() < 1e-10);
    }

    #[test]
    fn laplacian_field_component_identity() {
        // <Delta xi, xi> = -|grad xi|^2 for any unit field, so the residual
        // is purely the complement part of the Laplacian defect.
        let m = make_sphere(3);
        for f in [
            hopf_field(1),
            crate::builtin::normalized_coordinate_field(&m, 1),
        ] {
            let p = Point::on(&[0.4, -0.2, 0.6]);
            let pa = PointAnalysis::new(&m, &f, &p).unwrap();
            let lap = pa.rough_laplacian_direct();
            assert!(
                (pa.inner(&lap, &pa.xi) + pa.full_energy_density()).abs() < 1e-9,
                "field {}",
                f.name
            );
        }
    }

    #[test]
    fn harmonic_map_trace_is_frame_independent() {
        let m = make_sphere(3);
        let f = crate::builtin::normalized_coordinate_field(&m, 2);
        let p = Point::on(&[0.1, -0.8, 0.5]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let frame_a = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        let seeds: Vec<Tangent> = [[0.2, 0.9, -0.4], [-0.7, 0.3, 0.5], [0.4, 0.1, 0.8]]
            .iter()
            .map(|v| Tangent::new(p.clone(), v.to_vec()))
            .collect();
        let frame_b = kernel::adapted_frame(&m, &f, &p, &seeds).unwrap();
        let ra = pa.harmonic_map_residual(&frame_a);
        let rb = pa.harmonic_map_residual(&frame_b);
        for (a, b) in ra.vector.iter().zip(&rb.vector) {
            assert!((a - b).abs() < 1e-10);
        }
        let ha = pa.harmonic_residual(&frame_a);
        let hb = pa.harmonic_residual(&frame_b);
        for (a, b) in ha.vector.iter().zip(&hb.vector) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda_identity() {
        // <(grad_X A)Y, xi> = <grad_X xi, grad_Y xi> for any unit field
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.2, -0.6, 0.3]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let frame = kernel::adapted_frame(&m, &f, &p, &[]).unwrap();
        for a in 1..3 {
            for b in 1..3 {
                let x = &frame.vectors[a];
                let y = &frame.vectors[b];
                let na = pa.nabla_shape(x, y);
                let lhs = pa.inner(&na, &pa.xi);
                let rhs = pa.inner(&pa.apply_shape(x), &pa.apply_shape(y));
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sphere_residual_requires_sphere() {
        let m = flat_space(2);
        let f = parallel_field(2);
        let p = Point::on(&[0.1, 0.1]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        assert!(matches!(
            pa.sphere_tg_residual(m.kind, &[1.0, 0.0], &[0.0, 1.0]),
            Err(GeomError::NotASphere)
        ));
    }

    #[test]
    fn sphere_residual_identity_slot() {
        // X = Y = xi gives an identical zero for any geodesic unit field
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.5, 0.5, -0.2]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let r = pa
            .sphere_tg_residual(m.kind, &pa.xi.clone(), &pa.xi.clone())
            .unwrap();
        assert!(r.norm < 1e-9);
    }

    #[test]
    fn geodesic_curvature_of_helical_field() {
        let m = flat_space(2);
        let a = 1.3;
        let f = flat_tg_field(a, 0.0);
        let p = Point::on(&[0.6, -0.4]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let gc = pa.geodesic_curvature();
        assert_relative_eq!(gc.k, a * (a * 0.6f64).sin().abs(), epsilon = 1e-12);
        // grad_xi xi = -k nu with unit nu
        let nu = gc.nu.clone().unwrap();
        assert_relative_eq!(pa.norm_of(&nu), 1.0, epsilon = 1e-12);
        let v = pa.apply_shape(&pa.xi); // = -grad_xi xi
        for i in 0..2 {
            assert_relative_eq!(-v[i], -gc.k * nu[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn geodesic_curvature_matches_trajectory_curvature() {
        let m = flat_space(2);
        let a = 1.0;
        let f = flat_tg_field(a, 0.0);
        let p = Point::on(&[0.5, 0.0]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        let k_field = pa.geodesic_curvature().k;

        // finite-difference curvature of the integrated unit-speed trajectory
        let traj = ode::integral_curve(&m, &f, &p, 0.02, 1e-3).unwrap();
        let pts: Vec<&Point> = traj.samples.iter().map(|(_, q)| q).collect();
        let h = 1e-3;
        let i = 10;
        let d1x = (pts[i + 1].coords[0] - pts[i - 1].coords[0]) / (2.0 * h);
        let d1y = (pts[i + 1].coords[1] - pts[i - 1].coords[1]) / (2.0 * h);
        let d2x = (pts[i + 1].coords[0] - 2.0 * pts[i].coords[0] + pts[i - 1].coords[0]) / (h * h);
        let d2y = (pts[i + 1].coords[1] - 2.0 * pts[i].coords[1] + pts[i - 1].coords[1]) / (h * h);
        let k_fd = (d1x * d2y - d1y * d2x).abs() / (d1x * d1x + d1y * d1y).powf(1.5);
        let pa_mid = PointAnalysis::new(&m, &f, pts[i]).unwrap();
        assert_relative_eq!(pa_mid.geodesic_curvature().k, k_fd, epsilon = 1e-5);
        let _ = k_field;
    }

    #[test]
    fn minimality_degenerate_branch_short_circuits() {
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.4, -0.7, 0.2]);
        let r = minimality_residual(&m, &f, &p).unwrap();
        assert_eq!(r.norm, 0.0);
    }

    #[test]
    fn bracket_routes_agree_for_principal_normal() {
        // [xi, nu] as coordinate bracket vs covariant difference
        let m = flat_space(2);
        let f = flat_tg_field(0.8, 0.2);
        let p = Point::on(&[0.7, 0.1]);
        let nu = principal_normal_field(&m, &f);
        let br = kernel::lie_bracket(&m, &f, &nu, &p).unwrap();
        let xi_p = f.at(&p);
        let nu_p = nu.at(&p);
        let d1 = kernel::covariant_derivative(&m, &nu, &xi_p).unwrap();
        let d2 = kernel::covariant_derivative(&m, &f, &nu_p).unwrap();
        for i in 0..2 {
            assert!((br[i] - (d1[i] - d2[i])).abs() < 1e-8);
        }
    }

    #[test]
    fn classifier_truth_tables() {
        let pts2: Vec<Point> = (0..25)
            .map(|k| Point::on(&[0.45 + 0.05 * (k % 5) as f64, 0.45 + 0.05 * (k / 5) as f64]))
            .collect();

        let m = flat_space(2);
        let f = parallel_field(2);
        let rec = classify(&m, &f, &pts2, CLASSIFY_TOL).unwrap();
        assert!(rec.geodesic.holds);
        assert!(rec.holonomic.holds);
        assert!(rec.killing.holds);
        assert!(rec.covariantly_normal.holds);
        assert!(rec.strongly_normal.holds);
        assert!(!rec.invariant.holds);

        let f = radial_field(2);
        let rec = classify(&m, &f, &pts2, CLASSIFY_TOL).unwrap();
        assert!(rec.holonomic.holds);
        assert!(!rec.killing.holds);
        assert!(rec.geodesic.holds);
        assert!(rec.strongly_normal.holds);

        let m = make_sphere(3);
        let f = hopf_field(1);
        let pts3: Vec<Point> = (0..27)
            .map(|k| {
                Point::on(&[
                    -0.6 + 0.55 * (k % 3) as f64,
                    -0.5 + 0.45 * ((k / 3) % 3) as f64,
                    -0.4 + 0.5 * (k / 9) as f64,
                ])
            })
            .collect();
        let rec = classify(&m, &f, &pts3, CLASSIFY_TOL).unwrap();
        assert!(rec.geodesic.holds);
        assert!(rec.killing.holds);
        assert!(rec.covariantly_normal.holds);
        assert!(rec.strongly_normal.holds);
        assert!(rec.invariant.holds);
        assert!(!rec.holonomic.holds);
    }

    #[test]
    fn total_bending_of_parallel_field_vanishes() {
        let m = flat_space(2);
        let f = parallel_field(2);
        let b = total_bending(&m, &f, 0, &[-1.0, -1.0], &[1.0, 1.0], 8).unwrap();
        assert_relative_eq!(b, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn total_bending_of_rotation_field() {
        // |grad xi|^2 = 2 pointwise, so the integral is twice the box volume.
        let m = make_sphere(3);
        let f = hopf_field(1);
        let p = Point::on(&[0.3, -0.4, 0.2]);
        let pa = PointAnalysis::new(&m, &f, &p).unwrap();
        assert_relative_eq!(pa.full_energy_density(), 2.0, epsilon = 1e-10);

        let lo = [-0.5, -0.5, -0.5];
        let hi = [0.5, 0.5, 0.5];
        let b = total_bending(&m, &f, 0, &lo, &hi, 8).unwrap();
        let vol = chart_box_volume(&m, 0, &lo, &hi, 8).unwrap();
        assert_relative_eq!(b, 2.0 * vol, epsilon = 1e-10);
        // quadrature refinement stability
        let b2 = total_bending(&m, &f, 0, &lo, &hi, 16).unwrap();
        assert!(((b2 - b) / b2).abs() < 1e-4);
    }
}
