//! Geometry of the tangent bundle with the Sasaki metric: lifts and
//! projections, the bundle metric as a genuine 2n-chart metric, the standard
//! connection formulas on lifted fields, the pushforward of a unit field,
//! the normal distribution along its image, and the second fundamental form
//! of the image computed two independent ways.

use crate::analysis::PointAnalysis;
use crate::error::{GeomError, Result};
use crate::geometry::{Chart, Domain, Field, Manifold, ManifoldKind, Point, Tangent};
use crate::jet::{Dual, Scalar};
use crate::kernel::{self, christoffel_values, UNIT_FIELD_TOL};
use crate::linalg;
use crate::smooth::{value_and_jacobian, DerivedMap, MapHandle, Real};

/// A point of the tangent bundle in natural coordinates `(u, xi)`.
#[derive(Clone, Debug)]
pub struct BundlePoint {
    pub base: Point,
    pub fiber: Vec<f64>,
}

impl BundlePoint {
    pub fn new(base: Point, fiber: Vec<f64>) -> Self {
        assert_eq!(base.coords.len(), fiber.len());
        BundlePoint { base, fiber }
    }

    /// Bundle point on the image of a field: fiber = field value.
    pub fn on_image(field: &Field, p: &Point) -> Self {
        BundlePoint::new(p.clone(), field.at(p).components)
    }

    pub fn natural_coords(&self) -> Vec<f64> {
        let mut w = self.base.coords.clone();
        w.extend_from_slice(&self.fiber);
        w
    }
}

/// Tangent vector of the bundle in the natural frame `(d/du, d/dxi)`.
#[derive(Clone, Debug)]
pub struct BundleVector {
    pub at: BundlePoint,
    pub components: Vec<f64>,
}

/// The two canonical projections of a bundle vector back to the base:
/// `horizontal_part` is the differential of the bundle projection and
/// `vertical_part` is the connection map.
#[derive(Clone, Debug)]
pub struct LiftDecomposition {
    pub horizontal_part: Vec<f64>,
    pub vertical_part: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftKind {
    Horizontal,
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKinds {
    HH,
    HV,
    VH,
    VV,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricScaling {
    /// Plain pullback of the Sasaki metric.
    Sasaki,
    /// Quarter rescaling that turns the standard almost contact structure
    /// into an almost contact *metric* structure.
    Quarter,
}

impl MetricScaling {
    pub fn factor(self) -> f64 {
        match self {
            MetricScaling::Sasaki => 1.0,
            MetricScaling::Quarter => 0.25,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricScaling::Sasaki => "sasaki",
            MetricScaling::Quarter => "quarter",
        }
    }
}

/// Sasaki metric blocks from base metric, Christoffels and the fiber point:
/// with `C^i_k = Gamma^i_{jk} xi^j`, the matrix is
/// `[[g + C^T g C, C^T g], [g C, g]]` in natural coordinates.
fn sasaki_blocks<T: Scalar>(g: &[T], gamma: &[T], fiber: &[T], n: usize) -> Vec<T> {
    let mut c = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let mut s = T::zero();
            for j in 0..n {
                s = s + gamma[(i * n + j) * n + k].clone() * fiber[j].clone();
            }
            c[i * n + k] = s;
        }
    }
    let two_n = 2 * n;
    let mut out = vec![T::zero(); two_n * two_n];
    for i in 0..n {
        for j in 0..n {
            let mut hh = g[i * n + j].clone();
            for l in 0..n {
                for m_ in 0..n {
                    hh = hh + g[l * n + m_].clone() * c[l * n + i].clone() * c[m_ * n + j].clone();
                }
            }
            let mut hv = T::zero();
            for l in 0..n {
                hv = hv + c[l * n + i].clone() * g[l * n + j].clone();
            }
            out[i * two_n + j] = hh;
            out[i * two_n + (n + j)] = hv.clone();
            out[(n + j) * two_n + i] = hv;
            out[(n + i) * two_n + (n + j)] = g[i * n + j].clone();
        }
    }
    out
}

struct BundleMetricMap {
    base_metric: MapHandle,
    n: usize,
}

impl DerivedMap for BundleMetricMap {
    fn eval<T>(&self, w: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real,
    {
        let n = self.n;
        let (g, gamma) = christoffel_values(&self.base_metric, &w[..n])
            .expect("base metric singular inside chart");
        sasaki_blocks(&g, &gamma, &w[n..], n)
    }
}

/// The tangent bundle over one chart as a 2n-dimensional manifold carrying
/// the Sasaki metric, usable with every kernel operation.
pub fn tangent_bundle(m: &Manifold, chart: usize) -> Manifold {
    let base = m.chart(chart);
    let n = base.dim;
    if !base.metric.supports_deep() {
        panic!("tangent bundle over a derived metric is not supported");
    }
    let mut lo = base.domain.lo.clone();
    let mut hi = base.domain.hi.clone();
    lo.extend(vec![f64::NEG_INFINITY; n]);
    hi.extend(vec![f64::INFINITY; n]);
    let mut sample = base.sample_box.clone();
    sample.extend(vec![(-1.5, 1.5); n]);
    Manifold {
        name: format!("T({})", m.name),
        kind: ManifoldKind::TangentBundle,
        charts: vec![Chart::new(
            format!("T({})", base.name),
            2 * n,
            Domain::new(lo, hi),
            sample,
            MapHandle::derived(
                2 * n,
                4 * n * n,
                BundleMetricMap {
                    base_metric: base.metric.clone(),
                    n,
                },
            ),
        )],
        transitions: Vec::new(),
    }
}

/// Sasaki metric matrix at a bundle point, `2n x 2n` in natural coordinates.
pub fn sasaki_metric_at(m: &Manifold, q: &BundlePoint) -> Result<Vec<f64>> {
    m.check_point(&q.base)?;
    let n = q.base.coords.len();
    let (g, gamma) = christoffel_values(&m.chart(q.base.chart).metric, &q.base.coords)
        .ok_or(GeomError::SingularMetric)?;
    Ok(sasaki_blocks(&g, &gamma, &q.fiber, n))
}

pub fn sasaki_inner(m: &Manifold, q: &BundlePoint, a: &[f64], b: &[f64]) -> Result<f64> {
    let s = sasaki_metric_at(m, q)?;
    Ok(linalg::bilinear(&s, a, b, 2 * q.base.coords.len()))
}

/// Horizontal or vertical lift of a base vector to a bundle point.
pub fn lift(m: &Manifold, q: &BundlePoint, x: &[f64], kind: LiftKind) -> Result<BundleVector> {
    m.check_point(&q.base)?;
    let n = q.base.coords.len();
    let mut components = vec![0.0; 2 * n];
    match kind {
        LiftKind::Vertical => {
            components[n..].copy_from_slice(x);
        }
        LiftKind::Horizontal => {
            components[..n].copy_from_slice(x);
            let chr = kernel::christoffel_at(m, &q.base)?;
            for i in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += chr.get(i, j, k) * q.fiber[j] * x[k];
                    }
                }
                components[n + i] = -s;
            }
        }
    }
    Ok(BundleVector {
        at: q.clone(),
        components,
    })
}

/// Split a bundle vector into its base projection and connection-map image.
pub fn decompose(m: &Manifold, v: &BundleVector) -> Result<LiftDecomposition> {
    let n = v.at.base.coords.len();
    let chr = kernel::christoffel_at(m, &v.at.base)?;
    let horizontal_part = v.components[..n].to_vec();
    let mut vertical_part = v.components[n..].to_vec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                vertical_part[i] += chr.get(i, j, k) * v.at.fiber[j] * v.components[k];
            }
        }
    }
    Ok(LiftDecomposition {
        horizontal_part,
        vertical_part,
    })
}

/// Lifted vector fields on the bundle, as maps of the natural coordinates.
struct LiftedFieldMap {
    base_metric: MapHandle,
    field: MapHandle,
    kind: LiftKind,
    n: usize,
}

impl DerivedMap for LiftedFieldMap {
    fn eval<T>(&self, w: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real,
    {
        let n = self.n;
        let y = self.field.at(&w[..n]);
        let mut out = vec![T::zero(); 2 * n];
        match self.kind {
            LiftKind::Vertical => {
                for i in 0..n {
                    out[n + i] = y[i].clone();
                }
            }
            LiftKind::Horizontal => {
                let (_, gamma) = christoffel_values(&self.base_metric, &w[..n])
                    .expect("base metric singular inside chart");
                for i in 0..n {
                    out[i] = y[i].clone();
                    let mut s = T::zero();
                    for j in 0..n {
                        for k in 0..n {
                            s = s + gamma[(i * n + j) * n + k].clone()
                                * w[n + j].clone()
                                * y[k].clone();
                        }
                    }
                    out[n + i] = -s;
                }
            }
        }
        out
    }
}

pub fn lifted_field_map(m: &Manifold, chart: usize, field: &Field, kind: LiftKind) -> MapHandle {
    let n = m.chart(chart).dim;
    MapHandle::derived(
        2 * n,
        2 * n,
        LiftedFieldMap {
            base_metric: m.chart(chart).metric.clone(),
            field: field.map_for(chart).clone(),
            kind,
            n,
        },
    )
}

/// The four Levi-Civita connection formulas for lifted fields on the bundle,
/// returned as base projections of the result.
pub fn kowalski_derivative(
    m: &Manifold,
    q: &BundlePoint,
    combo: ArgKinds,
    x: &Field,
    y: &Field,
) -> Result<LiftDecomposition> {
    m.check_point(&q.base)?;
    let n = q.base.coords.len();
    let p = &q.base;
    let xv = x.at(p).components;
    let yv = y.at(p).components;
    let xi = &q.fiber;
    let zero = vec![0.0; n];
    Ok(match combo {
        ArgKinds::VV => LiftDecomposition {
            horizontal_part: zero.clone(),
            vertical_part: zero,
        },
        ArgKinds::HH => {
            let nab = kernel::covariant_derivative(m, y, &Tangent::new(p.clone(), xv.clone()))?;
            let r = kernel::riemann_at(m, p, &xv, &yv, xi)?;
            LiftDecomposition {
                horizontal_part: nab,
                vertical_part: linalg::scale(-0.5, &r),
            }
        }
        ArgKinds::HV => {
            let nab = kernel::covariant_derivative(m, y, &Tangent::new(p.clone(), xv.clone()))?;
            let r = kernel::riemann_at(m, p, xi, &yv, &xv)?;
            LiftDecomposition {
                horizontal_part: linalg::scale(0.5, &r),
                vertical_part: nab,
            }
        }
        ArgKinds::VH => {
            let r = kernel::riemann_at(m, p, xi, &xv, &yv)?;
            LiftDecomposition {
                horizontal_part: linalg::scale(0.5, &r),
                vertical_part: zero,
            }
        }
    })
}

fn check_unit(m: &Manifold, xi: &Field, p: &Point) -> Result<Vec<f64>> {
    let v = xi.at(p).components;
    let norm = kernel::norm(m, p, &v)?;
    if (norm - 1.0).abs() > UNIT_FIELD_TOL {
        return Err(GeomError::NonUnitField { norm });
    }
    Ok(v)
}

/// Differential of the map `u -> (u, xi(u))` applied to a base vector:
/// `xi_* X = X^h - (A X)^v`, tangent to the image inside the unit bundle.
pub fn pushforward(m: &Manifold, xi: &Field, x: &Tangent) -> Result<BundleVector> {
    let p = &x.at;
    let xi_v = check_unit(m, xi, p)?;
    let q = BundlePoint::new(p.clone(), xi_v);
    let n = p.coords.len();
    let grad = kernel::covariant_derivative(m, xi, x)?;
    let h = lift(m, &q, &x.components, LiftKind::Horizontal)?;
    let mut components = h.components;
    for i in 0..n {
        components[n + i] += grad[i];
    }
    Ok(BundleVector { at: q, components })
}

/// Normal vector `(A^t N)^h + N^v` of the image, for `N` orthogonal to the
/// field.
pub fn normal_field(m: &Manifold, xi: &Field, nvec: &Tangent) -> Result<BundleVector> {
    let p = &nvec.at;
    let pa = PointAnalysis::new(m, xi, p)?;
    if pa.inner(&pa.xi, &nvec.components).abs() > UNIT_FIELD_TOL {
        return Err(GeomError::NotOrthogonalToXi);
    }
    let q = BundlePoint::new(p.clone(), pa.xi.clone());
    let atn = pa.apply_shape_adjoint(&nvec.components);
    let h = lift(m, &q, &atn, LiftKind::Horizontal)?;
    let n = p.coords.len();
    let mut components = h.components;
    for i in 0..n {
        components[n + i] += nvec.components[i];
    }
    Ok(BundleVector { at: q, components })
}

/// Second fundamental form of the image by the closed formula
/// `-<Hess(X,Y) + A Hm(X,Y), N>`.
pub fn sff_formula(
    m: &Manifold,
    xi: &Field,
    p: &Point,
    x: &[f64],
    y: &[f64],
    nvec: &[f64],
) -> Result<f64> {
    let pa = PointAnalysis::new(m, xi, p)?;
    if pa.inner(&pa.xi, nvec).abs() > UNIT_FIELD_TOL {
        return Err(GeomError::NotOrthogonalToXi);
    }
    let hess = pa.rough_hessian(x, y);
    let hm = pa.harmonicity_tensor(x, y);
    let ahm = pa.apply_shape(&hm);
    let total: Vec<f64> = (0..pa.n).map(|i| hess[i] + ahm[i]).collect();
    Ok(-pa.inner(&total, nvec))
}

struct GraphPushforwardMap {
    field: MapHandle,
    direction: Vec<f64>,
    n: usize,
}

impl DerivedMap for GraphPushforwardMap {
    fn eval<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real,
    {
        let n = self.n;
        let (_, jac) = value_and_jacobian(&self.field, u);
        let mut out = vec![T::zero(); 2 * n];
        for i in 0..n {
            out[i] = T::from_f64(self.direction[i]);
            let mut s = T::zero();
            for k in 0..n {
                s = s + jac[i * n + k].clone() * T::from_f64(self.direction[k]);
            }
            out[n + i] = s;
        }
        out
    }
}

/// Brute-force second fundamental form: treat the bundle as a plain
/// 2n-manifold with the Sasaki metric, covariantly differentiate the graph
/// pushforward of `Y` along `xi_* X` with the generic kernel, subtract the
/// component along the unit-bundle normal `xi^v`, and project onto the
/// normal of the image. Shares no connection formula with [`sff_formula`].
pub fn sff_oracle(
    m: &Manifold,
    xi: &Field,
    p: &Point,
    x: &[f64],
    y: &[f64],
    nvec: &[f64],
) -> Result<f64> {
    let pa = PointAnalysis::new(m, xi, p)?;
    if pa.inner(&pa.xi, nvec).abs() > UNIT_FIELD_TOL {
        return Err(GeomError::NotOrthogonalToXi);
    }
    let n = pa.n;
    let q = BundlePoint::new(p.clone(), pa.xi.clone());

    let tm = tangent_bundle(m, p.chart);
    let w = Point::new(0, q.natural_coords());
    let chr_tm = kernel::christoffel_at(&tm, &w)?;

    let graph = |dir: &[f64]| {
        MapHandle::derived(
            n,
            2 * n,
            GraphPushforwardMap {
                field: xi.map_for(p.chart).clone(),
                direction: dir.to_vec(),
                n,
            },
        )
    };
    let (hy, dhy) = value_and_jacobian(&graph(y), &p.coords);
    let hx = graph(x).at::<f64>(&p.coords);

    // Covariant derivative along the image curve tangent to xi_* X.
    let two_n = 2 * n;
    let mut deriv = vec![0.0; two_n];
    for b in 0..two_n {
        let mut s = 0.0;
        for k in 0..n {
            s += dhy[b * n + k] * x[k];
        }
        for a in 0..two_n {
            for c in 0..two_n {
                s += chr_tm.get(b, a, c) * hx[a] * hy[c];
            }
        }
        deriv[b] = s;
    }

    // Remove the component along the unit normal of the unit bundle.
    let s_mat = sasaki_metric_at(m, &q)?;
    let mut xi_v = vec![0.0; two_n];
    xi_v[n..].copy_from_slice(&pa.xi);
    let along = linalg::bilinear(&s_mat, &deriv, &xi_v, two_n);
    let corrected: Vec<f64> = (0..two_n).map(|b| deriv[b] - along * xi_v[b]).collect();

    let normal = normal_field(m, xi, &Tangent::new(p.clone(), nvec.to_vec()))?;
    Ok(linalg::bilinear(
        &s_mat,
        &corrected,
        &normal.components,
        two_n,
    ))
}

/// Pullback metric of the image: `<X, Y> + <A X, A Y>`.
pub fn pullback_metric_value(
    m: &Manifold,
    xi: &Field,
    p: &Point,
    x: &[f64],
    y: &[f64],
) -> Result<f64> {
    let pa = PointAnalysis::new(m, xi, p)?;
    Ok(pa.inner(x, y) + pa.inner(&pa.apply_shape(x), &pa.apply_shape(y)))
}

struct PullbackMetricMap {
    base_metric: MapHandle,
    field: MapHandle,
    scale: f64,
    n: usize,
}

impl DerivedMap for PullbackMetricMap {
    fn eval<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real,
    {
        let n = self.n;
        let (g, gamma) =
            christoffel_values(&self.base_metric, u).expect("base metric singular inside chart");
        let (xi, dxi) = value_and_jacobian(&self.field, u);
        let mut a = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let mut s = dxi[i * n + k].clone();
                for j in 0..n {
                    s = s + gamma[(i * n + j) * n + k].clone() * xi[j].clone();
                }
                a[i * n + k] = -s;
            }
        }
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = g[i * n + j].clone();
                for l in 0..n {
                    for m_ in 0..n {
                        s = s + g[l * n + m_].clone()
                            * a[l * n + i].clone()
                            * a[m_ * n + j].clone();
                    }
                }
                out[i * n + j] = s * T::from_f64(self.scale);
            }
        }
        out
    }
}

/// The image of the field as a standalone manifold carrying the (optionally
/// rescaled) pullback metric in the base coordinates.
pub fn pullback_manifold(
    m: &Manifold,
    xi: &Field,
    chart: usize,
    scaling: MetricScaling,
) -> Manifold {
    let base = m.chart(chart);
    let n = base.dim;
    Manifold {
        name: format!("pullback({}, {}, {})", m.name, xi.name, scaling.label()),
        kind: ManifoldKind::Derived,
        charts: vec![Chart::new(
            base.name.clone(),
            n,
            base.domain.clone(),
            base.sample_box.clone(),
            MapHandle::derived(
                n,
                n * n,
                PullbackMetricMap {
                    base_metric: base.metric.clone(),
                    field: xi.map_for(chart).clone(),
                    scale: scaling.factor(),
                    n,
                },
            ),
        )],
        transitions: Vec::new(),
    }
}

/// Sectional curvature of the plane `span{X, A X}` in the pullback metric;
/// the plane of the almost contact structure the image carries.
pub fn phi_sectional_curvature(
    m: &Manifold,
    xi: &Field,
    p: &Point,
    x: &[f64],
    scaling: MetricScaling,
) -> Result<f64> {
    let pa = PointAnalysis::new(m, xi, p)?;
    let ax = pa.apply_shape(x);
    if pa.norm_of(&ax) < 1e-8 {
        return Err(GeomError::DegeneratePlane);
    }
    let pm = pullback_manifold(m, xi, p.chart, scaling);
    kernel::sectional_curvature(&pm, p, x, &ax)
}
