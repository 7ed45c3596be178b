//! Chart-based manifolds, points, tangent vectors, fields and frames.
//!
//! Everything is evaluated pointwise in a single chart; transitions exist
//! only to compare results on overlaps.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::smooth::MapHandle;

/// Per-axis open interval box; infinite endpoints allowed.
#[derive(Clone, Debug)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn unbounded(dim: usize) -> Self {
        Domain {
            lo: vec![f64::NEG_INFINITY; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Domain { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (lo, hi))| *x > *lo && *x < *hi)
    }
}

/// A coordinate chart: an open box together with the metric components as a
/// smooth map `u -> g_ij(u)` (row-major, symmetric).
#[derive(Clone)]
pub struct Chart {
    pub name: String,
    pub dim: usize,
    pub domain: Domain,
    /// Box the verification suites draw sample points from; always inside
    /// `domain`, finite even when the chart itself is unbounded.
    pub sample_box: Vec<(f64, f64)>,
    pub metric: MapHandle,
}

impl Chart {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        domain: Domain,
        sample_box: Vec<(f64, f64)>,
        metric: MapHandle,
    ) -> Self {
        assert_eq!(metric.dim_in, dim);
        assert_eq!(metric.dim_out, dim * dim);
        Chart {
            name: name.into(),
            dim,
            domain,
            sample_box,
            metric,
        }
    }
}

/// Chart-to-chart coordinate transition, valid on the named overlap.
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub map: MapHandle,
    pub on_overlap: Box<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManifoldKind {
    Flat,
    UnitSphere,
    WarpedSurface,
    TangentBundle,
    Derived,
}

pub struct Manifold {
    pub name: String,
    pub kind: ManifoldKind,
    pub charts: Vec<Chart>,
    pub transitions: Vec<Transition>,
}

impl Manifold {
    pub fn dim(&self) -> usize {
        self.charts[0].dim
    }

    pub fn chart(&self, idx: usize) -> &Chart {
        &self.charts[idx]
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        let chart = self
            .charts
            .get(p.chart)
            .ok_or(GeomError::PointOutsideDomain)?;
        if chart.domain.contains(&p.coords) {
            Ok(())
        } else {
            Err(GeomError::PointOutsideDomain)
        }
    }

    /// Move a point to another chart through a registered transition.
    pub fn transition_point(&self, p: &Point, to: usize) -> Result<Point> {
        let tr = self
            .transitions
            .iter()
            .find(|t| t.from == p.chart && t.to == to)
            .ok_or(GeomError::BadConfig("no transition between charts".into()))?;
        if !(tr.on_overlap)(&p.coords) {
            return Err(GeomError::PointOutsideDomain);
        }
        Ok(Point::new(to, tr.map.at(&p.coords)))
    }

    /// Push a tangent vector to another chart with the transition Jacobian.
    pub fn transition_tangent(&self, x: &Tangent, to: usize) -> Result<Tangent> {
        let tr = self
            .transitions
            .iter()
            .find(|t| t.from == x.at.chart && t.to == to)
            .ok_or(GeomError::BadConfig("no transition between charts".into()))?;
        if !(tr.on_overlap)(&x.at.coords) {
            return Err(GeomError::PointOutsideDomain);
        }
        let (vals, jac) = crate::smooth::value_and_jacobian(&tr.map, &x.at.coords);
        let n = x.at.coords.len();
        let comps = (0..n)
            .map(|i| (0..n).map(|k| jac[i * n + k] * x.components[k]).sum())
            .collect();
        Ok(Tangent::new(Point::new(to, vals), comps))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Point {
    pub chart: usize,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(chart: usize, coords: Vec<f64>) -> Self {
        Point { chart, coords }
    }

    pub fn on(coords: &[f64]) -> Self {
        Point::new(0, coords.to_vec())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tangent {
    pub at: Point,
    pub components: Vec<f64>,
}

impl Tangent {
    pub fn new(at: Point, components: Vec<f64>) -> Self {
        assert_eq!(at.coords.len(), components.len());
        Tangent { at, components }
    }
}

/// Orthonormal frame at a point, stored as component rows.
#[derive(Clone, Debug)]
pub struct Frame {
    pub at: Point,
    pub vectors: Vec<Vec<f64>>,
}

impl Frame {
    pub fn vector(&self, i: usize) -> Tangent {
        Tangent::new(self.at.clone(), self.vectors[i].clone())
    }
}

/// A vector field: one component map per chart, plus the unit-norm contract
/// and an optional sampling restriction (fields with singular loci shrink
/// the box suites sample from).
#[derive(Clone)]
pub struct Field {
    pub name: String,
    pub per_chart: Vec<MapHandle>,
    pub declared_unit: bool,
    pub sample_box: Option<Vec<(f64, f64)>>,
}

impl Field {
    pub fn map_for(&self, chart: usize) -> &MapHandle {
        &self.per_chart[chart]
    }

    /// Field value at a point, as a tangent vector.
    pub fn at(&self, p: &Point) -> Tangent {
        let comps = self.per_chart[p.chart].at(&p.coords);
        Tangent::new(p.clone(), comps)
    }
}

/// Scalar function on a manifold (used for Leibniz-rule style checks).
#[derive(Clone)]
pub struct ScalarField {
    pub per_chart: Vec<MapHandle>,
}

impl ScalarField {
    pub fn at(&self, p: &Point) -> f64 {
        self.per_chart[p.chart].at(&p.coords)[0]
    }
}

pub type ManifoldRef = Arc<Manifold>;
