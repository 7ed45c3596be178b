//! The warped-product surface `du^2 + sin^2(alpha(u)) dv^2` whose angle
//! profile solves `alpha' = 1 - (a+1)/cos(alpha)`, together with the unit
//! field it carries.

use std::sync::Arc;

use crate::error::Result;
use crate::geometry::{Chart, Domain, Field, Manifold, ManifoldKind};
use crate::jet::Scalar;
use crate::ode::{integrate_alpha, AlphaTable, AlphaTableRef};
use crate::smooth::{MapHandle, Real, SmoothMap};

/// Table step for built surfaces. Finer than the stand-alone integration
/// default: the global RK4 error through the stiff cos edge must stay under
/// the 1e-7 half-step reproducibility bound the table promises.
pub const SURFACE_TABLE_STEP: f64 = 2e-4;

pub struct WarpedSurfaceSpec {
    pub a: f64,
    pub alpha0: f64,
    pub table: AlphaTableRef,
    pub u_range: (f64, f64),
}

struct WarpedMetric {
    table: AlphaTableRef,
}

impl SmoothMap for WarpedMetric {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let alpha = self.table.eval(&u[0]);
        let s = alpha.sin();
        vec![T::one(), T::zero(), T::zero(), s.clone() * s]
    }
}

impl WarpedSurfaceSpec {
    pub fn manifold(&self) -> Manifold {
        let (lo, hi) = self.u_range;
        let margin = (hi - lo) * 1e-3;
        Manifold {
            name: format!("warped:{},{}", self.a, self.alpha0),
            kind: ManifoldKind::WarpedSurface,
            charts: vec![Chart::new(
                "warped",
                2,
                Domain::new(vec![lo, f64::NEG_INFINITY], vec![hi, f64::INFINITY]),
                vec![(lo + margin, hi - margin), (-3.0, 3.0)],
                MapHandle::primitive(
                    2,
                    4,
                    WarpedMetric {
                        table: self.table.clone(),
                    },
                ),
            )],
            transitions: Vec::new(),
        }
    }
}

/// Build the surface by integrating the angle ODE at [`SURFACE_TABLE_STEP`].
pub fn make_warped_surface(a: f64, alpha0: f64) -> Result<WarpedSurfaceSpec> {
    make_warped_surface_with_step(a, alpha0, SURFACE_TABLE_STEP)
}

pub fn make_warped_surface_with_step(a: f64, alpha0: f64, h: f64) -> Result<WarpedSurfaceSpec> {
    let table: AlphaTableRef = Arc::new(integrate_alpha(a, alpha0, h)?);
    // Stay one interpolation cell away from the table ends.
    let u_range = (table.u_min() + h, table.u_max() - h);
    Ok(WarpedSurfaceSpec {
        a,
        alpha0,
        table,
        u_range,
    })
}

struct WarpedUnitField {
    a: f64,
    omega0: f64,
    table: AlphaTableRef,
}

impl SmoothMap for WarpedUnitField {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let phase = u[1].clone() * T::from_f64(self.a) + T::from_f64(self.omega0);
        let alpha = self.table.eval(&u[0]);
        vec![phase.cos(), phase.sin() / alpha.sin()]
    }
}

/// The unit field `cos(av + w0) d_u + sin(av + w0)/sin(alpha) d_v` carried by
/// the surface.
pub fn warped_unit_field(spec: &WarpedSurfaceSpec, omega0: f64) -> Field {
    Field {
        name: format!("tg2d:{},{}", spec.a, omega0),
        per_chart: vec![MapHandle::primitive(
            2,
            2,
            WarpedUnitField {
                a: spec.a,
                omega0,
                table: spec.table.clone(),
            },
        )],
        declared_unit: true,
        sample_box: None,
    }
}

/// Gauss curvature reference for a warped metric: `-(sin alpha)'' / sin alpha`
/// with derivatives taken through the interpolated profile.
pub fn gauss_curvature_reference(table: &AlphaTable, u: f64) -> f64 {
    let seeds = crate::jet::seed_second(&[u]);
    let alpha = table.eval(&seeds[0]);
    let w = alpha.sin();
    let ws = w.dx[0].dx[0]; // (sin alpha)''
    -ws / w.val.val
}
