//! Euclidean spaces and the flat test fields.

use crate::geometry::{Chart, Domain, Field, Manifold, ManifoldKind};
use crate::smooth::{MapHandle, Real, SmoothMap};

struct IdentityMetric {
    n: usize,
}

impl SmoothMap for IdentityMetric {
    fn eval<T: Real>(&self, _u: &[T]) -> Vec<T> {
        let n = self.n;
        (0..n * n)
            .map(|k| {
                if k % (n + 1) == 0 {
                    T::one()
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}

pub fn flat_space(n: usize) -> Manifold {
    assert!(n >= 1);
    let metric = MapHandle::primitive(n, n * n, IdentityMetric { n });
    Manifold {
        name: format!("flat:{n}"),
        kind: ManifoldKind::Flat,
        charts: vec![Chart::new(
            "cartesian",
            n,
            Domain::unbounded(n),
            vec![(-2.0, 2.0); n],
            metric,
        )],
        transitions: Vec::new(),
    }
}

struct ConstantField {
    components: Vec<f64>,
}

impl SmoothMap for ConstantField {
    fn eval<T: Real>(&self, _u: &[T]) -> Vec<T> {
        self.components.iter().map(|c| T::from_f64(*c)).collect()
    }
}

/// Parallel unit field along the first coordinate axis.
pub fn parallel_field(n: usize) -> Field {
    let mut components = vec![0.0; n];
    components[0] = 1.0;
    Field {
        name: "flat-parallel".into(),
        per_chart: vec![MapHandle::primitive(n, n, ConstantField { components })],
        declared_unit: true,
        sample_box: None,
    }
}

struct RadialField;

impl SmoothMap for RadialField {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let mut r2 = T::zero();
        for x in u {
            r2 = r2 + x.clone() * x.clone();
        }
        let inv_r = T::one() / r2.sqrt();
        u.iter().map(|x| x.clone() * inv_r.clone()).collect()
    }
}

/// Gradient of the distance-to-origin function, defined away from the origin.
pub fn radial_field(n: usize) -> Field {
    Field {
        name: "flat-radial".into(),
        per_chart: vec![MapHandle::primitive(n, n, RadialField)],
        declared_unit: true,
        sample_box: Some(vec![(0.4, 2.0); n]),
    }
}

struct HelicalField {
    a: f64,
    omega0: f64,
}

impl SmoothMap for HelicalField {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let theta = u[0].clone() * T::from_f64(self.a) + T::from_f64(self.omega0);
        vec![theta.sin(), -theta.cos()]
    }
}

/// Unit field on the plane rotating at constant rate along `x`; its integral
/// curves are the log-sine trajectories, and `a = 0` degenerates to a
/// parallel pencil.
pub fn flat_tg_field(a: f64, omega0: f64) -> Field {
    Field {
        name: format!("flat-tg:{a},{omega0}"),
        per_chart: vec![MapHandle::primitive(2, 2, HelicalField { a, omega0 })],
        declared_unit: true,
        sample_box: None,
    }
}
