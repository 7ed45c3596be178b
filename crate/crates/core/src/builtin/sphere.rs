//! Round unit spheres in two stereographic charts, ambient-defined fields,
//! and the odd-sphere rotation field tangent to the Hopf fibration.

use std::sync::Arc;

use crate::geometry::{Chart, Domain, Field, Manifold, ManifoldKind, Transition};
use crate::jet::Scalar;
use crate::smooth::{value_and_jacobian, MapHandle, Real, SmoothMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pole {
    North,
    South,
}

/// Chart coordinates -> ambient point of the unit sphere.
pub fn embed<T: Scalar>(pole: Pole, u: &[T]) -> Vec<T> {
    let mut norm2 = T::zero();
    for x in u {
        norm2 = norm2 + x.clone() * x.clone();
    }
    let denom = T::one() / (norm2.clone() + T::one());
    let mut out: Vec<T> = u
        .iter()
        .map(|x| T::from_f64(2.0) * x.clone() * denom.clone())
        .collect();
    let last = match pole {
        Pole::North => (norm2 - T::one()) * denom,
        Pole::South => (T::one() - norm2) * denom,
    };
    out.push(last);
    out
}

/// Differential of the stereographic projection at an ambient point `x`,
/// applied to an ambient vector `w` tangent to the sphere.
pub fn project_differential<T: Scalar>(pole: Pole, x: &[T], w: &[T]) -> Vec<T> {
    let n = x.len() - 1;
    let (denom, sign) = match pole {
        Pole::North => (T::one() - x[n].clone(), T::one()),
        Pole::South => (T::one() + x[n].clone(), -T::one()),
    };
    let inv2 = T::one() / (denom.clone() * denom.clone());
    (0..n)
        .map(|i| {
            (w[i].clone() * denom.clone() + sign.clone() * x[i].clone() * w[n].clone())
                * inv2.clone()
        })
        .collect()
}

struct RoundMetric {
    n: usize,
}

impl SmoothMap for RoundMetric {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let n = self.n;
        let mut norm2 = T::zero();
        for x in u {
            norm2 = norm2 + x.clone() * x.clone();
        }
        let s = norm2 + T::one();
        let factor = T::from_f64(4.0) / (s.clone() * s);
        (0..n * n)
            .map(|k| {
                if k % (n + 1) == 0 {
                    factor.clone()
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}

struct InverseRadius;

impl SmoothMap for InverseRadius {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let mut norm2 = T::zero();
        for x in u {
            norm2 = norm2 + x.clone() * x.clone();
        }
        let inv = T::one() / norm2;
        u.iter().map(|x| x.clone() * inv.clone()).collect()
    }
}

/// Unit sphere `S^n` as two stereographic charts glued by `u -> u/|u|^2`.
pub fn make_sphere(n: usize) -> Manifold {
    assert!(n >= 2);
    let chart = |name: &str| {
        Chart::new(
            name,
            n,
            Domain::unbounded(n),
            vec![(-1.2, 1.2); n],
            MapHandle::primitive(n, n * n, RoundMetric { n }),
        )
    };
    let overlap = |u: &[f64]| {
        let r2: f64 = u.iter().map(|x| x * x).sum();
        r2 > 1e-6
    };
    let transition = |from: usize, to: usize| Transition {
        from,
        to,
        map: MapHandle::primitive(n, n, InverseRadius),
        on_overlap: Box::new(overlap),
    };
    Manifold {
        name: format!("sphere:{n}"),
        kind: ManifoldKind::UnitSphere,
        charts: vec![chart("north"), chart("south")],
        transitions: vec![transition(0, 1), transition(1, 0)],
    }
}

/// An ambient-space vector map together with its pushforward into the
/// stereographic charts. For sphere fields the map must be tangent
/// (`<F(x), x> = 0`) and unit along the sphere.
pub struct AmbientField {
    pub name: String,
    pub map: MapHandle,
}

struct ChartPushforward {
    pole: Pole,
    ambient: MapHandle,
}

impl SmoothMap for ChartPushforward {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let x = embed(self.pole, u);
        let w = self.ambient.at(&x);
        project_differential(self.pole, &x, &w)
    }
}

impl AmbientField {
    pub fn into_field(self, n: usize, declared_unit: bool) -> Field {
        let north = ChartPushforward {
            pole: Pole::North,
            ambient: self.map.clone(),
        };
        let south = ChartPushforward {
            pole: Pole::South,
            ambient: self.map,
        };
        Field {
            name: self.name,
            per_chart: vec![
                MapHandle::primitive(n, n, north),
                MapHandle::primitive(n, n, south),
            ],
            declared_unit,
            sample_box: None,
        }
    }
}

struct PairRotation;

impl SmoothMap for PairRotation {
    fn eval<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(x.len());
        for pair in x.chunks(2) {
            out.push(-pair[1].clone());
            out.push(pair[0].clone());
        }
        out
    }
}

/// The unit Killing field `x -> (-x_2, x_1, -x_4, x_3, ...)` on `S^{2m+1}`,
/// pushed into both stereographic charts.
pub fn hopf_field(m: usize) -> Field {
    assert!(m >= 1);
    let n = 2 * m + 1;
    let ambient = AmbientField {
        name: format!("hopf:{m}"),
        map: MapHandle::primitive(n + 1, n + 1, PairRotation),
    };
    ambient.into_field(n, true)
}

/// Ambient vector recovered from chart components (differential of `embed`);
/// used to check that pushforward and pullback round-trip.
pub fn push_to_ambient(pole: Pole, u: &[f64], v: &[f64]) -> Vec<f64> {
    struct Embed {
        pole: Pole,
    }
    impl SmoothMap for Embed {
        fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
            embed(self.pole, u)
        }
    }
    let n = u.len();
    let h = MapHandle::primitive(n, n + 1, Embed { pole });
    let (_, jac) = value_and_jacobian(&h, u);
    (0..n + 1)
        .map(|i| (0..n).map(|k| jac[i * n + k] * v[k]).sum())
        .collect()
}

pub fn sphere_ref(n: usize) -> Arc<Manifold> {
    Arc::new(make_sphere(n))
}
