//! Storable smooth maps evaluable at every derivative level.
//!
//! Charts and fields need their defining closures to run on plain floats and
//! on dual towers alike, but trait objects cannot carry generic methods. A
//! [`MapHandle`] therefore stores one monomorphized closure per tower level.
//! Primitive maps (written directly in coordinates) provide all five levels;
//! maps derived from Christoffel symbols burn two levels on their own inner
//! differentiation and stop at level two, which is exactly what the kernel
//! needs of a metric.

use std::sync::Arc;

use crate::jet::{Dual, Scalar, D1, D2, D3, D4};

/// A smooth map written in generic scalar arithmetic; usable at any level.
pub trait SmoothMap: Send + Sync + 'static {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T>;
}

/// A smooth map whose evaluation internally differentiates other maps twice,
/// so it is only usable up to second order itself.
pub trait DerivedMap: Send + Sync + 'static {
    fn eval<T>(&self, u: &[T]) -> Vec<T>
    where
        T: Real,
        Dual<T>: Real,
        Dual<Dual<T>>: Real;
}

type Level<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Type-erased smooth map with per-level entry points.
#[derive(Clone)]
pub struct MapHandle {
    pub dim_in: usize,
    pub dim_out: usize,
    d0: Level<f64>,
    d1: Level<D1>,
    d2: Level<D2>,
    d3: Option<Level<D3>>,
    d4: Option<Level<D4>>,
}

impl MapHandle {
    pub fn primitive<M: SmoothMap>(dim_in: usize, dim_out: usize, map: M) -> Self {
        let m = Arc::new(map);
        let (m0, m1, m2, m3, m4) = (m.clone(), m.clone(), m.clone(), m.clone(), m);
        MapHandle {
            dim_in,
            dim_out,
            d0: Arc::new(move |u| m0.eval(u)),
            d1: Arc::new(move |u| m1.eval(u)),
            d2: Arc::new(move |u| m2.eval(u)),
            d3: Some(Arc::new(move |u| m3.eval(u))),
            d4: Some(Arc::new(move |u| m4.eval(u))),
        }
    }

    pub fn derived<M: DerivedMap>(dim_in: usize, dim_out: usize, map: M) -> Self {
        let m = Arc::new(map);
        let (m0, m1, m2) = (m.clone(), m.clone(), m);
        MapHandle {
            dim_in,
            dim_out,
            d0: Arc::new(move |u| m0.eval(u)),
            d1: Arc::new(move |u| m1.eval(u)),
            d2: Arc::new(move |u| m2.eval(u)),
            d3: None,
            d4: None,
        }
    }

    /// True when the map supports the deep levels needed to build further
    /// derived maps on top of it.
    pub fn supports_deep(&self) -> bool {
        self.d3.is_some()
    }

    pub fn at<T: Real>(&self, u: &[T]) -> Vec<T> {
        debug_assert_eq!(u.len(), self.dim_in);
        T::eval_handle(self, u)
    }
}

/// Dispatch from a concrete tower level into the matching stored closure.
pub trait Real: Scalar {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self>;
}

impl Real for f64 {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self> {
        (h.d0)(u)
    }
}
impl Real for D1 {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self> {
        (h.d1)(u)
    }
}
impl Real for D2 {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self> {
        (h.d2)(u)
    }
}
impl Real for D3 {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self> {
        (h.d3
            .as_ref()
            .expect("map does not support third-order evaluation"))(u)
    }
}
impl Real for D4 {
    fn eval_handle(h: &MapHandle, u: &[Self]) -> Vec<Self> {
        (h.d4
            .as_ref()
            .expect("map does not support fourth-order evaluation"))(u)
    }
}

/// Value and Jacobian of a handle at a `T`-valued input.
pub fn value_and_jacobian<T>(h: &MapHandle, u: &[T]) -> (Vec<T>, Vec<T>)
where
    T: Real,
    Dual<T>: Real,
{
    let seeds = crate::jet::seed_first(u);
    let out = h.at::<Dual<T>>(&seeds);
    let n = u.len();
    let vals = out.iter().map(|d| d.val.clone()).collect();
    let mut jac = Vec::with_capacity(out.len() * n);
    for d in &out {
        for k in 0..n {
            jac.push(d.grad(k));
        }
    }
    (vals, jac)
}
