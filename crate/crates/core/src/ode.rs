//! Fixed-step classical Runge-Kutta integration: the warped-surface angle
//! ODE `alpha' = 1 - (a+1)/cos(alpha)`, integral curves of vector fields,
//! and the closed-form flat trajectories they are checked against.

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::geometry::{Field, Manifold, Point};
use crate::jet::{Dual, Scalar};
use crate::linalg;

/// Margin kept from both ODE singularities: `cos(alpha) = 0` blows up the
/// right side, `sin(alpha) = 0` degenerates the surface metric.
pub const SINGULARITY_GUARD: f64 = 0.05;
/// Hard cap per integration direction; the ODE has an interior equilibrium
/// for some parameters and would otherwise never meet a guard.
pub const MAX_SPAN: f64 = 1.5;
/// Default integration step for stand-alone use.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug)]
struct AlphaNode {
    alpha: f64,
    d1: f64,
    d2: f64,
}

/// Dense table of the angle solution with first and second derivatives at
/// every node, interpolated by quintic Hermite polynomials so evaluations
/// stay smooth through two derivative levels.
pub struct AlphaTable {
    pub a: f64,
    pub step: f64,
    origin: usize,
    nodes: Vec<AlphaNode>,
}

fn alpha_rhs(a: f64, alpha: f64) -> f64 {
    1.0 - (a + 1.0) / alpha.cos()
}

fn alpha_second(a: f64, alpha: f64, d1: f64) -> f64 {
    let c = alpha.cos();
    -(a + 1.0) * alpha.sin() * d1 / (c * c)
}

fn within_guards(alpha: f64) -> bool {
    alpha.cos().abs() >= SINGULARITY_GUARD && alpha.sin().abs() >= SINGULARITY_GUARD
}

fn rk4_scalar(a: f64, alpha: f64, h: f64) -> f64 {
    let k1 = alpha_rhs(a, alpha);
    let k2 = alpha_rhs(a, alpha + 0.5 * h * k1);
    let k3 = alpha_rhs(a, alpha + 0.5 * h * k2);
    let k4 = alpha_rhs(a, alpha + h * k3);
    alpha + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Derivatives of the right side `F(alpha) = 1 - (a+1)/cos(alpha)` up to
/// fourth order, through a univariate dual tower.
fn rhs_derivatives(a: f64, alpha: f64) -> [f64; 5] {
    type U4 = Dual<Dual<Dual<Dual<f64>>>>;
    let v1 = Dual {
        val: alpha,
        dx: vec![1.0],
    };
    let v2 = Dual {
        val: v1,
        dx: vec![Dual::constant(1.0)],
    };
    let v3 = Dual {
        val: v2,
        dx: vec![Dual::constant(Dual::constant(1.0))],
    };
    let x = Dual {
        val: v3,
        dx: vec![Dual::constant(Dual::constant(Dual::constant(1.0)))],
    };
    let f = U4::from_f64(1.0) - U4::from_f64(a + 1.0) / x.cos();
    [
        f.re(),
        f.val.val.val.grad(0),
        f.val.val.grad(0).grad(0),
        f.val.grad(0).grad(0).grad(0),
        f.grad(0).grad(0).grad(0).grad(0),
    ]
}

/// Taylor coefficients of the solution around a node value, from the chain
/// rule applied to the autonomous ODE.
fn taylor_coefficients(a: f64, alpha: f64) -> [f64; 6] {
    let [f0, f1, f2, f3, f4] = rhs_derivatives(a, alpha);
    let d1 = f0;
    let d2 = f1 * d1;
    let d3 = f2 * d1 * d1 + f1 * d2;
    let d4 = f3 * d1.powi(3) + 3.0 * f2 * d1 * d2 + f1 * d3;
    let d5 = f4 * d1.powi(4)
        + 6.0 * f3 * d1 * d1 * d2
        + 3.0 * f2 * d2 * d2
        + 4.0 * f2 * d1 * d3
        + f1 * d4;
    [alpha, d1, d2 / 2.0, d3 / 6.0, d4 / 24.0, d5 / 120.0]
}

/// Integrate the angle ODE in both directions from `u = 0` until a guard or
/// the span cap triggers.
pub fn integrate_alpha(a: f64, alpha0: f64, h: f64) -> Result<AlphaTable> {
    if !(alpha0.cos().abs() > SINGULARITY_GUARD && alpha0.sin().abs() > SINGULARITY_GUARD) {
        return Err(GeomError::ImmediateSingularity);
    }
    assert!(h > 0.0 && h.is_finite());
    let node = |alpha: f64| {
        let d1 = alpha_rhs(a, alpha);
        AlphaNode {
            alpha,
            d1,
            d2: alpha_second(a, alpha, d1),
        }
    };
    let max_steps = (MAX_SPAN / h).round() as usize;

    let march = |dir: f64| {
        let mut out = Vec::new();
        let mut alpha = alpha0;
        for _ in 0..max_steps {
            let next = rk4_scalar(a, alpha, dir * h);
            if !within_guards(next) {
                break;
            }
            out.push(node(next));
            alpha = next;
        }
        out
    };

    let backward = march(-1.0);
    let forward = march(1.0);
    let origin = backward.len();
    let mut nodes: Vec<AlphaNode> = backward.into_iter().rev().collect();
    nodes.push(node(alpha0));
    nodes.extend(forward);
    log::debug!(
        "alpha table: a={a}, alpha0={alpha0}, h={h}, {} nodes, u in [{}, {}]",
        nodes.len(),
        -(origin as f64) * h,
        (nodes.len() - 1 - origin) as f64 * h,
    );
    Ok(AlphaTable {
        a,
        step: h,
        origin,
        nodes,
    })
}

impl AlphaTable {
    pub fn u_min(&self) -> f64 {
        -(self.origin as f64) * self.step
    }

    pub fn u_max(&self) -> f64 {
        (self.nodes.len() - 1 - self.origin) as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn u_of(&self, i: usize) -> f64 {
        (i as f64 - self.origin as f64) * self.step
    }

    /// Node data `(u, alpha, alpha', alpha'')`.
    pub fn node(&self, i: usize) -> (f64, f64, f64, f64) {
        let n = &self.nodes[i];
        (self.u_of(i), n.alpha, n.d1, n.d2)
    }

    /// Dense evaluation in any scalar arithmetic: degree-5 Taylor expansion
    /// from the nearest node, with coefficients derived exactly from the
    /// ODE. A value-interpolating form (e.g. Hermite) is unusable here: its
    /// second derivative carries an eps*|alpha|/h^2 round-off floor, which
    /// at fine steps dwarfs the curvature-grade accuracy this table feeds.
    pub fn eval<T: Scalar>(&self, u: &T) -> T {
        let ur = u.re();
        let rel = (ur - self.u_min()) / self.step;
        let i = (rel.round() as isize).clamp(0, self.nodes.len() as isize - 1) as usize;
        let c = taylor_coefficients(self.a, self.nodes[i].alpha);
        let du = u.clone() - T::from_f64(self.u_of(i));
        // Horner in (u - u_i)
        let mut acc = T::from_f64(c[5]);
        for k in (0..5).rev() {
            acc = acc * du.clone() + T::from_f64(c[k]);
        }
        acc
    }

    /// Largest residual `alpha' - (1 - (a+1)/cos(alpha))` over the nodes.
    pub fn max_node_residual(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| (n.d1 - alpha_rhs(self.a, n.alpha)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,alpha,alpha_prime,alpha_second\r\n");
        for i in 0..self.nodes.len() {
            let (u, a, d1, d2) = self.node(i);
            out.push_str(&format!("{u},{a},{d1},{d2}\r\n"));
        }
        out
    }
}

pub type AlphaTableRef = Arc<AlphaTable>;

/// Integral curve of a field, reported as arc-length samples.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<(f64, Point)>,
    /// Set when the curve left the chart before reaching the requested length.
    pub truncated: bool,
}

impl Trajectory {
    pub fn start(&self) -> &Point {
        &self.samples[0].1
    }

    pub fn end(&self) -> &Point {
        &self.samples[self.samples.len() - 1].1
    }

    /// Metric speeds of consecutive segments, measured at segment midpoints.
    pub fn segment_speeds(&self, m: &Manifold) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for w in self.samples.windows(2) {
            let (t0, p0) = &w[0];
            let (t1, p1) = &w[1];
            let mid = Point::new(
                p0.chart,
                p0.coords
                    .iter()
                    .zip(&p1.coords)
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect(),
            );
            let v: Vec<f64> = linalg::scale(1.0 / (t1 - t0), &linalg::sub(&p1.coords, &p0.coords));
            out.push(crate::kernel::norm(m, &mid, &v)?);
        }
        Ok(out)
    }

    pub fn to_csv(&self, extra: Option<(&str, &dyn Fn(&Point) -> f64)>) -> String {
        let dim = self.samples[0].1.coords.len();
        let mut header = String::from("t");
        for i in 1..=dim {
            header.push_str(&format!(",u{i}"));
        }
        if let Some((name, _)) = extra {
            header.push(',');
            header.push_str(name);
        }
        let mut out = header;
        out.push_str("\r\n");
        for (t, p) in &self.samples {
            out.push_str(&format!("{t}"));
            for c in &p.coords {
                out.push_str(&format!(",{c}"));
            }
            if let Some((_, f)) = extra {
                out.push_str(&format!(",{}", f(p)));
            }
            out.push_str("\r\n");
        }
        out
    }
}

/// RK4 on `dp/dt = xi(p)` with fixed step, truncating at the chart boundary.
/// The step is nudged so an integer number of steps lands exactly on the
/// requested length.
pub fn integral_curve(
    m: &Manifold,
    xi: &Field,
    p0: &Point,
    length: f64,
    h: f64,
) -> Result<Trajectory> {
    m.check_point(p0)?;
    let chart = m.chart(p0.chart);
    let map = xi.map_for(p0.chart);
    let rhs = |u: &[f64]| map.at::<f64>(u);
    let steps = (length / h).round().max(1.0) as usize;
    let h = length / steps as f64;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut u = p0.coords.clone();
    samples.push((0.0, p0.clone()));
    let mut truncated = false;
    for k in 1..=steps {
        let k1 = rhs(&u);
        let k2 = rhs(&linalg::axpy(0.5 * h, &k1, &u));
        let k3 = rhs(&linalg::axpy(0.5 * h, &k2, &u));
        let k4 = rhs(&linalg::axpy(h, &k3, &u));
        let mut next = u.clone();
        for i in 0..u.len() {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !chart.domain.contains(&next) {
            truncated = true;
            break;
        }
        samples.push((k as f64 * h, Point::new(p0.chart, next.clone())));
        u = next;
    }
    Ok(Trajectory { samples, truncated })
}

/// Closed-form flat trajectory `y(x) = -ln|sin(a x)|/a + c` (the `a = 0`
/// pencil case is the vertical line `x = c` and has no `y(x)` branch).
pub fn flat_trajectory_closed_form(a: f64, c: f64, x: f64) -> Result<f64> {
    if a == 0.0 {
        return Err(GeomError::ZeroParameter);
    }
    let s = (a * x).sin();
    if s == 0.0 {
        return Err(GeomError::SingularAbscissa);
    }
    Ok(-s.abs().ln() / a + c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{seed_second, D2};
    use approx::assert_relative_eq;

    #[test]
    fn constant_rhs_is_exact() {
        // a = -1 makes the right side identically 1, so alpha = alpha0 + u.
        let t = integrate_alpha(-1.0, std::f64::consts::FRAC_PI_4, 1e-3).unwrap();
        for i in (0..t.len()).step_by(97) {
            let (u, alpha, d1, d2) = t.node(i);
            assert_relative_eq!(alpha, std::f64::consts::FRAC_PI_4 + u, epsilon = 1e-13);
            assert_relative_eq!(d1, 1.0, epsilon = 1e-14);
            assert_relative_eq!(d2, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn node_residual_vanishes_by_construction() {
        let t = integrate_alpha(0.5, std::f64::consts::FRAC_PI_4, 1e-3).unwrap();
        assert!(t.max_node_residual() < 1e-10);
    }

    #[test]
    fn guards_hold_on_all_nodes() {
        let t = integrate_alpha(0.5, std::f64::consts::FRAC_PI_4, 1e-3).unwrap();
        for i in 0..t.len() {
            let (_, alpha, _, _) = t.node(i);
            assert!(alpha.cos().abs() >= SINGULARITY_GUARD - 1e-12);
            assert!(alpha.sin().abs() >= SINGULARITY_GUARD - 1e-12);
        }
    }

    #[test]
    fn immediate_singularity_detected() {
        assert!(matches!(
            integrate_alpha(0.5, std::f64::consts::FRAC_PI_2, 1e-3),
            Err(GeomError::ImmediateSingularity)
        ));
        assert!(matches!(
            integrate_alpha(0.5, 0.01, 1e-3),
            Err(GeomError::ImmediateSingularity)
        ));
    }

    #[test]
    fn step_halving_shows_fourth_order() {
        // Coarse steps so truncation error dominates round-off. Comparing
        // h and h/2 against h/4 at a shared node gives
        // e1/e2 = (1 - 1/256)/(1/16 - 1/256) = 17 for a fourth-order method.
        let sol = |h: f64| integrate_alpha(0.4, 0.9, h).unwrap();
        let (c, f, ff) = (sol(0.02), sol(0.01), sol(0.005));
        let reach = c.u_max().min(f.u_max()).min(ff.u_max()) * 0.9;
        let u = (reach / 0.02).floor() * 0.02;
        let e1 = (c.eval(&u) - ff.eval(&u)).abs();
        let e2 = (f.eval(&u) - ff.eval(&u)).abs();
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "step-halving ratio {ratio}");
    }

    #[test]
    fn dense_output_reproduces_nodes_and_derivatives() {
        let t = integrate_alpha(0.5, std::f64::consts::FRAC_PI_4, 1e-3).unwrap();
        // Interior node: evaluate with second-order jets and compare stored data.
        let i = t.len() / 2;
        let (u, alpha, d1, d2) = t.node(i);
        let seeds = seed_second(&[u + 1e-12]);
        let r: D2 = t.eval(&seeds[0]);
        assert_relative_eq!(r.val.val, alpha, epsilon = 1e-12);
        assert_relative_eq!(r.val.dx[0], d1, epsilon = 1e-10);
        assert_relative_eq!(r.dx[0].dx[0], d2, epsilon = 1e-8);
    }

    #[test]
    fn taylor_coefficients_match_divided_differences() {
        // Cross-check the chain-rule coefficients against the solution
        // itself: alpha(u0 + s) - series(s) should shrink at order 6.
        let t = integrate_alpha(0.4, 0.9, 1e-4).unwrap();
        let mid = t.len() / 2;
        let (u0, _, _, _) = t.node(mid);
        for s in [2e-3, 1e-3] {
            let exact = t.eval(&(u0 + s));
            let c = taylor_coefficients(t.a, t.eval(&u0));
            let mut acc = 0.0;
            for k in (0..6).rev() {
                acc = acc * s + c[k];
            }
            // order-5 series truncation plus the round-off floor
            let bound = (50.0 * s.powi(6)).max(1e-15);
            assert!(
                (exact - acc).abs() < bound,
                "s={s}: {:e}",
                (exact - acc).abs()
            );
        }
    }

    #[test]
    fn interpolation_matches_half_step_table() {
        // At the surface-table step: the stiff edge near the cos guard
        // dominates the global error, so the bound must hold there too.
        let coarse = integrate_alpha(0.5, std::f64::consts::FRAC_PI_4, 2e-4).unwrap();
        let fine = integrate_alpha(0.5, std::f64::consts::FRAC_PI_4, 1e-4).unwrap();
        let lo = coarse.u_min().max(fine.u_min());
        let hi = coarse.u_max().min(fine.u_max());
        for k in 0..200 {
            let u = lo + (hi - lo) * (k as f64 + 0.5) / 200.0;
            assert!((coarse.eval(&u) - fine.eval(&u)).abs() < 1e-7);
        }
    }

    #[test]
    fn curve_truncates_at_chart_boundary() {
        let spec = crate::builtin::make_warped_surface(0.5, std::f64::consts::FRAC_PI_4).unwrap();
        let m = spec.manifold();
        let f = crate::builtin::warped_unit_field(&spec, 0.0);
        // omega0 = 0, v0 = 0: the curve marches straight along u and must
        // leave the chart well before length 10.
        let u0 = spec.u_range.0 + 0.9 * (spec.u_range.1 - spec.u_range.0);
        let traj = integral_curve(&m, &f, &Point::on(&[u0, 0.0]), 10.0, 1e-3).unwrap();
        assert!(traj.truncated);
        let (t_last, last) = traj.samples.last().unwrap();
        assert!(*t_last < 10.0);
        assert!(m.chart(0).domain.contains(&last.coords));
    }

    #[test]
    fn closed_form_values() {
        // ln|sin(pi/2)| = 0.
        let y = flat_trajectory_closed_form(1.0, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(y, 0.0, epsilon = 1e-15);
        // Divergence approaching a pencil line.
        let y = flat_trajectory_closed_form(1.0, 0.0, 1e-9).unwrap();
        assert!(y > 10.0);
        assert!(matches!(
            flat_trajectory_closed_form(0.0, 0.0, 1.0),
            Err(GeomError::ZeroParameter)
        ));
        assert!(matches!(
            flat_trajectory_closed_form(1.0, 0.0, 0.0),
            Err(GeomError::SingularAbscissa)
        ));
    }
}
