//! Concrete manifolds and unit fields, plus the name registry the CLI and
//! suites resolve keys through.
//!
//! Keys: `flat:n`, `sphere:n`, `warped:a,alpha0` for manifolds;
//! `flat-parallel`, `flat-radial`, `flat-tg:a,omega0`, `hopf:m`,
//! `tg2d:a,omega0` for fields.

pub mod flat;
pub mod sphere;
pub mod warped;

use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::geometry::{Field, Manifold};
use crate::smooth::{MapHandle, Real, SmoothMap};

pub use flat::{flat_space, flat_tg_field, parallel_field, radial_field};
pub use sphere::{hopf_field, make_sphere, AmbientField, Pole};
pub use warped::{
    make_warped_surface, make_warped_surface_with_step, warped_unit_field, WarpedSurfaceSpec,
};

struct NormalizedCoordinate {
    metric: MapHandle,
    axis: usize,
    n: usize,
}

impl SmoothMap for NormalizedCoordinate {
    fn eval<T: Real>(&self, u: &[T]) -> Vec<T> {
        let g = self.metric.at(u);
        let inv = T::one() / g[self.axis * (self.n + 1)].sqrt();
        (0..self.n)
            .map(|i| {
                if i == self.axis {
                    inv.clone()
                } else {
                    T::zero()
                }
            })
            .collect()
    }
}

/// Locally defined unit field along one coordinate axis, normalized by the
/// chart metric; available on every manifold.
pub fn normalized_coordinate_field(m: &Manifold, axis: usize) -> Field {
    let per_chart = m
        .charts
        .iter()
        .map(|c| {
            assert!(axis < c.dim);
            MapHandle::primitive(
                c.dim,
                c.dim,
                NormalizedCoordinate {
                    metric: c.metric.clone(),
                    axis,
                    n: c.dim,
                },
            )
        })
        .collect();
    Field {
        name: format!("coord-unit:{axis}"),
        per_chart,
        declared_unit: true,
        sample_box: None,
    }
}

/// A resolved manifold key, keeping the parameters fields may validate
/// against.
pub enum BuiltinManifold {
    Flat { n: usize },
    Sphere { n: usize },
    Warped(WarpedSurfaceSpec),
}

fn parse_floats(spec: &str, key: &str, want: usize) -> Result<Vec<f64>> {
    let parts: Vec<_> = spec.split(',').collect();
    if parts.len() != want {
        return Err(GeomError::UnknownRegistryKey(key.to_string()));
    }
    parts
        .iter()
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| GeomError::UnknownRegistryKey(key.to_string()))
        })
        .collect()
}

pub fn parse_manifold(key: &str) -> Result<BuiltinManifold> {
    let bad = || GeomError::UnknownRegistryKey(key.to_string());
    let (head, rest) = key.split_once(':').ok_or_else(bad)?;
    match head {
        "flat" => {
            let n: usize = rest.trim().parse().map_err(|_| bad())?;
            if n < 1 {
                return Err(bad());
            }
            Ok(BuiltinManifold::Flat { n })
        }
        "sphere" => {
            let n: usize = rest.trim().parse().map_err(|_| bad())?;
            if n < 2 {
                return Err(bad());
            }
            Ok(BuiltinManifold::Sphere { n })
        }
        "warped" => {
            let v = parse_floats(rest, key, 2)?;
            Ok(BuiltinManifold::Warped(make_warped_surface(v[0], v[1])?))
        }
        _ => Err(bad()),
    }
}

impl BuiltinManifold {
    pub fn build(&self) -> Arc<Manifold> {
        match self {
            BuiltinManifold::Flat { n } => Arc::new(flat_space(*n)),
            BuiltinManifold::Sphere { n } => Arc::new(make_sphere(*n)),
            BuiltinManifold::Warped(spec) => Arc::new(spec.manifold()),
        }
    }
}

pub fn parse_field(key: &str, on: &BuiltinManifold, manifold: &Manifold) -> Result<Field> {
    let bad = || GeomError::UnknownRegistryKey(key.to_string());
    let mismatch = |msg: &str| GeomError::BadConfig(format!("{key}: {msg}"));
    let (head, rest) = key.split_once(':').unwrap_or((key, ""));
    match head {
        "coord-unit" => {
            let axis: usize = rest.trim().parse().map_err(|_| bad())?;
            if axis >= manifold.dim() {
                return Err(mismatch("axis out of range"));
            }
            Ok(normalized_coordinate_field(manifold, axis))
        }
        "flat-parallel" => match on {
            BuiltinManifold::Flat { n } => Ok(parallel_field(*n)),
            _ => Err(mismatch("requires a flat manifold")),
        },
        "flat-radial" => match on {
            BuiltinManifold::Flat { n } => Ok(radial_field(*n)),
            _ => Err(mismatch("requires a flat manifold")),
        },
        "flat-tg" => {
            let v = parse_floats(rest, key, 2)?;
            match on {
                BuiltinManifold::Flat { n: 2 } => Ok(flat_tg_field(v[0], v[1])),
                _ => Err(mismatch("requires flat:2")),
            }
        }
        "hopf" => {
            let m: usize = rest.trim().parse().map_err(|_| bad())?;
            if m < 1 {
                return Err(bad());
            }
            match on {
                BuiltinManifold::Sphere { n } if *n == 2 * m + 1 => Ok(hopf_field(m)),
                _ => Err(mismatch(&format!("requires sphere:{}", 2 * m + 1))),
            }
        }
        "tg2d" => {
            let v = parse_floats(rest, key, 2)?;
            match on {
                BuiltinManifold::Warped(spec) => {
                    if (spec.a - v[0]).abs() > 1e-12 {
                        return Err(mismatch("field parameter a must match the surface"));
                    }
                    Ok(warped_unit_field(spec, v[1]))
                }
                _ => Err(mismatch("requires a warped surface")),
            }
        }
        _ => Err(bad()),
    }
}

/// Resolve a manifold/field key pair into usable objects.
pub fn resolve(manifold_key: &str, field_key: &str) -> Result<(Arc<Manifold>, Field)> {
    let builtin = parse_manifold(manifold_key)?;
    let manifold = builtin.build();
    let field = parse_field(field_key, &builtin, &manifold)?;
    Ok((manifold, field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel;
    use crate::suite::sample_points;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn declared_unit_fields_are_unit_everywhere() {
        let pairs = [
            ("flat:2", "flat-parallel"),
            ("flat:2", "flat-radial"),
            ("flat:2", "flat-tg:0.7,0.3"),
            ("sphere:3", "hopf:1"),
            ("sphere:2", "coord-unit:0"),
            ("warped:0.5,0.7853981633974483", "tg2d:0.5,0.4"),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (mk, fk) in pairs {
            let (m, f) = resolve(mk, fk).unwrap();
            assert!(f.declared_unit);
            let mut worst = 0.0f64;
            for p in sample_points(&m, Some(&f), 0, 1000, &mut rng) {
                let v = f.at(&p);
                worst = worst.max((kernel::norm(&m, &p, &v.components).unwrap() - 1.0).abs());
            }
            assert!(worst < 1e-10, "{mk}/{fk}: unit defect {worst:e}");
        }
    }

    #[test]
    fn registry_resolves_known_pairs() {
        assert!(resolve("flat:2", "flat-parallel").is_ok());
        assert!(resolve("flat:2", "flat-tg:1,0").is_ok());
        assert!(resolve("sphere:3", "hopf:1").is_ok());
    }

    #[test]
    fn registry_rejects_unknown_and_mismatched() {
        assert!(matches!(
            resolve("torus:2", "flat-parallel"),
            Err(GeomError::UnknownRegistryKey(_))
        ));
        assert!(matches!(
            resolve("sphere:2", "hopf:1"),
            Err(GeomError::BadConfig(_))
        ));
        assert!(matches!(
            resolve("flat:3", "flat-tg:1,0"),
            Err(GeomError::BadConfig(_))
        ));
    }
}
