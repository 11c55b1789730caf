use serde::{Deserialize, Serialize};

use crate::{GeometryError, Result};

/// Default cap on the number of vertices a construction may allocate.
pub const DEFAULT_VERTEX_GUARD: u64 = 10_000_000;

/// The three self-similar families handled by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// d-dimensional l-level Sierpinski gasket.
    Sg,
    /// Two-dimensional Vicsek set (checkerboard of squares, odd side).
    Vs2d,
    /// Three-dimensional Vicsek set (checkerboard of cubes, odd side).
    Vs3d,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Sg => "sg",
            Family::Vs2d => "vs2d",
            Family::Vs3d => "vs3d",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Names one discrete model: family, ambient dimension, subdivision side and
/// approximation level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GasketSpec {
    pub family: Family,
    /// Ambient dimension d (>= 2; forced to 2 resp. 3 for the Vicsek families).
    pub dimension: u32,
    /// Side subdivision count l (>= 2; odd and >= 3 for the Vicsek families).
    pub side: u32,
    /// Approximation depth m (>= 0).
    pub level: u32,
    /// Vertex count guard; constructions fail predictably beyond it.
    #[serde(default = "default_guard")]
    pub vertex_guard: u64,
}

fn default_guard() -> u64 {
    DEFAULT_VERTEX_GUARD
}

impl GasketSpec {
    pub fn new(family: Family, dimension: u32, side: u32, level: u32) -> Result<Self> {
        let spec = GasketSpec {
            family,
            dimension,
            side,
            level,
            vertex_guard: DEFAULT_VERTEX_GUARD,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sg(dimension: u32, side: u32, level: u32) -> Result<Self> {
        Self::new(Family::Sg, dimension, side, level)
    }

    pub fn with_vertex_guard(mut self, guard: u64) -> Self {
        self.vertex_guard = guard;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            Family::Sg => {
                if self.dimension < 2 {
                    return Err(GeometryError::InvalidSpec(format!(
                        "sg requires dimension >= 2, got {}",
                        self.dimension
                    )));
                }
                if self.side < 2 {
                    return Err(GeometryError::InvalidSpec(format!(
                        "sg requires side >= 2, got {}",
                        self.side
                    )));
                }
            }
            Family::Vs2d | Family::Vs3d => {
                let want = if self.family == Family::Vs2d { 2 } else { 3 };
                if self.dimension != want {
                    return Err(GeometryError::InvalidSpec(format!(
                        "{} requires dimension {}, got {}",
                        self.family, want, self.dimension
                    )));
                }
                if self.side < 3 || self.side % 2 == 0 {
                    return Err(GeometryError::InvalidSpec(format!(
                        "{} requires odd side >= 3, got {}",
                        self.family, self.side
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of cells kept per subdivision step.
    pub fn cells_per_level(&self) -> Result<u64> {
        match self.family {
            Family::Sg => crate::count_cells(self.dimension, self.side),
            Family::Vs2d => {
                let l = self.side as u64;
                Ok((l * l + 1) / 2)
            }
            Family::Vs3d => {
                let n = (self.side as u64 - 1) / 2;
                Ok((n + 1).pow(3) + n.pow(3))
            }
        }
    }

    /// Total number of finest-level cells, `cells_per_level ^ level`.
    pub fn total_cells(&self) -> Result<u128> {
        let base = self.cells_per_level()? as u128;
        let mut total: u128 = 1;
        for _ in 0..self.level {
            total = total
                .checked_mul(base)
                .ok_or_else(|| GeometryError::ArithmeticOverflow("total cell count".into()))?;
        }
        Ok(total)
    }

    /// Corners of a single cell: d+1 for a simplex, 2^d for a cube.
    pub fn corners_per_cell(&self) -> usize {
        match self.family {
            Family::Sg => self.dimension as usize + 1,
            Family::Vs2d | Family::Vs3d => 1 << self.dimension,
        }
    }

    /// `side ^ level`, the integer coordinate scale of the finest vertices.
    pub fn coordinate_scale(&self) -> Result<i64> {
        let mut s: i64 = 1;
        for _ in 0..self.level {
            s = s
                .checked_mul(self.side as i64)
                .ok_or_else(|| GeometryError::ArithmeticOverflow("coordinate scale".into()))?;
        }
        Ok(s)
    }

    pub(crate) fn check_guard(&self) -> Result<()> {
        let cells = self.total_cells()?;
        let corners = cells
            .checked_mul(self.corners_per_cell() as u128)
            .ok_or_else(|| GeometryError::ArithmeticOverflow("corner count".into()))?;
        // The deduplicated vertex count is bounded by the raw corner stream.
        if cells > self.vertex_guard as u128 || corners > 4 * self.vertex_guard as u128 {
            return Err(GeometryError::MemoryGuard {
                actual: corners,
                guard: self.vertex_guard as u128,
            });
        }
        Ok(())
    }
}

/// Per-cell conductance assignment used by [`crate::build_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConductanceScheme {
    /// Every pair within a simplex cell gets conductance 1.
    SgUnit,
    /// Every pair within a simplex cell gets conductance 2/(d+1), so that the
    /// single-cell pair resistance is 1.
    SgForm,
    /// Square cells: sides at conductance 1, the two diagonals at `diagonal`.
    Vs2d { diagonal: f64 },
    /// Cube cells: edges at 1, face diagonals at `face`, long diagonals at `long`.
    Vs3d { face: f64, long: f64 },
}

impl ConductanceScheme {
    pub fn name(&self) -> &'static str {
        match self {
            ConductanceScheme::SgUnit => "sg-unit",
            ConductanceScheme::SgForm => "sg-form",
            ConductanceScheme::Vs2d { .. } => "vs2d",
            ConductanceScheme::Vs3d { .. } => "vs3d",
        }
    }

    pub(crate) fn check_for(&self, spec: &GasketSpec) -> Result<()> {
        let ok = matches!(
            (self, spec.family),
            (ConductanceScheme::SgUnit, Family::Sg)
                | (ConductanceScheme::SgForm, Family::Sg)
                | (ConductanceScheme::Vs2d { .. }, Family::Vs2d)
                | (ConductanceScheme::Vs3d { .. }, Family::Vs3d)
        );
        if !ok {
            return Err(GeometryError::SchemeMismatch {
                scheme: self.name().into(),
                family: spec.family.to_string(),
            });
        }
        for c in self.parameters() {
            if !(c > 0.0) || !c.is_finite() {
                return Err(GeometryError::NonPositiveConductance(c));
            }
        }
        Ok(())
    }

    fn parameters(&self) -> Vec<f64> {
        match self {
            ConductanceScheme::SgUnit | ConductanceScheme::SgForm => vec![],
            ConductanceScheme::Vs2d { diagonal } => vec![*diagonal],
            ConductanceScheme::Vs3d { face, long } => vec![*face, *long],
        }
    }

    /// Conductance between two corners of one cell, given the number of
    /// coordinates in which they differ (always full for simplex corners).
    pub(crate) fn pair_conductance(&self, dimension: u32, hamming: u32) -> f64 {
        match self {
            ConductanceScheme::SgUnit => 1.0,
            ConductanceScheme::SgForm => 2.0 / (dimension as f64 + 1.0),
            ConductanceScheme::Vs2d { diagonal } => {
                if hamming == 1 {
                    1.0
                } else {
                    *diagonal
                }
            }
            ConductanceScheme::Vs3d { face, long } => match hamming {
                1 => 1.0,
                2 => *face,
                _ => *long,
            },
        }
    }

    /// Exact rational value (numerator, denominator) of a uniform scheme, when
    /// one exists; used by the serializer.
    pub fn rational_conductance(&self, dimension: u32) -> Option<(u64, u64)> {
        match self {
            ConductanceScheme::SgUnit => Some((1, 1)),
            ConductanceScheme::SgForm => {
                let d = dimension as u64 + 1;
                let g = gcd(2, d);
                Some((2 / g, d / g))
            }
            _ => None,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vicsek_specs_enforce_dimension_and_parity() {
        assert!(GasketSpec::new(Family::Vs2d, 2, 3, 1).is_ok());
        assert!(GasketSpec::new(Family::Vs2d, 3, 3, 1).is_err());
        assert!(GasketSpec::new(Family::Vs2d, 2, 4, 1).is_err());
        assert!(GasketSpec::new(Family::Vs3d, 3, 5, 1).is_ok());
        assert!(GasketSpec::new(Family::Vs3d, 3, 2, 1).is_err());
    }

    #[test]
    fn sg_spec_bounds() {
        assert!(GasketSpec::sg(2, 2, 0).is_ok());
        assert!(GasketSpec::sg(1, 2, 0).is_err());
        assert!(GasketSpec::sg(2, 1, 0).is_err());
    }

    #[test]
    fn cell_counts_per_level() {
        assert_eq!(
            GasketSpec::sg(2, 2, 1).unwrap().cells_per_level().unwrap(),
            3
        );
        let vs2 = GasketSpec::new(Family::Vs2d, 2, 3, 1).unwrap();
        assert_eq!(vs2.cells_per_level().unwrap(), 5);
        let vs3 = GasketSpec::new(Family::Vs3d, 3, 3, 1).unwrap();
        assert_eq!(vs3.cells_per_level().unwrap(), 9);
    }

    #[test]
    fn guard_rejects_huge_levels() {
        let spec = GasketSpec::sg(2, 4, 10).unwrap();
        assert!(matches!(
            spec.check_guard(),
            Err(GeometryError::MemoryGuard { .. })
        ));
        let ok = GasketSpec::sg(2, 4, 10)
            .unwrap()
            .with_vertex_guard(u64::MAX / 8);
        assert!(ok.check_guard().is_ok());
    }
}
