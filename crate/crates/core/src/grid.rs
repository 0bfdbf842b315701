//! One-dimensional sampling lattices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingLaw {
    Uniform,
    Logarithmic,
}

/// Strictly increasing radii, all > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    law: SpacingLaw,
    points: Vec<f64>,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, count: usize, law: SpacingLaw) -> Result<Self> {
        if !(r_min.is_finite() && r_min > 0.0) {
            return Err(Error::Grid(format!("r_min must be > 0 (got {r_min})")));
        }
        if !(r_max.is_finite() && r_max > r_min) {
            return Err(Error::Grid(format!(
                "r_max must be finite and > r_min (got r_min = {r_min}, r_max = {r_max})"
            )));
        }
        if count < 3 {
            return Err(Error::Grid(format!("count must be >= 3 (got {count})")));
        }
        let last = (count - 1) as f64;
        let mut points: Vec<f64> = match law {
            SpacingLaw::Uniform => {
                let h = (r_max - r_min) / last;
                (0..count).map(|i| r_min + i as f64 * h).collect()
            }
            SpacingLaw::Logarithmic => {
                let (lo, hi) = (r_min.ln(), r_max.ln());
                let step = (hi - lo) / last;
                (0..count).map(|i| (lo + i as f64 * step).exp()).collect()
            }
        };
        points[0] = r_min;
        points[count - 1] = r_max;
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Grid(
                "sample points are not strictly increasing in floating point".into(),
            ));
        }
        Ok(Self {
            r_min,
            r_max,
            law,
            points,
        })
    }

    /// Uniform grid with spacing `h` starting at `r_min`; the last point is
    /// the largest `r_min + k h` not exceeding `r_max`.
    pub fn with_spacing(r_min: f64, r_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Grid(format!("spacing must be > 0 (got {h})")));
        }
        let intervals = ((r_max - r_min) / h + 1e-9).floor();
        if !(intervals.is_finite() && intervals >= 2.0) {
            return Err(Error::Grid(format!(
                "range [{r_min}, {r_max}] holds fewer than 3 points at spacing {h}"
            )));
        }
        Self::new(r_min, r_min + intervals * h, intervals as usize + 1, SpacingLaw::Uniform)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn law(&self) -> SpacingLaw {
        self.law
    }

    /// Constant spacing of a uniform grid, `None` for logarithmic ones.
    pub fn spacing(&self) -> Option<f64> {
        match self.law {
            SpacingLaw::Uniform => Some((self.r_max - self.r_min) / (self.len() - 1) as f64),
            SpacingLaw::Logarithmic => None,
        }
    }
}

/// Free-function form of [`RadialGrid::new`].
pub fn make_radial_grid(
    r_min: f64,
    r_max: f64,
    count: usize,
    law: SpacingLaw,
) -> Result<RadialGrid> {
    RadialGrid::new(r_min, r_max, count, law)
}

/// Uniform Cartesian axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    x_min: f64,
    x_max: f64,
    points: Vec<f64>,
}

impl AxisGrid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Grid(format!(
                "need finite x_min < x_max (got {x_min}, {x_max})"
            )));
        }
        if count < 3 {
            return Err(Error::Grid(format!("count must be >= 3 (got {count})")));
        }
        let h = (x_max - x_min) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| x_min + i as f64 * h).collect();
        points[count - 1] = x_max;
        Ok(Self {
            x_min,
            x_max,
            points,
        })
    }

    /// Grid of `2 * half_width + 1` points spaced `h` apart, centred on `center`.
    pub fn centered(center: f64, h: f64, half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::Grid("half_width must be >= 1".into()));
        }
        let span = h * half_width as f64;
        Self::new(center - span, center + span, 2 * half_width + 1)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.len() - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_three_points() {
        let g = make_radial_grid(1.0, 2.0, 3, SpacingLaw::Uniform).unwrap();
        assert_eq!(g.points(), &[1.0, 1.5, 2.0]);
    }

    #[test]
    fn logarithmic_geometric_midpoint() {
        let g = make_radial_grid(1.0, 4.0, 3, SpacingLaw::Logarithmic).unwrap();
        assert_eq!(g.points()[0], 1.0);
        assert!((g.points()[1] - 2.0).abs() < 1e-15);
        assert_eq!(g.points()[2], 4.0);
    }

    #[test]
    fn rejects_origin_and_short_grids() {
        let e = make_radial_grid(0.0, 2.0, 5, SpacingLaw::Uniform).unwrap_err();
        assert!(e.to_string().contains("r_min must be > 0"));
        assert!(make_radial_grid(-1.0, 2.0, 5, SpacingLaw::Logarithmic).is_err());
        assert!(make_radial_grid(1.0, 2.0, 2, SpacingLaw::Uniform).is_err());
        assert!(make_radial_grid(2.0, 2.0, 5, SpacingLaw::Uniform).is_err());
        assert!(AxisGrid::new(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn with_spacing_keeps_step() {
        let g = RadialGrid::with_spacing(0.5, 1.0, 1e-3).unwrap();
        assert_eq!(g.len(), 501);
        assert!((g.spacing().unwrap() - 1e-3).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn grids_strictly_monotone(
            r_min in 1e-3f64..10.0,
            span in 1e-2f64..1e3,
            count in 3usize..2000,
            log in any::<bool>(),
        ) {
            let law = if log { SpacingLaw::Logarithmic } else { SpacingLaw::Uniform };
            let g = RadialGrid::new(r_min, r_min + span, count, law).unwrap();
            prop_assert_eq!(g.len(), count);
            prop_assert!(g.points().iter().all(|&r| r > 0.0));
            prop_assert!(g.points().windows(2).all(|w| w[1] > w[0]));
            if let Some(h) = g.spacing() {
                for w in g.points().windows(2) {
                    prop_assert!(((w[1] - w[0]) - h).abs() <= 1e-12 * (r_min + span));
                }
            }
        }

        #[test]
        fn axis_uniform(x0 in -50f64..50.0, span in 1e-2f64..100.0, count in 3usize..5000) {
            let g = AxisGrid::new(x0, x0 + span, count).unwrap();
            let h = g.spacing();
            for w in g.points().windows(2) {
                prop_assert!(((w[1] - w[0]) - h).abs() <= 1e-12 * (x0.abs() + span));
            }
        }
    }
}
