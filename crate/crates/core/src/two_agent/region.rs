//! Classification of a whole lattice of initial opinions (the data behind
//! the phase-region plots).

use std::io::Write;

use crate::error::{Error, Result};
use crate::parallel;

use super::{classify_params, ClassificationKind};

#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub a: f64,
    pub b: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub resolution: usize,
    /// Row-major over the x1 index, then x2.
    kinds: Vec<ClassificationKind>,
}

impl RegionGrid {
    pub fn coordinate(&self, index: usize) -> f64 {
        self.grid_min
            + (self.grid_max - self.grid_min) * index as f64 / (self.resolution - 1) as f64
    }

    pub fn kind_at(&self, i: usize, j: usize) -> ClassificationKind {
        self.kinds[i * self.resolution + j]
    }

    pub fn kinds(&self) -> &[ClassificationKind] {
        &self.kinds
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64, ClassificationKind)> + '_ {
        (0..self.resolution).flat_map(move |i| {
            (0..self.resolution)
                .map(move |j| (self.coordinate(i), self.coordinate(j), self.kind_at(i, j)))
        })
    }

    /// CSV with columns x1_0, x2_0, kind.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x1_0,x2_0,kind")?;
        for (x1, x2, kind) in self.points() {
            writeln!(w, "{x1},{x2},{}", kind.as_str())?;
        }
        Ok(())
    }
}

/// Classifies every point of the square lattice. Points on the axes (where
/// the classification is undefined) report Boundary.
pub fn region_grid(
    a: f64,
    b: f64,
    grid_min: f64,
    grid_max: f64,
    resolution: usize,
) -> Result<RegionGrid> {
    if resolution < 2 {
        return Err(Error::invalid(format!("resolution must be >= 2, got {resolution}")));
    }
    if !(grid_min < grid_max) {
        return Err(Error::invalid(format!("grid_min {grid_min} must be below grid_max {grid_max}")));
    }
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::invalid("a and b must be positive"));
    }
    let coord = |k: usize| grid_min + (grid_max - grid_min) * k as f64 / (resolution - 1) as f64;
    let rows = parallel::map_indexed(resolution, |i| {
        let x1 = coord(i);
        (0..resolution)
            .map(|j| {
                let x2 = coord(j);
                match classify_params(a, b, (x1, x2)) {
                    Ok(r) => r.kind,
                    Err(_) => ClassificationKind::Boundary,
                }
            })
            .collect::<Vec<_>>()
    });
    let kinds = rows.into_iter().flatten().collect();
    Ok(RegionGrid { a, b, grid_min, grid_max, resolution, kinds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_csv_rows() {
        let g = region_grid(1.0, 0.5, -3.0, 3.0, 11).unwrap();
        assert_eq!(g.kinds().len(), 121);
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 122); // header + one row per point
        assert!(text.starts_with("x1_0,x2_0,kind\n"));
    }

    #[test]
    fn region_symmetric_under_balanced_reflection() {
        // (x1, x2) -> (-x2, -x1) preserves polarization and imbalance
        let res = 41;
        let g = region_grid(1.0, 0.5, -3.0, 3.0, res).unwrap();
        for i in 0..res {
            for j in 0..res {
                assert_eq!(g.kind_at(i, j), g.kind_at(res - 1 - j, res - 1 - i));
            }
        }
    }

    #[test]
    fn balanced_diagonal_is_pd_and_positive_quadrant_consensus() {
        let res = 21;
        let g = region_grid(1.0, 0.5, -3.0, 3.0, res).unwrap();
        for i in 0..res {
            let x1 = g.coordinate(i);
            let j = res - 1 - i; // x2 = -x1 on a symmetric grid
            if x1 != 0.0 {
                assert!(g.kind_at(i, j).is_pd(), "({x1}, {}) not PD", g.coordinate(j));
            }
            for jj in 0..res {
                if x1 > 0.0 && g.coordinate(jj) > 0.0 {
                    assert_eq!(g.kind_at(i, jj), ClassificationKind::CoSameSign);
                }
            }
        }
    }

    #[test]
    fn axis_points_are_boundary() {
        let g = region_grid(1.0, 1.0, -1.0, 1.0, 3).unwrap();
        assert_eq!(g.kind_at(1, 0), ClassificationKind::Boundary); // x1 = 0
        assert_eq!(g.kind_at(2, 1), ClassificationKind::Boundary); // x2 = 0
    }
}
