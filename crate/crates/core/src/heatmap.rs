use crate::{CoreError, Grid2D, Result, Scalar};

/// Nonnegative single-channel map over a pixel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap<T> {
    grid: Grid2D,
    data: Vec<T>,
}

impl<T: Scalar> Heatmap<T> {
    /// Validates that every value is finite and nonnegative.
    pub fn new(grid: Grid2D, data: Vec<T>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(CoreError::BadBufferLength {
                grid,
                channels: 1,
                actual: data.len(),
            });
        }
        for (index, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFinite { index });
            }
            if v < T::zero() {
                return Err(CoreError::NegativeHeatmap { index });
            }
        }
        Ok(Heatmap { grid, data })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for r in 0..grid.height {
            for c in 0..grid.width {
                data.push(f(r, c));
            }
        }
        Heatmap::new(grid, data)
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> T {
        self.data[self.grid.index(row, col)]
    }

    pub fn sum(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v)
    }

    pub fn has_positive(&self) -> bool {
        self.data.iter().any(|&v| v > T::zero())
    }
}

/// `K` region maps plus one background map sharing a single grid. Any map
/// (including every region map) may be all zero here; operations that need
/// a normalizable map enforce that themselves.
#[derive(Debug, Clone)]
pub struct RegionSet<T> {
    regions: Vec<Heatmap<T>>,
    background: Heatmap<T>,
}

impl<T: Scalar> RegionSet<T> {
    pub fn new(regions: Vec<Heatmap<T>>, background: Heatmap<T>) -> Result<Self> {
        if regions.is_empty() {
            return Err(CoreError::InvalidParameter {
                detail: "region set needs at least one region map".into(),
            });
        }
        let grid = background.grid();
        for r in &regions {
            grid.expect_matches(&r.grid())?;
        }
        Ok(RegionSet {
            regions,
            background,
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.background.grid()
    }

    /// Number of motion regions (the background map is not counted).
    pub fn region_count(&self) -> usize {
        self.regions.len()
    }

    pub fn regions(&self) -> &[Heatmap<T>] {
        &self.regions
    }

    pub fn background(&self) -> &Heatmap<T> {
        &self.background
    }
}
