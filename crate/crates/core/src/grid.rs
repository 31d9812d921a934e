use serde::{Deserialize, Serialize};

use crate::{CoreError, Result};

/// Pixel grid dimensions. Coordinates are `(row, col)` with the origin at
/// pixel `(0, 0)` and pixel centers at integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid2D {
    pub height: usize,
    pub width: usize,
}

impl Grid2D {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(CoreError::EmptyGrid);
        }
        Ok(Grid2D { height, width })
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major flat index of `(row, col)`.
    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    pub(crate) fn expect_matches(&self, other: &Grid2D) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(CoreError::GridMismatch {
                left: *self,
                right: *other,
            })
        }
    }
}

impl std::fmt::Display for Grid2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.height, self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_dims() {
        assert!(matches!(Grid2D::new(0, 5), Err(CoreError::EmptyGrid)));
        assert!(matches!(Grid2D::new(5, 0), Err(CoreError::EmptyGrid)));
    }

    #[test]
    fn row_major_indexing() {
        let g = Grid2D::new(3, 4).unwrap();
        assert_eq!(g.index(0, 0), 0);
        assert_eq!(g.index(1, 0), 4);
        assert_eq!(g.index(2, 3), 11);
        assert_eq!(g.len(), 12);
    }
}
