//! Uniform bucket grid over germ positions for radius queries.

/// Immutable grid in compressed-row layout: `starts[c]..starts[c + 1]`
/// indexes `items` for cell `c`.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    xmin: f64,
    ymin: f64,
    cell: f64,
    nx: usize,
    ny: usize,
    starts: Vec<usize>,
    items: Vec<usize>,
    coords: Vec<(f64, f64)>,
}

impl Grid {
    /// Cells are sized for roughly `per_cell` points each.
    pub fn new(coords: Vec<(f64, f64)>, per_cell: f64) -> Self {
        let (mut xmin, mut ymin, mut xmax, mut ymax) =
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in &coords {
            xmin = xmin.min(x);
            ymin = ymin.min(y);
            xmax = xmax.max(x);
            ymax = ymax.max(y);
        }
        if coords.is_empty() {
            (xmin, ymin, xmax, ymax) = (0.0, 0.0, 0.0, 0.0);
        }
        let w = (xmax - xmin).max(1e-12);
        let h = (ymax - ymin).max(1e-12);
        let target_cells = (coords.len() as f64 / per_cell).max(1.0);
        let mut cell = (w * h / target_cells).sqrt();
        // Guard against degenerate (nearly collinear) layouts blowing up the cell count.
        cell = cell.max(w.max(h) / 4096.0).max(f64::MIN_POSITIVE);
        let nx = ((w / cell).floor() as usize + 1).max(1);
        let ny = ((h / cell).floor() as usize + 1).max(1);

        let mut grid = Grid {
            xmin,
            ymin,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            items: vec![0; coords.len()],
            coords,
        };
        let cells: Vec<usize> = grid.coords.iter().map(|&(x, y)| grid.cell_of(x, y)).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for c in 0..nx * ny {
            grid.starts[c + 1] += grid.starts[c];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn clamp_index(v: f64, n: usize) -> usize {
        if v <= 0.0 {
            0
        } else {
            (v as usize).min(n - 1)
        }
    }

    fn cell_of(&self, x: f64, y: f64) -> usize {
        let cx = Self::clamp_index((x - self.xmin) / self.cell, self.nx);
        let cy = Self::clamp_index((y - self.ymin) / self.cell, self.ny);
        cy * self.nx + cx
    }

    /// Diameter of the bounding box of all points.
    pub fn extent(&self) -> f64 {
        (self.nx as f64 * self.cell).hypot(self.ny as f64 * self.cell)
    }

    /// Calls `visit(j)` for every point within Euclidean distance `r` of `(x, y)`.
    pub fn for_each_within(&self, x: f64, y: f64, r: f64, mut visit: impl FnMut(usize)) {
        if self.coords.is_empty() {
            return;
        }
        let r2 = r * r;
        let x0 = Self::clamp_index((x - r - self.xmin) / self.cell, self.nx);
        let x1 = Self::clamp_index((x + r - self.xmin) / self.cell, self.nx);
        let y0 = Self::clamp_index((y - r - self.ymin) / self.cell, self.ny);
        let y1 = Self::clamp_index((y + r - self.ymin) / self.cell, self.ny);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                let c = cy * self.nx + cx;
                for &j in &self.items[self.starts[c]..self.starts[c + 1]] {
                    let (px, py) = self.coords[j];
                    let (dx, dy) = (px - x, py - y);
                    if dx * dx + dy * dy <= r2 {
                        visit(j);
                    }
                }
            }
        }
    }

    /// Typical spacing `sqrt(area / n)` of the indexed points.
    pub fn spacing(&self) -> f64 {
        let n = self.coords.len().max(1) as f64;
        (self.nx as f64 * self.ny as f64 * self.cell * self.cell / n).sqrt()
    }
}
