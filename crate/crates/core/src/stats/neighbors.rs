//! Nearest-neighbour search on planar point sets, optionally periodic in x.
//!
//! Neighbours are ordered by `(distance, index)`, so the brute-force scan and
//! the grid index return identical results.

use crate::{Error, Result, C64};

/// Sets larger than this use the grid index.
pub const GRID_THRESHOLD: usize = 50_000;

/// One spectrum's worth of points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<[f64; 2]>,
    /// Period of the x coordinate; distances use the minimum image.
    pub x_period: Option<f64>,
    /// Points whose own statistics are collected; all points act as
    /// neighbours. `None` means every point is active.
    pub active: Option<Vec<bool>>,
    /// Provenance tag (spectrum index within an ensemble).
    pub label: u32,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 2]>, x_period: Option<f64>, label: u32) -> Self {
        Self {
            points,
            x_period,
            active: None,
            label,
        }
    }

    /// Raw quasi-energies as points `(Re ε, Im ε)`, periodic in Re with 2π.
    pub fn from_quasi_energies(eps: &[C64], label: u32) -> Self {
        let points = eps.iter().map(|e| [e.re, e.im]).collect();
        Self::new(points, Some(std::f64::consts::TAU), label)
    }

    /// Real values on a line (`y = 0`).
    pub fn from_line(values: &[f64], x_period: Option<f64>, label: u32) -> Self {
        Self::new(values.iter().map(|&x| [x, 0.0]).collect(), x_period, label)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.active.as_ref().map_or(true, |a| a[i])
    }

    pub fn n_active(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_active(i)).count()
    }

    /// Minimum-image displacement from point `i` to point `j`.
    pub fn displacement(&self, i: usize, j: usize) -> [f64; 2] {
        let (a, b) = (self.points[i], self.points[j]);
        let mut dx = b[0] - a[0];
        if let Some(p) = self.x_period {
            dx -= p * (dx / p).round();
        }
        [dx, b[1] - a[1]]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.points[i], self.points[j]);
        let mut dx = (b[0] - a[0]).abs();
        if let Some(p) = self.x_period {
            dx %= p;
            dx = dx.min(p - dx);
        }
        dx.hypot(b[1] - a[1])
    }
}

/// How neighbours are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborSearch {
    /// Brute force up to [`GRID_THRESHOLD`] points, grid index above.
    Auto,
    BruteForce,
    Grid,
}

type Neighbor = (f64, usize);

fn better(a: Neighbor, b: Neighbor) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Keeps the `K` best candidates in ascending `(distance, index)` order.
#[derive(Clone, Copy)]
struct TopK<const K: usize> {
    items: [Neighbor; K],
    len: usize,
}

impl<const K: usize> TopK<K> {
    fn new() -> Self {
        Self {
            items: [(f64::INFINITY, usize::MAX); K],
            len: 0,
        }
    }

    fn offer(&mut self, cand: Neighbor) {
        if self.len == K && !better(cand, self.items[K - 1]) {
            return;
        }
        let mut pos = self.len.min(K - 1);
        self.items[pos] = cand;
        while pos > 0 && better(self.items[pos], self.items[pos - 1]) {
            self.items.swap(pos, pos - 1);
            pos -= 1;
        }
        self.len = (self.len + 1).min(K);
    }

    fn worst(&self) -> f64 {
        if self.len < K {
            f64::INFINITY
        } else {
            self.items[K - 1].0
        }
    }
}

struct Grid {
    x0: f64,
    y0: f64,
    cw: f64,
    ch: f64,
    nx: usize,
    ny: usize,
    periodic: bool,
    /// Point indices bucketed by cell, CSR layout.
    start: Vec<usize>,
    members: Vec<usize>,
}

impl Grid {
    fn build(set: &PointSet) -> Self {
        let n = set.len();
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in &set.points {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        let periodic = set.x_period.is_some();
        let width = set.x_period.unwrap_or(xmax - xmin);
        let height = ymax - ymin;
        // about two points per cell
        let (nx, ny) = if width > 0.0 && height > 0.0 {
            let h = (2.0 * width * height / n as f64).sqrt();
            ((width / h).floor().max(1.0), (height / h).floor().max(1.0))
        } else if width > 0.0 {
            ((n as f64 / 2.0).ceil(), 1.0)
        } else if height > 0.0 {
            (1.0, (n as f64 / 2.0).ceil())
        } else {
            (1.0, 1.0)
        };
        let (nx, ny) = ((nx as usize).clamp(1, n), (ny as usize).clamp(1, n));
        let cw = if width > 0.0 {
            width / nx as f64
        } else {
            f64::INFINITY
        };
        let ch = if height > 0.0 {
            height / ny as f64
        } else {
            f64::INFINITY
        };
        let mut grid = Grid {
            x0: xmin,
            y0: ymin,
            cw,
            ch,
            nx,
            ny,
            periodic,
            start: vec![0; nx * ny + 1],
            members: vec![0; n],
        };
        let cells: Vec<usize> = (0..n).map(|i| grid.cell_of(set.points[i])).collect();
        for &c in &cells {
            grid.start[c + 1] += 1;
        }
        for c in 0..nx * ny {
            grid.start[c + 1] += grid.start[c];
        }
        let mut fill = grid.start.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.members[fill[c]] = i;
            fill[c] += 1;
        }
        grid
    }

    fn coords(&self, p: [f64; 2]) -> (usize, usize) {
        let fx = if self.cw.is_finite() {
            (p[0] - self.x0) / self.cw
        } else {
            0.0
        };
        let fy = if self.ch.is_finite() {
            (p[1] - self.y0) / self.ch
        } else {
            0.0
        };
        let cx = if self.periodic {
            (fx.floor() as i64).rem_euclid(self.nx as i64) as usize
        } else {
            (fx.max(0.0) as usize).min(self.nx - 1)
        };
        let cy = (fy.max(0.0) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn cell_of(&self, p: [f64; 2]) -> usize {
        let (cx, cy) = self.coords(p);
        cy * self.nx + cx
    }

    /// Columns within ring distance `r` of `cx`, each listed once.
    fn columns_within(&self, cx: usize, r: usize) -> Vec<usize> {
        if self.periodic && 2 * r + 1 >= self.nx {
            return (0..self.nx).collect();
        }
        let lo = cx as i64 - r as i64;
        let hi = cx as i64 + r as i64;
        (lo..=hi)
            .filter_map(|c| {
                if self.periodic {
                    Some(c.rem_euclid(self.nx as i64) as usize)
                } else {
                    (c >= 0 && c < self.nx as i64).then_some(c as usize)
                }
            })
            .collect()
    }

    fn column_distance(&self, c: usize, cx: usize) -> usize {
        let d = c.abs_diff(cx);
        if self.periodic {
            d.min(self.nx - d)
        } else {
            d
        }
    }

    fn query<const K: usize>(&self, set: &PointSet, i: usize) -> TopK<K> {
        let (cx, cy) = self.coords(set.points[i]);
        let mut best = TopK::<K>::new();
        let cmin = self.cw.min(self.ch);
        for r in 0..=self.nx.max(self.ny) {
            // visit each cell whose Chebyshev ring distance is exactly r
            for c in self.columns_within(cx, r) {
                let dc = self.column_distance(c, cx);
                let rows = cy.saturating_sub(r)..=(cy + r).min(self.ny - 1);
                for row in rows {
                    if dc.max(row.abs_diff(cy)) != r {
                        continue;
                    }
                    let cell = row * self.nx + c;
                    for &j in &self.members[self.start[cell]..self.start[cell + 1]] {
                        if j != i {
                            best.offer((set.distance(i, j), j));
                        }
                    }
                }
            }
            // unvisited cells are at least r whole cells away
            if best.len == K && best.worst() < r as f64 * cmin {
                break;
            }
        }
        best
    }
}

fn brute<const K: usize>(set: &PointSet, i: usize) -> TopK<K> {
    let mut best = TopK::<K>::new();
    for j in 0..set.len() {
        if j != i {
            best.offer((set.distance(i, j), j));
        }
    }
    best
}

fn use_grid(set: &PointSet, how: NeighborSearch) -> bool {
    match how {
        NeighborSearch::Auto => set.len() > GRID_THRESHOLD,
        NeighborSearch::BruteForce => false,
        NeighborSearch::Grid => true,
    }
}

/// `K` nearest neighbours `(distance, index)` of every active point; `None`
/// for inactive points.
pub fn k_nearest<const K: usize>(
    set: &PointSet,
    how: NeighborSearch,
) -> Vec<Option<[(f64, usize); K]>> {
    let grid = (use_grid(set, how) && !set.is_empty()).then(|| Grid::build(set));
    (0..set.len())
        .map(|i| {
            if !set.is_active(i) {
                return None;
            }
            let top = match &grid {
                Some(g) => g.query::<K>(set, i),
                None => brute::<K>(set, i),
            };
            (top.len == K).then_some(top.items)
        })
        .collect()
}

/// Distance from each active point to its nearest neighbour, in point order.
pub fn nn_distances(set: &PointSet, how: NeighborSearch) -> Vec<f64> {
    k_nearest::<1>(set, how)
        .into_iter()
        .flatten()
        .map(|nb| nb[0].0)
        .collect()
}

/// Number of points coinciding with point `i`, itself included.
pub(crate) fn multiplicity(set: &PointSet, i: usize) -> usize {
    (0..set.len())
        .filter(|&j| set.distance(i, j) == 0.0)
        .count()
}

/// Complex ratios `z = Δ_NN / Δ_NNN` of every active point.
pub fn ratios_of_set(set: &PointSet, how: NeighborSearch) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(set.n_active());
    for (i, nb) in k_nearest::<2>(set, how).into_iter().enumerate() {
        let Some([(d1, j1), (_, j2)]) = nb else {
            continue;
        };
        if d1 == 0.0 {
            return Err(Error::DegenerateSpectrum {
                multiplicity: multiplicity(set, i),
            });
        }
        let a = set.displacement(i, j1);
        let b = set.displacement(i, j2);
        out.push(C64::new(a[0], a[1]) / C64::new(b[0], b[1]));
    }
    Ok(out)
}
