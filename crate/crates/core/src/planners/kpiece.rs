use std::collections::BTreeMap;

use rand::Rng;

use crate::world::Vec2;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Cell {
    pub motions: Vec<usize>,
    pub coverage: usize,
    pub selections: usize,
    pub interior: bool,
}

impl Cell {
    /// `(interior ? 1 : 2) / ((1 + selections) · coverage)`
    pub fn importance(&self) -> f64 {
        let flag = if self.interior { 1.0 } else { 2.0 };
        flag / ((1 + self.selections) as f64 * self.coverage.max(1) as f64)
    }
}

/// Grid decomposition of the 2D projection (robot position or tool point).
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionGrid {
    pub cell_size: Vec2,
    pub origin: Vec2,
    pub cells: BTreeMap<(i64, i64), Cell>,
}

const NEIGHBOURS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

impl ProjectionGrid {
    pub fn new(origin: Vec2, cell_size: Vec2) -> Self {
        Self {
            cell_size,
            origin,
            cells: BTreeMap::new(),
        }
    }

    pub fn key(&self, p: Vec2) -> (i64, i64) {
        let d = p - self.origin;
        ((d.x / self.cell_size.x).floor() as i64, (d.y / self.cell_size.y).floor() as i64)
    }

    pub fn add_motion(&mut self, motion: usize, p: Vec2) {
        let key = self.key(p);
        let fresh = !self.cells.contains_key(&key);
        let cell = self.cells.entry(key).or_default();
        cell.motions.push(motion);
        cell.coverage += 1;
        if fresh {
            let interior = NEIGHBOURS
                .iter()
                .all(|(dx, dy)| self.cells.contains_key(&(key.0 + dx, key.1 + dy)));
            self.cells.get_mut(&key).expect("inserted").interior = interior;
            for (dx, dy) in NEIGHBOURS {
                let n = (key.0 + dx, key.1 + dy);
                if self.cells.contains_key(&n) {
                    let interior = NEIGHBOURS
                        .iter()
                        .all(|(ex, ey)| self.cells.contains_key(&(n.0 + ex, n.1 + ey)));
                    self.cells.get_mut(&n).expect("present").interior = interior;
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Picks a cell with probability proportional to its importance, then a
    /// motion uniformly inside it, and counts the selection.
    pub fn select_cell_kpiece<R: Rng>(&mut self, rng: &mut R) -> ((i64, i64), usize) {
        assert!(!self.cells.is_empty(), "grid has no cells");
        let total: f64 = self.cells.values().map(Cell::importance).sum();
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = *self.cells.keys().next_back().expect("non-empty");
        for (key, cell) in &self.cells {
            let w = cell.importance();
            if pick < w {
                chosen = *key;
                break;
            }
            pick -= w;
        }
        let cell = self.cells.get_mut(&chosen).expect("chosen cell");
        let motion = cell.motions[rng.random_range(0..cell.motions.len())];
        cell.selections += 1;
        (chosen, motion)
    }
}
