use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::state::ActionId;

/// Number of overlapping tilings; also the number of active features per query.
pub const NUM_TILINGS: usize = 8;
/// Tiles per dimension covering the value range; the grid itself has one extra
/// cell per dimension to absorb offset overhang.
pub const TILES_PER_DIM: usize = 8;
const GRID_PER_DIM: usize = TILES_PER_DIM + 1;
/// Per-action index ceiling. With direct arithmetic indexing at most
/// 9 * 9 * 8 = 648 cells per action are addressable, so the assignment is
/// collision-free by construction; 4096 is a capacity ceiling, not a modulus.
pub const INDEX_CAPACITY: usize = 4096;

/// Grid tile coder over a 2-D box, with tilings displaced by consecutive odd
/// multiples (1, 3) of one eighth of a tile width per dimension.
///
/// Indices are assigned action-major, then tiling-major, then by grid cell, so
/// distinct actions always occupy disjoint index blocks.
#[derive(Clone, Debug)]
pub struct TileCoder {
    ranges: [(f64, f64); 2],
    num_actions: usize,
}

impl TileCoder {
    pub fn new(ranges: [(f64, f64); 2], num_actions: usize) -> Result<Self> {
        for (lo, hi) in ranges {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::invalid(
                    "tile coder range",
                    format!("[{lo}, {hi}] is not a finite non-empty interval"),
                ));
            }
        }
        if num_actions == 0 {
            return Err(Error::invalid("tile coder actions", "need at least one action"));
        }
        Ok(Self { ranges, num_actions })
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    /// Total weight-vector length needed to back this coder.
    pub fn weights_len(&self) -> usize {
        INDEX_CAPACITY * self.num_actions
    }

    /// Active feature indices for (coords, action): exactly one per tiling.
    /// Coordinates outside the declared ranges are clamped to the bounds.
    pub fn active_tiles(&self, coords: &[f64], action: ActionId) -> Result<SmallVec<[usize; NUM_TILINGS]>> {
        if coords.len() != 2 {
            return Err(Error::invalid(
                "tile coder coords",
                format!("expected 2 dimensions, got {}", coords.len()),
            ));
        }
        if action >= self.num_actions {
            return Err(Error::OutOfRange {
                what: "action",
                index: action,
                limit: self.num_actions,
            });
        }
        // Normalized position in tile units, clamped into [0, 8].
        let mut units = [0.0_f64; 2];
        for d in 0..2 {
            let (lo, hi) = self.ranges[d];
            let x = coords[d].clamp(lo, hi);
            units[d] = (x - lo) / (hi - lo) * TILES_PER_DIM as f64;
        }
        let base = action * INDEX_CAPACITY;
        let mut out = SmallVec::new();
        for tiling in 0..NUM_TILINGS {
            let mut cell = [0usize; 2];
            for d in 0..2 {
                // Consecutive odd displacement (1 per unit shift in dim 0,
                // 3 in dim 1), folded back onto the tile so the grid stays 9x9.
                let odd = 2 * d + 1;
                let offset = ((tiling * odd) % NUM_TILINGS) as f64 / NUM_TILINGS as f64;
                cell[d] = ((units[d] + offset).floor() as usize).min(GRID_PER_DIM - 1);
            }
            out.push(base + tiling * GRID_PER_DIM * GRID_PER_DIM + cell[0] * GRID_PER_DIM + cell[1]);
        }
        Ok(out)
    }
}
