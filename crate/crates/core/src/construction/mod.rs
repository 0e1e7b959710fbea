//! The four-corner construction in ℍ¹.
//!
//! The vertical plane W = {x = 0} carries a four-corner set built from the
//! similarities `fₖ(y, t) = σ(y, t) + oₖ`. Each word ω names a square cell of
//! W, and the column over a cell is its preimage under `P_W ∘ φ` with
//! `φ(x, y, t) = (x, y, t + 2xy)`, cut to `x ∈ [0, 1]`. Along the way
//! `P_W ∘ φ` agrees with the vertical projection along the x-axis.
//!
//! Level-m bump balls sit on the lattice `(0, h/2, 0)·δ_h(ℤ³)`, `h = σᵐ`,
//! which is exactly h-separated. A lattice point belongs to the net of a
//! column when its tile `γ·([−h/2, h/2]² × [−h²/2, h²/2])` meets the column in
//! positive measure. The random map sums tent bumps over these balls.

mod ifs;
mod io;
mod map;
mod net;
mod params;

pub use ifs::{
    cell, cells_meeting, column_contains, four_corner_cloud, phi, phi_inv, sample_e_alpha, words, Cell, Word,
};
pub use io::{read_map, write_map, MapFile, FORMAT_VERSION, MAGIC};
pub use map::{
    build_map, bump, eval_map, level_sobolev_norm, single_ball_sobolev, unit_ball_volume_mc, BumpBall, RandomMap,
    UNIT_BALL_VOLUME,
};
pub use net::{build_net, level_ball_count, net_size, LevelLattice, LatticeIndex};
pub use params::{make_params, IFSParams};
