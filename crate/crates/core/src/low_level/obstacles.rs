use crate::error::Result;
use crate::grid::{rasterize_into, FootprintBox, GridSpec, OccupancySet, SlabBitmap};
use crate::high_level::FeasibleTunnel;

/// Per-slab obstacle cells seen by the low-level planner: unexpected
/// obstacles plus the virtual ring around the granted tunnel.
#[derive(Debug, Clone)]
pub struct ObstacleGrid {
    pub real: OccupancySet,
    pub virtual_cells: OccupancySet,
}

impl ObstacleGrid {
    pub fn new(spec: &GridSpec) -> Self {
        Self {
            real: OccupancySet::new(spec),
            virtual_cells: OccupancySet::new(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.real.spec()
    }

    /// Mark the cells of `b` as occupied in slabs `first..=last`.
    pub fn add_box(&mut self, b: &FootprintBox, first: u32, last: u32) {
        let spec = *self.spec();
        let mut bm = SlabBitmap::new(&spec);
        rasterize_into(b, &spec, &mut bm);
        for jt in first..=last {
            self.real.insert_slab(jt, &bm);
        }
    }

    pub fn add_real(&mut self, cells: &OccupancySet) -> Result<()> {
        self.real.union_with(cells)
    }

    /// Add the boundary ring of `tunnel` as virtual obstacles.
    pub fn add_tunnel(&mut self, tunnel: &FeasibleTunnel) -> Result<()> {
        let ring = ft_virtual_obstacles(&tunnel.cells);
        self.virtual_cells.union_with(&ring)
    }

    /// Whether the cell is occupied by a real or virtual obstacle.
    pub fn occupied(&self, jx: u32, jy: u32, jt: u32) -> bool {
        let hit = |s: &OccupancySet| s.slab(jt).is_some_and(|b| b.contains(jx, jy));
        hit(&self.real) || hit(&self.virtual_cells)
    }

    /// Centres of occupied cells of slab `jt` within `radius` of `p`.
    pub fn near(&self, jt: u32, p: [f64; 2], radius: f64, out: &mut Vec<[f64; 2]>) {
        out.clear();
        let spec = self.spec();
        let (real, virt) = (self.real.slab(jt), self.virtual_cells.slab(jt));
        if real.is_none() && virt.is_none() {
            return;
        }
        let lo_x = ((p[0] - radius - spec.origin[0]) / spec.dx).floor().max(0.0) as u32 + 1;
        let hi_x = ((p[0] + radius - spec.origin[0]) / spec.dx).ceil().min(spec.nx as f64);
        let lo_y = ((p[1] - radius - spec.origin[1]) / spec.dy).floor().max(0.0) as u32 + 1;
        let hi_y = ((p[1] + radius - spec.origin[1]) / spec.dy).ceil().min(spec.ny as f64);
        if hi_x < 1.0 || hi_y < 1.0 {
            return;
        }
        let r2 = radius * radius;
        for jy in lo_y..=hi_y as u32 {
            for jx in lo_x..=hi_x as u32 {
                let set = real.is_some_and(|b| b.contains(jx, jy))
                    || virt.is_some_and(|b| b.contains(jx, jy));
                if !set {
                    continue;
                }
                let c = spec.cell_center(jx, jy);
                let (ex, ey) = (c[0] - p[0], c[1] - p[1]);
                if ex * ex + ey * ey <= r2 {
                    out.push(c);
                }
            }
        }
    }
}

/// One-cell-thick outer boundary of every tunnel slab.
pub fn ft_virtual_obstacles(tunnel: &OccupancySet) -> OccupancySet {
    let spec = *tunnel.spec();
    let mut out = OccupancySet::new(&spec);
    for (jt, slab) in tunnel.slabs() {
        let mut ring = slab.dilated(&spec);
        ring.subtract(slab);
        out.insert_slab(jt, &ring);
    }
    out
}
