use super::{Allocation, FeasibleTunnel};
use crate::grid::OccupancySet;

/// Corridor granted to an allocation: its cells plus up to `margin`
/// rings of 8-neighbour dilation, each ring clipped against blocks already
/// held by other vehicles.
pub fn feasible_tunnel(alloc: &Allocation, margin: u32, a_pre: &OccupancySet) -> FeasibleTunnel {
    let spec = *alloc.occupancy.spec();
    let mut cells = OccupancySet::new(&spec).with_owner(alloc.vehicle());
    for (jt, slab) in alloc.occupancy.slabs() {
        let mut grown = slab.clone();
        for _ in 0..margin {
            let mut next = grown.dilated(&spec);
            if let Some(taken) = a_pre.slab(jt) {
                next.subtract(taken);
            }
            next.union_with(slab);
            grown = next;
        }
        cells.insert_slab(jt, &grown);
    }
    FeasibleTunnel {
        vehicle: alloc.vehicle(),
        t_e: alloc.t_e,
        slot: alloc.slot,
        cells,
    }
}
