#![allow(dead_code)]

use std::sync::OnceLock;

use crossroads::grid::{GridSpec, OccupancySet};
use crossroads::high_level::{ReferenceLibrary, Schedule};
use crossroads::model::{IntersectionConfig, Maneuver, MotionRequest, Road, VehicleSpec};
use crossroads::reference::ReferenceConfig;

pub const ROADS: [usize; 4] = [1, 2, 3, 4];

pub fn grid() -> GridSpec {
    GridSpec::covering(IntersectionConfig::default().conflict_area(), 0.2, 0.2, 0.2).unwrap()
}

/// Reference library for the default intersection, built once per test
/// binary.
pub fn library() -> &'static ReferenceLibrary {
    static LIB: OnceLock<ReferenceLibrary> = OnceLock::new();
    LIB.get_or_init(|| {
        ReferenceLibrary::build(
            &IntersectionConfig::default(),
            &VehicleSpec::default(),
            &ReferenceConfig::default(),
            &grid(),
        )
        .unwrap()
    })
}

pub fn request(id: u32, road: usize, m: Maneuver, arrival: f64) -> MotionRequest {
    MotionRequest::new(id, Road(road), m, arrival, &IntersectionConfig::default()).unwrap()
}

pub fn four_left_turns() -> Vec<MotionRequest> {
    ROADS
        .iter()
        .map(|&r| request(r as u32, r, Maneuver::TurnLeft, 0.0))
        .collect()
}

/// Symmetric fairness instance: straight traffic on roads 1 and 3,
/// left-turners on roads 2 and 4, `per_road` vehicles each, one arrival
/// per road every `gap` seconds.
pub fn straight_left(per_road: usize, gap: f64) -> Vec<MotionRequest> {
    let mut out = Vec::new();
    for k in 0..per_road {
        for (road, m) in [
            (1, Maneuver::GoStraight),
            (2, Maneuver::TurnLeft),
            (3, Maneuver::GoStraight),
            (4, Maneuver::TurnLeft),
        ] {
            let id = out.len() as u32 + 1;
            out.push(request(id, road, m, k as f64 * gap));
        }
    }
    out
}

/// Union of the allocations made before the `idx`-th one.
pub fn allocated_before(schedule: &Schedule, idx: usize) -> OccupancySet {
    let mut set = OccupancySet::new(&schedule.allocations[idx].occupancy.spec().clone());
    for a in &schedule.allocations[..idx] {
        set.union_with(&a.occupancy).unwrap();
    }
    set
}

/// Naive membership scan: does any cell of `a` appear in `b`?
pub fn naive_intersect(a: &OccupancySet, b: &OccupancySet) -> bool {
    let cells: std::collections::HashSet<_> = b.cells().collect();
    a.cells().any(|c| cells.contains(&c))
}

/// Central finite difference of a scalar function of one variable.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

use crossroads::grid::CellIndex;
use crossroads::low_level::{
    collision_cost, smoothness_cost, CollisionParams, ControlPointSequence, CostWeights,
    ObstacleGrid,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative error `|g - g_fd| / max(|g|, |g_fd|)` over the free
/// coordinates, with `g_fd` from central differences of `f`.
fn relative_gradient_error(
    q: &ControlPointSequence,
    f: impl Fn(&ControlPointSequence, &mut [[f64; 2]]) -> f64,
    h: f64,
) -> f64 {
    let mut g = vec![[0.0; 2]; q.len()];
    f(q, &mut g);
    let mut scratch = vec![[0.0; 2]; q.len()];
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for i in q.free_range() {
        for d in 0..2 {
            let mut plus = q.clone();
            plus.points[i][d] += h;
            let mut minus = q.clone();
            minus.points[i][d] -= h;
            let fd = (f(&plus, &mut scratch) - f(&minus, &mut scratch)) / (2.0 * h);
            num = num.max((g[i][d] - fd).abs());
            den = den.max(g[i][d].abs()).max(fd.abs());
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, spread: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|i| {
            [
                i as f64 + rng.random_range(-spread..spread),
                rng.random_range(-spread..spread),
            ]
        })
        .collect()
}

/// Smoothness-gradient error on the random instance `seed`.
pub fn smoothness_gradient_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(7..40);
    let dt = rng.random_range(0.5..1.5);
    let q = ControlPointSequence::new(random_points(&mut rng, n, 0.8), dt, 0.0).unwrap();
    let w = CostWeights {
        omega_acc: rng.random_range(0.1..5.0),
        omega_jerk: rng.random_range(0.1..5.0),
        omega_c: 0.0,
    };
    relative_gradient_error(&q, |q, g| smoothness_cost(q, &w, g), 1e-5)
}

/// Collision instance: control points along the x axis and obstacle cells
/// scattered around them in every slab the points look at. Returns `None`
/// when some distance lies within `1e-3` of a breakpoint.
pub fn collision_instance(seed: u64) -> Option<(ControlPointSequence, ObstacleGrid, CollisionParams)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = GridSpec::covering(
        crossroads::model::Rect {
            min: [-4.0, -4.0],
            max: [24.0, 4.0],
        },
        0.2,
        0.2,
        0.2,
    )
    .unwrap();
    let n = rng.random_range(7..18);
    let q = ControlPointSequence::new(random_points(&mut rng, n, 0.5), 1.0, 0.0).unwrap();
    let params = CollisionParams {
        d_r: rng.random_range(0.3..1.5),
        d_f: rng.random_range(0.5..2.5),
    };
    let mut grid = ObstacleGrid::new(&spec);
    let mut set = OccupancySet::new(&spec);
    for i in q.free_range() {
        let jt = spec.slab_of(q.anchor_time(i));
        for _ in 0..rng.random_range(1..6) {
            let p = [
                q.points[i][0] + rng.random_range(-2.5..2.5),
                q.points[i][1] + rng.random_range(-2.5..2.5),
            ];
            if let Ok(c) = crossroads::grid::block_of(p[0], p[1], 0.0, &spec) {
                set.insert(CellIndex::new(c.jx, c.jy, jt));
            }
        }
    }
    grid.add_real(&set).unwrap();
    for i in q.free_range() {
        let jt = spec.slab_of(q.anchor_time(i));
        for (jx, jy) in set.slab(jt).map(|s| s.cells().collect::<Vec<_>>()).unwrap_or_default() {
            let c = spec.cell_center(jx, jy);
            let d = params.radius() - (q.points[i][0] - c[0]).hypot(q.points[i][1] - c[1]);
            if d.abs() < 1e-3 || (d - params.s_f()).abs() < 1e-3 {
                return None;
            }
        }
    }
    Some((q, grid, params))
}

/// Collision-gradient error on the random instance `seed`, or `None` when
/// the instance touches a breakpoint.
pub fn collision_gradient_error(seed: u64) -> Option<f64> {
    let (q, grid, params) = collision_instance(seed)?;
    Some(relative_gradient_error(
        &q,
        |q, g| collision_cost(q, &grid, &params, 1.0, g),
        1e-6,
    ))
}
