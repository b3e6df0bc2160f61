mod common;

use std::collections::HashSet;

use approx::assert_abs_diff_eq;
use common::{allocated_before, library, request};
use crossroads::grid::{CellIndex, OccupancySet};
use crossroads::high_level::optimum::exhaustive_optimum;
use crossroads::high_level::{
    cs_baseline, feasible_tunnel, priority, run, Planner, PlannerConfig, PriorityWeights,
    QueueStats, Schedule,
};
use crossroads::model::{IntersectionConfig, Maneuver};
use crossroads::sim::{generate_flow, FlowMix};

fn cfg() -> PlannerConfig {
    PlannerConfig::default()
}

fn mixed_flow(n: usize, seed: u64) -> Vec<crossroads::model::MotionRequest> {
    generate_flow(&FlowMix::flow2(), n, 0.8, &IntersectionConfig::default(), seed).unwrap()
}

fn floor_of(req: &crossroads::model::MotionRequest) -> u32 {
    let lib = library();
    let e = lib.get(req.road_from, req.maneuver).unwrap();
    ((req.arrival_time + e.t_a_min()) / lib.grid.dt - 1e-9).ceil() as u32
}

#[test]
fn empty_intersection_admits_at_the_floor() {
    for m in Maneuver::ALL {
        let req = request(1, 3, m, 1.3);
        let s = run(library(), &cfg(), std::slice::from_ref(&req)).unwrap();
        let a = &s.allocations[0];
        assert_eq!(a.slot, floor_of(&req));
        assert_eq!(a.slot, a.floor_slot);
        assert_abs_diff_eq!(a.t_e, a.slot as f64 * library().grid.dt, epsilon = 1e-12);
    }
}

#[test]
fn second_same_road_straight_matches_offset_scan() {
    let lib = library();
    let reqs = [
        request(1, 2, Maneuver::GoStraight, 0.0),
        request(2, 2, Maneuver::GoStraight, 0.0),
    ];
    let s = run(lib, &cfg(), &reqs).unwrap();
    let first = &s.allocations[0];
    let base = &lib.get(reqs[1].road_from, reqs[1].maneuver).unwrap().occupancy;
    let expected = (floor_of(&reqs[1])..)
        .find(|&k| !common::naive_intersect(&base.translate(k as i64), &first.occupancy))
        .unwrap();
    assert_eq!(s.allocations[1].slot, expected);
    assert!(s.allocations[1].slot > first.slot);
}

#[test]
fn four_left_turns_enter_in_sequence() {
    let reqs = common::four_left_turns();
    let s = run(library(), &cfg(), &reqs).unwrap();
    assert_eq!(s.allocations.len(), 4);
    for w in s.allocations.windows(2) {
        assert!(w[1].t_e > w[0].t_e, "{} then {}", w[0].t_e, w[1].t_e);
    }
    for (i, a) in s.allocations.iter().enumerate().skip(1) {
        let before = allocated_before(&s, i);
        let earlier = a.occupancy.translate(-1);
        assert!(common::naive_intersect(&earlier, &before), "vehicle {} could enter earlier", a.vehicle());
    }
}

#[test]
fn priority_matches_hand_computation() {
    let g = common::grid();
    let mut tentative = OccupancySet::new(&g);
    tentative.insert(CellIndex::new(5, 5, 30));
    let mut a_pre = OccupancySet::new(&g);
    a_pre.insert(CellIndex::new(9, 9, 25));
    let queue = QueueStats {
        waits: vec![4.0, 2.0, 1.0],
        arrival_rate: 0.8,
    };
    let w = PriorityWeights::default();
    let b = priority(&tentative, &a_pre, &queue, &w);
    // 30 slabs of 0.2 s; 0.5 (4 + 2/2 + 1/3); 3 vehicles at 0.8 / s
    assert_abs_diff_eq!(b.p_d, 6.0, epsilon = 1e-12);
    assert_abs_diff_eq!(b.p_w, 0.5 * (4.0 + 1.0 + 1.0 / 3.0), epsilon = 1e-12);
    assert_abs_diff_eq!(b.p_sta, 2.4, epsilon = 1e-12);
    assert_abs_diff_eq!(b.score(), 6.0 - 8.0 / 3.0 - 2.4, epsilon = 1e-12);

    // the later slab of A_pre dominates P_d
    a_pre.insert(CellIndex::new(1, 1, 40));
    assert_abs_diff_eq!(priority(&tentative, &a_pre, &queue, &w).p_d, 8.0, epsilon = 1e-12);
}

#[test]
fn longer_wait_lowers_the_score() {
    let g = common::grid();
    let mut tentative = OccupancySet::new(&g);
    tentative.insert(CellIndex::new(3, 3, 12));
    let a_pre = OccupancySet::new(&g);
    let w = PriorityWeights::default();
    let short = QueueStats {
        waits: vec![1.0],
        arrival_rate: 0.8,
    };
    let long = QueueStats {
        waits: vec![3.0],
        arrival_rate: 0.8,
    };
    let s = priority(&tentative, &a_pre, &short, &w);
    let l = priority(&tentative, &a_pre, &long, &w);
    assert_eq!(s.p_d, l.p_d);
    assert_eq!(s.p_sta, l.p_sta);
    assert!(l.score() < s.score());
}

#[test]
fn equal_scores_go_to_the_lower_road() {
    // opposite straights share no cells and have identical scores
    let mut p = Planner::new(library(), cfg()).unwrap();
    p.enqueue(request(1, 3, Maneuver::GoStraight, 0.0)).unwrap();
    p.enqueue(request(2, 1, Maneuver::GoStraight, 0.0)).unwrap();
    let first = p.schedule_round().unwrap().clone();
    let second = p.schedule_round().unwrap().clone();
    assert_eq!(first.request.road_from.0, 1);
    assert_eq!(first.slot, second.slot);
}

#[test]
fn single_queue_head_is_chosen() {
    let mut p = Planner::new(library(), cfg()).unwrap();
    p.enqueue(request(7, 4, Maneuver::TurnLeft, 0.0)).unwrap();
    p.enqueue(request(8, 4, Maneuver::TurnRight, 0.0)).unwrap();
    assert_eq!(p.schedule_round().unwrap().vehicle(), 7);
    assert_eq!(p.a_pre(), &p.allocations()[0].occupancy);
}

fn assert_greedy_tight(s: &Schedule) {
    for (i, a) in s.allocations.iter().enumerate() {
        if a.slot == a.floor_slot {
            continue;
        }
        let before = allocated_before(s, i);
        assert!(
            !a.occupancy.translate(-1).disjoint(&before).unwrap(),
            "vehicle {} (slot {}, floor {}) fits one slot earlier",
            a.vehicle(),
            a.slot,
            a.floor_slot
        );
    }
}

#[test]
fn allocations_are_greedy_tight() {
    for seed in 0..5 {
        let s = run(library(), &cfg(), &mixed_flow(30, seed)).unwrap();
        assert_greedy_tight(&s);
    }
}

#[test]
fn allocations_are_pairwise_disjoint_by_brute_force() {
    for seed in 0..5 {
        let s = run(library(), &cfg(), &mixed_flow(40, 100 + seed)).unwrap();
        assert_eq!(s.allocations.len(), 40);
        let sets: Vec<HashSet<CellIndex>> = s.allocations.iter().map(|a| a.occupancy.cells().collect()).collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                assert!(sets[i].is_disjoint(&sets[j]), "seed {seed}: {i} and {j} overlap");
            }
        }
        assert!(s.pairwise_disjoint().unwrap());
    }
}

#[test]
fn empty_scenario_gives_empty_schedule() {
    let s = run(library(), &cfg(), &[]).unwrap();
    assert!(s.allocations.is_empty() && s.tunnels.is_empty());
    assert_eq!(s.total_passing_time(), 0.0);
}

#[test]
fn schedules_are_deterministic() {
    let reqs = mixed_flow(25, 3);
    let csv = |s: &Schedule| {
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        buf
    };
    let a = run(library(), &cfg(), &reqs).unwrap();
    let b = run(library(), &cfg(), &reqs).unwrap();
    assert_eq!(csv(&a), csv(&b));
    let par = run(
        library(),
        &PlannerConfig {
            parallel: true,
            ..cfg()
        },
        &reqs,
    )
    .unwrap();
    assert_eq!(csv(&a), csv(&par));
}

#[test]
fn cs_single_vehicle_matches_proposed() {
    let reqs = [request(1, 2, Maneuver::TurnLeft, 0.7)];
    let p = run(library(), &cfg(), &reqs).unwrap();
    let c = cs_baseline(library(), &reqs, &p.order()).unwrap();
    assert_eq!(p.allocations[0].slot, c.allocations[0].slot);
    assert_eq!(p.allocations[0].occupancy, c.allocations[0].occupancy);
}

#[test]
fn cs_serialises_non_conflicting_right_turns() {
    let reqs = [
        request(1, 1, Maneuver::TurnRight, 0.0),
        request(2, 3, Maneuver::TurnRight, 0.0),
    ];
    let p = run(library(), &cfg(), &reqs).unwrap();
    assert_eq!(p.allocations[0].slot, p.allocations[1].slot);
    let c = cs_baseline(library(), &reqs, &p.order()).unwrap();
    assert!(c.allocations[1].occupancy.min_jt() > c.allocations[0].occupancy.max_jt());
    assert!(c.total_passing_time() > p.total_passing_time());
}

#[test]
fn cs_gaps_are_no_smaller_for_four_left_turns() {
    let reqs = common::four_left_turns();
    let p = run(library(), &cfg(), &reqs).unwrap();
    let c = cs_baseline(library(), &reqs, &p.order()).unwrap();
    for i in 1..4 {
        let gp = p.allocations[i].slot - p.allocations[i - 1].slot;
        let gc = c.allocations[i].slot - c.allocations[i - 1].slot;
        assert!(gc >= gp, "gap {i}: cs {gc} < proposed {gp}");
    }
}

#[test]
fn proposed_entries_dominate_cs() {
    for seed in 0..5 {
        let reqs = mixed_flow(20, 50 + seed);
        let p = run(library(), &cfg(), &reqs).unwrap();
        let c = cs_baseline(library(), &reqs, &p.order()).unwrap();
        for (a, b) in p.allocations.iter().zip(&c.allocations) {
            assert_eq!(a.vehicle(), b.vehicle());
            assert!(a.t_e <= b.t_e + 1e-9, "vehicle {}: {} > {}", a.vehicle(), a.t_e, b.t_e);
        }
        assert!(p.total_passing_time() <= c.total_passing_time() + 1e-9);
    }
}

/// One-ring 8-neighbour dilation of a slab, clipped to the grid.
fn dilation_oracle(cells: &HashSet<(u32, u32)>, nx: u32, ny: u32) -> HashSet<(u32, u32)> {
    let mut out = HashSet::new();
    for &(x, y) in cells {
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                let (a, b) = (x as i64 + dx, y as i64 + dy);
                if a >= 1 && b >= 1 && a <= nx as i64 && b <= ny as i64 {
                    out.insert((a as u32, b as u32));
                }
            }
        }
    }
    out
}

#[test]
fn tunnel_margin_zero_is_the_allocation() {
    let s = run(library(), &cfg(), &common::four_left_turns()).unwrap();
    for (a, t) in s.allocations.iter().zip(&s.tunnels) {
        assert_eq!(t.cells, a.occupancy);
    }
}

#[test]
fn tunnel_margin_one_grows_by_one_ring() {
    let g = common::grid();
    let s = run(library(), &cfg(), &[request(1, 1, Maneuver::TurnLeft, 0.0)]).unwrap();
    let a = &s.allocations[0];
    let t = feasible_tunnel(a, 1, &OccupancySet::new(&g));
    for (jt, slab) in a.occupancy.slabs() {
        let cells: HashSet<_> = slab.cells().collect();
        let expected = dilation_oracle(&cells, g.nx, g.ny);
        let got: HashSet<_> = t.cells.slab(jt).unwrap().cells().collect();
        assert_eq!(got, expected, "slab {jt}");
    }
}

#[test]
fn tunnel_dilation_is_clipped_by_neighbours() {
    let g = common::grid();
    let s = run(library(), &cfg(), &[request(1, 2, Maneuver::GoStraight, 0.0)]).unwrap();
    let a = &s.allocations[0];
    let (lo, hi) = (a.occupancy.min_jt().unwrap(), a.max_jt());
    let mid = (lo + hi) / 2;
    // neighbour hugging the allocation in the first half of its slabs
    let mut other = OccupancySet::new(&g);
    for (jt, slab) in a.occupancy.slabs().filter(|(jt, _)| *jt <= mid) {
        let mut ring = slab.dilated(&g);
        ring.subtract(slab);
        other.insert_slab(jt, &ring);
    }
    let t = feasible_tunnel(a, 1, &other);
    assert!(t.cells.disjoint(&other).unwrap());
    assert!(a.occupancy.is_subset_of(&t.cells).unwrap());
    for (jt, slab) in a.occupancy.slabs() {
        let full = dilation_oracle(&slab.cells().collect(), g.nx, g.ny);
        let got: HashSet<_> = t.cells.slab(jt).unwrap().cells().collect();
        if jt <= mid {
            assert_eq!(got, slab.cells().collect::<HashSet<_>>(), "slab {jt} not clipped");
        } else {
            assert_eq!(got, full, "slab {jt}");
        }
    }

    let wide = run(
        library(),
        &PlannerConfig {
            tunnel_margin: 1,
            ..cfg()
        },
        &common::four_left_turns(),
    )
    .unwrap();
    for (i, a) in wide.tunnels.iter().enumerate() {
        for b in &wide.tunnels[i + 1..] {
            assert!(a.cells.disjoint(&b.cells).unwrap());
        }
    }
}

#[test]
fn exhaustive_optimum_is_feasible_and_no_worse() {
    let lib = library();
    for reqs in [
        common::four_left_turns(),
        vec![
            request(1, 1, Maneuver::GoStraight, 0.0),
            request(2, 2, Maneuver::TurnLeft, 0.3),
            request(3, 3, Maneuver::TurnRight, 0.1),
        ],
    ] {
        let s = run(lib, &cfg(), &reqs).unwrap();
        let rep = exhaustive_optimum(lib, &reqs, &s).unwrap();
        assert!(rep.optimal <= rep.sequential + 1e-9);
        assert_abs_diff_eq!(rep.sequential, s.makespan(), epsilon = 1e-9);
        let sets: Vec<OccupancySet> = reqs
            .iter()
            .zip(&rep.slots)
            .map(|(r, &k)| {
                assert!(k >= floor_of(r));
                lib.get(r.road_from, r.maneuver).unwrap().occupancy.translate(k as i64)
            })
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                assert!(!common::naive_intersect(&sets[i], &sets[j]));
            }
        }
        let span = sets.iter().filter_map(OccupancySet::max_jt).max().unwrap();
        assert_abs_diff_eq!(span as f64 * lib.grid.dt, rep.optimal, epsilon = 1e-9);
        println!("sequential {:.2} s, optimum {:.2} s, gap {:.2} s", rep.sequential, rep.optimal, rep.gap());
    }
}

#[test]
fn queue_length_stays_bounded_under_light_load() {
    // reported, not asserted: running mean of the queue over the last third
    let reqs = generate_flow(&FlowMix::flow2(), 300, 0.15, &IntersectionConfig::default(), 8).unwrap();
    let s = run(library(), &cfg(), &reqs).unwrap();
    let trace = &s.queue_trace;
    let third = trace.len() / 3;
    let mean = |xs: &[(f64, usize)]| xs.iter().map(|q| q.1 as f64).sum::<f64>() / xs.len().max(1) as f64;
    println!(
        "queue mean by thirds: {:.2} {:.2} {:.2}",
        mean(&trace[..third]),
        mean(&trace[third..2 * third]),
        mean(&trace[2 * third..])
    );
    assert_eq!(s.allocations.len(), 300);
}
