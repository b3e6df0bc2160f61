//! Intersection geometry, vehicle descriptions and the line & circle paths
//! that seed reference-trajectory generation.
//!
//! Layout conventions for the canonical four-road crossing:
//!
//! * the conflict area (CA) is an axis-aligned square centred on the origin,
//!   side `roads * lane_width / 2` (8 m for 4 m lanes);
//! * road `r` leaves the CA along the direction `-(r - 1) * 90°`, so road 1
//!   is east, road 2 south, road 3 west and road 4 north. Seen from above
//!   with the vehicle arriving, the numbering runs counter-clockwise with
//!   respect to the driver's left-hand side, which gives the routing table
//!   `left -> r + 1`, `straight -> r + 2`, `right -> r - 1` (mod 4);
//! * traffic keeps right: each road carries one entry lane and one exit
//!   lane, centred `lane_width / 2` from the road axis.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 1-based road index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Road(pub usize);

impl Road {
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for Road {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Maneuver {
    #[serde(alias = "left")]
    TurnLeft,
    #[serde(alias = "straight")]
    GoStraight,
    #[serde(alias = "right")]
    TurnRight,
}

impl Maneuver {
    pub const ALL: [Maneuver; 3] = [Maneuver::TurnLeft, Maneuver::GoStraight, Maneuver::TurnRight];

    pub fn as_str(self) -> &'static str {
        match self {
            Maneuver::TurnLeft => "left",
            Maneuver::GoStraight => "straight",
            Maneuver::TurnRight => "right",
        }
    }
}

impl fmt::Display for Maneuver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Planar pose; heading in radians measured counter-clockwise from +x.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading }
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.heading.cos(), self.heading.sin()]
    }
}

/// Bicycle-model state: rear-axle-free point model, position of the
/// vehicle centre, heading and forward speed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
}

impl VehicleState {
    pub fn at_rest(pose: Pose) -> Self {
        Self {
            x: pose.x,
            y: pose.y,
            heading: pose.heading,
            speed: 0.0,
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.heading)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleSpec {
    pub length: f64,
    pub width: f64,
    pub wheelbase: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub v_max: f64,
    pub delta_max: f64,
    pub r_long: f64,
    pub r_lat: f64,
}

impl Default for VehicleSpec {
    /// 4 m x 2 m car with 0.5 m redundancy on each side. The actuation
    /// limits let a stationary car reach the hand-over speed of every
    /// smoothed maneuver over an 8 m adjustment stretch and follow the
    /// tightest turn.
    fn default() -> Self {
        Self {
            length: 4.0,
            width: 2.0,
            wheelbase: 2.5,
            a_min: -7.0,
            a_max: 7.0,
            v_max: 15.0,
            delta_max: 1.0,
            r_long: 0.5,
            r_lat: 0.5,
        }
    }
}

impl VehicleSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("width", self.width),
            ("wheelbase", self.wheelbase),
            ("v_max", self.v_max),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("vehicle {name} must be positive, got {v}")));
            }
        }
        if !(self.a_min < 0.0 && self.a_max > 0.0) {
            return Err(Error::Config(format!(
                "need a_min < 0 < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        if !(self.delta_max > 0.0 && self.delta_max < FRAC_PI_2) {
            return Err(Error::Config(format!(
                "delta_max must lie in (0, pi/2), got {}",
                self.delta_max
            )));
        }
        if self.r_long < 0.0 || self.r_lat < 0.0 {
            return Err(Error::Config("redundancy must be non-negative".into()));
        }
        Ok(())
    }

    /// Half-length of the redundancy-inflated footprint.
    pub fn inflated_half_length(&self) -> f64 {
        self.length / 2.0 + self.r_long
    }

    pub fn inflated_half_width(&self) -> f64 {
        self.width / 2.0 + self.r_lat
    }

    /// Half of the diagonal of the bare vehicle rectangle.
    pub fn half_diagonal(&self) -> f64 {
        self.length.hypot(self.width) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntersectionConfig {
    pub roads: usize,
    pub lane_width: f64,
    pub buffer_length: f64,
    /// Part of the buffer used for speed adjustment. Defaults to the whole
    /// buffer.
    pub adjust_length: Option<f64>,
    /// Arc-length spacing of the standard-path samples.
    pub sample_spacing: f64,
    /// Optional routing table: `routing[r - 1] = [left, straight, right]`.
    pub routing: Option<Vec<[usize; 3]>>,
}

impl Default for IntersectionConfig {
    fn default() -> Self {
        Self {
            roads: 4,
            lane_width: 4.0,
            buffer_length: 8.0,
            adjust_length: None,
            sample_spacing: 0.5,
            routing: None,
        }
    }
}

/// Axis-aligned rectangle `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Rect {
    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        p[0] >= self.min[0] - tol
            && p[0] <= self.max[0] + tol
            && p[1] >= self.min[1] - tol
            && p[1] <= self.max[1] + tol
    }
}

impl IntersectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.roads < 2 {
            return Err(Error::Config(format!("need at least 2 roads, got {}", self.roads)));
        }
        if !(self.lane_width > 0.0) {
            return Err(Error::Config("lane_width must be positive".into()));
        }
        if !(self.sample_spacing > 0.0) {
            return Err(Error::Config("sample_spacing must be positive".into()));
        }
        let la = self.adjust_length();
        if !(la > 0.0 && la <= self.buffer_length) {
            return Err(Error::Config(format!(
                "adjust_length must satisfy 0 < L_A <= L_B, got L_A = {la}, L_B = {}",
                self.buffer_length
            )));
        }
        if let Some(table) = &self.routing {
            if table.len() != self.roads {
                return Err(Error::Config("routing table needs one row per road".into()));
            }
            for (r, row) in table.iter().enumerate() {
                if row.iter().any(|&t| t == 0 || t > self.roads || t == r + 1) {
                    return Err(Error::Config(format!("invalid routing row for road {}", r + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn adjust_length(&self) -> f64 {
        self.adjust_length.unwrap_or(self.buffer_length)
    }

    /// Half side of the square conflict area.
    pub fn half_side(&self) -> f64 {
        self.roads as f64 * self.lane_width / 4.0
    }

    pub fn conflict_area(&self) -> Rect {
        let h = self.half_side();
        Rect {
            min: [-h, -h],
            max: [h, h],
        }
    }

    fn check_road(&self, road: Road) -> Result<()> {
        if road.0 == 0 || road.0 > self.roads {
            return Err(Error::RoadOutOfRange {
                road: road.0,
                roads: self.roads,
            });
        }
        Ok(())
    }

    fn check_canonical(&self) -> Result<()> {
        if self.roads != 4 {
            return Err(Error::DegenerateGeometry(format!(
                "line & circle geometry is only defined for 4 roads, got {}",
                self.roads
            )));
        }
        Ok(())
    }

    /// Outward unit vector of a road's axis.
    fn outward(&self, road: Road) -> [f64; 2] {
        let phi = -(road.index() as f64) * FRAC_PI_2;
        [phi.cos(), phi.sin()]
    }

    /// Pose of the entry-lane centre where it meets the CA boundary,
    /// heading into the intersection.
    pub fn entry_pose(&self, road: Road) -> Result<Pose> {
        self.check_road(road)?;
        self.check_canonical()?;
        let e = self.outward(road);
        let d = [-e[0], -e[1]];
        let right = [d[1], -d[0]];
        let h = self.half_side();
        let off = self.lane_width / 2.0;
        Ok(Pose::new(
            e[0] * h + right[0] * off,
            e[1] * h + right[1] * off,
            d[1].atan2(d[0]),
        ))
    }

    /// Pose of the exit-lane centre on the CA boundary, heading away from
    /// the intersection.
    pub fn exit_pose(&self, road: Road) -> Result<Pose> {
        self.check_road(road)?;
        self.check_canonical()?;
        let e = self.outward(road);
        let right = [e[1], -e[0]];
        let h = self.half_side();
        let off = self.lane_width / 2.0;
        Ok(Pose::new(
            e[0] * h + right[0] * off,
            e[1] * h + right[1] * off,
            e[1].atan2(e[0]),
        ))
    }
}

/// Destination road for a maneuver starting on `from`.
pub fn road_target(from: Road, maneuver: Maneuver, cfg: &IntersectionConfig) -> Result<Road> {
    cfg.check_road(from)?;
    let col = match maneuver {
        Maneuver::TurnLeft => 0,
        Maneuver::GoStraight => 1,
        Maneuver::TurnRight => 2,
    };
    if let Some(table) = &cfg.routing {
        return Ok(Road(table[from.index()][col]));
    }
    if cfg.roads != 4 {
        return Err(Error::UnsupportedRoadCount(cfg.roads));
    }
    let shift = [1, 2, 3][col];
    Ok(Road((from.index() + shift) % 4 + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionRequest {
    pub vehicle: u32,
    pub road_from: Road,
    pub maneuver: Maneuver,
    pub road_to: Road,
    /// Time the vehicle reaches the waiting area (s).
    pub arrival_time: f64,
    /// Longitudinal speed at the stop line when the vehicle departs.
    pub initial_speed: f64,
}

impl MotionRequest {
    pub fn new(
        vehicle: u32,
        road_from: Road,
        maneuver: Maneuver,
        arrival_time: f64,
        cfg: &IntersectionConfig,
    ) -> Result<Self> {
        if !(arrival_time >= 0.0) {
            return Err(Error::Config(format!(
                "vehicle {vehicle}: arrival time must be non-negative"
            )));
        }
        Ok(Self {
            vehicle,
            road_from,
            maneuver,
            road_to: road_target(road_from, maneuver, cfg)?,
            arrival_time,
            initial_speed: 0.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Segment {
    Line {
        start: [f64; 2],
        dir: [f64; 2],
        length: f64,
    },
    Arc {
        center: [f64; 2],
        radius: f64,
        start_angle: f64,
        /// Signed sweep, positive counter-clockwise.
        sweep: f64,
    },
}

impl Segment {
    fn length(&self) -> f64 {
        match *self {
            Segment::Line { length, .. } => length,
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    fn pose_at(&self, s: f64) -> Pose {
        match *self {
            Segment::Line { start, dir, .. } => Pose::new(
                start[0] + dir[0] * s,
                start[1] + dir[1] * s,
                dir[1].atan2(dir[0]),
            ),
            Segment::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let sign = sweep.signum();
                let a = start_angle + sign * s / radius;
                Pose::new(
                    center[0] + radius * a.cos(),
                    center[1] + radius * a.sin(),
                    a + sign * FRAC_PI_2,
                )
            }
        }
    }

    fn curvature(&self) -> f64 {
        match *self {
            Segment::Line { .. } => 0.0,
            Segment::Arc { radius, sweep, .. } => sweep.signum() / radius,
        }
    }
}

/// Line & circle path with arc-length parameterisation and equally spaced
/// samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardPath {
    segments: Vec<Segment>,
    total_length: f64,
    /// Effective sample spacing: the largest spacing not exceeding the
    /// requested one that divides the total length evenly.
    pub spacing: f64,
    pub samples: Vec<[f64; 2]>,
    /// Arc-length range of the conflict-area crossing inside the path
    /// (differs from `[0, length]` once stubs are attached).
    pub ca_span: (f64, f64),
    requested_spacing: f64,
}

impl StandardPath {
    fn from_segments(segments: Vec<Segment>, spacing: f64, ca_span: (f64, f64)) -> Self {
        let total_length: f64 = segments.iter().map(Segment::length).sum();
        let n = ((total_length / spacing) - 1e-9).ceil().max(1.0) as usize;
        let eff = total_length / n as f64;
        let mut path = Self {
            segments,
            total_length,
            spacing: eff,
            samples: Vec::with_capacity(n + 1),
            ca_span,
            requested_spacing: spacing,
        };
        path.samples = (0..=n)
            .map(|j| {
                let p = path.pose_at(j as f64 * eff);
                [p.x, p.y]
            })
            .collect();
        path
    }

    /// Straight segment between two points.
    pub fn straight(start: [f64; 2], end: [f64; 2], spacing: f64) -> Result<Self> {
        let dx = end[0] - start[0];
        let dy = end[1] - start[1];
        let length = dx.hypot(dy);
        if !(length > 0.0) {
            return Err(Error::DegenerateGeometry("zero-length straight path".into()));
        }
        Ok(Self::from_segments(
            vec![Segment::Line {
                start,
                dir: [dx / length, dy / length],
                length,
            }],
            spacing,
            (0.0, length),
        ))
    }

    pub fn length(&self) -> f64 {
        self.total_length
    }

    pub fn start_pose(&self) -> Pose {
        self.pose_at(0.0)
    }

    pub fn end_pose(&self) -> Pose {
        self.pose_at(self.total_length)
    }

    /// Sample arc-length positions, `s_j = j * spacing`.
    pub fn sample_arc_lengths(&self) -> Vec<f64> {
        (0..self.samples.len()).map(|j| j as f64 * self.spacing).collect()
    }

    pub fn pose_at(&self, s: f64) -> Pose {
        let mut rest = s.clamp(0.0, self.total_length);
        let last = self.segments.len() - 1;
        for (i, seg) in self.segments.iter().enumerate() {
            let len = seg.length();
            if rest <= len || i == last {
                return seg.pose_at(rest.min(len));
            }
            rest -= len;
        }
        unreachable!("path has at least one segment")
    }

    pub fn curvature_at(&self, s: f64) -> f64 {
        let mut rest = s.clamp(0.0, self.total_length);
        for seg in &self.segments {
            let len = seg.length();
            if rest <= len {
                return seg.curvature();
            }
            rest -= len;
        }
        self.segments.last().map(Segment::curvature).unwrap_or(0.0)
    }

    /// Same path with straight stubs of length `before` and `after`
    /// attached tangentially at both ends.
    pub fn extended(&self, before: f64, after: f64) -> Self {
        let mut segments = Vec::with_capacity(self.segments.len() + 2);
        let start = self.start_pose();
        let end = self.end_pose();
        if before > 0.0 {
            let d = start.direction();
            segments.push(Segment::Line {
                start: [start.x - d[0] * before, start.y - d[1] * before],
                dir: d,
                length: before,
            });
        }
        segments.extend_from_slice(&self.segments);
        if after > 0.0 {
            segments.push(Segment::Line {
                start: [end.x, end.y],
                dir: end.direction(),
                length: after,
            });
        }
        let before = before.max(0.0);
        Self::from_segments(
            segments,
            self.requested_spacing,
            (self.ca_span.0 + before, self.ca_span.1 + before),
        )
    }
}

/// Line & circle path across the CA for `(from, to, maneuver)`.
///
/// Turns are a circular arc tangent to the entry and exit lane centrelines,
/// joined to the CA boundary with straight stubs when the two tangent
/// distances differ.
pub fn standard_path(
    from: Road,
    to: Road,
    maneuver: Maneuver,
    cfg: &IntersectionConfig,
) -> Result<StandardPath> {
    if road_target(from, maneuver, cfg)? != to {
        return Err(Error::Config(format!(
            "road {to} is not reached from road {from} by a {maneuver} maneuver"
        )));
    }
    let entry = cfg.entry_pose(from)?;
    let exit = cfg.exit_pose(to)?;
    let p0 = [entry.x, entry.y];
    let p1 = [exit.x, exit.y];
    let spacing = cfg.sample_spacing;

    if maneuver == Maneuver::GoStraight {
        return StandardPath::straight(p0, p1, spacing);
    }

    let u0 = entry.direction();
    let u1 = exit.direction();
    let cross = u0[0] * u1[1] - u0[1] * u1[0];
    if cross.abs() < 1e-12 {
        return Err(Error::DegenerateGeometry("turn between parallel lanes".into()));
    }
    // corner c = p0 + a0 u0 = p1 - a1 u1
    let w = [p1[0] - p0[0], p1[1] - p0[1]];
    let a0 = (w[0] * u1[1] - w[1] * u1[0]) / cross;
    let a1 = (u0[0] * w[1] - u0[1] * w[0]) / cross;
    if a0 <= 0.0 || a1 <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "lane centrelines meet behind the boundary (a0 = {a0:.3}, a1 = {a1:.3})"
        )));
    }
    let turn = u0[0] * u1[0] + u0[1] * u1[1];
    let half_angle = turn.clamp(-1.0, 1.0).acos() / 2.0;
    let tangent_len = a0.min(a1);
    let radius = tangent_len / half_angle.tan();
    let lead = a0 - tangent_len;
    let tail = a1 - tangent_len;

    let sign = cross.signum();
    let t0 = [p0[0] + u0[0] * lead, p0[1] + u0[1] * lead];
    // centre lies on the inside of the turn
    let normal = [-u0[1] * sign, u0[0] * sign];
    let center = [t0[0] + normal[0] * radius, t0[1] + normal[1] * radius];
    let start_angle = (t0[1] - center[1]).atan2(t0[0] - center[0]);
    let sweep = sign * 2.0 * half_angle;

    let mut segments = Vec::with_capacity(3);
    if lead > 1e-12 {
        segments.push(Segment::Line {
            start: p0,
            dir: u0,
            length: lead,
        });
    }
    segments.push(Segment::Arc {
        center,
        radius,
        start_angle,
        sweep,
    });
    if tail > 1e-12 {
        let t1 = [p1[0] - u1[0] * tail, p1[1] - u1[1] * tail];
        segments.push(Segment::Line {
            start: t1,
            dir: u1,
            length: tail,
        });
    }
    let total: f64 = segments.iter().map(Segment::length).sum();
    Ok(StandardPath::from_segments(segments, spacing, (0.0, total)))
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> IntersectionConfig {
        IntersectionConfig::default()
    }

    #[test]
    fn routing_examples() {
        let c = cfg();
        assert_eq!(road_target(Road(1), Maneuver::GoStraight, &c).unwrap(), Road(3));
        assert_eq!(road_target(Road(1), Maneuver::TurnLeft, &c).unwrap(), Road(2));
        assert_eq!(road_target(Road(2), Maneuver::TurnRight, &c).unwrap(), Road(1));
    }

    #[test]
    fn routing_reaches_three_distinct_roads() {
        let c = cfg();
        for r in 1..=4 {
            let mut targets: Vec<_> = Maneuver::ALL
                .iter()
                .map(|&m| road_target(Road(r), m, &c).unwrap().0)
                .collect();
            targets.sort_unstable();
            targets.dedup();
            assert_eq!(targets.len(), 3);
            assert!(!targets.contains(&r));
        }
    }

    #[test]
    fn other_road_counts_need_a_table() {
        let mut c = cfg();
        c.roads = 3;
        assert!(matches!(
            road_target(Road(1), Maneuver::TurnLeft, &c),
            Err(Error::UnsupportedRoadCount(3))
        ));
        c.routing = Some(vec![[2, 3, 2], [3, 1, 3], [1, 2, 1]]);
        c.validate().unwrap();
        assert_eq!(road_target(Road(2), Maneuver::GoStraight, &c).unwrap(), Road(1));
    }

    #[test]
    fn bad_road_is_rejected() {
        assert!(matches!(
            road_target(Road(5), Maneuver::TurnLeft, &cfg()),
            Err(Error::RoadOutOfRange { road: 5, roads: 4 })
        ));
    }

    #[test]
    fn straight_crossing_is_eight_metres() {
        let c = cfg();
        let p = standard_path(Road(1), Road(3), Maneuver::GoStraight, &c).unwrap();
        assert_abs_diff_eq!(p.length(), 8.0, epsilon = 1e-12);
        assert_eq!(p.samples.len(), 17);
    }

    #[test]
    fn turn_radii_follow_lane_offsets() {
        let c = cfg();
        let right = standard_path(Road(1), Road(4), Maneuver::TurnRight, &c).unwrap();
        // right turn hugs the corner: radius W_L / 2
        assert_abs_diff_eq!(right.length(), FRAC_PI_2 * 2.0, epsilon = 1e-12);
        let left = standard_path(Road(1), Road(2), Maneuver::TurnLeft, &c).unwrap();
        assert_abs_diff_eq!(left.length(), FRAC_PI_2 * 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(left.curvature_at(3.0), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn endpoints_on_lane_centres() {
        let c = cfg();
        for r in 1..=4 {
            for m in Maneuver::ALL {
                let to = road_target(Road(r), m, &c).unwrap();
                let p = standard_path(Road(r), to, m, &c).unwrap();
                let entry = c.entry_pose(Road(r)).unwrap();
                let exit = c.exit_pose(to).unwrap();
                let s = p.start_pose();
                let e = p.end_pose();
                assert_abs_diff_eq!(s.x, entry.x, epsilon = 1e-9);
                assert_abs_diff_eq!(s.y, entry.y, epsilon = 1e-9);
                assert_abs_diff_eq!(e.x, exit.x, epsilon = 1e-9);
                assert_abs_diff_eq!(e.y, exit.y, epsilon = 1e-9);
                assert_abs_diff_eq!(wrap_angle(s.heading - entry.heading), 0.0, epsilon = 1e-9);
                assert_abs_diff_eq!(wrap_angle(e.heading - exit.heading), 0.0, epsilon = 1e-9);
                let ca = c.conflict_area();
                for q in &p.samples {
                    assert!(ca.contains(*q, 1e-9));
                }
            }
        }
    }

    #[test]
    fn extension_adds_collinear_stubs() {
        let c = cfg();
        let p = standard_path(Road(2), Road(3), Maneuver::TurnLeft, &c).unwrap();
        let ext = p.extended(2.5, 2.5);
        assert_abs_diff_eq!(ext.length(), p.length() + 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ext.ca_span.0, 2.5, epsilon = 1e-12);
        let a = ext.pose_at(2.5);
        let b = p.start_pose();
        assert_abs_diff_eq!(a.x, b.x, epsilon = 1e-12);
        assert_abs_diff_eq!(a.y, b.y, epsilon = 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_abs_diff_eq!(wrap_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(wrap_angle(0.5), 0.5, epsilon = 1e-12);
    }
}
