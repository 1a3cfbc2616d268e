//! Procedurally generated planar scenes and the safety formulas over them.
//!
//! A scene lives in a square world split into four quadrant rooms. A random
//! subset of quadrants forms the permitted region for geofence runs; unit
//! keep-out boxes form the obstacle set for avoidance runs. With
//! `conflict_bias` on, the generator guarantees that the straight start-goal
//! corridor is contested: at least one keep-out box sits on it, and with two
//! or more rooms the start and goal land in different rooms.

use crate::dynamics::{Action, State};
use crate::stl::{Formula, Predicate, Relation, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

/// Reaching the goal means ending within this distance of it, via Done.
pub const SUCCESS_DISTANCE: f64 = 1.0;

/// Keep-out boxes must have exactly this footprint (up to float tolerance).
pub const AVOID_BOX_AREA: f64 = 1.0;

/// Safety margin used when checking whether a box blocks the start-goal
/// corridor.
pub const CORRIDOR_INFLATION: f64 = 0.5;

const AREA_TOL: f64 = 1e-9;
const GEN_ATTEMPTS: usize = 1000;

/// Axis-aligned box region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_lo: f64,
    pub x_hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, z_lo: f64, z_hi: f64) -> Self {
        Rect { x_lo, x_hi, z_lo, z_hi }
    }

    pub fn centered(cx: f64, cz: f64, width: f64, depth: f64) -> Self {
        Rect {
            x_lo: cx - width / 2.0,
            x_hi: cx + width / 2.0,
            z_lo: cz - depth / 2.0,
            z_hi: cz + depth / 2.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn depth(&self) -> f64 {
        self.z_hi - self.z_lo
    }

    pub fn area(&self) -> f64 {
        self.width() * self.depth()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x_lo + self.x_hi) / 2.0, (self.z_lo + self.z_hi) / 2.0)
    }

    pub fn is_valid(&self) -> bool {
        self.x_lo < self.x_hi && self.z_lo < self.z_hi
    }

    /// Closed containment.
    pub fn contains(&self, x: f64, z: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && z >= self.z_lo && z <= self.z_hi
    }

    /// Signed margin to the nearest face: positive inside, negative outside.
    pub fn containment_margin(&self, x: f64, z: f64) -> f64 {
        (x - self.x_lo)
            .min(self.x_hi - x)
            .min(z - self.z_lo)
            .min(self.z_hi - z)
    }

    pub fn inflate(&self, d: f64) -> Rect {
        Rect {
            x_lo: self.x_lo - d,
            x_hi: self.x_hi + d,
            z_lo: self.z_lo - d,
            z_hi: self.z_hi + d,
        }
    }

    /// Liang-Barsky segment clipping; boundary touches count as hits.
    pub fn intersects_segment(&self, a: (f64, f64), b: (f64, f64)) -> bool {
        let (dx, dz) = (b.0 - a.0, b.1 - a.1);
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (p, q) in [
            (-dx, a.0 - self.x_lo),
            (dx, self.x_hi - a.0),
            (-dz, a.1 - self.z_lo),
            (dz, self.z_hi - a.1),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return false;
                }
            } else {
                let r = q / p;
                if p < 0.0 {
                    t0 = t0.max(r);
                } else {
                    t1 = t1.min(r);
                }
            }
        }
        t0 <= t1
    }

    /// Shifts the rect the minimal amount so it fits inside `outer`.
    fn shifted_into(&self, outer: &Rect) -> Rect {
        let mut r = *self;
        if r.x_lo < outer.x_lo {
            let d = outer.x_lo - r.x_lo;
            r.x_lo += d;
            r.x_hi += d;
        } else if r.x_hi > outer.x_hi {
            let d = r.x_hi - outer.x_hi;
            r.x_lo -= d;
            r.x_hi -= d;
        }
        if r.z_lo < outer.z_lo {
            let d = outer.z_lo - r.z_lo;
            r.z_lo += d;
            r.z_hi += d;
        } else if r.z_hi > outer.z_hi {
            let d = r.z_hi - outer.z_hi;
            r.z_lo -= d;
            r.z_hi -= d;
        }
        r
    }
}

/// Plain planar point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub z: f64,
}

/// Which safety formula a run enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecKind {
    Avoid,
    Geofence,
}

impl fmt::Display for SpecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpecKind::Avoid => "avoid",
            SpecKind::Geofence => "geofence",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("scene generation did not converge after {0} attempts; constraints are too tight")]
    Overconstrained(usize),
    #[error("scene has no geofence rooms")]
    NoRooms,
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A generated navigation task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub seed: u64,
    pub bounds: Rect,
    pub avoid_boxes: Vec<Rect>,
    pub geofence_rooms: Vec<Rect>,
    pub start: State,
    pub goal: Point,
}

impl Scene {
    pub fn goal_distance(&self, x: f64, z: f64) -> f64 {
        (x - self.goal.x).hypot(z - self.goal.z)
    }

    pub fn in_room_union(&self, x: f64, z: f64) -> bool {
        self.geofence_rooms.iter().any(|r| r.contains(x, z))
    }

    /// Checks every structural invariant; loaders run this on untrusted data.
    pub fn validate(&self) -> Result<(), SceneError> {
        let fail = |msg: String| Err(SceneError::Invalid(msg));
        if !self.bounds.is_valid() {
            return fail("bounds are degenerate".into());
        }
        for (i, b) in self.avoid_boxes.iter().enumerate() {
            if !b.is_valid() {
                return fail(format!("avoid box {} is degenerate", i));
            }
            if (b.area() - AVOID_BOX_AREA).abs() > AREA_TOL {
                return fail(format!(
                    "avoid box {} has area {}, expected {}",
                    i,
                    b.area(),
                    AVOID_BOX_AREA
                ));
            }
        }
        for (i, r) in self.geofence_rooms.iter().enumerate() {
            if !r.is_valid() {
                return fail(format!("geofence room {} is degenerate", i));
            }
        }
        if !self.bounds.contains(self.start.x, self.start.z) {
            return fail("start is outside the world bounds".into());
        }
        if let Some(i) = self
            .avoid_boxes
            .iter()
            .position(|b| b.contains(self.start.x, self.start.z))
        {
            return fail(format!("start is inside avoid box {}", i));
        }
        if !self.in_room_union(self.start.x, self.start.z) {
            return fail("start is outside the geofence room union".into());
        }
        if !self.bounds.contains(self.goal.x, self.goal.z) {
            return fail("goal is outside the world bounds".into());
        }
        if !self.in_room_union(self.goal.x, self.goal.z) {
            return fail("goal is outside the geofence room union".into());
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self, SceneError> {
        let scene: Scene = serde_json::from_str(text)?;
        scene.validate()?;
        Ok(scene)
    }
}

/// Loads and validates a scene JSON file.
pub fn load_scene(path: &Path) -> Result<Scene, SceneError> {
    Scene::from_json_str(&std::fs::read_to_string(path)?)
}

/// Knobs for the generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneGenConfig {
    pub world_size: f64,
    pub n_avoid: usize,
    pub n_rooms: usize,
    pub goal_min_dist: f64,
    pub conflict_bias: bool,
}

impl Default for SceneGenConfig {
    fn default() -> Self {
        SceneGenConfig {
            world_size: 10.0,
            n_avoid: 2,
            n_rooms: 2,
            goal_min_dist: 4.0,
            conflict_bias: true,
        }
    }
}

// Each interior face is pushed past the axis so neighbouring rooms overlap
// in a band 2*DOOR_OVERLAP wide instead of merely touching.
const DOOR_OVERLAP: f64 = 0.4;

// Quadrant rooms in fixed order: +x+z, -x+z, -x-z, +x-z.
fn quadrants(half: f64) -> [Rect; 4] {
    let d = DOOR_OVERLAP;
    [
        Rect::new(-d, half, -d, half),
        Rect::new(-half, d, -d, half),
        Rect::new(-half, d, -half, d),
        Rect::new(-d, half, -half, d),
    ]
}

// Unordered pairs of distinct quadrants. Adjacent pairs overlap along a full
// interior band and their union is an easy convex strip; diagonal pairs
// ((0,2) and (1,3)) connect only through the small doorway square around the
// world center, so a straight start-goal line usually leaves the permitted
// region. The mix is what separates the decoding strategies.
const ROOM_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pick_rooms<R: Rng + ?Sized>(n_rooms: usize, half: f64, rng: &mut R) -> Vec<Rect> {
    let all = quadrants(half);
    match n_rooms {
        1 => vec![all[rng.random_range(0..4)]],
        2 => {
            let (a, b) = ROOM_PAIRS[rng.random_range(0..ROOM_PAIRS.len())];
            vec![all[a], all[b]]
        }
        3 => {
            let drop = rng.random_range(0..4);
            (0..4).filter(|&i| i != drop).map(|i| all[i]).collect()
        }
        _ => all.to_vec(),
    }
}

fn point_in_rect<R: Rng + ?Sized>(r: &Rect, margin: f64, rng: &mut R) -> Point {
    Point {
        x: rng.random_range(r.x_lo + margin..r.x_hi - margin),
        z: rng.random_range(r.z_lo + margin..r.z_hi - margin),
    }
}

/// Generates a scene deterministically from `seed`.
pub fn generate_scene(cfg: &SceneGenConfig, seed: u64) -> Result<Scene, SceneError> {
    let half = cfg.world_size / 2.0;
    let bounds = Rect::new(-half, half, -half, half);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rooms = pick_rooms(cfg.n_rooms.clamp(1, 4), half, &mut rng);

    // keep start and goal off room walls, and keep boxes clear of both
    let margin = 0.4;
    let clearance = 0.25;

    let (start_room, goal_room) = if rooms.len() >= 2 {
        let a = rng.random_range(0..rooms.len());
        let mut b = rng.random_range(0..rooms.len() - 1);
        if b >= a {
            b += 1;
        }
        (rooms[a], rooms[b])
    } else {
        (rooms[0], rooms[0])
    };

    let mut placed = None;
    for _ in 0..GEN_ATTEMPTS {
        let s = point_in_rect(&start_room, margin, &mut rng);
        let g = point_in_rect(&goal_room, margin, &mut rng);
        if (s.x - g.x).hypot(s.z - g.z) >= cfg.goal_min_dist {
            placed = Some((s, g));
            break;
        }
    }
    let Some((start_pos, goal)) = placed else {
        return Err(SceneError::Overconstrained(GEN_ATTEMPTS));
    };
    let start = State::new(start_pos.x, start_pos.z, rng.random_range(-PI..PI));

    let mut avoid_boxes = Vec::with_capacity(cfg.n_avoid);
    let clear_of_endpoints = |b: &Rect| {
        !b.inflate(clearance).contains(start.x, start.z)
            && !b.inflate(clearance).contains(goal.x, goal.z)
    };
    for i in 0..cfg.n_avoid {
        let on_corridor = cfg.conflict_bias && i == 0;
        let mut accepted = None;
        for _ in 0..GEN_ATTEMPTS {
            let candidate = if on_corridor {
                // just past the start, shifted off the start-goal line: the
                // box shadows every departure without sitting square on the
                // line, so straight-line runs graze it rather than plowing
                // through, and close encounters happen early in the episode
                let along = rng.random_range(0.8..1.6);
                let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let off = side * rng.random_range(0.7..1.0);
                let (dx, dz) = (goal.x - start.x, goal.z - start.z);
                let len = dx.hypot(dz);
                let (ux, uz) = (dx / len, dz / len);
                Rect::centered(
                    start.x + along * ux - off * uz,
                    start.z + along * uz + off * ux,
                    1.0,
                    1.0,
                )
            } else {
                let inner = bounds.inflate(-0.5);
                let c = point_in_rect(&inner, 0.0, &mut rng);
                Rect::centered(c.x, c.z, 1.0, 1.0)
            };
            let candidate = candidate.shifted_into(&bounds);
            if !clear_of_endpoints(&candidate) {
                continue;
            }
            let crosses_corridor = candidate
                .inflate(CORRIDOR_INFLATION)
                .intersects_segment((start.x, start.z), (goal.x, goal.z));
            // exactly one box owns the corridor; strays stay off the line so
            // the scene has a single intended close call
            if on_corridor != crosses_corridor {
                continue;
            }
            accepted = Some(candidate);
            break;
        }
        let Some(b) = accepted else {
            return Err(SceneError::Overconstrained(GEN_ATTEMPTS));
        };
        avoid_boxes.push(b);
    }

    let scene = Scene { seed, bounds, avoid_boxes, geofence_rooms: rooms, start, goal };
    debug_assert!(scene.validate().is_ok());
    Ok(scene)
}

fn box_conjunction(b: &Rect) -> Formula {
    let preds = [
        Predicate::single("x", Relation::Ge, b.x_lo),
        Predicate::single("x", Relation::Le, b.x_hi),
        Predicate::single("z", Relation::Ge, b.z_lo),
        Predicate::single("z", Relation::Le, b.z_hi),
    ];
    preds
        .into_iter()
        .map(Formula::Pred)
        .reduce(Formula::and)
        .expect("four predicates")
}

// Stand-in for an empty conjunction: satisfied everywhere with a huge margin,
// while still referencing a real channel.
fn tautology() -> Formula {
    Formula::Pred(Predicate::single("x", Relation::Ge, -1e9))
}

/// `G` of the conjunction over boxes of "not inside this box". With no boxes
/// the body degenerates to an always-true predicate with margin around 1e9.
pub fn build_avoid_spec(scene: &Scene) -> Formula {
    let body = scene
        .avoid_boxes
        .iter()
        .map(|b| Formula::not(box_conjunction(b)))
        .reduce(Formula::and)
        .unwrap_or_else(tautology);
    Formula::globally(None, body)
}

/// `G` of the disjunction over rooms of "inside this room".
pub fn build_geofence_spec(scene: &Scene) -> Result<Formula, SceneError> {
    let body = scene
        .geofence_rooms
        .iter()
        .map(box_conjunction)
        .reduce(Formula::or)
        .ok_or(SceneError::NoRooms)?;
    Ok(Formula::globally(None, body))
}

pub fn build_spec(scene: &Scene, kind: SpecKind) -> Result<Formula, SceneError> {
    match kind {
        SpecKind::Avoid => Ok(build_avoid_spec(scene)),
        SpecKind::Geofence => build_geofence_spec(scene),
    }
}

/// Success means the rollout ended with Done within [`SUCCESS_DISTANCE`] of
/// the goal (boundary inclusive).
pub fn check_success(traj: &Trajectory, actions: &[Action], scene: &Scene) -> bool {
    let (Some(xs), Some(zs)) = (traj.channel("x"), traj.channel("z")) else {
        return false;
    };
    let (Some(&x), Some(&z)) = (xs.last(), zs.last()) else {
        return false;
    };
    actions.last() == Some(&Action::Done) && scene.goal_distance(x, z) <= SUCCESS_DISTANCE
}
