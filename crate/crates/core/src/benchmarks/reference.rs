//! Jerk-limited (7-segment) S-curve motion reference.

use crate::error::{Error, Result};

/// Sampled position/velocity/acceleration reference followed by a
/// constant-position settle segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
    /// First sample index of the settle phase.
    pub settle_start: usize,
    /// Last sample index of the settle phase.
    pub settle_end: usize,
    pub sample_rate: f64,
}

impl ReferenceTrajectory {
    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }
}

/// Piecewise-constant jerk segment: initial state plus duration.
#[derive(Debug, Clone, Copy)]
struct Segment {
    t0: f64,
    jerk: f64,
    p0: f64,
    v0: f64,
    a0: f64,
}

impl Segment {
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let tau = t - self.t0;
        let p = self.p0 + self.v0 * tau + 0.5 * self.a0 * tau * tau
            + self.jerk * tau * tau * tau / 6.0;
        let v = self.v0 + self.a0 * tau + 0.5 * self.jerk * tau * tau;
        let a = self.a0 + self.jerk * tau;
        (p, v, a)
    }
}

/// Build the 7 segments for a unit-jerk move and return them with the move's
/// end position (used to scale jerk to the requested distance).
fn build_segments(jerk: f64, move_time: f64) -> (Vec<Segment>, f64) {
    // Time split: jerk ramps of T/8, constant-acceleration T/8, constant
    // velocity T/4, mirrored for deceleration.
    let tj = move_time / 8.0;
    let ta = move_time / 8.0;
    let tv = move_time / 4.0;
    let durations = [tj, ta, tj, tv, tj, ta, tj];
    let jerks = [jerk, 0.0, -jerk, 0.0, -jerk, 0.0, jerk];
    let mut segments = Vec::with_capacity(7);
    let (mut t0, mut p, mut v, mut a) = (0.0, 0.0, 0.0, 0.0);
    for (dur, j) in durations.iter().zip(jerks) {
        let seg = Segment {
            t0,
            jerk: j,
            p0: p,
            v0: v,
            a0: a,
        };
        let (np, nv, na) = seg.eval(t0 + dur);
        segments.push(seg);
        t0 += dur;
        p = np;
        v = nv;
        a = na;
    }
    (segments, p)
}

/// Jerk-limited S-curve covering `distance` in `move_time`, sampled at `fs`,
/// followed by a constant-position settle segment of `settle_time`.
pub fn scurve_reference(
    distance: f64,
    move_time: f64,
    settle_time: f64,
    fs: f64,
) -> Result<ReferenceTrajectory> {
    if !(move_time > 0.0) || !(settle_time >= 0.0) || !(fs > 0.0) {
        return Err(Error::invalid(
            "move_time and fs must be positive, settle_time non-negative",
        ));
    }
    if !(distance >= 0.0) || !distance.is_finite() {
        return Err(Error::invalid("move distance must be finite and >= 0"));
    }
    let n_move = (move_time * fs).round() as usize;
    let n_settle = (settle_time * fs).round() as usize;
    let n_total = n_move + n_settle + 1;
    if n_move == 0 {
        return Err(Error::invalid("move_time shorter than one sample period"));
    }

    let (_, unit_distance) = build_segments(1.0, move_time);
    let jerk = if distance == 0.0 {
        0.0
    } else {
        distance / unit_distance
    };
    let segments: Vec<Segment> = if jerk == 0.0 {
        Vec::new()
    } else {
        build_segments(jerk, move_time).0
    };

    let mut position = Vec::with_capacity(n_total);
    let mut velocity = Vec::with_capacity(n_total);
    let mut acceleration = Vec::with_capacity(n_total);
    for i in 0..n_total {
        let t = i as f64 / fs;
        let (p, v, a) = if segments.is_empty() {
            (0.0, 0.0, 0.0)
        } else if t >= move_time {
            (distance, 0.0, 0.0)
        } else {
            let seg = segments
                .iter()
                .rev()
                .find(|s| t >= s.t0 - 1e-15)
                .expect("segments cover [0, move_time)");
            seg.eval(t)
        };
        position.push(p);
        velocity.push(v);
        acceleration.push(a);
    }
    Ok(ReferenceTrajectory {
        position,
        velocity,
        acceleration,
        settle_start: n_move,
        settle_end: n_total - 1,
        sample_rate: fs,
    })
}
