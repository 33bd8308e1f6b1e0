use rand::Rng;

use super::{Observation, PolicySpec};
use crate::environment::{Action, Point, Team};
use crate::Scalar;

// Decision thresholds, in pitch units of the agent's attacking frame.
const SHOT_RANGE: f64 = 0.3;
const SHOT_CORRIDOR: f64 = 0.08;
const NARROW_SHOT_LINE: f64 = 0.25;
const PRESSURE_RADIUS: f64 = 0.08;
const OPEN_RADIUS: f64 = 0.08;
const OWN_GOAL_ZONE_X: f64 = -0.7;
const OWN_GOAL_PRESSURE: f64 = 0.05;
const HESITATION_STEPS: u16 = 3;
const BETTER_POSITION_MARGIN: f64 = 0.15;
const ARRIVE: f64 = 0.015;

/// Chooses the action of `obs.agent`.
///
/// With probability `1 - skill` a uniformly random action replaces the
/// scripted decision. The decision itself is computed in the agent's
/// attacking frame and rotated back for team B.
pub fn act<T: Scalar, R: Rng + ?Sized>(spec: &PolicySpec, obs: &Observation<'_, T>, rng: &mut R) -> Action {
    if spec.skill < 1.0 && rng.random::<f64>() >= spec.skill {
        return Action::ALL[rng.random_range(0..Action::COUNT)];
    }
    let a = if obs.is_carrier() {
        carrier_decision(spec, obs)
    } else {
        off_ball_decision(spec, obs)
    };
    match obs.team() {
        Team::A => a,
        Team::B => a.rotated(),
    }
}

fn lit<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

/// Frame-relative move toward `to`, idle once there.
fn head<T: Scalar>(from: Point<T>, to: Point<T>) -> Action {
    if from.dist(to) <= lit(ARRIVE) {
        Action::Idle
    } else {
        Action::toward(to - from)
    }
}

fn goal<T: Scalar>() -> Point<T> {
    Point::new(T::one(), T::zero())
}

fn carrier_decision<T: Scalar>(spec: &PolicySpec, obs: &Observation<'_, T>) -> Action {
    let flaws = spec.flaws;
    let me = obs.own();
    let pressure = obs.nearest_opponent_dist(me);

    if flaws.own_goal_zone && me.x < lit(OWN_GOAL_ZONE_X) && pressure <= lit(OWN_GOAL_PRESSURE) {
        // turn toward the own goal, then shoot
        return if obs.facing_forward() { Action::W } else { Action::Shoot };
    }

    let to_goal = me.dist(goal());
    let in_range = to_goal <= lit(SHOT_RANGE);
    let narrow = flaws.narrow_angle_shot && T::one() - me.x <= lit(NARROW_SHOT_LINE);
    if narrow || (in_range && me.y.abs() <= lit(SHOT_CORRIDOR)) {
        if !obs.facing_forward() {
            return Action::E;
        }
        if flaws.hesitation && in_range && obs.zone_steps() < HESITATION_STEPS {
            return Action::Idle;
        }
        return Action::Shoot;
    }
    if in_range {
        // work the ball into the central corridor before shooting
        let aim = Point::new(me.x.max(lit(0.75)), T::zero());
        return head(me, aim);
    }

    if let Some(r) = obs.state.pass_receiver(obs.agent) {
        let rp = obs.player(r);
        let pressured = obs
            .opponents()
            .any(|j| {
                let o = obs.player(j);
                o.dist(me) <= lit(PRESSURE_RADIUS) && o.x >= me.x - lit(0.02)
            });
        let open = obs.nearest_opponent_dist(rp) > lit(OPEN_RADIUS);
        let onside = flaws.blind_pass || !obs.state.is_offside(r);
        let pass = if spec.kind.is_bot() {
            let better = rp.dist(goal()) < to_goal - lit(BETTER_POSITION_MARGIN);
            onside && open && (better || pressured)
        } else {
            onside && open && pressured && rp.x > me.x
        };
        if pass {
            return Action::Pass;
        }
    }

    dribble(obs, me)
}

/// Advance toward goal, preferring moves that keep distance from defenders.
fn dribble<T: Scalar>(obs: &Observation<'_, T>, me: Point<T>) -> Action {
    let speed = lit::<T>(0.015);
    let mut best = (Action::E, T::neg_infinity());
    for a in [Action::E, Action::NE, Action::SE, Action::N, Action::S] {
        let d: Point<T> = a.direction().expect("move");
        let next = me + d.scale(speed);
        let clearance = obs.nearest_opponent_dist(next).min(lit(0.12));
        let score = -next.dist(goal()) + lit::<T>(0.6) * clearance;
        if score > best.1 {
            best = (a, score);
        }
    }
    best.0
}

/// Position of `agent`'s team-mate rank among its team (0-based).
fn rank<T: Scalar>(obs: &Observation<'_, T>) -> usize {
    obs.agent - obs.team_indices().start
}

fn lane_y<T: Scalar>(obs: &Observation<'_, T>) -> T {
    let m = obs.team_indices().len();
    if m <= 1 {
        return T::zero();
    }
    lit::<T>(-0.3) + lit::<T>(0.6) * lit::<T>(rank(obs) as f64 / (m - 1) as f64)
}

/// Team-mate (own team, outfield) closest to `p`; ties to the lowest index.
fn closest_of_team<T: Scalar>(obs: &Observation<'_, T>, p: Point<T>) -> usize {
    let mut best = (obs.agent, T::infinity());
    for i in obs.team_indices() {
        let d = obs.player(i).dist2(p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// x of the second-deepest opponent (keeper included), in frame.
fn offside_line<T: Scalar>(obs: &Observation<'_, T>) -> T {
    let keeper = obs.frame(obs.state.keeper(obs.team().opponent()));
    let (mut last, mut second) = (keeper.x, T::neg_infinity());
    for j in obs.opponents() {
        let d = obs.player(j).x;
        if d > last {
            second = last;
            last = d;
        } else if d > second {
            second = d;
        }
    }
    second
}

fn off_ball_decision<T: Scalar>(spec: &PolicySpec, obs: &Observation<'_, T>) -> Action {
    let me = obs.own();
    let ball = obs.ball();

    if obs.incoming_pass() {
        return head(me, ball);
    }

    if obs.in_possession() {
        let mut want_x = (ball.x + lit(0.2)).clamp_to(lit(-0.8), lit(0.85));
        if want_x > T::zero() {
            let line = offside_line(obs).max(ball.x) - lit(0.02);
            want_x = want_x.min(line);
        }
        return head(me, Point::new(want_x, lane_y(obs)));
    }

    let chaser = closest_of_team(obs, ball);
    if obs.opponents_in_possession() {
        if let Some(c) = obs.carrier() {
            let cp = obs.player(c);
            if chaser == obs.agent {
                if spec.flaws.sprint_only_defense {
                    return head(me, cp);
                }
                // cut off the carrier's path toward our goal
                let path = (Point::new(-T::one(), T::zero()) - cp).unit();
                let lead = lit::<T>(0.06).min(cp.dist(me) * T::half());
                return head(me, cp + path.scale(lead));
            }
            return mark(obs, me, Some(c));
        }
        // opponent pass in flight: the nearest player attacks the ball
        if chaser == obs.agent {
            return head(me, ball);
        }
        return mark(obs, me, None);
    }

    // loose ball or shot in flight
    if chaser == obs.agent {
        return head(me, ball);
    }
    let hold_x = (ball.x - lit(0.15)).clamp_to(lit(-0.85), lit(0.6));
    head(me, Point::new(hold_x, lane_y(obs)))
}

/// Goal-side marking of the opponent sharing this agent's rank (skipping the
/// carrier, who is handled by the chaser).
fn mark<T: Scalar>(obs: &Observation<'_, T>, me: Point<T>, carrier: Option<usize>) -> Action {
    let opps = obs.opponents();
    let m = opps.len();
    let mut j = opps.start + rank(obs) % m;
    if Some(j) == carrier {
        j = opps.start + (rank(obs) + 1) % m;
    }
    let o = obs.player(j);
    let spot = Point::new((o.x - lit(0.06)).max(lit(-0.95)), o.y * lit(0.9));
    head(me, spot)
}
