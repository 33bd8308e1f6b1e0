use serde::{Deserialize, Serialize};

use super::{Action, LevelGenotype, MatchConfig, Point, Team};
use crate::rng::{Rule, StreamRng};
use crate::{Error, Result, Scalar};

/// What happened during one step. At most one event is reported per step;
/// goals take precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepEvent {
    None,
    /// `team` scored. `own_goal` is set when the ball was last kicked by the
    /// other team.
    Goal { team: Team, own_goal: bool },
    /// `team` was penalized for an offside pass.
    Offside { team: Team },
    /// `team` won the ball from the opponents (tackle or pass/shot interception).
    Interception { team: Team },
    /// The keeper of `team` stopped a shot.
    Save { team: Team },
    OutOfPlay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Terminal {
    pub scorer: Option<Team>,
    pub own_goal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlightKind {
    Pass { receiver: usize },
    Shot,
}

/// A ball travelling after a pass or a shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flight<T> {
    pub kind: FlightKind,
    pub kicker: usize,
    pub velocity: Point<T>,
    /// Distance left before a pass comes to rest.
    pub remaining: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchState<T> {
    outfield: usize,
    /// Team A's outfield players, then team B's.
    pub players: Vec<Point<T>>,
    /// x-direction each outfield player last moved in; shots go toward the
    /// goal the player faces.
    pub facing: Vec<i8>,
    /// Consecutive steps each player has carried the ball inside the shot zone.
    pub zone_steps: Vec<u16>,
    /// Goalkeepers of team A and team B.
    pub keepers: [Point<T>; 2],
    pub ball: Point<T>,
    pub carrier: Option<usize>,
    pub flight: Option<Flight<T>>,
    pub step_count: usize,
    pub terminal: Option<Terminal>,
    last_possession: Option<Team>,
}

impl<T: Scalar> MatchState<T> {
    /// Instantiates a match from a level.
    pub fn reset(level: &LevelGenotype<T>, config: &MatchConfig<T>) -> Self {
        let m = level.team_size() - 1;
        let players: Vec<_> = (0..2 * m).map(|i| level.player(i)).collect();
        let facing = (0..2 * m).map(|i| if i < m { 1 } else { -1 }).collect();
        let kx = config.field.keeper_home_x;
        let mut state = Self {
            outfield: m,
            players,
            facing,
            zone_steps: vec![0; 2 * m],
            keepers: [Point::new(-kx, T::zero()), Point::new(kx, T::zero())],
            ball: level.ball(),
            carrier: None,
            flight: None,
            step_count: 0,
            terminal: None,
            last_possession: None,
        };
        if let Some(c) = state.nearest_within(state.ball, config.capture_radius, |_| true) {
            state.give_ball(c);
        }
        state
    }

    /// Outfield players per team.
    pub fn outfield(&self) -> usize {
        self.outfield
    }

    pub fn agents(&self) -> usize {
        2 * self.outfield
    }

    pub fn team_of(&self, agent: usize) -> Team {
        if agent < self.outfield {
            Team::A
        } else {
            Team::B
        }
    }

    pub fn team_range(&self, team: Team) -> std::ops::Range<usize> {
        match team {
            Team::A => 0..self.outfield,
            Team::B => self.outfield..2 * self.outfield,
        }
    }

    pub fn keeper(&self, team: Team) -> Point<T> {
        self.keepers[team.index()]
    }

    pub fn ball_velocity(&self) -> Point<T> {
        self.flight.map(|f| f.velocity).unwrap_or_else(Point::zero)
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal.is_some()
    }

    /// Team currently in control of the ball, counting a pass in flight.
    pub fn possession(&self) -> Option<Team> {
        if let Some(c) = self.carrier {
            return Some(self.team_of(c));
        }
        match self.flight {
            Some(Flight {
                kind: FlightKind::Pass { .. },
                kicker,
                ..
            }) => Some(self.team_of(kicker)),
            _ => None,
        }
    }

    /// Nearest outfield player within `radius` of `p` among those accepted by
    /// `filter`. Ties go to the lowest index (team A first).
    fn nearest_within(&self, p: Point<T>, radius: T, filter: impl Fn(usize) -> bool) -> Option<usize> {
        let r2 = radius * radius;
        let mut best: Option<(usize, T)> = None;
        for (i, q) in self.players.iter().enumerate() {
            if !filter(i) {
                continue;
            }
            let d = q.dist2(p);
            if d <= r2 && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    fn nearest_of(&self, p: Point<T>, team: Option<Team>) -> Option<usize> {
        let range = match team {
            Some(t) => self.team_range(t),
            None => 0..self.agents(),
        };
        let mut best: Option<(usize, T)> = None;
        for i in range {
            let d = self.players[i].dist2(p);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    fn give_ball(&mut self, agent: usize) {
        self.carrier = Some(agent);
        self.flight = None;
        self.ball = self.players[agent];
    }

    fn goal_x(&self, attack_sign: i8) -> T {
        T::lit(attack_sign as f64)
    }

    /// Receiver of a pass from `carrier`: the nearest teammate strictly ahead
    /// of the carrier, otherwise the nearest teammate.
    pub fn pass_receiver(&self, carrier: usize) -> Option<usize> {
        let team = self.team_of(carrier);
        let s = T::lit(team.sign() as f64);
        let from = self.players[carrier];
        let mut ahead: Option<(usize, T)> = None;
        let mut any: Option<(usize, T)> = None;
        for i in self.team_range(team) {
            if i == carrier {
                continue;
            }
            let d = self.players[i].dist2(from);
            if any.is_none_or(|(_, bd)| d < bd) {
                any = Some((i, d));
            }
            if s * self.players[i].x > s * from.x && ahead.is_none_or(|(_, bd)| d < bd) {
                ahead = Some((i, d));
            }
        }
        ahead.or(any).map(|(i, _)| i)
    }

    /// Offside position of `agent` relative to the current ball: in the
    /// opponent half and nearer the opponent goal line than both the ball and
    /// the second-last opponent (keeper included).
    pub fn is_offside(&self, agent: usize) -> bool {
        let team = self.team_of(agent);
        let s = T::lit(team.sign() as f64);
        let x = s * self.players[agent].x;
        if !(x > T::zero()) || !(x > s * self.ball.x) {
            return false;
        }
        let opp = team.opponent();
        // deepest and second deepest opponent
        let (mut last, mut second) = (s * self.keeper(opp).x, T::neg_infinity());
        for j in self.team_range(opp) {
            let d = s * self.players[j].x;
            if d > last {
                second = last;
                last = d;
            } else if d > second {
                second = d;
            }
        }
        x > second
    }

    /// Advances the match one step under `actions` (one per outfield player,
    /// team A first). Every stochastic rule draws from its own stream derived
    /// from `(episode_seed, step, rule, agent)`.
    pub fn step(&mut self, actions: &[Action], episode_seed: u64, config: &MatchConfig<T>) -> Result<StepEvent> {
        if self.terminal.is_some() {
            return Err(Error::Contract("step called on a terminal state".into()));
        }
        if actions.len() != self.agents() {
            return Err(Error::InvalidAction(format!(
                "expected {} actions, got {}",
                self.agents(),
                actions.len()
            )));
        }
        let step = self.step_count;
        let mut event = StepEvent::None;
        let mut kicked = None;

        // Kicks.
        if let Some(c) = self.carrier {
            match actions[c] {
                Action::Pass => {
                    if let Some(r) = self.pass_receiver(c) {
                        let team = self.team_of(c);
                        if config.offsides_enabled && self.is_offside(r) {
                            event = StepEvent::Offside { team };
                            let at = self.players[r];
                            if let Some(o) = self.nearest_of(at, Some(team.opponent())) {
                                self.give_ball(o);
                            }
                        } else {
                            let delta = self.players[r] - self.ball;
                            self.flight = Some(Flight {
                                kind: FlightKind::Pass { receiver: r },
                                kicker: c,
                                velocity: delta.unit().scale(config.pass_speed),
                                remaining: delta.norm(),
                            });
                            self.carrier = None;
                            kicked = Some(c);
                        }
                    }
                }
                Action::Shoot => {
                    self.release_shot(c, episode_seed, step, config);
                    kicked = Some(c);
                }
                _ => {}
            }
        }

        // Movement.
        let (xl, xh) = config.field.x_extent;
        let (yl, yh) = config.field.y_extent;
        for (i, &action) in actions.iter().enumerate() {
            if kicked == Some(i) {
                continue;
            }
            let Some(dir) = action.direction::<T>() else { continue };
            let speed = if self.carrier == Some(i) {
                config.carrier_speed
            } else {
                config.move_speed
            };
            let p = self.players[i] + dir.scale(speed);
            self.players[i] = Point::new(p.x.clamp_to(xl, xh), p.y.clamp_to(yl, yh));
            if dir.x > T::zero() {
                self.facing[i] = 1;
            } else if dir.x < T::zero() {
                self.facing[i] = -1;
            }
            if self.carrier == Some(i) {
                self.ball = self.players[i];
            }
        }

        // Tackles.
        if let Some(c) = self.carrier {
            let team = self.team_of(c);
            let r2 = config.capture_radius * config.capture_radius;
            for j in self.team_range(team.opponent()) {
                if self.players[j].dist2(self.players[c]) <= r2
                    && StreamRng::for_rule(episode_seed, step, Rule::Tackle, j).unit() < config.tackle_prob
                {
                    self.give_ball(j);
                    event = StepEvent::Interception { team: team.opponent() };
                    break;
                }
            }
        }

        // Ball flight.
        if let Some(flight) = self.flight {
            let e = self.advance_flight(flight, episode_seed, step, config);
            if e != StepEvent::None {
                event = e;
            }
        }

        // Loose ball.
        if self.carrier.is_none() && self.flight.is_none() && !matches!(event, StepEvent::Goal { .. }) {
            if let Some(c) = self.nearest_within(self.ball, config.capture_radius, |_| true) {
                self.give_ball(c);
            }
        }

        // Keepers shade toward the ball.
        let lim = config.field.keeper_y_limit;
        let want = self.ball.y.clamp_to(-lim, lim);
        for k in self.keepers.iter_mut() {
            let dy = (want - k.y).clamp_to(-config.keeper_speed, config.keeper_speed);
            k.y = k.y + dy;
        }

        // Shot-zone bookkeeping.
        for i in 0..self.agents() {
            self.zone_steps[i] = match self.carrier {
                Some(c) if c == i => {
                    let s = self.team_of(i).sign();
                    let goal = Point::new(self.goal_x(s), T::zero());
                    if self.players[i].dist(goal) <= config.field.shot_zone_radius {
                        self.zone_steps[i].saturating_add(1)
                    } else {
                        0
                    }
                }
                _ => 0,
            };
        }

        self.step_count += 1;

        if let StepEvent::Goal { team, own_goal } = event {
            if config.end_on_score {
                self.terminal = Some(Terminal {
                    scorer: Some(team),
                    own_goal,
                });
            } else {
                self.ball = Point::zero();
                self.carrier = None;
                self.flight = None;
            }
        }
        if self.terminal.is_none() && event == StepEvent::OutOfPlay && config.end_on_out_of_play {
            self.terminal = Some(Terminal {
                scorer: None,
                own_goal: false,
            });
        }
        let now = self.carrier.map(|c| self.team_of(c));
        if self.terminal.is_none() && config.end_on_possession_change {
            if let (Some(prev), Some(cur)) = (self.last_possession, now) {
                if prev != cur {
                    self.terminal = Some(Terminal {
                        scorer: None,
                        own_goal: false,
                    });
                }
            }
        }
        if now.is_some() {
            self.last_possession = now;
        }
        if self.terminal.is_none() && self.step_count >= config.episode_length {
            self.terminal = Some(Terminal {
                scorer: None,
                own_goal: false,
            });
        }
        Ok(event)
    }

    fn release_shot(&mut self, c: usize, seed: u64, step: usize, config: &MatchConfig<T>) {
        let dir = self.facing[c];
        let goal_x = self.goal_x(dir);
        let h = config.field.goal_mouth_half_height.as_f64();
        let d = self.ball.dist(Point::new(goal_x, T::zero())).as_f64();
        let p_on = (1.0 - 0.5 * d).clamp(0.1, 1.0);
        let on_target = StreamRng::for_rule(seed, step, Rule::ShotOnTarget, c).unit() < p_on;
        let mut aim = StreamRng::for_rule(seed, step, Rule::ShotAim, c);
        let target_y = if on_target {
            -h + 2.0 * h * aim.unit()
        } else {
            let side = if aim.unit() < 0.5 { -1.0 } else { 1.0 };
            side * (h + 0.02 + 0.2 * aim.unit())
        };
        let delta = Point::new(goal_x, T::lit(target_y)) - self.ball;
        self.flight = Some(Flight {
            kind: FlightKind::Shot,
            kicker: c,
            velocity: delta.unit().scale(config.shot_speed),
            remaining: T::infinity(),
        });
        self.carrier = None;
    }

    fn advance_flight(
        &mut self,
        flight: Flight<T>,
        seed: u64,
        step: usize,
        config: &MatchConfig<T>,
    ) -> StepEvent {
        let kicker_team = self.team_of(flight.kicker);
        let prev = self.ball;
        let travel = flight.velocity.norm();
        let mut stop = false;
        let mut next = prev + flight.velocity;
        if let FlightKind::Pass { .. } = flight.kind {
            if travel >= flight.remaining {
                next = prev + flight.velocity.unit().scale(flight.remaining);
                stop = true;
            }
        }

        // Opponents on the ball's path may intercept.
        let ir = config.intercept_radius;
        for j in self.team_range(kicker_team.opponent()) {
            if self.players[j].dist_to_segment(prev, next) <= ir
                && StreamRng::for_rule(seed, step, Rule::Intercept, j).unit() < config.intercept_prob
            {
                self.give_ball(j);
                return StepEvent::Interception {
                    team: kicker_team.opponent(),
                };
            }
        }

        if let FlightKind::Pass { .. } = flight.kind {
            // Teammates collect a pass in flight; the kicker cannot.
            let cr = config.capture_radius;
            let mut best: Option<(usize, T)> = None;
            for i in self.team_range(kicker_team) {
                if i == flight.kicker {
                    continue;
                }
                let d = self.players[i].dist_to_segment(prev, next);
                if d <= cr && best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((i, d));
                }
            }
            if let Some((i, _)) = best {
                self.give_ball(i);
                return StepEvent::None;
            }
        }

        let field = config.field;
        let h = field.goal_mouth_half_height;
        if let FlightKind::Shot = flight.kind {
            let s = if flight.velocity.x > T::zero() { 1i8 } else { -1 };
            let st = T::lit(s as f64);
            // Goal at +x is defended by team B.
            let defender = if s > 0 { Team::B } else { Team::A };
            let keeper = self.keeper(defender);
            let kx = keeper.x;
            if st * prev.x < st * kx && st * next.x >= st * kx {
                let t = (kx - prev.x) / (next.x - prev.x);
                let y = prev.y + (next.y - prev.y) * t;
                if (y - keeper.y).abs() <= config.keeper_block_radius {
                    let at = Point::new(kx, y);
                    if let Some(o) = self.nearest_of(at, Some(defender)) {
                        self.give_ball(o);
                    }
                    return StepEvent::Save { team: defender };
                }
            }
            let gx = self.goal_x(s);
            if st * next.x >= st * gx {
                let t = (gx - prev.x) / (next.x - prev.x);
                let y = prev.y + (next.y - prev.y) * t;
                if y.abs() <= h {
                    self.ball = Point::new(gx, y);
                    self.flight = None;
                    let team = defender.opponent();
                    return StepEvent::Goal {
                        team,
                        own_goal: team != kicker_team,
                    };
                }
                return self.out_of_play(next, config);
            }
        }

        let (xl, xh) = field.x_extent;
        let (yl, yh) = field.y_extent;
        if next.x < xl || next.x > xh || next.y < yl || next.y > yh {
            return self.out_of_play(next, config);
        }

        self.ball = next;
        self.flight = if stop {
            None
        } else {
            Some(Flight {
                remaining: flight.remaining - travel,
                ..flight
            })
        };
        StepEvent::None
    }

    /// Ball left the pitch: it is placed back in bounds and the nearest
    /// outfield player restarts with it.
    fn out_of_play(&mut self, at: Point<T>, config: &MatchConfig<T>) -> StepEvent {
        let (xl, xh) = config.field.x_extent;
        let (yl, yh) = config.field.y_extent;
        self.ball = Point::new(at.x.clamp_to(xl, xh), at.y.clamp_to(yl, yh));
        self.flight = None;
        self.carrier = None;
        if let Some(o) = self.nearest_of(self.ball, None) {
            self.give_ball(o);
        }
        StepEvent::OutOfPlay
    }
}
