use crate::environment::{FlightKind, MatchState, Point, Team};
use crate::Scalar;

/// One agent's view of the (fully observable) match, expressed in the agent's
/// attacking frame: the pitch is rotated by 180 degrees for team B so every
/// agent attacks toward `+x` and its own goal sits at `x = -1`.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a, T> {
    pub state: &'a MatchState<T>,
    pub agent: usize,
}

impl<'a, T: Scalar> Observation<'a, T> {
    pub fn new(state: &'a MatchState<T>, agent: usize) -> Self {
        Self { state, agent }
    }

    pub fn team(&self) -> Team {
        self.state.team_of(self.agent)
    }

    fn sign(&self) -> T {
        T::lit(self.team().sign() as f64)
    }

    /// Maps an absolute point into this agent's frame (and back: the map is
    /// an involution).
    pub fn frame(&self, p: Point<T>) -> Point<T> {
        p.scale(self.sign())
    }

    pub fn own(&self) -> Point<T> {
        self.frame(self.state.players[self.agent])
    }

    pub fn ball(&self) -> Point<T> {
        self.frame(self.state.ball)
    }

    pub fn player(&self, i: usize) -> Point<T> {
        self.frame(self.state.players[i])
    }

    pub fn teammates(&self) -> impl Iterator<Item = usize> + '_ {
        let me = self.agent;
        self.state.team_range(self.team()).filter(move |&i| i != me)
    }

    pub fn team_indices(&self) -> std::ops::Range<usize> {
        self.state.team_range(self.team())
    }

    pub fn opponents(&self) -> std::ops::Range<usize> {
        self.state.team_range(self.team().opponent())
    }

    pub fn is_carrier(&self) -> bool {
        self.state.carrier == Some(self.agent)
    }

    pub fn carrier(&self) -> Option<usize> {
        self.state.carrier
    }

    /// True when this agent faces the opponent goal.
    pub fn facing_forward(&self) -> bool {
        self.state.facing[self.agent] == self.team().sign()
    }

    pub fn zone_steps(&self) -> u16 {
        self.state.zone_steps[self.agent]
    }

    pub fn step_count(&self) -> usize {
        self.state.step_count
    }

    /// Own team controls the ball (carrying or passing).
    pub fn in_possession(&self) -> bool {
        self.state.possession() == Some(self.team())
    }

    pub fn opponents_in_possession(&self) -> bool {
        self.state.possession() == Some(self.team().opponent())
    }

    pub fn incoming_pass(&self) -> bool {
        matches!(
            self.state.flight.map(|f| f.kind),
            Some(FlightKind::Pass { receiver }) if receiver == self.agent
        )
    }

    /// Distance from `p` (frame) to the nearest opponent outfield player.
    pub fn nearest_opponent_dist(&self, p: Point<T>) -> T {
        self.opponents()
            .map(|j| self.player(j).dist(p))
            .fold(T::infinity(), T::min)
    }
}
