use crate::numerics::Rng;
use crate::{Error, Result};

/// Result of one environment transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Step {
    pub state: Vec<f64>,
    pub reward: f64,
    /// Reached a terminal state; bootstrapping stops here.
    pub terminated: bool,
    /// Hit the horizon; the episode ends but the state is not terminal.
    pub truncated: bool,
}

impl Step {
    pub fn done(&self) -> bool {
        self.terminated || self.truncated
    }
}

/// Episodic environment with a box-bounded continuous action space.
pub trait ContinuousEnv: Send {
    fn id(&self) -> &'static str;
    fn state_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn action_low(&self) -> &[f64];
    fn action_high(&self) -> &[f64];
    fn horizon(&self) -> usize;
    /// Steps taken since the last reset.
    fn steps(&self) -> usize;
    fn reset(&mut self, rng: &mut Rng) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> Result<Step>;
}

/// Builds an environment from its string id.
pub fn make_env(id: &str) -> Result<Box<dyn ContinuousEnv>> {
    match id {
        "point-mass" => Ok(Box::new(PointMass::new())),
        "pendulum" => Ok(Box::new(Pendulum::new())),
        other => Err(Error::config(format!("unknown continuous env '{other}'"))),
    }
}

fn check_action(action: &[f64], low: &[f64], high: &[f64]) -> Result<Vec<f64>> {
    if action.len() != low.len() {
        return Err(Error::shape("action", low.len(), action.len()));
    }
    if let Some(bad) = action.iter().find(|a| !a.is_finite()) {
        return Err(Error::InvalidAction(format!("non-finite component {bad}")));
    }
    Ok(action
        .iter()
        .zip(low.iter().zip(high))
        .map(|(a, (lo, hi))| a.clamp(*lo, *hi))
        .collect())
}

/// Two-dimensional point mass that must be driven to the origin.
///
/// State `(x, y, vx, vy)`; actions are accelerations in `[-1, 1]^2`.
/// Each step, with `dt = 0.05`:
///
/// ```text
/// pos' = clip(pos + dt * vel, -2, 2)
/// vel' = clip(vel + dt * a,   -2, 2)
/// r    = -|pos'| - 0.01 |a|^2
/// ```
///
/// The episode terminates once `|pos'| < 0.05` and is truncated after 200
/// steps. Resets draw `pos ~ U[-1, 1]^2` with zero velocity.
#[derive(Clone, Debug)]
pub struct PointMass {
    pos: [f64; 2],
    vel: [f64; 2],
    steps: usize,
}

impl PointMass {
    pub const DT: f64 = 0.05;
    pub const POS_LIMIT: f64 = 2.0;
    pub const VEL_LIMIT: f64 = 2.0;
    pub const GOAL_RADIUS: f64 = 0.05;
    pub const HORIZON: usize = 200;
    const LOW: [f64; 2] = [-1.0, -1.0];
    const HIGH: [f64; 2] = [1.0, 1.0];

    pub fn new() -> Self {
        Self {
            pos: [0.0; 2],
            vel: [0.0; 2],
            steps: 0,
        }
    }

    pub fn set_state(&mut self, pos: [f64; 2], vel: [f64; 2]) {
        self.pos = pos;
        self.vel = vel;
    }

    fn observe(&self) -> Vec<f64> {
        vec![self.pos[0], self.pos[1], self.vel[0], self.vel[1]]
    }
}

impl Default for PointMass {
    fn default() -> Self {
        Self::new()
    }
}

impl ContinuousEnv for PointMass {
    fn id(&self) -> &'static str {
        "point-mass"
    }

    fn state_dim(&self) -> usize {
        4
    }

    fn action_dim(&self) -> usize {
        2
    }

    fn action_low(&self) -> &[f64] {
        &Self::LOW
    }

    fn action_high(&self) -> &[f64] {
        &Self::HIGH
    }

    fn horizon(&self) -> usize {
        Self::HORIZON
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.pos = [rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)];
        self.vel = [0.0; 2];
        self.steps = 0;
        self.observe()
    }

    fn step(&mut self, action: &[f64]) -> Result<Step> {
        let a = check_action(action, &Self::LOW, &Self::HIGH)?;
        for (d, acc) in a.iter().enumerate() {
            self.pos[d] =
                (self.pos[d] + Self::DT * self.vel[d]).clamp(-Self::POS_LIMIT, Self::POS_LIMIT);
            self.vel[d] = (self.vel[d] + Self::DT * acc).clamp(-Self::VEL_LIMIT, Self::VEL_LIMIT);
        }
        self.steps += 1;
        let dist = self.pos[0].hypot(self.pos[1]);
        let effort = a[0] * a[0] + a[1] * a[1];
        Ok(Step {
            state: self.observe(),
            reward: -dist - 0.01 * effort,
            terminated: dist < Self::GOAL_RADIUS,
            truncated: self.steps >= Self::HORIZON,
        })
    }
}

/// Torque-limited pendulum swing-up.
///
/// Angle `theta` is measured from upright. With `g = 10`, `m = l = 1`,
/// `dt = 0.05` and torque `u` in `[-2, 2]`:
///
/// ```text
/// r       = -(wrap(theta)^2 + 0.1 theta_dot^2 + 0.001 u^2)   (pre-step state)
/// theta_dot' = clip(theta_dot + dt * (3g/(2l) sin(theta) + 3/(m l^2) u), -8, 8)
/// theta'     = theta + dt * theta_dot'
/// ```
///
/// Observations are `(cos theta, sin theta, theta_dot)`. Resets draw
/// `theta ~ U[-pi, pi]`, `theta_dot ~ U[-1, 1]`. Episodes always run the full
/// 200-step horizon.
#[derive(Clone, Debug)]
pub struct Pendulum {
    theta: f64,
    theta_dot: f64,
    steps: usize,
}

impl Pendulum {
    pub const G: f64 = 10.0;
    pub const MASS: f64 = 1.0;
    pub const LENGTH: f64 = 1.0;
    pub const DT: f64 = 0.05;
    pub const MAX_SPEED: f64 = 8.0;
    pub const MAX_TORQUE: f64 = 2.0;
    pub const HORIZON: usize = 200;
    const LOW: [f64; 1] = [-Self::MAX_TORQUE];
    const HIGH: [f64; 1] = [Self::MAX_TORQUE];

    pub fn new() -> Self {
        Self {
            theta: std::f64::consts::PI,
            theta_dot: 0.0,
            steps: 0,
        }
    }

    pub fn set_state(&mut self, theta: f64, theta_dot: f64) {
        self.theta = theta;
        self.theta_dot = theta_dot;
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn angular_velocity(&self) -> f64 {
        self.theta_dot
    }

    fn observe(&self) -> Vec<f64> {
        vec![self.theta.cos(), self.theta.sin(), self.theta_dot]
    }
}

impl Default for Pendulum {
    fn default() -> Self {
        Self::new()
    }
}

/// Maps an angle into `[-pi, pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    (x + PI).rem_euclid(2.0 * PI) - PI
}

impl ContinuousEnv for Pendulum {
    fn id(&self) -> &'static str {
        "pendulum"
    }

    fn state_dim(&self) -> usize {
        3
    }

    fn action_dim(&self) -> usize {
        1
    }

    fn action_low(&self) -> &[f64] {
        &Self::LOW
    }

    fn action_high(&self) -> &[f64] {
        &Self::HIGH
    }

    fn horizon(&self) -> usize {
        Self::HORIZON
    }

    fn steps(&self) -> usize {
        self.steps
    }

    fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        use std::f64::consts::PI;
        self.theta = rng.uniform(-PI, PI);
        self.theta_dot = rng.uniform(-1.0, 1.0);
        self.steps = 0;
        self.observe()
    }

    fn step(&mut self, action: &[f64]) -> Result<Step> {
        let u = check_action(action, &Self::LOW, &Self::HIGH)?[0];
        let th = wrap_angle(self.theta);
        let reward = -(th * th + 0.1 * self.theta_dot * self.theta_dot + 0.001 * u * u);
        let accel = 3.0 * Self::G / (2.0 * Self::LENGTH) * self.theta.sin()
            + 3.0 / (Self::MASS * Self::LENGTH * Self::LENGTH) * u;
        self.theta_dot =
            (self.theta_dot + accel * Self::DT).clamp(-Self::MAX_SPEED, Self::MAX_SPEED);
        self.theta += self.theta_dot * Self::DT;
        self.steps += 1;
        Ok(Step {
            state: self.observe(),
            reward,
            terminated: false,
            truncated: self.steps >= Self::HORIZON,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn point_mass_reset_is_seeded() {
        let mut a = PointMass::new();
        let mut b = PointMass::new();
        assert_eq!(a.reset(&mut Rng::new(0)), b.reset(&mut Rng::new(0)));
    }

    #[test]
    fn reset_zeroes_counter() {
        let mut env = PointMass::new();
        let mut rng = Rng::new(1);
        env.reset(&mut rng);
        for _ in 0..7 {
            env.step(&[0.1, 0.2]).unwrap();
        }
        assert_eq!(env.steps(), 7);
        env.reset(&mut rng);
        assert_eq!(env.steps(), 0);
    }

    #[test]
    fn point_mass_goal_is_absorbing() {
        let mut env = PointMass::new();
        env.set_state([0.0, 0.0], [0.0, 0.0]);
        let s = env.step(&[0.0, 0.0]).unwrap();
        assert!(s.terminated);
        assert_eq!(s.reward, 0.0);
    }

    #[test]
    fn point_mass_frozen_without_velocity() {
        let mut env = PointMass::new();
        env.set_state([1.0, 0.0], [0.0, 0.0]);
        let s = env.step(&[0.0, 0.0]).unwrap();
        assert_eq!(&s.state[..2], &[1.0, 0.0]);
        assert_eq!(s.reward, -1.0);
        assert!(!s.done());
    }

    #[test]
    fn point_mass_dynamics() {
        let mut env = PointMass::new();
        env.set_state([0.5, -0.5], [1.0, 0.2]);
        let s = env.step(&[1.0, -0.5]).unwrap();
        let expect = [0.55, -0.49, 1.05, 0.175];
        for (a, b) in s.state.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let r = -(0.55f64.hypot(-0.49)) - 0.01 * (1.0 + 0.25);
        assert!((s.reward - r).abs() < 1e-12);
    }

    #[test]
    fn point_mass_truncates_at_horizon() {
        let mut env = PointMass::new();
        env.reset(&mut Rng::new(2));
        env.set_state([1.5, 1.5], [0.0, 0.0]);
        let mut last = None;
        for _ in 0..PointMass::HORIZON {
            last = Some(env.step(&[0.0, 0.0]).unwrap());
        }
        let last = last.unwrap();
        assert!(last.truncated && !last.terminated);
    }

    #[test]
    fn pendulum_hanging_reward() {
        let mut env = Pendulum::new();
        env.set_state(PI, 0.0);
        let s = env.step(&[0.0]).unwrap();
        assert!((s.reward + PI * PI).abs() < 1e-12);
        assert!((s.reward + 9.8696).abs() < 1e-4);
    }

    #[test]
    fn pendulum_reset_ranges() {
        let mut env = Pendulum::new();
        let mut rng = Rng::new(0);
        for _ in 0..1000 {
            env.reset(&mut rng);
            assert!((-PI..=PI).contains(&env.angle()));
            assert!((-1.0..=1.0).contains(&env.angular_velocity()));
        }
    }

    #[test]
    fn pendulum_never_terminates_early() {
        let mut env = Pendulum::new();
        env.reset(&mut Rng::new(3));
        for t in 1..=Pendulum::HORIZON {
            let s = env.step(&[2.0]).unwrap();
            assert!(!s.terminated);
            assert_eq!(s.truncated, t == Pendulum::HORIZON);
        }
    }

    #[test]
    fn non_finite_action_rejected() {
        let mut env = Pendulum::new();
        assert!(matches!(
            env.step(&[f64::NAN]),
            Err(Error::InvalidAction(_))
        ));
        let mut pm = PointMass::new();
        assert!(matches!(
            pm.step(&[0.0, f64::INFINITY]),
            Err(Error::InvalidAction(_))
        ));
        assert!(matches!(pm.step(&[0.0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn wrap_angle_range() {
        for x in [-10.0, -PI, 0.0, PI, 7.0, 100.0] {
            let w = wrap_angle(x);
            assert!((-PI..PI).contains(&w));
            assert!(((x - w) / (2.0 * PI) - ((x - w) / (2.0 * PI)).round()).abs() < 1e-9);
        }
    }

    #[test]
    fn make_env_ids() {
        assert_eq!(make_env("point-mass").unwrap().state_dim(), 4);
        assert_eq!(make_env("pendulum").unwrap().action_dim(), 1);
        assert!(make_env("max-bias").is_err());
    }
}
