mod common;

use common::{constant_net, small_config};
use sqt_core::agent::{
    train, ActorPolicy, Agent, Batch, EnsembleCritic, QOperator, TrainingConfig, Variant,
};
use sqt_core::envs::make_env;
use sqt_core::numerics::{Activation, MlpParams, OutputActivation, Rng};
use sqt_core::replay::Transition;

fn point_mass_agent(variant: Variant, cfg: TrainingConfig, seed: u64) -> Agent {
    let env = make_env("point-mass").unwrap();
    Agent::new(
        variant,
        cfg,
        env.state_dim(),
        env.action_low(),
        env.action_high(),
        seed,
    )
    .unwrap()
}

fn random_batch(rng: &mut Rng, n: usize, sd: usize, ad: usize) -> Batch {
    let items: Vec<Transition> = (0..n)
        .map(|i| Transition {
            state: (0..sd).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            action: (0..ad).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            reward: rng.uniform(-1.0, 1.0),
            next_state: (0..sd).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            done: i % 5 == 0,
        })
        .collect();
    Batch::from_transitions(items.iter()).unwrap()
}

fn one_state_batch(state: f64, reward: f64) -> Batch {
    let t = Transition {
        state: vec![state],
        action: vec![0.0],
        reward,
        next_state: vec![state],
        done: false,
    };
    Batch::from_transitions([&t]).unwrap()
}

#[test]
fn target_hand_example() {
    let mut cfg = TrainingConfig::for_variant(Variant::Sqt);
    cfg.n_networks = 2;
    cfg.q_operator = QOperator::Min;
    cfg.alpha = 0.5;
    cfg.gamma = 0.9;
    let critic =
        EnsembleCritic::from_networks(1, 1, vec![constant_net(2, 2.0), constant_net(2, 2.8)])
            .unwrap();
    let actor = ActorPolicy::new(&mut Rng::new(0), 1, &[4], &[-1.0], &[1.0]).unwrap();
    let mut agent = Agent::from_parts(Variant::Sqt, cfg, critic, actor, 0).unwrap();
    let t = agent.compute_target(&one_state_batch(0.3, 1.0)).unwrap();
    assert!((t.unpenalized[0] - 2.8).abs() < 1e-12);
    assert!((t.batch_penalty - 0.4).abs() < 1e-12);
    assert!((t.y[0] - 2.6).abs() < 1e-12, "y = {}", t.y[0]);
}

#[test]
fn critic_loss_decreases_on_fixed_targets() {
    let mut agent = point_mass_agent(Variant::Sqt, small_config(Variant::Sqt), 3);
    let batch = random_batch(&mut Rng::new(4), 32, 4, 2);
    let y: Vec<f64> = batch.rewards.clone();
    let mut losses = Vec::new();
    for _ in 0..100 {
        losses.push(agent.critic_update(&batch, &y).unwrap());
    }
    for w in losses.windows(2) {
        assert!(w[1] <= w[0], "loss went up: {} -> {}", w[0], w[1]);
    }
    assert!(losses[99] < losses[0]);
}

fn actor_1d(seed: u64) -> ActorPolicy {
    ActorPolicy::new(&mut Rng::new(seed), 1, &[8], &[-1.0], &[1.0]).unwrap()
}

#[test]
fn actor_maximizes_quadratic() {
    let mut actor = actor_1d(1);
    let states: Vec<f64> = (0..16).map(|i| -1.0 + i as f64 / 8.0).collect();
    for _ in 0..3000 {
        let actions = actor.act_batch(&states, states.len()).unwrap();
        let grad: Vec<f64> = actions.iter().map(|a| -2.0 * (a - 0.3)).collect();
        actor.ascend(&states, states.len(), &grad, 1e-2).unwrap();
    }
    for a in actor.act_batch(&states, states.len()).unwrap() {
        assert!((a - 0.3).abs() < 1e-2, "action {a}");
    }
}

/// `Q(s, a) = -|a - 0.3|` from two ReLU units.
fn peaked_critic() -> MlpParams {
    MlpParams::from_layers(
        &[2, 2, 1],
        Activation::Relu,
        OutputActivation::Linear,
        &[vec![0.0, 1.0, 0.0, -1.0], vec![-1.0, -1.0]],
        &[vec![-0.3, 0.3], vec![0.0]],
    )
    .unwrap()
}

#[test]
fn agent_actor_climbs_critic_peak() {
    let mut cfg = TrainingConfig::for_variant(Variant::Td3);
    cfg.actor_lr = 1e-3;
    let critic =
        EnsembleCritic::from_networks(1, 1, vec![peaked_critic(), peaked_critic()]).unwrap();
    let mut agent = Agent::from_parts(Variant::Td3, cfg, critic, actor_1d(2), 0).unwrap();
    let batch = random_batch(&mut Rng::new(5), 16, 1, 1);
    for _ in 0..5000 {
        agent.actor_update(&batch).unwrap();
    }
    for a in agent.actor().act_batch(&batch.states, batch.size).unwrap() {
        assert!((a - 0.3).abs() < 1e-2, "action {a}");
    }
}

#[test]
fn opposite_critics_leave_actor_unchanged() {
    let mut cfg = TrainingConfig::for_variant(Variant::Sqt);
    cfg.n_networks = 2;
    cfg.q_operator = QOperator::Mean;
    let f = MlpParams::init(
        &mut Rng::new(6),
        &[2, 8, 1],
        Activation::Relu,
        OutputActivation::Linear,
    )
    .unwrap();
    let mut neg = f.clone();
    let last = neg.n_layers() - 1;
    neg.weights_mut(last).iter_mut().for_each(|w| *w = -*w);
    neg.bias_mut(last).iter_mut().for_each(|b| *b = -*b);
    let critic = EnsembleCritic::from_networks(1, 1, vec![f, neg]).unwrap();
    let actor = actor_1d(7);
    let before = actor.network().clone();
    let mut agent = Agent::from_parts(Variant::Sqt, cfg, critic, actor, 0).unwrap();
    let batch = random_batch(&mut Rng::new(8), 16, 1, 1);
    for _ in 0..10 {
        agent.actor_update(&batch).unwrap();
    }
    assert_eq!(agent.actor().network(), &before);
}

#[test]
fn targets_frozen_between_copies() {
    let mut cfg = small_config(Variant::Sqt);
    cfg.target_interval = 1000;
    cfg.target_smoothing = false;
    let mut agent = point_mass_agent(Variant::Sqt, cfg, 9);
    let batch = random_batch(&mut Rng::new(10), 16, 4, 2);
    let first = agent.compute_target(&batch).unwrap();
    let targets = agent.critic().targets().to_vec();
    let actor_target = agent.actor().target_network().clone();
    for _ in 0..50 {
        let stats = agent.update_on(&batch).unwrap();
        assert!(!stats.synced_targets);
    }
    assert_ne!(agent.critic().critics(), &targets[..]);
    assert_eq!(agent.critic().targets(), &targets[..]);
    assert_eq!(agent.actor().target_network(), &actor_target);
    assert_eq!(agent.compute_target(&batch).unwrap(), first);
}

#[test]
fn unit_interval_tracks_live_networks() {
    let mut cfg = small_config(Variant::Td3);
    cfg.target_interval = 1;
    let mut agent = point_mass_agent(Variant::Td3, cfg, 11);
    let batch = random_batch(&mut Rng::new(12), 16, 4, 2);
    for _ in 0..20 {
        assert!(agent.update_on(&batch).unwrap().synced_targets);
        assert_eq!(agent.critic().critics(), agent.critic().targets());
        assert_eq!(agent.actor().network(), agent.actor().target_network());
    }
}

#[test]
fn zero_steps_changes_nothing() {
    let mut agent = point_mass_agent(Variant::Sqt, small_config(Variant::Sqt), 13);
    let before = agent.clone();
    let mut env = make_env("point-mass").unwrap();
    assert!(train(&mut agent, env.as_mut(), 0).unwrap().is_empty());
    assert_eq!(agent.critic().critics(), before.critic().critics());
    assert_eq!(agent.actor().network(), before.actor().network());
    assert_eq!(agent.env_steps(), 0);
    assert_eq!(agent.update_count(), 0);
}

#[test]
fn training_is_deterministic() {
    let run = || {
        let mut agent = point_mass_agent(Variant::Sqt, small_config(Variant::Sqt), 14);
        let mut env = make_env("point-mass").unwrap();
        let eps = train(&mut agent, env.as_mut(), 600).unwrap();
        (agent, eps)
    };
    let (a, ea) = run();
    let (b, eb) = run();
    assert_eq!(ea, eb);
    assert_eq!(a.critic().critics(), b.critic().critics());
    assert_eq!(a.actor().network(), b.actor().network());
    assert!(a.update_count() > 0);
}

#[test]
fn actions_stay_in_bounds() {
    let mut cfg = small_config(Variant::Td3);
    cfg.warmup_steps = 0;
    cfg.noise_std = 3.0;
    let mut agent = point_mass_agent(Variant::Td3, cfg, 15);
    let mut rng = Rng::new(16);
    for _ in 0..10_000 {
        let s: Vec<f64> = (0..4).map(|_| rng.normal(0.0, 50.0)).collect();
        for a in agent.select_action(&s, true).unwrap() {
            assert!((-1.0..=1.0).contains(&a));
        }
    }
}

#[test]
fn zero_noise_is_greedy() {
    let mut cfg = small_config(Variant::Sqt);
    cfg.warmup_steps = 0;
    cfg.noise_std = 0.0;
    let mut agent = point_mass_agent(Variant::Sqt, cfg, 17);
    let s = [0.4, -0.2, 0.1, 0.0];
    assert_eq!(
        agent.select_action(&s, true).unwrap(),
        agent.greedy_action(&s).unwrap()
    );
}
