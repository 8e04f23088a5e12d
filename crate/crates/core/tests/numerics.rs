mod common;

use common::{gradient_check, naive_forward, random_net, random_vec};
use sqt_core::numerics::{adam_step, AdamState, Rng};

#[test]
fn gradients_match_finite_differences() {
    let worst = (0..100)
        .map(|s| gradient_check(s, 1e-5))
        .fold(0.0, f64::max);
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn batched_gradient_is_sum_of_single() {
    let mut rng = Rng::new(11);
    for _ in 0..20 {
        let p = random_net(&mut rng);
        let batch = 1 + rng.below(5);
        let x = random_vec(&mut rng, batch * p.input_dim());
        let u = random_vec(&mut rng, batch * p.output_dim());
        let tape = p.forward_tape(&x, batch).unwrap();
        let full = p.backward(&tape, &u).unwrap();
        let mut summed = p.zeros_like();
        for b in 0..batch {
            let xi = &x[b * p.input_dim()..(b + 1) * p.input_dim()];
            let ui = &u[b * p.output_dim()..(b + 1) * p.output_dim()];
            let g = p.grad(xi, ui).unwrap();
            summed.add_scaled(&g.params, 1.0).unwrap();
            for (a, e) in full.input[b * p.input_dim()..].iter().zip(&g.input) {
                assert!((a - e).abs() < 1e-12);
            }
        }
        for (a, e) in full.params.values().iter().zip(summed.values()) {
            assert!((a - e).abs() < 1e-12);
        }
    }
}

#[test]
fn forward_matches_naive_loops() {
    let mut rng = Rng::new(5);
    for _ in 0..200 {
        let p = random_net(&mut rng);
        let x = random_vec(&mut rng, p.input_dim());
        let fast = p.forward(&x).unwrap();
        let slow = naive_forward(&p, &x);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn forward_is_bit_deterministic() {
    let mut rng = Rng::new(6);
    let p = random_net(&mut rng);
    let x = random_vec(&mut rng, 3 * p.input_dim());
    assert_eq!(
        p.forward_batch(&x, 3).unwrap(),
        p.forward_batch(&x, 3).unwrap()
    );
}

#[test]
fn adam_descends_a_quadratic() {
    // minimize 0.5 |theta - 1|^2 over every parameter
    let mut rng = Rng::new(8);
    let mut p = random_net(&mut rng);
    let mut state = AdamState::new(&p);
    for _ in 0..3000 {
        let mut g = p.clone();
        g.values_mut().iter_mut().for_each(|v| *v -= 1.0);
        (p, state) = adam_step(&p, &g, &state, 1e-2).unwrap();
    }
    assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-3));
    assert_eq!(state.step_count(), 3000);
}
