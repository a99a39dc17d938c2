use proptest::prelude::*;

use rrqc::channels::{choi, compose, PauliChannel};
use rrqc::protocols::{
    ghz_encode, run_noiseless_protocol, run_switch_protocol, LocalUnitary, MessageState, OutcomePolicy, Ownership,
    Party,
};
use rrqc::qcore::{apply_kraus, c, partial_trace_op, tensor};
use rrqc::qswitch::switch_generic;
use rrqc::random::{random_density, random_unitary, recombine_kraus, rng};

fn pauli_channel() -> impl Strategy<Value = PauliChannel> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("non-zero weights", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| PauliChannel::new(w.map(|x| x / s)).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tensor_mixed_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_unitary(&mut r, &[2]), random_unitary(&mut r, &[2]));
        let (x, y) = (random_unitary(&mut r, &[2]), random_unitary(&mut r, &[2]));
        let lhs = tensor(&a, &b).compose(&tensor(&x, &y)).unwrap();
        let rhs = tensor(&a.compose(&x).unwrap(), &b.compose(&y).unwrap());
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, &[2]);
        let sigma = random_density(&mut r, &[2, 2]);
        let joint = rho.tensor(&sigma);
        prop_assert!(joint.partial_trace(&[0]).unwrap().distance(&rho) < 1e-12);
        prop_assert!(joint.partial_trace(&[1, 2]).unwrap().distance(&sigma) < 1e-12);
        let op = partial_trace_op(joint.operator(), &[2]).unwrap();
        prop_assert!(op.distance(sigma.partial_trace(&[1]).unwrap().operator()) < 1e-12);
    }

    #[test]
    fn pauli_channel_output_is_a_state(ch in pauli_channel(), seed in any::<u64>()) {
        let rho = random_density(&mut rng(seed), &[2]);
        let out = apply_kraus(&rho, &ch.kraus()).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-12);
    }

    #[test]
    fn compose_is_associative(a in pauli_channel(), b in pauli_channel(), cc in pauli_channel()) {
        let l = compose(&compose(&a, &b), &cc).weights();
        let r = compose(&a, &compose(&b, &cc)).weights();
        for k in 0..4 {
            prop_assert!((l[k] - r[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_choi_is_bell_diagonal(ch in pauli_channel()) {
        let j = choi(&ch.kraus()).unwrap();
        let m = j.state().matrix();
        let w = ch.weights();
        // Bell-diagonal: only the |00>,|11> and |01>,|10> blocks are populated
        for (r, col) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            prop_assert!(m[(r, col)].norm() < 1e-12);
        }
        prop_assert!((m[(0, 0)].re - (w[0] + w[3]) / 2.0).abs() < 1e-12);
        prop_assert!((m[(1, 1)].re - (w[1] + w[2]) / 2.0).abs() < 1e-12);
        let mut ev = j.state().eigenvalues();
        let mut ws = w.to_vec();
        ev.sort_by(f64::total_cmp);
        ws.sort_by(f64::total_cmp);
        for k in 0..4 {
            prop_assert!((ev[k] - ws[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn switch_invariant_under_kraus_recombination(a in pauli_channel(), b in pauli_channel(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let input = random_density(&mut r, &[2]);
        let omega = random_density(&mut r, &[2]);
        let (ka, kb) = (a.kraus(), b.kraus());
        let base = switch_generic(&ka, &kb, &input, &omega).unwrap();
        let ra = recombine_kraus(&mut r, &ka, 1);
        let rb = recombine_kraus(&mut r, &kb, 3);
        prop_assert!(switch_generic(&ra, &rb, &input, &omega).unwrap().distance(&base) < 1e-10);
    }

    #[test]
    fn joint_unitary_is_never_local(n in 2usize..=6, f1 in 0usize..6, shift in 1usize..6, seed in any::<u64>()) {
        let f1 = f1 % n;
        let f2 = (f1 + 1 + shift % (n - 1)) % n;
        prop_assume!(f1 != f2);
        let own = Ownership::new((1..=n).map(Party::Receiver).collect());
        let u = random_unitary(&mut rng(seed), &[2, 2]);
        let err = LocalUnitary::new(Party::Receiver(f1 + 1), vec![f1, f2], "U", u, &own).unwrap_err();
        prop_assert!(matches!(err, rrqc::Error::LocalityViolation { .. }), "{err:?}");
    }

    #[test]
    fn ghz_invariant_under_even_z(n in 1usize..=6, mask in 0usize..64, seed in any::<u64>()) {
        let mask = mask & ((1 << n) - 1);
        let msg = MessageState::haar(&mut rng(seed));
        let ket = ghz_encode(&msg, n).unwrap();
        let z = rrqc::channels::PauliString::z_mask(n, mask).operator();
        let v = z.matrix() * ket.amplitudes();
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        // even strings fix the state; odd strings flip the sign of beta
        let mut expect = ket.amplitudes().clone();
        let last = expect.len() - 1;
        expect[last] *= c(sign, 0.0);
        prop_assert!((v - expect).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn branch_probabilities_complete(n in 1usize..=4, x in 1usize..=4, seed in any::<u64>()) {
        let x = 1 + (x - 1) % n;
        let msg = MessageState::haar(&mut rng(seed));
        for run in [
            run_noiseless_protocol(&msg, n, x, OutcomePolicy::Exhaustive).unwrap(),
            run_switch_protocol(&msg, n, x, OutcomePolicy::Exhaustive).unwrap(),
        ] {
            prop_assert!((run.total_probability() - 1.0).abs() < 1e-9);
            prop_assert!(run.min_fidelity() > 1.0 - 1e-9);
        }
    }
}
