//! Property tests for the state engine, each against an independent dense oracle.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, RngCore};

use qs2lab::qsim::{Basis, BasisPermutation, RegisterLayout};
use qs2lab::rng::{random_permutation, stream};
use qs2lab::State;

const EPS: f64 = 1e-12;

fn layout_of(widths: &[u32]) -> RegisterLayout {
    RegisterLayout::new(
        widths
            .iter()
            .enumerate()
            .map(|(i, w)| (format!("r{i}"), *w)),
    )
    .unwrap()
}

fn random_amps(dim: usize, rng: &mut dyn RngCore) -> Vec<Complex64> {
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    amps
}

fn pure(widths: &[u32], seed: u64) -> State {
    let layout = layout_of(widths);
    let amps = random_amps(layout.dim(), &mut stream(seed, 0));
    State::from_amplitudes(layout, amps).unwrap()
}

/// Convex mixture of three random pure states.
fn mixed(widths: &[u32], seed: u64) -> State {
    let layout = layout_of(widths);
    let dim = layout.dim();
    let mut rng = stream(seed, 1);
    let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
    for w in [0.6, 0.3, 0.1] {
        let a = random_amps(dim, &mut rng);
        for i in 0..dim {
            for j in 0..dim {
                rho[i * dim + j] += a[i] * a[j].conj() * w;
            }
        }
    }
    State::from_density(layout, rho).unwrap()
}

fn dense(s: &State) -> Vec<Complex64> {
    let dim = s.layout().dim();
    (0..dim * dim).map(|k| s.rho(k / dim, k % dim)).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense Walsh-Hadamard on the `w`-bit register whose value is `(index >> shift)`.
fn dense_hadamard(dim: usize, shift: u32, w: u32) -> Vec<f64> {
    let scale = (1u64 << w) as f64;
    let mask = ((1usize << w) - 1) << shift;
    let mut h = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if i & !mask != j & !mask {
                continue;
            }
            let (a, b) = ((i & mask) >> shift, (j & mask) >> shift);
            let sign = if (a & b).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            h[i * dim + j] = sign / scale.sqrt();
        }
    }
    h
}

fn widths() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..=2, 2..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_permutation_matches_dense_matrix(ws in widths(), seed in any::<u64>()) {
        let layout = layout_of(&ws);
        let dim = layout.dim();
        let table = random_permutation(&mut stream(seed, 2), layout.total_width());
        let perm = BasisPermutation::from_table(layout, table.clone()).unwrap();
        let p = |i: usize, j: usize| if table[j] as usize == i { 1.0 } else { 0.0 };

        let psi = pure(&ws, seed);
        let a = psi.amplitudes().unwrap();
        let expect: Vec<Complex64> =
            (0..dim).map(|i| (0..dim).map(|j| a[j] * p(i, j)).sum()).collect();
        let got = psi.apply_permutation(&perm).unwrap();
        prop_assert!(max_diff(got.amplitudes().unwrap(), &expect) <= EPS);

        let rho = mixed(&ws, seed);
        let mut expect = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        expect[i * dim + j] += rho.rho(k, l) * p(i, k) * p(j, l);
                    }
                }
            }
        }
        let got = rho.apply_permutation(&perm).unwrap();
        prop_assert!(max_diff(&dense(&got), &expect) <= EPS);
    }

    #[test]
    fn permutation_then_inverse_is_identity(ws in widths(), seed in any::<u64>()) {
        let layout = layout_of(&ws);
        let table = random_permutation(&mut stream(seed, 3), layout.total_width());
        let perm = BasisPermutation::from_table(layout, table).unwrap();
        let inv = perm.inverse().unwrap();
        for s in [pure(&ws, seed), mixed(&ws, seed)] {
            let back = s.apply_permutation(&perm).and_then(|t| t.apply_permutation(&inv)).unwrap();
            prop_assert!(max_diff(&dense(&back), &dense(&s)) <= EPS);
            prop_assert!((back.purity() - s.purity()).abs() <= 1e-9);
        }
    }

    #[test]
    fn hadamard_matches_dense_and_is_an_involution(ws in widths(), seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let layout = layout_of(&ws);
        let dim = layout.dim();
        let name = format!("r{}", pick.index(ws.len()));
        let (shift, w) = layout.field(&name).unwrap();
        let h = dense_hadamard(dim, shift, w);

        let psi = pure(&ws, seed);
        let a = psi.amplitudes().unwrap();
        let expect: Vec<Complex64> =
            (0..dim).map(|i| (0..dim).map(|j| a[j] * h[i * dim + j]).sum()).collect();
        let once = psi.hadamard(&name).unwrap();
        prop_assert!(max_diff(once.amplitudes().unwrap(), &expect) <= EPS);
        let twice = once.hadamard(&name).unwrap();
        prop_assert!(max_diff(twice.amplitudes().unwrap(), a) <= EPS);

        let rho = mixed(&ws, seed);
        let twice = rho.hadamard(&name).and_then(|t| t.hadamard(&name)).unwrap();
        prop_assert!(max_diff(&dense(&twice), &dense(&rho)) <= EPS);
    }

    #[test]
    fn partial_trace_is_consistent(ws in widths(), seed in any::<u64>()) {
        let names: Vec<String> = (0..ws.len()).map(|i| format!("r{i}")).collect();
        let first = [names[0].as_str()];
        let two = [names[0].as_str(), names[1].as_str()];
        for s in [pure(&ws, seed), mixed(&ws, seed)] {
            let once = s.partial_trace(&first).unwrap();
            let nested = s.partial_trace(&two).and_then(|t| t.partial_trace(&first)).unwrap();
            let via_mixed = s.to_mixed().and_then(|t| t.partial_trace(&first)).unwrap();
            prop_assert!(max_diff(&dense(&once), &dense(&nested)) <= EPS);
            prop_assert!(max_diff(&dense(&once), &dense(&via_mixed)) <= EPS);
            prop_assert!((once.total_probability() - 1.0).abs() <= 1e-9);

            // Marginal probabilities agree with summing the full distribution.
            let layout = s.layout();
            let mut marginal = vec![0.0; 1 << ws[0]];
            for i in 0..layout.dim() as u64 {
                marginal[layout.extract(i, &names[0]).unwrap() as usize] += s.probability(i);
            }
            for (v, m) in marginal.iter().enumerate() {
                prop_assert!((once.probability(v as u64) - m).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn tensor_then_trace_recovers_factor(ws in widths(), seed in any::<u64>()) {
        let a = pure(&ws, seed);
        let b = State::from_amplitudes(
            RegisterLayout::single("extra", 2).unwrap(),
            random_amps(4, &mut stream(seed, 9)),
        )
        .unwrap();
        let names: Vec<String> = a.layout().names().map(str::to_string).collect();
        let keep: Vec<&str> = names.iter().map(String::as_str).collect();
        let back = a.tensor(&b).and_then(|t| t.partial_trace(&keep)).unwrap();
        prop_assert!(max_diff(&dense(&back), &dense(&a)) <= EPS);
    }

    #[test]
    fn born_totals_and_collapse(ws in widths(), seed in any::<u64>()) {
        let mut rng = stream(seed, 4);
        for s in [pure(&ws, seed), mixed(&ws, seed)] {
            for name in s.layout().names().map(str::to_string).collect::<Vec<_>>() {
                for basis in [Basis::Computational, Basis::Hadamard] {
                    let p = s.outcome_probabilities(&name, basis).unwrap();
                    prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                    prop_assert!(p.iter().all(|x| *x >= -1e-12));
                }
                let (out, post) = s.measure(&name, Basis::Computational, &mut rng).unwrap();
                prop_assert!((post.total_probability() - 1.0).abs() <= 1e-9);
                let after = post.outcome_probabilities(&name, Basis::Computational).unwrap();
                prop_assert!((after[out.value.value() as usize] - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn trace_distance_paths_agree(ws in widths(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (pure(&ws, s1), pure(&ws, s2));
        let closed = a.trace_distance(&b).unwrap();
        let spectral = a.to_mixed().unwrap().trace_distance(&b.to_mixed().unwrap()).unwrap();
        prop_assert!((closed - spectral).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&closed));
        prop_assert!(a.trace_distance(&a).unwrap() <= 1e-6);
    }
}
