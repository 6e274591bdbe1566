use probe_core::inference::compose_response;
use probe_core::synthesis::Sampler;
use probe_core::verifier::Verifier;
use probe_core::{ConflictMatrix, ConstraintKind, Taxonomy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn stress(n: usize, combos: usize, seed: u64) -> Vec<String> {
    let sampler = Sampler::new(Taxonomy::builtin(), ConflictMatrix::builtin());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let verifier = Verifier::default();
    let mut failures = Vec::new();
    let batches = (0..combos.div_ceil(100)).flat_map(|_| sampler.sample_combinations(n, 100, &mut rng).unwrap());
    for combo in batches.collect::<Vec<_>>() {
        let wanted: Vec<bool> = combo.members.iter().map(|_| rng.random_bool(0.5)).collect();
        match compose_response(&combo.members, &wanted, rng.random()) {
            Ok(text) => {
                let got: Vec<bool> = verifier
                    .verify_all(&text, &combo.members)
                    .unwrap()
                    .into_iter()
                    .map(|v| v.satisfied)
                    .collect();
                if got != wanted {
                    failures.push(format!("{:?} wanted {wanted:?} got {got:?}\n{text}", combo.kinds()));
                }
            }
            Err(e) => failures.push(format!("{:?} wanted {wanted:?}: {e}", combo.kinds())),
        }
    }
    failures
}

#[test]
fn random_combinations_get_exactly_the_wanted_verdicts() {
    for (n, seed) in [(7, 1), (9, 2), (3, 3)] {
        let failures = stress(n, std::env::var("STRESS").ok().and_then(|v| v.parse().ok()).unwrap_or(400), seed);
        assert!(failures.is_empty(), "{} failures, first: {}", failures.len(), failures[0]);
    }
}

#[test]
fn every_kind_alone_can_pass_and_fail() {
    let taxonomy = Taxonomy::builtin();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let verifier = Verifier::default();
    for kind in ConstraintKind::ALL {
        for want in [true, false] {
            for _ in 0..20 {
                let c = taxonomy.instantiate(kind, &mut rng).unwrap();
                let text = compose_response(std::slice::from_ref(&c), &[want], rng.random()).unwrap();
                assert_eq!(verifier.verify(&text, &c).unwrap().satisfied, want, "{kind} {want}\n{text}");
            }
        }
    }
}

