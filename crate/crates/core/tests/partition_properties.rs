use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use zeckgame::analysis::{enumerate_games, Limits, MeasureKind};
use zeckgame::partitions::{all_classes, is_representative, partition_check, representative, synthetic_ks, SchemeKind};
use zeckgame::fib_index;

#[test]
fn representatives_idempotent() {
    for n in 1..=12 {
        for g in enumerate_games(n, 14).unwrap() {
            for scheme in SchemeKind::ALL {
                let (rep, base) = representative(&g, scheme);
                assert!(is_representative(&rep, scheme), "{g} {scheme}");
                assert_eq!(representative(&rep, scheme).1, base);
            }
        }
    }
}

#[test]
fn classes_partition_games() {
    for scheme in SchemeKind::ALL {
        for n in 1..=10 {
            let r = partition_check(n, scheme, &Limits::default()).unwrap();
            assert!(r.passed, "N={n} {scheme}: {:?}", r.violation);
            assert_eq!(r.class_sizes.values().sum::<u64>(), r.games);
            if scheme == SchemeKind::BasicPrefix {
                assert!(r.class_sizes.values().all(|s| s.is_power_of_two()));
            }
        }
    }
}

#[test]
fn basic_parameters_bounded() {
    let half = BigRational::new(1.into(), 2.into());
    for n in 2..=12 {
        let bins = fib_index(n).unwrap() as i64;
        let lo = BigRational::new(BigInt::one(), BigInt::from((2 * bins - 2).max(1)));
        for c in all_classes(n, SchemeKind::BasicPrefix, MeasureKind::RandomPlay, &Limits::default()).unwrap() {
            for (p, &b) in c.bernoulli_params.iter().zip(&c.branch_counts) {
                assert!(*p >= lo && *p <= half, "{} p={p}", c.representative);
                assert_eq!(*p, BigRational::new(BigInt::one(), BigInt::from(b + 1)));
            }
        }
    }
}

#[test]
fn class_probabilities_sum_to_one() {
    for scheme in SchemeKind::ALL {
        for measure in MeasureKind::ALL {
            let classes = all_classes(11, scheme, measure, &Limits::default()).unwrap();
            let total: BigRational = classes.iter().map(|c| c.class_prob.clone()).sum();
            assert!(total.is_one(), "{scheme} {measure}");
        }
    }
}

#[test]
fn adding_fair_delimiter_never_raises_ks() {
    let half = BigRational::new(1.into(), 2.into());
    let mut prev = f64::INFINITY;
    for m in 1..=200 {
        let ks = synthetic_ks(&vec![half.clone(); m]).unwrap();
        assert!(ks <= prev + 1e-12, "m={m}");
        prev = ks;
    }
}
