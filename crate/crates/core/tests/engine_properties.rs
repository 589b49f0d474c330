mod common;

use common::*;
use homfib::engine::{
    decide, modular_obstruction, obstruct, search, square_block_obstruction, stabilization_reduce, verify,
    BlockProblem, CandidateSolution, DecideOptions, EngineError, FiberType, ObstructionKind, Provenance,
    SearchOutcome, Verdict,
};
use homfib::linking::GeneratorTerm::{self, E0, E1};
use homfib::IntMatrix;
use num_bigint::BigInt;

const BUDGET: u64 = 100_000_000;

fn vars(c: &CandidateSolution) -> Vec<i64> {
    c.to_vars().iter().map(|v| i64::try_from(v).unwrap()).collect()
}

#[test]
fn search_never_reports_obstructed_problems() {
    for p in [problem(0, vec![E0 { k: 2 }], 1, 0), problem(0, vec![E1 { k: 3 }], 1, 0)] {
        for bound in 0..=6 {
            assert_eq!(search(&p, bound, BUDGET).unwrap(), SearchOutcome::Exhausted { completed_bound: Some(bound) });
        }
    }
}

#[test]
fn search_agrees_with_plain_enumeration() {
    let mut cases: Vec<(BlockProblem, i64)> = Vec::new();
    for (p, q) in lens_pairs(7) {
        for (g, n) in [(0, 1), (0, 2), (1, 0)] {
            cases.push((problem(0, vec![GeneratorTerm::a(p, q)], g, n), 2));
        }
    }
    cases.push((problem(0, vec![E0 { k: 1 }], 1, 0), 1));
    cases.push((problem(1, vec![], 1, 0), 1));
    cases.push((problem(2, vec![], 1, 0), 1));
    cases.push((problem(1, vec![GeneratorTerm::a(3, 1)], 0, 2), 2));
    for (p, bound) in cases {
        let expected = oracle_search(&p, bound);
        match search(&p, bound as u32, BUDGET).unwrap() {
            SearchOutcome::Found { solution, det } => {
                assert_eq!(Some(vars(&solution)), expected);
                assert_eq!(verify(&p, &solution).unwrap().det, det);
            }
            SearchOutcome::Exhausted { .. } => assert_eq!(expected, None),
        }
    }
}

#[test]
fn search_respects_budget() {
    let p = problem(0, vec![E0 { k: 2 }], 1, 0);
    assert_eq!(search(&p, 5, 3u64.pow(7)).unwrap(), SearchOutcome::Exhausted { completed_bound: Some(1) });
    assert_eq!(search(&p, 5, 0).unwrap(), SearchOutcome::Exhausted { completed_bound: None });
}

#[test]
fn square_block_and_full_enumeration_agree() {
    for k in [3, 4] {
        let p = problem(0, vec![E1 { k }], 1, 0);
        let square = square_block_obstruction(&p, 8).unwrap().expect("square-block certificate");
        let full = modular_obstruction(&p, 8, BUDGET).unwrap().expect("full certificate");
        assert_eq!(full.attainable, vec![0, 3, 4]);
        assert!(full.attainable.iter().all(|r| square.attainable.contains(r)));
        assert_eq!(square.kind, ObstructionKind::SquareBlock { det_w: 3 });
        assert!(square.recheck(&p, BUDGET).unwrap());
        assert!(full.recheck(&p, BUDGET).unwrap());
    }
    let p = problem(2, vec![E1 { k: 3 }], 2, 0);
    let c = square_block_obstruction(&p, 8).unwrap().unwrap();
    assert_eq!(c.attainable, vec![0, 3, 4, 5]);
    // non-square X and M0 ≢ 0 are outside the rule
    assert!(matches!(square_block_obstruction(&problem(0, vec![E1 { k: 3 }], 1, 1), 8), Err(EngineError::Inapplicable(_))));
    assert!(matches!(square_block_obstruction(&problem(0, vec![E0 { k: 2 }], 1, 0), 8), Err(EngineError::Inapplicable(_))));
}

#[test]
fn full_residue_sets() {
    let cases = [
        (problem(0, vec![E0 { k: 2 }], 1, 0), vec![0, 4, 5]),
        (problem(0, vec![E1 { k: 3 }], 1, 0), vec![0, 3, 4]),
    ];
    for (p, expected) in cases {
        let c = modular_obstruction(&p, 8, BUDGET).unwrap().unwrap();
        assert_eq!(c.attainable, expected);
    }
    // E0(1) has a genus-one solution, so the units are reached
    assert_eq!(modular_obstruction(&problem(0, vec![E0 { k: 1 }], 1, 0), 8, BUDGET).unwrap(), None);
    assert!(matches!(
        modular_obstruction(&problem(0, vec![E0 { k: 2 }], 1, 0), 8, 1000),
        Err(EngineError::Capacity { .. })
    ));
}

#[test]
fn tampered_certificates_fail_recheck() {
    let p = problem(0, vec![E0 { k: 2 }], 1, 0);
    let mut c = obstruct(&p, &[8], BUDGET).unwrap().unwrap();
    assert!(c.recheck(&p, BUDGET).unwrap());
    c.attainable.push(6);
    assert!(!c.recheck(&p, BUDGET).unwrap());
    let other = problem(0, vec![E0 { k: 1 }], 1, 0);
    let c = obstruct(&p, &[8], BUDGET).unwrap().unwrap();
    assert!(!c.recheck(&other, BUDGET).unwrap());
}

#[test]
fn lens_spaces_have_genus_one_solutions() {
    for (p, q) in lens_pairs(12) {
        let prob = problem(0, vec![GeneratorTerm::a(p, q)], 1, 0);
        match search(&prob, 8, BUDGET).unwrap() {
            SearchOutcome::Found { solution, det } => {
                assert_eq!(verify(&prob, &solution).unwrap().det, det);
                assert!(verify(&prob, &solution).unwrap().is_solution());
            }
            other => panic!("L({p},{q}): {other:?}"),
        }
    }
}

#[test]
fn decide_verdicts_recheck() {
    let opts = DecideOptions { bound: 4, ..Default::default() };
    let cases = [
        problem(0, vec![E0 { k: 1 }], 1, 0),
        problem(0, vec![E0 { k: 2 }], 1, 0),
        problem(0, vec![E1 { k: 2 }], 1, 0),
        problem(0, vec![E1 { k: 3 }], 1, 0),
        problem(1, vec![GeneratorTerm::a(5, 2)], 1, 0),
        problem(2, vec![E1 { k: 3 }], 2, 0),
    ];
    for p in cases {
        match decide(&p, &opts).unwrap() {
            Verdict::Exists { solution, det } => {
                let v = verify(&p, &solution).unwrap();
                assert!(v.is_solution());
                assert_eq!(v.det, det);
            }
            Verdict::NotExists(cert) => assert!(cert.recheck(&p, BUDGET).unwrap()),
            Verdict::Unknown { .. } => {}
        }
    }
    let p = problem(0, vec![E0 { k: 2 }], 1, 0);
    assert!(matches!(decide(&p, &opts).unwrap(), Verdict::NotExists(_)));
    let p = problem(0, vec![E0 { k: 1 }], 1, 0);
    assert!(matches!(decide(&p, &opts).unwrap(), Verdict::Exists { .. }));
}

#[test]
fn printed_fixtures() {
    let e0_1 = problem(0, vec![E0 { k: 1 }], 1, 0);
    assert_eq!(verify(&e0_1, &genus_one_candidate(3, 1, 0, 1, -1, 0, 0)).unwrap().det, BigInt::from(-1));
    for k in 3..=8u32 {
        let p = problem(0, vec![E0 { k }], 1, 0);
        let c = genus_one_candidate(pow2(k - 1), 1, 1, 1, pow2(k - 3) + 1, 0, 0);
        assert_eq!(verify(&p, &c).unwrap().det, BigInt::from(1), "E0({k})");
    }
    let e1_2 = problem(0, vec![E1 { k: 2 }], 1, 0);
    assert_eq!(verify(&e1_2, &genus_one_candidate(0, 1, 1, 1, -1, 0, 11)).unwrap().det, BigInt::from(-1));
    assert_eq!(verify(&e1_2, &genus_one_candidate(-1, 1, 1, 0, 1, 0, 0)).unwrap().det, BigInt::from(7));
}

#[test]
fn stabilization_reduce_pipeline() {
    let s2s1 = problem(1, vec![], 1, 0);
    let c = CandidateSolution::new(IntMatrix::from([[1, 1]]), IntMatrix::zeros(2, 2)).unwrap();
    assert!(verify(&s2s1, &c).unwrap().is_solution());
    let (p, c) = stabilization_reduce(&s2s1, &c).unwrap();
    assert_eq!((p.m(), p.fiber()), (0, FiberType::new(0, 1)));
    assert!(verify(&p, &c).unwrap().is_solution());

    let sum = problem(1, vec![GeneratorTerm::a(3, 1)], 1, 0);
    let SearchOutcome::Found { solution, .. } = search(&sum, 4, BUDGET).unwrap() else { panic!("no solution") };
    let (p, c) = stabilization_reduce(&sum, &solution).unwrap();
    assert_eq!(p.fiber(), FiberType::new(0, 1));
    assert_eq!(p.m0(), &IntMatrix::from([[3]]));
    assert!(verify(&p, &c).unwrap().is_solution());

    let chain = problem(1, vec![GeneratorTerm::a(3, 1)], 0, 3);
    let SearchOutcome::Found { solution, .. } = search(&chain, 3, BUDGET).unwrap() else { panic!("no solution") };
    let (p, c) = stabilization_reduce(&chain, &solution).unwrap();
    assert_eq!(p.fiber(), FiberType::new(0, 2));
    assert!(verify(&p, &c).unwrap().is_solution());
}

#[test]
fn problem_validation() {
    let zero = FiberType::new(0, 0);
    assert!(matches!(
        BlockProblem::new(IntMatrix::from([[1]]), IntMatrix::from([[1]]), zero, Provenance::Custom),
        Err(EngineError::DiskCase)
    ));
    assert!(matches!(
        BlockProblem::new(IntMatrix::from([[1]]), IntMatrix::from([[0]]), FiberType::new(1, 0), Provenance::Custom),
        Err(EngineError::SingularW)
    ));
    assert!(CandidateSolution::new(IntMatrix::zeros(1, 2), IntMatrix::from([[0, 1], [2, 0]])).is_err());
}
