use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use revsearch::corpus::{Corpus, FileSpec, Representation};
use revsearch::fuzz::{random_program, FuzzConfig};
use revsearch::invert::invert_program;
use revsearch::metrics::{classify_growth, GrowthClass};
use revsearch::syntax::{parse_expr, pretty_expr};
use revsearch::{check, invert_stmts, parse, pretty, Direction, Program};

fn program(seed: u64) -> Program {
    random_program(&mut ChaCha8Rng::seed_from_u64(seed), &FuzzConfig::default())
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let p = program(seed);
        let text = pretty(&p);
        let back = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(pretty(&back), text);
    }

    #[test]
    fn double_inversion_is_identity(seed in any::<u64>()) {
        let p = program(seed);
        for proc in &p.procedures {
            prop_assert_eq!(&invert_stmts(&invert_stmts(&proc.body)), &proc.body);
        }
    }

    #[test]
    fn inversion_preserves_checkedness(seed in any::<u64>()) {
        let p = program(seed);
        prop_assert!(check(p.clone()).is_ok());
        prop_assert!(check(invert_program(&p)).is_ok());
    }

    #[test]
    fn expressions_round_trip(seed in any::<u64>()) {
        let p = program(seed);
        // every update right-hand side prints to something that reparses to it
        for proc in &p.procedures {
            for s in &proc.body {
                if let revsearch::ast::StmtKind::Update { rhs, .. } = &s.kind {
                    prop_assert_eq!(&parse_expr(&pretty_expr(rhs)).unwrap(), rhs);
                }
            }
        }
    }

    #[test]
    fn linear_searches_round_trip(keys in prop::collection::vec(0i64..6, 0..24), k in 0i64..6) {
        let corpus = Corpus::builtin();
        for (name, rep) in [
            ("srch1", Representation::ArrayWithSentinel),
            ("srch2", Representation::Dlist),
            ("srch3", Representation::Dlist),
            ("srch_count", Representation::ArrayWithSentinel),
            ("srch_list_garbage", Representation::List),
            ("srch_list_reverse", Representation::List),
        ] {
            let case = corpus.get(name).unwrap();
            let file = FileSpec::new(rep, keys.clone(), k);
            let start = case.store(&file);
            let out = case.run(&file).unwrap();
            prop_assert_eq!(case.answer(&out), case.expected(&file).ok());
            let back = case.run_store(out.store, Direction::Backward).unwrap();
            prop_assert_eq!(back.store, start);
        }
    }

    #[test]
    fn binary_search_round_trip(set in prop::collection::btree_set(0i64..200, 1..40), k in 0i64..200) {
        let corpus = Corpus::builtin();
        let case = corpus.get("bsrch").unwrap();
        let file = FileSpec::new(Representation::SortedArray, set.into_iter().collect(), k);
        let start = case.store(&file);
        let out = case.run(&file).unwrap();
        prop_assert_eq!(case.answer(&out), case.expected(&file).ok());
        prop_assert_eq!(out.metrics.garbage_cells, 0);
        let back = case.run_store(out.store, Direction::Backward).unwrap();
        prop_assert_eq!(back.store, start);
    }

    #[test]
    fn growth_class_ignores_scale(c in 1u32..1000) {
        let c = c as f64;
        let sizes = [8u64, 64, 512];
        let linear: Vec<(u64, f64)> = sizes.iter().map(|&n| (n, c * n as f64)).collect();
        let log: Vec<(u64, f64)> = sizes.iter().map(|&n| (n, c * (n as f64).log2())).collect();
        let flat: Vec<(u64, f64)> = sizes.iter().map(|&n| (n, c)).collect();
        prop_assert_eq!(classify_growth(&linear).unwrap(), GrowthClass::Linear);
        prop_assert_eq!(classify_growth(&log).unwrap(), GrowthClass::Logarithmic);
        prop_assert_eq!(classify_growth(&flat).unwrap(), GrowthClass::Constant);
    }
}
