mod oracles;

use edamcc::benchmarks::{export_transforms, instantiate_with_rng, load_rotation, write_matrix, write_vector};
use edamcc::rng::{Purpose, Streams};
use edamcc::{instantiate, Algorithm, Error, FunctionId, MccConfig, ProblemInstanceSpec, RunSettings, TransformSource};
use nalgebra::DMatrix;
use rand::Rng;

fn settings(population_size: usize, max_fes: u64, seed: u64) -> RunSettings {
    RunSettings {
        population_size,
        tau: 0.5,
        max_fes,
        seed,
    }
}

fn small_mcc() -> Algorithm {
    Algorithm::Mcc(MccConfig {
        c: 4,
        m_corr: 30,
        ..MccConfig::default()
    })
}

#[test]
fn same_seed_same_trajectory() {
    let p = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F8, 10, 3)).unwrap();
    for alg in [Algorithm::Umda, Algorithm::Emna, Algorithm::Eeda, small_mcc()] {
        let a = alg.run(&p, &settings(60, 3_000, 11)).unwrap();
        let b = alg.run(&p, &settings(60, 3_000, 11)).unwrap();
        assert_eq!(a.generations, b.generations, "{alg}");
        assert_eq!(a.best, b.best);
        let c = alg.run(&p, &settings(60, 3_000, 12)).unwrap();
        assert_ne!(a.best, c.best, "{alg}");
    }
}

#[test]
fn trace_bookkeeping() {
    let p = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F12, 8, 1)).unwrap();
    let size = 40;
    let max_fes = 1_000;
    for alg in [Algorithm::Umda, small_mcc()] {
        let t = alg.run(&p, &settings(size, max_fes, 5)).unwrap();
        assert_eq!(t.generations[0].fes, size as u64);
        assert!(t.generations[0].strong.is_none());
        for w in t.generations.windows(2) {
            assert_eq!(w[1].fes - w[0].fes, size as u64 - 1);
            assert!(w[1].best_fitness <= w[0].best_fitness);
            assert_eq!(w[1].generation, w[0].generation + 1);
        }
        let total = t.total_fes();
        assert!(total >= max_fes && total < max_fes + size as u64);
        assert_eq!(t.final_best(), t.generations.last().unwrap().best_fitness);
        assert!(p.bounds.contains(&t.best.coordinates));
        let has_structure = matches!(alg, Algorithm::Mcc(_));
        assert!(t.generations[1..].iter().all(|g| g.strong.is_some() == has_structure));
    }
}

#[test]
fn umda_solves_small_sphere() {
    let p = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F1, 10, 0)).unwrap();
    let t = Algorithm::Umda.run(&p, &settings(200, 50_000, 1)).unwrap();
    assert!(t.final_best() < 1e-6, "{}", t.final_best());
}

#[test]
fn budget_smaller_than_population_is_rejected() {
    let p = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F1, 4, 0)).unwrap();
    let err = Algorithm::Umda.run(&p, &settings(50, 10, 1)).unwrap_err();
    assert!(matches!(err, Error::BudgetTooSmall { .. }));
}

#[test]
fn emna_survives_rank_deficient_selection() {
    // m = 10 selected points in 30 dimensions: the ML covariance is singular
    let p = instantiate(&ProblemInstanceSpec::seeded(FunctionId::F2, 30, 0)).unwrap();
    let t = Algorithm::Emna.run(&p, &settings(20, 400, 2)).unwrap();
    assert!(t.final_best().is_finite());
}

#[test]
fn benchmark_values_match_naive_definitions() {
    let mut rng = Streams::new(99).stream(0, Purpose::Init);
    for id in FunctionId::ALL {
        for n in [2, 7, 20] {
            let p = instantiate(&ProblemInstanceSpec::seeded(id, n, 4)).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..n)
                    .map(|i| rng.random_range(p.bounds.lower()[i]..p.bounds.upper()[i]))
                    .collect();
                let got = p.evaluate(&x).unwrap();
                let want = oracles::naive_value(&p, &x);
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1.0),
                    "{id} n={n}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn transforms_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for id in [FunctionId::F2, FunctionId::F9, FunctionId::F10, FunctionId::F12, FunctionId::F13] {
        let original = instantiate(&ProblemInstanceSpec::seeded(id, 6, 8)).unwrap();
        export_transforms(&original, dir.path()).unwrap();
        let loaded = instantiate(&ProblemInstanceSpec {
            id,
            n: 6,
            source: TransformSource::Directory(dir.path().to_owned()),
            bias: None,
        })
        .unwrap();
        assert_eq!(loaded, original, "{id}");
    }
}

#[test]
fn transform_file_errors_are_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");

    std::fs::write(&path, "1.0 2.0 x3").unwrap();
    assert!(matches!(load_rotation(&path, 2), Err(Error::TransformParse { index: 2, .. })));

    write_vector(&path, &[1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        load_rotation(&path, 2),
        Err(Error::TransformSize { expected: 4, found: 3, .. })
    ));

    write_matrix(&path, &DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0])).unwrap();
    assert!(matches!(load_rotation(&path, 2), Err(Error::NotOrthogonal { .. })));

    assert!(matches!(load_rotation(&dir.path().join("absent.txt"), 2), Err(Error::Io { .. })));
}

#[test]
fn shared_rng_instantiation_is_deterministic() {
    let mut r1 = Streams::new(1).stream(0, Purpose::Init);
    let mut r2 = Streams::new(1).stream(0, Purpose::Init);
    let a = instantiate_with_rng(FunctionId::F9, 5, 0.0, &mut r1).unwrap();
    let b = instantiate_with_rng(FunctionId::F9, 5, 0.0, &mut r2).unwrap();
    assert_eq!(a, b);
}
