use lilypond::fixtures::{f2, f3, f3_cycle};
use lilypond::pointprocess::{sample_poisson, Window};
use lilypond::solver::{solve_fixed_point, Model, SolverError};
use lilypond::structure::{analyze, contact_count_identity, stopping_map};

#[test]
fn stopping_maps_of_fixtures() {
    let s = solve_fixed_point(&f3::<f64>(), Model::Model1).unwrap();
    assert_eq!(stopping_map(&s).unwrap().stops, vec![Some(1), None, Some(1)]);
    let s = solve_fixed_point(&f2::<f64>(), Model::Model2).unwrap();
    assert_eq!(stopping_map(&s).unwrap().stops, vec![Some(1), Some(0)]);
    let s = solve_fixed_point(&f2::<f64>(), Model::Model1).unwrap();
    assert_eq!(stopping_map(&s).unwrap().stops, vec![None, Some(0)]);
}

#[test]
fn three_germs_model1_structure() {
    let s = solve_fixed_point(&f3::<f64>(), Model::Model1).unwrap();
    let r = analyze(&s).unwrap();
    assert_eq!(r.clusters, vec![vec![0, 1, 2]]);
    assert!(r.cycles.is_empty());
    assert_eq!(r.nu, vec![1, 2, 1]);
    assert_eq!(r.contacts, vec![(0, 1), (1, 2)]);
}

#[test]
fn two_germs_model2_doublet() {
    let s = solve_fixed_point(&f2::<f64>(), Model::Model2).unwrap();
    let r = analyze(&s).unwrap();
    assert_eq!(r.clusters.len(), 1);
    assert_eq!(r.doublets, vec![(0, 1)]);
    assert_eq!(r.nu, vec![1, 1]);
    let id = contact_count_identity(&r, &s);
    assert_eq!((id.contacts, id.nu_sum), (1, 2));
    assert!(id.holds());
}

#[test]
fn planted_cycle_structure() {
    let s = solve_fixed_point(&f3_cycle::<f64>(), Model::Model1).unwrap();
    let r = analyze(&s).unwrap();
    assert_eq!(r.clusters.len(), 1);
    assert_eq!(r.cycles, vec![vec![0, 1, 2]]);
    assert_eq!(r.nu, vec![2, 2, 2]);
    let id = contact_count_identity(&r, &s);
    assert_eq!(id.nu_sum, 6);
    assert!(id.holds());

    let s = solve_fixed_point(&f3_cycle::<f64>(), Model::Model2).unwrap();
    let r = analyze(&s).unwrap();
    assert!(r.cycles.is_empty());
    assert_eq!(r.doublets, vec![(0, 2)]);
    assert_eq!(r.clusters.len(), 1);
}

#[test]
fn random_systems_satisfy_structure_laws() {
    let w = Window::square_origin(14.0, 14.0).unwrap();
    for seed in 0..40 {
        let set = sample_poisson::<f64>(1.0, &w, seed).unwrap();
        for model in [Model::Model1, Model::Model2] {
            let s = match solve_fixed_point(&set, model) {
                Ok(s) => s,
                Err(SolverError::ConditionDViolation(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let r = analyze(&s).unwrap_or_else(|e| panic!("seed {seed} {model}: {e}"));
            let id = contact_count_identity(&r, &s);
            assert!(id.holds(), "seed {seed} {model}: {id:?}");
            let finite = s.radii.as_slice();
            for (i, &nu) in r.nu.iter().enumerate() {
                if finite[i].is_finite() {
                    assert!(nu >= 1);
                }
            }
            let infinite_clusters = r
                .clusters
                .iter()
                .filter(|c| c.iter().any(|&i| finite[i].is_infinite()))
                .count();
            let cyclic = r.cycles.len() + r.doublets.len();
            assert_eq!(r.clusters.len(), cyclic + infinite_clusters);
        }
    }
}
