//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use asep2::duality::{
    build_s, check_bra_identity, check_constructions_agree, check_intertwining, check_sum_rules,
    duality_matrix, DualitySource,
};
use asep2::dynamics::{duality_closure, evolve_sector, point_mass};
use asep2::generator::{build_h_exact, build_h_float};
use asep2::lattice::lemmas::{check_counting_lemmas, check_permutation_identities};
use asep2::measures::{
    canonical_float, check_partition_functions, check_reversibility, grandcanonical, grandcanonical_mixture,
    pure_measure, stationarity_residual, ShockProfile,
};
use asep2::qsym::{check_algebra_relations, check_conjugation_lemma, check_projector_lemma, check_symmetry};
use asep2::{Config, ModelParams, Positions, Report, Sector, Species};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn from_report(r: Report) -> Outcome {
    let n = r.relations.len();
    match r.first_failure() {
        None => Ok(format!("{n} relations")),
        Some(f) => Err(f.to_string()),
    }
}

fn merge(reports: impl IntoIterator<Item = asep2::Result<Report>>) -> Outcome {
    let mut all = Report::new();
    for r in reports {
        all.extend(r.map_err(|e| e.to_string())?);
    }
    from_report(all)
}

fn symmetry() -> Outcome {
    merge((1..=2).map(|l| check_symmetry(&build_h_exact(l)?, l)))
}

fn algebra() -> Outcome {
    merge((1..=2).map(check_algebra_relations))
}

fn reversibility() -> Outcome {
    merge((1..=3).map(|l| Ok(check_reversibility(&build_h_exact(l)?))))
}

fn normalization() -> Outcome {
    from_report(check_partition_functions(3))
}

fn self_duality() -> Outcome {
    merge((1..=2).flat_map(|l| {
        let inter = duality_matrix(DualitySource::ClosedForm, l)
            .and_then(|d| Ok(check_intertwining(&d, &build_h_exact(l)?)));
        [inter, check_constructions_agree(l)]
    }))
}

fn bra_identity() -> Outcome {
    let s = build_s(2).map_err(|e| e.to_string())?;
    from_report(check_bra_identity(&s))
}

fn sum_rules() -> Outcome {
    let mut all = Report::new();
    for l in 1..=2 {
        all.extend(check_sum_rules(l).0);
    }
    from_report(all)
}

fn lemmas() -> Outcome {
    merge([
        Ok(check_counting_lemmas(3)),
        Ok(check_permutation_identities(4, 3)),
        check_conjugation_lemma(1),
        check_conjugation_lemma(2),
        check_projector_lemma(2),
    ])
}

fn grandcanonical_stationarity() -> Outcome {
    let p = ModelParams::from_q_w(2, 2.0, 1.0).map_err(|e| e.to_string())?;
    let h = build_h_float(&p).map_err(|e| e.to_string())?;
    let grid = [-2.0, -0.5, 0.0, 0.7, 1.5];
    let mut worst: f64 = 0.0;
    for nu in grid {
        for mu in grid {
            let m = grandcanonical(nu, mu, 2, p.q());
            worst = worst.max(stationarity_residual(&h, &m.full_vector()));
            let mix = grandcanonical_mixture(nu, mu, 2, p.q());
            worst = worst.max(stationarity_residual(&h, &mix.full_vector()));
        }
    }
    if worst < 1e-12 {
        Ok(format!("max residual {worst:.2e}"))
    } else {
        Err(format!("max residual {worst:.2e}"))
    }
}

fn shock_profiles() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [2.0, 1.2] {
        for nu in [-1.0, 0.0, 1.0] {
            for species in [Species::A, Species::B] {
                let m = pure_measure(species, nu, 3, q);
                let sp = ShockProfile::new(species, nu, q).map_err(|e| e.to_string())?;
                for k in asep2::lattice::sites(3) {
                    worst = worst.max((m.marginal(k, species) - sp.density(k as f64)).abs());
                }
            }
        }
    }
    if worst < 1e-10 {
        Ok(format!("max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:.2e}"))
    }
}

fn duality_closure_check() -> Outcome {
    let p = ModelParams::from_q_w(2, 2.0, 1.0).map_err(|e| e.to_string())?;
    let start: Config = "AA0B".parse().unwrap();
    let z = |x: &[i64], y: &[i64]| Positions::new(2, x.to_vec(), y.to_vec()).unwrap();
    let zs = [
        z(&[-1], &[]),
        z(&[2], &[]),
        z(&[], &[0]),
        z(&[-1], &[2]),
        z(&[1], &[0]),
    ];
    let records = duality_closure(&zs, &[0.25, 1.0, 4.0], &point_mass(&start), &p, 100_000, 2024)
        .map_err(|e| e.to_string())?;
    let within = records.iter().filter(|r| r.z_score.abs() <= 3.0).count();
    let worst = records.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
    let msg = format!("{within}/{} within 3 stderr, max |z| {worst:.2}", records.len());
    if within >= 14 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ergodic_limit() -> Outcome {
    let p = ModelParams::from_q_w(2, 2.0, 1.0).map_err(|e| e.to_string())?;
    let s = Sector::new(2, 1, 1).unwrap();
    let k = evolve_sector(s, &p, 1e3).map_err(|e| e.to_string())?;
    let pi = canonical_float(s, p.q());
    let mut worst: f64 = 0.0;
    for col in 0..k.dim() {
        for (row, w) in pi.weights.iter().enumerate() {
            worst = worst.max((k.prob(row, col) - w).abs());
        }
    }
    if worst < 1e-8 {
        Ok(format!("max deviation {worst:.2e}"))
    } else {
        Err(format!("max deviation {worst:.2e}"))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("symmetry [H,Y],[H,L] = 0, L=1,2", symmetry),
        ("algebra relations, L=1,2", algebra),
        ("reversibility H pi = pi H^T, L=1..3", reversibility),
        ("canonical normalization, 2L<=6", normalization),
        ("self-duality DH = H^T D and D = pi^-1 S, L=1,2", self_duality),
        ("<z|S = <s|Q_z, L=2", bra_identity),
        ("sum rule, L=1,2", sum_rules),
        ("technical lemmas", lemmas),
        ("grandcanonical stationarity", grandcanonical_stationarity),
        ("shock profiles", shock_profiles),
        ("duality closure of Monte-Carlo estimates", duality_closure_check),
        ("ergodic limit of the transition kernel", ergodic_limit),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
