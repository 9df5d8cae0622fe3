#![allow(dead_code)]

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettings, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use qubosvm::SvmDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Interior-point solve of `max 1ᵀα − ½αᵀ(yyᵀ⊙K)α` over `0 ≤ α ≤ C`,
/// `yᵀα = 0`. Returns `(α, objective)`.
pub fn dense_dual_reference(data: &SvmDataset, c: f64) -> (Vec<f64>, f64) {
    let n = data.n();
    let (mut pi, mut pj, mut pv) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..n {
        for i in 0..=j {
            let k: f64 = data.row(i).iter().zip(data.row(j)).map(|(a, b)| a * b).sum();
            let v = data.label(i) * data.label(j) * k;
            if v != 0.0 {
                pi.push(i);
                pj.push(j);
                pv.push(v);
            }
        }
    }
    let p = CscMatrix::new_from_triplets(n, n, pi, pj, pv);
    let q = vec![-1.0; n];

    // rows: yᵀα = 0 | −α ≤ 0 | α ≤ C
    let (mut ai, mut aj, mut av) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..n {
        ai.push(0);
        aj.push(j);
        av.push(data.label(j));
        ai.push(1 + j);
        aj.push(j);
        av.push(-1.0);
        ai.push(1 + n + j);
        aj.push(j);
        av.push(1.0);
    }
    let a = CscMatrix::new_from_triplets(1 + 2 * n, n, ai, aj, av);
    let mut b = vec![0.0; 1 + n];
    b.extend(std::iter::repeat(c).take(n));
    let cones = [SupportedConeT::ZeroConeT(1), SupportedConeT::NonnegativeConeT(2 * n)];
    let settings = DefaultSettings {
        verbose: false,
        tol_gap_abs: 1e-10,
        tol_gap_rel: 1e-10,
        tol_feas: 1e-10,
        ..DefaultSettings::default()
    };
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings);
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "reference solve failed: {:?}",
        solver.solution.status
    );
    let alpha = solver.solution.x.clone();
    (alpha, -solver.solution.obj_val)
}

/// Two linearly overlapping Gaussian-ish clouds with both classes present.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> SvmDataset {
    loop {
        let y: Vec<i8> = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        if !y.contains(&1) || !y.contains(&-1) {
            continue;
        }
        let rows = y
            .iter()
            .map(|&l| (0..d).map(|_| rng.gen_range(-1.0..1.0) + 0.5 * f64::from(l)).collect())
            .collect();
        return SvmDataset::new("random", rows, y, "generated").unwrap();
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
