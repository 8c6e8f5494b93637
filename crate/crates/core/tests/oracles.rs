mod common;

use bsm_core::field::LdField;
use bsm_core::highorder::{gauss_seidel_highorder, sweep_material, MaterialFlux, TransportOperatorData};
use bsm_core::loqd::{BoundaryData, QdSystem};
use bsm_core::problem::{build_test, Inflow, InflowMoments, ProblemSpec, TestId};
use bsm_core::{AngularQuadrature, MaterialSpec};
use common::Direction;

fn to_vec(f: &MaterialFlux, dir: usize) -> Vec<[f64; 2]> {
    (0..f.n_cells()).map(|c| f.get(dir, c)).collect()
}

/// Dense single-material transport oracle for a problem with the scattering
/// and coupling sources held fixed.
fn dense_sweep(problem: &ProblemSpec, l: usize, phi: &LdField, coupling: &MaterialFlux) -> Vec<Vec<[f64; 2]>> {
    let quad = problem.quadrature();
    let op = TransportOperatorData::new(problem, l);
    let m = problem.material(l);
    let other = problem.material(1 - l);
    let ratio = problem.probability(1 - l) / (problem.probability(l) * other.lambda);
    let n = problem.n_cells();
    let mut dirs = Vec::new();
    let mut sources = Vec::new();
    for d in 0..quad.n_directions() {
        let mu = quad.mu(d);
        let k = d % quad.n_per_half();
        let inflow = if mu > 0.0 { problem.inflow().left[l][k] } else { problem.inflow().right[l][k] };
        dirs.push(Direction { mu, removal: m.sigma_t + mu.abs() / m.lambda, inflow });
        sources.push(
            (0..n)
                .map(|c| {
                    let cp = coupling.get(d, c);
                    [0, 1].map(|node| 0.5 * m.sigma_s * phi[c][node] + mu.abs() * ratio * cp[node] + 0.5 * m.q)
                })
                .collect::<Vec<_>>(),
        );
        assert!((op.removal[d] - dirs[d].removal).abs() < 1e-15);
    }
    common::transport_dense(problem.cell_width(), &dirs, &sources)
}

#[test]
fn sweep_matches_dense_solve_on_four_cells() {
    let base = build_test(TestId::A1, 4, 1).unwrap();
    let quad = AngularQuadrature::double_gauss_legendre(1).unwrap();
    let inflow = Inflow { left: [vec![0.7], vec![0.2]], right: [vec![0.4], vec![1.1]] };
    let problem = ProblemSpec::new(*base.materials(), 3.0, 4, quad, inflow).unwrap();
    let mut rnd = common::lcg(11);
    let phi = LdField::from_nodes((0..4).map(|_| [rnd(), rnd()]).collect());
    let mut coupling = MaterialFlux::zeros(4, 2);
    for d in 0..2 {
        for c in 0..4 {
            coupling.set(d, c, [rnd(), rnd()]);
        }
    }
    for l in 0..2 {
        let psi = sweep_material(&problem, l, &phi, &coupling).unwrap();
        let oracle = dense_sweep(&problem, l, &phi, &coupling);
        for d in 0..2 {
            let err = common::max_rel_diff(&to_vec(&psi, d), &oracle[d]);
            assert!(err <= 1e-12, "material {l} direction {d}: {err}");
        }
    }
}

#[test]
fn sweep_matches_dense_solve_in_s4_with_thick_cells() {
    let problem = build_test(TestId::B2, 5, 2).unwrap();
    let mut rnd = common::lcg(5);
    let phi = LdField::from_nodes((0..5).map(|_| [10.0 * rnd(), 10.0 * rnd()]).collect());
    let mut coupling = MaterialFlux::zeros(5, 4);
    for d in 0..4 {
        for c in 0..5 {
            coupling.set(d, c, [rnd(), rnd()]);
        }
    }
    for l in 0..2 {
        let psi = sweep_material(&problem, l, &phi, &coupling).unwrap();
        let oracle = dense_sweep(&problem, l, &phi, &coupling);
        for d in 0..4 {
            assert!(common::max_rel_diff(&to_vec(&psi, d), &oracle[d]) <= 1e-12);
        }
    }
}

/// Residual of the coupled two-material system, evaluated by solving each
/// material with the dense oracle against the other's flux.
fn coupled_residual(problem: &ProblemSpec, phi: [&LdField; 2], psi: &[MaterialFlux; 2]) -> f64 {
    let nd = problem.quadrature().n_directions();
    let mut worst: f64 = 0.0;
    for l in 0..2 {
        let oracle = dense_sweep(problem, l, phi[l], &psi[1 - l]);
        for d in 0..nd {
            worst = worst.max(common::max_rel_diff(&to_vec(&psi[l], d), &oracle[d]));
        }
    }
    worst
}

#[test]
fn gauss_seidel_residual_decreases_monotonically() {
    let problem = build_test(TestId::B2, 6, 2).unwrap();
    let phi = [LdField::constant(6, 1.0), LdField::constant(6, 2.0)];
    let start = MaterialFlux::zeros(6, 4);
    let mut previous = f64::INFINITY;
    for cycles in 1..=6 {
        let psi = gauss_seidel_highorder(&problem, [&phi[0], &phi[1]], &start, cycles).unwrap();
        let r = coupled_residual(&problem, [&phi[0], &phi[1]], &psi);
        assert!(r < previous, "cycle {cycles}: residual {r} did not drop below {previous}");
        previous = r;
    }
}

#[test]
fn dp1_reduction_matches_independent_assembly() {
    for seed in [21, 22, 23] {
        let err = common::dp1_case_error(seed);
        assert!(err <= 1e-12, "seed {seed}: {err}");
    }
}

#[test]
fn diffusion_reduction_matches_independent_assembly() {
    for seed in [8, 9, 10] {
        let err = common::diffusion_case_error(seed);
        assert!(err <= 1e-12, "seed {seed}: {err}");
    }
}

/// Cell-average error of the quasidiffusion solve for
/// `phi = 1 + a x (X - x)`, `J = -phi'/(3 sigma_t)`.
fn manufactured_error(n: usize) -> f64 {
    let (length, sa, st, a) = (2.0, 0.5, 1.5, 0.8);
    let h = length / n as f64;
    let phi = |x: f64| 1.0 + a * x * (length - x);
    let cur = |x: f64| -a * (length - 2.0 * x) / (3.0 * st);
    let q = |x: f64| 2.0 * a / (3.0 * st) + sa * phi(x);
    // L2 projection of q onto LD: solve M c = int q b with Simpson's rule,
    // exact for the cubic integrands.
    let m = common::mass(h);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let nodes: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let x0 = i as f64 * h;
            let simpson = |f: &dyn Fn(f64) -> f64| h / 6.0 * (f(x0) + 4.0 * f(x0 + h / 2.0) + f(x0 + h));
            let bl = simpson(&|x| q(x) * (x0 + h - x) / h);
            let br = simpson(&|x| q(x) * (x - x0) / h);
            [(m[1][1] * bl - m[0][1] * br) / det, (m[0][0] * br - m[1][0] * bl) / det]
        })
        .collect();
    let coefficients = common::diffusion_coefficients(&vec![[sa; 2]; n], &vec![[st; 2]; n]);
    let source = LdField::from_nodes(nodes);
    let (p0, j0, p1, j1) = (phi(0.0), cur(0.0), phi(length), cur(length));
    let system = QdSystem {
        width: h,
        coefficients: &coefficients,
        source: &source,
        boundary: BoundaryData {
            left: InflowMoments { phi: p0 / 2.0 + j0, current: p0 / 4.0 + j0 / 2.0, second: (p0 / 2.0 + j0) / 3.0 },
            right: InflowMoments { phi: p1 / 2.0 - j1, current: j1 / 2.0 - p1 / 4.0, second: (p1 / 2.0 - j1) / 3.0 },
        },
    };
    let got = system.solve().unwrap();
    (0..n)
        .map(|i| {
            let x0 = i as f64 * h;
            // exact cell average of the quadratic by Simpson's rule
            let exact = (phi(x0) + 4.0 * phi(x0 + h / 2.0) + phi(x0 + h)) / 6.0;
            (got.phi.average(i) - exact).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let errors: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| manufactured_error(n)).collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 2.0 - 0.05, "observed order {order} from errors {errors:?}");
    }
}

#[test]
fn one_material_oracle_agrees_with_source_iteration() {
    use bsm_core::baseline::run_source_iteration;
    use bsm_core::IterationOptions;
    let m = MaterialSpec::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let quad = AngularQuadrature::double_gauss_legendre(2).unwrap();
    let mus: Vec<f64> = (0..4).map(|d| quad.mu(d)).collect();
    let weights: Vec<f64> = (0..4).map(|d| quad.weight(d)).collect();
    let problem = ProblemSpec::new([m, m], 8.0, 16, quad, Inflow::vacuum(2)).unwrap();
    let options = IterationOptions { epsilon: 1e-13, max_iterations: 2000, ..Default::default() };
    let si = run_source_iteration(&problem, &options).unwrap();
    let oracle = common::one_material_dense(1.0, 0.5, 1.0, 8.0, 16, &mus, &weights);
    assert!(common::max_rel_diff(si.ensemble_phi.nodes(), &oracle) <= 1e-11);
}
