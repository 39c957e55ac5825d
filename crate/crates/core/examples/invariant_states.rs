//! Builds invariant states by transporting a level-1 seed and recovers the seed.

use qet::gksl::GKSLModel;
use qet::invariants::{check_invariance, construct_invariant, extract_tau, stratify};
use qet::sample::Sampler;
use qet::LevelStructure;

fn run(dims: &[usize], beta: f64, seed: u64) -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(dims)?;
    let model = GKSLModel::thermal(levels.clone(), beta)?;
    let s = stratify(&levels)?;
    let mut rng = Sampler::new(seed);
    let tau = rng.density_on(&s.v1_minus_w);
    let rho = construct_invariant(&model, tau.operator())?;
    let residual = model.generator(rho.operator())?.norm_max();
    let (back, _) = extract_tau(&model, rho.operator())?;
    let report = check_invariance(&model, rho.operator(), 1e-9)?;
    println!("dims {dims:?} beta {beta}: |L(rho)| = {residual:.2e}, tau error = {:.2e}, verdict = {}",
        back.operator().max_abs_diff(tau.operator()), report.verdict);
    Ok(())
}

fn main() -> qet::Result<()> {
    run(&[3, 3], 1.0, 1)?;
    run(&[5, 5, 5], 0.4, 2)?;
    // Here Z(V_1 ⊖ W) is not contained in ran|Z|_2, and a generic seed is not invariant.
    run(&[4, 4, 2], 1.0, 3)?;
    Ok(())
}
