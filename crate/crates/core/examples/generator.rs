//! Builds a model, lists its jump operators and checks the generator against its dual.

use qet::gksl::{GKSLModel, RateSet};
use qet::sample::Sampler;
use qet::LevelStructure;

fn main() -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(&[3, 2])?;
    let rates = RateSet::thermal(&levels, 0.7);
    let model = GKSLModel::new(levels, rates)?;
    for k in model.kraus() {
        println!("{:<16} |L|_max = {:.4}", k.label(), k.op.norm_max());
    }

    let mut s = Sampler::new(11);
    let rho = s.density(model.dim());
    let x = s.hermitian(model.dim());
    let l_rho = model.generator(rho.operator())?;
    let l_x = model.dual_generator(&x)?;
    let lhs = (&x * &l_rho).trace();
    let rhs = (&l_x * rho.operator()).trace();
    println!("tr L(rho) = {:.2e}", l_rho.trace().norm());
    println!("duality defect |tr(X L rho) - tr(L*X rho)| = {:.2e}", (lhs - rhs).norm());

    let lhat = model.lindbladian_matrix()?;
    let direct = qet::Operator::unvectorize(&lhat.apply(&rho.operator().vectorize()), model.dim())?;
    println!("vectorised generator agrees to {:.2e}", direct.max_abs_diff(&l_rho));
    Ok(())
}
