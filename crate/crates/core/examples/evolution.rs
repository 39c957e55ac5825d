//! Integrates the master equation from |+⟩ and prints level populations.

use qet::gksl::GKSLModel;
use qet::{LevelStructure, State};

fn main() -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(&[2, 2, 1])?;
    let model = GKSLModel::thermal(levels.clone(), 1.0)?;
    let rho0 = State::pure(&levels.plus())?;
    let steps = 8;
    let traj = model.evolve(&rho0, 8.0, steps)?;

    print!("{:>5} {:>9} {:>9}", "t", "P-", "P+");
    for k in 1..=levels.n_levels() {
        print!(" {:>9}", format!("P{k}"));
    }
    println!();
    for (i, rho) in traj.iter().enumerate() {
        let pop = |p: &qet::Operator| (p * rho.operator()).trace().re;
        print!("{:>5.1} {:>9.5} {:>9.5}", 8.0 * i as f64 / steps as f64,
            pop(&levels.projector(qet::Block::Minus)?), pop(&levels.projector(qet::Block::Plus)?));
        for k in 1..=levels.n_levels() {
            print!(" {:>9.5}", pop(&levels.p_level(k)));
        }
        println!();
    }
    Ok(())
}
