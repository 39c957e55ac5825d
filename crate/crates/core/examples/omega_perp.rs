//! Uniqueness of the ground state among states supported on Ω⊥.

use qet::gksl::{GKSLModel, RateSet};
use qet::invariants::omega_perp_uniqueness;
use qet::LevelStructure;

fn main() -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(&[3, 2, 2])?;
    let model = GKSLModel::thermal(levels.clone(), 1.0)?;
    let r = omega_perp_uniqueness(&model)?;
    println!("thermal: {:?}, nullspace {}, |sigma - P-| = {:?}", r.status, r.nullspace_dim, r.distance_to_ground);

    // Switching off a required rate breaks the hypothesis.
    let mut rates = RateSet::thermal(&levels, 1.0);
    rates.minus.damping_minus = 0.0;
    let model = GKSLModel::new(levels, rates)?;
    let r = omega_perp_uniqueness(&model)?;
    println!("vanishing {:?}: {:?}, nullspace {}", r.vanishing_rates, r.status, r.nullspace_dim);
    Ok(())
}
