//! The level-lowering transport Z, its modulus |Z| and the complement |Z|⊥.

use qet::transition::{kernel_basis, Transport};
use qet::LevelStructure;

fn main() -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(&[5, 3, 2])?;
    let t = Transport::new(&levels);
    let d = levels.total_dim();
    println!("D = {d}");

    let sum = &t.abs + &t.abs_perp;
    let mut below_top = qet::Operator::zeros(d, d);
    for k in 1..levels.n_levels() {
        below_top = &below_top + &levels.p_level(k);
    }
    println!("|Z| + |Z|⊥ = P_1 + ... + P_(N-1) to {:.2e}", sum.max_abs_diff(&below_top));
    println!("|Z| = Z*Z to {:.2e}", (&t.z_adj * &t.z).max_abs_diff(&t.abs));

    let ker = kernel_basis(&levels);
    println!("dim ker Z on the levels below N = {}", ker.dim());

    // Powers of Z walk the ladder; Z^N annihilates everything.
    let psi = levels.ket(1, 0)?;
    for n in 0..=levels.n_levels() {
        let out = t.apply_power(&psi, n);
        println!("  |Z^{n} e_(1,0)| = {:.6}", qet::operator::norm(&out));
    }
    Ok(())
}
