//! Discrete Fourier transition operators between two degenerate levels.

use qet::transition::{dft, entangled_basis, transition_block, transition_operator};
use qet::LevelStructure;

fn main() -> qet::Result<()> {
    let f = dft(4);
    let unitarity = (&f.adjoint() * &f).max_abs_diff(&qet::Operator::identity(4));
    println!("F_4 unitarity defect: {unitarity:.2e}");

    // A 4 -> 2 block is a partial isometry: Z Z* = I on the smaller level.
    let z = transition_block(4, 2);
    let zz = &z * &z.adjoint();
    println!("Z_(4->2) Z* = I_2 to {:.2e}", zz.max_abs_diff(&qet::Operator::identity(2)));

    let levels = LevelStructure::with_default_energies(&[4, 2])?;
    let z12 = transition_operator(&levels, 1, 2)?;
    println!("embedded Z_(1,2) is {}x{}", z12.rows(), z12.cols());
    for (a, phi) in entangled_basis(&levels, 1)?.vectors.iter().enumerate() {
        let image = z12.apply(phi);
        println!("  |Z phi_{a}_1| = {:.6}", qet::operator::norm(&image));
    }
    Ok(())
}
