//! The interaction-free subspace V, its level decomposition and the μ splitting.

use qet::invariants::stratify;
use qet::LevelStructure;

fn report(dims: &[usize]) -> qet::Result<()> {
    let levels = LevelStructure::with_default_energies(dims)?;
    let s = stratify(&levels)?;
    let per_level: Vec<usize> = s.levels_v.iter().map(|v| v.dim()).collect();
    println!("dims {dims:?}: dim V = {}, V_k = {per_level:?}, W = {}, M = {} ({:?})",
        s.v.dim(), s.w.dim(), s.m.dim(), s.m_source);
    let mu: Vec<String> = s.mu.iter().map(|m| format!("{:.4}", m.norm())).collect();
    println!("  |mu| = [{}]", mu.join(", "));
    for c in &s.checks {
        println!("  {:<4} {:<28} {:.2e}", if c.ok { "ok" } else { "FAIL" }, c.name, c.residual);
    }
    if !s.incompatible_levels.is_empty() {
        println!("  transported seeds leave ran|Z|_k at k = {:?}", s.incompatible_levels);
    }
    Ok(())
}

fn main() -> qet::Result<()> {
    for dims in [&[3, 3][..], &[4, 4, 1], &[3, 3, 3], &[3, 3, 2, 2]] {
        report(dims)?;
    }
    Ok(())
}
