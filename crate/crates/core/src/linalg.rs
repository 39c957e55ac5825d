//! Matrix exponential by Padé scaling and squaring.
//!
//! Degree selection and the degree-13 evaluation follow Higham, "The scaling
//! and squaring method for the matrix exponential revisited" (2005).

use crate::error::Result;
use crate::operator::{c64, Operator};

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(A)` for a square complex matrix.
pub fn expm(a: &Operator) -> Result<Operator> {
    let n = a.rows();
    assert!(a.is_square(), "expm needs a square matrix");
    if n == 0 {
        return Ok(a.clone());
    }
    let norm = a.norm_one();
    let id = Operator::identity(n);
    if norm == 0.0 {
        return Ok(id);
    }
    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            return pade_low(a, m);
        }
    }
    let theta13 = THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale_real(0.5_f64.powi(s));
    let mut r = pade13(&scaled)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn combine(terms: &[(&Operator, f64)], n: usize) -> Operator {
    let mut out = Operator::zeros(n, n);
    for (m, c) in terms {
        out = &out + &m.scale_real(*c);
    }
    out
}

fn pade_low(a: &Operator, m: usize) -> Result<Operator> {
    let n = a.rows();
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let id = Operator::identity(n);
    let a2 = a * a;
    // even powers I, A², A⁴, …
    let mut pows = vec![id.clone(), a2.clone()];
    while pows.len() <= m / 2 {
        let next = pows.last().map(|p| p * &a2).expect("nonempty");
        pows.push(next);
    }
    let mut u_inner = Operator::zeros(n, n);
    let mut v = Operator::zeros(n, n);
    for (j, p) in pows.iter().enumerate() {
        u_inner = &u_inner + &p.scale_real(b[2 * j + 1]);
        v = &v + &p.scale_real(b[2 * j]);
    }
    let u = a * &u_inner;
    solve_pade(&u, &v)
}

fn pade13(a: &Operator) -> Result<Operator> {
    let n = a.rows();
    let b = &B13;
    let id = Operator::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = combine(&[(&a6, b[13]), (&a4, b[11]), (&a2, b[9])], n);
    let u_lo = combine(&[(&a6, b[7]), (&a4, b[5]), (&a2, b[3]), (&id, b[1])], n);
    let u = a * &(&(&a6 * &u_hi) + &u_lo);
    let v_hi = combine(&[(&a6, b[12]), (&a4, b[10]), (&a2, b[8])], n);
    let v_lo = combine(&[(&a6, b[6]), (&a4, b[4]), (&a2, b[2]), (&id, b[0])], n);
    let v = &(&a6 * &v_hi) + &v_lo;
    solve_pade(&u, &v)
}

/// `(V − U)⁻¹ (V + U)`
fn solve_pade(u: &Operator, v: &Operator) -> Result<Operator> {
    let p = v + u;
    let q = v - u;
    q.solve(&p)
}

/// `exp(t·A)` applied repeatedly: returns `exp(A·dt)` and uses it to step.
pub fn expm_scaled(a: &Operator, t: f64) -> Result<Operator> {
    expm(&a.scale(c64::new(t, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::I;

    /// Taylor series summed to convergence; trustworthy for small norms.
    fn taylor(a: &Operator) -> Operator {
        let n = a.rows();
        let mut term = Operator::identity(n);
        let mut sum = term.clone();
        for k in 1..80 {
            term = (&term * a).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    fn sample(n: usize, scale: f64) -> Operator {
        Operator::from_fn(n, n, |i, j| {
            c64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64 * 0.7).cos()).scale(scale)
        })
    }

    trait Scale {
        fn scale(self, s: f64) -> c64;
    }
    impl Scale for c64 {
        fn scale(self, s: f64) -> c64 {
            self * s
        }
    }

    #[test]
    fn matches_taylor_at_every_pade_degree() {
        for &scale in &[1e-3, 0.02, 0.1, 0.25, 0.5, 1.0] {
            let a = sample(5, scale);
            let e = expm(&a).unwrap();
            let t = taylor(&a);
            let rel = e.max_abs_diff(&t) / t.norm_max();
            assert!(rel < 1e-13, "scale {scale}: rel err {rel:e}");
        }
    }

    #[test]
    fn squaring_branch_matches_semigroup_law() {
        let a = sample(6, 3.0);
        let whole = expm(&a).unwrap();
        let half = expm(&a.scale_real(0.5)).unwrap();
        let rel = whole.max_abs_diff(&(&half * &half)) / whole.norm_max();
        assert!(rel < 1e-11, "rel err {rel:e}");
    }

    #[test]
    fn rotation_generator() {
        // exp(iθσ_x) = cos θ I + i sin θ σ_x
        let theta = 7.3_f64;
        let sx = Operator::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
        let e = expm(&sx.scale(I * theta)).unwrap();
        let want = Operator::from_fn(2, 2, |i, j| {
            if i == j {
                c64::new(theta.cos(), 0.0)
            } else {
                c64::new(0.0, theta.sin())
            }
        });
        assert!(e.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn zero_and_diagonal() {
        assert!(expm(&Operator::zeros(3, 3)).unwrap().approx_eq(&Operator::identity(3), 0.0));
        let d = Operator::diagonal(&[-20.0, 0.5, 4.0]);
        let e = expm(&d).unwrap();
        for (i, x) in [-20.0_f64, 0.5, 4.0].iter().enumerate() {
            let rel = (e.get(i, i).re - x.exp()).abs() / x.exp();
            assert!(rel < 1e-13);
        }
    }
}
