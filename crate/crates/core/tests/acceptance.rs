//! Acceptance gate: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so that every criterion is evaluated and
//! reported even when an earlier one fails; the process exits nonzero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use qet::gksl::{GKSLModel, RateSet};
use qet::invariants::{
    check_invariance, construct_invariant_on, extract_tau_on, omega_perp_uniqueness, reconstruct,
    stratify, StratifiedV, Uniqueness,
};
use qet::operator::{scale_vector, Operator};
use qet::sample::{LevelRanges, Sampler};
use qet::suite::{gksl_case, invariants_case, transition_case, Tally};
use qet::transition::Transport;
use qet::{c64, Block, LevelStructure, State, Subspace, Vector};

const SEED: u64 = 20_241_014;

struct Outcome {
    id: usize,
    passed: bool,
    detail: String,
}

fn report(id: usize, title: &str, passed: bool, elapsed: Duration, detail: String) -> Outcome {
    println!(
        "criterion {id} {}: {title} [{:.1} s] {detail}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    Outcome { id, passed, detail }
}

fn tally_summary(t: &Tally) -> (bool, String) {
    let failed: Vec<String> = t
        .properties()
        .iter()
        .filter(|p| !p.passed)
        .map(|p| format!("{} ({}/{} failed, worst {:.2e} at {})", p.name, p.failures, p.cases, p.worst, p.worst_case))
        .collect();
    let worst = t.properties().iter().map(|p| p.worst).fold(0.0, f64::max);
    if failed.is_empty() {
        (true, format!("{} properties, worst residual {:.2e}", t.properties().len(), worst))
    } else {
        (false, format!("failing: {}", failed.join("; ")))
    }
}

fn zeta(n: usize, p: i64) -> c64 {
    let theta = 2.0 * PI * p as f64 / n as f64;
    c64::new(theta.cos(), theta.sin())
}

/// `Z` assembled entry by entry from its defining formula, independent of
/// the library's block embedding.
fn transport_oracle(levels: &LevelStructure) -> Operator {
    let d = levels.total_dim();
    let mut z = Operator::zeros(d, d);
    let mut offset = 2;
    let dims = levels.dims();
    for k in 0..dims.len().saturating_sub(1) {
        let (n, m) = (dims[k], dims[k + 1]);
        let next = offset + n;
        for a in 0..n {
            for b in 0..m {
                z.set(next + b, offset + a, zeta(n, (a * b) as i64) / (n as f64).sqrt());
            }
        }
        offset = next;
    }
    z
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(SEED);
    let mut tally = Tally::new("transition");
    let cases = 120;
    for i in 0..cases {
        let levels = sampler.levels(LevelRanges::default());
        tally.set_case(format!("#{i} dims={:?}", levels.dims()));
        transition_case(&levels, &mut tally).expect("transition case");
        let t = Transport::new(&levels);
        tally.record("Z matches entrywise oracle", 1e-12, t.z.max_abs_diff(&transport_oracle(&levels)));
    }
    let elapsed = start.elapsed();
    let (ok, detail) = tally_summary(&tally);
    let in_time = elapsed <= Duration::from_secs(30);
    report(
        1,
        "transition algebra",
        ok && in_time,
        elapsed,
        format!("{cases} structures, {detail}{}", if in_time { "" } else { ", over the 30 s budget" }),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(SEED + 1);
    let mut tally = Tally::new("gksl");
    let cases = 60;
    for i in 0..cases {
        let model = sampler.model(LevelRanges::default()).expect("random model");
        tally.set_case(format!("#{i} dims={:?}", model.levels().dims()));
        gksl_case(&model, &mut sampler, &mut tally).expect("gksl case");
    }
    let elapsed = start.elapsed();
    let (ok, detail) = tally_summary(&tally);
    let in_time = elapsed <= Duration::from_secs(60);
    report(
        2,
        "generator identities and reduced forms",
        ok && in_time,
        elapsed,
        format!("{cases} models, {detail}{}", if in_time { "" } else { ", over the 60 s budget" }),
    )
}

/// Thermal models with `N ∈ 2..=5`, dims ≤ 6, `β ∈ {0, 0.5, 1}`.
fn thermal_models(seed: u64, count: usize, max_total: usize) -> Vec<GKSLModel> {
    let mut sampler = Sampler::new(seed);
    let ranges = LevelRanges {
        min_levels: 2,
        max_levels: 5,
        max_dim: 6,
    };
    let betas = [0.0, 0.5, 1.0];
    let mut out = Vec::new();
    while out.len() < count {
        let levels = sampler.levels(ranges);
        if levels.total_dim() > max_total {
            continue;
        }
        let beta = betas[out.len() % 3];
        out.push(GKSLModel::thermal(levels, beta).expect("thermal model"));
    }
    out
}

/// Random-rate models with `N ∈ 2..=5`, dims ≤ 6.
fn random_models(seed: u64, count: usize) -> Vec<GKSLModel> {
    let mut sampler = Sampler::new(seed);
    let ranges = LevelRanges {
        min_levels: 2,
        max_levels: 5,
        max_dim: 6,
    };
    (0..count).map(|_| sampler.model(ranges).expect("random model")).collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut models = thermal_models(SEED + 2, 60, usize::MAX);
    models.extend(random_models(SEED + 3, 40));
    let mut worst = 0.0_f64;
    let mut worst_dims = Vec::new();
    for m in &models {
        let v = stratify(m.levels()).expect("stratify").v;
        let pv = v.projector();
        let pvp = &Operator::identity(m.dim()) - &pv;
        let r = m
            .dual_generator(&pv)
            .unwrap()
            .norm_max()
            .max(m.dual_generator(&pvp).unwrap().norm_max());
        if r > worst {
            worst = r;
            worst_dims = m.levels().dims().to_vec();
        }
    }
    report(
        3,
        "harmonicity of P_V and P_V-perp",
        worst <= 1e-10,
        start.elapsed(),
        format!("{} models, worst residual {worst:.2e} at dims={worst_dims:?}", models.len()),
    )
}

fn dims_list(set: &BTreeSet<Vec<usize>>, limit: usize) -> String {
    let v: Vec<String> = set.iter().take(limit).map(|d| format!("{d:?}")).collect();
    let more = set.len().saturating_sub(limit);
    if more > 0 {
        format!("{} and {more} more", v.join(", "))
    } else {
        v.join(", ")
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(SEED + 4);
    let mut models = vec![GKSLModel::thermal(LevelStructure::with_default_energies(&[3, 3]).unwrap(), 1.0).unwrap()];
    models.extend(thermal_models(SEED + 5, 80, usize::MAX));
    let (mut tested, mut trials, mut bad_trials) = (0, 0, 0);
    let mut failing = BTreeSet::new();
    let mut failing_compatible = BTreeSet::new();
    let (mut worst_gen, mut worst_tau) = (0.0_f64, 0.0_f64);
    for m in &models {
        let s = stratify(m.levels()).unwrap();
        if s.v1_minus_w.is_zero() {
            continue;
        }
        tested += 1;
        for _ in 0..10 {
            trials += 1;
            let u = sampler.unit_vector_in(&s.v1_minus_w);
            let tau = Operator::outer(&u, &u);
            let rho = construct_invariant_on(m, &s.v1_minus_w, &tau).expect("seed on V_1 - W");
            let gen = m.generator(rho.operator()).unwrap().norm_max();
            let verdict = check_invariance(m, rho.operator(), 1e-10).map(|r| r.verdict).unwrap_or(false);
            let tau_err = extract_tau_on(m, &s.v_minus_w, rho.operator())
                .map(|(t, _)| t.operator().max_abs_diff(&tau))
                .unwrap_or(f64::INFINITY);
            worst_gen = worst_gen.max(gen);
            worst_tau = worst_tau.max(tau_err);
            if !(gen <= 1e-10 && verdict && tau_err <= 1e-9) {
                bad_trials += 1;
                failing.insert(m.levels().dims().to_vec());
                if s.transport_compatible() {
                    failing_compatible.insert(m.levels().dims().to_vec());
                }
            }
        }
    }
    let passed = bad_trials == 0 && tested > 0;
    let mut detail = format!(
        "{tested} models with V_1 - W nonzero, {trials} seeds, {bad_trials} failed; worst |L(rho)| {worst_gen:.2e}, worst tau error {worst_tau:.2e}"
    );
    if !failing.is_empty() {
        detail.push_str(&format!(
            "; failing dims {}; failures on models whose transported seeds stay in ran|Z|_k: {}",
            dims_list(&failing, 6),
            failing_compatible.len()
        ));
    }
    report(4, "invariant-state round trip", passed, start.elapsed(), detail)
}

fn normalize(x: &Operator) -> Operator {
    let tr = x.trace();
    if tr.norm() > 1e-8 * x.norm_max() {
        x.scale(tr.inv())
    } else {
        x.scale_real(1.0 / x.norm_max())
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(SEED + 6);
    let models = thermal_models(SEED + 7, 40, 30);
    let (mut kernel_elems, mut worst_rec) = (0, 0.0_f64);
    let (mut constructed, mut outside) = (0, 0);
    let mut worst_dist = 0.0_f64;
    let mut failing = BTreeSet::new();
    for m in &models {
        let s: StratifiedV = stratify(m.levels()).unwrap();
        if s.v_minus_w.is_zero() {
            continue;
        }
        for x in m.stationary_kernel_on(&s.v_minus_w).unwrap() {
            kernel_elems += 1;
            let x = normalize(&x);
            let r = reconstruct(m, &x).max_abs_diff(&x);
            worst_rec = worst_rec.max(r);
            if r > 1e-9 {
                failing.insert(m.levels().dims().to_vec());
            }
        }
        if s.v1_minus_w.is_zero() {
            continue;
        }
        let kernel = m.stationary_kernel().unwrap();
        for _ in 0..3 {
            let u = sampler.unit_vector_in(&s.v1_minus_w);
            let rho = construct_invariant_on(m, &s.v1_minus_w, &Operator::outer(&u, &u)).unwrap();
            constructed += 1;
            let dist = m.kernel_distance(&kernel, rho.operator());
            worst_dist = worst_dist.max(dist);
            if dist > 1e-9 {
                outside += 1;
                failing.insert(m.levels().dims().to_vec());
            }
        }
    }
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(120);
    let passed = worst_rec <= 1e-9 && outside == 0 && in_time;
    let mut detail = format!(
        "{} models (D <= 30); {kernel_elems} kernel elements on V - W, worst reconstruction {worst_rec:.2e}; {constructed} constructed states, {outside} outside the kernel span (worst distance {worst_dist:.2e})",
        models.len()
    );
    if !failing.is_empty() {
        detail.push_str(&format!("; failing dims {}", dims_list(&failing, 6)));
    }
    if !in_time {
        detail.push_str(", over the 120 s budget");
    }
    report(5, "kernel oracle equivalence", passed, elapsed, detail)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut models = thermal_models(SEED + 8, 40, usize::MAX);
    models.extend(random_models(SEED + 9, 40));
    let n1 = LevelStructure::with_default_energies(&[3]).unwrap();
    models.push(GKSLModel::thermal(n1, 0.7).unwrap());
    let (mut tested, mut bad, mut inconclusive) = (0, 0, 0);
    let mut worst = 0.0_f64;
    for m in &models {
        let r = omega_perp_uniqueness(m).unwrap();
        match r.status {
            Uniqueness::Inconclusive => inconclusive += 1,
            Uniqueness::Unique => {
                tested += 1;
                worst = worst.max(r.distance_to_ground.unwrap_or(f64::INFINITY));
            }
            Uniqueness::NotUnique => {
                tested += 1;
                bad += 1;
            }
        }
    }
    report(
        6,
        "uniqueness of the invariant state on Omega-perp",
        bad == 0 && tested > 0 && worst <= 1e-9,
        start.elapsed(),
        format!("{tested} models, {bad} not unique, {inconclusive} inconclusive; worst distance to P_- {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut sampler = Sampler::new(SEED + 10);
    let ranges = LevelRanges {
        min_levels: 1,
        max_levels: 4,
        max_dim: 4,
    };
    let (t_end, steps) = (10.0, 20);
    let (mut states, mut worst_trace, mut worst_eig, mut worst_drift) = (0, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut failures = 0;
    let mut fixed_points = 0;
    while states < 100 {
        let levels = sampler.levels(ranges);
        if levels.total_dim() > 16 {
            continue;
        }
        let rates = sampler.rates(&levels);
        let m = GKSLModel::new(levels.clone(), rates).unwrap();
        let prop = m.propagator(t_end / steps as f64).unwrap();
        for _ in 0..10 {
            let rho0 = sampler.pure_state(m.dim());
            states += 1;
            match m.evolve_with(&prop, &rho0, steps) {
                Ok(traj) => {
                    for s in &traj {
                        worst_trace = worst_trace.max((s.operator().trace() - c64::new(1.0, 0.0)).norm());
                        worst_eig = worst_eig.min(s.min_eigenvalue().unwrap());
                    }
                }
                Err(_) => failures += 1,
            }
        }
        // fixed points: the ground state, the uniform state on W and,
        // when the kernel has one, a stationary state on V - W
        let mut fixed = vec![State::normalized(&levels.projector(Block::Minus).unwrap()).unwrap()];
        if levels.n_levels() >= 2 {
            let s = stratify(&levels).unwrap();
            if !s.w.is_zero() {
                fixed.push(State::normalized(&s.w.projector()).unwrap());
            }
            if !s.v_minus_w.is_zero() {
                for x in m.stationary_kernel_on(&s.v_minus_w).unwrap() {
                    if let Ok(st) = State::new(normalize(&x).hermitian_part(), 1e-9) {
                        if m.generator(st.operator()).unwrap().norm_max() <= 1e-10 {
                            fixed.push(st);
                        }
                    }
                }
            }
        }
        for f in fixed {
            fixed_points += 1;
            match m.evolve_with(&prop, &f, steps) {
                Ok(traj) => {
                    for s in &traj {
                        worst_drift = worst_drift.max(s.operator().max_abs_diff(f.operator()));
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    let passed = failures == 0 && worst_trace <= 1e-9 && worst_eig >= -1e-9 && worst_drift <= 1e-8;
    report(
        7,
        "dynamics sanity",
        passed,
        start.elapsed(),
        format!(
            "{states} pure states and {fixed_points} fixed points over t in [0, 10]; worst trace error {worst_trace:.2e}, min eigenvalue {worst_eig:.2e}, fixed-point drift {worst_drift:.2e}, {failures} rejected snapshots"
        ),
    )
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let levels = LevelStructure::with_default_energies(&[3, 3]).unwrap();
    let d = levels.total_dim();
    // level-1 entangled vectors and level-2 kets written out by hand:
    // basis order −, +, |0_1⟩, |1_1⟩, |2_1⟩, |0_2⟩, |1_2⟩, |2_2⟩
    let phi = |a: usize| Vector::from_fn(d, |i| if (2..5).contains(&i) { zeta(3, -(((i - 2) * a) as i64)) / 3f64.sqrt() } else { c64::new(0.0, 0.0) });
    let ket = |i: usize| Vector::from_fn(d, |j| if j == i { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
    let h = c64::new(1.0 / 2f64.sqrt(), 0.0);
    let u = scale_vector(&(&phi(1) - &phi(2)), h);
    let w2 = scale_vector(&(&ket(6) - &ket(7)), h);
    let want_v = Subspace::span(d, &[u.clone(), w2], "V");
    let mut residuals = Vec::new();
    let s = stratify(&levels).unwrap();
    residuals.push(("V frame", s.v.projector_distance(&want_v)));
    residuals.push((
        "mu = 1/sqrt 3",
        s.mu.iter().map(|m| (m - c64::new(1.0 / 3f64.sqrt(), 0.0)).norm()).fold(0.0, f64::max),
    ));
    residuals.push(("W = 0", s.w.dim() as f64));
    let mut worst_state = 0.0_f64;
    let mut worst_kernel = 0.0_f64;
    let tau = Operator::outer(&u, &u);
    let mut models = vec![GKSLModel::thermal(levels.clone(), 1.0).unwrap()];
    let mut sampler = Sampler::new(SEED + 11);
    for _ in 0..5 {
        models.push(GKSLModel::new(levels.clone(), sampler.rates(&levels)).unwrap());
    }
    models.push(
        GKSLModel::new(levels.clone(), RateSet::thermal(&levels, 0.0)).unwrap(),
    );
    for m in &models {
        let b1 = m.rates().beta(1).exp();
        let z = &m.transport().z;
        let want = (&tau + &(&(z * &tau) * &z.adjoint()).scale_real(b1)).scale_real(1.0 / (1.0 + b1));
        let rho = construct_invariant_on(m, &s.v1_minus_w, &tau).unwrap();
        worst_state = worst_state.max(rho.operator().max_abs_diff(&want));
        worst_state = worst_state.max(m.generator(&want).unwrap().norm_max());
        let kernel = m.stationary_kernel().unwrap();
        worst_kernel = worst_kernel.max(m.kernel_distance(&kernel, &want));
    }
    residuals.push(("rho closed form and stationarity", worst_state));
    residuals.push(("rho in kernel span", worst_kernel));
    let ok = residuals.iter().all(|(_, r)| *r <= 1e-10);
    let detail = residuals
        .iter()
        .map(|(n, r)| format!("{n} {r:.2e}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(8, "worked example dims=[3,3]", ok, start.elapsed(), format!("{} models; {detail}", models.len()))
}

fn invariants_suite_summary() {
    // informational: the full randomized invariants suite, including the
    // stratification identities that the criteria above do not gate on
    let mut sampler = Sampler::new(SEED + 12);
    let mut tally = Tally::new("invariants");
    for (i, m) in thermal_models(SEED + 13, 30, usize::MAX).iter().enumerate() {
        tally.set_case(format!("#{i} dims={:?}", m.levels().dims()));
        invariants_case(m, &mut sampler, &mut tally).unwrap();
    }
    for p in tally.properties().iter().filter(|p| !p.passed) {
        println!(
            "  note: {} fails on {}/{} cases (worst {:.2e} at {})",
            p.name, p.failures, p.cases, p.worst, p.worst_case
        );
    }
}

fn main() {
    let outcomes = [criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8()];
    invariants_suite_summary();
    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.passed).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        for o in &failed {
            eprintln!("criterion {} failed: {}", o.id, o.detail);
        }
        std::process::exit(1);
    }
}
