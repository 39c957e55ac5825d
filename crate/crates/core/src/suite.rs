//! Randomized property suites: each case evaluates a family of identities and
//! records the worst residual per property.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gksl::{
    omega_perp_subspace, omega_subspace, reduced_generator_omega, reduced_generator_omega_perp,
    GKSLModel,
};
use crate::hilbert::{Block, LevelStructure, State};
use crate::invariants::{
    check_invariance, construct_invariant_on, extract_tau_on, omega_perp_uniqueness, reconstruct,
    stratify, Uniqueness,
};
use crate::operator::{c64, norm, vector_max_abs_diff, Operator};
use crate::sample::{LevelRanges, Sampler};
use crate::subspace::Subspace;
use crate::transition::{
    closed_form, dft, embedded_dft, entangled_basis, entangled_vector, kernel_basis,
    roots_of_unity_sum, transition_operator, transport_power_on_zero, Transport,
};

/// Entrywise tolerance of the transition identities.
pub const TRANSITION_TOL: f64 = 1e-12;
/// Entrywise tolerance of the generator identities.
pub const GENERATOR_TOL: f64 = 1e-11;
/// Tolerance of the harmonicity and structural subspace identities.
pub const STRUCTURE_TOL: f64 = 1e-10;
/// Tolerance of round trips through the invariant-state construction.
pub const ROUND_TRIP_TOL: f64 = 1e-9;
/// Largest total dimension for which the full stationary kernel is used.
pub const ORACLE_MAX_DIM: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Transition,
    Gksl,
    Invariants,
    All,
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transition" => Ok(Self::Transition),
            "gksl" => Ok(Self::Gksl),
            "invariants" => Ok(Self::Invariants),
            "all" => Ok(Self::All),
            other => Err(Error::InvalidInput(format!(
                "unknown suite '{other}' (expected transition, gksl, invariants or all)"
            ))),
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Transition => "transition",
            Self::Gksl => "gksl",
            Self::Invariants => "invariants",
            Self::All => "all",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub suite: String,
    pub name: String,
    pub tol: f64,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    /// Case label of the worst residual.
    pub worst_case: String,
    /// Case label of the first violation.
    pub first_failure: Option<String>,
    pub passed: bool,
}

/// Worst-residual bookkeeping keyed by property name, in first-seen order.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    suite: String,
    case: String,
    props: Vec<PropertyResult>,
}

impl Tally {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            ..Self::default()
        }
    }

    pub fn set_case(&mut self, label: impl Into<String>) {
        self.case = label.into();
    }

    /// Record one residual; NaN always counts as a violation.
    pub fn record(&mut self, name: &str, tol: f64, residual: f64) {
        let idx = match self.props.iter().position(|p| p.name == name) {
            Some(i) => i,
            None => {
                self.props.push(PropertyResult {
                    suite: self.suite.clone(),
                    name: name.to_string(),
                    tol,
                    cases: 0,
                    failures: 0,
                    worst: 0.0,
                    worst_case: String::new(),
                    first_failure: None,
                    passed: true,
                });
                self.props.len() - 1
            }
        };
        let p = &mut self.props[idx];
        p.cases += 1;
        let bad = residual.is_nan() || residual > tol;
        let worse = if p.worst.is_nan() { false } else { residual.is_nan() || residual > p.worst };
        if p.cases == 1 || worse {
            p.worst = residual;
            p.worst_case = self.case.clone();
        }
        if bad {
            p.failures += 1;
            p.passed = false;
            if p.first_failure.is_none() {
                p.first_failure = Some(self.case.clone());
            }
        }
    }

    /// Record a boolean property as residual 0 or 1 against tolerance 0.
    pub fn record_bool(&mut self, name: &str, ok: bool) {
        self.record(name, 0.0, if ok { 0.0 } else { 1.0 });
    }

    /// Record an error raised while evaluating a property.
    pub fn record_error(&mut self, name: &str, tol: f64) {
        self.record(name, tol, f64::NAN);
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.props.iter().find(|p| p.name == name)
    }

    pub fn properties(&self) -> &[PropertyResult] {
        &self.props
    }

    pub fn into_properties(self) -> Vec<PropertyResult> {
        self.props
    }

    pub fn passed(&self) -> bool {
        self.props.iter().all(|p| p.passed)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyResult>,
    pub passed: bool,
}

impl SuiteReport {
    /// One line per property.
    pub fn lines(&self) -> Vec<String> {
        self.properties
            .iter()
            .map(|p| {
                format!(
                    "{} {:<11} {:<44} worst {:.3e} (tol {:.0e}, {}/{} failed{})",
                    if p.passed { "PASS" } else { "FAIL" },
                    p.suite,
                    p.name,
                    p.worst,
                    p.tol,
                    p.failures,
                    p.cases,
                    if p.worst_case.is_empty() {
                        String::new()
                    } else {
                        format!(", worst at {}", p.worst_case)
                    }
                )
            })
            .collect()
    }
}

/// Default case counts per suite.
pub fn default_cases(suite: SuiteName) -> usize {
    match suite {
        SuiteName::Transition => 100,
        SuiteName::Gksl => 50,
        SuiteName::Invariants => 50,
        SuiteName::All => 50,
    }
}

pub fn run_suite(suite: SuiteName, seed: u64, cases: Option<usize>) -> Result<SuiteReport> {
    let mut properties = Vec::new();
    let mut total = 0;
    let parts: Vec<SuiteName> = match suite {
        SuiteName::All => vec![SuiteName::Transition, SuiteName::Gksl, SuiteName::Invariants],
        s => vec![s],
    };
    for part in parts {
        let n = cases.unwrap_or_else(|| default_cases(part));
        let tally = match part {
            SuiteName::Transition => transition_suite(seed, n)?,
            SuiteName::Gksl => gksl_suite(seed, n)?,
            SuiteName::Invariants => invariants_suite(seed, n)?,
            SuiteName::All => unreachable!(),
        };
        total += n;
        properties.extend(tally.into_properties());
    }
    let passed = properties.iter().all(|p| p.passed);
    Ok(SuiteReport {
        suite,
        seed,
        cases: total,
        properties,
        passed,
    })
}

fn case_label(i: usize, levels: &LevelStructure) -> String {
    format!("#{i} dims={:?}", levels.dims())
}

pub fn transition_suite(seed: u64, cases: usize) -> Result<Tally> {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("transition");
    for i in 0..cases {
        let levels = sampler.levels(LevelRanges::default());
        tally.set_case(case_label(i, &levels));
        transition_case(&levels, &mut tally)?;
    }
    Ok(tally)
}

/// Pairwise transition identities, basis transitions, closed forms, kernel
/// characterisations and powers on one level structure.
pub fn transition_case(levels: &LevelStructure, tally: &mut Tally) -> Result<()> {
    let tol = TRANSITION_TOL;
    let n = levels.n_levels();
    let d = levels.total_dim();
    for k in 1..=n {
        let nk = levels.dim_of(k);
        let f = dft(nk);
        tally.record("F unitary", tol, (&f * &f.adjoint()).max_abs_diff(&Operator::identity(nk)));
        for j in 0..(2 * nk as u64) {
            let want = if j % nk as u64 == 0 { nk as f64 } else { 0.0 };
            tally.record(
                "roots of unity sum",
                tol,
                (roots_of_unity_sum(nk, j) - c64::new(want, 0.0)).norm(),
            );
        }
        let basis = entangled_basis(levels, k)?;
        let frame = Operator::from_columns(d, &basis.vectors);
        tally.record(
            "entangled basis orthonormal",
            tol,
            (&frame.adjoint() * &frame).max_abs_diff(&Operator::identity(nk)),
        );
        let fk = embedded_dft(levels, k)?;
        let mut col = 0.0_f64;
        for a in 0..nk {
            let via = fk.adjoint().apply(&levels.ket(k, a)?);
            col = col.max(vector_max_abs_diff(&via, &basis.vectors[a]));
        }
        tally.record("entangled basis = F* canonical", tol, col);
    }
    for k in 1..=n {
        for k2 in k..=n {
            let (na, nb) = (levels.dim_of(k), levels.dim_of(k2));
            let z = transition_operator(levels, k, k2)?;
            let za = z.adjoint();
            let pk = levels.p_level(k);
            let pk2 = levels.p_level(k2);
            tally.record("Z Z* = P_k'", tol, (&z * &za).max_abs_diff(&pk2));
            let abs = &za * &z;
            tally.record("|Z| idempotent", tol, (&abs * &abs).max_abs_diff(&abs));
            tally.record("|Z| self-adjoint", tol, abs.max_abs_diff(&abs.adjoint()));
            let gap = &pk - &abs;
            let min = gap.eigenvalues_hermitian()?[0];
            tally.record("P_k - |Z| positive", tol, (-min).max(0.0));
            tally.record_bool("|Z| = P_k iff n_k = n_k'", (gap.norm_max() <= tol) == (na == nb));
            let comp = levels.embed(k, k, &closed_form::complement_block(na, nb))?;
            tally.record("P_k - |Z| closed form", tol, gap.max_abs_diff(&comp));
            let zf = &z * &embedded_dft(levels, k)?.adjoint();
            let want = levels.embed(k2, k, &closed_form::transition_times_inverse_dft(na, nb))?;
            tally.record("Z F* closed form", tol, zf.max_abs_diff(&want));
            if k != k2 {
                tally.record("Z^2 = 0", tol, (&z * &z).norm_max());
            }
            tally.record(
                "P_k' Z P_k = Z",
                tol,
                (&(&pk2 * &z) * &pk).max_abs_diff(&z),
            );
            let mut worst = 0.0_f64;
            for a in 0..na {
                let img = z.apply(&levels.ket(k, a)?);
                let want = levels.embed_vector(k2, &closed_form::transition_on_basis(na, nb, a))?;
                worst = worst.max(vector_max_abs_diff(&img, &want));
            }
            tally.record("Z|a_k> closed form", tol, worst);
        }
    }

    let t = Transport::new(levels);
    let mut upper = Operator::zeros(d, d);
    for k in 2..=n {
        upper = &upper + &levels.p_level(k);
    }
    tally.record("Z Z* = P_2 + ... + P_N", tol, (&t.z * &t.z_adj).max_abs_diff(&upper));
    tally.record(
        "|Z| entangled form",
        tol,
        t.abs.max_abs_diff(&closed_form::absolute_from_entangled(levels)),
    );
    tally.record(
        "|Z|perp entangled form",
        tol,
        t.abs_perp.max_abs_diff(&closed_form::absolute_perp_from_entangled(levels)),
    );
    let (mut fwd, mut back, mut ker, mut two, mut pow) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for k in 1..n {
        tally.record(
            "Z_k = Z_{k,k+1}",
            tol,
            t.z_k(k).max_abs_diff(&transition_operator(levels, k, k + 1)?),
        );
        for a in 0..levels.dim_of(k + 1) {
            let phi = entangled_vector(levels, k, a)?;
            let ket = levels.ket(k + 1, a)?;
            fwd = fwd.max(vector_max_abs_diff(&t.z.apply(&phi), &ket));
            back = back.max(vector_max_abs_diff(&t.z_adj.apply(&ket), &phi));
        }
        for a in levels.dim_of(k + 1)..levels.dim_of(k) {
            ker = ker.max(norm(&t.z.apply(&entangled_vector(levels, k, a)?)));
        }
        for a in 0..levels.dim_of(k) {
            if k + 2 <= n {
                let img = t.apply_power(&levels.ket(k, a)?, 2);
                let want = closed_form::two_step_on_basis(
                    levels.dim_of(k),
                    levels.dim_of(k + 1),
                    levels.dim_of(k + 2),
                    a,
                );
                two = two.max(vector_max_abs_diff(&img, &levels.embed_vector(k + 2, &want)?));
            }
        }
        for p in 1..=(n - k) {
            let (coef, target) = transport_power_on_zero(levels, k, p)?;
            let direct = t.apply_power(&levels.ket(k, 0)?, p);
            let want = crate::operator::scale_vector(&target.vector(levels)?, c64::new(coef, 0.0));
            pow = pow.max(vector_max_abs_diff(&direct, &want));
        }
        let range = Subspace::range_of(&t.abs_k(k), "ran");
        tally.record(
            "rank |Z|_k = n_{k+1}",
            0.0,
            (range.dim() as f64 - levels.dim_of(k + 1) as f64).abs(),
        );
        let img = &t.z * &range.frame;
        tally.record(
            "Z isometric on ran |Z|_k",
            tol,
            (&img.adjoint() * &img).max_abs_diff(&Operator::identity(range.dim())),
        );
    }
    tally.record("Z phi_{a_k} = |a_{k+1}>", tol, fwd);
    tally.record("Z* |a_{k+1}> = phi_{a_k}", tol, back);
    tally.record("Z phi_{a_k} = 0 for a >= n_{k+1}", tol, ker);
    if n >= 3 {
        tally.record("two-step closed form", tol, two);
    }
    if n >= 2 {
        tally.record("power formula on |0_k>", tol, pow);
    }
    let kb = kernel_basis(levels);
    tally.record("kernel basis annihilated", tol, (&t.z * &kb.frame).norm_max());
    let s = t.z.singular_values()?;
    let nullity = s.iter().filter(|&&x| x <= 1e-10).count();
    tally.record(
        "nullity Z = kernel basis + P_N + 2",
        0.0,
        (nullity as f64 - (kb.dim() + 2 + levels.dim_of(n)) as f64).abs(),
    );
    Ok(())
}

pub fn gksl_suite(seed: u64, cases: usize) -> Result<Tally> {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("gksl");
    for i in 0..cases {
        let model = sampler.model(LevelRanges::default())?;
        tally.set_case(case_label(i, model.levels()));
        gksl_case(&model, &mut sampler, &mut tally)?;
    }
    Ok(tally)
}

/// Generator identities on one model with random test operators.
pub fn gksl_case(model: &GKSLModel, sampler: &mut Sampler, tally: &mut Tally) -> Result<()> {
    let tol = GENERATOR_TOL;
    let d = model.dim();
    let levels = model.levels();
    let rho = sampler.density(d);
    let out = model.generator(rho.operator())?;
    tally.record("trace preservation", 1e-12, out.trace().norm() / rho.operator().norm_frobenius());
    let x = sampler.matrix(d, d);
    let lx = model.generator(&x)?;
    let lxd = model.generator(&x.adjoint())?;
    tally.record("Hermiticity preservation", 1e-12, lx.adjoint().max_abs_diff(&lxd));
    let obs = sampler.matrix(d, d);
    let lhs = (&obs * &model.generator(&x)?).trace();
    let rhs = (&model.dual_generator(&obs)? * &x).trace();
    tally.record("duality tr(x L(rho)) = tr(L*(x) rho)", tol, (lhs - rhs).norm());
    tally.record("L*(I) = 0", tol, model.dual_generator(&Operator::identity(d))?.norm_max());
    let pm = levels.projector(Block::Minus)?;
    tally.record("L(P_-) = 0", tol, model.generator(&pm)?.norm_max());
    let omega = omega_subspace(levels);
    if !omega.is_zero() {
        let r = sampler.density_on(&omega);
        tally.record(
            "reduced form on Omega",
            tol,
            model
                .generator(r.operator())?
                .max_abs_diff(&reduced_generator_omega(model, r.operator())),
        );
    }
    let perp = omega_perp_subspace(levels);
    let r = sampler.density_on(&perp);
    tally.record(
        "reduced form on Omega-perp",
        tol,
        model
            .generator(r.operator())?
            .max_abs_diff(&reduced_generator_omega_perp(model, r.operator())),
    );
    let r = sampler.matrix(d, d);
    let s = model.lindbladian_matrix()?;
    let via = Operator::unvectorize(&s.apply(&r.vectorize()), d)?;
    tally.record("superoperator = generator", tol, via.max_abs_diff(&model.generator(&r)?));
    let trace_row = Operator::identity(d).vectorize();
    let row = s.adjoint().apply(&trace_row);
    tally.record("superoperator trace row", tol, row.iter().map(|z| z.norm()).fold(0.0, f64::max));
    Ok(())
}

pub fn invariants_suite(seed: u64, cases: usize) -> Result<Tally> {
    let mut sampler = Sampler::new(seed);
    let mut tally = Tally::new("invariants");
    let ranges = LevelRanges {
        min_levels: 2,
        max_levels: 5,
        max_dim: 6,
    };
    const BETAS: [f64; 3] = [0.0, 0.5, 1.0];
    for i in 0..cases {
        let levels = sampler.levels(ranges);
        let beta = BETAS[i % BETAS.len()];
        let model = GKSLModel::thermal(levels, beta)?;
        tally.set_case(format!("{} beta={beta}", case_label(i, model.levels())));
        invariants_case(&model, &mut sampler, &mut tally)?;
    }
    Ok(tally)
}

/// Harmonicity, stratification, the invariant-state construction and its
/// oracle checks on one model.
pub fn invariants_case(model: &GKSLModel, sampler: &mut Sampler, tally: &mut Tally) -> Result<()> {
    let levels = model.levels();
    let d = model.dim();
    let n = levels.n_levels();
    let tol = STRUCTURE_TOL;
    let strat = stratify(levels)?;
    let t = model.transport();

    let pv = strat.v.projector();
    let pvp = &Operator::identity(d) - &pv;
    tally.record("L*(P_V) = 0", tol, model.dual_generator(&pv)?.norm_max());
    tally.record("L*(P_V-perp) = 0", tol, model.dual_generator(&pvp)?.norm_max());

    let mut kill = 0.0_f64;
    for k in model.kraus() {
        kill = kill.max((&k.op * &strat.w.frame).norm_max());
        kill = kill.max((&k.op.adjoint() * &strat.w.frame).norm_max());
    }
    tally.record("Kraus operators annihilate W", 1e-12, kill);
    if !strat.w.is_zero() {
        let rho = sampler.density_on(&strat.w);
        tally.record("states on W are invariant", 1e-12, model.generator(rho.operator())?.norm_max());
    }
    for name in ["W in V_1", "V = sum V_k", "V = sum Z^j V_1", "V_1 = W + M", "W perp M"] {
        let c = strat.check(name).expect("check present");
        tally.record(name, tol, c.residual);
    }
    let zj = strat
        .checks
        .iter()
        .filter(|c| c.name.starts_with("Z^"))
        .map(|c| c.residual)
        .fold(0.0, f64::max);
    tally.record("Z^j V_k = V_{k+j}", tol, zj);
    let mut img = strat.v.clone();
    let mut worst = 0.0_f64;
    for k in 1..n {
        img = img.image(&t.z, "Z^k V");
        let mut tail = Operator::zeros(d, d);
        for j in (k + 1)..=n {
            tail = &tail + &strat.level(j).projector();
        }
        worst = worst.max(img.projector().max_abs_diff(&tail));
        let src = strat.level(k).image(&t.abs_k(k), "|Z|_k V");
        let moved = &t.z * &src.frame;
        let iso = (&moved.adjoint() * &moved).max_abs_diff(&Operator::identity(src.dim()));
        let onto = Subspace::range_of(&moved, "img").projector_distance(strat.level(k + 1));
        tally.record("Z_k isometry |Z|_k V_k -> V_{k+1}", tol, iso.max(onto));
    }
    tally.record("Z^k V = sum_{j>k} V_j", tol, worst);
    if n == 2 {
        tally.record(
            "dim(V_1 - W) = max(n_2 - 2, 0)",
            0.0,
            (strat.v1_minus_w.dim() as f64 - levels.dim_of(2).saturating_sub(2) as f64).abs(),
        );
    }

    if !strat.v1_minus_w.is_zero() {
        let u = sampler.unit_vector_in(&strat.v1_minus_w);
        let mut a = Subspace::span(d, std::slice::from_ref(&u), "A_1");
        let mut worst = 0.0_f64;
        for _ in 1..n {
            let next = a.image(&t.z, "A");
            let lhs = &(&t.z_adj * &next.projector()) * &t.z;
            let rhs = &t.abs * &a.projector();
            worst = worst.max(lhs.max_abs_diff(&rhs));
            a = next;
        }
        tally.record("Z* P_{A_{k+1}} Z = |Z| P_{A_k}", tol, worst);

        let tau = Operator::outer(&u, &u);
        match construct_invariant_on(model, &strat.v1_minus_w, &tau) {
            Ok(rho) => {
                tally.record("constructed state is invariant", tol, model.generator(rho.operator())?.norm_max());
                match check_invariance(model, rho.operator(), tol) {
                    Ok(r) => {
                        tally.record_bool("check_invariance accepts constructed state", r.verdict);
                        tally.record_bool("invariance biconditional", r.consistent);
                    }
                    Err(_) => tally.record_error("check_invariance accepts constructed state", 0.0),
                }
                match extract_tau_on(model, &strat.v_minus_w, rho.operator()) {
                    Ok((back, _)) => tally.record(
                        "extract_tau(construct(tau)) = tau",
                        ROUND_TRIP_TOL,
                        back.operator().max_abs_diff(&tau),
                    ),
                    Err(_) => tally.record_error("extract_tau(construct(tau)) = tau", ROUND_TRIP_TOL),
                }
                if d <= ORACLE_MAX_DIM {
                    let kernel = model.stationary_kernel()?;
                    tally.record(
                        "constructed state in kernel span",
                        ROUND_TRIP_TOL,
                        model.kernel_distance(&kernel, rho.operator()),
                    );
                }
            }
            Err(_) => tally.record_error("constructed state is invariant", tol),
        }
    }
    if !strat.v_minus_w.is_zero() {
        let mut worst = 0.0_f64;
        for x in model.stationary_kernel_on(&strat.v_minus_w)? {
            let scale = x.norm_max();
            worst = worst.max(reconstruct(model, &x).max_abs_diff(&x) / scale);
        }
        tally.record("kernel on V-W reconstructs from level 1", ROUND_TRIP_TOL, worst);
    }

    let omega = omega_subspace(levels);
    if !omega.is_zero() {
        let rho = sampler.density_on(&omega);
        let report = check_invariance(model, rho.operator(), tol)?;
        tally.record_bool("invariance biconditional", report.consistent);
    }
    let mut leak = 0.0_f64;
    for x in model.stationary_kernel_on(&omega)? {
        leak = leak.max(strat.v.leak_residual(&x) / x.norm_max());
    }
    tally.record("invariants on Omega lie in V", ROUND_TRIP_TOL, leak);

    let u = omega_perp_uniqueness(model)?;
    if u.status != Uniqueness::Inconclusive {
        let dist = match (u.status, u.distance_to_ground) {
            (Uniqueness::Unique, Some(x)) => x,
            _ => 1.0,
        };
        tally.record("unique invariant on Omega-perp is P_-", ROUND_TRIP_TOL, dist);
    }
    Ok(())
}

/// Unit-trace copy of a kernel element, or `None` if its trace vanishes.
pub fn normalize_kernel_element(x: &Operator) -> Option<Operator> {
    let tr = x.trace();
    if tr.norm() <= 1e-10 * x.norm_max() {
        return None;
    }
    Some(x.scale(tr.inv()))
}

/// Convenience for callers holding a [`State`].
pub fn state_generator_residual(model: &GKSLModel, rho: &State) -> Result<f64> {
    Ok(model.generator(rho.operator())?.norm_max())
}
