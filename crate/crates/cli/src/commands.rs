use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use solvable_growth::descent::DEFAULT_K_MAX;
use solvable_growth::families::{coset_union, random_borel_subset, random_subgroup_set, unitriangular};
use solvable_growth::io::{format_matrix_set, parse_matrix_set};
use solvable_growth::setcalc::{
    avoiding_subset, check_olson, check_tripling, coset_bounds, growth_report, schreier_generators,
};
use solvable_growth::torus_roots::verify_ur_equals_ul;
use solvable_growth::unipotent::upper_positions;
use solvable_growth::{
    capture_ur, exp, log, run_dichotomy, run_pivot, upgrade_normal_ur, verify_certificate, weight_decompose,
    ActionCtx, Automorphism, DescentConfig, DescentInstance, DichotomyConfig, ElementSet, FieldCtx, Group,
    GroupElement, Matrix, NilpotentElement, SplitMix64,
};

use crate::settings::Settings;

/// Exhaustive exp/log runs refuse more cases than this.
const EXHAUSTIVE_LIMIT: u64 = 2_000_000;

/// Outcome of a subcommand: the `result` object and whether every verdict in it passed.
pub struct Run {
    pub result: Value,
    pub passed: bool,
}

pub fn read_set(path: &Path) -> Result<ElementSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix_set(&text).with_context(|| format!("parsing {}", path.display()))
}

fn closure(set: &ElementSet, cap: usize) -> Result<Group> {
    Ok(Group::generate(set.ctx(), set.dim(), set.to_vec(), cap)?)
}

fn unipotent_part(g: &Group) -> Result<Group> {
    Ok(Group::from_set(&g.elements().filter(|x| x.is_unitriangular()))?)
}

fn diagonal_part(g: &Group) -> Result<Group> {
    Ok(Group::from_set(&g.elements().filter(|x| x.is_diagonal()))?)
}

fn set_json(set: &ElementSet) -> Value {
    Value::from(set.sorted().iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    /// Random subset of a conjugate of U·<t>.
    Borel,
    /// All elements of a random subgroup.
    Subgroup,
    /// Union of diagonal translates of the full unitriangular group.
    CosetUnion,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "borel")]
    pub recipe: Recipe,
    /// Number of elements (borel) or generators (subgroup).
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    /// Number of cosets for coset-union.
    #[arg(long, default_value_t = 3)]
    pub cosets: usize,
    /// Largest subgroup the subgroup recipe may return.
    #[arg(long, default_value_t = 2000)]
    pub max_order: usize,
}

pub fn generate_instance(s: &Settings, args: &GenerateArgs) -> Result<ElementSet> {
    ensure!(args.size > 0, "size must be positive");
    let k = s.field()?;
    let mut rng = SplitMix64::new(s.seed);
    Ok(match args.recipe {
        Recipe::Borel => random_borel_subset(&k, s.r, args.size, &mut rng),
        Recipe::Subgroup => random_subgroup_set(&k, s.r, args.size, args.max_order, &mut rng),
        Recipe::CosetUnion => coset_union(&unitriangular(&k, s.r), args.cosets, &mut rng),
    })
}

pub fn generate(s: &Settings, args: &GenerateArgs) -> Result<String> {
    Ok(format_matrix_set(&generate_instance(s, args)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Tripling,
    Olson,
    B1,
    B5,
    Schreier,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    /// Matrix-set file holding A.
    #[arg(long)]
    pub set: PathBuf,
    /// Largest product length measured.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Lemma to evaluate on A, with H the unipotent part and R the diagonal
    /// part of <A> where one is needed.
    #[arg(long, value_enum)]
    pub check: Option<Check>,
}

pub fn growth(s: &Settings, args: &GrowthArgs) -> Result<Run> {
    ensure!(args.k > 0, "k must be positive");
    let a = read_set(&args.set)?;
    let report = growth_report(&a, args.k, s.cap)?;
    let mut passed =
        report.tripling.as_ref().is_none_or(|v| v.holds()) && report.olson.as_ref().is_none_or(|v| v.holds);
    let check = match args.check {
        None => Value::Null,
        Some(check) => {
            let (value, holds) = run_check(check, &a, args.k, s.cap)?;
            passed &= holds;
            json!({ "name": format!("{check:?}").to_lowercase(), "holds": holds, "verdict": value })
        }
    };
    Ok(Run { result: json!({ "report": report, "check": check }), passed })
}

fn run_check(check: Check, a: &ElementSet, k: usize, cap: usize) -> Result<(Value, bool)> {
    Ok(match check {
        Check::Tripling => {
            let v = check_tripling(a, k.max(3), cap)?;
            let holds = v.holds();
            (serde_json::to_value(v)?, holds)
        }
        Check::Olson => {
            let v = check_olson(a, a, &closure(a, cap)?, cap)?;
            let holds = v.holds;
            (serde_json::to_value(v)?, holds)
        }
        Check::B1 => {
            let h = unipotent_part(&closure(a, cap)?)?;
            let v = coset_bounds(a, a, &h, k.max(2), cap)?;
            let holds = v.holds();
            (serde_json::to_value(v)?, holds)
        }
        Check::B5 => {
            let r = diagonal_part(&closure(a, cap)?)?;
            let (y, v) = avoiding_subset(a, r.elements(), cap)?;
            let holds = v.size_bound && v.avoids;
            (json!({ "verdict": v, "y": set_json(&y) }), holds)
        }
        Check::Schreier => {
            let g = closure(a, cap)?;
            let h = unipotent_part(&g)?;
            let res = schreier_generators(a, &h, &g, cap)?;
            let v = json!({
                "a3_cap_h": res.a3_cap_h.len(),
                "generated_order": res.generated.order(),
                "h_order": h.order(),
                "certified": res.certified,
            });
            (v, res.certified)
        }
    })
}

#[derive(Args, Debug)]
pub struct ExplogArgs {
    /// Check every element of U_R(F_P) instead of sampling.
    #[arg(long, num_args = 2, value_names = ["R", "P"])]
    pub verify_exhaustive: Option<Vec<u64>>,
    /// Number of random cases when not exhaustive; uses --r and --p.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

/// The first identity that fails for `x`, with scalars `c1`, `c2`, and `u` the
/// unitriangular matrix with the same coordinates.
fn explog_failure(x: &NilpotentElement, u: &GroupElement, c1: u32, c2: u32) -> Option<&'static str> {
    let k = x.ctx();
    let Ok(e) = exp(x) else { return Some("exp defined") };
    if log(&e).ok().as_ref() != Some(x) {
        return Some("log(exp X) = X");
    }
    if log(u).ok().and_then(|l| exp(&l).ok()).as_ref() != Some(u) {
        return Some("exp(log u) = u");
    }
    if exp(&x.neg()).ok() != Some(e.inv()) {
        return Some("exp(-X) = exp(X)^-1");
    }
    let lhs = exp(&x.scale(k.add(c1, c2))).ok();
    let rhs = match (exp(&x.scale(c1)), exp(&x.scale(c2))) {
        (Ok(a), Ok(b)) => Some(a.mul_unchecked(&b)),
        _ => None,
    };
    if lhs.is_none() || lhs != rhs {
        return Some("exp((c1+c2)X) = exp(c1 X) exp(c2 X)");
    }
    None
}

fn unitriangular_from(k: &FieldCtx, r: usize, coords: &[u32]) -> Result<GroupElement> {
    let mut m = Matrix::identity(k, r);
    for (&(i, j), &v) in upper_positions(r).iter().zip(coords) {
        m.set(i, j, v);
    }
    Ok(GroupElement::new(m)?)
}

pub fn explog(s: &Settings, args: &ExplogArgs) -> Result<Run> {
    let (r, p, exhaustive) = match &args.verify_exhaustive {
        Some(v) => (v[0] as usize, u32::try_from(v[1]).context("P out of range")?, true),
        None => (s.r, s.p, false),
    };
    let k = FieldCtx::prime(p)?;
    ensure!(r >= 1, "r must be positive");
    let dim = upper_positions(r).len() as u32;
    let q = k.order() as u64;
    let total = if exhaustive {
        q.checked_pow(dim)
            .filter(|&n| n <= EXHAUSTIVE_LIMIT)
            .with_context(|| format!("{p}^{dim} cases exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}"))?
    } else {
        args.samples as u64
    };
    let mut rng = SplitMix64::new(s.seed);
    let mut failures = 0u64;
    let mut counterexample = Value::Null;
    for n in 0..total {
        let coords: Vec<u32> = if exhaustive {
            let mut m = n;
            (0..dim)
                .map(|_| {
                    let d = (m % q) as u32;
                    m /= q;
                    d
                })
                .collect()
        } else {
            (0..dim).map(|_| rng.below(q) as u32).collect()
        };
        let (c1, c2) = (rng.below(q) as u32, rng.below(q) as u32);
        let x = NilpotentElement::from_coords(&k, r, &coords);
        let u = unitriangular_from(&k, r, &coords)?;
        if let Some(identity) = explog_failure(&x, &u, c1, c2) {
            failures += 1;
            if counterexample.is_null() {
                counterexample = json!({ "coords": coords, "c1": c1, "c2": c2, "identity": identity });
            }
        }
    }
    Ok(Run {
        result: json!({
            "mode": if exhaustive { "exhaustive" } else { "sampled" },
            "r": r,
            "p": p,
            "cases": total,
            "failures": failures,
            "counterexample": counterexample,
        }),
        passed: failures == 0,
    })
}

#[derive(Args, Debug)]
pub struct RootsArgs {
    /// Generators of the unipotent group U.
    #[arg(long)]
    pub group: PathBuf,
    /// Generators of the diagonal torus T.
    #[arg(long)]
    pub torus: PathBuf,
}

pub fn roots(s: &Settings, args: &RootsArgs) -> Result<Run> {
    let u = closure(&read_set(&args.group)?, s.cap)?;
    let t = read_set(&args.torus)?;
    let datum = weight_decompose(&u, &t.to_vec())?;
    let urul = verify_ur_equals_ul(&datum, s.cap)?;
    let subgroups: Vec<Value> = datum
        .weight_subgroups
        .iter()
        .map(|w| {
            json!({
                "character": w.character.exponents,
                "height": w.height,
                "direction": w.direction.coords(),
                "order": w.elements().len(),
            })
        })
        .collect();
    let passed = urul.holds();
    Ok(Run {
        result: json!({
            "d": datum.d(),
            "weight_subgroups": subgroups,
            "roots": datum.roots,
            "lambda": datum.lambda,
            "unipotent_order": datum.unipotent.order(),
            "torus_order": datum.torus.order(),
            "u_r_order": datum.u_r.order(),
            "u_lambda_order": datum.u_lambda.order(),
            "series_orders": datum.series_orders,
            "factorization_exhaustive": datum.factorization_exhaustive,
            "u_r_equals_u_l": urul,
        }),
        passed,
    })
}

#[derive(Args, Debug)]
pub struct PivotArgs {
    /// Instance file of `key = value` lines:
    /// `group` (vector | unitriangular), `p`, `n`, `generator`, `x`, `w`.
    /// The automorphisms are conjugation by every diagonal matrix whose
    /// entries are powers of `generator` (last entry 1), listed with the
    /// first exponent varying fastest; `x` indexes that list and `w` indexes
    /// the sorted group elements.
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PivotInstance {
    pub unitriangular: bool,
    pub p: u32,
    pub n: usize,
    pub generator: u32,
    pub x: Vec<usize>,
    pub w: Vec<usize>,
}

fn index_list(key: &str, raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().with_context(|| format!("bad index {t:?} in {key}")))
        .collect()
}

pub fn parse_pivot_instance(text: &str) -> Result<PivotInstance> {
    let mut map = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (key, value) = line.split_once('=').context("expected `key = value`")?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    let get = |key: &str| map.get(key).with_context(|| format!("missing key {key}"));
    let unitriangular = match get("group")?.as_str() {
        "vector" => false,
        "unitriangular" => true,
        other => bail!("unknown group kind {other:?}"),
    };
    let inst = PivotInstance {
        unitriangular,
        p: get("p")?.parse().context("bad p")?,
        n: get("n")?.parse().context("bad n")?,
        generator: get("generator")?.parse().context("bad generator")?,
        x: index_list("x", get("x")?)?,
        w: index_list("w", get("w")?)?,
    };
    ensure!(inst.n >= 1, "n must be positive");
    ensure!(!inst.x.is_empty() && !inst.w.is_empty(), "x and w must be nonempty");
    Ok(inst)
}

/// Conjugations by `diag(c_1, .., c_m, 1)` with every `c_i` a power of `g`.
fn diagonal_autos(k: &FieldCtx, m: usize, g: u32) -> Result<Vec<Automorphism>> {
    ensure!(g != 0 && g < k.order(), "generator must be a nonzero field element");
    let mut powers = vec![1u32];
    let mut x = g;
    while x != 1 {
        powers.push(x);
        x = k.mul(x, g);
    }
    let total = powers.len().checked_pow(m as u32).filter(|&t| t <= 4096);
    ensure!(total.is_some(), "too many automorphisms");
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let mut d: Vec<u32> = idx.iter().map(|&i| powers[i]).collect();
        d.push(1);
        out.push(Automorphism::Conjugation(GroupElement::diagonal(k, &d)?));
        let mut j = 0;
        while j < m {
            idx[j] += 1;
            if idx[j] < powers.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == m {
            return Ok(out);
        }
    }
}

pub fn pivot(s: &Settings, args: &PivotArgs) -> Result<Run> {
    let text =
        fs::read_to_string(&args.instance).with_context(|| format!("reading {}", args.instance.display()))?;
    let inst = parse_pivot_instance(&text)?;
    let k = FieldCtx::prime(inst.p)?;
    let (group, autos) = if inst.unitriangular {
        (unitriangular(&k, inst.n), diagonal_autos(&k, inst.n - 1, inst.generator)?)
    } else {
        let gens = (0..inst.n).map(|i| GroupElement::transvection(&k, inst.n + 1, i, inst.n, 1)).collect();
        (Group::generate(&k, inst.n + 1, gens, s.cap)?, diagonal_autos(&k, inst.n, inst.generator)?)
    };
    let elems = group.elements().sorted();
    let ctx = ActionCtx::new(group, autos)?;
    ensure!(inst.x.iter().all(|&i| i < ctx.len()), "x index out of range (0..{})", ctx.len());
    ensure!(inst.w.iter().all(|&i| i < elems.len()), "w index out of range (0..{})", elems.len());
    let w = ElementSet::from_vec(inst.w.iter().map(|&i| elems[i].clone()).collect())?;
    let out = run_pivot(&ctx, &inst.x, &w)?;
    let verified = out.verify(&ctx, &inst.x, &w)?;
    Ok(Run {
        result: json!({
            "group_order": elems.len(),
            "automorphisms": ctx.len(),
            "branch": out.branch,
            "case": out.case,
            "x_size": out.x_size,
            "fixed_points": out.x,
            "y_size": out.y_size,
            "w_size": out.w_size,
            "orbit_group_order": out.group_order,
            "growth_bound": out.growth_bound(),
            "measured_size": out.measured.len(),
            "counting_bound": out.counting_bound,
            "frontier_capped": out.frontier_capped,
            "verified": verified,
        }),
        passed: verified,
    })
}

#[derive(Args, Debug)]
pub struct DescentArgs {
    /// Matrix-set file holding A.
    #[arg(long)]
    pub set: PathBuf,
    /// Generators of the unipotent group U; defaults to <A> ∩ U_r.
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Constant C for the measured hypotheses; defaults to --C.
    #[arg(long)]
    pub cmax: Option<f64>,
    /// Largest product length the construction may use.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub kmax: usize,
}

pub fn descent(s: &Settings, args: &DescentArgs) -> Result<Run> {
    let a = read_set(&args.set)?;
    let inst = match &args.group {
        None => DescentInstance::from_set(&a, s.cap)?,
        Some(path) => {
            let u = closure(&read_set(path)?, s.cap)?;
            let mut torus = Vec::new();
            for g in a.iter() {
                let t = GroupElement::diagonal(a.ctx(), &g.diag())?;
                if !t.is_identity() && !torus.contains(&t) {
                    torus.push(t);
                }
            }
            DescentInstance::new(&a, weight_decompose(&u, &torus)?, s.cap)?
        }
    };
    let cfg = DescentConfig { k_max: args.kmax, ..DescentConfig::default() };
    let cap = capture_ur(&inst, args.cmax.unwrap_or(s.c), &cfg)?;
    Ok(Run {
        result: json!({
            "u_r_order": cap.u_r.len(),
            "k": cap.k,
            "k_min": cap.report.k_min,
            "trace": cap.report,
        }),
        passed: true,
    })
}

#[derive(Args, Debug)]
pub struct DichotomyArgs {
    /// Matrix-set file holding A.
    #[arg(long)]
    pub set: PathBuf,
    /// Upgrade U_R to a normal subgroup of <A> and verify that as well.
    #[arg(long)]
    pub normal: bool,
}

pub fn dichotomy(s: &Settings, args: &DichotomyArgs) -> Result<Run> {
    let a = read_set(&args.set)?;
    let cfg = DichotomyConfig { delta: s.delta, cap: s.cap, ..DichotomyConfig::default() };
    let mut cert = run_dichotomy(&a, s.c, &cfg)?;
    if args.normal && !cert.is_growth() {
        cert = upgrade_normal_ur(&cert, &a, s.cap)?;
    }
    let verdict = verify_certificate(&cert, &a, args.normal, s.cap)?;
    let passed = verdict.holds();
    Ok(Run { result: json!({ "certificate": cert, "verification": verdict }), passed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Tripling,
    Olson,
    Cosets,
    Explog,
    Dichotomy,
    All,
}

#[derive(Args, Debug)]
pub struct FuzzArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Number of seeded instances per suite.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
}

/// Instance `i`: the generate recipes in turn, seeded by `seed + i`.
fn fuzz_instance(s: &Settings, k: &FieldCtx, i: usize) -> ElementSet {
    let mut rng = SplitMix64::new(s.seed.wrapping_add(i as u64));
    match i % 3 {
        0 => random_borel_subset(k, s.r, 1 + rng.below(8) as usize, &mut rng),
        1 => random_subgroup_set(k, s.r, 2, 1000, &mut rng),
        _ => {
            let base = random_subgroup_set(k, s.r, 1, 1000, &mut rng).filter(|x| x.is_unitriangular());
            let h = Group::from_set(&base).unwrap_or_else(|_| Group::trivial(k, s.r));
            coset_union(&h, 2 + rng.below(2) as usize, &mut rng)
        }
    }
}

fn fuzz_one(suite: Suite, s: &Settings, k: &FieldCtx, i: usize) -> Result<bool> {
    let mut a = fuzz_instance(s, k, i);
    Ok(match suite {
        Suite::Tripling => check_tripling(&a, 3 + i % 3, s.cap)?.holds(),
        Suite::Olson => {
            a.insert(GroupElement::identity(k, s.r));
            check_olson(&a, &a, &closure(&a, s.cap)?, s.cap)?.holds
        }
        Suite::Cosets => {
            let h = unipotent_part(&closure(&a, s.cap)?)?;
            coset_bounds(&a, &a, &h, 2 + i % 3, s.cap)?.holds()
        }
        Suite::Explog => {
            let mut rng = SplitMix64::new(s.seed.wrapping_add(i as u64));
            let q = k.order() as u64;
            let coords: Vec<u32> = upper_positions(s.r).iter().map(|_| rng.below(q) as u32).collect();
            let x = NilpotentElement::from_coords(k, s.r, &coords);
            let u = unitriangular_from(k, s.r, &coords)?;
            explog_failure(&x, &u, rng.below(q) as u32, rng.below(q) as u32).is_none()
        }
        Suite::Dichotomy => {
            let cfg = DichotomyConfig { delta: s.delta, cap: s.cap, ..DichotomyConfig::default() };
            let cert = run_dichotomy(&a, s.c, &cfg)?;
            verify_certificate(&cert, &a, false, s.cap)?.holds()
        }
        Suite::All => unreachable!("expanded by the caller"),
    })
}

pub fn fuzz(s: &Settings, args: &FuzzArgs) -> Result<Run> {
    let k = s.field()?;
    let suites = match args.suite {
        Suite::All => vec![Suite::Tripling, Suite::Olson, Suite::Cosets, Suite::Explog, Suite::Dichotomy],
        one => vec![one],
    };
    let mut passed = true;
    let mut result = serde_json::Map::new();
    for suite in suites {
        let (mut failing, mut errors) = (Vec::new(), Vec::new());
        for i in 0..args.count {
            match fuzz_one(suite, s, &k, i) {
                Ok(true) => {}
                Ok(false) => failing.push(i),
                Err(e) => errors.push(json!({ "instance": i, "error": format!("{e:#}") })),
            }
        }
        passed &= failing.is_empty() && errors.is_empty();
        result.insert(
            format!("{suite:?}").to_lowercase(),
            json!({
                "runs": args.count,
                "passed": args.count - failing.len() - errors.len(),
                "failing": failing,
                "errors": errors,
            }),
        );
    }
    Ok(Run { result: Value::Object(result), passed })
}
