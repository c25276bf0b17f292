use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use dendrite::boundary::{
    cauchy_compare, classify_kpoint, kpoint_cn, kpoint_of_regular, of_end, validate_kpoint, BoundaryError, Coord, KPoint,
};
use dendrite::dynamics::{build_example_d3, check_kd_monotone, classify_point, dot_export, realize, DynTag};
use dendrite::label::Label;
use dendrite::orbit_count::{count_orbit_types, OrbitCountError};
use dendrite::orders::{
    branch_points, build_clo, check_clo, chi_square_two_sample, chi_square_uniform, decode, nonconvex_example,
    pattern_counts, random_component_orders, root_of, transport_order, verify_transport, xi_fixing_preimage, CloWitness,
};
use dendrite::systems::{
    amalgamate, check_orbit_discipline, extend_to_l, inclusion, is_in_l, jep_obstruction, joint_embed, notap_pair,
    random_extension, random_system, random_universe, verify_embedding, Embedding, System, SystemError, SystemJson,
};
use dendrite::universe::UniverseJson;
use dendrite::{EndId, OrderSet, PointId, Target, Universe};

use crate::docs::{embedding, pairs, AmalgamInput, CloDoc, JointInput, KDoc, SequenceDoc, TransportInput};
use crate::render::{table, universe_dot};
use crate::{failed, read_input, usage, CliError, Command, Report, RunConfig, Sequence};

type Rng8 = ChaCha8Rng;

pub fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(usage("--alpha must lie strictly between 0 and 1"));
    }
    if cfg.max_points == Some(0) {
        return Err(usage("--max-points must be positive"));
    }
    if cfg.trials == Some(0) {
        return Err(usage("--trials must be positive"));
    }
    let mut rng = Rng8::seed_from_u64(cfg.seed);
    let rng = &mut rng;
    match cmd {
        Command::GenUniverse => gen_universe(cfg, rng),
        Command::GenSystem => gen_system(cfg, rng),
        Command::CheckL => check_l(cfg, rng),
        Command::ExtendL => extend_l(cfg, rng),
        Command::Amalgamate { notap } => amalgamate_cmd(cfg, rng, *notap),
        Command::JointEmbed => joint_embed_cmd(cfg, rng),
        Command::JepObstruction => jep(cfg),
        Command::ClassifyDynamics => classify_dynamics(cfg, rng),
        Command::ExampleD3 => example_d3(cfg, rng),
        Command::BuildClo => build_clo_cmd(cfg, rng),
        Command::CheckClo => check_clo_cmd(cfg, rng),
        Command::NonconvexExample => nonconvex(),
        Command::TransportOrder => transport(cfg, rng),
        Command::SampleMeasure { pushforwards } => sample_measure(cfg, rng, *pushforwards),
        Command::CountOrbits { orders } => count_orbits(cfg, orders),
        Command::KspaceValidate { double_infinity } => kspace_validate(cfg, rng, *double_infinity),
        Command::KspaceClassify => kspace_classify(cfg, rng),
        Command::CauchyCompare { sequence, length } => cauchy(cfg, *sequence, *length),
    }
}

fn value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn max_points(cfg: &RunConfig, default: usize) -> usize {
    cfg.max_points.unwrap_or(default)
}

fn universe_of(j: &UniverseJson) -> Result<Universe, CliError> {
    Universe::from_json(j).map_err(|e| usage(format!("--input: bad universe: {e}")))
}

fn system_of(j: &SystemJson) -> Result<System, CliError> {
    System::from_json(j).map_err(|e| usage(format!("--input: bad system: {e}")))
}

fn system_failed(e: SystemError) -> CliError {
    let (kind, diagnostic) = match &e {
        SystemError::Invalid(d) => ("invalid", Some(d.clone())),
        SystemError::NotInL(d) => ("not_in_l", Some(d.clone())),
        SystemError::OrbitConflict(_) => ("orbit_conflict", None),
        SystemError::NoProgress(_) => ("no_progress", None),
        SystemError::HypothesesViolated(_) => ("hypotheses_violated", None),
        SystemError::FiniteOrderUnsupported => ("finite_order_unsupported", None),
        _ => ("error", None),
    };
    CliError::Failed(json!({ "error": kind, "message": e.to_string(), "diagnostic": diagnostic }))
}

fn input_system(cfg: &RunConfig, rng: &mut Rng8, default: usize) -> Result<System, CliError> {
    match read_input::<SystemJson>(cfg)? {
        Some(j) => system_of(&j),
        None => Ok(random_system(rng.gen(), max_points(cfg, default))),
    }
}

fn phi_rows(s: &System) -> Vec<Vec<String>> {
    s.phi.iter().map(|(b, c)| vec![b.to_string(), c.to_string()]).collect()
}

fn gen_universe(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let u = random_universe(rng.gen(), max_points(cfg, 10) - 1);
    let rows = u
        .points()
        .map(|v| {
            let nb: Vec<String> = u.tree().neighbors(v).map(|w| w.to_string()).collect();
            vec![v.to_string(), u.label(v).unwrap().to_string(), nb.join(" ")]
        })
        .collect::<Vec<_>>();
    Ok(Report {
        json: value(&u.to_json()),
        table: Some(table(&["point", "label", "neighbours"], &rows)),
        dot: Some(universe_dot(&u, "universe", &BTreeMap::new())),
        passed: true,
    })
}

fn gen_system(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let s = random_system(rng.gen(), max_points(cfg, 8));
    let notes = s.phi.iter().map(|(b, c)| (*b, format!("↦ {c}"))).collect();
    Ok(Report {
        json: value(&s.to_json()),
        table: Some(table(&["b", "phi(b)"], &phi_rows(&s))),
        dot: Some(universe_dot(&s.universe, "system", &notes)),
        passed: true,
    })
}

fn check_l(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let s = input_system(cfg, rng, 8)?;
    let r = is_in_l(&s);
    let rows: Vec<Vec<String>> = r
        .conditions
        .iter()
        .map(|c| {
            let d = c.diagnostic.as_ref().map(|d| d.to_string()).unwrap_or_default();
            vec![c.id.clone(), if c.ok { "ok" } else { "FAIL" }.into(), d]
        })
        .collect();
    Ok(Report { json: value(&r), table: Some(table(&["condition", "status", "diagnostic"], &rows)), dot: None, passed: r.in_l })
}

fn extend_l(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let s = input_system(cfg, rng, 8)?;
    let (t, f) = extend_to_l(&s).map_err(system_failed)?;
    let in_l = is_in_l(&t).in_l;
    let embeds = verify_embedding(&s, &t, &f);
    let rows: Vec<Vec<String>> = f.iter().map(|(a, b)| vec![a.to_string(), b.to_string()]).collect();
    Ok(Report {
        json: json!({
            "system": t.to_json(),
            "embedding": pairs(&f),
            "in_l": in_l,
            "embeds": embeds.is_ok(),
            "diagnostic": embeds.as_ref().err(),
        }),
        table: Some(table(&["point", "image"], &rows)),
        dot: None,
        passed: in_l && embeds.is_ok(),
    })
}

fn compose(f: &Embedding, g: &Embedding) -> Option<Embedding> {
    f.iter().map(|(&a, b)| Some((a, *g.get(b)?))).collect()
}

fn amalgamate_cmd(cfg: &RunConfig, rng: &mut Rng8, notap: bool) -> Result<Report, CliError> {
    let input = if notap {
        if cfg.input.is_some() {
            return Err(usage("--notap does not take --input"));
        }
        let (base, s1, s2) = notap_pair();
        let i = pairs(&inclusion(&base));
        AmalgamInput { base: base.to_json(), s1: s1.to_json(), s2: s2.to_json(), i1: i.clone(), i2: i }
    } else if let Some(i) = read_input::<AmalgamInput>(cfg)? {
        i
    } else {
        let base = extend_to_l(&random_system(rng.gen(), max_points(cfg, 6))).map_err(system_failed)?.0;
        let s1 = extend_to_l(&random_extension(&base, rng.gen(), 2)).map_err(system_failed)?.0;
        let s2 = extend_to_l(&random_extension(&base, rng.gen(), 2)).map_err(system_failed)?.0;
        let i = pairs(&inclusion(&base));
        AmalgamInput { base: base.to_json(), s1: s1.to_json(), s2: s2.to_json(), i1: i.clone(), i2: i }
    };
    let (base, s1, s2) = (system_of(&input.base)?, system_of(&input.s1)?, system_of(&input.s2)?);
    let (i1, i2) = (embedding(&input.i1), embedding(&input.i2));
    let a = amalgamate(&base, &s1, &s2, &i1, &i2).map_err(system_failed)?;
    let k1 = compose(&i1, &a.j1);
    let commutes = k1.is_some() && k1 == compose(&i2, &a.j2);
    let discipline = k1.as_ref().is_some_and(|k| check_orbit_discipline(&base, &a.system, k));
    let rows: Vec<Vec<String>> = a
        .cases2
        .iter()
        .map(|(p, c)| vec![p.to_string(), format!("{c:?}"), a.j2.get(p).map(|q| q.to_string()).unwrap_or_default()])
        .collect();
    Ok(Report {
        json: json!({
            "input": input,
            "system": a.system.to_json(),
            "j1": pairs(&a.j1),
            "j2": pairs(&a.j2),
            "cases1": a.cases1,
            "cases2": a.cases2,
            "nodes": a.nodes,
            "commutes": commutes,
            "orbit_discipline": discipline,
        }),
        table: Some(table(&["s2 point", "case", "image"], &rows)),
        dot: None,
        passed: commutes && discipline,
    })
}

fn joint_embed_cmd(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let input = match read_input::<JointInput>(cfg)? {
        Some(i) => i,
        None => {
            let n = max_points(cfg, 6);
            JointInput { s: random_system(rng.gen(), n).to_json(), t: random_system(rng.gen(), n).to_json() }
        }
    };
    let (s, t) = (system_of(&input.s)?, system_of(&input.t)?);
    let j = joint_embed(&s, &t).map_err(system_failed)?;
    let embeds = verify_embedding(&s, &j.system, &j.f_s).is_ok() && verify_embedding(&t, &j.system, &j.f_t).is_ok();
    Ok(Report::json(
        json!({
            "input": input,
            "system": j.system.to_json(),
            "f_s": pairs(&j.f_s),
            "f_t": pairs(&j.f_t),
            "embeds": embeds,
        }),
        embeds,
    ))
}

fn jep(cfg: &RunConfig) -> Result<Report, CliError> {
    let n = cfg.k.unwrap_or(3);
    if !(3..=8).contains(&n) {
        return Err(usage(format!("--k {n}: jep-obstruction needs a branch order between 3 and 8")));
    }
    let w = jep_obstruction(n as u32);
    Ok(Report::json(w.to_json(), w.conflict))
}

fn classify_dynamics(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let s0 = input_system(cfg, rng, 6)?;
    let extended = !is_in_l(&s0).in_l;
    let s = if extended { extend_to_l(&s0).map_err(system_failed)?.0 } else { s0 };
    let g = realize(&s, rng.gen()).map_err(failed)?;
    let mut u = s.universe.clone();
    let pts: Vec<PointId> = u.points().collect();
    let mut classes = Vec::new();
    for &x in &pts {
        classes.push(classify_point(&g, &mut u, x).map_err(failed)?);
    }
    let mut moved = Vec::new();
    for c in &classes {
        if classify_point(&g, &mut u, c.orbit[1]).map_err(failed)?.tag != c.tag {
            moved.push(c.point);
        }
    }
    let kd = [2, 3].into_iter().map(|n| check_kd_monotone(&g, &mut u, n, &pts)).collect::<Result<Vec<_>, _>>().map_err(failed)?;
    let passed = moved.is_empty() && kd.iter().all(|r| r.violations.is_empty());
    let rows: Vec<Vec<String>> = classes
        .iter()
        .map(|c| {
            let orbit: Vec<String> = c.orbit.iter().map(|p| p.to_string()).collect();
            vec![c.point.to_string(), format!("{:?}", c.tag), orbit.join(" ")]
        })
        .collect();
    Ok(Report {
        json: json!({
            "system": s.to_json(),
            "extended": extended,
            "classes": classes,
            "orbit_changes": moved,
            "kd": kd,
        }),
        table: Some(table(&["point", "class", "orbit"], &rows)),
        dot: Some(dot_export(&u, &classes)),
        passed,
    })
}

/// `n` random insertions that respect the order set and degree caps.
fn grow(u: &mut Universe, rng: &mut Rng8, n: u64) {
    let mut labels = u.order_set().labels();
    labels.push(Label::Regular);
    let mut made = 0;
    for _ in 0..n * 50 {
        if made == n {
            break;
        }
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(rng).expect("nonempty");
        let q = *pts.choose(rng).expect("nonempty");
        let ok = if p != q && rng.gen_bool(0.5) {
            u.add_between(p, q, *labels.choose(rng).expect("nonempty")).is_ok()
        } else {
            u.add_branch(p).is_ok()
        };
        made += u64::from(ok);
    }
}

fn example_d3(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let mut ex = build_example_d3();
    grow(&mut ex.universe, rng, cfg.trials.unwrap_or(20));
    let u = &mut ex.universe;
    let g2 = ex.g.power(2);
    let pts: Vec<PointId> = u.points().collect();
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let mut k_g2 = Vec::new();
    let mut all_k = true;
    let mut notes = BTreeMap::new();
    for &p in &pts {
        let t1 = classify_point(&ex.g, u, p).map_err(failed)?.tag;
        let t2 = classify_point(&g2, u, p).map_err(failed)?.tag;
        all_k &= t1 == DynTag::KPart;
        if !t2.in_d() {
            k_g2.push(p);
        }
        let side = |t: DynTag| if t.in_d() { "D" } else { "K" };
        notes.insert(p, format!("g:{} g²:{}", side(t1), side(t2)));
        rows.push(vec![p.to_string(), format!("{t1:?}"), format!("{t2:?}")]);
        points.push(json!({ "point": p, "g": t1, "g2": t2 }));
    }
    let passed = all_k && k_g2 == [ex.x];
    Ok(Report {
        json: json!({
            "x": ex.x,
            "c1": ex.c1,
            "c2": ex.c2,
            "end": ex.end,
            "universe": u.to_json(),
            "points": points,
            "k_g_is_everything": all_k,
            "k_g2": k_g2,
        }),
        table: Some(table(&["point", "g", "g^2"], &rows)),
        dot: Some(universe_dot(u, "d3", &notes)),
        passed,
    })
}

fn rank_notes(w: &CloWitness) -> BTreeMap<PointId, String> {
    w.order.iter().enumerate().map(|(i, &p)| (p, format!("#{i}"))).collect()
}

fn order_rows(u: &Universe, w: &CloWitness) -> Vec<Vec<String>> {
    w.order.iter().enumerate().map(|(i, p)| vec![i.to_string(), p.to_string(), u.label(*p).unwrap().to_string()]).collect()
}

fn generated_clo(cfg: &RunConfig, rng: &mut Rng8) -> Result<(Universe, EndId, dendrite::orders::ComponentOrders, CloWitness), CliError> {
    let mut u = random_universe(rng.gen(), max_points(cfg, 12) - 1);
    let pts: Vec<PointId> = u.points().collect();
    let xi = u.register_end(*pts.choose(rng).expect("nonempty")).map_err(failed)?;
    let comps = random_component_orders(&u, Target::End(xi), rng).map_err(failed)?;
    let w = build_clo(&u, xi, &comps).map_err(failed)?;
    Ok((u, xi, comps, w))
}

fn build_clo_cmd(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let (u, xi, comps, w) = generated_clo(cfg, rng)?;
    let check = check_clo(&u, &w).map_err(failed)?;
    Ok(Report {
        json: json!({ "universe": u.to_json(), "xi": xi, "components": comps, "witness": w, "check": check }),
        table: Some(table(&["rank", "point", "label"], &order_rows(&u, &w))),
        dot: Some(universe_dot(&u, "clo", &rank_notes(&w))),
        passed: check.ok(),
    })
}

fn check_clo_cmd(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let doc = match read_input::<CloDoc>(cfg)? {
        Some(d) => d,
        None => {
            let (u, _, _, w) = generated_clo(cfg, rng)?;
            CloDoc { universe: u.to_json(), witness: w }
        }
    };
    let u = universe_of(&doc.universe)?;
    let w = CloWitness::new(&u, doc.witness.order.clone(), doc.witness.root).map_err(failed)?;
    if w.points != doc.witness.points {
        return Err(failed("witness points differ from its order"));
    }
    let check = check_clo(&u, &w).map_err(failed)?;
    let root = root_of(&u, &w.order).ok();
    let show = |o: Option<String>| o.unwrap_or_else(|| "ok".into());
    let rows = vec![
        vec!["converging".into(), show(check.not_converging.map(|t| format!("{t:?}")))],
        vec!["root".into(), show(check.root_incompatible.map(|t| format!("{t:?}")))],
        vec![
            "convex".into(),
            show(check.not_convex.map(|v| format!("a={} a'={} b={} b'={} at {}", v.a, v.a_prime, v.b, v.b_prime, v.center))),
        ],
    ];
    Ok(Report {
        json: json!({ "ok": check.ok(), "check": check, "root": root }),
        table: Some(table(&["check", "result"], &rows)),
        dot: Some(universe_dot(&u, "clo", &rank_notes(&w))),
        passed: check.ok(),
    })
}

fn nonconvex() -> Result<Report, CliError> {
    let ex = nonconvex_example();
    let u = &ex.universe;
    let check = check_clo(u, &ex.witness).map_err(failed)?;
    let mut notes = rank_notes(&ex.witness);
    for (p, name) in [(ex.x0, "x0"), (ex.c, "c"), (ex.a, "a"), (ex.a_prime, "a'"), (ex.b, "b"), (ex.b_prime, "b'")] {
        notes.entry(p).and_modify(|n| *n = format!("{n} {name}"));
    }
    Ok(Report {
        json: json!({
            "universe": u.to_json(),
            "witness": ex.witness,
            "x0": ex.x0,
            "c": ex.c,
            "a": ex.a,
            "a_prime": ex.a_prime,
            "b": ex.b,
            "b_prime": ex.b_prime,
            "check": check,
        }),
        table: Some(table(&["rank", "point", "label"], &order_rows(u, &ex.witness))),
        dot: Some(universe_dot(u, "nonconvex", &notes)),
        passed: true,
    })
}

fn random_subset(u: &Universe, w: &CloWitness, rng: &mut Rng8) -> BTreeSet<PointId> {
    let mut pts = w.order.clone();
    pts.shuffle(rng);
    pts.truncate(rng.gen_range(1..=pts.len()));
    u.cl(&pts.into_iter().collect())
}

fn generated_pair(cfg: &RunConfig, rng: &mut Rng8) -> Result<TransportInput, CliError> {
    let mut u = random_universe(rng.gen(), rng.gen_range(0..max_points(cfg, 8)));
    let pts: Vec<PointId> = u.points().collect();
    let root = |u: &mut Universe, rng: &mut Rng8| -> Result<Target, CliError> {
        let p = *pts.choose(rng).expect("nonempty");
        if rng.gen_bool(0.5) {
            Ok(Target::Point(p))
        } else {
            Ok(Target::End(u.register_end(p).map_err(failed)?))
        }
    };
    let t1 = root(&mut u, rng)?;
    let t2 = if matches!(t1, Target::End(_)) && rng.gen_bool(0.5) { t1 } else { root(&mut u, rng)? };
    let mut build = |t: Target| -> Result<CloWitness, CliError> {
        let comps = random_component_orders(&u, t, rng).map_err(failed)?;
        let mut all: Vec<PointId> = u.points().collect();
        all.shuffle(rng);
        all.truncate(rng.gen_range(1..=all.len()));
        decode(&u, t, &comps, &u.cl(&all.into_iter().collect())).map_err(failed)
    };
    let w1 = build(t1)?;
    let w2 = build(t2)?;
    let f = random_subset(&u, &w1, rng);
    Ok(TransportInput { universe: u.to_json(), w1, w2, f })
}

fn transport(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let input = match read_input::<TransportInput>(cfg)? {
        Some(i) => i,
        None => generated_pair(cfg, rng)?,
    };
    let mut u = universe_of(&input.universe)?;
    let t = transport_order(&mut u, &input.f, &input.w1, &input.w2).map_err(failed)?;
    let verdict = verify_transport(&u, &input.f, &input.w1, &input.w2, &t);
    let map: Vec<(PointId, Option<PointId>)> = input.f.iter().map(|&x| (x, t.iso.get(x))).collect();
    let rows: Vec<Vec<String>> =
        map.iter().map(|(x, y)| vec![x.to_string(), y.map(|y| y.to_string()).unwrap_or_default()]).collect();
    Ok(Report {
        json: json!({
            "input": input,
            "universe": u.to_json(),
            "map": map,
            "target": t.target,
            "verified": verdict.is_ok(),
            "error": verdict.as_ref().err(),
        }),
        table: Some(table(&["point", "image"], &rows)),
        dot: Some(universe_dot(&u, "transport", &rank_notes(&t.target))),
        passed: verdict.is_ok(),
    })
}

fn sample_measure(cfg: &RunConfig, rng: &mut Rng8, pushforwards: usize) -> Result<Report, CliError> {
    let k = cfg.k.unwrap_or(3);
    if !(1..=5).contains(&k) {
        return Err(usage(format!("--k {k}: sample-measure takes between 1 and 5 components")));
    }
    let trials = cfg.trials.unwrap_or(100_000);
    let mut u = Universe::new(OrderSet::infinite());
    let h = u.root();
    let xi = u.register_end(h).map_err(failed)?;
    let reps: Vec<PointId> = (0..k).map(|_| u.add_branch(h)).collect::<Result<_, _>>().map_err(failed)?;
    let counts = pattern_counts(&u, xi, &reps, trials, rng.gen()).map_err(failed)?;
    let uniform = chi_square_uniform(&counts);
    let mut passed = uniform.passes(cfg.alpha);
    let mut pushed = Vec::new();
    for _ in 0..pushforwards {
        let mut v = u.clone();
        let pre = xi_fixing_preimage(&mut v, xi, &reps, rng.gen()).map_err(failed)?;
        let c2 = pattern_counts(&v, xi, &pre, trials, rng.gen()).map_err(failed)?;
        let r = chi_square_two_sample(&counts, &c2);
        passed &= r.passes(cfg.alpha);
        pushed.push(json!({ "preimage": pre, "pass": r.passes(cfg.alpha), "report": r }));
    }
    let expected = trials as f64 / counts.len() as f64;
    let rows: Vec<Vec<String>> =
        counts.iter().enumerate().map(|(i, c)| vec![i.to_string(), c.to_string(), format!("{expected:.1}")]).collect();
    let mut tab = table(&["pattern", "count", "expected"], &rows);
    tab.push_str(&format!("chi2 = {:.4}, dof = {}, p = {:.6}, alpha = {}\n", uniform.statistic, uniform.dof, uniform.p_value, cfg.alpha));
    Ok(Report {
        json: json!({
            "k": k,
            "trials": trials,
            "alpha": cfg.alpha,
            "branch_point": h,
            "xi": xi,
            "points": reps,
            "uniform": uniform,
            "pass_uniform": uniform.passes(cfg.alpha),
            "pushforwards": pushed,
            "pass": passed,
        }),
        table: Some(tab),
        dot: None,
        passed,
    })
}

fn parse_orders(s: &str) -> Result<OrderSet, CliError> {
    let mut finite = Vec::new();
    let mut infinite = false;
    for part in s.split(',').map(str::trim) {
        match part {
            "inf" | "∞" => infinite = true,
            n => match n.parse::<u32>() {
                Ok(n) if n >= 3 => finite.push(n),
                _ => return Err(usage(format!("--orders: {part:?} is neither inf nor a branch order ≥ 3"))),
            },
        }
    }
    Ok(OrderSet::new(finite, infinite))
}

fn count_orbits(cfg: &RunConfig, orders: &str) -> Result<Report, CliError> {
    let s = parse_orders(orders)?;
    let k = cfg.k.unwrap_or(3);
    let count = count_orbit_types(k, &s).map_err(|e| match e {
        OrbitCountError::LimitExceeded { .. } => usage(format!("--k: {e}")),
    })?;
    let rows = vec![vec![k.to_string(), orders.to_string(), count.to_string()]];
    Ok(Report {
        json: json!({ "k": k, "orders": s, "count": count }),
        table: Some(table(&["k", "orders", "count"], &rows)),
        dot: None,
        passed: true,
    })
}

/// A universe with regular points, branch points and a few ends.
fn k_universe(cfg: &RunConfig, rng: &mut Rng8) -> Result<Universe, CliError> {
    let mut u = Universe::new(OrderSet::infinite());
    for _ in 0..max_points(cfg, 10) - 1 {
        let pts: Vec<PointId> = u.points().collect();
        let p = *pts.choose(rng).expect("nonempty");
        let q = *pts.choose(rng).expect("nonempty");
        let l = if rng.gen_bool(0.3) { Label::Regular } else { Label::Infinite };
        if p != q && rng.gen_bool(0.5) {
            u.add_between(p, q, l).map_err(failed)?;
        } else if u.label(p).map_err(failed)?.is_branch() {
            u.add_branch(p).map_err(failed)?;
        }
    }
    let br: Vec<PointId> = branch_points(&u).into_iter().collect();
    for _ in 0..rng.gen_range(0..3) {
        u.register_end(*br.choose(rng).expect("the root branches")).map_err(failed)?;
    }
    Ok(u)
}

fn random_kpoint(u: &Universe, rng: &mut Rng8) -> Result<KPoint, BoundaryError> {
    let br: Vec<PointId> = branch_points(u).into_iter().collect();
    let regular: Vec<PointId> = u.points().filter(|p| !br.contains(p)).collect();
    let ends: Vec<EndId> = u.ends().map(|(e, _)| e).collect();
    loop {
        return match rng.gen_range(0..4) {
            0 if !regular.is_empty() => kpoint_of_regular(u, *regular.choose(rng).unwrap()),
            1 if !ends.is_empty() => of_end(u, *ends.choose(rng).unwrap()),
            2 => {
                let b = *br.choose(rng).unwrap();
                let n = rng.gen_range(0..u.components_at(b)?.len());
                kpoint_cn(u, b, Some(n))
            }
            3 => kpoint_cn(u, *br.choose(rng).unwrap(), None),
            _ => continue,
        };
    }
}

fn kdoc(cfg: &RunConfig, rng: &mut Rng8) -> Result<KDoc, CliError> {
    if let Some(d) = read_input::<KDoc>(cfg)? {
        return Ok(d);
    }
    let u = k_universe(cfg, rng)?;
    let kpoint = random_kpoint(&u, rng).map_err(failed)?;
    Ok(KDoc { universe: u.to_json(), kpoint })
}

fn coord_rows(k: &KPoint) -> Vec<Vec<String>> {
    k.coords
        .iter()
        .map(|(b, c)| {
            let c = match c {
                Coord::Inf => "inf".to_string(),
                Coord::Comp(r) => format!("{}/{}", r.at, r.key),
            };
            vec![b.to_string(), c]
        })
        .collect()
}

fn kspace_validate(cfg: &RunConfig, rng: &mut Rng8, double_infinity: bool) -> Result<Report, CliError> {
    let mut doc = kdoc(cfg, rng)?;
    let u = universe_of(&doc.universe)?;
    if double_infinity {
        let mut br: Vec<PointId> = branch_points(&u).into_iter().collect();
        if br.len() < 2 {
            return Err(usage("--double-infinity needs two branch points"));
        }
        br.shuffle(rng);
        for &b in &br[..2] {
            doc.kpoint.coords.insert(b, Coord::Inf);
        }
    }
    let v = validate_kpoint(&u, &doc.kpoint).map_err(failed)?;
    Ok(Report {
        json: json!({ "universe": doc.universe, "kpoint": doc.kpoint, "valid": v.is_none(), "violation": v }),
        table: Some(table(&["b", "coordinate"], &coord_rows(&doc.kpoint))),
        dot: None,
        passed: v.is_none(),
    })
}

fn kspace_classify(cfg: &RunConfig, rng: &mut Rng8) -> Result<Report, CliError> {
    let doc = kdoc(cfg, rng)?;
    let u = universe_of(&doc.universe)?;
    if let Some(v) = validate_kpoint(&u, &doc.kpoint).map_err(failed)? {
        return Err(CliError::Failed(json!({ "error": "invalid_kpoint", "violation": v })));
    }
    let class = classify_kpoint(&u, &doc.kpoint).map_err(failed)?;
    let mut tab = table(&["b", "coordinate"], &coord_rows(&doc.kpoint));
    tab.push_str(&format!("class: {class:?}\n"));
    Ok(Report {
        json: json!({ "universe": doc.universe, "kpoint": doc.kpoint, "kind": class.kind(), "class": class }),
        table: Some(tab),
        dot: None,
        passed: true,
    })
}

fn sequence(kind: Sequence, length: usize) -> Result<SequenceDoc, CliError> {
    let mut u = Universe::new(OrderSet::infinite());
    let mut seq = Vec::new();
    match kind {
        Sequence::Alternating => {
            let b = u.root();
            let mut tips = [u.add_branch(b).map_err(failed)?, u.add_branch(b).map_err(failed)?];
            for i in 0..length {
                let p = u.add_between(b, tips[i % 2], Label::Infinite).map_err(failed)?;
                tips[i % 2] = p;
                seq.push(u.register_end(p).map_err(failed)?);
            }
        }
        Sequence::Descending => {
            let mut p = u.root();
            for _ in 0..length {
                p = u.add_branch(p).map_err(failed)?;
                let q = u.add_branch(p).map_err(failed)?;
                seq.push(u.register_end(q).map_err(failed)?);
            }
        }
    }
    Ok(SequenceDoc { universe: u.to_json(), sequence: seq })
}

fn cauchy(cfg: &RunConfig, kind: Sequence, length: usize) -> Result<Report, CliError> {
    let doc = match read_input::<SequenceDoc>(cfg)? {
        Some(d) => d,
        None => sequence(kind, length)?,
    };
    let u = universe_of(&doc.universe)?;
    let horizon = cfg.horizon.unwrap_or(2);
    let v = cauchy_compare(&u, &doc.sequence, horizon).map_err(|e| match e {
        BoundaryError::HorizonTooSmall { .. } => usage(format!("--horizon: {e}")),
        e => failed(e),
    })?;
    let f: Vec<String> = v.f.iter().map(|p| p.to_string()).collect();
    let rows = vec![vec![horizon.to_string(), f.join(" "), v.d_inf_cauchy.to_string(), v.k_cauchy.to_string()]];
    Ok(Report {
        json: json!({ "universe": doc.universe, "sequence": doc.sequence, "verdict": v }),
        table: Some(table(&["horizon", "F", "D_inf Cauchy", "K Cauchy"], &rows)),
        dot: None,
        passed: true,
    })
}
