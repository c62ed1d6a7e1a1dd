use std::fmt::Write as _;
use std::path::Path;

use num_rational::Ratio;
use serde_json::json;

use sharkovsky_core::cache::{append_records, read_cache, to_csv};
use sharkovsky_core::mandelbrot::{
    complex_centers, limb_wake_angles, trace_parameter_ray, verify_limb_periods, verify_real_vein_ordering,
    CenterConfig, CenterRecord, LimbConfig, RaySchedule, Status,
};
use sharkovsky_core::orderings::{closed_form_cross_check, KOrder, PeriodSet, Verdict};
use sharkovsky_core::star::{brute_force_periods, make_spiral_cycle, make_stefan_cycle, periods_from_markov, PeriodSearch};
use sharkovsky_core::vein::{
    admissible_set, explicit_chain, forced_order, secondary_transform, surgery_real_to_principal,
    visible_component_tree, ChainOutcome, Forcing, VeinSpec,
};
use sharkovsky_core::{Error, Result, StarTreeMap};

use crate::args::{Cli, Group, MandelAction, OrderAction, StarAction, VeinAction};
use crate::report::{num, Output};

pub fn run(cli: &Cli) -> Result<Output> {
    let digits = cli.precision;
    match &cli.group {
        Group::Order { action } => order(action),
        Group::Star { action } => star(action),
        Group::Vein { action } => vein(action),
        Group::Mandel { action } => mandel(action, digits),
    }
}

/// Root tolerance for `--precision D`; double precision stops near 1e-14.
fn tolerance(digits: u32) -> f64 {
    10f64.powi(-(digits as i32)).max(1e-14)
}

fn set_csv(s: &PeriodSet) -> String {
    let mut out = String::from("period\n");
    for n in s.iter() {
        let _ = writeln!(out, "{n}");
    }
    out
}

fn order(action: &OrderAction) -> Result<Output> {
    match *action {
        OrderAction::Compare { k, n, m } => {
            let order = KOrder::new(k)?;
            let verdict = order.compare(n, m)?;
            let (text, reason) = match verdict {
                Verdict::Equal => (format!("{n} = {m}"), None),
                Verdict::Incomparable => (format!("{n} and {m} are incomparable under >_{k}"), None),
                Verdict::Greater => {
                    let why = order.justify(n, m)?.expect("greater has a reason").describe(k, n, m);
                    (format!("{n} >_{k} {m} ({why})"), Some(why))
                }
                Verdict::Less => {
                    let why = order.justify(m, n)?.expect("less has a reason").describe(k, m, n);
                    (format!("{n} <_{k} {m} ({why})"), Some(why))
                }
            };
            let mut out = Output::new(
                "order compare",
                json!({"k": k, "n": n, "m": m}),
                json!({"verdict": verdict, "statement": text.split(" (").next(), "reason": reason}),
                text,
            )
            .cite(if k == 2 { "sharkovsky-order" } else { "k-order" });
            if let Some(r) = &reason {
                out = out.cite(r.split(':').next().unwrap_or(r).to_string());
            }
            Ok(out)
        }
        OrderAction::Downset { k, n, horizon } => {
            let set = KOrder::new(k)?.down_set(n, horizon)?;
            let text = format!("periods forced by {n} under >_{k}: {set}");
            let csv = set_csv(&set);
            Ok(Output::new("order downset", json!({"k": k, "n": n, "horizon": horizon}), &set, text)
                .cite("k-order down-set")
                .csv(csv))
        }
        OrderAction::Crosscheck { k, l, horizon } => {
            let ls: Vec<u64> = match l {
                Some(l) => vec![l],
                None => (1..k.max(2)).collect(),
            };
            let checks = ls.iter().map(|&l| closed_form_cross_check(k, l, horizon)).collect::<Result<Vec<_>>>()?;
            let mut text = String::new();
            let mut csv = String::from("k,l,gcd,threshold,only_in_down_set,only_in_closed_form\n");
            let mut agree = true;
            for c in &checks {
                agree &= c.only_in_down_set.is_empty() && c.only_in_closed_form.is_empty();
                let _ = writeln!(
                    text,
                    "k={} l={} gcd={} threshold={}: only in down-set {:?}, only in closed form {:?}",
                    c.k, c.l, c.gcd, c.threshold, c.only_in_down_set, c.only_in_closed_form
                );
                let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    c.k,
                    c.l,
                    c.gcd,
                    c.threshold,
                    join(&c.only_in_down_set),
                    join(&c.only_in_closed_form)
                );
            }
            let out = Output::new("order crosscheck", json!({"k": k, "l": l, "horizon": horizon}), &checks, text)
                .cite("k-order down-set")
                .csv(csv);
            Ok(if agree { out } else { out.warn("the down-set and the closed form differ below the horizon") })
        }
    }
}

fn cycle(k: usize, n: usize) -> Result<StarTreeMap> {
    if k == 2 {
        make_stefan_cycle(n)
    } else {
        make_spiral_cycle(k, n)
    }
}

fn search_text(s: &PeriodSearch) -> String {
    let mut text = format!("periods: {}\n", s.periods);
    for w in &s.witnesses {
        let path = if w.itinerary.is_empty() { "alpha".to_string() } else { w.itinerary.join(" ") };
        let _ = write!(text, "  {}: {}", w.period, path);
        if let Some(p) = &w.point {
            let _ = write!(text, "  at {}", serde_json::to_string(p).expect("point serializes"));
        }
        text.push('\n');
    }
    text
}

fn star(action: &StarAction) -> Result<Output> {
    match *action {
        StarAction::Build { k, n } => {
            let t = cycle(k, n)?;
            let text = t.to_string();
            Ok(Output::new(
                "star build",
                json!({"k": k, "n": n}),
                json!({"tree": &t, "is_spiral": t.is_spiral_graph()}),
                text,
            )
            .cite(if k == 2 { "stefan-cycle" } else { "spiral-cycle" }))
        }
        StarAction::Markov { k, n } => {
            let g = cycle(k, n)?.markov_graph();
            let mut text = format!("{} nodes, {} arcs\n", g.node_count(), g.arc_names().len());
            for (a, b) in g.arc_names() {
                let _ = writeln!(text, "  {a} -> {b}");
            }
            let dot = g.to_dot();
            Ok(Output::new("star markov", json!({"k": k, "n": n}), &g, text).cite("markov-graph").dot(dot))
        }
        StarAction::Periods { k, n, horizon } => {
            let s = periods_from_markov(&cycle(k, n)?.markov_graph(), horizon)?;
            let csv = set_csv(&s.periods);
            Ok(Output::new("star periods", json!({"k": k, "n": n, "horizon": horizon}), &s, search_text(&s))
                .cite("nonrepetitive-loop")
                .csv(csv))
        }
        StarAction::Oracle { k, n, horizon } => {
            let s = brute_force_periods(&cycle(k, n)?, horizon)?;
            let csv = set_csv(&s.periods);
            Ok(Output::new("star oracle", json!({"k": k, "n": n, "horizon": horizon}), &s, search_text(&s))
                .cite("piecewise-linear-model")
                .csv(csv))
        }
    }
}

fn vein(action: &VeinAction) -> Result<Output> {
    match *action {
        VeinAction::Admissible { k, l, p, max } => {
            let v = VeinSpec::new(k, l, p)?;
            let set = admissible_set(&v, max)?;
            let text = format!("periods on the ({k}, {l})-vein: {set}");
            let csv = set_csv(&set);
            Ok(Output::new("vein admissible", json!({"k": k, "l": l, "p": p, "max": max}), &set, text)
                .cite("vein-admissible")
                .csv(csv))
        }
        VeinAction::Force { k, l, p, n1, n2 } => {
            let v = VeinSpec::new(k, l, p)?;
            let forcing = forced_order(&v, n1, n2)?;
            let order = KOrder::new(k)?;
            let (first, second) = match forcing {
                Forcing::First => (n1, n2),
                Forcing::Second => (n2, n1),
                Forcing::Undetermined => (n1, n2),
            };
            let mut reasons = Vec::new();
            if forcing != Forcing::Undetermined {
                if let Some(j) = order.justify(first, second)? {
                    reasons.push(j.describe(k, first, second));
                }
                if !v.is_principal() {
                    reasons.push(format!("{} >=_{k} {second}", k + l));
                }
            }
            let text = match forcing {
                Forcing::Undetermined => format!("order of C({n1}) and C({n2}) on the ({k}, {l})-vein is not determined"),
                _ => format!("C({first}) lies beyond C({second}) on the ({k}, {l})-vein ({})", reasons.join("; ")),
            };
            let mut out = Output::new(
                "vein force",
                json!({"k": k, "l": l, "p": p, "n1": n1, "n2": n2}),
                json!({"forcing": forcing, "reasons": reasons}),
                text,
            )
            .cite("vein-forcing");
            for r in &reasons {
                if r.starts_with("rule") {
                    out = out.cite(r.split(':').next().unwrap_or(r).to_string());
                }
            }
            Ok(out)
        }
        VeinAction::Chain { k, l, max } => {
            let v = VeinSpec::new(k, l, None)?;
            let inputs = json!({"k": k, "l": l, "max": max});
            match explicit_chain(&v, max)? {
                ChainOutcome::Supported(chain) => {
                    let mut text = String::new();
                    let mut csv = String::from("rank,period\n");
                    for e in &chain.entries {
                        let _ = writeln!(text, "{:>4}  {:>4}  {}", e.rank, e.period, e.justification);
                        let _ = writeln!(csv, "{},{}", e.rank, e.period);
                    }
                    let mut out = Output::new("vein chain", inputs, &chain, text).cite("explicit-chain").csv(csv);
                    for w in &chain.warnings {
                        out = out.warn(w.clone());
                    }
                    Ok(out)
                }
                ChainOutcome::Unsupported { reason, .. } => {
                    let text = format!("unsupported: {reason}");
                    Ok(Output::new("vein chain", inputs, json!({"status": "unsupported", "reason": reason}), text)
                        .cite("explicit-chain"))
                }
            }
        }
        VeinAction::Surgery { n, k } => {
            let t = surgery_real_to_principal(&make_stefan_cycle(n)?, k)?;
            let text = format!("{t}spiral: {}\n", t.is_spiral_graph());
            Ok(Output::new(
                "vein surgery",
                json!({"n": n, "k": k}),
                json!({"period": t.period(), "tree": &t, "is_spiral": t.is_spiral_graph()}),
                text,
            )
            .cite("surgery"))
        }
        VeinAction::Transform { k, n } => {
            let outcome = secondary_transform(&make_spiral_cycle(k, n)?)?;
            let text = format!(
                "{}alpha preimage: {}\ninserted point: {}\n",
                outcome.tree,
                serde_json::to_string(&outcome.alpha_preimage).expect("point serializes"),
                serde_json::to_string(&outcome.inserted).expect("point serializes"),
            );
            Ok(Output::new("vein transform", json!({"k": k, "n": n}), &outcome, text).cite("secondary-transform"))
        }
        VeinAction::Visible { k } => {
            let t = visible_component_tree(k)?;
            let leaves: Vec<String> = t.leaves.iter().map(u64::to_string).collect();
            let text = format!("seen from C({k}): root C({}), leaves C({})", t.root, leaves.join("), C("));
            Ok(Output::new("vein visible", json!({"k": k}), &t, text).cite("visible-tree"))
        }
    }
}

fn complex_text(c: &CenterRecord, digits: u32) -> String {
    let (re, im) = (num(c.value.re, digits), num(c.value.im.abs(), digits));
    let sign = if c.value.im < 0.0 { '-' } else { '+' };
    format!("{re} {sign} {im}i")
}

fn cached_centers(path: &Path, n: u32, cfg: &CenterConfig) -> Result<(Vec<CenterRecord>, Vec<String>, bool)> {
    let io = |e: std::io::Error| Error::InvalidArgument(format!("cache {}: {e}", path.display()));
    let (existing, warnings) = if path.exists() {
        let c = read_cache(path).map_err(io)?;
        (c.records, c.warnings)
    } else {
        (Vec::new(), Vec::new())
    };
    let hits: Vec<CenterRecord> = existing.into_iter().filter(|r| r.period == n).collect();
    if !hits.is_empty() {
        return Ok((hits, warnings, true));
    }
    let found = complex_centers(n, cfg)?.centers;
    append_records(path, &found).map_err(io)?;
    Ok((found, warnings, false))
}

fn mandel(action: &MandelAction, digits: u32) -> Result<Output> {
    let cfg = CenterConfig::with_precision(tolerance(digits));
    match action {
        MandelAction::Centers { n, cache } => {
            let n = *n;
            let inputs = json!({"n": n, "cache": cache.as_ref().map(|p| p.display().to_string())});
            let (centers, mut warnings, from_cache, search) = match cache {
                Some(path) => {
                    let (c, w, hit) = cached_centers(path, n, &cfg)?;
                    (c, w, hit, None)
                }
                None => {
                    let s = complex_centers(n, &cfg)?;
                    (s.centers.clone(), Vec::new(), false, Some(s))
                }
            };
            if let Some(s) = &search {
                if !s.borderline.is_empty() {
                    warnings.push(format!("{} roots too close to a lower-period root to classify", s.borderline.len()));
                }
                if s.unconverged > 0 {
                    warnings.push(format!("{} roots did not converge", s.unconverged));
                }
                for (lo, hi) in &s.real_failures {
                    warnings.push(format!("real candidate in [{lo}, {hi}] has no confirming sign change"));
                }
            }
            let mut text = format!("{} centers of exact period {n}\n", centers.len());
            for c in &centers {
                let _ = writeln!(text, "  {}  |Q_n| <= {:.2e}", complex_text(c, digits), c.residual_bound);
            }
            let results = json!({
                "period": n,
                "count": centers.len(),
                "source": if from_cache { "cache" } else { "computed" },
                "centers": centers,
                "borderline": search.as_ref().map(|s| s.borderline.len()),
                "lower_period": search.as_ref().map(|s| s.lower_period),
                "unconverged": search.as_ref().map(|s| s.unconverged),
            });
            let csv = rounded_csv(&centers, digits);
            let mut out = Output::new("mandel centers", inputs, results, text).cite("center-polynomial").csv(csv);
            for w in warnings {
                out = out.warn(w);
            }
            Ok(out)
        }
        MandelAction::VerifyReal { max } => {
            let r = verify_real_vein_ordering(*max, &cfg)?;
            let mut text = String::new();
            for (i, v) in r.values.iter().enumerate() {
                let shown = v.map_or("not found".to_string(), |x| num(x, digits));
                let _ = writeln!(text, "c_{} = {shown}", i + 1);
            }
            let failing: Vec<String> = r
                .pairs
                .iter()
                .filter(|p| p.status != Status::Pass)
                .map(|p| format!("({}, {}): {}", p.n, p.m, p.status))
                .collect();
            let _ = writeln!(text, "{} pairs checked, {} not passing", r.pairs.len(), failing.len());
            for f in &failing {
                let _ = writeln!(text, "  {f}");
            }
            let mut csv = String::from("period,value\n");
            for (i, v) in r.values.iter().enumerate() {
                let _ = writeln!(csv, "{},{}", i + 1, v.map_or(String::new(), |x| num(x, digits)));
            }
            let status = r.status;
            Ok(Output::new("mandel verify-real", json!({"max": max}), &r, text)
                .cite("sharkovsky-order")
                .cite("real-vein")
                .csv(csv)
                .status(status))
        }
        MandelAction::WakeAngles { p, k } => {
            let (lo, hi) = limb_wake_angles(*p, *k)?;
            let text = format!("{p}/{k}-wake: lower {lo}, upper {hi}");
            Ok(Output::new(
                "mandel wake-angles",
                json!({"p": p, "k": k}),
                json!({"lower": lo.to_string(), "upper": hi.to_string()}),
                text,
            )
            .cite("limb-wake"))
        }
        MandelAction::TraceRay { angle, depth } => {
            let theta: Ratio<u64> = angle
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("angle must be a fraction a/b, got {angle:?}")))?;
            let sched = RaySchedule { depth: *depth, ..RaySchedule::default() };
            let t = trace_parameter_ray(theta, &sched)?;
            let mut text = format!("ray {theta}: {} points\n", t.points.len());
            match t.landing_estimate {
                Some(c) => {
                    let _ = writeln!(text, "landing estimate: {} {} {}i", num(c.re, digits), if c.im < 0.0 { '-' } else { '+' }, num(c.im.abs(), digits));
                }
                None => text.push_str("landing estimate: none\n"),
            }
            if let Some(step) = t.final_step() {
                let _ = writeln!(text, "final step: {step:.2e}");
            }
            let mut csv = String::from("potential,real,imag\n");
            for (c, g) in t.points.iter().zip(&t.potentials) {
                let _ = writeln!(csv, "{},{},{}", num(*g, digits), num(c.re, digits), num(c.im, digits));
            }
            let mut out = Output::new("mandel trace-ray", json!({"angle": angle, "depth": depth}), &t, text)
                .cite("parameter-ray")
                .csv(csv);
            if let Some(d) = &t.diagnostic {
                out = out.warn(d.clone());
            }
            Ok(out)
        }
        MandelAction::VerifyLimb { p, k, l, max } => {
            let lcfg = LimbConfig { centers: cfg, ..LimbConfig::default() };
            let r = verify_limb_periods(*p, *k, *l, *max, &lcfg)?;
            let mut text = format!("{p}/{k}-limb, ({k}, {l})-vein, periods up to {max}: found {:?}\n", r.found);
            let mut csv = String::from("period,expectation,inside,outside,untested,status\n");
            for f in &r.periods {
                let status = f.status.map_or("-".to_string(), |s| s.to_string());
                let _ = writeln!(
                    text,
                    "  {:>3}  {:<7} inside {} outside {} untested {}  {status}",
                    f.period,
                    format!("{:?}", f.expectation).to_lowercase(),
                    f.inside,
                    f.outside,
                    f.untested
                );
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{status}",
                    f.period,
                    format!("{:?}", f.expectation).to_lowercase(),
                    f.inside,
                    f.outside,
                    f.untested
                );
            }
            let untested: usize = r.periods.iter().map(|f| f.untested).sum();
            let status = r.status;
            let mut out = Output::new("mandel verify-limb", json!({"p": p, "k": k, "l": l, "max": max}), &r, text)
                .cite("limb-wake")
                .cite("vein-admissible")
                .csv(csv)
                .status(status);
            if untested > 0 {
                out = out.warn(format!("{untested} centers too close to a wake ray to place"));
            }
            Ok(out)
        }
    }
}

fn rounded_csv(records: &[CenterRecord], digits: u32) -> String {
    let rounded: Vec<CenterRecord> = records
        .iter()
        .map(|r| {
            let mut r = *r;
            r.value.re = crate::report::round(r.value.re, digits);
            r.value.im = crate::report::round(r.value.im, digits);
            r
        })
        .collect();
    to_csv(&rounded)
}
