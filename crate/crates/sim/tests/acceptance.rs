//! Acceptance suite: prints one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use vts_core::fleet::{HelloMessage, MobilityTrace, Registry, VehicleId};
use vts_core::geometry::{build_tiling, zone_side_length};
use vts_core::netsim::airtime;
use vts_core::scenario::{self, FleetConfig, RunOutput, ScenarioConfig, VehicleSpec};
use vts_core::selection::{select_reporters, SelectionParams};
use vts_core::trust::{Credibility, RankingList, Rankings, StaticTable};
use vts_core::{Point3, SimTime, Strategy, Tiling, TilingMode, ZoneId};
use vts_sim::eventlog::{self, LogFormat};
use vts_sim::experiment::{run_experiment, Experiment};
use vts_sim::load_scenario;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

// ---------------------------------------------------------------- geometry

fn sample_in_radius(rng: &mut ChaCha8Rng, r: f64, mode: TilingMode) -> Point3 {
    loop {
        let mut c = [0.0; 3];
        for v in c.iter_mut().take(mode.dims()) {
            *v = rng.gen_range(-r..r);
        }
        let p = Point3::from(c);
        if p.norm() < r {
            return p;
        }
    }
}

fn strictly_inside(t: &Tiling, id: usize, p: &Point3) -> bool {
    let z = &t.zones()[id];
    (0..3).all(|a| z.min_corner.axis(a) + 1e-9 < p.axis(a) && p.axis(a) < z.max_corner.axis(a) - 1e-9)
}

fn geometry_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let mut tilings = 0;
    for (mode, max_ratio) in [(TilingMode::Line, 60.0), (TilingMode::Disc, 15.0), (TilingMode::Ball, 4.0)] {
        for _ in 0..20 {
            let d = rng.gen_range(10.0..300.0);
            let r = d * rng.gen_range(0.2..max_ratio);
            let t = build_tiling(r, d, mode).unwrap();
            tilings += 1;
            let s = t.side();
            let cells: BTreeSet<[i64; 3]> = t.zones().iter().map(|z| z.cell).collect();
            if cells.len() != t.len() {
                failures.push(format!("{mode} r={r:.1} d={d:.1}: repeated cell"));
            }
            for z in t.zones() {
                if z.diagonal() > d * (1.0 + 1e-12) {
                    failures.push(format!("{mode} r={r:.1} d={d:.1}: diagonal {}", z.diagonal()));
                }
                let aligned = (0..3).all(|a| {
                    (z.min_corner.axis(a) - (z.cell[a] as f64 - 0.5) * s).abs() < 1e-9 * s
                        && (z.max_corner.axis(a) - (z.cell[a] as f64 + 0.5) * s).abs() < 1e-9 * s
                });
                if !aligned {
                    failures.push(format!("{mode}: zone {} off the lattice", z.id));
                }
            }
            let mut rng_cov = ChaCha8Rng::seed_from_u64(rng.gen());
            for _ in 0..100_000 {
                let p = sample_in_radius(&mut rng_cov, r, mode);
                match t.locate(&p) {
                    Some(id) if t.zone(id).unwrap().contains(&p) => {}
                    _ => {
                        failures.push(format!("{mode} r={r:.1} d={d:.1}: {p:?} uncovered"));
                        break;
                    }
                }
            }
            for _ in 0..10_000 {
                let p = sample_in_radius(&mut rng_cov, r * 1.1, mode);
                let inside = (0..t.len()).filter(|&i| strictly_inside(&t, i, &p)).count();
                if inside > 1 {
                    failures.push(format!("{mode}: {p:?} inside {inside} zones"));
                }
                if t.locate(&p) != t.locate_linear(&p) {
                    failures.push(format!("{mode}: locate disagrees at {p:?}"));
                    break;
                }
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{tilings} tilings, 1e5 coverage + 1e4 locate samples each")
        } else {
            failures[..failures.len().min(3)].join("; ")
        },
    )
}

fn side_length() -> Verdict {
    let s = zone_side_length(100.0).unwrap();
    let want = 100.0 / 3f64.sqrt();
    let rel = (s - want).abs() / want;
    verdict(rel <= 1e-9, format!("s = {s}, relative error {rel:e}"))
}

// --------------------------------------------------------------- selection

#[derive(Clone)]
struct Cand {
    id: u32,
    cred: f64,
    pos: Point3,
}

fn random_zone(rng: &mut ChaCha8Rng) -> Vec<Cand> {
    let n = rng.gen_range(1..=12);
    (0..n)
        .map(|i| Cand {
            id: 100 + i * 7,
            cred: (rng.gen_range(0..=100) as f64) / 100.0,
            pos: Point3::new(rng.gen_range(0.0..57.7), rng.gen_range(0.0..57.7), 0.0),
        })
        .collect()
}

fn zone_inputs(cands: &[Cand]) -> (RankingList, Registry) {
    let tiling = build_tiling(1000.0, 100.0, TilingMode::Disc).unwrap();
    let mut reg = Registry::new();
    let mut list = RankingList::new(ZoneId(0));
    for c in cands {
        reg.apply(
            &HelloMessage { vehicle_id: VehicleId(c.id), position: c.pos, speed: 0.0, timestamp: SimTime::ZERO },
            &tiling,
        );
        list.insert(VehicleId(c.id), Credibility::new(c.cred).unwrap()).unwrap();
    }
    (list, reg)
}

fn clear_count(c: &Cand, chosen: &[Cand], range: f64) -> usize {
    chosen.iter().filter(|r| c.pos.distance(&r.pos) > range + 1e-9).count()
}

/// Independent greedy: returns the chosen ids and, per admission step, the
/// candidates that were available with their weights.
fn oracle_greedy(cands: &[Cand], m: usize, alpha: f64, range: f64) -> (Vec<u32>, Vec<Vec<(Cand, f64)>>) {
    let mut left = cands.to_vec();
    let mut chosen: Vec<Cand> = Vec::new();
    let mut steps = Vec::new();
    if left.is_empty() {
        return (vec![], steps);
    }
    let head = (0..left.len())
        .max_by(|&a, &b| left[a].cred.total_cmp(&left[b].cred).then(left[b].id.cmp(&left[a].id)))
        .unwrap();
    chosen.push(left.remove(head));
    while chosen.len() < m && !left.is_empty() {
        let beta = (1.0 - alpha) / chosen.len() as f64;
        let scored: Vec<(Cand, f64)> = left
            .iter()
            .map(|c| (c.clone(), alpha * c.cred + beta * clear_count(c, &chosen, range) as f64))
            .collect();
        let best = (0..scored.len())
            .max_by(|&a, &b| {
                scored[a]
                    .1
                    .total_cmp(&scored[b].1)
                    .then(scored[a].0.cred.total_cmp(&scored[b].0.cred))
                    .then(scored[b].0.id.cmp(&scored[a].0.id))
            })
            .unwrap();
        steps.push(scored);
        chosen.push(left.remove(best));
    }
    (chosen.iter().map(|c| c.id).collect(), steps)
}

fn selection_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut not_max = 0;
    for _ in 0..200 {
        let cands = random_zone(&mut rng);
        let m = rng.gen_range(1..=6);
        let alpha = rng.gen_range(0.05..0.95);
        let range = rng.gen_range(5.0..60.0);
        let (list, reg) = zone_inputs(&cands);
        let params = SelectionParams { reporters_per_zone: m, alpha, interference_range: range, ..Default::default() };
        let set = select_reporters(&list, &reg, &params, SimTime::ZERO);
        let got: Vec<u32> = set.vehicles().map(|v| v.0).collect();
        let (want, steps) = oracle_greedy(&cands, m, alpha, range);
        if got != want {
            mismatches += 1;
            continue;
        }
        for (k, scored) in steps.iter().enumerate() {
            let admitted = set.reporters[k + 1].weight.unwrap();
            if scored.iter().any(|(_, w)| *w > admitted + 1e-12) {
                not_max += 1;
            }
        }
    }
    verdict(mismatches == 0 && not_max == 0, format!("200 zones: {mismatches} mismatches, {not_max} non-max admissions"))
}

fn non_interference_preference() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alpha = 0.5;
    let (mut instances, mut steps_checked, mut partial, mut full) = (0, 0, 0, 0);
    while instances < 500 {
        let cands = random_zone(&mut rng);
        let m = rng.gen_range(2..=5);
        let range = rng.gen_range(5.0..60.0);
        let (list, reg) = zone_inputs(&cands);
        let params = SelectionParams { reporters_per_zone: m, alpha, interference_range: range, ..Default::default() };
        let set = select_reporters(&list, &reg, &params, SimTime::ZERO);
        let by_id: BTreeMap<u32, &Cand> = cands.iter().map(|c| (c.id, c)).collect();
        let mut counted = false;
        for k in 1..set.len() {
            let chosen: Vec<Cand> = set.reporters[..k].iter().map(|r| by_id[&r.vehicle.0].clone()).collect();
            let remaining: Vec<&Cand> =
                cands.iter().filter(|c| !set.reporters[..k].iter().any(|r| r.vehicle.0 == c.id)).collect();
            if !remaining.iter().any(|c| clear_count(c, &chosen, range) == k) {
                continue;
            }
            counted = true;
            steps_checked += 1;
            let admitted = by_id[&set.reporters[k].vehicle.0];
            let clear = clear_count(admitted, &chosen, range);
            if clear < k {
                partial += 1;
            }
            if clear == 0 {
                full += 1;
            }
        }
        if counted {
            instances += 1;
        }
    }
    verdict(
        partial == 0,
        format!(
            "{instances} instances, {steps_checked} steps with a clear candidate: {partial} admissions interfering \
             with some reporter, {full} interfering with every reporter"
        ),
    )
}

// -------------------------------------------------------------- scenarios

fn load(name: &str) -> ScenarioConfig {
    load_scenario(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e:#}"))
}

fn means(exp: &Experiment, strategy: Strategy) -> Vec<(f64, f64, Option<f64>)> {
    exp.summary_for(strategy).map(|r| (r.value.unwrap(), r.mean_rlr, r.mean_ard)).collect()
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..=j] {
            out[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    out
}

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn loss_vs_reporters(exp: &Experiment, cfg: &ScenarioConfig, elapsed: Duration) -> Verdict {
    let vts_runs = exp.runs.iter().filter(|r| r.strategy == Strategy::Vts);
    let vts_lossless = vts_runs.clone().all(|r| r.rlr == 0.0);
    let vts_sent: u64 = vts_runs.map(|r| r.reports_sent).sum();
    let ba = means(exp, Strategy::BroadcastAll);
    let xs: Vec<f64> = ba.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = ba.iter().map(|p| p.1).collect();
    let monotone = ys.windows(2).all(|w| w[1] >= w[0]);
    let rho = spearman(&xs, &ys);
    let seeds = cfg.seeds.count;
    let pass = vts_lossless && vts_sent > 0 && monotone && rho >= 0.9 && seeds >= 30 && elapsed.as_secs_f64() < 60.0;
    let curve: Vec<String> = ys.iter().map(|y| format!("{y:.3}")).collect();
    verdict(
        pass,
        format!(
            "VTS RLR 0 in every run: {vts_lossless}; BROADCAST_ALL mean RLR [{}] non-decreasing: {monotone}, \
             Spearman {rho:.3}; {seeds} seeds; {:.1}s",
            curve.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn delay_vs_reporters(exp: &Experiment) -> Verdict {
    let vts: Vec<f64> = means(exp, Strategy::Vts).iter().filter_map(|p| p.2).collect();
    let ba = means(exp, Strategy::BroadcastAll);
    let (lo, hi) = vts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    let variation = (hi - lo) / lo;
    let first = ba.first().and_then(|p| p.2).unwrap_or(f64::NAN);
    let last = ba.last().and_then(|p| p.2).unwrap_or(f64::NAN);
    let ratio = last / first;
    verdict(
        vts.len() == ba.len() && variation < 0.2 && ratio >= 2.0,
        format!(
            "VTS mean ARD {:.3}..{:.3} ms (variation {:.1}%); BROADCAST_ALL ARD {:.3} -> {:.3} ms ({ratio:.2}x)",
            lo * 1e3,
            hi * 1e3,
            variation * 100.0,
            first * 1e3,
            last * 1e3
        ),
    )
}

fn loss_vs_cs_range() -> Verdict {
    let cfg = load("cs_range.toml");
    let points = cfg.sweep_points().unwrap();
    let seeds: Vec<u64> = cfg.seeds.seeds().collect();
    let mut jobs = Vec::new();
    for (v, _) in &points {
        for &s in &cfg.strategies {
            jobs.extend(seeds.iter().map(|&seed| (v.unwrap(), s, seed)));
        }
    }
    let outs: Vec<(f64, RunOutput)> = jobs
        .par_iter()
        .map(|&(cs, s, seed)| {
            let pc = &points.iter().find(|(v, _)| *v == Some(cs)).unwrap().1;
            (cs, scenario::run(pc, s, seed).unwrap())
        })
        .collect();

    let mut problems = Vec::new();
    let mut unsensed_points = BTreeSet::new();
    for (cs, out) in &outs {
        let far = out.transmitters.iter().all(|v| {
            let p = out.registry.get(*v).unwrap().position;
            p.distance(&Point3::ORIGIN) > *cs
        });
        if far && out.metrics.reports_sent > 0 {
            unsensed_points.insert(*cs as i64);
            if out.metrics.rlr != 1.0 {
                problems.push(format!("{} at cs {cs}: RLR {} with every sender out of range", out.strategy, out.metrics.rlr));
            }
        }
        if *cs >= 30.0 && out.strategy == Strategy::Vts && (out.metrics.rlr != 0.0 || out.metrics.reports_sent == 0) {
            problems.push(format!("VTS at cs {cs} seed {}: RLR {}", out.seed, out.metrics.rlr));
        }
    }
    let mut ba: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for (cs, out) in &outs {
        if out.strategy == Strategy::BroadcastAll && *cs >= 30.0 {
            ba.entry(*cs as i64).or_default().push(out.metrics.rlr);
        }
    }
    let curve: Vec<(i64, f64)> = ba.iter().map(|(k, v)| (*k, v.iter().sum::<f64>() / v.len() as f64)).collect();
    let decreasing = curve.windows(2).all(|w| w[1].1 <= w[0].1 && (w[0].1 == 0.0 || w[1].1 < w[0].1));
    let drop = curve.last().unwrap().1 < curve[0].1;
    if !(decreasing && drop) {
        problems.push("BROADCAST_ALL mean RLR does not fall with cs_range".into());
    }
    let shown: Vec<String> = curve.iter().map(|(k, v)| format!("{k}:{v:.3}")).collect();
    verdict(
        problems.is_empty() && !unsensed_points.is_empty(),
        if problems.is_empty() {
            format!(
                "RLR 100% for all strategies at cs {:?}; VTS RLR 0 for cs >= 30; BROADCAST_ALL [{}]",
                unsensed_points,
                shown.join(", ")
            )
        } else {
            problems[..problems.len().min(3)].join("; ")
        },
    )
}

fn delay_vs_size() -> Verdict {
    let cfg = load("report_size.toml");
    let exp = run_experiment(&cfg, false).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for s in cfg.strategies.iter().copied() {
        let ard: Vec<f64> = means(&exp, s).iter().map(|p| p.2.unwrap_or(f64::NAN)).collect();
        let increasing = ard.windows(2).all(|w| w[1] > w[0]);
        pass &= increasing;
        notes.push(format!("{s} increasing: {increasing}"));
    }
    let at800 = |s| means(&exp, s).last().and_then(|p| p.2).unwrap_or(f64::NAN);
    let ratio = at800(Strategy::Vts) / at800(Strategy::BroadcastAll);
    pass &= ratio <= 0.5;
    verdict(pass, format!("{}; VTS/BROADCAST_ALL ARD at 800 B = {ratio:.3}", notes.join(", ")))
}

fn exact_airtime() -> Verdict {
    let a800 = airtime(800, 1_000_000);
    let a100 = airtime(100, 1_000_000);
    let cfg = ScenarioConfig {
        fleet: FleetConfig {
            vehicles: vec![VehicleSpec { id: 1, credibility: Some(0.9), waypoints: vec![[0.0, 12.0, 0.0, 0.0]] }],
            groups: vec![],
            trace_file: None,
        },
        ..ScenarioConfig::default()
    };
    let difs = cfg.radio.to_radio().difs;
    let sole = scenario::run(&cfg, Strategy::Vts, 1).unwrap();
    let want = difs + a100;
    let pass = a800 == SimTime::from_micros(6400)
        && a100 == SimTime::from_micros(800)
        && sole.metrics.delays == vec![want]
        && sole.metrics.ard == Some(want.as_secs_f64());
    verdict(pass, format!("airtime 800 B = {a800}, 100 B = {a100}; sole-reporter ARD = {:?} s", sole.metrics.ard))
}

fn determinism() -> Verdict {
    let render = || -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        for name in ["reporters.toml", "cs_range.toml"] {
            let mut cfg = load(name);
            cfg.seeds.count = 5;
            let exp = run_experiment(&cfg, true).unwrap();
            for format in [LogFormat::Csv, LogFormat::Jsonl] {
                let mut buf = Vec::new();
                eventlog::write_rows(&mut buf, format, &exp.summary).unwrap();
                eventlog::write_rows(&mut buf, format, &exp.runs).unwrap();
                eventlog::write_rows(&mut buf, format, &exp.log).unwrap();
                out.push(buf);
            }
        }
        out
    };
    let (a, b) = (render(), render());
    let bytes: usize = a.iter().map(Vec::len).sum();
    verdict(a == b, format!("two renders of summaries, run tables and event logs ({bytes} bytes) identical: {}", a == b))
}

fn registry_consistency() -> Verdict {
    let tiling = build_tiling(1000.0, 100.0, TilingMode::Disc).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let hello = SimTime::from_millis(100);
    let end = SimTime::from_secs(60);
    let mut traces = Vec::new();
    let mut table = BTreeMap::new();
    for i in 1..=50u32 {
        let origin = Point3::new(rng.gen_range(-1000.0..1000.0), rng.gen_range(-3.5..3.5), 0.0);
        let dir = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let velocity = Point3::new(dir * rng.gen_range(10.0..30.0), 0.0, 0.0);
        traces.push((VehicleId(i), MobilityTrace::linear(origin, velocity, SimTime::ZERO, end).unwrap()));
        table.insert(VehicleId(i), Credibility::new(rng.gen_range(0.0..=1.0)).unwrap());
    }
    let mut oracle = StaticTable::new(table);
    let mut reg = Registry::new();
    let mut rankings = Rankings::new();
    let mut heard: BTreeMap<VehicleId, SimTime> = BTreeMap::new();
    let (mut mismatched_seconds, mut expiry_errors, mut expired) = (0, 0, 0);
    for k in 0..=600u64 {
        let t = hello.mul(k);
        let mut deltas = Vec::new();
        for (id, trace) in &traces {
            if rng.gen_bool(0.15) {
                continue;
            }
            let msg = HelloMessage {
                vehicle_id: *id,
                position: trace.position_at(t).unwrap(),
                speed: trace.speed_at(t).unwrap(),
                timestamp: t,
            };
            deltas.push(reg.apply(&msg, &tiling));
            heard.insert(*id, t);
        }
        let gone = reg.expire_stale(t, hello, 3).unwrap();
        expired += gone.len();
        deltas.extend(gone);
        rankings.sync(&deltas, &mut oracle, &mut reg, t);
        for (id, &last) in &heard {
            if reg.get(*id).is_some() != (t - last <= hello.mul(3)) {
                expiry_errors += 1;
            }
        }
        if t.is_multiple_of(SimTime::from_secs(1)) {
            let mut want: BTreeMap<ZoneId, Vec<(VehicleId, f64)>> = BTreeMap::new();
            for rec in reg.iter() {
                if let (Some(z), Some(c)) = (rec.zone, rec.credibility) {
                    want.entry(z).or_default().push((rec.vehicle_id, c.value()));
                }
            }
            for l in want.values_mut() {
                l.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            }
            let got: BTreeMap<ZoneId, Vec<(VehicleId, f64)>> = rankings
                .lists()
                .map(|l| (l.zone(), l.entries().iter().map(|e| (e.vehicle, e.credibility.value())).collect()))
                .collect();
            if got != want {
                mismatched_seconds += 1;
            }
        }
    }
    verdict(
        mismatched_seconds == 0 && expiry_errors == 0 && expired > 0,
        format!("61 checkpoints, {mismatched_seconds} ranking mismatches; {expired} expiries, {expiry_errors} liveness errors"),
    )
}

/// Criteria that the specified weight cannot satisfy. They still print FAIL.
const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(
    4,
    "with l reporters a candidate blocked by only some of them loses just (1-a)/l per blocked reporter, \
     so at a = 0.5 and l >= 2 a credible, partly blocked candidate outweighs a clear one of low credibility; \
     the guarantee holds for candidates blocked by every reporter (count above)",
)];

fn main() -> ExitCode {
    let mut results: Vec<(u8, &str, Verdict, Duration)> = Vec::new();
    let mut timed = |id: u8, name: &'static str, f: &dyn Fn() -> Verdict| {
        let t0 = Instant::now();
        let v = f();
        results.push((id, name, v, t0.elapsed()));
    };

    timed(1, "geometry suite", &|| {
        let t0 = Instant::now();
        let mut v = geometry_suite();
        let s = t0.elapsed().as_secs_f64();
        v.pass &= s < 30.0;
        v.detail = format!("{}; {s:.1}s", v.detail);
        v
    });
    timed(2, "side-length exactness", &side_length);
    timed(3, "selection oracle equivalence", &|| {
        let t0 = Instant::now();
        let mut v = selection_oracle();
        let s = t0.elapsed().as_secs_f64();
        v.pass &= s < 10.0;
        v.detail = format!("{}; {s:.2}s", v.detail);
        v
    });
    timed(4, "non-interference preference", &non_interference_preference);

    let sweep_cfg = load("reporters.toml");
    let t0 = Instant::now();
    let sweep_exp = run_experiment(&sweep_cfg, false).unwrap();
    let sweep_time = t0.elapsed();
    timed(5, "loss vs reporters", &|| loss_vs_reporters(&sweep_exp, &sweep_cfg, sweep_time));
    timed(6, "loss vs carrier-sense range", &loss_vs_cs_range);
    timed(7, "delay vs reporters", &|| delay_vs_reporters(&sweep_exp));
    timed(8, "delay vs report size", &delay_vs_size);
    timed(9, "exact airtime", &exact_airtime);
    timed(10, "determinism", &determinism);
    timed(11, "registry/ranking consistency", &registry_consistency);

    let mut failed = 0;
    let mut unexpected = 0;
    for (id, name, v, took) in &results {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name}: {} [{:.2}s]", v.detail, took.as_secs_f64());
        if !v.pass {
            failed += 1;
            match KNOWN_UNATTAINABLE.iter().find(|(k, _)| k == id) {
                Some((_, why)) => println!("             known unattainable: {why}"),
                None => unexpected += 1,
            }
        }
    }
    println!("{} of {} criteria passed, {unexpected} unexpected failures", results.len() - failed, results.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
