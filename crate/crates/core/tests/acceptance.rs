//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stackelberg_dsg::cli::{
    cmd_simulate, simulate, sweep, BenchmarkSelection, DeltaCoupling, ExperimentConfig, InstanceSource, RunOptions,
    SweepOutput, SweepSpec,
};
use stackelberg_dsg::engine::{
    run_with_policies, ActionDist, LeaderHistoryEntry, LeaderPolicy, RunTrace,
};
use stackelberg_dsg::follower::follower_act;
use stackelberg_dsg::leader::LipschitzUcb;
use stackelberg_dsg::prelude::*;

/// Instantaneous constant for AAE, frozen from a 50-trial pre-run on seeds 1000..
const KAPPA_AAE: f64 = 28.0;
/// Anytime constant for per-arm UCB, frozen from the same pre-run.
const KAPPA_UCB: f64 = 3.1;
/// `kappa' sqrt(|B|)` with kappa' = 1.9 measured for UCB on each row of the
/// inverted-preference instance over the criterion 6 horizons.
const LIPSCHITZ_C: f64 = 2.7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn family(name: &str, params: FamilyParams) -> Instance {
    make_canonical_instance(name, &params).unwrap()
}

fn config(
    source: InstanceSource,
    leader: LeaderSpec,
    follower: BaseSpec,
    info: InfoStructure,
    trials: u64,
    horizons: Vec<u64>,
    params: BenchmarkParams,
    coupling: Option<DeltaCoupling>,
) -> ExperimentConfig {
    ExperimentConfig {
        instance: source,
        leader,
        follower: FollowerSpec::per_arm(follower),
        game: GameConfig::new(horizons[0], info, 0, trials),
        benchmarks: BenchmarkSelection {
            kinds: BenchmarkKind::ALL.to_vec(),
            params,
        },
        sweep: Some(SweepSpec {
            horizons,
            delta: coupling,
        }),
        out: None,
        sampled_rewards: false,
        traces: false,
    }
}

fn pow2(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|k| 1u64 << k).collect()
}

fn slope(out: &SweepOutput, player: &str, kind: BenchmarkKind) -> Option<f64> {
    out.fit(player, kind).map(|f| f.slope)
}

fn means(out: &SweepOutput, player: &str, kind: BenchmarkKind) -> String {
    out.points
        .iter()
        .filter(|p| p.player == player && p.benchmark == kind)
        .map(|p| format!("{:.0}", p.mean_regret))
        .collect::<Vec<_>>()
        .join(", ")
}

fn close(x: f64, want: f64) -> bool {
    (x - want).abs() <= 1e-12
}

fn benchmark_examples() -> Outcome {
    let t2 = family("table2", FamilyParams::with_delta(0.05));
    let p = BenchmarkParams::gamma(0.3);
    let g = benchmark_gamma_tolerant(&t2, &p).unwrap();
    let s = benchmark_self_tolerant(&t2, &p).unwrap();
    let t8 = benchmark_gamma_tolerant(&family("table8", FamilyParams::default()), &BenchmarkParams::gamma(0.05)).unwrap();
    let one = BenchmarkParams::gamma(1.0);
    let i = benchmark_gamma_tolerant(&family("table4_I", FamilyParams::with_delta(0.01)), &one).unwrap();
    let it = benchmark_gamma_tolerant(&family("table4_Itilde", FamilyParams::with_delta(0.01)), &one).unwrap();
    let checks = [
        ("table2 gamma", (g.beta1, g.beta2), (0.55, 0.20)),
        ("table2 self", (s.beta1, s.beta2), (0.45, 0.15)),
        ("table8", (t8.beta1, t8.beta2), (0.5, 0.15)),
        ("table4 I", (i.beta1, i.beta2), (0.51, 0.01)),
        ("table4 Itilde", (it.beta1, it.beta2), (0.50, 0.03)),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, got, want)| !(close(got.0, want.0) && close(got.1, want.1)))
        .map(|(name, got, want)| format!("{name} got ({:.4}, {:.4}) want {want:?}", got.0, got.1))
        .collect();
    if bad.is_empty() {
        outcome(true, "all five worked examples match")
    } else {
        outcome(false, bad.join("; "))
    }
}

fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let (na, nb) = (rng.random_range(2..=5), rng.random_range(2..=5));
    let mut matrix = || -> Vec<Vec<f64>> {
        (0..na)
            .map(|_| (0..nb).map(|_| f64::from(rng.random_range(0u32..=100)) / 100.0).collect())
            .collect()
    };
    let v1 = matrix();
    let v2 = matrix();
    Instance::from_matrices(v1, v2).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let inst = random_instance(&mut rng);
        let gamma = [0.1, 0.3, 1.0][k % 3];
        for kind in BenchmarkKind::ALL {
            let p = match kind {
                BenchmarkKind::Generalized => BenchmarkParams::generalized(gamma, 1.5, 1.0),
                _ => BenchmarkParams::gamma(gamma),
            };
            let exact = benchmark(&inst, kind, &p).unwrap();
            let grid = grid_benchmark_oracle(&inst, kind, &p, 1e-4).unwrap();
            worst = worst.max((exact.beta1 - grid.beta1).abs()).max((exact.beta2 - grid.beta2).abs());
        }
    }
    outcome(worst <= 2e-4, format!("max |exact - grid| = {worst:.2e} over 200 instances x 4 variants"))
}

fn linear_regret() -> Outcome {
    let horizon = 20_000;
    let mut cfg = config(
        InstanceSource::family("table3", FamilyParams::with_delta(0.1)),
        LeaderSpec::Etc { e: Length::Fixed(100) },
        BaseSpec::Etc { e: Length::Fixed(200) },
        InfoStructure::StrongDsg,
        200,
        vec![horizon],
        BenchmarkParams::gamma(0.1),
        None,
    );
    cfg.benchmarks.kinds = vec![BenchmarkKind::GammaTolerant];
    let out = simulate(&cfg).unwrap();
    let r1 = out.mean_regret(Player::Leader, BenchmarkKind::GammaTolerant);
    let r2 = out.mean_regret(Player::Follower, BenchmarkKind::GammaTolerant);
    let floor = 0.01 * horizon as f64;
    outcome(
        r1.min(r2) >= floor,
        format!("mean R1 = {r1:.0}, mean R2 = {r2:.0}, floor = {floor:.0}"),
    )
}

fn sublinear_window() -> Outcome {
    let source = || InstanceSource::family("table2", FamilyParams::with_delta(0.1));
    let horizons = vec![1 << 12, 1 << 14, 1 << 16];
    let etc = sweep(&config(
        source(),
        LeaderSpec::EtcThrowOut {
            e: Length::rule(LengthRule::EtcLeader),
            e_prime: Length::rule(LengthRule::EtcThrowout),
        },
        BaseSpec::Etc {
            e: Length::rule(LengthRule::EtcFollower),
        },
        InfoStructure::StrongDsg,
        100,
        horizons.clone(),
        BenchmarkParams::gamma(0.3),
        None,
    ))
    .unwrap();
    let ucb = sweep(&config(
        source(),
        LeaderSpec::ExploreThenUcb {
            e: Length::rule(LengthRule::ExploreUcb),
        },
        BaseSpec::aae(1.0),
        InfoStructure::StrongDsg,
        100,
        horizons,
        BenchmarkParams::gamma(0.3),
        None,
    ))
    .unwrap();
    let kind = BenchmarkKind::GammaTolerant;
    let (a, b) = (slope(&etc, "max", kind), slope(&ucb, "max", kind));
    let inside = |s: Option<f64>| s.is_some_and(|s| (0.45..=0.80).contains(&s));
    outcome(
        inside(a) && inside(b),
        format!(
            "(a) etc_throwout + etc slope = {a:.3?} [{}]; (b) explore_then_ucb + aae slope = {b:.3?} [{}]",
            means(&etc, "max", kind),
            means(&ucb, "max", kind)
        ),
    )
}

fn barrier() -> Outcome {
    let out = sweep(&config(
        InstanceSource::family("dlower", FamilyParams::default()),
        LeaderSpec::ExploreThenUcb {
            e: Length::rule(LengthRule::ExploreUcb),
        },
        BaseSpec::aae(1.0),
        InfoStructure::StrongDsg,
        200,
        pow2(12, 17),
        BenchmarkParams::gamma(0.3),
        Some(DeltaCoupling {
            kappa: 0.3,
            power: 1.0 / 3.0,
        }),
    ))
    .unwrap();
    let s = slope(&out, "max", BenchmarkKind::GammaTolerant);
    outcome(
        s.is_some_and(|s| s >= 0.55),
        format!("max-player slope = {s:.3?} [{}]", means(&out, "max", BenchmarkKind::GammaTolerant)),
    )
}

/// Slope bound check where a player whose regret never turns positive passes.
fn bounded(out: &SweepOutput, player: &str, kind: BenchmarkKind, limit: f64) -> (bool, String) {
    let positive = out.points.iter().any(|p| p.player == player && p.benchmark == kind && p.mean_regret > 0.0);
    match slope(out, player, kind) {
        Some(s) => (s <= limit, format!("{player} slope = {s:.3} [{}]", means(out, player, kind))),
        None if !positive => (true, format!("{player} regret <= 0 at every T [{}]", means(out, player, kind))),
        None => (false, format!("{player} has too few positive points [{}]", means(out, player, kind))),
    }
}

fn lipschitz_sqrt() -> Outcome {
    let out = sweep(&config(
        InstanceSource::family(
            "misaligned_inverted",
            FamilyParams {
                x: Some(0.3),
                y: Some(0.15),
                ..FamilyParams::default()
            },
        ),
        LeaderSpec::LipschitzUcb { l: 2.0, c: LIPSCHITZ_C },
        BaseSpec::Ucb,
        InfoStructure::StrongDsg,
        100,
        pow2(12, 16),
        BenchmarkParams::gamma(0.3),
        None,
    ))
    .unwrap();
    let (p1, d1) = bounded(&out, "leader", BenchmarkKind::Orig, 0.65);
    let (p2, d2) = bounded(&out, "follower", BenchmarkKind::Orig, 0.65);
    outcome(p1 && p2, format!("C = {LIPSCHITZ_C}; {d1}; {d2}"))
}

fn phased_self_tolerant() -> Outcome {
    let out = sweep(&config(
        InstanceSource::family("table2", FamilyParams::with_delta(0.1)),
        LeaderSpec::PhasedUcb {
            schedule: Schedule::default(),
            auto_extend: false,
        },
        BaseSpec::aae(1.0),
        InfoStructure::WeakDsg,
        100,
        pow2(12, 16),
        BenchmarkParams::gamma(0.3),
        None,
    ))
    .unwrap();
    let (pass, detail) = bounded(&out, "max", BenchmarkKind::SelfTolerant, 0.65);
    outcome(pass, detail)
}

fn follower_guarantees() -> Outcome {
    let inst = Instance::from_matrices(vec![vec![0.5; 4]], vec![vec![0.8, 0.6, 0.5, 0.2]]).unwrap();
    let horizon = 100_000;
    let run = |base: BaseSpec| -> Vec<RunTrace> {
        let cfg = GameConfig::new(horizon, InfoStructure::StrongDsg, 0, 50);
        stackelberg_dsg::cli::run_trials(&inst, &LeaderSpec::Etc { e: Length::Fixed(1) }, &FollowerSpec::per_arm(base), &cfg)
            .unwrap()
    };
    let g = BoundSpec::sqrt_instantaneous(KAPPA_AAE);
    let h_aae = instantaneous_to_anytime(&g);
    let aae = run(BaseSpec::aae(1.0));
    let (mut inst_bad, mut implied) = (0u64, true);
    for tr in &aae {
        let v = instantaneous_violations(tr, &inst, &g);
        inst_bad += v.count;
        if v.count == 0 && anytime_violations(tr, &inst, &h_aae).count > 0 {
            implied = false;
        }
    }
    let inst_rate = inst_bad as f64 / (50 * horizon) as f64;

    let h = BoundSpec::sqrt_anytime(KAPPA_UCB);
    let any_bad: u64 = run(BaseSpec::Ucb).iter().map(|tr| anytime_violations(tr, &inst, &h).count).sum();
    let any_rate = any_bad as f64 / (50 * horizon) as f64;

    // Prefix-sum conversion checked pointwise against running sums.
    let exact = BoundSpec::PrefixSum { inner: Box::new(g.clone()) };
    let (mut sum, mut pointwise) = (0.0, true);
    for t in 1..=10_000u64 {
        sum += g.eval(t, horizon, 4);
        let e = exact.eval(t, horizon, 4);
        pointwise &= (e - sum).abs() <= 1e-9 * sum.max(1.0) && h_aae.eval(t, horizon, 4) >= sum - 1e-9;
    }
    outcome(
        inst_rate <= 0.01 && any_rate <= 0.01 && implied && pointwise,
        format!(
            "AAE instantaneous rate = {inst_rate:.4} (kappa {KAPPA_AAE}), UCB anytime rate = {any_rate:.4} (kappa' {KAPPA_UCB}), prefix sums exact = {pointwise}, clean g implies clean h = {implied}"
        ),
    )
}

/// Records every entry the leader is shown, as JSON.
struct Recorder {
    inner: Box<dyn LeaderPolicy>,
    seen: Vec<String>,
}

impl LeaderPolicy for Recorder {
    fn act(&mut self, t: u64, rng: &mut ChaCha8Rng) -> stackelberg_dsg::Result<ActionDist> {
        self.inner.act(t, rng)
    }

    fn observe(&mut self, e: &LeaderHistoryEntry) {
        self.seen.push(serde_json::to_string(e).unwrap());
        self.inner.observe(e);
    }
}

fn determinism_and_hygiene() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Identical seeds give byte-identical files.
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(
        InstanceSource::family("table2", FamilyParams::with_delta(0.1)),
        LeaderSpec::ExploreThenUcb { e: Length::Fixed(20) },
        BaseSpec::aae(1.0),
        InfoStructure::StrongDsg,
        4,
        vec![2000],
        BenchmarkParams::gamma(0.3),
        None,
    );
    cfg.traces = true;
    cfg.game.horizon = 2000;
    let path = dir.path().join("config.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let mut files = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let opts = RunOptions {
            seed: Some(99),
            out: Some(out.clone()),
            ..RunOptions::default()
        };
        cmd_simulate(&path, &opts).unwrap();
        files.push((fs::read(out.join("traces.csv")).unwrap(), fs::read(out.join("regret.csv")).unwrap()));
    }
    let same = files[0] == files[1];
    pass &= same;
    notes.push(format!("byte-identical reruns = {same}"));

    // The strong leader is never shown follower actions.
    let inst = family("table2", FamilyParams::with_delta(0.1));
    let mut leaks = Vec::new();
    for info in [InfoStructure::StrongDsg, InfoStructure::WeakDsg] {
        let game = GameConfig::new(500, info, 5, 1);
        let mut leader = Recorder {
            inner: LeaderSpec::ExploreThenUcb { e: Length::Fixed(10) }.build(&inst, 500, info).unwrap(),
            seen: Vec::new(),
        };
        let mut follower = FollowerSpec::per_arm(BaseSpec::Ucb).build(&inst, 500).unwrap();
        run_with_policies(&inst, &mut leader, follower.as_mut(), &game, 0).unwrap();
        leaks.push(leader.seen.iter().filter(|s| s.contains("\"b\"")).count());
    }
    let clean = leaks[0] == 0 && leaks[1] == 500;
    pass &= clean;
    notes.push(format!("follower actions shown to strong/weak leader = {}/{}", leaks[0], leaks[1]));

    // Invariant suites on random inputs.
    let mut runner = TestRunner::new(Config {
        cases: 128,
        failure_persistence: None,
        ..Config::default()
    });
    let cell = || (0u32..=100).prop_map(|k| f64::from(k) / 100.0);
    let arb_instance = (1usize..=4, 1usize..=4)
        .prop_flat_map(move |(na, nb)| {
            (
                prop::collection::vec(prop::collection::vec(cell(), nb), na),
                prop::collection::vec(prop::collection::vec(cell(), nb), na),
            )
        })
        .prop_map(|(v1, v2)| Instance::from_matrices(v1, v2).unwrap());
    let suites: Vec<(&str, Result<(), String>)> = vec![
        (
            "monotone sets",
            runner
                .run(&(arb_instance.clone(), 0.0f64..1.0, 0.0f64..1.0), |(inst, e1, e2)| {
                    let (lo, hi) = (e1.min(e2), e1.max(e2));
                    for a in 0..inst.n_leader() {
                        let small = eps_best_response_set(&inst, a, lo).unwrap();
                        let big = eps_best_response_set(&inst, a, hi).unwrap();
                        prop_assert!(small.iter().all(|b| big.contains(b)));
                    }
                    let (small, big) = (eps_leader_set(&inst, lo), eps_leader_set(&inst, hi));
                    prop_assert!(small.iter().all(|a| big.contains(a)));
                    Ok(())
                })
                .map_err(|e| e.to_string()),
        ),
        (
            "benchmark ordering",
            runner
                .run(&(arb_instance.clone(), 0.01f64..1.0), |(inst, gamma)| {
                    let p = BenchmarkParams::gamma(gamma);
                    let st = stackelberg(&inst);
                    let g = benchmark_gamma_tolerant(&inst, &p).unwrap();
                    let s = benchmark_self_tolerant(&inst, &p).unwrap();
                    prop_assert!(s.beta1 <= g.beta1 + 1e-12 && g.beta1 <= st.beta1_orig + 1e-12);
                    prop_assert!(s.beta2 <= g.beta2 + 1e-12 && g.beta2 <= st.beta2_orig + 1e-12);
                    Ok(())
                })
                .map_err(|e| e.to_string()),
        ),
        (
            "schedule exactness",
            runner
                .run(&(100u64..10_000_000, 0.2f64..3.0), |(horizon, factor)| {
                    let m = Schedule::Geometric {
                        log_factor: factor,
                        base: 4.0,
                        phases: Some(6),
                    }
                    .resolve(horizon)
                    .unwrap();
                    for (i, &mi) in m.iter().enumerate() {
                        let want = (factor * (horizon as f64).ln() * 4f64.powi(i as i32 + 1)).ceil() as u64;
                        prop_assert_eq!(mi, want.max(1));
                    }
                    Ok(())
                })
                .map_err(|e| e.to_string()),
        ),
        (
            "UCB clamping",
            runner
                .run(
                    &(prop::collection::vec((0usize..3, -3.0f64..3.0), 0..200), 2u64..1_000_000),
                    |(rewards, horizon)| {
                        let mut p = LipschitzUcb::new(3, 2, horizon, 1.0, 0.1, None);
                        for &(a, r) in &rewards {
                            p.record(a, r);
                        }
                        prop_assert!(p.snapshot().ucb.iter().all(|&u| u <= 1.0));
                        Ok(())
                    },
                )
                .map_err(|e| e.to_string()),
        ),
        (
            "per-arm isolation",
            runner
                .run(
                    &(prop::collection::vec((0usize..2, 0usize..2, -2.0f64..2.0), 1..150), -9.0f64..9.0),
                    |(plays, junk)| {
                        let inst = family("table2", FamilyParams::with_delta(0.1));
                        let h: Vec<_> = plays
                            .iter()
                            .enumerate()
                            .map(|(t, &(a, b, r2))| stackelberg_dsg::engine::FollowerHistoryEntry { t: t as u64 + 1, a, b, r2 })
                            .collect();
                        let mut other = h.clone();
                        other.iter_mut().filter(|e| e.a == 1).for_each(|e| e.r2 = junk);
                        for base in [BaseSpec::Ucb, BaseSpec::aae(0.5)] {
                            prop_assert_eq!(
                                follower_act(&base, &inst, 1000, 0, &h).unwrap(),
                                follower_act(&base, &inst, 1000, 0, &other).unwrap()
                            );
                        }
                        Ok(())
                    },
                )
                .map_err(|e| e.to_string()),
        ),
    ];
    for (name, r) in suites {
        if let Err(e) = r {
            pass = false;
            notes.push(format!("{name} failed: {e}"));
        }
    }
    if pass {
        notes.push("invariant suites pass".into());
    }
    outcome(pass, notes.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("benchmark worked examples", benchmark_examples),
        ("oracle equivalence", oracle_equivalence),
        ("linear regret of naive ETC", linear_regret),
        ("sublinear rate window", sublinear_window),
        ("two-thirds barrier", barrier),
        ("sqrt(T) under continuity", lipschitz_sqrt),
        ("sqrt(T) against self-tolerant", phased_self_tolerant),
        ("follower guarantees", follower_guarantees),
        ("determinism and hygiene", determinism_and_hygiene),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {} {:<30} {} ({:.1}s): {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
