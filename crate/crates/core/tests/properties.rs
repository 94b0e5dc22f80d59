mod common;

use bidding_core::bidding::{bidding_winner, resolve_bidding};
use bidding_core::fixpoint::{sigma_vi, solve_energy};
use bidding_core::format::{parse_game, serialize_game};
use bidding_core::games::{random_arena, RandomParams};
use bidding_core::horizon::mu_n_tables;
use bidding_core::oracle::{dp_solve, oracle_threshold};
use bidding_core::sim::{run_play, PlayOptions};
use bidding_core::strategies::{sigma_agn, spare_changes, tau_agn_from, RandomStrategy};
use bidding_core::thresholds::{bid_plan, check_average, complement, optbid, relativebud, thresholds, ThresholdMap};
use bidding_core::turnbased::certify;
use bidding_core::{Action, Arena, Budget, Configuration, Player};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn arena(seed: u64) -> Arena {
    random_arena(&mut StdRng::seed_from_u64(seed), RandomParams::small(4, 3, 2))
}

fn tiny(seed: u64) -> Arena {
    random_arena(&mut StdRng::seed_from_u64(seed), RandomParams::small(3, 2, 2))
}

/// Every map on `a` with the average property.
fn average_maps(a: &Arena) -> Vec<ThresholdMap> {
    let n = a.num_vertices();
    let vals = a.top().ordinal() + 1;
    let mut out = Vec::new();
    for code in 0..vals.pow(n as u32) {
        let values = (0..n)
            .map(|i| Budget::from_ordinal(code / vals.pow(i as u32) % vals))
            .collect();
        let t = ThresholdMap::for_arena(a, values).unwrap();
        if check_average(a, &t).is_ok() {
            out.push(t);
        }
    }
    out
}

#[test]
fn ordinal_arithmetic_up_to_64() {
    for x in 0..=64 {
        for y in 0..=64 {
            let (bx, by) = (Budget::from_ordinal(x), Budget::from_ordinal(y));
            assert_eq!(bx.checked_add(by).unwrap().ordinal(), x + y);
            match bx.checked_sub(by) {
                Ok(d) => assert_eq!(d.ordinal(), x - y),
                Err(_) => assert!(y > x),
            }
        }
    }
}

#[test]
fn trump_is_least_winning_reply_for_small_k() {
    for k in 0..=4 {
        for p in Budget::total(k).legal_bids().chain([Budget::total(k)]) {
            let cons = p.complement(k);
            for b in p.legal_bids() {
                let least = (0..=cons.ordinal())
                    .map(Budget::from_ordinal)
                    .filter(|&c| cons.can_bid(c))
                    .find(|&c| bidding_winner(p, b, c) == Player::Cons);
                match least {
                    Some(c) => assert_eq!(c, p.trump(b)),
                    None => assert!(!cons.can_bid(p.trump(b))),
                }
            }
        }
    }
}

#[test]
fn budget_grammar() {
    for o in 0..20 {
        let x = Budget::from_ordinal(o);
        assert_eq!(x.to_string().parse::<Budget>().unwrap(), x);
    }
    for bad in ["", "*", "1**", "-1", "x", "1 *"] {
        assert!(bad.parse::<Budget>().is_err(), "{bad:?}");
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bidding_conserves_budget_and_advantage(
        seed in any::<u64>(), p in 0u64..20, bp in 0u64..20, bc in 0u64..20, tp in 0usize..4, tc in 0usize..4,
    ) {
        let a = arena(seed);
        let k = a.total_budget();
        let p = Budget::from_ordinal(p % (2 * k + 2));
        let c = p.complement(k);
        let pick = |own: Budget, i: u64| {
            let bids: Vec<Budget> = own.legal_bids().collect();
            bids[i as usize % bids.len()]
        };
        let (bp, bc) = (pick(p, bp), pick(c, bc));
        let v = seed as usize % a.num_vertices();
        let n = a.neighbors(v);
        let pa = Action::new(bp, n[tp % n.len()].target);
        let ca = Action::new(bc, n[tc % n.len()].target);
        let cfg = Configuration::new(v, p);
        let t = resolve_bidding(&a, &cfg, &pa, &ca).unwrap();
        let next = t.next.pres_budget;
        prop_assert_eq!(next.ordinal() + next.complement(k).ordinal(), 2 * k + 1);
        prop_assert!(next.has_advantage() != next.complement(k).has_advantage());
        let mover = if t.winner == Player::Pres { pa } else { ca };
        prop_assert_eq!(t.next.vertex, mover.target);
        prop_assert_eq!(Some(t.weight), a.weight(v, mover.target));
    }

    #[test]
    fn horizon_tables_are_bounded_and_monotone_in_budget(seed in any::<u64>()) {
        let a = arena(seed);
        let w = a.max_weight();
        for (n, t) in mu_n_tables(&a, 6).iter().enumerate() {
            for v in 0..a.num_vertices() {
                let row = t.row(v);
                prop_assert!(row.iter().all(|e| e.value().unwrap() <= n as u64 * w));
                prop_assert!(row.windows(2).all(|x| x[0] >= x[1]));
            }
        }
    }

    #[test]
    fn fixpoint_bounds(seed in any::<u64>()) {
        let a = arena(seed);
        let fp = solve_energy(&a);
        let height = a.num_configurations() as u64 * (fp.trim_bound + 2);
        prop_assert!(fp.iterations <= height);
        for v in 0..a.num_vertices() {
            let row = fp.energy.row(v);
            prop_assert!(row.windows(2).all(|x| x[0] >= x[1]));
            prop_assert!(row.iter().all(|e| e.value().is_none_or(|x| x <= fp.trim_bound)));
        }
    }

    #[test]
    fn sigma_vi_keeps_the_energy_invariant(seed in any::<u64>(), start in any::<usize>()) {
        let a = arena(seed);
        let fp = solve_energy(&a);
        let cfgs: Vec<Configuration> = (0..a.num_vertices())
            .flat_map(|v| a.budgets().map(move |x| Configuration::new(v, x)))
            .filter(|c| fp.at(c).is_finite())
            .collect();
        prop_assume!(!cfgs.is_empty());
        let init = cfgs[start % cfgs.len()];
        let e0 = fp.at(&init).value().unwrap() as i64;
        let mut cons = RandomStrategy::new(Player::Cons, seed);
        let opts = PlayOptions::energy(&a).with_steps(200).without_cycles();
        let play = run_play(&a, init, e0, &mut sigma_vi(&a, &fp), &mut cons, opts).unwrap();
        let mut e = e0;
        for s in &play.trace.steps {
            prop_assert!(e >= fp.at(&s.cfg).value().unwrap() as i64);
            e += s.weight;
        }
        prop_assert_eq!(e, play.trace.final_energy());
    }

    #[test]
    fn agnostic_spare_change_grows(seed in any::<u64>(), start in any::<usize>()) {
        let a = arena(seed);
        let fp = solve_energy(&a);
        let th = thresholds(&a, &fp);
        let k = a.total_budget();
        let cfgs: Vec<Configuration> = (0..a.num_vertices())
            .filter(|&v| !th.is_top(v))
            .flat_map(|v| {
                let lo = th.get(v);
                a.budgets().filter(move |&x| x >= lo).map(move |x| Configuration::new(v, x))
            })
            .collect();
        prop_assume!(!cfgs.is_empty());
        let init = cfgs[start % cfgs.len()];
        let mut cons = RandomStrategy::new(Player::Cons, seed ^ 1);
        let opts = PlayOptions::energy(&a).with_steps(300).without_cycles();
        let play = run_play(&a, init, i64::MAX / 4, &mut sigma_agn(&a, &fp, &th), &mut cons, opts).unwrap();
        let cfgs = play.trace.configurations();
        let spare = spare_changes(&a, &th, Player::Pres, cfgs.iter().copied()).unwrap();
        prop_assert!(spare.windows(2).all(|x| x[0] <= x[1]));
        prop_assert!(spare.iter().all(|&s| s <= k));
        // Equal spare change: the relative thresholds absorb the edge weight.
        for (i, s) in play.trace.steps.iter().enumerate() {
            if spare[i] != spare[i + 1] {
                continue;
            }
            let (c0, c1) = (cfgs[i], cfgs[i + 1]);
            let r0 = relativebud(&th, c0.vertex, c0.pres_budget).unwrap();
            let r1 = relativebud(&th, c1.vertex, c1.pres_budget).unwrap();
            let e0 = fp.get(c0.vertex, r0).value().unwrap() as i64;
            let e1 = fp.get(c1.vertex, r1).value().unwrap() as i64;
            prop_assert!(e0 + s.weight >= e1, "step {i}: {e0} + {} < {e1}", s.weight);
        }
    }

    #[test]
    fn tau_agn_cons_spare_change_grows(seed in any::<u64>(), start in any::<usize>()) {
        let a = arena(seed);
        let fp = solve_energy(&a);
        let tc = complement(&thresholds(&a, &fp));
        let k = a.total_budget();
        let cfgs: Vec<Configuration> = (0..a.num_vertices())
            .filter(|&v| !tc.is_top(v))
            .flat_map(|v| {
                let lo = tc.get(v);
                a.budgets()
                    .filter(move |&y| y >= lo)
                    .map(move |y| Configuration::new(v, y.complement(k)))
            })
            .collect();
        prop_assume!(!cfgs.is_empty());
        let init = cfgs[start % cfgs.len()];
        let mut pres = RandomStrategy::new(Player::Pres, seed ^ 2);
        let mut tau = tau_agn_from(&a, &fp);
        let opts = PlayOptions::energy(&a).with_steps(300).without_cycles();
        let play = run_play(&a, init, 2, &mut pres, &mut tau, opts).unwrap();
        let spare = spare_changes(&a, &tc, Player::Cons, play.trace.configurations()).unwrap();
        prop_assert!(spare.windows(2).all(|x| x[0] <= x[1]));
    }

    #[test]
    fn certify_accepts_computed_thresholds(seed in any::<u64>()) {
        let a = arena(seed);
        let th = thresholds(&a, &solve_energy(&a));
        prop_assert!(check_average(&a, &th).is_ok());
        prop_assert!(check_average(&a, &complement(&th)).is_ok());
        prop_assert!(certify(&a, &th).is_accept());
    }

    #[test]
    fn oracle_agrees_with_fixpoint(seed in any::<u64>()) {
        let a = arena(seed);
        prop_assert_eq!(oracle_threshold(&a, 1 << 14).unwrap(), thresholds(&a, &solve_energy(&a)));
    }

    #[test]
    fn dp_frontier_is_upward_closed(seed in any::<u64>()) {
        let a = arena(seed);
        let dp = dp_solve(&a, 4).unwrap();
        for m in 0..=4 {
            let top = dp.max_energy(m);
            for v in 0..a.num_vertices() {
                for x in a.budgets() {
                    let wins: Vec<bool> = (0..=top).map(|e| dp.winner(v, e, m, x) == Player::Pres).collect();
                    prop_assert!(wins.windows(2).all(|w| !w[0] || w[1]));
                    let first = wins.iter().position(|&w| w).unwrap() as u64;
                    prop_assert_eq!(first, dp.min_winning_energy(v, m, x));
                }
            }
        }
    }

    #[test]
    fn game_documents_round_trip(seed in any::<u64>()) {
        let a = arena(seed);
        let text = serialize_game(&a);
        let b = parse_game(&text).unwrap();
        prop_assert_eq!(serialize_game(&b), text);
        prop_assert_eq!(b, a);
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn average_maps_satisfy_the_bid_algebra(seed in any::<u64>()) {
        let a = tiny(seed);
        let k = a.total_budget();
        for t in average_maps(&a) {
            for v in 0..a.num_vertices() {
                if t.is_top(v) {
                    continue;
                }
                let plan = bid_plan(&a, &t, v).unwrap();
                let here = t.get(v).ordinal();
                let succ_bid = plan.base_bid.map_or(0, |b| b.ordinal() + 1);
                if let Some(bid) = plan.base_bid {
                    prop_assert!(here >= bid.ordinal() && here - bid.ordinal() >= t.get(plan.minus).ordinal());
                }
                prop_assert!(here + succ_bid >= t.get(plan.plus).ordinal());

                // Budget invariant of the prescribed partial strategy.
                for x in a.budgets().filter(|&x| x >= t.get(v)) {
                    let bid = optbid(&a, &t, v, x).unwrap();
                    let cons = x.complement(k);
                    for c in cons.legal_bids() {
                        if bidding_winner(x, bid, c) == Player::Pres {
                            let after = x.checked_sub(bid).unwrap();
                            for &u in &plan.allowed {
                                prop_assert!(after >= t.get(u), "v={v} B={x} bid={bid} u={u}");
                            }
                        } else {
                            let after = x.checked_add(c).unwrap();
                            for e in a.neighbors(v) {
                                prop_assert!(after >= t.get(e.target), "v={v} B={x} c={c}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn only_the_thresholds_certify(seed in any::<u64>()) {
        let a = tiny(seed);
        let th = thresholds(&a, &solve_energy(&a));
        for t in average_maps(&a) {
            prop_assert_eq!(certify(&a, &t).is_accept(), t == th);
        }
    }
}
