mod common;

use common::small_model;
use hscore::auction::*;
use hscore::engine::*;
use hscore::optimizer::StrategyParams;
use hscore::roster::FlexShares;
use hscore::{Category, Format};

fn strategy(model: &Model) -> StrategyParams {
    let mut j = model.v.clone();
    j[1] += 0.02;
    j[6] -= 0.01;
    StrategyParams::new(&j / j.sum(), FlexShares { util: [0.3, 0.2, 0.2, 0.2, 0.1], guard: [0.6, 0.4], forward: [0.5, 0.5] })
}

fn buy_in_g_order(model: &Model, auction: &mut AuctionState, team: usize, count: usize, price: f64) {
    for _ in 0..count {
        let p = g_score_pick(model, &auction.draft, team).unwrap();
        auction.buy(model, team, p, price).unwrap();
    }
}

#[test]
fn replacement_value_is_spread_by_a_seventh() {
    let model = small_model(3, Format::EachCategory, 21);
    let v_raw = model.aggregates.v_raw();
    let g = 2.8;
    let r = spread_value(&model, g).unwrap();
    for (k, c) in model.aggregates.categories.iter().enumerate() {
        let sign = if *c == Category::Turnovers { -1.0 } else { 1.0 };
        assert!((r[k] - sign * g / 7.0 / v_raw[k]).abs() < 1e-12);
        if *c == Category::Turnovers {
            assert!(r[k] < 0.0);
        } else {
            assert!(r[k] > 0.0);
        }
    }
    assert!(spread_value(&model, 0.0).unwrap().iter().all(|&x| x == 0.0));
}

#[test]
fn dollar_benefit_is_a_quotient_of_surplus_and_money() {
    let model = small_model(2, Format::EachCategory, 22);
    let mut auction = AuctionState::new(&model, 200.0).unwrap();
    buy_in_g_order(&model, &mut auction, 0, 12, 10.0);
    buy_in_g_order(&model, &mut auction, 1, 12, 10.0);
    assert_eq!(auction.open_slots(), 2);
    let left: Vec<usize> = auction.draft.undrafted(&model).collect();
    let repl = model.g_totals[left[2]];
    let surplus = (model.g_totals[left[0]] - repl) + (model.g_totals[left[1]] - repl);
    let money = auction.total_money();
    assert_eq!(money, 160.0);
    let d = dollar_benefit(&model, &auction.draft, money).unwrap();
    let v_raw = model.aggregates.v_raw();
    for (k, c) in model.aggregates.categories.iter().enumerate() {
        let sign = if *c == Category::Turnovers { -1.0 } else { 1.0 };
        assert!((d[k] - sign * surplus / money / 7.0 / v_raw[k]).abs() < 1e-12);
    }
    let doubled = dollar_benefit(&model, &auction.draft, 2.0 * money).unwrap();
    assert!((doubled * 2.0 - d).amax() < 1e-12);
}

#[test]
fn no_open_slots_means_no_dollar_value() {
    let model = small_model(2, Format::EachCategory, 23);
    let mut auction = AuctionState::new(&model, 200.0).unwrap();
    buy_in_g_order(&model, &mut auction, 0, 13, 1.0);
    buy_in_g_order(&model, &mut auction, 1, 13, 1.0);
    let d = dollar_benefit(&model, &auction.draft, auction.total_money()).unwrap();
    assert!(d.iter().all(|&x| x == 0.0));
}

#[test]
fn even_auction_reduces_to_the_draft_differential() {
    let model = small_model(3, Format::MostCategories, 24);
    let mut auction = AuctionState::new(&model, 100.0).unwrap();
    // K = 3 for team 0, K + 1 = 4 for each opponent, equal money left
    buy_in_g_order(&model, &mut auction, 0, 3, 20.0);
    buy_in_g_order(&model, &mut auction, 1, 4, 15.0);
    buy_in_g_order(&model, &mut auction, 2, 4, 15.0);
    let terms = auction_terms(&model, &auction, 0).unwrap();
    assert!(terms.opponents.iter().all(|o| o.m == 0.0 && o.l == 0.0));

    let cand = g_score_pick(&model, &auction.draft, 0).unwrap();
    let params = strategy(&model);
    let ctx = TeamContext::new(&model, &auction.draft, 0).unwrap();
    for index in 0..2 {
        let a = auction_differential(&model, &auction, 0, cand, &params, index).unwrap();
        let d = matchup_distribution(&model, &ctx, cand, &params, index).unwrap();
        assert!((&a.mean - &d.mean).amax() < 1e-12);
        assert_eq!(a.variance, d.variance);
    }
}

#[test]
fn auction_mean_matches_term_by_term_sum() {
    let model = small_model(3, Format::MostCategories, 25);
    let mut auction = AuctionState::new(&model, 100.0).unwrap();
    buy_in_g_order(&model, &mut auction, 0, 4, 20.0);
    buy_in_g_order(&model, &mut auction, 1, 2, 10.0);
    buy_in_g_order(&model, &mut auction, 2, 5, 12.0);
    let cand = g_score_pick(&model, &auction.draft, 0).unwrap();
    let params = strategy(&model);

    let ctx = TeamContext::new(&model, &auction.draft, 0).unwrap();
    let parts = decompose(&model, &ctx, cand, &params).unwrap();
    let r = replacement_profile(&model, &auction.draft).unwrap();
    let d = dollar_benefit(&model, &auction.draft, auction.total_money()).unwrap();
    for (index, opp) in [1usize, 2].into_iter().enumerate() {
        let x_os = auction.draft.team_x_sum(&model, opp);
        // team holds 4 + candidate; replacement-slot surplus is theirs minus ours
        let m = auction.draft.rosters[opp].len() as f64 - 5.0;
        let l = auction.money[0] - auction.money[opp];
        let expected = &parts.x_s + &parts.x_p + &parts.x_delta + &parts.positional - x_os + &r * m + &d * l;
        let got = auction_differential(&model, &auction, 0, cand, &params, index).unwrap();
        assert!((&got.mean - &expected).amax() < 1e-12, "opponent {opp}");
    }
}

#[test]
fn extra_money_raises_every_counting_mean() {
    let model = small_model(2, Format::EachCategory, 26);
    let mut auction = AuctionState::new(&model, 100.0).unwrap();
    buy_in_g_order(&model, &mut auction, 0, 2, 10.0);
    buy_in_g_order(&model, &mut auction, 1, 3, 20.0);
    let cand = g_score_pick(&model, &auction.draft, 0).unwrap();
    let params = strategy(&model);
    let richer = auction_differential(&model, &auction, 0, cand, &params, 0).unwrap();
    let mut even = auction.clone();
    even.money[0] = even.money[1];
    let base = auction_differential(&model, &even, 0, cand, &params, 0).unwrap();
    for (k, c) in model.aggregates.categories.iter().enumerate() {
        if *c == Category::Turnovers {
            assert!(richer.mean[k] < base.mean[k]);
        } else {
            assert!(richer.mean[k] > base.mean[k], "{c:?}");
        }
    }
}

#[test]
fn cash_curve_is_monotone_and_anchored_at_replacement() {
    let model = small_model(3, Format::MostCategories, 27);
    let mut auction = AuctionState::new(&model, 200.0).unwrap();
    buy_in_g_order(&model, &mut auction, 0, 2, 50.0);
    buy_in_g_order(&model, &mut auction, 1, 2, 40.0);
    buy_in_g_order(&model, &mut auction, 2, 2, 30.0);
    let curve = cash_curve(&model, &auction, 0).unwrap();
    assert_eq!(curve.cash.len(), CASH_GRID_POINTS);
    assert_eq!(curve.cash[0], 0.0);
    assert!((curve.cash[CASH_GRID_POINTS - 1] - 2.0 * 140.0).abs() < 1e-12);
    for w in curve.value.windows(2) {
        assert!(w[1] >= w[0]);
    }
    let step = curve.cash[1] - curve.cash[0];

    let repl = replacement_player(&model, &auction.draft).unwrap();
    let r = cash_equivalent_on(&model, &auction, 0, repl, &curve).unwrap();
    assert!(r.dollars.abs() <= step, "{}", r.dollars);

    // dollars depend on the H-score alone
    let top = g_score_pick(&model, &auction.draft, 0).unwrap();
    let e = cash_equivalent_on(&model, &auction, 0, top, &curve).unwrap();
    assert_eq!(curve.invert(e.value), (e.dollars, e.saturated));
    assert!(e.dollars >= r.dollars);
}

#[test]
fn purchases_respect_budgets() {
    let model = small_model(2, Format::EachCategory, 28);
    let mut auction = AuctionState::new(&model, 10.0).unwrap();
    let p = model.g_order[0];
    assert!(auction.buy(&model, 0, p, 11.0).is_err());
    auction.buy(&model, 0, p, 10.0).unwrap();
    assert_eq!(auction.money, vec![0.0, 10.0]);
    assert!(auction.buy(&model, 1, p, 1.0).is_err());
}
