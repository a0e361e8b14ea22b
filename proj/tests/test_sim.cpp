#include <doctest.h>

#include <cmath>
#include <set>
#include <string>

#include "error.hpp"
#include "params.hpp"
#include "policy.hpp"
#include "sim.hpp"
#include "solver.hpp"

using namespace tiermon;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

model_params ordinary_instance() { return simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 6); }

}  // namespace

TEST_CASE("identical inputs give bitwise-identical trajectories") {
    model_params p = ordinary_instance();
    policy pi = make_constant(p.H, tier::ordinary);
    trajectory a = simulate(p, pi, {tier::ordinary, 3}, 12345, 1000);
    trajectory b = simulate(p, pi, {tier::ordinary, 3}, 12345, 1000);
    CHECK(a.absorbed == b.absorbed);
    CHECK(a.T == b.T);
    CHECK(a.discounted_cost == b.discounted_cost);
    REQUIRE(a.steps.size() == b.steps.size());
    for (size_t k = 0; k < a.steps.size(); ++k) {
        CHECK(a.steps[k].s.h == b.steps[k].s.h);
        CHECK(a.steps[k].s.m == b.steps[k].s.m);
        CHECK(a.steps[k].a == b.steps[k].a);
        CHECK(a.steps[k].step_cost == b.steps[k].step_cost);
    }
    // the seed actually matters: a dozen of them cannot all walk the same path
    std::set<double> outcomes;
    for (std::uint64_t s = 1; s <= 12; ++s)
        outcomes.insert(simulate(p, pi, {tier::ordinary, 3}, s, 1000).discounted_cost);
    CHECK(outcomes.size() >= 2);
}

TEST_CASE("starting at the absorbing state charges the terminal cost immediately") {
    model_params p = ordinary_instance();
    policy pi = make_constant(p.H, tier::ordinary);
    trajectory t = simulate(p, pi, {tier::ordinary, 0}, 9, 100);
    CHECK(t.absorbed);
    CHECK(t.T == 0);
    CHECK(t.steps.empty());
    CHECK(t.discounted_cost == p.C_c);
}

TEST_CASE("deterministic worsening walks straight down") {
    model_params p = simplified_preset(0.0, 0.3, 1.0, 20.0, 0.9, 6);
    policy pi = make_constant(p.H, tier::ordinary);
    trajectory t = simulate(p, pi, {tier::ordinary, 2}, 77, 100);
    CHECK(t.absorbed);
    CHECK(t.T == 2);
    CHECK(t.discounted_cost == 0.9 * 0.9 * 20.0);
    REQUIRE(t.steps.size() == 2);
    CHECK(t.steps[0].s.h == 2);
    CHECK(t.steps[1].s.h == 1);
}

TEST_CASE("recorded steps stay on live states and absorption is consistent") {
    model_params p = ordinary_instance();
    p.C_o = 0.25;  // nonzero running cost to exercise accrual
    p.C_oi = 0.5;
    policy pi = make_two_threshold(p.H, 2, 4);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        trajectory t = simulate(p, pi, {tier::ordinary, 4}, seed, 500);
        for (const auto& st : t.steps) CHECK(st.s.h >= 1);
        if (t.absorbed) {
            CHECK(t.T == static_cast<long>(t.steps.size()));
            CHECK(t.steps.back().s.h == 1);  // the fatal transition left from h=1
        }
        CHECK(t.discounted_cost >= 0.0);
    }
}

TEST_CASE("truncation is reported, not hidden") {
    model_params p = ordinary_instance();
    policy pi = make_constant(p.H, tier::ordinary);
    trajectory t = simulate(p, pi, {tier::ordinary, 6}, 4, 1);
    CHECK_FALSE(t.absorbed);
    CHECK(t.steps.size() == 1);
    CHECK_THROWS_AS(simulate(p, pi, {tier::ordinary, 3}, 4, -1), error);
}

TEST_CASE("simulate validates its inputs") {
    model_params p = ordinary_instance();
    policy pi = make_constant(4, tier::ordinary);  // wrong H
    CHECK_THROWS_AS(simulate(p, pi, {tier::ordinary, 3}, 1, 10), error);
    policy ok = make_constant(p.H, tier::ordinary);
    CHECK_THROWS_AS(simulate(p, ok, {tier::ordinary, 7}, 1, 10), error);
    CHECK_THROWS_AS(simulate(p, ok, {tier::ordinary, -1}, 1, 10), error);
}

TEST_CASE("value estimate is exact when the walk is deterministic") {
    model_params p = simplified_preset(0.0, 0.3, 1.0, 20.0, 0.9, 6);
    policy pi = make_constant(p.H, tier::ordinary);
    estimate_result e = estimate_value(p, pi, {tier::ordinary, 1}, 500, 11);
    CHECK(near(e.mean, 0.9 * 20.0, 1e-12));
    CHECK(e.se <= 1e-12);
    CHECK(e.n == 500);
    CHECK(e.seed == 11);
}

TEST_CASE("monte carlo value agrees with policy evaluation") {
    model_params p = ordinary_instance();
    policy pi = make_constant(p.H, tier::ordinary);
    value_function v = policy_evaluation(p, pi);
    estimate_result e = estimate_value(p, pi, {tier::ordinary, 3}, 20000, 7);
    CHECK(e.se > 0.0);
    CHECK(near(e.mean, v.at(tier::ordinary, 3), 4.0 * e.se));
}

TEST_CASE("monte carlo value agrees with the solved optimum") {
    model_params p = simplified_preset(0.2, 0.3, 1.0, 60.0, 0.9, 6);
    solve_result r = value_iteration(p);
    estimate_result e = estimate_value(p, r.pi, {tier::ordinary, 2}, 20000, 99);
    CHECK(near(e.mean, r.values.at(tier::ordinary, 2), 4.0 * e.se));
}

TEST_CASE("estimates are identical for every thread count") {
    model_params p = ordinary_instance();
    policy pi = make_threshold(p.H, 2);
    estimate_result seq = estimate_value(p, pi, {tier::ordinary, 4}, 5000, 42, 1);
    estimate_result par = estimate_value(p, pi, {tier::ordinary, 4}, 5000, 42, 4);
    estimate_result odd = estimate_value(p, pi, {tier::ordinary, 4}, 5000, 42, 3);
    CHECK(seq.mean == par.mean);
    CHECK(seq.se == par.se);
    CHECK(seq.mean == odd.mean);
    CHECK(seq.se == odd.se);
}

TEST_CASE("estimate_value rejects degenerate sample sizes") {
    model_params p = ordinary_instance();
    policy pi = make_constant(p.H, tier::ordinary);
    CHECK_THROWS_AS(estimate_value(p, pi, {tier::ordinary, 3}, 1, 5), error);
}

TEST_CASE("hitting-time factor estimate brackets the closed form") {
    model_params p = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 101);
    estimate_result e = estimate_hitting_mgf(p, 1, 20000, 3);
    CHECK(e.truncated == 0);
    CHECK(e.n == 20000);
    CHECK(near(e.mean, 0.8500720474558364, 4.0 * e.se));
    CHECK(e.se < 0.01);
}

TEST_CASE("hitting-time factors multiply across levels") {
    model_params p = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 102);
    estimate_result e1 = estimate_hitting_mgf(p, 1, 20000, 5);
    estimate_result e2 = estimate_hitting_mgf(p, 2, 20000, 6);
    double combined = std::sqrt(e2.se * e2.se +
                                4.0 * e1.mean * e1.mean * e1.se * e1.se);
    CHECK(near(e2.mean, e1.mean * e1.mean, 4.0 * combined));
}

TEST_CASE("deterministic walk gives the factor exactly") {
    model_params p = simplified_preset(0.0, 0.3, 1.0, 20.0, 0.9, 51);
    estimate_result e = estimate_hitting_mgf(p, 1, 100, 8);
    CHECK(near(e.mean, 0.9, 1e-12));
    CHECK(e.se <= 1e-12);
}

TEST_CASE("truncated walks are excluded from the mean and counted") {
    model_params p = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 101);
    // one step only: walks absorb immediately (probability mu_o) or get truncated
    estimate_result e = estimate_hitting_mgf(p, 1, 2000, 21, 1);
    CHECK(e.truncated > 0);
    CHECK(e.n + e.truncated == 2000);
    CHECK(near(e.mean, 0.9, 1e-12));  // every absorbed sample is exactly gamma^1
}

TEST_CASE("hitting-time estimation rejects unusable setups") {
    model_params small = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 50);
    try {
        estimate_hitting_mgf(small, 1, 100, 1);  // needs H >= 101
        FAIL("expected an H-too-small error");
    } catch (const error& e) {
        CHECK(e.code() == error_code::invalid_argument);
        CHECK(std::string(e.what()).find("too small") != std::string::npos);
    }

    model_params drifty = ordinary_instance();
    drifty.lambda_o = 0.5;
    drifty.lambda_i = 0.5;
    drifty.H = 2000;
    CHECK_THROWS_AS(estimate_hitting_mgf(drifty, 1, 100, 1), error);

    model_params general = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 101);
    general.C_oi = 0.5;
    CHECK_THROWS_AS(estimate_hitting_mgf(general, 1, 100, 1), error);

    model_params p = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 101);
    CHECK_THROWS_AS(estimate_hitting_mgf(p, 0, 100, 1), error);
    CHECK_THROWS_AS(estimate_hitting_mgf(p, 102, 100, 1), error);
}

TEST_CASE("hitting-time estimates are thread-count independent") {
    model_params p = simplified_preset(0.2, 0.3, 1.0, 20.0, 0.9, 101);
    estimate_result a = estimate_hitting_mgf(p, 1, 4000, 13, 0, 1);
    estimate_result b = estimate_hitting_mgf(p, 1, 4000, 13, 0, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    CHECK(a.n == b.n);
}

TEST_CASE("trajectory CSV layout") {
    model_params p = simplified_preset(0.0, 0.3, 1.0, 20.0, 0.9, 6);
    policy pi = make_constant(p.H, tier::ordinary);
    trajectory t = simulate(p, pi, {tier::ordinary, 2}, 1, 100);
    CHECK(trajectory_to_csv(t) == "step,tier,h,action,cost\n0,o,2,o,0\n1,o,1,o,0\n");

    model_params q = simplified_preset(0.0, 0.0, 1.0, 20.0, 0.9, 6);
    q.C_o = 0.5;
    policy pit = make_threshold(q.H, 1);
    trajectory t2 = simulate(q, pit, {tier::ordinary, 2}, 1, 100);
    // h=2 picks ordinary (cost 0.5), h=1 switches to intensive (cost C_oi + C_i = 1)
    CHECK(trajectory_to_csv(t2) == "step,tier,h,action,cost\n0,o,2,o,0.5\n1,o,1,i,1\n");
}

TEST_CASE("estimate JSON carries the reproducibility metadata") {
    model_params p = simplified_preset(0.0, 0.3, 1.0, 20.0, 0.9, 6);
    policy pi = make_constant(p.H, tier::ordinary);
    estimate_result e = estimate_value(p, pi, {tier::ordinary, 1}, 10, 123);
    std::string j = estimate_to_json(e);
    CHECK(j.find("\"mean\"") != std::string::npos);
    CHECK(j.find("\"stderr\"") != std::string::npos);
    CHECK(j.find("\"n\": 10") != std::string::npos);
    CHECK(j.find("\"seed\": 123") != std::string::npos);
    CHECK(j.find("\"generator_id\": \"mt19937_64:u53\"") != std::string::npos);
    CHECK(j.find("\"truncated\": 0") != std::string::npos);
}
