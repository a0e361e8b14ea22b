#include "sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "error.hpp"
#include "parallel.hpp"
#include "util.hpp"

namespace tiermon {

namespace {

double next_uniform(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double step_cost_of(const model_params& p, tier m, action a) {
    if (m == tier::ordinary)
        return a == tier::ordinary ? p.C_o : p.C_oi + p.C_i;
    return a == tier::intensive ? p.C_i : p.C_io + p.C_o;
}

void require_sim_inputs(const model_params& p, const policy& pi, state s0) {
    require_valid(p);
    if (pi.H != p.H)
        throw error(error_code::invalid_argument,
                    strf("policy defined for H=%d but model has H=%d", pi.H, p.H));
    if (s0.h < 0 || s0.h > p.H)
        throw error(error_code::invalid_argument,
                    strf("start health %d outside [0,%d]", s0.h, p.H));
}

// horizon with discounted tail below 1e-9 of scale
long default_horizon(double gamma_v) {
    return static_cast<long>(std::ceil(std::log(1e-9) / std::log(gamma_v)));
}

} // namespace

trajectory simulate(const model_params& p, const policy& pi, state s0, std::uint64_t seed,
                    long max_steps) {
    require_sim_inputs(p, pi, s0);
    if (max_steps < 0)
        throw error(error_code::invalid_argument, strf("max_steps must be >= 0 (got %ld)",
                                                       max_steps));
    trajectory t;
    t.seed = seed;
    if (s0.h == 0) {
        t.absorbed = true;
        t.T = 0;
        t.discounted_cost = p.C_c;
        return t;
    }
    std::mt19937_64 gen(seed);
    state s = s0;
    double disc = 1.0;
    for (long k = 0; k < max_steps; ++k) {
        action a = pi.at(s.m, s.h);
        double c = step_cost_of(p, s.m, a);
        t.steps.push_back({s, a, c});
        t.discounted_cost += disc * c;
        disc *= p.gamma;
        double lam = p.lambda(a);
        int h_next = next_uniform(gen) < lam ? std::min(s.h + 1, p.H) : s.h - 1;
        s = state{a, h_next};
        if (h_next == 0) {
            t.absorbed = true;
            t.T = k + 1;
            t.discounted_cost += disc * p.C_c;
            return t;
        }
    }
    t.absorbed = false;
    t.T = static_cast<long>(t.steps.size());
    return t;
}

namespace {

// deterministic two-pass mean/sd in index order, independent of how samples were produced
estimate_result reduce(const std::vector<double>& xs, std::uint64_t seed, long truncated) {
    estimate_result e;
    e.seed = seed;
    e.truncated = truncated;
    e.n = static_cast<long>(xs.size());
    if (e.n == 0)
        return e;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    e.mean = sum / static_cast<double>(e.n);
    if (e.n >= 2) {
        double ss = 0.0;
        for (double x : xs) {
            double d = x - e.mean;
            ss += d * d;
        }
        e.se = std::sqrt(ss / static_cast<double>(e.n - 1)) /
               std::sqrt(static_cast<double>(e.n));
    }
    return e;
}

} // namespace

estimate_result estimate_value(const model_params& p, const policy& pi, state s0, long n,
                               std::uint64_t seed, unsigned threads) {
    require_sim_inputs(p, pi, s0);
    if (n < 2)
        throw error(error_code::invalid_argument, strf("n must be >= 2 (got %ld)", n));
    long horizon = default_horizon(p.gamma);
    std::vector<double> xs(static_cast<size_t>(n), 0.0);
    parallel_for(static_cast<size_t>(n), [&](size_t i) {
        trajectory t = simulate(p, pi, s0, seed + static_cast<std::uint64_t>(i), horizon);
        xs[i] = t.discounted_cost;
    }, threads);
    return reduce(xs, seed, 0);
}

estimate_result estimate_hitting_mgf(const model_params& p, int h0, long n, std::uint64_t seed,
                                     long max_steps, unsigned threads) {
    require_valid(p);
    if (!p.simplified())
        throw error(error_code::domain,
                    "hitting-time MGF estimation requires the simplified preset");
    if (!(p.lambda_o < 0.5))
        throw error(error_code::domain,
                    strf("Assumption 2(b): lambda_o < 0.5 required (got %g)", p.lambda_o));
    if (h0 < 1 || h0 > p.H)
        throw error(error_code::invalid_argument, strf("h0 must lie in [1,%d] (got %d)", p.H, h0));
    if (n < 2)
        throw error(error_code::invalid_argument, strf("n must be >= 2 (got %ld)", n));
    // keep the top reflection out of reach so the infinite-chain identity applies
    long need = h0 + 50 * static_cast<long>(std::ceil(1.0 / (p.mu_o() - p.lambda_o)));
    if (p.H < need)
        throw error(error_code::invalid_argument,
                    strf("H=%d too small for a reflection-free estimate from h0=%d "
                         "(need H >= %ld)", p.H, h0, need));
    if (max_steps < 0)
        throw error(error_code::invalid_argument, strf("max_steps must be >= 0 (got %ld)",
                                                       max_steps));
    if (max_steps == 0)
        max_steps = 100000;

    std::vector<double> sample(static_cast<size_t>(n), -1.0);  // -1 marks truncation
    parallel_for(static_cast<size_t>(n), [&](size_t i) {
        std::mt19937_64 gen(seed + static_cast<std::uint64_t>(i));
        int h = h0;
        double disc = 1.0;
        for (long k = 0; k < max_steps; ++k) {
            disc *= p.gamma;
            h = next_uniform(gen) < p.lambda_o ? std::min(h + 1, p.H) : h - 1;
            if (h == 0) {
                sample[i] = disc;
                return;
            }
        }
    }, threads);

    std::vector<double> absorbed;
    absorbed.reserve(sample.size());
    long truncated = 0;
    for (double x : sample) {
        if (x < 0.0)
            ++truncated;
        else
            absorbed.push_back(x);
    }
    return reduce(absorbed, seed, truncated);
}

std::string trajectory_to_csv(const trajectory& t) {
    std::string out = "step,tier,h,action,cost\n";
    long k = 0;
    for (const auto& st : t.steps) {
        out += strf("%ld,%s,%d,%s,%s\n", k++, tier_name(st.s.m), st.s.h, tier_name(st.a),
                    num10(st.step_cost).c_str());
    }
    return out;
}

std::string estimate_to_json(const estimate_result& e) {
    nlohmann::ordered_json j;
    j["mean"] = e.mean;
    j["stderr"] = e.se;
    j["n"] = e.n;
    j["seed"] = e.seed;
    j["generator_id"] = generator_id;
    j["truncated"] = e.truncated;
    return j.dump(2);
}

} // namespace tiermon
