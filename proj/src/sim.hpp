#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "params.hpp"
#include "policy.hpp"

namespace tiermon {

// PRNG contract: std::mt19937_64, one draw per time step, uniforms built as
// (x >> 11) * 2^-53; recorded in output metadata
inline constexpr const char* generator_id = "mt19937_64:u53";

struct trajectory_step {
    state s;
    action a = tier::ordinary;
    double step_cost = 0.0;
};

struct trajectory {
    std::uint64_t seed = 0;
    std::vector<trajectory_step> steps;
    bool absorbed = false;
    long T = 0;  // absorption time; valid iff absorbed
    double discounted_cost = 0.0;
};

struct estimate_result {
    double mean = 0.0;
    double se = 0.0;  // sample standard deviation / sqrt(n)
    long n = 0;       // samples contributing to the mean
    std::uint64_t seed = 0;
    long truncated = 0;  // trajectories that hit max_steps before absorbing
};

trajectory simulate(const model_params& p, const policy& pi, state s0, std::uint64_t seed,
                    long max_steps);

// n independent trajectories with per-trajectory seeds seed+0, seed+1, ...; the horizon is
// chosen so the truncated discounted tail is below 1e-9 of scale. threads=0: hardware pick;
// results are identical for every thread count.
estimate_result estimate_value(const model_params& p, const policy& pi, state s0, long n,
                               std::uint64_t seed, unsigned threads = 0);

// sample mean of gamma^T under the always-ordinary policy, absorbed trajectories only;
// max_steps == 0 picks the default horizon (100000); truncated > 0 flags the ones that
// never absorbed
estimate_result estimate_hitting_mgf(const model_params& p, int h0, long n, std::uint64_t seed,
                                     long max_steps = 0, unsigned threads = 0);

std::string trajectory_to_csv(const trajectory& t);
std::string estimate_to_json(const estimate_result& e);

} // namespace tiermon
