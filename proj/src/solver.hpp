#pragma once

#include <string>
#include <vector>

#include "params.hpp"
#include "policy.hpp"

namespace tiermon {

// per-state values indexed by h = 0..H; h = 0 carries the terminal boundary C_c
struct value_function {
    int H = 0;
    std::vector<double> v_ordinary;
    std::vector<double> v_intensive;

    double at(tier m, int h) const {
        return m == tier::ordinary ? v_ordinary[static_cast<size_t>(h)]
                                   : v_intensive[static_cast<size_t>(h)];
    }
    void set(tier m, int h, double v) {
        (m == tier::ordinary ? v_ordinary : v_intensive)[static_cast<size_t>(h)] = v;
    }
};

struct q_table {
    int H = 0;
    std::vector<double> q;  // index ((h-1)*2 + m)*2 + a, h = 1..H

    double at(tier m, int h, action a) const {
        return q[(static_cast<size_t>(h - 1) * 2 + static_cast<size_t>(m)) * 2 +
                 static_cast<size_t>(a)];
    }
};

struct solve_result {
    value_function values;
    policy pi;
    long iterations = 0;
    double final_residual = 0.0;
    double epsilon = 0.0;
    bool converged = false;
    std::vector<double> residual_history;  // sup-norm delta per sweep
};

enum class eval_method { direct, iterative };

// synchronous sweeps from V0 = (C_c at h=0, 0 elsewhere); stops at delta <= epsilon*(1-gamma)/gamma.
// max_iter exhaustion is reported via converged=false rather than an exception so diagnostics
// survive; callers that need a hard failure check the flag.
solve_result value_iteration(const model_params& p, double epsilon = 1e-9, long max_iter = 1000000);

// direct = banded elimination on the 2H x 2H fixed-point system (no pivoting; the discounted
// kernel is strictly diagonally dominant); falls back to iterative above H = 10000
value_function policy_evaluation(const model_params& p, const policy& pi,
                                 eval_method method = eval_method::direct, double epsilon = 1e-9);

q_table q_values(const model_params& p, const value_function& v);

// tie breaks toward ordinary (the less invasive tier)
policy greedy_policy(const model_params& p, const value_function& v);

// exhaustive policy enumeration: tier-independent policies (2^H) for simplified params,
// all tier-dependent maps (4^H) otherwise; enumeration capped at 2^20 policies
solve_result bruteforce_optimal(const model_params& p);

std::string solve_result_to_json(const solve_result& r);
std::string value_function_to_json(const value_function& v);
std::string policy_table_text(const policy& pi);

} // namespace tiermon
