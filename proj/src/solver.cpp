#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tiermon {

namespace {

value_function make_values(const model_params& p) {
    value_function v;
    v.H = p.H;
    v.v_ordinary.assign(static_cast<size_t>(p.H) + 1, 0.0);
    v.v_intensive.assign(static_cast<size_t>(p.H) + 1, 0.0);
    v.v_ordinary[0] = p.C_c;
    v.v_intensive[0] = p.C_c;
    return v;
}

double step_cost(const model_params& p, tier m, action a) {
    if (m == tier::ordinary)
        return a == tier::ordinary ? p.C_o : p.C_oi + p.C_i;
    return a == tier::intensive ? p.C_i : p.C_io + p.C_o;
}

double q_of(const model_params& p, const value_function& v, tier m, int h, action a) {
    double lam = p.lambda(a);
    int up = std::min(h + 1, p.H);
    return step_cost(p, m, a) + p.gamma * (lam * v.at(a, up) + (1.0 - lam) * v.at(a, h - 1));
}

} // namespace

solve_result value_iteration(const model_params& p, double epsilon, long max_iter) {
    require_valid(p);
    if (!(epsilon > 0.0))
        throw error(error_code::invalid_argument, strf("epsilon must be > 0 (got %g)", epsilon));
    if (max_iter < 1)
        throw error(error_code::invalid_argument, strf("max_iter must be >= 1 (got %ld)", max_iter));

    double stop = epsilon * (1.0 - p.gamma) / p.gamma;
    solve_result r;
    r.epsilon = epsilon;
    value_function cur = make_values(p);
    value_function next = make_values(p);

    for (long it = 0; it < max_iter; ++it) {
        double delta = 0.0;
        for (int h = 1; h <= p.H; ++h) {
            for (tier m : {tier::ordinary, tier::intensive}) {
                double qo = q_of(p, cur, m, h, tier::ordinary);
                double qi = q_of(p, cur, m, h, tier::intensive);
                double v = std::min(qo, qi);
                delta = std::max(delta, std::fabs(v - cur.at(m, h)));
                next.set(m, h, v);
            }
        }
        std::swap(cur, next);
        r.residual_history.push_back(delta);
        r.iterations = it + 1;
        r.final_residual = delta;
        if (delta <= stop) {
            r.converged = true;
            break;
        }
    }
    r.values = cur;
    r.pi = greedy_policy(p, cur);
    return r;
}

namespace {

// fixed-point system A v = b for a fixed policy, h-major tier-minor ordering i = 2(h-1)+m.
// bandwidth 3; strict diagonal dominance (off-diagonal row sums are gamma < 1) makes
// elimination without pivoting safe.
struct banded_system {
    int n = 0;
    std::vector<double> band;  // row-major, 7 slots per row: columns i-3 .. i+3
    std::vector<double> rhs;

    double& at(int i, int j) { return band[static_cast<size_t>(i) * 7 + (j - i + 3)]; }
    double get(int i, int j) const {
        int off = j - i + 3;
        if (off < 0 || off > 6)
            return 0.0;
        return band[static_cast<size_t>(i) * 7 + off];
    }
};

banded_system build_eval_system(const model_params& p, const policy& pi) {
    banded_system s;
    s.n = 2 * p.H;
    s.band.assign(static_cast<size_t>(s.n) * 7, 0.0);
    s.rhs.assign(static_cast<size_t>(s.n), 0.0);
    for (int h = 1; h <= p.H; ++h) {
        for (tier m : {tier::ordinary, tier::intensive}) {
            int i = 2 * (h - 1) + static_cast<int>(m);
            action a = pi.at(m, h);
            double lam = p.lambda(a);
            s.at(i, i) += 1.0;
            s.rhs[static_cast<size_t>(i)] = step_cost(p, m, a);
            int up = std::min(h + 1, p.H);
            s.at(i, 2 * (up - 1) + static_cast<int>(a)) -= p.gamma * lam;
            if (h == 1)
                s.rhs[static_cast<size_t>(i)] += p.gamma * (1.0 - lam) * p.C_c;
            else
                s.at(i, 2 * (h - 2) + static_cast<int>(a)) -= p.gamma * (1.0 - lam);
        }
    }
    return s;
}

std::vector<double> solve_banded(banded_system s) {
    int n = s.n;
    for (int k = 0; k < n; ++k) {
        double pivot = s.get(k, k);
        if (std::fabs(pivot) < 1e-300)
            throw error(error_code::internal, "singular policy-evaluation system (solver bug)");
        for (int i = k + 1; i <= std::min(k + 3, n - 1); ++i) {
            double f = s.get(i, k) / pivot;
            if (f == 0.0)
                continue;
            s.at(i, k) = 0.0;
            for (int j = k + 1; j <= std::min(k + 3, n - 1); ++j)
                s.at(i, j) -= f * s.get(k, j);
            s.rhs[static_cast<size_t>(i)] -= f * s.rhs[static_cast<size_t>(k)];
        }
    }
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (int k = n - 1; k >= 0; --k) {
        double acc = s.rhs[static_cast<size_t>(k)];
        for (int j = k + 1; j <= std::min(k + 3, n - 1); ++j)
            acc -= s.get(k, j) * x[static_cast<size_t>(j)];
        x[static_cast<size_t>(k)] = acc / s.get(k, k);
    }
    return x;
}

value_function eval_direct(const model_params& p, const policy& pi) {
    banded_system s = build_eval_system(p, pi);
    std::vector<double> x = solve_banded(s);

    // sanity: the elimination is pivot-free, so verify the solution actually satisfies the system
    banded_system fresh = build_eval_system(p, pi);
    double rmax = 0.0, scale = 1.0;
    for (int i = 0; i < fresh.n; ++i) {
        double ax = 0.0;
        for (int j = std::max(0, i - 3); j <= std::min(fresh.n - 1, i + 3); ++j)
            ax += fresh.get(i, j) * x[static_cast<size_t>(j)];
        rmax = std::max(rmax, std::fabs(ax - fresh.rhs[static_cast<size_t>(i)]));
        scale = std::max({scale, std::fabs(fresh.rhs[static_cast<size_t>(i)]),
                          std::fabs(x[static_cast<size_t>(i)])});
    }
    if (rmax / scale > 1e-10)
        throw error(error_code::internal,
                    strf("policy-evaluation residual %g exceeds 1e-10 (solver bug)", rmax / scale));

    value_function v = make_values(p);
    for (int h = 1; h <= p.H; ++h) {
        v.set(tier::ordinary, h, x[static_cast<size_t>(2 * (h - 1))]);
        v.set(tier::intensive, h, x[static_cast<size_t>(2 * (h - 1) + 1)]);
    }
    return v;
}

value_function eval_iterative(const model_params& p, const policy& pi, double epsilon,
                              long max_iter) {
    double stop = epsilon * (1.0 - p.gamma) / p.gamma;
    value_function cur = make_values(p);
    value_function next = make_values(p);
    for (long it = 0; it < max_iter; ++it) {
        double delta = 0.0;
        for (int h = 1; h <= p.H; ++h) {
            for (tier m : {tier::ordinary, tier::intensive}) {
                double v = q_of(p, cur, m, h, pi.at(m, h));
                delta = std::max(delta, std::fabs(v - cur.at(m, h)));
                next.set(m, h, v);
            }
        }
        std::swap(cur, next);
        if (delta <= stop)
            return cur;
    }
    throw error(error_code::not_converged,
                strf("policy evaluation did not reach delta <= %g within %ld sweeps", stop,
                     max_iter));
}

void require_policy_match(const model_params& p, const policy& pi) {
    if (pi.H != p.H || pi.a_ordinary.size() != static_cast<size_t>(p.H) ||
        pi.a_intensive.size() != static_cast<size_t>(p.H))
        throw error(error_code::invalid_argument,
                    strf("policy defined for H=%d but model has H=%d", pi.H, p.H));
}

} // namespace

value_function policy_evaluation(const model_params& p, const policy& pi, eval_method method,
                                 double epsilon) {
    require_valid(p);
    require_policy_match(p, pi);
    if (!(epsilon > 0.0))
        throw error(error_code::invalid_argument, strf("epsilon must be > 0 (got %g)", epsilon));
    if (method == eval_method::direct && p.H <= 10000)
        return eval_direct(p, pi);
    return eval_iterative(p, pi, epsilon, 1000000);
}

q_table q_values(const model_params& p, const value_function& v) {
    require_valid(p);
    if (v.H != p.H || v.v_ordinary.size() != static_cast<size_t>(p.H) + 1 ||
        v.v_intensive.size() != static_cast<size_t>(p.H) + 1)
        throw error(error_code::invalid_argument,
                    strf("value function has H=%d but model has H=%d", v.H, p.H));
    q_table t;
    t.H = p.H;
    t.q.assign(static_cast<size_t>(p.H) * 4, 0.0);
    for (int h = 1; h <= p.H; ++h)
        for (tier m : {tier::ordinary, tier::intensive})
            for (action a : {tier::ordinary, tier::intensive})
                t.q[(static_cast<size_t>(h - 1) * 2 + static_cast<size_t>(m)) * 2 +
                    static_cast<size_t>(a)] = q_of(p, v, m, h, a);
    return t;
}

policy greedy_policy(const model_params& p, const value_function& v) {
    q_table t = q_values(p, v);
    policy pi = make_constant(p.H, tier::ordinary);
    for (int h = 1; h <= p.H; ++h)
        for (tier m : {tier::ordinary, tier::intensive})
            if (!(t.at(m, h, tier::ordinary) <= t.at(m, h, tier::intensive)))
                pi.set(m, h, tier::intensive);
    return pi;
}

namespace {

policy policy_from_mask_simplified(int H, std::uint64_t mask) {
    policy pi = make_constant(H, tier::ordinary);
    for (int h = 1; h <= H; ++h)
        if (mask >> (h - 1) & 1) {
            pi.set(tier::ordinary, h, tier::intensive);
            pi.set(tier::intensive, h, tier::intensive);
        }
    return pi;
}

policy policy_from_mask_general(int H, std::uint64_t mask) {
    policy pi = make_constant(H, tier::ordinary);
    for (int h = 1; h <= H; ++h)
        for (tier m : {tier::ordinary, tier::intensive})
            if (mask >> (2 * (h - 1) + static_cast<int>(m)) & 1)
                pi.set(m, h, tier::intensive);
    return pi;
}

} // namespace

solve_result bruteforce_optimal(const model_params& p) {
    require_valid(p);
    bool simp = p.simplified();
    int bits = simp ? p.H : 2 * p.H;
    if (bits > 20)
        throw error(error_code::too_large,
                    strf("%s enumeration needs 2^%d policies (cap 2^20); H=%d is too large",
                         simp ? "tier-independent" : "general", bits, p.H));
    std::uint64_t count = std::uint64_t{1} << bits;

    auto nth = [&](std::uint64_t mask) {
        return simp ? policy_from_mask_simplified(p.H, mask)
                    : policy_from_mask_general(p.H, mask);
    };

    value_function env = make_values(p);
    for (int h = 1; h <= p.H; ++h) {
        env.set(tier::ordinary, h, std::numeric_limits<double>::infinity());
        env.set(tier::intensive, h, std::numeric_limits<double>::infinity());
    }
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        value_function v = policy_evaluation(p, nth(mask), eval_method::direct);
        for (int h = 1; h <= p.H; ++h)
            for (tier m : {tier::ordinary, tier::intensive})
                env.set(m, h, std::min(env.at(m, h), v.at(m, h)));
    }

    constexpr double tol = 1e-9;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        policy pi = nth(mask);
        value_function v = policy_evaluation(p, pi, eval_method::direct);
        bool dominant = true;
        for (int h = 1; h <= p.H && dominant; ++h)
            for (tier m : {tier::ordinary, tier::intensive})
                if (v.at(m, h) > env.at(m, h) + tol) {
                    dominant = false;
                    break;
                }
        if (dominant) {
            solve_result r;
            r.values = v;
            r.pi = pi;
            r.iterations = static_cast<long>(count);
            r.converged = true;
            return r;
        }
    }

    std::string diag = "no single policy attains the per-state minimum envelope; envelope:";
    for (int h = 1; h <= p.H; ++h)
        diag += strf(" v(o,%d)=%.12g v(i,%d)=%.12g", h, env.at(tier::ordinary, h), h,
                     env.at(tier::intensive, h));
    throw error(error_code::internal, diag);
}

using json = nlohmann::ordered_json;

namespace {

json values_json(const value_function& v) {
    json j;
    j["ordinary"] = v.v_ordinary;
    j["intensive"] = v.v_intensive;
    return j;
}

json actions_json(const std::vector<action>& row) {
    json arr = json::array();
    for (action a : row)
        arr.push_back(tier_name(a));
    return arr;
}

} // namespace

std::string value_function_to_json(const value_function& v) {
    return values_json(v).dump(2);
}

std::string solve_result_to_json(const solve_result& r) {
    json j;
    j["values"] = values_json(r.values);
    json pol;
    pol["ordinary"] = actions_json(r.pi.a_ordinary);
    pol["intensive"] = actions_json(r.pi.a_intensive);
    j["policy"] = pol;
    j["policy_class"] = json::parse(policy_class_to_json(classify(r.pi)));
    j["iterations"] = r.iterations;
    j["final_residual"] = r.final_residual;
    j["epsilon"] = r.epsilon;
    j["converged"] = r.converged;
    return j.dump(2);
}

std::string policy_table_text(const policy& pi) {
    std::string out = "  h ordinary intensive\n";
    for (int h = 1; h <= pi.H; ++h)
        out += strf("%3d %8s %9s\n", h, tier_name(pi.at(tier::ordinary, h)),
                    tier_name(pi.at(tier::intensive, h)));
    return out;
}

} // namespace tiermon
