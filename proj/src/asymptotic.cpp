#include "asymptotic.hpp"

#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tiermon {

namespace {

void require_phi_domain(double lambda_o, double gamma_v) {
    if (!(lambda_o > 0.0 && lambda_o < 0.5))
        throw error(error_code::domain,
                    strf("Assumption 2(b): lambda_o must lie in (0,0.5) for the asymptotic "
                         "closed forms (got %g)", lambda_o));
    if (!(gamma_v > 0.0 && gamma_v <= 1.0))
        throw error(error_code::domain, strf("gamma must lie in (0,1] here (got %g)", gamma_v));
}

void require_simplified(const model_params& p) {
    require_valid(p);
    if (!p.simplified())
        throw error(error_code::domain,
                    "asymptotic analysis requires the simplified preset (C_o = C_oi = C_io = 0)");
    if (!(p.C_c > 0.0))
        throw error(error_code::domain, "asymptotic analysis requires C_c > 0");
}

double thm1_lhs_value(double lambda_o, double lambda_i, double gamma_v) {
    double f = phi(lambda_o, gamma_v);
    return gamma_v * (lambda_i - lambda_o) * (1.0 - f * f);
}

} // namespace

double phi(double lambda_o, double gamma_v) {
    require_phi_domain(lambda_o, gamma_v);
    if (gamma_v == 1.0)
        return 1.0;
    double mu = 1.0 - lambda_o;
    double d = 1.0 - 2.0 * lambda_o;
    return 2.0 * gamma_v * mu / (1.0 + std::sqrt((1.0 - gamma_v * gamma_v) +
                                                 gamma_v * gamma_v * d * d));
}

double v_o_asymptotic(const model_params& p, int h) {
    require_simplified(p);
    if (h < 0)
        throw error(error_code::invalid_argument, strf("h must be >= 0 (got %d)", h));
    double f = phi(p.lambda_o, p.gamma);
    double v = p.C_c;
    for (int k = 0; k < h; ++k)
        v *= f;
    return v;
}

asymptotic_report analyze(const model_params& p) {
    require_simplified(p);
    asymptotic_report r;
    r.phi = phi(p.lambda_o, p.gamma);
    r.thm1_lhs = p.gamma * (p.lambda_i - p.lambda_o) * (1.0 - r.phi * r.phi);
    r.thm1_rhs = p.C_i / p.C_c;
    r.ordinary_sufficient = r.thm1_lhs <= r.thm1_rhs;
    r.cond_a = !r.ordinary_sufficient;
    double gm = p.gamma * p.mu_o();
    r.cond_b_lhs = gm * (1.0 + gm) / (1.0 - p.gamma * p.gamma * p.lambda_o * p.mu_o());
    r.cond_b = r.cond_b_lhs <= 1.0;
    r.h_prime = h_prime(p);
    return r;
}

bool check_ordinary_optimal(const model_params& p) {
    return analyze(p).ordinary_sufficient;
}

threshold_conditions check_threshold_conditions(const model_params& p) {
    asymptotic_report r = analyze(p);
    return {r.cond_a, r.cond_b};
}

int h_prime(const model_params& p) {
    require_simplified(p);
    if (p.C_i == 0.0)
        return 1;  // free intensive monitoring: the bound is vacuous, see README
    double f = phi(p.lambda_o, p.gamma);
    return static_cast<int>(std::ceil(std::log(p.C_i / p.C_c) / std::log(f))) + 1;
}

free_param free_param_from_name(const std::string& name) {
    if (name == "cost_ratio")
        return free_param::cost_ratio;
    if (name == "lambda_i")
        return free_param::lambda_i;
    if (name == "gamma")
        return free_param::gamma;
    if (name == "C_oi_C_io")
        return free_param::switching;
    throw error(error_code::invalid_argument,
                strf("unknown free parameter \"%s\" (expected cost_ratio, lambda_i, gamma, "
                     "or C_oi_C_io)", name.c_str()));
}

const char* free_param_name(free_param f) {
    switch (f) {
    case free_param::cost_ratio: return "cost_ratio";
    case free_param::lambda_i: return "lambda_i";
    case free_param::gamma: return "gamma";
    case free_param::switching: return "C_oi_C_io";
    }
    return "?";
}

std::vector<double> boundary(const model_params& p, free_param which) {
    require_simplified(p);
    if (which == free_param::switching)
        throw error(error_code::invalid_argument,
                    "no closed-form regime boundary exists for switching-cost sweeps");
    std::vector<double> roots;
    if (which == free_param::cost_ratio) {
        double denom = thm1_lhs_value(p.lambda_o, p.lambda_i, p.gamma);
        if (denom > 0.0)
            roots.push_back(1.0 / denom);
        return roots;
    }
    if (which == free_param::lambda_i) {
        double f = phi(p.lambda_o, p.gamma);
        double denom = p.gamma * (1.0 - f * f);
        if (denom > 0.0) {
            double lam = p.lambda_o + (p.C_i / p.C_c) / denom;
            if (lam < 1.0)
                roots.push_back(lam);
        }
        return roots;
    }
    // gamma: scan for sign changes of lhs - rhs, then bisect
    double rhs = p.C_i / p.C_c;
    auto f = [&](double g) { return thm1_lhs_value(p.lambda_o, p.lambda_i, g) - rhs; };
    double prev_g = 1e-3;
    double prev_f = f(prev_g);
    if (prev_f == 0.0)
        roots.push_back(prev_g);
    for (int k = 2; k <= 999; ++k) {
        double g = k * 1e-3;
        double cur_f = f(g);
        if (cur_f == 0.0) {
            roots.push_back(g);
        } else if ((prev_f < 0.0) != (cur_f < 0.0) && prev_f != 0.0) {
            double lo = prev_g, hi = g, flo = prev_f;
            while (hi - lo > 1e-10) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_g = g;
        prev_f = cur_f;
    }
    return roots;
}

using json = nlohmann::ordered_json;

std::string report_to_json(const asymptotic_report& r) {
    json j;
    j["phi"] = r.phi;
    j["thm1_lhs"] = r.thm1_lhs;
    j["thm1_rhs"] = r.thm1_rhs;
    j["ordinary_sufficient"] = r.ordinary_sufficient;
    j["cond_a"] = r.cond_a;
    j["cond_b_lhs"] = r.cond_b_lhs;
    j["cond_b"] = r.cond_b;
    j["h_prime"] = r.h_prime;
    return j.dump(2);
}

std::string report_table_text(const asymptotic_report& r) {
    std::string out;
    out += strf("%-20s %.10g\n", "phi", r.phi);
    out += strf("%-20s %.10g\n", "thm1_lhs", r.thm1_lhs);
    out += strf("%-20s %.10g\n", "thm1_rhs", r.thm1_rhs);
    out += strf("%-20s %s\n", "ordinary_sufficient", r.ordinary_sufficient ? "true" : "false");
    out += strf("%-20s %s\n", "cond_a", r.cond_a ? "true" : "false");
    out += strf("%-20s %.10g\n", "cond_b_lhs", r.cond_b_lhs);
    out += strf("%-20s %s\n", "cond_b", r.cond_b ? "true" : "false");
    out += strf("%-20s %d\n", "h_prime", r.h_prime);
    return out;
}

} // namespace tiermon
