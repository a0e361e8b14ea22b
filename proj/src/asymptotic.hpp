#pragma once

#include <string>
#include <vector>

#include "params.hpp"

namespace tiermon {

struct asymptotic_report {
    double phi = 0.0;
    double thm1_lhs = 0.0;  // gamma*(lambda_i-lambda_o)*(1-phi^2)
    double thm1_rhs = 0.0;  // C_i/C_c
    bool ordinary_sufficient = false;
    bool cond_a = false;
    double cond_b_lhs = 0.0;  // gamma*mu_o*(1+gamma*mu_o)/(1-gamma^2*lambda_o*mu_o)
    bool cond_b = false;
    int h_prime = 0;
};

// per-level hitting-time MGF factor. Evaluated in the cancellation-free conjugate form
// 2*gamma*mu_o / (1 + sqrt((1-gamma^2) + gamma^2*(1-2*lambda_o)^2)), which equals the
// textbook (1 - sqrt(1-4*lambda*mu*gamma^2)) / (2*lambda*gamma) but stays accurate as
// gamma -> 0; gamma == 1 returns exactly 1.
double phi(double lambda_o, double gamma);

// phi^h * C_c (requires the simplified preset)
double v_o_asymptotic(const model_params& p, int h);

asymptotic_report analyze(const model_params& p);
bool check_ordinary_optimal(const model_params& p);
struct threshold_conditions {
    bool cond_a = false;
    bool cond_b = false;
};
threshold_conditions check_threshold_conditions(const model_params& p);
int h_prime(const model_params& p);

enum class free_param { cost_ratio, lambda_i, gamma, switching };

free_param free_param_from_name(const std::string& name);
const char* free_param_name(free_param f);

// parameter value(s) where the ordinary-optimal sufficient condition binds with equality,
// ascending; empty when it never does. cost_ratio and lambda_i are closed-form; gamma is a
// sign-change scan over (0,1) at step 1e-3 refined by bisection to 1e-10 (zero, one, or two
// roots: the left side vanishes at both ends).
std::vector<double> boundary(const model_params& p, free_param which);

std::string report_to_json(const asymptotic_report& r);
std::string report_table_text(const asymptotic_report& r);

} // namespace tiermon
