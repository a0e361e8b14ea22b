#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asymptotic.hpp"
#include "params.hpp"
#include "policy.hpp"

namespace tiermon {

struct sweep_spec {
    model_params base;
    free_param free_p = free_param::cost_ratio;
    std::vector<double> grid;  // strictly increasing
    bool annotate_boundary = false;
};

struct sweep_row {
    double value = 0.0;  // grid value
    policy_class pc;
    std::optional<bool> thm1_holds;   // empty when the closed forms do not apply
    std::optional<bool> cond_b_holds;
    long solve_iterations = 0;
    std::string row_error;  // nonempty when this grid point failed; other rows are unaffected
};

struct sweep_result {
    sweep_spec spec;
    std::vector<sweep_row> rows;
    std::vector<double> boundary_roots;  // filled when spec.annotate_boundary
};

// one value-iteration solve (epsilon 1e-9) per grid point; rows may run on several
// threads but the output is identical for any thread count
sweep_result run_sweep(const sweep_spec& spec, unsigned threads = 0);

struct comparison_row {
    int h = 0;
    double v_numeric = 0.0;
    double v_asymptotic = 0.0;
};

std::vector<comparison_row> value_comparison(const model_params& p);

// substitution used by the sweep: cost_ratio scales C_c with C_i fixed, lambda_i and gamma
// replace the scalar, C_oi_C_io sets both switching costs
model_params substitute(const model_params& base, free_param which, double value);

std::string sweep_to_csv(const sweep_result& r);
std::string sweep_to_svg(const sweep_result& r);
std::string sweep_to_json(const sweep_result& r);
std::string comparison_to_csv(const std::vector<comparison_row>& rows);
std::string comparison_to_svg(const std::vector<comparison_row>& rows);
std::string comparison_to_json(const std::vector<comparison_row>& rows);

} // namespace tiermon
