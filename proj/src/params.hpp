#pragma once

#include <string>
#include <vector>

namespace tiermon {

enum class tier : int { ordinary = 0, intensive = 1 };

// an action is the monitoring tier to occupy next period
using action = tier;

inline const char* tier_name(tier m) { return m == tier::ordinary ? "o" : "i"; }

struct state {
    tier m = tier::ordinary;
    int h = 0;
};

struct model_params {
    int H = 1;
    double lambda_o = 0.0;
    double lambda_i = 0.0;
    double C_o = 0.0;
    double C_i = 0.0;
    double C_c = 0.0;
    double C_oi = 0.0;
    double C_io = 0.0;
    double gamma = 0.5;

    double mu_o() const { return 1.0 - lambda_o; }
    double mu_i() const { return 1.0 - lambda_i; }
    double lambda(action a) const { return a == tier::ordinary ? lambda_o : lambda_i; }
    double mu(action a) const { return 1.0 - lambda(a); }
    bool simplified() const { return C_o == 0.0 && C_oi == 0.0 && C_io == 0.0; }
};

struct validation_report {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

struct transition_entry {
    state next;
    double prob = 0.0;
};

// zero-probability outcomes are dropped, so the list has one or two entries
using transition_dist = std::vector<transition_entry>;

validation_report validate(const model_params& p);

// throws error(validation) listing every violation when the report is not ok
void require_valid(const model_params& p);

transition_dist transition(const model_params& p, state s, action a);

double cost(const model_params& p, state s, action a);

model_params simplified_preset(double lambda_o, double lambda_i, double C_i, double C_c,
                               double gamma, int H);

std::string params_to_json(const model_params& p);
model_params params_from_json(const std::string& text);
std::string validation_report_to_json(const validation_report& r);

} // namespace tiermon
