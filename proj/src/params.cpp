#include "params.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tiermon {

validation_report validate(const model_params& p) {
    validation_report r;
    if (p.H < 1)
        r.violations.push_back(strf("H must be >= 1 (got %d)", p.H));
    if (!(p.lambda_o >= 0.0 && p.lambda_o < 1.0) || std::isnan(p.lambda_o))
        r.violations.push_back(strf("lambda_o must lie in [0,1) (got %g)", p.lambda_o));
    if (!(p.lambda_i >= 0.0 && p.lambda_i < 1.0) || std::isnan(p.lambda_i))
        r.violations.push_back(strf("lambda_i must lie in [0,1) (got %g)", p.lambda_i));
    if (!(p.lambda_i >= p.lambda_o))
        r.violations.push_back(strf("Assumption 1a: lambda_i >= lambda_o (got lambda_i=%g, lambda_o=%g)",
                                    p.lambda_i, p.lambda_o));
    if (!(p.C_o >= 0.0 && p.C_o <= p.C_i && p.C_i <= p.C_c))
        r.violations.push_back(strf("Assumption 1b: 0 <= C_o <= C_i <= C_c (got C_o=%g, C_i=%g, C_c=%g)",
                                    p.C_o, p.C_i, p.C_c));
    if (!(p.C_oi >= 0.0))
        r.violations.push_back(strf("C_oi must be >= 0 (got %g)", p.C_oi));
    if (!(p.C_io >= 0.0))
        r.violations.push_back(strf("C_io must be >= 0 (got %g)", p.C_io));
    if (!(p.gamma > 0.0 && p.gamma < 1.0))
        r.violations.push_back(strf("gamma must lie in (0,1) (got %g)", p.gamma));
    if (r.ok() && p.lambda_o >= 0.5)
        r.warnings.push_back(strf("Assumption 2(b): lambda_o < 0.5 is required for the asymptotic "
                                  "analysis (got %g); exact solving is unaffected", p.lambda_o));
    return r;
}

void require_valid(const model_params& p) {
    validation_report r = validate(p);
    if (r.ok())
        return;
    std::string msg;
    for (const auto& v : r.violations) {
        if (!msg.empty())
            msg += "; ";
        msg += v;
    }
    throw error(error_code::validation, msg);
}

static void require_interior(const model_params& p, state s) {
    if (s.h < 0 || s.h > p.H)
        throw error(error_code::invalid_argument,
                    strf("health state %d outside [0,%d]", s.h, p.H));
    if (s.h == 0)
        throw error(error_code::invalid_argument,
                    "query on absorbing state (h=0): terminal cost is a solver boundary condition");
}

transition_dist transition(const model_params& p, state s, action a) {
    require_interior(p, s);
    double lam = p.lambda(a);
    int up = std::min(s.h + 1, p.H);
    transition_dist d;
    if (lam > 0.0)
        d.push_back({state{a, up}, lam});
    if (lam < 1.0)
        d.push_back({state{a, s.h - 1}, 1.0 - lam});
    return d;
}

double cost(const model_params& p, state s, action a) {
    require_interior(p, s);
    if (s.m == tier::ordinary)
        return a == tier::ordinary ? p.C_o : p.C_oi + p.C_i;
    return a == tier::intensive ? p.C_i : p.C_io + p.C_o;
}

model_params simplified_preset(double lambda_o, double lambda_i, double C_i, double C_c,
                               double gamma, int H) {
    model_params p;
    p.H = H;
    p.lambda_o = lambda_o;
    p.lambda_i = lambda_i;
    p.C_o = 0.0;
    p.C_i = C_i;
    p.C_c = C_c;
    p.C_oi = 0.0;
    p.C_io = 0.0;
    p.gamma = gamma;
    require_valid(p);
    return p;
}

using json = nlohmann::ordered_json;

std::string params_to_json(const model_params& p) {
    json j;
    j["H"] = p.H;
    j["lambda_o"] = p.lambda_o;
    j["lambda_i"] = p.lambda_i;
    j["C_o"] = p.C_o;
    j["C_i"] = p.C_i;
    j["C_c"] = p.C_c;
    j["C_oi"] = p.C_oi;
    j["C_io"] = p.C_io;
    j["gamma"] = p.gamma;
    return j.dump(2);
}

static double get_real(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number())
        throw error(error_code::invalid_argument, strf("model.%s must be a number", key));
    return v.get<double>();
}

model_params params_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw error(error_code::invalid_argument, strf("model JSON parse error: %s", e.what()));
    }
    if (!j.is_object())
        throw error(error_code::invalid_argument, "model JSON must be an object");

    static const char* known[] = {"H", "lambda_o", "lambda_i", "C_o", "C_i",
                                  "C_c", "C_oi", "C_io", "gamma"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = std::any_of(std::begin(known), std::end(known),
                              [&](const char* k) { return it.key() == k; });
        if (!ok)
            throw error(error_code::invalid_argument,
                        strf("model JSON has unknown field \"%s\"", it.key().c_str()));
    }
    static const char* required[] = {"H", "lambda_o", "lambda_i", "C_o", "C_i", "C_c", "gamma"};
    for (const char* k : required)
        if (!j.contains(k))
            throw error(error_code::invalid_argument, strf("model JSON missing field \"%s\"", k));

    model_params p;
    if (!j.at("H").is_number_integer())
        throw error(error_code::invalid_argument, "model.H must be an integer");
    p.H = j.at("H").get<int>();
    p.lambda_o = get_real(j, "lambda_o");
    p.lambda_i = get_real(j, "lambda_i");
    p.C_o = get_real(j, "C_o");
    p.C_i = get_real(j, "C_i");
    p.C_c = get_real(j, "C_c");
    p.C_oi = j.contains("C_oi") ? get_real(j, "C_oi") : 0.0;
    p.C_io = j.contains("C_io") ? get_real(j, "C_io") : 0.0;
    p.gamma = get_real(j, "gamma");
    return p;
}

std::string validation_report_to_json(const validation_report& r) {
    json j;
    j["ok"] = r.ok();
    j["violations"] = r.violations;
    j["warnings"] = r.warnings;
    return j.dump(2);
}

} // namespace tiermon
