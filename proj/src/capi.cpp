// C ABI surface: thin wrappers mapping exceptions to status codes and objects to
// opaque handles. All substance lives in the core modules.
#include "tiermon/tiermon.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include <json.hpp>

#include "asymptotic.hpp"
#include "bench.hpp"
#include "error.hpp"
#include "params.hpp"
#include "policy.hpp"
#include "sim.hpp"
#include "solver.hpp"

using tiermon::error;
using tiermon::error_code;

struct tiermon_model {
    tiermon::model_params p;
};
struct tiermon_policy {
    tiermon::policy p;
};
struct tiermon_solve_result {
    tiermon::solve_result r;
};
struct tiermon_sweep {
    tiermon::sweep_result s;
};

namespace {

thread_local std::string g_last_error;

tiermon_status to_status(error_code c) {
    switch (c) {
        case error_code::invalid_argument: return TIERMON_INVALID_ARGUMENT;
        case error_code::validation: return TIERMON_VALIDATION;
        case error_code::not_converged: return TIERMON_NOT_CONVERGED;
        case error_code::io: return TIERMON_IO;
        case error_code::domain: return TIERMON_DOMAIN;
        case error_code::too_large: return TIERMON_TOO_LARGE;
        case error_code::internal: return TIERMON_INTERNAL;
    }
    return TIERMON_INTERNAL;
}

tiermon_status fail(tiermon_status st, const char* msg) {
    g_last_error = msg;
    return st;
}

// runs fn, converting exceptions into status codes + last_error
template <typename Fn>
tiermon_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return TIERMON_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TIERMON_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return TIERMON_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tiermon_status need(const void* p, const char* what) {
    if (p) return TIERMON_OK;
    return fail(TIERMON_INVALID_ARGUMENT, what);
}

tiermon::tier parse_tier(const char* tier) {
    if (!tier) throw error(error_code::invalid_argument, "tier is null (expected \"o\" or \"i\")");
    std::string t = tier;
    if (t == "o") return tiermon::tier::ordinary;
    if (t == "i") return tiermon::tier::intensive;
    throw error(error_code::invalid_argument,
                "bad tier \"" + t + "\" (expected \"o\" or \"i\")");
}

}  // namespace

extern "C" {

const char* tiermon_version(void) { return "1.0.0"; }

const char* tiermon_generator_id(void) { return tiermon::generator_id; }

const char* tiermon_last_error(void) { return g_last_error.c_str(); }

void tiermon_string_free(char* s) { std::free(s); }

tiermon_status tiermon_model_from_json(const char* json, tiermon_model** out) {
    if (auto st = need(json, "json is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        auto m = new tiermon_model{tiermon::params_from_json(json)};
        *out = m;
        return TIERMON_OK;
    });
}

tiermon_status tiermon_model_to_json(const tiermon_model* m, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::params_to_json(m->p));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_model_validate(const tiermon_model* m, char** report_json) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(report_json, "report_json is null"); st != TIERMON_OK) return st;
    *report_json = nullptr;
    return guarded([&] {
        *report_json = dup_string(tiermon::validation_report_to_json(tiermon::validate(m->p)));
        return TIERMON_OK;
    });
}

void tiermon_model_free(tiermon_model* m) { delete m; }

tiermon_status tiermon_policy_from_spec(const tiermon_model* m, const char* spec_json,
                                        tiermon_policy** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(spec_json, "spec_json is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(spec_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw error(error_code::invalid_argument,
                        std::string("bad policy spec JSON: ") + e.what());
        }
        if (!j.is_object())
            throw error(error_code::invalid_argument, "policy spec must be a JSON object");
        tiermon::policy pol;
        if (j.contains("actions")) {
            nlohmann::json wrapped = j["actions"];
            if (!wrapped.is_object())
                throw error(error_code::invalid_argument, "\"actions\" must be an object");
            wrapped["H"] = m->p.H;
            pol = tiermon::policy_from_json(wrapped.dump());
        } else if (j.contains("family")) {
            if (!j["family"].is_string())
                throw error(error_code::invalid_argument, "\"family\" must be a string");
            std::string fam = j["family"].get<std::string>();
            auto want_int = [&](const char* key) {
                if (!j.contains(key) || !j[key].is_number_integer())
                    throw error(error_code::invalid_argument,
                                std::string("policy spec requires integer field \"") + key +
                                    "\" for family \"" + fam + "\"");
                return j[key].get<int>();
            };
            if (fam == "always_ordinary") {
                pol = tiermon::make_constant(m->p.H, tiermon::tier::ordinary);
            } else if (fam == "always_intensive") {
                pol = tiermon::make_constant(m->p.H, tiermon::tier::intensive);
            } else if (fam == "threshold") {
                pol = tiermon::make_threshold(m->p.H, want_int("h_bar"));
            } else if (fam == "two_threshold") {
                pol = tiermon::make_two_threshold(m->p.H, want_int("lower"), want_int("upper"));
            } else if (fam == "optimal") {
                tiermon::solve_result sr = tiermon::value_iteration(m->p);
                if (!sr.converged)
                    throw error(error_code::not_converged,
                                "value iteration did not converge while building the optimal "
                                "policy");
                pol = sr.pi;
            } else {
                throw error(error_code::invalid_argument,
                            "unknown policy family \"" + fam + "\"");
            }
        } else {
            throw error(error_code::invalid_argument,
                        "policy spec needs either \"family\" or \"actions\"");
        }
        *out = new tiermon_policy{std::move(pol)};
        return TIERMON_OK;
    });
}

tiermon_status tiermon_policy_to_json(const tiermon_policy* p, char** out) {
    if (auto st = need(p, "policy is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::policy_to_json(p->p));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_policy_classify(const tiermon_policy* p, char** class_json) {
    if (auto st = need(p, "policy is null"); st != TIERMON_OK) return st;
    if (auto st = need(class_json, "class_json is null"); st != TIERMON_OK) return st;
    *class_json = nullptr;
    return guarded([&] {
        *class_json = dup_string(tiermon::policy_class_to_json(tiermon::classify(p->p)));
        return TIERMON_OK;
    });
}

void tiermon_policy_free(tiermon_policy* p) { delete p; }

tiermon_status tiermon_solve(const tiermon_model* m, double epsilon, long max_iter,
                             tiermon_solve_result** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        tiermon::solve_result sr = tiermon::value_iteration(m->p, epsilon, max_iter);
        bool converged = sr.converged;
        *out = new tiermon_solve_result{std::move(sr)};
        if (!converged)
            return fail(TIERMON_NOT_CONVERGED,
                        "value iteration hit the sweep limit before reaching tolerance "
                        "(result handle holds the last iterate)");
        return TIERMON_OK;
    });
}

tiermon_status tiermon_bruteforce(const tiermon_model* m, tiermon_solve_result** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = new tiermon_solve_result{tiermon::bruteforce_optimal(m->p)};
        return TIERMON_OK;
    });
}

tiermon_status tiermon_solve_result_to_json(const tiermon_solve_result* r, char** out) {
    if (auto st = need(r, "result is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::solve_result_to_json(r->r));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_solve_result_policy(const tiermon_solve_result* r, tiermon_policy** out) {
    if (auto st = need(r, "result is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = new tiermon_policy{r->r.pi};
        return TIERMON_OK;
    });
}

tiermon_status tiermon_solve_result_table(const tiermon_solve_result* r, char** out) {
    if (auto st = need(r, "result is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::policy_table_text(r->r.pi));
        return TIERMON_OK;
    });
}

void tiermon_solve_result_free(tiermon_solve_result* r) { delete r; }

tiermon_status tiermon_policy_evaluate(const tiermon_model* m, const tiermon_policy* p,
                                       int direct, double epsilon, char** values_json) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(p, "policy is null"); st != TIERMON_OK) return st;
    if (auto st = need(values_json, "values_json is null"); st != TIERMON_OK) return st;
    *values_json = nullptr;
    return guarded([&] {
        tiermon::value_function v = tiermon::policy_evaluation(
            m->p, p->p, direct ? tiermon::eval_method::direct : tiermon::eval_method::iterative,
            epsilon);
        *values_json = dup_string(tiermon::value_function_to_json(v));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_check_json(const tiermon_model* m, char** report_json) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(report_json, "report_json is null"); st != TIERMON_OK) return st;
    *report_json = nullptr;
    return guarded([&] {
        *report_json = dup_string(tiermon::report_to_json(tiermon::analyze(m->p)));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_check_table(const tiermon_model* m, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::report_table_text(tiermon::analyze(m->p)));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_boundary_json(const tiermon_model* m, const char* free_param, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(free_param, "free_param is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        std::vector<double> roots =
            tiermon::boundary(m->p, tiermon::free_param_from_name(free_param));
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (double r : roots) j.push_back(r);
        *out = dup_string(j.dump());
        return TIERMON_OK;
    });
}

tiermon_status tiermon_simulate_csv(const tiermon_model* m, const tiermon_policy* p,
                                    const char* tier, int h0, uint64_t seed, long max_steps,
                                    char** csv) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(p, "policy is null"); st != TIERMON_OK) return st;
    if (auto st = need(csv, "csv is null"); st != TIERMON_OK) return st;
    *csv = nullptr;
    return guarded([&] {
        tiermon::state s0{parse_tier(tier), h0};
        if (max_steps == 0 && m->p.gamma > 0.0 && m->p.gamma < 1.0)
            max_steps = static_cast<long>(std::ceil(std::log(1e-9) / std::log(m->p.gamma)));
        tiermon::trajectory tr = tiermon::simulate(m->p, p->p, s0, seed, max_steps);
        *csv = dup_string(tiermon::trajectory_to_csv(tr));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_estimate_value(const tiermon_model* m, const tiermon_policy* p,
                                      const char* tier, int h0, long n, uint64_t seed,
                                      char** json) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(p, "policy is null"); st != TIERMON_OK) return st;
    if (auto st = need(json, "json is null"); st != TIERMON_OK) return st;
    *json = nullptr;
    return guarded([&] {
        tiermon::state s0{parse_tier(tier), h0};
        tiermon::estimate_result er = tiermon::estimate_value(m->p, p->p, s0, n, seed);
        *json = dup_string(tiermon::estimate_to_json(er));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_estimate_hitting_mgf(const tiermon_model* m, int h0, long n,
                                            uint64_t seed, long max_steps, char** json) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(json, "json is null"); st != TIERMON_OK) return st;
    *json = nullptr;
    return guarded([&] {
        tiermon::estimate_result er =
            tiermon::estimate_hitting_mgf(m->p, h0, n, seed, max_steps);
        *json = dup_string(tiermon::estimate_to_json(er));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_sweep_run(const tiermon_model* m, const char* spec_json,
                                 tiermon_sweep** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(spec_json, "spec_json is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(spec_json);
        } catch (const nlohmann::json::parse_error& e) {
            throw error(error_code::invalid_argument,
                        std::string("bad sweep spec JSON: ") + e.what());
        }
        if (!j.is_object())
            throw error(error_code::invalid_argument, "sweep spec must be a JSON object");
        if (!j.contains("free") || !j["free"].is_string())
            throw error(error_code::invalid_argument,
                        "sweep spec requires a string field \"free\"");
        if (!j.contains("grid") || !j["grid"].is_array())
            throw error(error_code::invalid_argument,
                        "sweep spec requires an array field \"grid\"");
        tiermon::sweep_spec spec;
        spec.base = m->p;
        spec.free_p = tiermon::free_param_from_name(j["free"].get<std::string>());
        for (const auto& g : j["grid"]) {
            if (!g.is_number())
                throw error(error_code::invalid_argument, "sweep grid entries must be numbers");
            spec.grid.push_back(g.get<double>());
        }
        spec.annotate_boundary = j.value("annotate_boundary", false);
        *out = new tiermon_sweep{tiermon::run_sweep(spec)};
        return TIERMON_OK;
    });
}

tiermon_status tiermon_sweep_csv(const tiermon_sweep* s, char** out) {
    if (auto st = need(s, "sweep is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::sweep_to_csv(s->s));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_sweep_svg(const tiermon_sweep* s, char** out) {
    if (auto st = need(s, "sweep is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::sweep_to_svg(s->s));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_sweep_json(const tiermon_sweep* s, char** out) {
    if (auto st = need(s, "sweep is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::sweep_to_json(s->s));
        return TIERMON_OK;
    });
}

void tiermon_sweep_free(tiermon_sweep* s) { delete s; }

tiermon_status tiermon_compare_csv(const tiermon_model* m, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::comparison_to_csv(tiermon::value_comparison(m->p)));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_compare_svg(const tiermon_model* m, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::comparison_to_svg(tiermon::value_comparison(m->p)));
        return TIERMON_OK;
    });
}

tiermon_status tiermon_compare_json(const tiermon_model* m, char** out) {
    if (auto st = need(m, "model is null"); st != TIERMON_OK) return st;
    if (auto st = need(out, "out is null"); st != TIERMON_OK) return st;
    *out = nullptr;
    return guarded([&] {
        *out = dup_string(tiermon::comparison_to_json(tiermon::value_comparison(m->p)));
        return TIERMON_OK;
    });
}

}  // extern "C"
