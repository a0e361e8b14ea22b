// tiermon command-line front end. Everything computational goes through the C API in
// tiermon/tiermon.h; this file only parses flags/config and moves bytes to disk.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <tiermon/tiermon.h>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct cli_error {
    int exit_code;
    std::string message;
};

int exit_code_for(tiermon_status st) {
    switch (st) {
        case TIERMON_OK: return 0;
        case TIERMON_INVALID_ARGUMENT:
        case TIERMON_VALIDATION:
        case TIERMON_DOMAIN:
        case TIERMON_TOO_LARGE: return 2;
        case TIERMON_NOT_CONVERGED: return 3;
        case TIERMON_IO:
        case TIERMON_INTERNAL: return 4;
    }
    return 4;
}

[[noreturn]] void raise(tiermon_status st) {
    throw cli_error{exit_code_for(st), tiermon_last_error()};
}

// owned C strings / handles
struct string_out {
    char* s = nullptr;
    ~string_out() { tiermon_string_free(s); }
    std::string str() const { return s ? s : ""; }
};
using model_ptr = std::unique_ptr<tiermon_model, decltype(&tiermon_model_free)>;
using policy_ptr = std::unique_ptr<tiermon_policy, decltype(&tiermon_policy_free)>;
using sweep_ptr = std::unique_ptr<tiermon_sweep, decltype(&tiermon_sweep_free)>;
using result_ptr = std::unique_ptr<tiermon_solve_result, decltype(&tiermon_solve_result_free)>;

struct run_options {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> formats;  // csv|json|svg; empty = command default
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cli_error{4, "cannot open config file: " + path};
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw cli_error{4, "cannot read config file: " + path};
    json cfg;
    try {
        cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw cli_error{2, "bad config JSON in " + path + ": " + e.what()};
    }
    if (!cfg.is_object()) throw cli_error{2, "config must be a JSON object"};
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cli_error{4, "cannot open output file: " + path.string()};
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw cli_error{4, "cannot write output file: " + path.string()};
}

fs::path ensure_out_dir(const run_options& opt) {
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw cli_error{4, "cannot create output directory " + dir.string() + ": " + ec.message()};
    return dir;
}

model_ptr load_model(const json& cfg) {
    if (!cfg.contains("model"))
        throw cli_error{2, "config is missing the \"model\" object"};
    tiermon_model* raw = nullptr;
    tiermon_status st = tiermon_model_from_json(cfg["model"].dump().c_str(), &raw);
    if (st != TIERMON_OK) throw cli_error{exit_code_for(st), std::string("model: ") + tiermon_last_error()};
    model_ptr m(raw, &tiermon_model_free);

    string_out report;
    st = tiermon_model_validate(m.get(), &report.s);
    if (st != TIERMON_OK) raise(st);
    json rep = json::parse(report.str());
    for (const auto& w : rep["warnings"])
        std::fprintf(stderr, "warning: %s\n", w.get<std::string>().c_str());
    if (!rep["ok"].get<bool>()) {
        std::string msg = "model validation failed:";
        for (const auto& v : rep["violations"]) msg += "\n  " + v.get<std::string>();
        throw cli_error{2, msg};
    }
    return m;
}

void log_run(const run_options& opt, const std::string& seed_note) {
    if (opt.quiet) return;
    std::fprintf(stderr, "tiermon %s; seed=%s; generator=%s\n", tiermon_version(),
                 seed_note.c_str(), tiermon_generator_id());
}

std::set<std::string> pick_formats(const run_options& opt, std::set<std::string> fallback) {
    if (opt.formats.empty()) return fallback;
    std::set<std::string> out;
    for (const auto& f : opt.formats) {
        if (f != "csv" && f != "json" && f != "svg")
            throw cli_error{2, "bad --format \"" + f + "\" (expected csv, json, or svg)"};
        out.insert(f);
    }
    return out;
}

// field-path-aware getters for config sections
double get_number(const json& obj, const std::string& path, const std::string& key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number())
        throw cli_error{2, path + "." + key + " must be a number"};
    return obj[key].get<double>();
}

long get_integer(const json& obj, const std::string& path, const std::string& key, long dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer())
        throw cli_error{2, path + "." + key + " must be an integer"};
    return obj[key].get<long>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key,
                       const std::string& dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_string())
        throw cli_error{2, path + "." + key + " must be a string"};
    return obj[key].get<std::string>();
}

int cmd_solve(const run_options& opt) {
    json cfg = load_config(opt.config_path);
    model_ptr m = load_model(cfg);
    json sc = cfg.value("solve", json::object());
    double epsilon = get_number(sc, "solve", "epsilon", 1e-9);
    long max_iter = get_integer(sc, "solve", "max_iter", 1000000);

    log_run(opt, "-");
    fs::path dir = ensure_out_dir(opt);

    tiermon_solve_result* raw = nullptr;
    tiermon_status st = tiermon_solve(m.get(), epsilon, max_iter, &raw);
    result_ptr res(raw, &tiermon_solve_result_free);
    if (st != TIERMON_OK && st != TIERMON_NOT_CONVERGED) raise(st);
    std::string not_converged_msg = st == TIERMON_NOT_CONVERGED ? tiermon_last_error() : "";

    string_out out_json, table;
    if (auto s2 = tiermon_solve_result_to_json(res.get(), &out_json.s); s2 != TIERMON_OK) raise(s2);
    if (auto s2 = tiermon_solve_result_table(res.get(), &table.s); s2 != TIERMON_OK) raise(s2);
    write_file(dir / "solve.json", out_json.str());
    std::fputs(table.str().c_str(), stdout);

    if (st == TIERMON_NOT_CONVERGED) {
        std::fprintf(stderr, "error: %s\n", not_converged_msg.c_str());
        return 3;
    }
    return 0;
}

int cmd_check(const run_options& opt) {
    json cfg = load_config(opt.config_path);
    model_ptr m = load_model(cfg);
    log_run(opt, "-");
    fs::path dir = ensure_out_dir(opt);

    string_out rep_json, table;
    if (auto st = tiermon_check_json(m.get(), &rep_json.s); st != TIERMON_OK) raise(st);
    if (auto st = tiermon_check_table(m.get(), &table.s); st != TIERMON_OK) raise(st);
    write_file(dir / "check.json", rep_json.str());
    std::fputs(table.str().c_str(), stdout);
    return 0;
}

policy_ptr load_policy(const tiermon_model* m, const json& sim) {
    if (!sim.contains("policy"))
        throw cli_error{2, "simulate.policy is required (a policy spec object)"};
    tiermon_policy* raw = nullptr;
    tiermon_status st = tiermon_policy_from_spec(m, sim["policy"].dump().c_str(), &raw);
    if (st != TIERMON_OK)
        throw cli_error{exit_code_for(st), std::string("simulate.policy: ") + tiermon_last_error()};
    return policy_ptr(raw, &tiermon_policy_free);
}

int cmd_simulate(const run_options& opt) {
    json cfg = load_config(opt.config_path);
    model_ptr m = load_model(cfg);
    if (!cfg.contains("simulate") || !cfg["simulate"].is_object())
        throw cli_error{2, "config is missing the \"simulate\" object"};
    json sim = cfg["simulate"];

    std::string mode = get_string(sim, "simulate", "mode", "value");
    std::string tier = get_string(sim, "simulate", "tier", "o");
    int h0 = static_cast<int>(get_integer(sim, "simulate", "h0", 1));
    long n = get_integer(sim, "simulate", "n", 10000);
    long max_steps = get_integer(sim, "simulate", "max_steps", 0);
    std::uint64_t seed = opt.seed ? *opt.seed
                                  : static_cast<std::uint64_t>(get_integer(sim, "simulate", "seed", 1));

    log_run(opt, std::to_string(seed));
    fs::path dir = ensure_out_dir(opt);

    if (mode == "trajectory") {
        policy_ptr pol = load_policy(m.get(), sim);
        string_out csv;
        if (auto st = tiermon_simulate_csv(m.get(), pol.get(), tier.c_str(), h0, seed,
                                           max_steps, &csv.s);
            st != TIERMON_OK)
            raise(st);
        write_file(dir / "trajectory.csv", csv.str());
        return 0;
    }
    if (mode == "value") {
        policy_ptr pol = load_policy(m.get(), sim);
        string_out est;
        if (auto st = tiermon_estimate_value(m.get(), pol.get(), tier.c_str(), h0, n, seed, &est.s);
            st != TIERMON_OK)
            raise(st);
        write_file(dir / "estimate.json", est.str());
        std::fputs((est.str() + "\n").c_str(), stdout);
        return 0;
    }
    if (mode == "hitting_mgf") {
        string_out est;
        if (auto st = tiermon_estimate_hitting_mgf(m.get(), h0, n, seed, max_steps, &est.s);
            st != TIERMON_OK)
            raise(st);
        write_file(dir / "estimate.json", est.str());
        std::fputs((est.str() + "\n").c_str(), stdout);
        return 0;
    }
    throw cli_error{2, "simulate.mode must be \"value\", \"trajectory\", or \"hitting_mgf\" (got \"" +
                           mode + "\")"};
}

int cmd_sweep(const run_options& opt) {
    json cfg = load_config(opt.config_path);
    model_ptr m = load_model(cfg);
    if (!cfg.contains("sweep") || !cfg["sweep"].is_object())
        throw cli_error{2, "config is missing the \"sweep\" object"};
    json sw = cfg["sweep"];
    if (!sw.contains("free")) throw cli_error{2, "sweep.free is required"};

    json spec = json::object();
    spec["free"] = sw["free"];
    if (sw.contains("grid") && sw["grid"].is_array()) {
        spec["grid"] = sw["grid"];
    } else if (sw.contains("grid") && sw["grid"].is_object()) {
        const json& g = sw["grid"];
        double start = get_number(g, "sweep.grid", "start", std::nan(""));
        double stop = get_number(g, "sweep.grid", "stop", std::nan(""));
        double step = get_number(g, "sweep.grid", "step", std::nan(""));
        if (!(start == start) || !(stop == stop) || !(step == step))
            throw cli_error{2, "sweep.grid needs numeric start, stop, step"};
        if (!(step > 0)) throw cli_error{2, "sweep.grid.step must be > 0"};
        json arr = json::array();
        for (long k = 0;; ++k) {
            double v = start + static_cast<double>(k) * step;
            if (v > stop + step * 1e-9) break;
            arr.push_back(v);
        }
        spec["grid"] = arr;
    } else {
        throw cli_error{2, "sweep.grid is required (array, or {start, stop, step})"};
    }
    if (sw.contains("annotate_boundary")) spec["annotate_boundary"] = sw["annotate_boundary"];

    log_run(opt, "-");
    fs::path dir = ensure_out_dir(opt);

    tiermon_sweep* raw = nullptr;
    if (auto st = tiermon_sweep_run(m.get(), spec.dump().c_str(), &raw); st != TIERMON_OK) raise(st);
    sweep_ptr s(raw, &tiermon_sweep_free);

    std::set<std::string> fmts = pick_formats(opt, {"csv", "svg"});
    if (fmts.count("csv")) {
        string_out csv;
        if (auto st = tiermon_sweep_csv(s.get(), &csv.s); st != TIERMON_OK) raise(st);
        write_file(dir / "sweep.csv", csv.str());
    }
    if (fmts.count("svg")) {
        string_out svg;
        if (auto st = tiermon_sweep_svg(s.get(), &svg.s); st != TIERMON_OK) raise(st);
        write_file(dir / "sweep.svg", svg.str());
    }
    if (fmts.count("json")) {
        string_out js;
        if (auto st = tiermon_sweep_json(s.get(), &js.s); st != TIERMON_OK) raise(st);
        write_file(dir / "sweep.json", js.str());
    }
    return 0;
}

int cmd_compare(const run_options& opt) {
    json cfg = load_config(opt.config_path);
    model_ptr m = load_model(cfg);
    log_run(opt, "-");
    fs::path dir = ensure_out_dir(opt);

    std::set<std::string> fmts = pick_formats(opt, {"csv", "svg"});
    if (fmts.count("csv")) {
        string_out csv;
        if (auto st = tiermon_compare_csv(m.get(), &csv.s); st != TIERMON_OK) raise(st);
        write_file(dir / "compare.csv", csv.str());
        std::fputs(csv.str().c_str(), stdout);
    }
    if (fmts.count("svg")) {
        string_out svg;
        if (auto st = tiermon_compare_svg(m.get(), &svg.s); st != TIERMON_OK) raise(st);
        write_file(dir / "compare.svg", svg.str());
    }
    if (fmts.count("json")) {
        string_out js;
        if (auto st = tiermon_compare_json(m.get(), &js.s); st != TIERMON_OK) raise(st);
        write_file(dir / "compare.json", js.str());
    }
    return 0;
}

void add_common(CLI::App* cmd, run_options& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory (created if missing)");
    cmd->add_option("--format", opt.formats, "output formats: csv|json|svg (repeatable)");
    cmd->add_option("--seed", opt.seed, "override the config seed");
    cmd->add_flag("--quiet", opt.quiet, "suppress the run log line and warnings");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-tier monitoring chain: solve, check, simulate, sweep, compare"};
    app.require_subcommand(1);

    run_options opt;
    int (*run)(const run_options&) = nullptr;

    auto* solve = app.add_subcommand("solve", "value-iterate the model and report the optimal policy");
    add_common(solve, opt);
    solve->callback([&] { run = &cmd_solve; });
    auto* check = app.add_subcommand("check", "closed-form asymptotic report (phi, optimality conditions)");
    add_common(check, opt);
    check->callback([&] { run = &cmd_check; });
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectory / value / hitting-time runs");
    add_common(simulate, opt);
    simulate->callback([&] { run = &cmd_simulate; });
    auto* sweep = app.add_subcommand("sweep", "solve over a parameter grid; CSV/SVG artifacts");
    add_common(sweep, opt);
    sweep->callback([&] { run = &cmd_sweep; });
    auto* compare = app.add_subcommand("compare", "numeric vs asymptotic ordinary-policy values");
    add_common(compare, opt);
    compare->callback([&] { run = &cmd_compare; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return run(opt);
    } catch (const cli_error& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
