#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include <tiermon/tiermon.h>

using nlohmann::json;

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

struct str_out {
    char* s = nullptr;
    ~str_out() { tiermon_string_free(s); }
    std::string get() const { return s ? std::string(s) : std::string(); }
};

struct model_h {
    tiermon_model* p = nullptr;
    ~model_h() { tiermon_model_free(p); }
};

struct policy_h {
    tiermon_policy* p = nullptr;
    ~policy_h() { tiermon_policy_free(p); }
};

struct solve_h {
    tiermon_solve_result* p = nullptr;
    ~solve_h() { tiermon_solve_result_free(p); }
};

struct sweep_h {
    tiermon_sweep* p = nullptr;
    ~sweep_h() { tiermon_sweep_free(p); }
};

const char* fig_ordinary_json =
    R"({"H":6,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})";
const char* fig_threshold_json =
    R"({"H":6,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":60,"gamma":0.9})";
const char* ratio_base_json =
    R"({"H":10,"lambda_o":0.2,"lambda_i":0.4,"C_o":0,"C_i":1,"C_c":50,"gamma":0.9})";

tiermon_model* mk(const char* text) {
    tiermon_model* m = nullptr;
    REQUIRE(tiermon_model_from_json(text, &m) == TIERMON_OK);
    REQUIRE(m != nullptr);
    return m;
}

std::string classify_str(const tiermon_policy* p) {
    str_out cj;
    REQUIRE(tiermon_policy_classify(p, &cj.s) == TIERMON_OK);
    return cj.get();
}

}  // namespace

TEST_CASE("library identifiers are stable strings") {
    CHECK(std::string(tiermon_version()).size() > 0);
    CHECK(std::string(tiermon_generator_id()) == "mt19937_64:u53");
}

TEST_CASE("model JSON crosses the boundary intact") {
    model_h m;
    m.p = mk(fig_ordinary_json);  // C_oi/C_io omitted: default to 0
    str_out out;
    REQUIRE(tiermon_model_to_json(m.p, &out.s) == TIERMON_OK);
    json j = json::parse(out.get());
    CHECK(j["H"] == 6);
    CHECK(j["lambda_o"] == 0.2);
    CHECK(j["C_c"] == 20.0);
    CHECK(j["C_oi"] == 0.0);
    CHECK(j["C_io"] == 0.0);

    tiermon_model* bad = nullptr;
    CHECK(tiermon_model_from_json(R"({"H":6,"surprise":1})", &bad) == TIERMON_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(std::string(tiermon_last_error()).size() > 0);
    CHECK(tiermon_model_from_json("{oops", &bad) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_model_from_json(nullptr, &bad) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_model_from_json(fig_ordinary_json, nullptr) == TIERMON_INVALID_ARGUMENT);
}

TEST_CASE("validation is reported, not thrown") {
    model_h good;
    good.p = mk(fig_ordinary_json);
    str_out rep;
    REQUIRE(tiermon_model_validate(good.p, &rep.s) == TIERMON_OK);
    json j = json::parse(rep.get());
    CHECK(j["ok"] == true);
    CHECK(j["violations"].empty());
    CHECK(j["warnings"].empty());

    model_h bad;  // worse care in the intensive tier: parses fine, fails the report
    bad.p = mk(R"({"H":6,"lambda_o":0.2,"lambda_i":0.1,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    str_out rep2;
    REQUIRE(tiermon_model_validate(bad.p, &rep2.s) == TIERMON_OK);
    json j2 = json::parse(rep2.get());
    CHECK(j2["ok"] == false);
    CHECK(j2["violations"].size() >= 1);
}

TEST_CASE("policy specs cover families, explicit actions, and the solved optimum") {
    model_h m;
    m.p = mk(fig_threshold_json);

    policy_h po;
    REQUIRE(tiermon_policy_from_spec(m.p, R"({"family":"always_ordinary"})", &po.p) == TIERMON_OK);
    CHECK(json::parse(classify_str(po.p))["class"] == "always_ordinary");

    policy_h th;
    REQUIRE(tiermon_policy_from_spec(m.p, R"({"family":"threshold","h_bar":3})", &th.p) ==
            TIERMON_OK);
    str_out tj;
    REQUIRE(tiermon_policy_to_json(th.p, &tj.s) == TIERMON_OK);
    json pj = json::parse(tj.get());
    CHECK(pj["H"] == 6);
    REQUIRE(pj["ordinary"].size() == 6);  // one action per live level h = 1..H
    REQUIRE(pj["intensive"].size() == 6);
    CHECK(pj["ordinary"][2] == "i");  // h = 3
    CHECK(pj["ordinary"][3] == "o");  // h = 4

    // feed the explicit action arrays back through the spec path
    json actions_spec;
    actions_spec["actions"]["ordinary"] = pj["ordinary"];
    actions_spec["actions"]["intensive"] = pj["intensive"];
    policy_h roundtrip;
    REQUIRE(tiermon_policy_from_spec(m.p, actions_spec.dump().c_str(), &roundtrip.p) ==
            TIERMON_OK);
    json cls = json::parse(classify_str(roundtrip.p));
    CHECK(cls["class"] == "threshold");
    CHECK(cls["h_bar"] == 3);

    policy_h tt;
    REQUIRE(tiermon_policy_from_spec(m.p, R"({"family":"two_threshold","lower":2,"upper":4})",
                                     &tt.p) == TIERMON_OK);
    json cls2 = json::parse(classify_str(tt.p));
    CHECK(cls2["class"] == "two_threshold");
    CHECK(cls2["lower"] == 2);
    CHECK(cls2["upper"] == 4);

    policy_h opt;
    REQUIRE(tiermon_policy_from_spec(m.p, R"({"family":"optimal"})", &opt.p) == TIERMON_OK);
    json cls3 = json::parse(classify_str(opt.p));
    CHECK(cls3["class"] == "threshold");
    CHECK(cls3["h_bar"] == 3);

    policy_h err;
    CHECK(tiermon_policy_from_spec(m.p, R"({"family":"sometimes"})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_policy_from_spec(m.p, R"({"family":"threshold"})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);  // missing h_bar
    CHECK(tiermon_policy_from_spec(m.p, R"({"family":"threshold","h_bar":99})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_policy_from_spec(m.p, "[]", &err.p) == TIERMON_INVALID_ARGUMENT);
}

TEST_CASE("solve returns values, table, and the argmin policy") {
    model_h m;
    m.p = mk(fig_ordinary_json);
    solve_h r;
    REQUIRE(tiermon_solve(m.p, 1e-9, 1000000, &r.p) == TIERMON_OK);

    str_out js;
    REQUIRE(tiermon_solve_result_to_json(r.p, &js.s) == TIERMON_OK);
    json j = json::parse(js.get());
    CHECK(j["converged"] == true);
    CHECK(j["iterations"].get<long>() > 0);
    CHECK(j["values"]["ordinary"][0] == 20.0);
    CHECK(near(j["values"]["ordinary"][1].get<double>(), 17.001549403404027, 1e-8));
    CHECK(j["policy_class"]["class"] == "always_ordinary");

    str_out table;
    REQUIRE(tiermon_solve_result_table(r.p, &table.s) == TIERMON_OK);
    CHECK(table.get().rfind("  h ordinary intensive\n", 0) == 0);

    policy_h pi;
    REQUIRE(tiermon_solve_result_policy(r.p, &pi.p) == TIERMON_OK);
    CHECK(json::parse(classify_str(pi.p))["class"] == "always_ordinary");
}

TEST_CASE("non-convergence reports a status and still hands over the iterate") {
    model_h m;
    m.p = mk(fig_ordinary_json);
    solve_h r;
    CHECK(tiermon_solve(m.p, 1e-9, 1, &r.p) == TIERMON_NOT_CONVERGED);
    REQUIRE(r.p != nullptr);
    CHECK(std::string(tiermon_last_error()).find("sweep limit") != std::string::npos);
    str_out js;
    REQUIRE(tiermon_solve_result_to_json(r.p, &js.s) == TIERMON_OK);
    json j = json::parse(js.get());
    CHECK(j["converged"] == false);
    CHECK(j["iterations"] == 1);
}

TEST_CASE("brute force agrees with iteration and refuses huge enumerations") {
    model_h m;
    m.p = mk(R"({"H":3,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":10,"gamma":0.9})");
    solve_h bf;
    REQUIRE(tiermon_bruteforce(m.p, &bf.p) == TIERMON_OK);
    str_out js;
    REQUIRE(tiermon_solve_result_to_json(bf.p, &js.s) == TIERMON_OK);
    json j = json::parse(js.get());
    CHECK(j["values"]["ordinary"][0] == 10.0);
    CHECK(near(j["values"]["ordinary"][1].get<double>(), 8.509915634929332, 1e-9));

    model_h big;
    big.p = mk(R"({"H":25,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":10,"gamma":0.9})");
    solve_h none;
    CHECK(tiermon_bruteforce(big.p, &none.p) == TIERMON_TOO_LARGE);
    CHECK(none.p == nullptr);
    CHECK(std::string(tiermon_last_error()).size() > 0);
}

TEST_CASE("policy evaluation, direct and iterative") {
    model_h m;
    m.p = mk(fig_ordinary_json);
    policy_h po;
    REQUIRE(tiermon_policy_from_spec(m.p, R"({"family":"always_ordinary"})", &po.p) == TIERMON_OK);

    str_out direct;
    REQUIRE(tiermon_policy_evaluate(m.p, po.p, 1, 1e-10, &direct.s) == TIERMON_OK);
    json jd = json::parse(direct.get());
    REQUIRE(jd["ordinary"].size() == 7);
    CHECK(jd["ordinary"][0] == 20.0);
    CHECK(near(jd["ordinary"][3].get<double>(), 12.288537059347615, 1e-9));

    str_out iter;
    REQUIRE(tiermon_policy_evaluate(m.p, po.p, 0, 1e-10, &iter.s) == TIERMON_OK);
    json ji = json::parse(iter.get());
    for (int h = 0; h <= 6; ++h)
        CHECK(near(ji["ordinary"][h].get<double>(), jd["ordinary"][h].get<double>(), 1e-8));
}

TEST_CASE("closed-form report and regime boundaries") {
    model_h m;
    m.p = mk(fig_ordinary_json);
    str_out rep;
    REQUIRE(tiermon_check_json(m.p, &rep.s) == TIERMON_OK);
    json j = json::parse(rep.get());
    CHECK(near(j["phi"].get<double>(), 0.8500720474558364, 1e-12));
    CHECK(j["ordinary_sufficient"] == true);
    CHECK(j["h_prime"] == 20);

    str_out table;
    REQUIRE(tiermon_check_table(m.p, &table.s) == TIERMON_OK);
    CHECK(table.get().find("phi ") != std::string::npos);
    CHECK(table.get().find("ordinary_sufficient") != std::string::npos);

    model_h base;
    base.p = mk(ratio_base_json);
    str_out roots;
    REQUIRE(tiermon_boundary_json(base.p, "cost_ratio", &roots.s) == TIERMON_OK);
    json jr = json::parse(roots.get());
    REQUIRE(jr.size() == 1);
    CHECK(near(jr[0].get<double>(), 20.028860568945895, 1e-9));

    str_out li;
    REQUIRE(tiermon_boundary_json(base.p, "lambda_i", &li.s) == TIERMON_OK);
    json jl = json::parse(li.get());
    REQUIRE(jl.size() == 1);
    CHECK(near(jl[0].get<double>(), 0.2801154422757836, 1e-9));

    str_out none;
    CHECK(tiermon_boundary_json(base.p, "C_oi_C_io", &none.s) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_boundary_json(base.p, "nope", &none.s) == TIERMON_INVALID_ARGUMENT);

    model_h drifty;
    drifty.p = mk(R"({"H":6,"lambda_o":0.6,"lambda_i":0.65,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    str_out d;
    CHECK(tiermon_check_json(drifty.p, &d.s) == TIERMON_DOMAIN);

    model_h general;
    general.p =
        mk(R"({"H":6,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9,
               "C_oi":0.5,"C_io":0})");
    str_out g;
    CHECK(tiermon_check_json(general.p, &g.s) == TIERMON_DOMAIN);
}

TEST_CASE("simulation endpoints") {
    model_h det;
    det.p = mk(R"({"H":6,"lambda_o":0,"lambda_i":0,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    policy_h po;
    REQUIRE(tiermon_policy_from_spec(det.p, R"({"family":"always_ordinary"})", &po.p) ==
            TIERMON_OK);

    str_out csv;
    REQUIRE(tiermon_simulate_csv(det.p, po.p, "o", 2, 1, 100, &csv.s) == TIERMON_OK);
    CHECK(csv.get() == "step,tier,h,action,cost\n0,o,2,o,0\n1,o,1,o,0\n");

    str_out csv0;  // max_steps 0 picks the discount horizon, not an empty walk
    REQUIRE(tiermon_simulate_csv(det.p, po.p, "o", 2, 1, 0, &csv0.s) == TIERMON_OK);
    CHECK(csv0.get() == csv.get());

    str_out bad;
    CHECK(tiermon_simulate_csv(det.p, po.p, "x", 2, 1, 100, &bad.s) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_simulate_csv(det.p, po.p, "o", 7, 1, 100, &bad.s) == TIERMON_INVALID_ARGUMENT);

    str_out est;
    REQUIRE(tiermon_estimate_value(det.p, po.p, "o", 1, 500, 11, &est.s) == TIERMON_OK);
    json je = json::parse(est.get());
    CHECK(near(je["mean"].get<double>(), 18.0, 1e-12));
    CHECK(je["n"] == 500);
    CHECK(je["generator_id"] == "mt19937_64:u53");
    CHECK(je.contains("stderr"));

    CHECK(tiermon_estimate_value(det.p, po.p, "o", 1, 1, 11, &bad.s) == TIERMON_INVALID_ARGUMENT);

    model_h tall;
    tall.p = mk(R"({"H":101,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    str_out mgf;
    REQUIRE(tiermon_estimate_hitting_mgf(tall.p, 1, 2000, 3, 0, &mgf.s) == TIERMON_OK);
    json jm = json::parse(mgf.get());
    CHECK(jm["truncated"] == 0);
    CHECK(jm["mean"].get<double>() > 0.0);
    CHECK(jm["mean"].get<double>() < 1.0);

    model_h shallow;
    shallow.p =
        mk(R"({"H":50,"lambda_o":0.2,"lambda_i":0.3,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    str_out m2;
    CHECK(tiermon_estimate_hitting_mgf(shallow.p, 1, 2000, 3, 0, &m2.s) ==
          TIERMON_INVALID_ARGUMENT);
}

TEST_CASE("sweep endpoints") {
    model_h base;
    base.p = mk(ratio_base_json);
    sweep_h s;
    REQUIRE(tiermon_sweep_run(base.p,
                              R"({"free":"cost_ratio","grid":[19,21],"annotate_boundary":true})",
                              &s.p) == TIERMON_OK);
    str_out csv;
    REQUIRE(tiermon_sweep_csv(s.p, &csv.s) == TIERMON_OK);
    CHECK(csv.get() ==
          "value,policy_class,h_bar,thm1_holds,cond_b_holds\n"
          "19,always_ordinary,,true,false\n"
          "21,threshold,1,false,false\n");

    str_out svg;
    REQUIRE(tiermon_sweep_svg(s.p, &svg.s) == TIERMON_OK);
    CHECK(svg.get().rfind("<svg ", 0) == 0);

    str_out js;
    REQUIRE(tiermon_sweep_json(s.p, &js.s) == TIERMON_OK);
    json j = json::parse(js.get());
    CHECK(j["free"] == "cost_ratio");
    CHECK(j["rows"].size() == 2);
    CHECK(j["boundary_roots"].size() == 1);

    model_h m60;
    m60.p = mk(R"({"H":10,"lambda_o":0.2,"lambda_i":0.4,"C_o":0,"C_i":1,"C_c":60,"gamma":0.9})");
    sweep_h sw;
    REQUIRE(tiermon_sweep_run(m60.p, R"({"free":"C_oi_C_io","grid":[0.5]})", &sw.p) == TIERMON_OK);
    str_out swcsv;
    REQUIRE(tiermon_sweep_csv(sw.p, &swcsv.s) == TIERMON_OK);
    CHECK(swcsv.get() ==
          "value,policy_class,h_bar,thm1_holds,cond_b_holds\n"
          "0.5,two_threshold,5-7,,\n");

    sweep_h err;
    CHECK(tiermon_sweep_run(m60.p, R"({"free":"C_oi_C_io","grid":[0.5],"annotate_boundary":true})",
                            &err.p) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_sweep_run(base.p, R"({"free":"upside_down","grid":[1]})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_sweep_run(base.p, R"({"free":"gamma","grid":[]})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_sweep_run(base.p, R"({"free":"gamma","grid":1})", &err.p) ==
          TIERMON_INVALID_ARGUMENT);
}

TEST_CASE("comparison endpoints") {
    model_h fig3;
    fig3.p = mk(R"({"H":5,"lambda_o":0.2,"lambda_i":0.4,"C_o":0,"C_i":1,"C_c":5,"gamma":0.9})");
    str_out csv;
    REQUIRE(tiermon_compare_csv(fig3.p, &csv.s) == TIERMON_OK);
    CHECK(csv.get().rfind("h,v_numeric,v_asymptotic\n0,5,5\n1,4.250510321,4.250360237\n", 0) == 0);

    str_out js;
    REQUIRE(tiermon_compare_json(fig3.p, &js.s) == TIERMON_OK);
    CHECK(json::parse(js.get())["rows"].size() == 6);

    str_out svg;
    REQUIRE(tiermon_compare_svg(fig3.p, &svg.s) == TIERMON_OK);
    CHECK(svg.get().find("<polyline ") != std::string::npos);

    model_h general;
    general.p = mk(
        R"({"H":5,"lambda_o":0.2,"lambda_i":0.4,"C_o":0,"C_i":1,"C_c":5,"gamma":0.9,"C_oi":1})");
    str_out g;
    CHECK(tiermon_compare_csv(general.p, &g.s) == TIERMON_DOMAIN);
}

TEST_CASE("error handling fundamentals") {
    tiermon_string_free(nullptr);
    tiermon_model_free(nullptr);
    tiermon_policy_free(nullptr);
    tiermon_solve_result_free(nullptr);
    tiermon_sweep_free(nullptr);

    model_h invalid;  // parses, but violates the rate ordering
    invalid.p =
        mk(R"({"H":6,"lambda_o":0.2,"lambda_i":0.1,"C_o":0,"C_i":1,"C_c":20,"gamma":0.9})");
    solve_h r;
    CHECK(tiermon_solve(invalid.p, 1e-9, 1000, &r.p) == TIERMON_VALIDATION);
    std::string first = tiermon_last_error();
    CHECK(first.size() > 0);

    model_h good;
    good.p = mk(fig_ordinary_json);
    solve_h r2;
    CHECK(tiermon_solve(good.p, -1.0, 1000, &r2.p) == TIERMON_INVALID_ARGUMENT);
    CHECK(std::string(tiermon_last_error()) != first);

    CHECK(tiermon_solve(nullptr, 1e-9, 1000, &r2.p) == TIERMON_INVALID_ARGUMENT);
    CHECK(tiermon_solve(good.p, 1e-9, 1000, nullptr) == TIERMON_INVALID_ARGUMENT);
}
