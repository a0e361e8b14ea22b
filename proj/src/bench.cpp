#include "bench.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "parallel.hpp"
#include "solver.hpp"
#include "util.hpp"

namespace tiermon {

model_params substitute(const model_params& base, free_param which, double value) {
    model_params p = base;
    switch (which) {
    case free_param::cost_ratio: p.C_c = value * base.C_i; break;
    case free_param::lambda_i: p.lambda_i = value; break;
    case free_param::gamma: p.gamma = value; break;
    case free_param::switching: p.C_oi = p.C_io = value; break;
    }
    return p;
}

sweep_result run_sweep(const sweep_spec& spec, unsigned threads) {
    if (spec.grid.empty())
        throw error(error_code::invalid_argument, "sweep grid must be nonempty");
    for (size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i] > spec.grid[i - 1]))
            throw error(error_code::invalid_argument,
                        strf("sweep grid must be strictly increasing (grid[%zu]=%g, "
                             "grid[%zu]=%g)", i - 1, spec.grid[i - 1], i, spec.grid[i]));

    sweep_result out;
    out.spec = spec;
    if (spec.annotate_boundary)
        out.boundary_roots = boundary(spec.base, spec.free_p);  // switching sweeps reject here

    out.rows.assign(spec.grid.size(), sweep_row{});
    parallel_for(spec.grid.size(), [&](size_t i) {
        sweep_row& row = out.rows[i];
        row.value = spec.grid[i];
        try {
            model_params p = substitute(spec.base, spec.free_p, spec.grid[i]);
            require_valid(p);
            solve_result sr = value_iteration(p, 1e-9);
            row.solve_iterations = sr.iterations;
            if (!sr.converged) {
                row.row_error = strf("value iteration stopped at residual %g after %ld sweeps",
                                     sr.final_residual, sr.iterations);
                return;
            }
            row.pc = classify(sr.pi);
            if (p.simplified()) {
                try {
                    asymptotic_report rep = analyze(p);
                    row.thm1_holds = rep.ordinary_sufficient;
                    row.cond_b_holds = rep.cond_b;
                } catch (const error&) {
                    // closed forms out of domain (e.g. lambda_o outside (0,0.5)): leave empty
                }
            }
        } catch (const error& e) {
            row.row_error = e.what();
        } catch (const std::exception& e) {
            row.row_error = e.what();
        }
    }, threads);
    return out;
}

std::vector<comparison_row> value_comparison(const model_params& p) {
    require_valid(p);
    v_o_asymptotic(p, 0);  // fail fast if the closed-form side is out of domain
    solve_result sr = value_iteration(p, 1e-9);
    if (!sr.converged)
        throw error(error_code::not_converged,
                    strf("value iteration stopped at residual %g after %ld sweeps",
                         sr.final_residual, sr.iterations));
    std::vector<comparison_row> rows;
    rows.reserve(static_cast<size_t>(p.H) + 1);
    for (int h = 0; h <= p.H; ++h)
        rows.push_back({h, sr.values.at(tier::ordinary, h), v_o_asymptotic(p, h)});
    return rows;
}

namespace {

std::string h_bar_cell(const policy_class& pc) {
    if (pc.family == policy_family::threshold)
        return strf("%d", pc.h_bar);
    if (pc.family == policy_family::two_threshold)
        return strf("%d-%d", pc.lower, pc.upper);
    return "";
}

std::string opt_bool_cell(const std::optional<bool>& b) {
    if (!b.has_value())
        return "";
    return *b ? "true" : "false";
}

} // namespace

std::string sweep_to_csv(const sweep_result& r) {
    std::string out = "value,policy_class,h_bar,thm1_holds,cond_b_holds\n";
    for (const auto& row : r.rows) {
        if (!row.row_error.empty()) {
            out += strf("%s,error,,,\n", num10(row.value).c_str());
            continue;
        }
        out += strf("%s,%s,%s,%s,%s\n", num10(row.value).c_str(),
                    policy_family_name(row.pc.family), h_bar_cell(row.pc).c_str(),
                    opt_bool_cell(row.thm1_holds).c_str(),
                    opt_bool_cell(row.cond_b_holds).c_str());
    }
    return out;
}

using json = nlohmann::ordered_json;

std::string sweep_to_json(const sweep_result& r) {
    json j;
    j["free"] = free_param_name(r.spec.free_p);
    j["base"] = json::parse(params_to_json(r.spec.base));
    j["grid"] = r.spec.grid;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr;
        jr["value"] = row.value;
        if (!row.row_error.empty()) {
            jr["error"] = row.row_error;
        } else {
            jr["policy_class"] = json::parse(policy_class_to_json(row.pc));
            jr["thm1_holds"] = row.thm1_holds.has_value() ? json(*row.thm1_holds) : json(nullptr);
            jr["cond_b_holds"] =
                row.cond_b_holds.has_value() ? json(*row.cond_b_holds) : json(nullptr);
            jr["iterations"] = row.solve_iterations;
        }
        rows.push_back(jr);
    }
    j["rows"] = rows;
    if (r.spec.annotate_boundary)
        j["boundary_roots"] = r.boundary_roots;
    return j.dump(2);
}

std::string comparison_to_csv(const std::vector<comparison_row>& rows) {
    std::string out = "h,v_numeric,v_asymptotic\n";
    for (const auto& row : rows)
        out += strf("%d,%s,%s\n", row.h, num10(row.v_numeric).c_str(),
                    num10(row.v_asymptotic).c_str());
    return out;
}

std::string comparison_to_json(const std::vector<comparison_row>& rows) {
    json arr = json::array();
    for (const auto& row : rows) {
        json jr;
        jr["h"] = row.h;
        jr["v_numeric"] = row.v_numeric;
        jr["v_asymptotic"] = row.v_asymptotic;
        arr.push_back(jr);
    }
    json j;
    j["rows"] = arr;
    return j.dump(2);
}

namespace {

constexpr double svg_w = 760.0, svg_h = 420.0;
constexpr double ml = 70.0, mr = 20.0, mt = 30.0, mb = 50.0;

const char* class_fill(policy_family f) {
    switch (f) {
    case policy_family::always_ordinary: return "#e9f2e7";
    case policy_family::threshold: return "#e4edf8";
    case policy_family::two_threshold: return "#f0e7f6";
    case policy_family::always_intensive: return "#f8e6e4";
    case policy_family::other: return "#efefef";
    }
    return "#efefef";
}

struct scale {
    double lo, hi, px0, px1;
    double operator()(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

void axes(std::string& s, const scale& sx, const scale& sy, const std::string& xlabel,
          const std::string& ylabel, int y_ticks_max) {
    s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml,
              svg_h - mb, svg_w - mr, svg_h - mb);
    s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml, mt, ml,
              svg_h - mb);
    for (int k = 0; k <= 4; ++k) {
        double v = sx.lo + k * (sx.hi - sx.lo) / 4.0;
        double x = sx(v);
        s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", x,
                  svg_h - mb, x, svg_h - mb + 4);
        s += strf("<text x='%.2f' y='%.2f' text-anchor='middle' font-family='monospace' "
                  "font-size='11'>%.4g</text>\n", x, svg_h - mb + 16, v);
    }
    int step = std::max(1, y_ticks_max / 10);
    for (int v = 0; v <= y_ticks_max; v += step) {
        double y = sy(v);
        s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml - 4, y,
                  ml, y);
        s += strf("<text x='%.2f' y='%.2f' text-anchor='end' font-family='monospace' "
                  "font-size='11'>%d</text>\n", ml - 7, y + 4, v);
    }
    s += strf("<text x='%.2f' y='%.2f' text-anchor='middle' font-family='monospace' "
              "font-size='12'>%s</text>\n", (ml + svg_w - mr) / 2.0, svg_h - 12,
              xlabel.c_str());
    s += strf("<text x='16' y='%.2f' text-anchor='middle' font-family='monospace' "
              "font-size='12' transform='rotate(-90 16 %.2f)'>%s</text>\n",
              (mt + svg_h - mb) / 2.0, (mt + svg_h - mb) / 2.0, ylabel.c_str());
}

} // namespace

std::string sweep_to_svg(const sweep_result& r) {
    const auto& grid = r.spec.grid;
    double lo = grid.front(), hi = grid.back();
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    scale sx{lo, hi, ml, svg_w - mr};
    scale sy{0.0, static_cast<double>(r.spec.base.H), svg_h - mb, mt};

    std::string s = strf("<svg xmlns='http://www.w3.org/2000/svg' width='%g' height='%g' "
                         "viewBox='0 0 %g %g'>\n", svg_w, svg_h, svg_w, svg_h);
    s += strf("<rect x='0' y='0' width='%g' height='%g' fill='white'/>\n", svg_w, svg_h);

    // class bands: each grid point owns the span to the midpoints with its neighbors
    for (size_t i = 0; i < r.rows.size(); ++i) {
        double x0 = i == 0 ? grid.front() : 0.5 * (grid[i - 1] + grid[i]);
        double x1 = i + 1 == grid.size() ? grid.back() : 0.5 * (grid[i] + grid[i + 1]);
        const char* fill =
            r.rows[i].row_error.empty() ? class_fill(r.rows[i].pc.family) : "#ffffff";
        s += strf("<rect x='%.2f' y='%.2f' width='%.2f' height='%.2f' fill='%s'/>\n", sx(x0),
                  mt, std::max(sx(x1) - sx(x0), 0.5), svg_h - mb - mt, fill);
    }

    axes(s, sx, sy, free_param_name(r.spec.free_p), "h_bar", r.spec.base.H);

    for (double root : r.boundary_roots) {
        if (root < lo || root > hi)
            continue;
        s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#ff7f0e' "
                  "stroke-width='1.5' stroke-dasharray='6 4'/>\n", sx(root), mt, sx(root),
                  svg_h - mb);
    }

    for (const auto& row : r.rows) {
        if (!row.row_error.empty())
            continue;
        double x = sx(row.value);
        if (row.pc.family == policy_family::threshold) {
            s += strf("<circle cx='%.2f' cy='%.2f' r='3' fill='#1f77b4'/>\n", x, sy(row.pc.h_bar));
        } else if (row.pc.family == policy_family::two_threshold) {
            s += strf("<circle cx='%.2f' cy='%.2f' r='3' fill='#1f77b4'/>\n", x, sy(row.pc.lower));
            s += strf("<circle cx='%.2f' cy='%.2f' r='3' fill='none' stroke='#1f77b4' "
                      "stroke-width='1.5'/>\n", x, sy(row.pc.upper));
        } else if (row.pc.family == policy_family::always_intensive) {
            s += strf("<circle cx='%.2f' cy='%.2f' r='3' fill='#1f77b4'/>\n", x,
                      sy(r.spec.base.H));
        }
    }

    s += "</svg>\n";
    return s;
}

std::string comparison_to_svg(const std::vector<comparison_row>& rows) {
    double vmax = 0.0;
    int hmax = 0;
    for (const auto& row : rows) {
        vmax = std::max({vmax, row.v_numeric, row.v_asymptotic});
        hmax = std::max(hmax, row.h);
    }
    if (vmax <= 0.0)
        vmax = 1.0;
    scale sx{0.0, static_cast<double>(std::max(hmax, 1)), ml, svg_w - mr};
    scale sy{0.0, vmax, svg_h - mb, mt};

    std::string s = strf("<svg xmlns='http://www.w3.org/2000/svg' width='%g' height='%g' "
                         "viewBox='0 0 %g %g'>\n", svg_w, svg_h, svg_w, svg_h);
    s += strf("<rect x='0' y='0' width='%g' height='%g' fill='white'/>\n", svg_w, svg_h);

    s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml, svg_h - mb,
              svg_w - mr, svg_h - mb);
    s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml, mt, ml,
              svg_h - mb);
    for (int h = 0; h <= hmax; ++h) {
        double x = sx(h);
        s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", x,
                  svg_h - mb, x, svg_h - mb + 4);
        s += strf("<text x='%.2f' y='%.2f' text-anchor='middle' font-family='monospace' "
                  "font-size='11'>%d</text>\n", x, svg_h - mb + 16, h);
    }
    for (int k = 0; k <= 4; ++k) {
        double v = vmax * k / 4.0;
        double y = sy(v);
        s += strf("<line x1='%.2f' y1='%.2f' x2='%.2f' y2='%.2f' stroke='#444'/>\n", ml - 4, y,
                  ml, y);
        s += strf("<text x='%.2f' y='%.2f' text-anchor='end' font-family='monospace' "
                  "font-size='11'>%.4g</text>\n", ml - 7, y + 4, v);
    }
    s += strf("<text x='%.2f' y='%.2f' text-anchor='middle' font-family='monospace' "
              "font-size='12'>h</text>\n", (ml + svg_w - mr) / 2.0, svg_h - 12);
    s += strf("<text x='16' y='%.2f' text-anchor='middle' font-family='monospace' "
              "font-size='12' transform='rotate(-90 16 %.2f)'>value</text>\n",
              (mt + svg_h - mb) / 2.0, (mt + svg_h - mb) / 2.0);

    auto polyline = [&](bool asym) {
        std::string pts;
        for (const auto& row : rows)
            pts += strf("%.2f,%.2f ", sx(row.h), sy(asym ? row.v_asymptotic : row.v_numeric));
        return pts;
    };
    s += strf("<polyline points='%s' fill='none' stroke='#1f77b4' stroke-width='1.5'/>\n",
              polyline(false).c_str());
    s += strf("<polyline points='%s' fill='none' stroke='#ff7f0e' stroke-width='1.5' "
              "stroke-dasharray='6 4'/>\n", polyline(true).c_str());
    for (const auto& row : rows)
        s += strf("<circle cx='%.2f' cy='%.2f' r='2.5' fill='#1f77b4'/>\n", sx(row.h),
                  sy(row.v_numeric));

    s += strf("<text x='%.2f' y='%.2f' font-family='monospace' font-size='11' "
              "fill='#1f77b4'>numeric</text>\n", svg_w - mr - 150.0, mt + 14.0);
    s += strf("<text x='%.2f' y='%.2f' font-family='monospace' font-size='11' "
              "fill='#ff7f0e'>asymptotic</text>\n", svg_w - mr - 150.0, mt + 28.0);
    s += "</svg>\n";
    return s;
}

} // namespace tiermon
