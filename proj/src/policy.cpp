#include "policy.hpp"

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace tiermon {

static void require_h(int H) {
    if (H < 1)
        throw error(error_code::invalid_argument, strf("H must be >= 1 (got %d)", H));
}

policy make_constant(int H, tier t) {
    require_h(H);
    policy p;
    p.H = H;
    p.a_ordinary.assign(static_cast<size_t>(H), t);
    p.a_intensive.assign(static_cast<size_t>(H), t);
    return p;
}

policy make_threshold(int H, int h_bar) {
    require_h(H);
    if (h_bar < 1 || h_bar > H - 1)
        throw error(error_code::invalid_argument,
                    strf("bad threshold: h_bar must lie in [1,H-1]=[1,%d] (got %d); "
                         "h_bar=H is the always-intensive policy, h_bar=0 the always-ordinary one",
                         H - 1, h_bar));
    policy p = make_constant(H, tier::ordinary);
    for (int h = 1; h <= h_bar; ++h) {
        p.set(tier::ordinary, h, tier::intensive);
        p.set(tier::intensive, h, tier::intensive);
    }
    return p;
}

policy make_two_threshold(int H, int lower, int upper) {
    require_h(H);
    if (lower < 1 || upper > H || lower >= upper)
        throw error(error_code::invalid_argument,
                    strf("bad thresholds: need 1 <= lower < upper <= H=%d (got lower=%d, upper=%d)",
                         H, lower, upper));
    policy p;
    p.H = H;
    p.a_ordinary.assign(static_cast<size_t>(H), tier::ordinary);
    p.a_intensive.assign(static_cast<size_t>(H), tier::ordinary);
    for (int h = 1; h <= lower; ++h)
        p.set(tier::ordinary, h, tier::intensive);
    for (int h = 1; h <= upper; ++h)
        p.set(tier::intensive, h, tier::intensive);
    return p;
}

// length of the leading intensive run, or -1 if the row is not of threshold form
static int threshold_form(const std::vector<action>& row) {
    size_t t = 0;
    while (t < row.size() && row[t] == tier::intensive)
        ++t;
    for (size_t h = t; h < row.size(); ++h)
        if (row[h] != tier::ordinary)
            return -1;
    return static_cast<int>(t);
}

policy_class classify(const policy& pi) {
    policy_class c;
    int to = threshold_form(pi.a_ordinary);
    int ti = threshold_form(pi.a_intensive);
    if (to < 0 || ti < 0 || to > ti) {
        c.family = policy_family::other;
        return c;
    }
    if (to == ti) {
        if (to == 0)
            c.family = policy_family::always_ordinary;
        else if (to == pi.H)
            c.family = policy_family::always_intensive;
        else {
            c.family = policy_family::threshold;
            c.h_bar = to;
        }
        return c;
    }
    c.family = policy_family::two_threshold;
    c.lower = to;
    c.upper = ti;
    return c;
}

const char* policy_family_name(policy_family f) {
    switch (f) {
    case policy_family::always_ordinary: return "always_ordinary";
    case policy_family::always_intensive: return "always_intensive";
    case policy_family::threshold: return "threshold";
    case policy_family::two_threshold: return "two_threshold";
    case policy_family::other: return "other";
    }
    return "other";
}

using json = nlohmann::ordered_json;

static json actions_to_json(const std::vector<action>& row) {
    json arr = json::array();
    for (action a : row)
        arr.push_back(tier_name(a));
    return arr;
}

static std::vector<action> actions_from_json(const json& arr, const char* key) {
    if (!arr.is_array())
        throw error(error_code::invalid_argument, strf("policy.%s must be an array", key));
    std::vector<action> row;
    for (const auto& v : arr) {
        std::string s = v.is_string() ? v.get<std::string>() : std::string();
        if (s == "o")
            row.push_back(tier::ordinary);
        else if (s == "i")
            row.push_back(tier::intensive);
        else
            throw error(error_code::invalid_argument,
                        strf("policy.%s entries must be \"o\" or \"i\"", key));
    }
    return row;
}

std::string policy_to_json(const policy& pi) {
    json j;
    j["H"] = pi.H;
    j["ordinary"] = actions_to_json(pi.a_ordinary);
    j["intensive"] = actions_to_json(pi.a_intensive);
    return j.dump(2);
}

policy policy_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw error(error_code::invalid_argument, strf("policy JSON parse error: %s", e.what()));
    }
    if (!j.is_object() || !j.contains("ordinary") || !j.contains("intensive"))
        throw error(error_code::invalid_argument,
                    "policy JSON must be an object with \"ordinary\" and \"intensive\" arrays");
    policy p;
    p.a_ordinary = actions_from_json(j.at("ordinary"), "ordinary");
    p.a_intensive = actions_from_json(j.at("intensive"), "intensive");
    if (p.a_ordinary.size() != p.a_intensive.size() || p.a_ordinary.empty())
        throw error(error_code::invalid_argument,
                    "policy JSON action arrays must be nonempty and equal length");
    p.H = static_cast<int>(p.a_ordinary.size());
    return p;
}

std::string policy_class_to_json(const policy_class& c) {
    json j;
    j["class"] = policy_family_name(c.family);
    if (c.family == policy_family::threshold)
        j["h_bar"] = c.h_bar;
    if (c.family == policy_family::two_threshold) {
        j["lower"] = c.lower;
        j["upper"] = c.upper;
    }
    return j.dump();
}

} // namespace tiermon
