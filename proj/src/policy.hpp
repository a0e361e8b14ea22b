#pragma once

#include <string>
#include <vector>

#include "params.hpp"

namespace tiermon {

// stationary deterministic policy on the non-absorbing states h = 1..H
struct policy {
    int H = 0;
    std::vector<action> a_ordinary;  // index h-1
    std::vector<action> a_intensive;

    action at(tier m, int h) const {
        return m == tier::ordinary ? a_ordinary[static_cast<size_t>(h - 1)]
                                   : a_intensive[static_cast<size_t>(h - 1)];
    }
    void set(tier m, int h, action a) {
        (m == tier::ordinary ? a_ordinary : a_intensive)[static_cast<size_t>(h - 1)] = a;
    }
    bool tier_independent() const { return a_ordinary == a_intensive; }
};

enum class policy_family { always_ordinary, always_intensive, threshold, two_threshold, other };

struct policy_class {
    policy_family family = policy_family::other;
    int h_bar = 0;   // threshold
    int lower = 0;   // two_threshold
    int upper = 0;

    bool operator==(const policy_class&) const = default;
};

policy make_constant(int H, tier t);
policy make_threshold(int H, int h_bar);
policy make_two_threshold(int H, int lower, int upper);

policy_class classify(const policy& pi);

const char* policy_family_name(policy_family f);

std::string policy_to_json(const policy& pi);
policy policy_from_json(const std::string& text);
std::string policy_class_to_json(const policy_class& c);

} // namespace tiermon
