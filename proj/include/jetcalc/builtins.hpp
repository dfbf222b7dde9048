#pragma once

#include <string>
#include <vector>

#include "scenario.hpp"

namespace jetcalc::scenario {

struct Builtin {
    std::string name;
    std::string task;
    std::string note;
    json scenario;
};

namespace detail {

inline json term(std::vector<int> exponents, const std::string& value)
{
    return {{"exponents", exponents}, {"value", value}};
}

inline json entry(std::size_t i, std::size_t j, json poly) { return {{"i", i}, {"j", j}, {"poly", std::move(poly)}}; }

inline json envelope(const std::string& name, const std::string& task, std::size_t n, const std::string& note,
                     json payload)
{
    return {{"schema", scenario_schema}, {"name", name},  {"note", note},
            {"task", task},              {"n", n},        {"seed", 1},
            {"payload", std::move(payload)}};
}

} // namespace detail

/// The catalog, in a fixed order.
inline std::vector<Builtin> builtins()
{
    using detail::entry;
    using detail::term;
    std::vector<Builtin> out;
    auto add = [&](const std::string& name, const std::string& task, std::size_t n, const std::string& note,
                   json payload) {
        out.push_back({name, task, note, detail::envelope(name, task, n, note, std::move(payload))});
    };

    add("flat-metric-2d", "prolongation", 2,
        "Euclidean plane: Killing jets of every order are determined by their 1-jets (translations and rotation).",
        {{"structure",
          {{"kind", "metric"},
           {"order", 4},
           {"polynomials", {entry(0, 0, {term({0, 0}, "1")}), entry(1, 1, {term({0, 0}, "1")})}}}},
         {"k_max", 4},
         {"expect", {{"dims", {3, 3, 3, 3}}, {"surjective", true}, {"bijective", true}}}});

    add("sphere-metric-2d", "prolongation", 2,
        "Round sphere in stereographic chart, 4/(1+|x|^2)^2 to third order: constant curvature, so the truncated "
        "Killing system prolongs without loss.",
        {{"structure",
          {{"kind", "metric"},
           {"order", 3},
           {"polynomials",
            {entry(0, 0, {term({0, 0}, "4"), term({2, 0}, "-8"), term({0, 2}, "-8")}),
             entry(1, 1, {term({0, 0}, "4"), term({2, 0}, "-8"), term({0, 2}, "-8")})}}}},
         {"k_max", 3},
         {"expect", {{"dims", {3, 3, 3}}, {"surjective", true}}}});

    add("generic-metric-2d", "prolongation", 2,
        "dx1^2 + (1 + x1^2 + x1^3) dx2^2: non-constant curvature obstructs the order-3 Killing jets; pi_{3,2} on "
        "solutions has rank deficit 1.",
        {{"structure",
          {{"kind", "metric"},
           {"order", 3},
           {"polynomials",
            {entry(0, 0, {term({0, 0}, "1")}),
             entry(1, 1, {term({0, 0}, "1"), term({2, 0}, "1"), term({3, 0}, "1")})}}}},
         {"k_max", 3},
         {"expect", {{"surjective", false}}}});

    add("standard-symplectic-2d", "prolongation", 2,
        "dx1 ^ dx2: closed, so the infinitesimal symplectomorphism system is formally integrable at every probed order.",
        {{"structure", {{"kind", "two_form"}, {"order", 3}, {"polynomials", {entry(0, 1, {term({0, 0}, "1")})}}}},
         {"k_max", 3},
         {"require_closed", true},
         {"expect", {{"dims", {5, 9, 14}}, {"surjective", true}}}});

    add("nonclosed-2form-4d", "prolongation", 4,
        "dx1 ^ dx2 + dx3 ^ dx4 + x1 dx2 ^ dx3: nondegenerate but not closed; the order-2 projection loses rank.",
        {{"structure",
          {{"kind", "two_form"},
           {"order", 2},
           {"polynomials",
            {entry(0, 1, {term({0, 0, 0, 0}, "1")}), entry(2, 3, {term({0, 0, 0, 0}, "1")}),
             entry(1, 2, {term({1, 0, 0, 0}, "1")})}}}},
         {"k_max", 2},
         {"expect", {{"surjective", false}}}});

    add("affine-line", "klein", 1, "x -> ax + b on the line: isotropy jets die at order 1, effective action.",
        {{"realization", "affine-line"}, {"expect", {{"order", 1}, {"ghost_dim", 0}}}});

    add("projective-line", "klein", 1, "sl(2) by Moebius vector fields: order two, effective action.",
        {{"realization", "projective-line"}, {"expect", {{"order", 2}, {"ghost_dim", 0}}}});

    add("gl2-projective", "klein", 1,
        "gl(2) on the projective line: order two, and the scalar matrices act trivially (ghost of dimension one).",
        {{"realization", "projective"}, {"expect", {{"order", 2}, {"ghost_dim", 1}}}});

    add("jetgroup-ext-n1-k3-m2", "extension", 1,
        "Truncation of isotropy jet algebras of the line from order 3 to order 2; expects non-splitting and a "
        "non-abelian kernel over order 1. On the line the computed extension splits and that kernel is "
        "abelian, so this scenario reports failed checks.",
        {{"jet_group", {{"k", 3}, {"m", 2}}}, {"expect", {{"split", false}, {"kernel_to_order_1_abelian", false}}}});

    add("jetgroup-ext-n2-k3-m2", "extension", 2,
        "The same truncation in two variables: the extension does not split and the kernel over order 1 is "
        "nilpotent and non-abelian.",
        {{"jet_group", {{"k", 3}, {"m", 2}}}, {"expect", {{"split", false}, {"kernel_to_order_1_abelian", false}}}});

    return out;
}

inline const Builtin* find_builtin(const std::string& name)
{
    static const auto catalog = builtins();
    for (const auto& b : catalog) {
        if (b.name == name) {
            return &b;
        }
    }
    return nullptr;
}

} // namespace jetcalc::scenario
