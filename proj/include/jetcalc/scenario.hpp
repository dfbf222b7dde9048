#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "arrow.hpp"
#include "error.hpp"
#include "forms.hpp"
#include "jet.hpp"
#include "klein.hpp"
#include "lie_algebra.hpp"
#include "lie_equations.hpp"
#include "random.hpp"
#include "scalar.hpp"
#include "spencer.hpp"

namespace jetcalc::scenario {

using json = nlohmann::ordered_json;

inline constexpr const char* scenario_schema = "jetcalc-scenario/1";
inline constexpr const char* report_schema = "jetcalc-report/1";
inline constexpr const char* library_version = "0.1.0";

inline constexpr std::size_t max_identity_fiber = 60;
inline constexpr std::size_t max_identity_count = 5000;

/// A scenario that does not match the schema; pointer is a JSON pointer into the scenario document.
class schema_error : public error {
public:
    schema_error(std::string pointer, const std::string& what)
        : error(pointer + ": " + what), pointer_(std::move(pointer)), message_(what)
    {
    }
    [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::string pointer_;
    std::string message_;
};

// ---------------------------------------------------------------------------
// reading

/// A JSON node together with its pointer, for error messages.
class Node {
public:
    Node(const json& j, std::string ptr) : j_(&j), ptr_(std::move(ptr)) {}

    [[nodiscard]] const json& raw() const noexcept { return *j_; }
    [[nodiscard]] const std::string& pointer() const noexcept { return ptr_; }

    [[noreturn]] void fail(const std::string& what) const { throw schema_error(ptr_.empty() ? "/" : ptr_, what); }

    [[nodiscard]] bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    [[nodiscard]] Node at(const std::string& key) const
    {
        if (!j_->is_object()) {
            fail("expected an object");
        }
        if (!j_->contains(key)) {
            throw schema_error(child_pointer(key), "required field is missing");
        }
        return Node(j_->at(key), child_pointer(key));
    }

    [[nodiscard]] Node at(std::size_t i) const { return Node(j_->at(i), ptr_ + "/" + std::to_string(i)); }

    [[nodiscard]] std::size_t size() const
    {
        if (!j_->is_array()) {
            fail("expected an array");
        }
        return j_->size();
    }

    void require_object(std::initializer_list<const char*> allowed) const
    {
        if (!j_->is_object()) {
            fail("expected an object");
        }
        for (const auto& item : j_->items()) {
            bool ok = false;
            for (const char* a : allowed) {
                ok = ok || item.key() == a;
            }
            if (!ok) {
                throw schema_error(child_pointer(item.key()), "unknown field");
            }
        }
    }

    [[nodiscard]] std::uint64_t as_uint(std::uint64_t max = UINT32_MAX) const
    {
        if (!j_->is_number_integer() || (j_->is_number_integer() && !j_->is_number_unsigned() && j_->get<long long>() < 0)) {
            fail("expected a non-negative integer");
        }
        const auto v = j_->get<std::uint64_t>();
        if (v > max) {
            fail("value exceeds " + std::to_string(max));
        }
        return v;
    }

    [[nodiscard]] bool as_bool() const
    {
        if (!j_->is_boolean()) {
            fail("expected a boolean");
        }
        return j_->get<bool>();
    }

    [[nodiscard]] std::string as_string() const
    {
        if (!j_->is_string()) {
            fail("expected a string");
        }
        return j_->get<std::string>();
    }

    /// "p/q" strings or integers; floating point is rejected.
    [[nodiscard]] Scalar as_scalar() const
    {
        if (j_->is_number_integer()) {
            return Scalar(j_->dump());
        }
        if (!j_->is_string()) {
            fail("expected an exact rational \"p/q\" (floating point is not accepted)");
        }
        try {
            return parse_scalar(j_->get<std::string>());
        } catch (const domain_error& e) {
            fail(e.what());
        }
    }

    [[nodiscard]] std::uint64_t uint_or(const std::string& key, std::uint64_t fallback,
                                        std::uint64_t max = UINT32_MAX) const
    {
        return has(key) ? at(key).as_uint(max) : fallback;
    }

    [[nodiscard]] bool bool_or(const std::string& key, bool fallback) const
    {
        return has(key) ? at(key).as_bool() : fallback;
    }

private:
    [[nodiscard]] std::string child_pointer(const std::string& key) const
    {
        std::string escaped;
        for (char c : key) {
            if (c == '~') {
                escaped += "~0";
            } else if (c == '/') {
                escaped += "~1";
            } else {
                escaped += c;
            }
        }
        return ptr_ + "/" + escaped;
    }

    const json* j_;
    std::string ptr_;
};

inline MultiIndex read_multi_index(const Node& node, std::size_t n)
{
    if (node.size() != n) {
        node.fail("expected " + std::to_string(n) + " exponents");
    }
    std::vector<int> e;
    for (std::size_t i = 0; i < n; ++i) {
        e.push_back(static_cast<int>(node.at(i).as_uint(64)));
    }
    MultiIndex alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < e[i]; ++c) {
            alpha = alpha.raised(i);
        }
    }
    return alpha;
}

/// Sparse polynomial: [{"exponents": [...], "value": "p/q"}, ...]; repeated monomials add up.
inline Poly read_poly(const Node& node, std::size_t n)
{
    Poly p(n);
    for (std::size_t t = 0; t < node.size(); ++t) {
        const Node term = node.at(t);
        term.require_object({"exponents", "value"});
        p.add_term(read_multi_index(term.at("exponents"), n), term.at("value").as_scalar());
    }
    return p;
}

inline std::vector<Poly> read_field(const Node& node, std::size_t n)
{
    if (node.size() != n) {
        node.fail("expected " + std::to_string(n) + " components");
    }
    std::vector<Poly> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(read_poly(node.at(i), n));
    }
    return out;
}

/// Section of g_k: {"entries": [{"component": i, "alpha": [...], "poly": [...]}, ...]}.
inline VectorJetSection read_section(const Node& node, std::size_t n, int k)
{
    node.require_object({"entries"});
    VectorJetSection x(n, k);
    const Node entries = node.at("entries");
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const Node entry = entries.at(e);
        entry.require_object({"component", "alpha", "poly"});
        const auto i = entry.at("component").as_uint(n == 0 ? 0 : n - 1);
        const MultiIndex alpha = read_multi_index(entry.at("alpha"), n);
        if (alpha.order() > k) {
            entry.at("alpha").fail("multi-index order exceeds k = " + std::to_string(k));
        }
        x(i, alpha) += read_poly(entry.at("poly"), n);
    }
    return x;
}

/// {"kind": "metric" | "two_form", "order": r, "polynomials": [{"i", "j", "poly"}] | "jet": [{"i", "j", "alpha", "value"}]}.
/// Only one of each mirrored pair is needed; the other is filled in by symmetry.
inline StructureJet read_structure(const Node& node, std::size_t n)
{
    node.require_object({"kind", "order", "polynomials", "jet"});
    const std::string kind_name = node.at("kind").as_string();
    StructureKind kind{};
    if (kind_name == "metric") {
        kind = StructureKind::metric;
    } else if (kind_name == "two_form") {
        kind = StructureKind::two_form;
    } else {
        node.at("kind").fail("expected \"metric\" or \"two_form\"");
    }
    const int order = static_cast<int>(node.at("order").as_uint(16));
    if (node.has("polynomials") == node.has("jet")) {
        node.fail("exactly one of \"polynomials\" and \"jet\" is required");
    }
    auto index = [n](const Node& e, const char* key) { return static_cast<std::size_t>(e.at(key).as_uint(n - 1)); };
    if (node.has("polynomials")) {
        std::vector<std::vector<Poly>> table(n, std::vector<Poly>(n, Poly(n)));
        std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
        const Node list = node.at("polynomials");
        for (std::size_t e = 0; e < list.size(); ++e) {
            const Node entry = list.at(e);
            entry.require_object({"i", "j", "poly"});
            const auto i = index(entry, "i");
            const auto j = index(entry, "j");
            if (seen[i][j] || seen[j][i]) {
                entry.fail("entry given twice");
            }
            if (kind == StructureKind::two_form && i == j) {
                entry.fail("diagonal entries of a two-form vanish");
            }
            seen[i][j] = true;
            table[i][j] = read_poly(entry.at("poly"), n);
            table[j][i] = kind == StructureKind::metric ? table[i][j] : -table[i][j];
        }
        return StructureJet::from_polynomials(kind, table, order);
    }
    StructureJet s(kind, n, order);
    const Node list = node.at("jet");
    for (std::size_t e = 0; e < list.size(); ++e) {
        const Node entry = list.at(e);
        entry.require_object({"i", "j", "alpha", "value"});
        const auto i = index(entry, "i");
        const auto j = index(entry, "j");
        const MultiIndex alpha = read_multi_index(entry.at("alpha"), n);
        if (alpha.order() > order) {
            entry.at("alpha").fail("multi-index order exceeds the declared jet order");
        }
        try {
            s.set(i, j, alpha, entry.at("value").as_scalar());
        } catch (const domain_error& err) {
            entry.fail(err.what());
        }
    }
    return s;
}

/// {"dim": d, "brackets": [{"i", "j", "k", "value"}]} meaning [e_i, e_j] has e_k-coefficient value.
inline FiniteLieAlgebra read_algebra(const Node& node)
{
    node.require_object({"dim", "brackets"});
    const auto d = static_cast<std::size_t>(node.at("dim").as_uint(64));
    if (d == 0) {
        node.at("dim").fail("the algebra must be nonzero");
    }
    StructureConstants c(d);
    const Node list = node.at("brackets");
    for (std::size_t e = 0; e < list.size(); ++e) {
        const Node entry = list.at(e);
        entry.require_object({"i", "j", "k", "value"});
        const auto i = entry.at("i").as_uint(d - 1);
        const auto j = entry.at("j").as_uint(d - 1);
        const auto k = entry.at("k").as_uint(d - 1);
        if (i == j) {
            entry.fail("a bracket [e_i, e_i] must vanish");
        }
        c.set_antisymmetric(i, j, k, entry.at("value").as_scalar());
    }
    const auto check = validate_lie_algebra(c);
    if (!check.ok) {
        node.at("brackets").fail("structure constants violate antisymmetry or the Jacobi identity");
    }
    return FiniteLieAlgebra(c);
}

inline Vector read_vector(const Node& node, std::size_t d)
{
    if (node.size() != d) {
        node.fail("expected " + std::to_string(d) + " coordinates");
    }
    Vector v;
    for (std::size_t i = 0; i < d; ++i) {
        v.push_back(node.at(i).as_scalar());
    }
    return v;
}

// ---------------------------------------------------------------------------
// writing

inline json scalar_json(const Scalar& s) { return format_scalar(s); }

inline json poly_json(const Poly& p)
{
    json out = json::array();
    for (const auto& [alpha, c] : p.terms()) {
        out.push_back({{"exponents", alpha.to_vector()}, {"value", format_scalar(c)}});
    }
    return out;
}

inline json section_json(const VectorJetSection& x)
{
    json entries = json::array();
    const auto alphas = multi_indices_up_to(x.dim(), x.order());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        for (const auto& alpha : alphas) {
            if (!x(i, alpha).is_zero()) {
                entries.push_back({{"component", i}, {"alpha", alpha.to_vector()}, {"poly", poly_json(x(i, alpha))}});
            }
        }
    }
    return {{"entries", entries}};
}

inline json vector_json(const Vector& v)
{
    json out = json::array();
    for (const auto& s : v) {
        out.push_back(format_scalar(s));
    }
    return out;
}

inline json sizes_json(const std::vector<std::size_t>& v) { return json(v); }

/// One verdict; witness is null on success.
inline json check(const std::string& name, bool pass, json detail = json::object())
{
    json out = {{"name", name}, {"pass", pass}};
    for (auto& item : detail.items()) {
        out[item.key()] = item.value();
    }
    if (!out.contains("witness")) {
        out["witness"] = nullptr;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tasks

struct RunOptions {
    std::optional<std::uint64_t> seed;    // overrides the scenario seed
    std::optional<std::uint64_t> k_max;   // prolongation
    std::optional<std::uint64_t> degree;  // forms and identities
};

struct TaskContext {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    RunOptions options;
};

namespace detail {

inline Node empty_object(std::string pointer)
{
    static const json empty = json::object();
    return Node(empty, std::move(pointer));
}


/// Per-check seed, derived from the scenario seed; recorded in the report.
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) { return seed * 1000003ULL + salt; }

/// Runs count instances; stops at the first failing instance and records it as the witness.
template <class F>
json repeat_check(const std::string& name, std::uint64_t seed, std::size_t count, F&& instance)
{
    RandomSource rng(seed);
    for (std::size_t t = 0; t < count; ++t) {
        std::string what;
        if (!instance(rng, what)) {
            return check(name, false,
                         {{"instances", t + 1}, {"seed", seed}, {"witness", {{"instance", t}, {"detail", what}}}});
        }
    }
    return check(name, true, {{"instances", count}, {"seed", seed}});
}

inline void require_fiber_budget(std::size_t n, int k)
{
    if (vector_fiber_dimension(n, k) > max_identity_fiber) {
        throw resource_error("g_k fiber dimension " + std::to_string(vector_fiber_dimension(n, k)) +
                             " exceeds the identity-suite bound " + std::to_string(max_identity_fiber));
    }
}

} // namespace detail

/// Spencer bracket, jet action, form and arrow identities on seeded random instances.
inline json run_identities(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"k", "count", "degree"});
    const std::size_t n = ctx.n;
    const int k = static_cast<int>(payload.at("k").as_uint(8));
    const auto count = static_cast<std::size_t>(payload.uint_or("count", 20, max_identity_count));
    const int degree = static_cast<int>(ctx.options.degree ? *ctx.options.degree : payload.uint_or("degree", 2, 6));
    if (ctx.options.degree && *ctx.options.degree > 6) {
        throw schema_error("/payload/degree", "value exceeds 6");
    }
    detail::require_fiber_budget(n, k + 1);
    const auto s = [&](std::uint64_t salt) { return detail::derived_seed(ctx.seed, salt); };

    json checks = json::array();
    checks.push_back(detail::repeat_check("spencer.antisymmetry", s(1), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_section(n, k, degree);
        const auto b = rng.vector_section(n, k, degree);
        return (spencer_bracket(a, b) + spencer_bracket(b, a)).is_zero() && spencer_bracket(a, a).is_zero();
    }));
    checks.push_back(detail::repeat_check("spencer.jacobi", s(2), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_section(n, k, degree);
        const auto b = rng.vector_section(n, k, degree);
        const auto c = rng.vector_section(n, k, degree);
        const auto jac = spencer_bracket(a, spencer_bracket(b, c)) + spencer_bracket(b, spencer_bracket(c, a)) +
                         spencer_bracket(c, spencer_bracket(a, b));
        return jac.is_zero();
    }));
    checks.push_back(
        detail::repeat_check("spencer.lift_independence", s(3), count, [&](RandomSource& rng, std::string& what) {
            const auto a = rng.vector_section(n, k, degree);
            const auto b = rng.vector_section(n, k, degree);
            const auto lift_seed = rng.next();
            what = "lift seed " + std::to_string(lift_seed);
            return spencer_bracket(a, b) == spencer_bracket(a, b, LiftPolicy::randomized(lift_seed, degree));
        }));
    checks.push_back(
        detail::repeat_check("spencer.projection", s(4), count, [&](RandomSource& rng, std::string& what) {
            const auto a = rng.vector_section(n, k, degree);
            const auto b = rng.vector_section(n, k, degree);
            const auto ab = spencer_bracket(a, b);
            for (int m = 0; m < k; ++m) {
                if (project(ab, m) != spencer_bracket(project(a, m), project(b, m))) {
                    what = "m = " + std::to_string(m);
                    return false;
                }
            }
            return true;
        }));
    checks.push_back(detail::repeat_check("spencer.order_zero_classical", s(5), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_field(n, degree);
        const auto b = rng.vector_field(n, degree);
        return vector_part(spencer_bracket(prolong_vector_field(a, 0), prolong_vector_field(b, 0))) ==
               lie_bracket_fields(a, b);
    }));
    checks.push_back(detail::repeat_check("action.representation", s(6), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_section(n, k, degree);
        const auto b = rng.vector_section(n, k, degree);
        const auto f = rng.function_section(n, k, degree);
        return jet_action(spencer_bracket(a, b), f) == jet_action(a, jet_action(b, f)) - jet_action(b, jet_action(a, f));
    }));
    checks.push_back(detail::repeat_check("action.leibniz", s(7), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_section(n, k, degree);
        const auto f = rng.function_section(n, k, degree);
        const auto g = rng.function_section(n, k, degree);
        return jet_action(a, jet_product(f, g)) == jet_product(jet_action(a, f), g) + jet_product(f, jet_action(a, g));
    }));
    checks.push_back(detail::repeat_check("action.smooth_functions", s(8), count, [&](RandomSource& rng, std::string&) {
        const auto a = rng.vector_section(n, k, degree);
        const auto g = rng.function_section(n, k, degree);
        const Poly phi = rng.poly(n, degree);
        Poly x0phi(n);
        const auto v = vector_part(a);
        for (std::size_t j = 0; j < n; ++j) {
            x0phi += v[j] * phi.derivative(j);
        }
        return jet_action(a, multiply_by_function(phi, g)) ==
               multiply_by_function(x0phi, g) + multiply_by_function(phi, jet_action(a, g));
    }));
    checks.push_back(
        detail::repeat_check("action.lift_independence", s(9), count, [&](RandomSource& rng, std::string& what) {
            const auto a = rng.vector_section(n, k, degree);
            const auto f = rng.function_section(n, k, degree);
            const auto lift_seed = rng.next();
            what = "lift seed " + std::to_string(lift_seed);
            return jet_action(a, f) == jet_action(a, f, LiftPolicy::randomized(lift_seed, degree));
        }));
    checks.push_back(
        detail::repeat_check("prolongation.homomorphism", s(10), count, [&](RandomSource& rng, std::string&) {
            const auto a = rng.vector_field(n, 3);
            const auto b = rng.vector_field(n, 3);
            return spencer_bracket(prolong_vector_field(a, k), prolong_vector_field(b, k)) ==
                   prolong_vector_field(lie_bracket_fields(a, b), k);
        }));

    const BasisBrackets brackets(n, k);
    const std::size_t form_count = std::max<std::size_t>(1, count / 4);
    for (std::size_t r = 0; r <= 1; ++r) {
        if (r + 2 > vector_fiber_dimension(n, k)) {
            continue;
        }
        checks.push_back(detail::repeat_check("forms.d_squared.r" + std::to_string(r), s(11 + r), form_count,
                                              [&](RandomSource& rng, std::string&) {
                                                  const auto w = random_form(rng, n, k, r, 2, false, 15);
                                                  const auto dw =
                                                      exterior_derivative(w, brackets, DegreeBound::fiber_dimension);
                                                  return exterior_derivative(dw, brackets, DegreeBound::fiber_dimension)
                                                      .is_zero();
                                              }));
    }
    if (n >= 2) {
        checks.push_back(detail::repeat_check("forms.cartan", s(13), form_count, [&](RandomSource& rng, std::string&) {
            const auto y = rng.vector_section(n, k, 1);
            const auto w = random_form(rng, n, k, 1, 2, false, 15);
            const auto dw = exterior_derivative(w, brackets);
            return lie_derivative(y, w) == interior_product(y, dw) + exterior_derivative(interior_product(y, w), brackets);
        }));
    }
    if (k >= 1) {
        checks.push_back(
            detail::repeat_check("forms.projection", s(14), form_count, [&](RandomSource& rng, std::string& what) {
                const auto w = random_form(rng, n, k, 0, 2, true, 15);
                const auto dw = exterior_derivative(w, brackets, DegreeBound::fiber_dimension);
                for (int m = 0; m < k; ++m) {
                    if (project(dw, m) != exterior_derivative(project(w, m), DegreeBound::fiber_dimension)) {
                        what = "m = " + std::to_string(m);
                        return false;
                    }
                }
                return true;
            }));
    }
    const int ka = std::max(k, 1);
    checks.push_back(detail::repeat_check("arrows.groupoid", s(15), count, [&](RandomSource& rng, std::string& what) {
        const Point p = rng.point(n);
        const Point q = rng.point(n);
        const Point r = rng.point(n);
        const Point t = rng.point(n);
        const Arrow a = rng.arrow(p, q, ka);
        const Arrow b = rng.arrow(q, r, ka);
        const Arrow c = rng.arrow(r, t, ka);
        if (compose_arrows(c, compose_arrows(b, a)) != compose_arrows(compose_arrows(c, b), a)) {
            what = "associativity";
            return false;
        }
        if (compose_arrows(invert_arrow(a), a) != Arrow::identity(p, ka) ||
            compose_arrows(a, invert_arrow(a)) != Arrow::identity(q, ka)) {
            what = "inverse";
            return false;
        }
        for (int m = 1; m < ka; ++m) {
            if (project(compose_arrows(b, a), m) != compose_arrows(project(b, m), project(a, m))) {
                what = "projection m = " + std::to_string(m);
                return false;
            }
        }
        return true;
    }));
    results["k"] = k;
    results["degree"] = degree;
    results["count"] = count;
    return checks;
}

/// The Spencer bracket of two given sections, with its identities.
inline json run_bracket(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"k", "x", "y", "lift_seed"});
    const std::size_t n = ctx.n;
    const int k = static_cast<int>(payload.at("k").as_uint(8));
    detail::require_fiber_budget(n, k + 1);
    const auto x = read_section(payload.at("x"), n, k);
    const auto y = read_section(payload.at("y"), n, k);
    const std::uint64_t lift_seed = payload.uint_or("lift_seed", ctx.seed, UINT64_MAX);
    const auto xy = spencer_bracket(x, y);
    json checks = json::array();
    checks.push_back(check("antisymmetry", (xy + spencer_bracket(y, x)).is_zero()));
    checks.push_back(check("lift_independence", xy == spencer_bracket(x, y, LiftPolicy::randomized(lift_seed)),
                           {{"seed", lift_seed}}));
    std::optional<int> bad;
    for (int m = 0; m < k && !bad; ++m) {
        if (project(xy, m) != spencer_bracket(project(x, m), project(y, m))) {
            bad = m;
        }
    }
    checks.push_back(check("projection", !bad, bad ? json{{"witness", {{"m", *bad}}}} : json::object()));
    checks.push_back(check("order_zero_classical",
                           vector_part(spencer_bracket(project(x, 0), project(y, 0))) ==
                               lie_bracket_fields(vector_part(x), vector_part(y))));
    results["bracket"] = section_json(xy);
    results["x_holonomic"] = is_holonomic(x).holonomic;
    results["y_holonomic"] = is_holonomic(y).holonomic;
    return checks;
}

/// Local exactness probe on (k, r)-forms and the constants kernel.
inline json run_forms(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"k", "r", "degree"});
    const int k = static_cast<int>(payload.at("k").as_uint(4));
    const auto r = static_cast<std::size_t>(payload.at("r").as_uint(8));
    if (r == 0) {
        payload.at("r").fail("the exactness probe needs r >= 1");
    }
    const int degree = static_cast<int>(ctx.options.degree ? *ctx.options.degree : payload.uint_or("degree", 2, 8));
    const auto rep = local_exactness_check(ctx.n, k, r, degree);
    json checks = json::array();
    checks.push_back(check("closed_forms_exact", rep.all_exact(),
                           rep.all_exact() ? json::object() : json{{"witness", {{"unsolved", rep.unsolved}}}}));
    checks.push_back(check("constants_kernel_is_one_dimensional", rep.constants_dimension == 1,
                           {{"dimension", rep.constants_dimension}}));
    results["k"] = k;
    results["r"] = r;
    results["degree"] = rep.degree;
    results["primitive_degree"] = rep.primitive_degree;
    results["closed_dimension"] = rep.closed_dimension;
    results["exact_dimension"] = rep.exact_dimension;
    results["constants_dimension"] = rep.constants_dimension;
    return checks;
}

/// Killing or symplectic system prolonged to k_max; surjectivity of the restricted projections.
inline json run_prolongation(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"structure", "k_max", "require_closed", "expect"});
    const std::size_t n = ctx.n;
    const StructureJet s = read_structure(payload.at("structure"), n);
    const int k_max =
        static_cast<int>(ctx.options.k_max ? *ctx.options.k_max : payload.at("k_max").as_uint(12));
    if (k_max < 1) {
        throw schema_error("/payload/k_max", "k_max must be at least 1");
    }
    if (s.order() < k_max) {
        throw schema_error("/payload/structure/order", "the order-" + std::to_string(k_max) +
                                                           " system needs the structure jet to order " +
                                                           std::to_string(k_max));
    }
    SymplecticOptions sym;
    sym.require_closed = payload.bool_or("require_closed", false);
    std::function<LinearJetSubspace(int)> solutions;
    if (s.kind() == StructureKind::metric) {
        solutions = [&](int k) { return solution_space(killing_system(s, k)); };
    } else {
        solutions = [&](int k) { return solution_space(symplectic_system(s, k, sym)); };
    }
    const auto rep = prolongation_report(solutions, k_max);

    json levels = json::array();
    json atiyah = json::array();
    bool identities = true;
    std::optional<int> first_deficit;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        const auto& l = rep.levels[i];
        levels.push_back({{"k", l.k},
                          {"solution_dim", l.solution_dim},
                          {"projection_rank", l.projection_rank},
                          {"lower_dim", l.lower_dim},
                          {"surjective", l.surjective},
                          {"kernel_dim", l.kernel_dim},
                          {"bijective", l.bijective()}});
        identities = identities && l.solution_dim == l.projection_rank + l.kernel_dim && l.projection_rank <= l.lower_dim;
        if (i > 0) {
            identities = identities && l.solution_dim <= rep.levels[i - 1].solution_dim + l.kernel_dim;
        }
        if (l.k >= 2 && !l.surjective && !first_deficit) {
            first_deficit = l.k;
        }
    }
    for (int k = 1; k <= std::min(k_max, 2); ++k) {
        const auto a = atiyah_exactness(solutions(k));
        atiyah.push_back({{"k", k},
                          {"anchor_rank", a.anchor_rank},
                          {"isotropy_dim", a.isotropy_dim},
                          {"anchor_surjective", a.anchor_surjective},
                          {"kernel_identity", a.kernel_identity}});
    }
    results["kind"] = to_string(s.kind());
    results["structure_order"] = s.order();
    results["k_max"] = k_max;
    results["levels"] = levels;
    results["dims"] = rep.dims();
    results["atiyah"] = atiyah;
    results["probed_through"] = k_max;
    if (s.kind() == StructureKind::two_form) {
        results["closed_to_supplied_order"] = is_closed(s);
    }

    json checks = json::array();
    checks.push_back(check("rank_identities", identities));
    const Node expect_node = payload.has("expect") ? payload.at("expect") : detail::empty_object("/payload/expect");
    expect_node.require_object({"surjective", "bijective", "dims"});
    const bool expect_surjective = expect_node.bool_or("surjective", true);
    json surj = {{"expected", expect_surjective}, {"observed", rep.all_surjective()}};
    if (first_deficit) {
        const auto& l = rep.levels[static_cast<std::size_t>(*first_deficit - 1)];
        surj["witness"] = {{"k", l.k}, {"projection_rank", l.projection_rank}, {"lower_dim", l.lower_dim},
                           {"deficit", l.lower_dim - l.projection_rank}};
    }
    checks.push_back(check("surjectivity", rep.all_surjective() == expect_surjective, surj));
    if (expect_node.has("bijective")) {
        const bool want = expect_node.at("bijective").as_bool();
        checks.push_back(check("bijectivity", rep.all_bijective() == want,
                               {{"expected", want}, {"observed", rep.all_bijective()}}));
    }
    if (expect_node.has("dims")) {
        std::vector<std::size_t> want;
        const Node d = expect_node.at("dims");
        for (std::size_t i = 0; i < d.size(); ++i) {
            want.push_back(d.at(i).as_uint());
        }
        auto got = rep.dims();
        got.resize(std::min(got.size(), want.size()));
        const bool ok = want.size() <= rep.dims().size() && got == want;
        checks.push_back(check("dims", ok, {{"expected", want}, {"observed", rep.dims()}}));
    }
    if (s.kind() == StructureKind::metric && s.order() >= 1 && k_max >= 2) {
        // order-2 isotropy jets of Killing fields are their 1-jets completed by the Levi-Civita connection
        const auto gamma = levi_civita(s);
        const auto two = solutions(2);
        Matrix anchor(n, two.dim());
        for (std::size_t b = 0; b < two.dim(); ++b) {
            for (std::size_t i = 0; i < n; ++i) {
                anchor(i, b) = two.basis()[b][i];
            }
        }
        bool ok = true;
        for (const auto& c : nullspace(anchor)) {
            Vector v(two.basis().front().size());
            for (std::size_t b = 0; b < two.dim(); ++b) {
                for (std::size_t t = 0; t < v.size(); ++t) {
                    v[t] += c[b] * two.basis()[b][t];
                }
            }
            const auto jet = from_fiber_vector(n, 2, v, s.base());
            ok = ok && isotropy_completion(gamma, project(jet, 1)) == jet;
        }
        checks.push_back(check("levi_civita_completion", ok));
    }
    return checks;
}

namespace detail {

inline RealizedLieAlgebra klein_builtin(const Node& node, std::size_t n)
{
    const std::string name = node.as_string();
    if (name == "affine-line" || name == "affine") {
        return realizations::affine_line();
    }
    if (name == "projective-line" || name == "sl2") {
        return realizations::projective_line();
    }
    if (name == "projective" || name == "gl-projective") {
        return realizations::projective_space(n);
    }
    node.fail("unknown realization \"" + name + "\" (affine-line, projective-line, projective)");
}

} // namespace detail

/// Isotropy filtration, order and ghost of a realized Lie algebra.
inline json run_klein(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"realization", "algebra", "fields", "depth_max", "sigma_max", "expect"});
    const std::size_t n = ctx.n;
    std::optional<RealizedLieAlgebra> a;
    if (payload.has("realization")) {
        if (payload.has("algebra") || payload.has("fields")) {
            payload.fail("give either \"realization\" or \"algebra\" with \"fields\"");
        }
        a = detail::klein_builtin(payload.at("realization"), n);
    } else {
        const auto g = read_algebra(payload.at("algebra"));
        const Node fields_node = payload.at("fields");
        if (fields_node.size() != g.dim()) {
            fields_node.fail("one field per basis element is required");
        }
        std::vector<PolyField> fields;
        for (std::size_t b = 0; b < g.dim(); ++b) {
            fields.push_back(read_field(fields_node.at(b), n));
        }
        if (!validate_realization(g, fields).ok) {
            fields_node.fail("the fields do not realize the algebra");
        }
        a.emplace(g, fields);
    }
    if (a->chart_dim() != n) {
        throw schema_error("/n", "realization lives on a chart of dimension " + std::to_string(a->chart_dim()));
    }
    const int depth_max = static_cast<int>(payload.uint_or("depth_max", 8, 16));
    const int sigma_max = static_cast<int>(payload.uint_or("sigma_max", 3, 8));
    json checks = json::array();
    FiltrationReport rep;
    try {
        rep = isotropy_filtration(*a, std::max(depth_max, 1));
    } catch (const domain_error& e) {
        checks.push_back(check("ghost_cross_validation", false, {{"witness", e.what()}}));
        return checks;
    }
    results["algebra_dim"] = a->dim();
    results["filtration_dims"] = rep.dims;
    results["order"] = rep.order ? json(*rep.order) : json(nullptr);
    results["stabilized"] = rep.stabilized;
    results["ghost_dim"] = rep.ghost.size();
    json ghost = json::array();
    for (const auto& v : rep.ghost) {
        ghost.push_back(vector_json(v));
    }
    results["ghost_basis"] = ghost;
    results["ghost_is_ideal"] = rep.ghost_is_ideal;
    results["ghost_is_kernel"] = rep.ghost_is_kernel;
    results["transitive"] = rep.transitive;
    json ranks = json::array();
    for (int m = 0; m <= sigma_max; ++m) {
        ranks.push_back(sigma_rank(*a, m));
    }
    results["sigma_ranks"] = ranks;

    checks.push_back(check("stabilized", rep.stabilized, {{"depth_max", depth_max}}));
    for (int m = 1; m <= sigma_max; ++m) {
        const auto sc = sigma_homomorphism_check(*a, m);
        json detail = {{"m", m}};
        if (!sc.ok) {
            detail["witness"] = {{"pair", {sc.witness->first, sc.witness->second}}};
        }
        checks.push_back(check("sigma_homomorphism.m" + std::to_string(m), sc.ok, detail));
    }
    if (rep.stabilized) {
        checks.push_back(check("ghost_cross_validation", rep.ghost_is_ideal == rep.ghost_is_kernel));
    }
    const Node expect = payload.has("expect") ? payload.at("expect") : detail::empty_object("/payload/expect");
    expect.require_object({"order", "ghost_dim"});
    if (expect.has("order")) {
        const auto want = expect.at("order").as_uint();
        checks.push_back(check("order", rep.order && static_cast<std::uint64_t>(*rep.order) == want,
                               {{"expected", want}, {"observed", results["order"]}}));
    }
    if (expect.has("ghost_dim")) {
        const auto want = expect.at("ghost_dim").as_uint();
        checks.push_back(check("ghost_dim", rep.ghost.size() == want, {{"expected", want}, {"observed", rep.ghost.size()}}));
    }
    return checks;
}

/// Lie algebra extensions: jet-group truncations or a given algebra with an ideal.
inline json run_extension(const Node& payload, const TaskContext& ctx, json& results)
{
    payload.require_object({"jet_group", "algebra", "ideal", "expect"});
    std::optional<ExtensionData> ext;
    std::optional<JetGroupAlgebra> jg;
    int k = 0;
    int m = 0;
    if (payload.has("jet_group")) {
        if (payload.has("algebra") || payload.has("ideal")) {
            payload.fail("give either \"jet_group\" or \"algebra\" with \"ideal\"");
        }
        const Node j = payload.at("jet_group");
        j.require_object({"k", "m"});
        k = static_cast<int>(j.at("k").as_uint(8));
        m = static_cast<int>(j.at("m").as_uint(8));
        if (k < 2 || m < 1 || m >= k) {
            j.fail("need 1 <= m < k");
        }
        if (vector_fiber_dimension(ctx.n, k) > 200) {
            throw resource_error("jet group algebra too large for the cohomology computation");
        }
        jg = jet_group_algebra(ctx.n, k);
        ext = make_extension(jg->algebra, jet_group_kernel(*jg, m));
    } else {
        const auto g = read_algebra(payload.at("algebra"));
        const Node ideal_node = payload.at("ideal");
        std::vector<Vector> ideal;
        for (std::size_t i = 0; i < ideal_node.size(); ++i) {
            ideal.push_back(read_vector(ideal_node.at(i), g.dim()));
        }
        if (!is_ideal(g, ideal)) {
            ideal_node.fail("not an ideal");
        }
        try {
            ext = make_extension(g, ideal);
        } catch (const domain_error& e) {
            ideal_node.fail(e.what());
        }
    }
    json checks = json::array();
    const bool abelian = kernel_is_abelian(*ext);
    const SplitVerdict verdict = is_split(*ext);
    results["algebra_dim"] = ext->big.dim();
    results["kernel_dim"] = ext->ideal.size();
    results["quotient_dim"] = ext->quotient.dim();
    results["kernel_abelian"] = abelian;
    results["verdict"] = to_string(verdict);
    if (abelian) {
        const auto cocycle = extension_two_cocycle(*ext);
        results["cocycle"] = vector_json(cocycle.cochain);
        checks.push_back(check("cocycle_closed", cocycle.is_cocycle));
        // the class must not depend on the section
        RandomSource rng(detail::derived_seed(ctx.seed, 21));
        Matrix delta(ext->ideal.size(), ext->quotient.dim());
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            for (std::size_t j = 0; j < delta.cols(); ++j) {
                delta(i, j) = rng.rational();
            }
        }
        const auto shifted = extension_two_cocycle(with_shifted_section(*ext, delta));
        checks.push_back(check("class_independent_of_section",
                               cohomologous(ext->quotient, cocycle.module, cocycle.cochain, shifted.cochain),
                               {{"seed", detail::derived_seed(ctx.seed, 21)}}));
    }
    if (jg) {
        json chain = json::array();
        bool all_abelian = true;
        for (int j = 1; j < k; ++j) {
            const auto g = jet_group_algebra(ctx.n, j + 1);
            const auto rep = nilpotency_analysis(restrict_to_subalgebra(g.algebra, jet_group_kernel(g, j)));
            chain.push_back({{"from", j + 1}, {"to", j}, {"lower_central_dims", rep.lower_central_dims},
                             {"abelian", rep.abelian}});
            all_abelian = all_abelian && rep.abelian;
        }
        const auto deep = nilpotency_analysis(restrict_to_subalgebra(jg->algebra, jet_group_kernel(*jg, 1)));
        results["successive_kernels"] = chain;
        results["kernel_to_order_1"] = {{"lower_central_dims", deep.lower_central_dims},
                                        {"nilpotent", deep.nilpotent},
                                        {"abelian", deep.abelian}};
        checks.push_back(check("successive_kernels_abelian", all_abelian));
        checks.push_back(check("kernel_to_order_1_nilpotent", deep.nilpotent));
        results["k"] = k;
        results["m"] = m;
    }
    const Node expect = payload.has("expect") ? payload.at("expect") : detail::empty_object("/payload/expect");
    expect.require_object({"split", "kernel_to_order_1_abelian"});
    if (expect.has("split")) {
        const bool want = expect.at("split").as_bool();
        const bool ok = verdict != SplitVerdict::inapplicable && (verdict == SplitVerdict::split) == want;
        checks.push_back(check("split", ok, {{"expected", want}, {"observed", to_string(verdict)}}));
    }
    if (expect.has("kernel_to_order_1_abelian")) {
        if (!jg) {
            expect.at("kernel_to_order_1_abelian").fail("only meaningful for jet_group payloads");
        }
        const bool want = expect.at("kernel_to_order_1_abelian").as_bool();
        const bool got = results["kernel_to_order_1"]["abelian"].get<bool>();
        checks.push_back(check("kernel_to_order_1_abelian", got == want, {{"expected", want}, {"observed", got}}));
    }
    return checks;
}

// ---------------------------------------------------------------------------
// entry point

inline const std::vector<std::string>& task_names()
{
    static const std::vector<std::string> names = {"identities", "bracket", "forms", "prolongation", "klein", "extension"};
    return names;
}

/// Validates the envelope, dispatches on the task and assembles the report.  Deterministic given the
/// scenario and the options.
inline json run_scenario(const json& scenario, const RunOptions& options = {})
{
    const Node root(scenario, "");
    root.require_object({"schema", "task", "n", "seed", "payload", "name", "note"});
    if (root.at("schema").as_string() != scenario_schema) {
        root.at("schema").fail(std::string("unsupported schema, expected \"") + scenario_schema + "\"");
    }
    const std::string task = root.at("task").as_string();
    TaskContext ctx;
    ctx.n = static_cast<std::size_t>(root.at("n").as_uint(max_chart_dim));
    if (ctx.n == 0) {
        root.at("n").fail("chart dimension must be positive");
    }
    ctx.seed = options.seed ? *options.seed : root.uint_or("seed", 1, UINT64_MAX);
    ctx.options = options;
    const Node payload = root.at("payload");

    json results = json::object();
    json checks;
    if (task == "identities") {
        checks = run_identities(payload, ctx, results);
    } else if (task == "bracket") {
        checks = run_bracket(payload, ctx, results);
    } else if (task == "forms") {
        checks = run_forms(payload, ctx, results);
    } else if (task == "prolongation") {
        checks = run_prolongation(payload, ctx, results);
    } else if (task == "klein") {
        checks = run_klein(payload, ctx, results);
    } else if (task == "extension") {
        checks = run_extension(payload, ctx, results);
    } else {
        root.at("task").fail("unknown task \"" + task + "\"");
    }
    bool pass = true;
    for (const auto& c : checks) {
        pass = pass && c["pass"].get<bool>();
    }
    json overrides = json::object();
    if (options.seed) {
        overrides["seed"] = *options.seed;
    }
    if (options.k_max) {
        overrides["k_max"] = *options.k_max;
    }
    if (options.degree) {
        overrides["degree"] = *options.degree;
    }
    return {{"schema", report_schema},
            {"library_version", library_version},
            {"scenario", scenario},
            {"overrides", overrides},
            {"seed", ctx.seed},
            {"checks", checks},
            {"results", results},
            {"pass", pass}};
}

/// The canonical byte form of a report.
inline std::string serialize(const json& report) { return report.dump(2) + "\n"; }

} // namespace jetcalc::scenario
