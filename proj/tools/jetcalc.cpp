#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "jetcalc/builtins.hpp"
#include "jetcalc/scenario.hpp"

namespace {

using jetcalc::scenario::json;
namespace sc = jetcalc::scenario;

enum Exit : int { ok = 0, check_failed = 1, schema_violation = 2, resource_limit = 3 };

struct Common {
    std::string scenario_path;
    std::string builtin;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool print_json = false;
    bool timing = false;
};

struct Inline {
    std::optional<std::size_t> n;
    std::optional<std::uint64_t> k;
    std::optional<std::uint64_t> r;
    std::optional<std::uint64_t> m;
    std::optional<std::uint64_t> count;
    std::optional<std::uint64_t> k_max;
    std::optional<std::uint64_t> degree;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--scenario", c.scenario_path, "scenario file (JSON)");
    cmd->add_option("--builtin", c.builtin, "built-in scenario name");
    cmd->add_option("--out", c.out, "write the JSON report to this path");
    cmd->add_option("--seed", c.seed, "override the scenario seed");
    cmd->add_flag("--json", c.print_json, "print the JSON report on standard output");
    cmd->add_flag("--timing", c.timing, "add wall-clock timing to the report (breaks byte reproducibility)");
}

json load_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw sc::schema_error("/", "cannot read scenario file '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw sc::schema_error("/", std::string("invalid JSON: ") + e.what());
    }
}

json envelope(const std::string& task, std::size_t n, std::uint64_t seed, json payload)
{
    return {{"schema", sc::scenario_schema}, {"task", task}, {"n", n}, {"seed", seed}, {"payload", std::move(payload)}};
}

/// Scenario from --scenario, --builtin, or the inline flags of the subcommand.
json resolve_scenario(const std::string& task, const Common& c, const Inline& in)
{
    if (!c.scenario_path.empty() && !c.builtin.empty()) {
        throw sc::schema_error("/", "--scenario and --builtin are mutually exclusive");
    }
    json s;
    if (!c.scenario_path.empty()) {
        s = load_file(c.scenario_path);
    } else if (!c.builtin.empty()) {
        if (const auto* b = sc::find_builtin(c.builtin)) {
            s = b->scenario;
        } else if (task == "klein") {
            s = envelope("klein", in.n.value_or(1), 1, {{"realization", c.builtin}});
        } else {
            throw sc::schema_error("/", "unknown builtin '" + c.builtin + "' (see list-builtins)");
        }
        if (task == "klein" && in.n && s["payload"].contains("realization")) {
            s["n"] = *in.n;
        }
    } else if (task == "identities") {
        json p = {{"k", in.k.value_or(2)}};
        if (in.count) {
            p["count"] = *in.count;
        }
        s = envelope(task, in.n.value_or(2), 1, p);
    } else if (task == "forms") {
        json p = {{"k", in.k.value_or(1)}, {"r", in.r.value_or(1)}};
        s = envelope(task, in.n.value_or(2), 1, p);
    } else if (task == "extension") {
        json p = {{"jet_group", {{"k", in.k.value_or(3)}, {"m", in.m.value_or(2)}}}};
        s = envelope(task, in.n.value_or(1), 1, p);
    } else {
        throw sc::schema_error("/", "this subcommand needs --scenario or --builtin");
    }
    if (!s.is_object() || !s.contains("task") || !s["task"].is_string()) {
        throw sc::schema_error("/task", "required field is missing");
    }
    if (s["task"].get<std::string>() != task) {
        throw sc::schema_error("/task", "scenario task '" + s["task"].get<std::string>() + "' does not match the '" +
                                            task + "' subcommand");
    }
    return s;
}

void print_summary(const json& report, std::ostream& os)
{
    const auto& s = report["scenario"];
    os << s["task"].get<std::string>() << " n=" << s["n"] << " seed=" << report["seed"] << "\n";
    for (const auto& c : report["checks"]) {
        os << "  " << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
        if (!c["witness"].is_null()) {
            os << "  witness " << c["witness"].dump();
        }
        os << "\n";
    }
    os << "results " << report["results"].dump() << "\n";
    os << (report["pass"].get<bool>() ? "all checks pass" : "some checks failed") << "\n";
}

int emit(const json& report, const Common& c)
{
    const std::string text = sc::serialize(report);
    if (!c.out.empty()) {
        std::ofstream out(c.out, std::ios::binary);
        if (!out) {
            std::cerr << "jetcalc: cannot write '" << c.out << "'\n";
            return schema_violation;
        }
        out << text;
    }
    if (c.print_json) {
        std::cout << text;
    } else {
        print_summary(report, std::cout);
    }
    return report["pass"].get<bool>() ? ok : check_failed;
}

int run_task(const std::string& task, const Common& c, const Inline& in)
{
    try {
        const json s = resolve_scenario(task, c, in);
        sc::RunOptions opt;
        opt.seed = c.seed;
        opt.k_max = in.k_max;
        opt.degree = in.degree;
        const auto start = std::chrono::steady_clock::now();
        json report = sc::run_scenario(s, opt);
        if (c.timing) {
            const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            report["timing"] = {{"elapsed_ms", ms}};
        }
        return emit(report, c);
    } catch (const sc::schema_error& e) {
        std::cerr << "jetcalc: schema violation at " << e.pointer() << ": " << e.message() << "\n";
        return schema_violation;
    } catch (const jetcalc::resource_error& e) {
        std::cerr << "jetcalc: resource limit: " << e.what() << "\n";
        return resource_limit;
    } catch (const jetcalc::error& e) {
        // the scenario parsed but describes an invalid object (singular metric, degenerate form, ...)
        std::cerr << "jetcalc: schema violation at /payload: " << e.what() << "\n";
        return schema_violation;
    }
}

int list_builtins(const Common& c)
{
    json catalog = json::array();
    for (const auto& b : sc::builtins()) {
        catalog.push_back({{"name", b.name}, {"task", b.task}, {"note", b.note}, {"scenario", b.scenario}});
    }
    const std::string text = catalog.dump(2) + "\n";
    if (!c.out.empty()) {
        std::ofstream(c.out, std::ios::binary) << text;
    }
    if (c.print_json) {
        std::cout << text;
    } else {
        for (const auto& b : sc::builtins()) {
            std::cout << b.name << " [" << b.task << "]\n    " << b.note << "\n";
        }
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact jet calculus: Spencer brackets, jet forms, Lie equations, Klein pairs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sc::library_version);

    Common common;
    Inline in;

    auto* ids = app.add_subcommand("check-identities", "seeded identity suite");
    add_common(ids, common);
    ids->add_option("--n", in.n, "chart dimension");
    ids->add_option("--k", in.k, "jet order");
    ids->add_option("--count", in.count, "instances per check");
    ids->add_option("--degree", in.degree, "coefficient degree");

    auto* br = app.add_subcommand("bracket", "Spencer bracket of two sections");
    add_common(br, common);

    auto* fm = app.add_subcommand("forms", "local exactness probe for (k, r)-forms");
    add_common(fm, common);
    fm->add_option("--n", in.n, "chart dimension");
    fm->add_option("--k", in.k, "jet order");
    fm->add_option("--r", in.r, "form degree");
    fm->add_option("--degree", in.degree, "polynomial degree of the closed forms");

    auto* pr = app.add_subcommand("prolong", "prolongation of a Killing or symplectic system");
    add_common(pr, common);
    pr->add_option("--kmax", in.k_max, "highest order probed");

    auto* kl = app.add_subcommand("klein", "isotropy filtration, order and ghost");
    add_common(kl, common);
    kl->add_option("--n", in.n, "chart dimension (projective realization)");

    auto* ex = app.add_subcommand("extension", "jet-group and Lie algebra extensions");
    add_common(ex, common);
    ex->add_option("--n", in.n, "chart dimension");
    ex->add_option("--k", in.k, "upper order");
    ex->add_option("--m", in.m, "lower order");

    auto* lb = app.add_subcommand("list-builtins", "catalog of built-in scenarios");
    lb->add_option("--out", common.out, "write the catalog to this path");
    lb->add_flag("--json", common.print_json, "print the catalog as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : schema_violation;
    }

    if (*ids) {
        return run_task("identities", common, in);
    }
    if (*br) {
        return run_task("bracket", common, in);
    }
    if (*fm) {
        return run_task("forms", common, in);
    }
    if (*pr) {
        return run_task("prolongation", common, in);
    }
    if (*kl) {
        return run_task("klein", common, in);
    }
    if (*ex) {
        return run_task("extension", common, in);
    }
    return list_builtins(common);
}
