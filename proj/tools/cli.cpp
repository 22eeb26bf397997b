#include "cli.hpp"

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfree/checker.hpp"
#include "hfree/error.hpp"
#include "hfree/gallery.hpp"
#include "hfree/manifest.hpp"

namespace hfree::cli {
namespace {

constexpr int kUsageError = 2;

std::string shortest(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

struct Output {
    bool json = false;
    bool quiet = false;
};

int emit(const Report& report, const Output& o, std::ostream& out) {
    if (o.quiet) {
        out << to_string(report.verdict) << '\n';
    } else if (o.json) {
        out << report_json(report);
    } else {
        out << report_text(report);
    }
    return exit_code(report.verdict);
}

Binding parse_binding(const std::vector<std::string>& items) {
    Binding b;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw Error("--at expects name=value, got '" + item + "'");
        const std::string name = item.substr(0, eq);
        const std::string_view text = std::string_view(item).substr(eq + 1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || end != text.data() + text.size()) {
            throw Error("--at: '" + std::string(text) + "' is not a number");
        }
        if (!b.emplace(name, v).second) throw Error("--at: '" + name + "' given twice");
    }
    return b;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certify partial immersions and partially free maps along distributions", "hfree"};
    app.fallthrough();
    app.require_subcommand(1);

    Output o;
    app.add_flag("--json", o.json, "Print the report as JSON");
    app.add_flag("--quiet", o.quiet, "Print the verdict only");

    std::string manifest_path;
    auto* check = app.add_subcommand("check", "Run the check described by a manifest");
    check->add_option("manifest", manifest_path, "Manifest file")->required();

    std::string identity_path;
    auto* identity = app.add_subcommand("verify-identity", "Verify the determinant identity for a manifest");
    identity->add_option("manifest", identity_path, "Manifest file")->required();

    auto* gallery = app.add_subcommand("gallery", "Worked examples");
    gallery->require_subcommand(1);
    gallery->add_subcommand("list", "List fixture names");
    auto* run = gallery->add_subcommand("run", "Run every assertion of a fixture");
    std::string fixture_name;
    RandomPlan plan;
    double tolerance = 1e-9;
    run->add_option("name", fixture_name, "Fixture name")->required();
    run->add_option("--samples", plan.samples, "Number of random points")->check(CLI::PositiveNumber);
    run->add_option("--seed", plan.seed, "Sampler seed");
    run->add_option("--tol", tolerance, "Rank tolerance")->check(CLI::PositiveNumber);

    auto* ev = app.add_subcommand("eval", "Evaluate an expression");
    std::string expr_src;
    std::vector<std::string> at;
    ev->add_option("expr", expr_src, "Expression")->required();
    ev->add_option("--at", at, "Coordinate values, name=value,...")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return kUsageError;
    }

    try {
        if (check->parsed()) return emit(run_check(load_manifest(manifest_path)), o, out);
        if (identity->parsed()) {
            Manifest mf = load_manifest(identity_path);
            if (mf.mode != CheckMode::Identity && !mf.map) throw Error("verify-identity needs a [map] section");
            mf.mode = CheckMode::Identity;
            return emit(run_check(mf), o, out);
        }
        if (gallery->got_subcommand("list")) {
            for (const auto& name : list_fixtures()) out << name << '\n';
            return 0;
        }
        if (run->parsed()) {
            const Fixture fx = fixture(fixture_name);
            Report r = run_gallery(fx, plan, tolerance);
            r.mode = "gallery " + fx.name;
            return emit(r, o, out);
        }
        if (ev->parsed()) {
            const Expr e = parse(expr_src);
            try {
                out << shortest(eval(e, parse_binding(at))) << '\n';
            } catch (const EvalError& x) {
                err << "error: " << x.what() << '\n';
                return 1;
            }
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    err << app.help();
    return kUsageError;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace hfree::cli
