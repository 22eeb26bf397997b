// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "cli.hpp"
#include "hfree/brackets.hpp"
#include "hfree/checker.hpp"
#include "hfree/constructions.hpp"
#include "hfree/gallery.hpp"
#include "hfree/jets.hpp"
#include "hfree/sampling.hpp"
#include "json.hpp"
#include "support.hpp"

namespace {

using namespace hfree;

struct Outcome {
    bool passed = true;
    std::string detail;

    void fail(const std::string& why) {
        if (passed) detail = why;
        passed = false;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<std::string> kImmersionFixtures = {
    "planar-hamiltonian",  "planar-finite-type",  "planar-intrinsically-exact",
    "integrable-torus-1",  "integrable-torus-2",  "integrable-torus-3",
    "riemann-poisson-e3",  "contact-1",           "contact-2"};

Outcome gallery_positivity() {
    Outcome o;
    std::size_t formulas = 0;
    for (const auto& name : kImmersionFixtures) {
        const Fixture fx = fixture(name);
        const Report r = run_gallery(fx, RandomPlan{10000, 1});
        if (r.verdict != Verdict::Pass) o.fail(name + ": " + std::string(to_string(r.verdict)));
        for (const auto& e : r.expected) {
            ++formulas;
            if (!e.passed || e.max_error > 1e-10) o.fail(name + " " + e.label + " error " + num(e.max_error));
        }
    }
    if (o.passed) o.detail = std::to_string(kImmersionFixtures.size()) + " fixtures, " + std::to_string(formulas) +
                             " closed forms at 10000 points";
    return o;
}

Outcome freeness_by_composition() {
    Outcome o;
    double slowest = 0.0;
    for (const auto& name : list_fixtures()) {
        const Fixture fx = fixture(name);
        if (!fx.immersion) continue;
        const SmoothMap composed = compose(monomial_free_map(fx.frame->size()), *fx.immersion);
        Manifest m{.chart = fx.chart, .frame = *fx.frame, .map = composed, .outer = {}, .structure = {}, .functions = {}, .mode = CheckMode::Free,
                   .plan = RandomPlan{10000, 2}};
        const auto t0 = std::chrono::steady_clock::now();
        const Report r = run_check(m);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slowest = std::max(slowest, secs);
        if (r.verdict != Verdict::Pass) o.fail(name + " not free (worst sigma " + num(r.worst ? r.worst->criterion : 0) + ")");
        if (secs > 60.0) o.fail(name + " took " + num(secs) + " s");
    }
    if (o.passed) o.detail = "slowest fixture " + num(slowest) + " s";
    return o;
}

SmoothMap random_quadratic(test::Rng& rng, const Chart& c) {
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < c.dim(); ++i) {
        Expr e(rng.uniform(-1, 1));
        for (std::size_t a = 0; a < c.dim(); ++a) {
            const Expr xa = Expr::coord(c.coords()[a]);
            e = e + Expr(rng.uniform(-1, 1)) * xa;
            for (std::size_t b = a; b < c.dim(); ++b) e = e + Expr(rng.uniform(-1, 1)) * xa * Expr::coord(c.coords()[b]);
        }
        comps.push_back(simplify(e));
    }
    return SmoothMap(c, std::move(comps));
}

struct IdentityCase {
    std::string name;
    CompositionProbe probe;
    Chart chart;
};

std::vector<IdentityCase> identity_cases() {
    std::vector<IdentityCase> cases;
    for (const auto& name : {"planar-hamiltonian", "planar-finite-type", "planar-intrinsically-exact"}) {
        const Fixture fx = fixture(name);
        cases.push_back({name, CompositionProbe(*fx.frame, *fx.immersion, monomial_free_map(1)), fx.chart});
    }
    test::Rng rng(31);
    for (std::size_t k = 2; k <= 3; ++k) {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < k; ++i) names.push_back("u" + std::to_string(i + 1));
        const Chart c = Chart::euclidean(names);
        for (int t = 0; t < 3; ++t) {
            cases.push_back({"quadratic k=" + std::to_string(k) + " #" + std::to_string(t),
                             CompositionProbe(standard_frame(c), random_quadratic(rng, c), monomial_free_map(k)), c});
        }
    }
    return cases;
}

Outcome det_identity() {
    Outcome o;
    double worst = 0.0;
    for (const auto& ic : identity_cases()) {
        for (const auto& p : sample_points(ic.chart, RandomPlan{100, 3})) {
            const IdentityResidual r = ic.probe.identity(p, 1e-9);
            worst = std::max(worst, r.rel_residual);
            if (!r.passed) o.fail(ic.name + " residual " + num(r.rel_residual));
        }
    }
    if (o.passed) o.detail = "max relative residual " + num(worst);
    return o;
}

Outcome representation_law() {
    Outcome o;
    test::Rng rng(37);
    double worst_det = 0.0, worst_hom = 0.0;
    for (Eigen::Index k = 1; k <= 4; ++k) {
        for (int t = 0; t < 100; ++t) {
            const Eigen::MatrixXd a = rng.matrix(k, k), b = rng.matrix(k, k);
            const double lhs = test::permutation_det(sym_square(a));
            const double rhs = std::pow(test::permutation_det(a), static_cast<double>(k + 1));
            worst_det = std::max(worst_det, test::rel_diff(lhs, rhs));
            const Eigen::MatrixXd prod = sym_square(a * b), split = sym_square(a) * sym_square(b);
            for (Eigen::Index i = 0; i < prod.rows(); ++i) {
                for (Eigen::Index j = 0; j < prod.cols(); ++j) worst_hom = std::max(worst_hom, test::rel_diff(prod(i, j), split(i, j)));
            }
        }
    }
    if (worst_det > 1e-10) o.fail("det law error " + num(worst_det));
    if (worst_hom > 1e-10) o.fail("homomorphism error " + num(worst_hom));
    if (o.passed) o.detail = "det law " + num(worst_det) + ", homomorphism " + num(worst_hom);
    return o;
}

Outcome block_law() {
    Outcome o;
    double worst = 0.0;
    for (const auto& ic : identity_cases()) {
        for (const auto& p : sample_points(ic.chart, RandomPlan{100, 3})) {
            const double r = ic.probe.decompose(p).block_law_residual();
            worst = std::max(worst, r);
            if (!(r <= 1e-9)) o.fail(ic.name + " residual " + num(r));
        }
    }
    if (o.passed) o.detail = "max entrywise residual " + num(worst);
    return o;
}

Outcome calculus_oracle() {
    Outcome o;
    test::Rng rng(41);
    const std::vector<std::string> vars{"x", "y", "z"};
    test::ExprGen gen(rng, vars);
    auto bind = [&](const std::vector<double>& p) {
        Binding b;
        for (std::size_t i = 0; i < vars.size(); ++i) b[vars[i]] = p[i];
        return b;
    };
    constexpr double h = 1e-5;
    double worst_fd = 0.0, worst_mixed = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const Expr e = gen(4);
        const std::string& v = vars[static_cast<std::size_t>(rng.integer(0, 2))];
        Binding b = bind(rng.point(3, -1.0, 1.0));
        const double d = eval(diff(e, v), b);
        const double x0 = b[v];
        b[v] = x0 + h;
        const double up = eval(e, b);
        b[v] = x0 - h;
        const double down = eval(e, b);
        const double err = std::abs(d - (up - down) / (2 * h)) / std::max(1.0, std::abs(d));
        worst_fd = std::max(worst_fd, err);

        b[v] = x0;
        const double xy = eval(diff(diff(e, "x"), "y"), b), yx = eval(diff(diff(e, "y"), "x"), b);
        worst_mixed = std::max(worst_mixed, std::abs(xy - yx) / std::max(1.0, std::abs(xy)));
    }
    if (worst_fd > 1e-6) o.fail("finite-difference error " + num(worst_fd));
    if (worst_mixed > 1e-12) o.fail("mixed partial mismatch " + num(worst_mixed));
    if (o.passed) o.detail = "fd " + num(worst_fd) + ", mixed " + num(worst_mixed);
    return o;
}

Expr random_poly(test::Rng& rng, const Chart& c) {
    Expr e(rng.uniform(-1, 1));
    for (std::size_t a = 0; a < c.dim(); ++a) {
        const Expr xa = Expr::coord(c.coords()[a]);
        e = e + Expr(rng.uniform(-1, 1)) * xa;
        for (std::size_t b = a; b < c.dim(); ++b) e = e + Expr(rng.uniform(-1, 1)) * xa * Expr::coord(c.coords()[b]);
    }
    return simplify(e);
}

Expr random_trig(test::Rng& rng, const Chart& c) {
    Expr e(rng.uniform(-1, 1));
    for (std::size_t a = 0; a < c.dim(); ++a) {
        const Expr t = Expr::coord(c.coords()[a]);
        e = e + Expr(rng.uniform(-1, 1)) * sin(t) + Expr(rng.uniform(-1, 1)) * cos(Expr(2.0) * t) * cos(t);
    }
    return simplify(e);
}

Outcome bracket_laws() {
    Outcome o;
    test::Rng rng(43);
    std::vector<std::pair<std::string, PoissonStructure>> structures;
    for (std::size_t n = 1; n <= 3; ++n) structures.emplace_back("canonical n=" + std::to_string(n), SymplecticChart::cotangent_torus(n));
    const Chart t3({"theta1", "theta2", "theta3"}, {true, true, true}, std::vector<Interval>(3, {0.0, kTwoPi}));
    structures.emplace_back("constant-B torus", RPStructure::from_gradients(t3, {{Expr(0.0), Expr(0.0), Expr(1.0)}}));
    structures.emplace_back("e3", *fixture("riemann-poisson-e3").structure);

    double worst_leibniz = 0.0, worst_jacobi = 0.0;
    for (const auto& [name, s] : structures) {
        const Chart& c = structure_chart(s);
        const bool periodic = c.periodic().front();
        const Expr f = periodic ? random_trig(rng, c) : random_poly(rng, c);
        const Expr g = periodic ? random_trig(rng, c) : random_poly(rng, c);
        const Expr h = periodic ? random_trig(rng, c) : random_poly(rng, c);
        const Expr fg = bracket(s, f, g), gf = bracket(s, g, f);
        const Expr leib_l = bracket(s, f, simplify(g * h));
        const Expr leib_r = g * bracket(s, f, h) + h * bracket(s, f, g);
        for (const auto& p : sample_points(c, RandomPlan{100, 5})) {
            const Binding b = c.bind(p);
            if (eval(fg, b) != -eval(gf, b)) o.fail(name + ": antisymmetry not exact");
            worst_leibniz = std::max(worst_leibniz, test::rel_diff(eval(leib_l, b), eval(leib_r, b)));
            worst_jacobi = std::max(worst_jacobi, jacobi_residual(s, f, g, h, p));
        }
    }
    if (worst_leibniz > 1e-10) o.fail("Leibniz error " + num(worst_leibniz));
    if (worst_jacobi > 1e-8) o.fail("Jacobi residual " + num(worst_jacobi));

    for (std::size_t n = 2; n <= 3; ++n) {
        const SymplecticChart s = SymplecticChart::cotangent_torus(n);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b) continue;
                const Expr ia = exp(Expr::coord(s.momentum(a))) * cos(Expr::coord(s.angle(a)));
                const Expr ib = exp(Expr::coord(s.momentum(b))) * cos(Expr::coord(s.angle(b)));
                if (!canonical_bracket(s, ia, ib).is_const(0.0)) o.fail("integrals not in involution");
            }
        }
    }
    if (o.passed) o.detail = "Leibniz " + num(worst_leibniz) + ", Jacobi " + num(worst_jacobi);
    return o;
}

Outcome contact_structure() {
    Outcome o;
    for (std::size_t n = 1; n <= 4; ++n) {
        const Frame frame = contact_frame(n);
        const auto theta = contact_form(n);
        for (std::size_t a = 0; a < frame.size(); ++a) {
            if (simplify(contract(theta, frame[a])) != Expr(0.0)) o.fail("theta(xi) nonzero at n=" + std::to_string(n));
        }
        const SmoothMap pi = contact_projection(n);
        for (const auto& p : sample_points(frame.chart(), RandomPlan{200, 7})) {
            if (d1_matrix(frame, pi, p).entries != Eigen::MatrixXd::Identity(2 * n, 2 * n)) o.fail("D1(pi) != I");
        }
    }
    std::size_t points = 0;
    for (std::size_t n = 1; n <= 2; ++n) {
        const Frame frame = contact_frame(n);
        const JetEvaluator d2(frame, compose(monomial_free_map(2 * n), contact_projection(n)), 2);
        for (const auto& p : sample_points(frame.chart(), RandomPlan{10000, 8})) {
            ++points;
            if (d2(p).entries.determinant() == 0.0 || !rank_check(d2(p)).full_rank) o.fail("det D2 vanishes");
        }
    }
    if (o.passed) o.detail = "n<=4 annihilated, det D2 nonzero at " + std::to_string(points) + " points";
    return o;
}

struct CliRun {
    int code;
    std::string out;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hfree");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str()};
}

std::string without_wall_time(const std::string& s) {
    auto j = nlohmann::ordered_json::parse(s);
    j.erase("wall_time_ms");
    return j.dump(2);
}

Outcome determinism() {
    Outcome o;
    for (const auto& name : list_fixtures()) {
        const std::vector<std::string> args{"--json", "gallery", "run", name, "--samples", "2000", "--seed", "17"};
        ::setenv("HFREE_THREADS", "0", 1);
        const CliRun serial_a = cli(args), serial_b = cli(args);
        ::setenv("HFREE_THREADS", "4", 1);
        const CliRun par_a = cli(args), par_b = cli(args);
        ::unsetenv("HFREE_THREADS");
        const std::string ref = without_wall_time(serial_a.out);
        for (const auto* r : {&serial_b, &par_a, &par_b}) {
            if (r->code != serial_a.code || without_wall_time(r->out) != ref) o.fail(name + " reports differ");
        }
    }
    if (o.passed) o.detail = std::to_string(list_fixtures().size()) + " fixtures, serial and 4 workers";
    return o;
}

Outcome below_critical_guard() {
    Outcome o;
    const Fixture fx = fixture("planar-hamiltonian");
    Manifest m{.chart = fx.chart, .frame = *fx.frame, .map = *fx.immersion, .outer = {}, .structure = {}, .functions = {}, .mode = CheckMode::Free,
               .plan = RandomPlan{100, 0}};
    const Report r = run_check(m);
    if (r.verdict != Verdict::BelowCriticalDimension) o.fail("verdict " + std::string(to_string(r.verdict)));
    if (r.points_checked != 0 || r.worst) o.fail("points were evaluated");
    if (exit_code(r.verdict) != 3) o.fail("exit code " + std::to_string(exit_code(r.verdict)));
    const CliRun run = cli({"--quiet", "check", std::string(HFREE_MANIFEST_DIR) + "/below-critical.hfree"});
    if (run.code != 3) o.fail("cli exit " + std::to_string(run.code));
    if (o.passed) o.detail = "verdict below-critical-dimension, exit 3";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"gallery positivity", gallery_positivity},
        {"freeness by composition", freeness_by_composition},
        {"determinant identity", det_identity},
        {"representation law", representation_law},
        {"block law", block_law},
        {"calculus oracle", calculus_oracle},
        {"bracket laws", bracket_laws},
        {"contact structure", contact_structure},
        {"determinism", determinism},
        {"below-critical guard", below_critical_guard},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += !o.passed;
        std::cout << (o.passed ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
