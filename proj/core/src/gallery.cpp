#include "hfree/gallery.hpp"

#include <functional>
#include <map>

#include "hfree/constructions.hpp"
#include "hfree/error.hpp"

namespace hfree {
namespace {

Expr E(std::string_view src) { return parse(src); }

Chart planar_chart() { return Chart::euclidean({"x", "y"}); }

Fixture immersion_fixture(std::string name, const Frame& frame, SmoothMap immersion) {
    Fixture fx{std::move(name), frame.chart(), frame, immersion, std::nullopt, {}, std::nullopt, {}, {}};
    fx.free_map = compose(monomial_free_map(frame.size()), immersion);
    return fx;
}

Fixture planar_hamiltonian() {
    const Chart c = planar_chart();
    const VectorField xi(c, {E("2*y"), E("1 - y^2")});
    Fixture fx = immersion_fixture("planar-hamiltonian", Frame(c, {xi}), SmoothMap(c, {E("y*exp(x)")}));
    fx.expected.push_back({"L_xi g", 0, E("y*exp(x)"), E("(1 + y^2)*exp(x)"), 1e-10, true});
    fx.expected.push_back({"L_xi f (first integral)", 0, E("(1 - y^2)*exp(x)"), Expr(0.0), 1e-12, false});
    fx.notes.push_back("H_xi = ker df with f = (1-y^2)exp(x): Hamiltonian line field; separatrices y = +-1");
    return fx;
}

Fixture planar_finite_type() {
    const Chart c = planar_chart();
    const VectorField eta(c, {E("3*y - 1"), E("1 - y^2")});
    Fixture fx = immersion_fixture("planar-finite-type", Frame(c, {eta}), SmoothMap(c, {E("y*exp(x)")}));
    fx.expected.push_back({"L_eta g", 0, E("y*exp(x)"), E("(2*y^2 - y + 1)*exp(x)"), 1e-10, true});
    fx.expected.push_back(
        {"L_eta f' (first integral)", 0, E("(1 - y)*(1 + y)^2*exp(x)"), Expr(0.0), 1e-12, false});
    fx.notes.push_back("f' = (1-y)(1+y)^2 exp(x) has vanishing gradient on y = -1: not Hamiltonian, finite type");
    return fx;
}

Fixture planar_intrinsically_exact() {
    const Chart c = planar_chart();
    const VectorField xi(c, {E("y*(1 - y^2)"), E("1 - 3*y^2")});
    const Expr f = E("y*(1 - y^2)*exp(x)");
    Fixture fx = immersion_fixture("planar-intrinsically-exact", Frame(c, {xi}), SmoothMap(c, {f}));
    fx.expected.push_back({"L_xi f = exp(x)*|xi|^2", 0, f, simplify(E("exp(x)") * flat_norm_sq(xi)), 1e-10, true});
    fx.notes.push_back(
        "xi_flat = exp(-x) d(y(1-y^2)exp(x)), so L_xi f = |xi|^2 / lambda carries a factor exp(x); "
        "the closed form without exp(x) is positive but is not the Lie derivative");
    return fx;
}

Fixture integrable_torus(std::size_t n) {
    const SymplecticChart s = SymplecticChart::cotangent_torus(n);
    std::vector<VectorField> fields;
    std::vector<Expr> integrals;
    std::vector<Expr> immersion;
    for (std::size_t a = 0; a < n; ++a) {
        const Expr p = Expr::coord(s.momentum(a));
        const Expr phi = Expr::coord(s.angle(a));
        integrals.push_back(exp(p) * cos(phi));
        immersion.push_back(exp(p) * sin(phi));
        fields.push_back(hamiltonian_field(s, integrals.back()));
    }
    Fixture fx = immersion_fixture("integrable-torus-" + std::to_string(n), Frame(s.chart(), fields),
                                   SmoothMap(s.chart(), immersion));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const std::string label = "L_xi" + std::to_string(a + 1) + " g" + std::to_string(b + 1);
            const Expr value = a == b ? exp(Expr(2.0) * Expr::coord(s.momentum(a))) : Expr(0.0);
            fx.expected.push_back({label, a, immersion[b], value, 1e-10, a == b});
        }
    }
    fx.structure = s;
    fx.law_functions = {integrals.front(), immersion.back(),
                        simplify(pow(Expr::coord(s.momentum(0)), 2) * sin(Expr::coord(s.angle(n - 1))))};
    fx.notes.push_back("X_h = (dh/dp) d_phi - (dh/dphi) d_p, so X_{I_a} = exp(p_a)(cos phi_a, sin phi_a) and "
                       "L_{X_{I_a}} g_a = exp(2 p_a)");
    return fx;
}

Fixture riemann_poisson_e3() {
    const Chart c = Chart::euclidean({"x", "y", "z"});
    const RPStructure r(c, {E("(1 - y^2)*exp(x)")});
    const Expr lambda = E("1 + x^2");
    const Expr h = simplify(lambda * Expr::coord("z") + E("sin(x*y)"));
    constexpr int kSign = -1;
    const VectorField xi = rp_hamiltonian_field(r, h, kSign);
    Fixture fx = immersion_fixture("riemann-poisson-e3", Frame(c, {xi}), SmoothMap(c, {E("y*exp(x)")}));
    fx.expected.push_back(
        {"L_xi_h f = (1+y^2) lambda exp(2x)", 0, E("y*exp(x)"), E("(1 + y^2)*(1 + x^2)*exp(2*x)"), 1e-10, true});
    fx.structure = r;
    fx.law_functions = {E("x*y + z"), E("y^2 - x*z"), E("x + y*z")};
    fx.notes.push_back("H = {(1-y^2)exp(x)}, h = lambda z + mu with lambda = 1 + x^2, mu = sin(x y)");
    fx.notes.push_back("bracket is det(grad H; grad f; grad g); {h, f}_H = -(1+y^2) lambda exp(2x), so xi_h "
                       "uses sign -1 to make L_xi_h f positive");
    fx.notes.push_back("xi_h is derived from the bracket cofactors, not from the printed coordinate formula");
    return fx;
}

Fixture novikov_t3() {
    std::vector<std::string> names{"theta1", "theta2", "theta3"};
    const Chart c(names, {true, true, true}, std::vector<Interval>(3, {0.0, kTwoPi}));
    const RPStructure r = RPStructure::from_gradients(c, {{Expr(0.0), Expr(0.0), Expr(1.0)}});
    Fixture fx{"novikov-t3", c, std::nullopt, std::nullopt, std::nullopt, {}, r, {}, {}};
    fx.law_functions = {E("sin(theta1)*cos(theta2)"), E("cos(theta3) + sin(theta1)"),
                        E("sin(theta2)*sin(theta3)")};
    fx.notes.push_back("constant 1-form B = (0, 0, 1) stored as the gradient of the multivalued B_i theta^i");
    fx.notes.push_back("bracket laws only; no immersion is asserted for this structure");
    return fx;
}

Fixture contact(std::size_t n) {
    Fixture fx = immersion_fixture("contact-" + std::to_string(n), contact_frame(n), contact_projection(n));
    const std::size_t k = 2 * n;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            fx.expected.push_back({"L_xi" + std::to_string(a + 1) + " pi" + std::to_string(b + 1), a,
                                   fx.immersion->components()[b], Expr(a == b ? 1.0 : 0.0), 0.0, false});
        }
    }
    fx.notes.push_back("frame xi_i = d_xi - p_i d_t, xi_{n+i} = d_{p_i} spans ker(dt + p_a dx^a)");
    return fx;
}

const std::map<std::string, std::function<Fixture()>, std::less<>>& registry() {
    static const std::map<std::string, std::function<Fixture()>, std::less<>> r{
        {"planar-hamiltonian", planar_hamiltonian},
        {"planar-finite-type", planar_finite_type},
        {"planar-intrinsically-exact", planar_intrinsically_exact},
        {"integrable-torus-1", [] { return integrable_torus(1); }},
        {"integrable-torus-2", [] { return integrable_torus(2); }},
        {"integrable-torus-3", [] { return integrable_torus(3); }},
        {"riemann-poisson-e3", riemann_poisson_e3},
        {"novikov-t3", novikov_t3},
        {"contact-1", [] { return contact(1); }},
        {"contact-2", [] { return contact(2); }},
    };
    return r;
}

}  // namespace

Fixture fixture(std::string_view name) {
    const auto& r = registry();
    auto it = r.find(name);
    if (it == r.end()) throw Error("unknown fixture '" + std::string(name) + "'");
    return it->second();
}

std::vector<std::string> list_fixtures() {
    return {"planar-hamiltonian", "planar-finite-type", "planar-intrinsically-exact",
            "integrable-torus-1", "integrable-torus-2", "integrable-torus-3",
            "riemann-poisson-e3", "novikov-t3",         "contact-1",
            "contact-2"};
}

}  // namespace hfree
