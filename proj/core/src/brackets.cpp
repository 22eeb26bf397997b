#include "hfree/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "hfree/error.hpp"

namespace hfree {

SymplecticChart::SymplecticChart(Chart chart, std::size_t n) : chart_(std::move(chart)), n_(n) {
    if (n_ == 0 || chart_.dim() != 2 * n_) {
        throw DimensionError("symplectic chart must have dimension 2n with n >= 1");
    }
}

SymplecticChart SymplecticChart::cotangent_torus(std::size_t n, Interval momentum) {
    std::vector<std::string> names;
    std::vector<bool> periodic;
    std::vector<Interval> box;
    for (std::size_t a = 0; a < n; ++a) {
        names.push_back("phi" + std::to_string(a + 1));
        periodic.push_back(true);
        box.push_back({0.0, kTwoPi});
    }
    for (std::size_t a = 0; a < n; ++a) {
        names.push_back("p" + std::to_string(a + 1));
        periodic.push_back(false);
        box.push_back(momentum);
    }
    return SymplecticChart(Chart(std::move(names), std::move(periodic), std::move(box)), n);
}

Expr canonical_bracket(const SymplecticChart& s, const Expr& f, const Expr& g) {
    s.chart().require_vars(f, "bracket argument");
    s.chart().require_vars(g, "bracket argument");
    Expr sum(0.0);
    for (std::size_t a = 0; a < s.n(); ++a) {
        const auto& phi = s.angle(a);
        const auto& p = s.momentum(a);
        sum = sum + (diff(f, p) * diff(g, phi) - diff(f, phi) * diff(g, p));
    }
    return simplify(sum);
}

VectorField hamiltonian_field(const SymplecticChart& s, const Expr& h) {
    s.chart().require_vars(h, "hamiltonian");
    std::vector<Expr> comps(s.chart().dim(), Expr(0.0));
    for (std::size_t a = 0; a < s.n(); ++a) {
        comps[a] = diff(h, s.momentum(a));
        comps[s.n() + a] = simplify(-diff(h, s.angle(a)));
    }
    return VectorField(s.chart(), std::move(comps));
}

// ---------------------------------------------------------------------------
// Riemann-Poisson
// ---------------------------------------------------------------------------

namespace {

std::vector<Expr> gradient(const Chart& chart, const Expr& f) {
    chart.require_vars(f, "function");
    std::vector<Expr> g;
    g.reserve(chart.dim());
    for (const auto& c : chart.coords()) g.push_back(diff(f, c));
    return g;
}

class DeterminantExpander {
public:
    explicit DeterminantExpander(const std::vector<std::vector<Expr>>& rows) : rows_(rows) {}

    Expr minor(std::size_t row, std::uint32_t columns) {
        if (row == rows_.size()) return Expr(1.0);
        if (auto it = memo_.find(columns); it != memo_.end()) return it->second;
        Expr sum(0.0);
        int position = 0;
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (!(columns & (1U << j))) continue;
            const Expr& entry = rows_[row][j];
            if (!entry.is_const(0.0)) {
                const Expr sub = minor(row + 1, columns & ~(1U << j));
                if (!sub.is_const(0.0)) {
                    const Expr term = entry * sub;
                    sum = position % 2 == 0 ? sum + term : sum - term;
                }
            }
            ++position;
        }
        Expr result = simplify(sum);
        memo_.emplace(columns, result);
        return result;
    }

private:
    const std::vector<std::vector<Expr>>& rows_;
    std::unordered_map<std::uint32_t, Expr> memo_;
};

}  // namespace

Expr symbolic_determinant(const std::vector<std::vector<Expr>>& rows) {
    const std::size_t m = rows.size();
    if (m > 20) throw DimensionError("symbolic_determinant: matrix too large");
    for (const auto& r : rows) {
        if (r.size() != m) throw DimensionError("symbolic_determinant: matrix must be square");
    }
    std::vector<std::vector<Expr>> simplified;
    simplified.reserve(m);
    for (const auto& r : rows) {
        std::vector<Expr> s;
        for (const auto& e : r) s.push_back(simplify(e));
        simplified.push_back(std::move(s));
    }
    DeterminantExpander expander(simplified);
    return expander.minor(0, m == 0 ? 0U : (1U << m) - 1U);
}

RPStructure::RPStructure(Chart chart, std::vector<std::vector<Expr>> gradients, int)
    : chart_(std::move(chart)), gradients_(std::move(gradients)) {
    if (chart_.dim() < 3) throw DimensionError("Riemann-Poisson structure needs m >= 3");
    if (gradients_.size() != chart_.dim() - 2) {
        throw DimensionError("Riemann-Poisson structure needs exactly m - 2 functions");
    }
    for (const auto& g : gradients_) {
        if (g.size() != chart_.dim()) throw DimensionError("gradient length must equal chart dimension");
        for (const auto& e : g) chart_.require_vars(e, "gradient component");
    }
}

RPStructure::RPStructure(Chart chart, const std::vector<Expr>& functions)
    : RPStructure(chart,
                  [&] {
                      std::vector<std::vector<Expr>> grads;
                      for (const auto& h : functions) grads.push_back(gradient(chart, h));
                      return grads;
                  }(),
                  0) {}

RPStructure RPStructure::from_gradients(Chart chart, std::vector<std::vector<Expr>> gradients) {
    return RPStructure(std::move(chart), std::move(gradients), 0);
}

Expr rp_bracket(const RPStructure& r, const Expr& f, const Expr& g) {
    auto rows = r.gradients();
    rows.push_back(gradient(r.chart(), f));
    rows.push_back(gradient(r.chart(), g));
    return symbolic_determinant(rows);
}

VectorField rp_hamiltonian_field(const RPStructure& r, const Expr& h, int sign) {
    if (sign != 1 && sign != -1) throw Error("rp_hamiltonian_field: sign must be +1 or -1");
    const std::size_t m = r.chart().dim();
    auto rows = r.gradients();
    rows.push_back(gradient(r.chart(), h));
    rows.emplace_back(m, Expr(0.0));
    std::vector<Expr> comps;
    comps.reserve(m);
    // Cofactor of the last-row entry j: the determinant with e_j as last row.
    for (std::size_t j = 0; j < m; ++j) {
        std::fill(rows.back().begin(), rows.back().end(), Expr(0.0));
        rows.back()[j] = Expr(1.0);
        const Expr cof = symbolic_determinant(rows);
        comps.push_back(sign == 1 ? cof : simplify(-cof));
    }
    return VectorField(r.chart(), std::move(comps));
}

// ---------------------------------------------------------------------------
// Contact
// ---------------------------------------------------------------------------

namespace {

Chart contact_chart(std::size_t n, Interval box) {
    if (n == 0) throw DimensionError("contact structure needs n >= 1");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i + 1));
    names.emplace_back("t");
    return Chart::euclidean(std::move(names), box);
}

}  // namespace

Frame contact_frame(std::size_t n, Interval box) {
    const Chart chart = contact_chart(n, box);
    const std::size_t m = 2 * n + 1;
    std::vector<VectorField> vectors;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Expr> c(m, Expr(0.0));
        c[i] = Expr(1.0);
        c[2 * n] = simplify(-Expr::coord(chart.coords()[n + i]));
        vectors.emplace_back(chart, std::move(c));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Expr> c(m, Expr(0.0));
        c[n + i] = Expr(1.0);
        vectors.emplace_back(chart, std::move(c));
    }
    return Frame(chart, std::move(vectors));
}

std::vector<Expr> contact_form(std::size_t n) {
    std::vector<Expr> theta(2 * n + 1, Expr(0.0));
    for (std::size_t i = 0; i < n; ++i) theta[i] = Expr::coord("p" + std::to_string(i + 1));
    theta[2 * n] = Expr(1.0);
    return theta;
}

Expr contract(std::span<const Expr> form, const VectorField& xi) {
    if (form.size() != xi.chart().dim()) throw DimensionError("contract: form and field sizes differ");
    Expr sum(0.0);
    for (std::size_t i = 0; i < form.size(); ++i) sum = sum + form[i] * xi[i];
    return simplify(sum);
}

SmoothMap contact_projection(std::size_t n, Interval box) {
    const Chart chart = contact_chart(n, box);
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < 2 * n; ++i) comps.push_back(Expr::coord(chart.coords()[i]));
    return SmoothMap(chart, std::move(comps));
}

// ---------------------------------------------------------------------------
// Generic structure access
// ---------------------------------------------------------------------------

const Chart& structure_chart(const PoissonStructure& s) {
    return std::visit([](const auto& v) -> const Chart& { return v.chart(); }, s);
}

Expr bracket(const PoissonStructure& s, const Expr& f, const Expr& g) {
    if (const auto* sym = std::get_if<SymplecticChart>(&s)) return canonical_bracket(*sym, f, g);
    return rp_bracket(std::get<RPStructure>(s), f, g);
}

Expr jacobi_expr(const PoissonStructure& s, const Expr& f, const Expr& g, const Expr& h) {
    const Expr a = bracket(s, f, bracket(s, g, h));
    const Expr b = bracket(s, g, bracket(s, h, f));
    const Expr c = bracket(s, h, bracket(s, f, g));
    return simplify(a + b + c);
}

double jacobi_residual(const PoissonStructure& s, const Expr& f, const Expr& g, const Expr& h,
                       std::span<const double> point) {
    const Chart& chart = structure_chart(s);
    return std::abs(eval(jacobi_expr(s, f, g, h), chart.bind(point)));
}

}  // namespace hfree
