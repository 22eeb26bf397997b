#pragma once

// Poisson-type structures: the canonical symplectic bracket, flat
// Riemann-Poisson (Nambu) brackets defined by m − 2 fixed functions, and the
// canonical contact distribution on ℝ^{2n+1}.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hfree/fields.hpp"

namespace hfree {

/// Chart of dimension 2n with coordinates ordered (φ¹…φⁿ, p₁…pₙ); index α
/// pairs φ^α with p_α.
class SymplecticChart {
public:
    SymplecticChart(Chart chart, std::size_t n);

    /// T*𝕋ⁿ: periodic angles phi1…phin, momenta p1…pn in `momentum`.
    static SymplecticChart cotangent_torus(std::size_t n, Interval momentum = {-2.0, 2.0});

    std::size_t n() const noexcept { return n_; }
    const Chart& chart() const noexcept { return chart_; }
    const std::string& angle(std::size_t alpha) const { return chart_.coords().at(alpha); }
    const std::string& momentum(std::size_t alpha) const { return chart_.coords().at(n_ + alpha); }

private:
    Chart chart_;
    std::size_t n_;
};

/// {f, g} = Σ_α (∂f/∂p_α ∂g/∂φ^α − ∂f/∂φ^α ∂g/∂p_α), the sign for which
/// {h, g} = L_{X_h} g.
Expr canonical_bracket(const SymplecticChart& s, const Expr& f, const Expr& g);

/// X_h = Σ_α (∂h/∂p_α) ∂_{φ^α} − (∂h/∂φ^α) ∂_{p_α}.
VectorField hamiltonian_field(const SymplecticChart& s, const Expr& h);

/// Flat Riemann-Poisson structure: {f, g}_H = det(∇h₁; …; ∇h_{m−2}; ∇f; ∇g).
/// Gradients are stored, so multivalued functions with a single-valued
/// differential (e.g. B·θ on 𝕋³) are given by their gradient directly.
class RPStructure {
public:
    /// Throws DimensionError unless m ≥ 3 and there are exactly m − 2 functions.
    RPStructure(Chart chart, const std::vector<Expr>& functions);
    static RPStructure from_gradients(Chart chart, std::vector<std::vector<Expr>> gradients);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<std::vector<Expr>>& gradients() const noexcept { return gradients_; }

private:
    RPStructure(Chart chart, std::vector<std::vector<Expr>> gradients, int);

    Chart chart_;
    std::vector<std::vector<Expr>> gradients_;
};

Expr rp_bracket(const RPStructure& r, const Expr& f, const Expr& g);

/// ξ_h with L_{ξ_h} g = sign · {h, g}_H for every g; components are the
/// cofactors of the ∇g row. `sign` must be ±1.
VectorField rp_hamiltonian_field(const RPStructure& r, const Expr& h, int sign);

/// Symbolic determinant by Laplace expansion with memoized minors, simplified.
Expr symbolic_determinant(const std::vector<std::vector<Expr>>& rows);

/// Chart (x1…xn, p1…pn, t) with box `box` on every axis, and the frame
/// ξ_i = ∂_{x^i} − p_i ∂_t, ξ_{n+i} = ∂_{p_i}.
Frame contact_frame(std::size_t n, Interval box = {-2.0, 2.0});

/// Coefficients, in chart order of contact_frame(n), of the contact form
/// θ = dt + p_α dx^α whose kernel contact_frame(n) spans.
std::vector<Expr> contact_form(std::size_t n);

/// θ(ξ) = Σᵢ θᵢ ξⁱ, simplified.
Expr contract(std::span<const Expr> form, const VectorField& xi);

/// π = (x1…xn, p1…pn) on the chart of contact_frame(n).
SmoothMap contact_projection(std::size_t n, Interval box = {-2.0, 2.0});

using PoissonStructure = std::variant<SymplecticChart, RPStructure>;

const Chart& structure_chart(const PoissonStructure& s);
Expr bracket(const PoissonStructure& s, const Expr& f, const Expr& g);

/// |{f,{g,h}} + {g,{h,f}} + {h,{f,g}}| at `point`, brackets composed
/// symbolically.
double jacobi_residual(const PoissonStructure& s, const Expr& f, const Expr& g, const Expr& h,
                       std::span<const double> point);

/// {f,{g,h}} + {g,{h,f}} + {h,{f,g}} as an expression.
Expr jacobi_expr(const PoissonStructure& s, const Expr& f, const Expr& g, const Expr& h);

}  // namespace hfree
