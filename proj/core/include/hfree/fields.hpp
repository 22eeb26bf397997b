#pragma once

// Charts, vector fields, frames and smooth maps, plus the Lie-derivative
// calculus built on symbolic differentiation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hfree/expr.hpp"

namespace hfree {

using Point = std::vector<double>;

/// Closed sampling interval [lo, hi]; half-open [lo, hi) on periodic axes.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Period of angular coordinates.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A single coordinate system with a sampling box. Periodic coordinates are
/// angles with box exactly [0, 2π).
class Chart {
public:
    /// Throws Error on duplicate or reserved names, lo >= hi, or a periodic
    /// axis whose box is not [0, 2π).
    Chart(std::vector<std::string> coords, std::vector<bool> periodic, std::vector<Interval> box);

    /// Non-periodic chart with the same box on every axis.
    static Chart euclidean(std::vector<std::string> coords, Interval box = {-2.0, 2.0});

    std::size_t dim() const noexcept { return coords_.size(); }
    const std::vector<std::string>& coords() const noexcept { return coords_; }
    const std::vector<bool>& periodic() const noexcept { return periodic_; }
    const std::vector<Interval>& box() const noexcept { return box_; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    bool contains(std::span<const double> point) const;
    /// Throws DomainError naming the first offending axis.
    void require_contains(std::span<const double> point) const;
    Binding bind(std::span<const double> point) const;

    /// Throws DimensionError if `e` mentions coordinates outside this chart.
    void require_vars(const Expr& e, std::string_view what) const;

    /// Charts are compatible when they carry the same ordered coordinates.
    bool compatible(const Chart& other) const noexcept { return coords_ == other.coords_; }

    friend bool operator==(const Chart&, const Chart&) = default;

private:
    std::vector<std::string> coords_;
    std::vector<bool> periodic_;
    std::vector<Interval> box_;
};

/// Σᵢ ξⁱ ∂ᵢ over a chart.
class VectorField {
public:
    VectorField(Chart chart, std::vector<Expr> components);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<Expr>& components() const noexcept { return components_; }
    const Expr& operator[](std::size_t i) const { return components_.at(i); }

private:
    Chart chart_;
    std::vector<Expr> components_;
};

/// Ordered local trivialization {ξ₁, …, ξ_k} of a distribution. Pointwise
/// independence is not enforced here; see frame_rank_check.
class Frame {
public:
    Frame(Chart chart, std::vector<VectorField> vectors);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<VectorField>& vectors() const noexcept { return vectors_; }
    std::size_t size() const noexcept { return vectors_.size(); }
    const VectorField& operator[](std::size_t a) const { return vectors_.at(a); }

private:
    Chart chart_;
    std::vector<VectorField> vectors_;
};

/// Map M → ℝ^q given by q component expressions.
class SmoothMap {
public:
    SmoothMap(Chart chart, std::vector<Expr> components);

    const Chart& chart() const noexcept { return chart_; }
    const std::vector<Expr>& components() const noexcept { return components_; }
    std::size_t target_dim() const noexcept { return components_.size(); }

    /// Component values at a point (no box check).
    Point operator()(std::span<const double> point) const;

private:
    Chart chart_;
    std::vector<Expr> components_;
};

/// {∂_1, …, ∂_m}.
Frame standard_frame(const Chart& chart);

/// L_ξ f = Σᵢ ξⁱ ∂ᵢ f, simplified.
Expr lie_derivative(const VectorField& xi, const Expr& f);

/// {L_a, L_b} f = L_a L_b f + L_b L_a f, simplified.
Expr anticommutator(const VectorField& xi_a, const VectorField& xi_b, const Expr& f);

/// Σᵢ (ξⁱ)² under the flat metric.
Expr flat_norm_sq(const VectorField& xi);

/// True iff the k×m matrix of frame components at `point` has rank k under
/// the jets tolerance policy. Throws DomainError outside the chart box.
bool frame_rank_check(const Frame& frame, std::span<const double> point, double tolerance = 1e-9);

}  // namespace hfree
