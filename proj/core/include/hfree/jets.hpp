#pragma once

// First- and second-order jet matrices of a map along a frame, and the
// numerical rank analysis behind the ℋ-immersion and ℋ-free predicates.
//
// Row order is fixed: the k first-order rows L_a f in frame order, then for
// D₂ the pairs (a, b), a ≤ b, in lexicographic order. Every second-order row,
// diagonal included, is the anticommutator {L_a, L_b} f (so diagonal rows are
// 2 L_a² f).

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfree/fields.hpp"

namespace hfree {

/// Rank tolerance, relative to max(1, σ_max).
inline constexpr double kDefaultTolerance = 1e-9;

/// s_k = k(k+1)/2, the number of pairs a ≤ b among k indices.
constexpr std::size_t pair_count(std::size_t k) noexcept { return k * (k + 1) / 2; }

/// Row label: `a` alone for first-order rows, (a, b) for anticommutator rows.
/// Indices are zero-based; to_string() prints one-based.
struct RowLabel {
    std::size_t a = 0;
    std::optional<std::size_t> b;

    std::string to_string() const;
    friend bool operator==(const RowLabel&, const RowLabel&) = default;
};

std::vector<RowLabel> jet_row_labels(std::size_t k, int order);

using ExprMatrix = std::vector<std::vector<Expr>>;

/// Entry (a, i) = L_{ξ_a} fⁱ.
ExprMatrix d1_exprs(const Frame& frame, const SmoothMap& f);
/// D₁ rows followed by {L_a, L_b} fⁱ for a ≤ b.
ExprMatrix d2_exprs(const Frame& frame, const SmoothMap& f);

struct JetMatrix {
    int order = 1;
    std::vector<RowLabel> rows;
    Eigen::MatrixXd entries;
};

/// D₁ / D₂ at a point inside the chart box (DomainError otherwise).
JetMatrix d1_matrix(const Frame& frame, const SmoothMap& f, std::span<const double> point);
JetMatrix d2_matrix(const Frame& frame, const SmoothMap& f, std::span<const double> point);

/// D₁ or D₂ compiled once for repeated evaluation. Evaluation performs no box
/// check, so it also serves outer maps evaluated at image points.
class JetEvaluator {
public:
    JetEvaluator(const Frame& frame, const SmoothMap& f, int order);

    JetMatrix operator()(std::span<const double> point) const;

    int order() const noexcept { return order_; }
    std::size_t rows() const noexcept { return labels_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<RowLabel>& labels() const noexcept { return labels_; }

private:
    int order_;
    std::size_t cols_;
    std::vector<RowLabel> labels_;
    std::vector<CompiledExpr> entries_;  // row-major
};

struct RankReport {
    std::size_t rank = 0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::optional<double> det;  // square matrices only
    bool full_rank = false;
};

/// Singular values of the real matrix; rank counts σᵢ > τ·max(1, σ_max),
/// full_rank ⇔ σ_min > τ·max(1, σ_max). Throws NonFiniteError naming the
/// first row holding NaN or ±Inf.
RankReport rank_check(const JetMatrix& m, double tolerance = kDefaultTolerance);
RankReport rank_check(const Eigen::MatrixXd& m, double tolerance = kDefaultTolerance);

/// Full-rank verdict of D₁ (resp. D₂) at a point. Throws
/// BelowCriticalDimension when q < k (resp. q < k + s_k).
bool is_immersion_at(const Frame& frame, const SmoothMap& f, std::span<const double> point,
                     double tolerance = kDefaultTolerance);
bool is_free_at(const Frame& frame, const SmoothMap& f, std::span<const double> point,
                double tolerance = kDefaultTolerance);

/// Critical dimension of the order-1 (k) or order-2 (k + s_k) predicate.
constexpr std::size_t critical_dimension(std::size_t k, int order) noexcept {
    return order == 1 ? k : k + pair_count(k);
}

}  // namespace hfree
