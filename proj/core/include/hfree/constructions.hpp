#pragma once

// Building ℋ-free maps out of ℋ-immersions: the monomial free map, map
// composition, the symmetric-square representation and the block
// decomposition of D₂(F∘f) used to certify the determinant identity
//
//   det D₂(F∘f) = (det D₁ f)^{k+2} · det D₂ F.

#include <Eigen/Dense>
#include <cstddef>
#include <span>

#include "hfree/fields.hpp"
#include "hfree/jets.hpp"

namespace hfree {

/// ℝ^m → ℝ^{m+s_m}: (x¹, …, x^m, then xᵃxᵇ for a ≤ b lexicographically).
/// Coordinates are named x1, …, xm.
SmoothMap monomial_free_map(std::size_t m);

/// Substitutes `inner`'s components for `outer`'s coordinates (in chart
/// order). The result lives on `inner`'s chart. Throws DimensionError when
/// inner.target_dim() != outer.chart().dim().
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

/// ρ(A) for the symmetric square of GL_k: rows and columns indexed by pairs
/// a ≤ b; entry[(a,b),(c,c)] = A_ac A_bc and entry[(a,b),(c,d)] =
/// A_ac A_bd + A_ad A_bc for c < d. det ρ(A) = (det A)^{k+1}.
Eigen::MatrixXd sym_square(const Eigen::MatrixXd& a);

struct BlockDecomposition {
    Eigen::MatrixXd d1;            // D₁(f), k×k
    Eigen::MatrixXd c;             // anticommutator rows of D₂(f), s_k×k
    Eigen::MatrixXd d;             // sym_square(d1), s_k×s_k
    Eigen::MatrixXd d2_outer;      // D₂(F) at f(point)
    Eigen::MatrixXd d2_composite;  // D₂(F∘f) at point

    /// [[d1, 0], [c, d]].
    Eigen::MatrixXd lower_block() const;

    /// max |d2_composite − lower_block()·d2_outer| / max(1, |entry|), entrywise.
    double block_law_residual() const;
};

struct IdentityResidual {
    double lhs = 0.0;  // det D₂(F∘f)
    double rhs = 0.0;  // (det D₁ f)^{k+2} det D₂ F
    double rel_residual = 0.0;
    bool passed = false;
};

/// Precompiled jets for a fixed (frame, f, F) triple in critical dimension:
/// f has k components, F maps ℝ^k → ℝ^{k+s_k}.
class CompositionProbe {
public:
    CompositionProbe(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer);

    BlockDecomposition decompose(std::span<const double> point) const;
    IdentityResidual identity(std::span<const double> point, double tolerance) const;

    std::size_t k() const noexcept { return k_; }
    const SmoothMap& composite() const noexcept { return composite_; }

private:
    std::size_t k_;
    SmoothMap inner_;
    SmoothMap composite_;
    JetEvaluator inner_d2_;
    JetEvaluator outer_d2_;
    JetEvaluator composite_d2_;
    std::vector<CompiledExpr> inner_values_;
};

BlockDecomposition block_decomposition(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer,
                                       std::span<const double> point);

/// Passes iff rel_residual ≤ tolerance, with
/// rel_residual = |lhs − rhs| / max(1, |lhs|, |rhs|).
IdentityResidual verify_det_identity(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer,
                                     std::span<const double> point, double tolerance = kDefaultTolerance);

}  // namespace hfree
