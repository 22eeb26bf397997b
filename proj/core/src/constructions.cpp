#include "hfree/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "hfree/error.hpp"

namespace hfree {

SmoothMap monomial_free_map(std::size_t m) {
    if (m == 0) throw DimensionError("monomial_free_map: m must be positive");
    std::vector<std::string> names;
    for (std::size_t a = 0; a < m; ++a) names.push_back("x" + std::to_string(a + 1));
    std::vector<Expr> components;
    components.reserve(m + pair_count(m));
    for (const auto& n : names) components.push_back(Expr::coord(n));
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a; b < m; ++b) {
            const Expr xa = Expr::coord(names[a]);
            components.push_back(a == b ? pow(xa, 2) : xa * Expr::coord(names[b]));
        }
    }
    return SmoothMap(Chart::euclidean(std::move(names)), std::move(components));
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
    const auto& coords = outer.chart().coords();
    if (inner.target_dim() != coords.size()) {
        throw DimensionError("compose: inner map has " + std::to_string(inner.target_dim()) +
                             " components but the outer map takes " + std::to_string(coords.size()));
    }
    Substitution sub;
    for (std::size_t i = 0; i < coords.size(); ++i) sub.emplace(coords[i], inner.components()[i]);
    std::vector<Expr> components;
    components.reserve(outer.target_dim());
    for (const auto& c : outer.components()) components.push_back(simplify(substitute(c, sub)));
    return SmoothMap(inner.chart(), std::move(components));
}

Eigen::MatrixXd sym_square(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw DimensionError("sym_square: matrix must be square");
    const auto k = static_cast<std::size_t>(a.rows());
    const auto pairs = jet_row_labels(k, 2);
    const auto s = static_cast<Eigen::Index>(pair_count(k));
    Eigen::MatrixXd rho(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
        const auto& row = pairs[k + static_cast<std::size_t>(r)];
        const auto i = static_cast<Eigen::Index>(row.a);
        const auto j = static_cast<Eigen::Index>(*row.b);
        for (Eigen::Index c = 0; c < s; ++c) {
            const auto& col = pairs[k + static_cast<std::size_t>(c)];
            const auto p = static_cast<Eigen::Index>(col.a);
            const auto q = static_cast<Eigen::Index>(*col.b);
            rho(r, c) = p == q ? a(i, p) * a(j, p) : a(i, p) * a(j, q) + a(i, q) * a(j, p);
        }
    }
    return rho;
}

Eigen::MatrixXd BlockDecomposition::lower_block() const {
    const Eigen::Index k = d1.rows();
    const Eigen::Index s = d.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + s, k + s);
    m.topLeftCorner(k, k) = d1;
    m.bottomLeftCorner(s, k) = c;
    m.bottomRightCorner(s, s) = d;
    return m;
}

double BlockDecomposition::block_law_residual() const {
    const Eigen::MatrixXd product = lower_block() * d2_outer;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < product.rows(); ++i) {
        for (Eigen::Index j = 0; j < product.cols(); ++j) {
            const double ref = d2_composite(i, j);
            worst = std::max(worst, std::abs(ref - product(i, j)) / std::max(1.0, std::abs(ref)));
        }
    }
    return worst;
}

namespace {

std::size_t critical_k(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer) {
    const std::size_t k = frame.size();
    if (inner.target_dim() != k) {
        throw DimensionError("identity check needs an inner map with k = " + std::to_string(k) +
                             " components, got " + std::to_string(inner.target_dim()));
    }
    if (outer.chart().dim() != k || outer.target_dim() != critical_dimension(k, 2)) {
        throw DimensionError("identity check needs an outer map R^" + std::to_string(k) + " -> R^" +
                             std::to_string(critical_dimension(k, 2)));
    }
    if (!frame.chart().compatible(inner.chart())) {
        throw DimensionError("frame and inner map are defined on different charts");
    }
    return k;
}

}  // namespace

CompositionProbe::CompositionProbe(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer)
    : k_(critical_k(frame, inner, outer)),
      inner_(inner),
      composite_(compose(outer, inner)),
      inner_d2_(frame, inner, 2),
      outer_d2_(standard_frame(outer.chart()), outer, 2),
      composite_d2_(frame, composite_, 2) {
    for (const auto& c : inner.components()) inner_values_.emplace_back(c, inner.chart().coords());
}

BlockDecomposition CompositionProbe::decompose(std::span<const double> point) const {
    const auto k = static_cast<Eigen::Index>(k_);
    const auto s = static_cast<Eigen::Index>(pair_count(k_));
    BlockDecomposition out;
    const JetMatrix inner = inner_d2_(point);
    out.d1 = inner.entries.topRows(k);
    out.c = inner.entries.bottomRows(s);
    out.d = sym_square(out.d1);
    Point image;
    image.reserve(k_);
    for (const auto& v : inner_values_) image.push_back(v(point));
    out.d2_outer = outer_d2_(image).entries;
    out.d2_composite = composite_d2_(point).entries;
    return out;
}

IdentityResidual CompositionProbe::identity(std::span<const double> point, double tolerance) const {
    const BlockDecomposition b = decompose(point);
    IdentityResidual r;
    r.lhs = b.d2_composite.determinant();
    r.rhs = std::pow(b.d1.determinant(), static_cast<double>(k_ + 2)) * b.d2_outer.determinant();
    r.rel_residual = std::abs(r.lhs - r.rhs) / std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
    r.passed = r.rel_residual <= tolerance;
    return r;
}

BlockDecomposition block_decomposition(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer,
                                       std::span<const double> point) {
    frame.chart().require_contains(point);
    return CompositionProbe(frame, inner, outer).decompose(point);
}

IdentityResidual verify_det_identity(const Frame& frame, const SmoothMap& inner, const SmoothMap& outer,
                                     std::span<const double> point, double tolerance) {
    frame.chart().require_contains(point);
    return CompositionProbe(frame, inner, outer).identity(point, tolerance);
}

}  // namespace hfree
