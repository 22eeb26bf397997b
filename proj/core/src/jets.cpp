#include "hfree/jets.hpp"

#include <cmath>

#include "hfree/error.hpp"

namespace hfree {
namespace {

void require_same_chart(const Frame& frame, const SmoothMap& f) {
    if (!frame.chart().compatible(f.chart())) {
        throw DimensionError("frame and map are defined on different charts");
    }
}

}  // namespace

std::string RowLabel::to_string() const {
    if (!b) return "L" + std::to_string(a + 1);
    return "{L" + std::to_string(a + 1) + ",L" + std::to_string(*b + 1) + "}";
}

std::vector<RowLabel> jet_row_labels(std::size_t k, int order) {
    std::vector<RowLabel> labels;
    labels.reserve(critical_dimension(k, order));
    for (std::size_t a = 0; a < k; ++a) labels.push_back({a, std::nullopt});
    if (order == 2) {
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = a; b < k; ++b) labels.push_back({a, b});
        }
    }
    return labels;
}

ExprMatrix d1_exprs(const Frame& frame, const SmoothMap& f) {
    require_same_chart(frame, f);
    ExprMatrix rows;
    rows.reserve(frame.size());
    for (const auto& xi : frame.vectors()) {
        std::vector<Expr> row;
        row.reserve(f.target_dim());
        for (const auto& fi : f.components()) row.push_back(lie_derivative(xi, fi));
        rows.push_back(std::move(row));
    }
    return rows;
}

ExprMatrix d2_exprs(const Frame& frame, const SmoothMap& f) {
    ExprMatrix rows = d1_exprs(frame, f);
    const std::size_t k = frame.size();
    // {L_a, L_b} fⁱ = L_a(L_b fⁱ) + L_b(L_a fⁱ); reuse the first-order rows.
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a; b < k; ++b) {
            std::vector<Expr> row;
            row.reserve(f.target_dim());
            for (std::size_t i = 0; i < f.target_dim(); ++i) {
                const Expr ab = lie_derivative(frame[a], rows[b][i]);
                const Expr ba = a == b ? ab : lie_derivative(frame[b], rows[a][i]);
                row.push_back(simplify(ab + ba));
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

JetEvaluator::JetEvaluator(const Frame& frame, const SmoothMap& f, int order)
    : order_(order), cols_(f.target_dim()), labels_(jet_row_labels(frame.size(), order)) {
    if (order != 1 && order != 2) throw Error("jet order must be 1 or 2");
    const ExprMatrix exprs = order == 1 ? d1_exprs(frame, f) : d2_exprs(frame, f);
    entries_.reserve(labels_.size() * cols_);
    for (const auto& row : exprs) {
        for (const auto& e : row) entries_.emplace_back(e, frame.chart().coords());
    }
}

JetMatrix JetEvaluator::operator()(std::span<const double> point) const {
    JetMatrix m{order_, labels_, Eigen::MatrixXd(labels_.size(), cols_)};
    std::size_t idx = 0;
    for (std::size_t r = 0; r < labels_.size(); ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            m.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entries_[idx++](point);
        }
    }
    return m;
}

JetMatrix d1_matrix(const Frame& frame, const SmoothMap& f, std::span<const double> point) {
    frame.chart().require_contains(point);
    return JetEvaluator(frame, f, 1)(point);
}

JetMatrix d2_matrix(const Frame& frame, const SmoothMap& f, std::span<const double> point) {
    frame.chart().require_contains(point);
    return JetEvaluator(frame, f, 2)(point);
}

RankReport rank_check(const Eigen::MatrixXd& m, double tolerance) {
    if (!m.allFinite()) throw NonFiniteError("matrix has non-finite entries");
    RankReport report;
    const Eigen::Index n = std::min(m.rows(), m.cols());
    if (m.rows() == m.cols()) report.det = n == 0 ? 1.0 : m.determinant();
    if (n == 0) return report;
    const Eigen::VectorXd sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    report.sigma_max = sigma(0);
    report.sigma_min = sigma(n - 1);
    const double threshold = tolerance * std::max(1.0, report.sigma_max);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (sigma(i) > threshold) ++report.rank;
    }
    report.full_rank = report.sigma_min > threshold;
    return report;
}

RankReport rank_check(const JetMatrix& m, double tolerance) {
    for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
        if (!m.entries.row(r).allFinite()) {
            const std::string label =
                static_cast<std::size_t>(r) < m.rows.size() ? m.rows[static_cast<std::size_t>(r)].to_string()
                                                            : std::to_string(r);
            throw NonFiniteError("non-finite entry in jet row " + label);
        }
    }
    return rank_check(m.entries, tolerance);
}

namespace {

bool full_rank_at(const Frame& frame, const SmoothMap& f, std::span<const double> point, double tolerance,
                  int order) {
    require_same_chart(frame, f);
    const std::size_t critical = critical_dimension(frame.size(), order);
    if (f.target_dim() < critical) throw BelowCriticalDimension(f.target_dim(), critical);
    const JetMatrix m = order == 1 ? d1_matrix(frame, f, point) : d2_matrix(frame, f, point);
    return rank_check(m, tolerance).full_rank;
}

}  // namespace

bool is_immersion_at(const Frame& frame, const SmoothMap& f, std::span<const double> point, double tolerance) {
    return full_rank_at(frame, f, point, tolerance, 1);
}

bool is_free_at(const Frame& frame, const SmoothMap& f, std::span<const double> point, double tolerance) {
    return full_rank_at(frame, f, point, tolerance, 2);
}

}  // namespace hfree
