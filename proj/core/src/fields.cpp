#include "hfree/fields.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "hfree/error.hpp"
#include "hfree/jets.hpp"

namespace hfree {
namespace {

bool valid_identifier(const std::string& name) {
    if (name.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    return std::all_of(name.begin(), name.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool reserved(const std::string& name) {
    return name == "sin" || name == "cos" || name == "exp" || name == "pi";
}

}  // namespace

Chart::Chart(std::vector<std::string> coords, std::vector<bool> periodic, std::vector<Interval> box)
    : coords_(std::move(coords)), periodic_(std::move(periodic)), box_(std::move(box)) {
    if (coords_.empty()) throw Error("chart: dimension must be positive");
    if (periodic_.size() != coords_.size() || box_.size() != coords_.size()) {
        throw DimensionError("chart: coords, periodic and box must have the same length");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        const auto& name = coords_[i];
        if (!valid_identifier(name)) throw Error("chart: invalid coordinate name '" + name + "'");
        if (reserved(name)) throw Error("chart: coordinate name '" + name + "' is reserved");
        if (!seen.insert(name).second) throw Error("chart: duplicate coordinate '" + name + "'");
        if (!(box_[i].lo < box_[i].hi)) throw Error("chart: empty box on axis '" + name + "'");
        if (periodic_[i] && !(box_[i].lo == 0.0 && box_[i].hi == kTwoPi)) {
            throw Error("chart: periodic axis '" + name + "' must have box [0, 2pi)");
        }
    }
}

Chart Chart::euclidean(std::vector<std::string> coords, Interval box) {
    const std::size_t m = coords.size();
    return Chart(std::move(coords), std::vector<bool>(m, false), std::vector<Interval>(m, box));
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (coords_[i] == name) return i;
    }
    return std::nullopt;
}

bool Chart::contains(std::span<const double> point) const {
    if (point.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double x = point[i];
        if (!(x >= box_[i].lo)) return false;
        if (periodic_[i] ? !(x < box_[i].hi) : !(x <= box_[i].hi)) return false;
    }
    return true;
}

void Chart::require_contains(std::span<const double> point) const {
    if (point.size() != dim()) {
        throw DimensionError("point has " + std::to_string(point.size()) + " coordinates, chart has " +
                             std::to_string(dim()));
    }
    if (!contains(point)) {
        std::string axis;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double x = point[i];
            const bool inside =
                x >= box_[i].lo && (periodic_[i] ? x < box_[i].hi : x <= box_[i].hi);
            if (!inside) {
                axis = coords_[i];
                break;
            }
        }
        throw DomainError("point outside chart box on axis '" + axis + "'");
    }
}

Binding Chart::bind(std::span<const double> point) const {
    if (point.size() != dim()) throw DimensionError("point dimension does not match chart");
    Binding b;
    for (std::size_t i = 0; i < dim(); ++i) b.emplace(coords_[i], point[i]);
    return b;
}

void Chart::require_vars(const Expr& e, std::string_view what) const {
    for (const auto& v : free_vars(e)) {
        if (!index_of(v)) {
            throw DimensionError(std::string(what) + " mentions coordinate '" + v +
                                 "' which is not in the chart");
        }
    }
}

VectorField::VectorField(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_.dim()) {
        throw DimensionError("vector field has " + std::to_string(components_.size()) +
                             " components on a " + std::to_string(chart_.dim()) + "-dimensional chart");
    }
    for (const auto& c : components_) chart_.require_vars(c, "vector field component");
}

Frame::Frame(Chart chart, std::vector<VectorField> vectors)
    : chart_(std::move(chart)), vectors_(std::move(vectors)) {
    if (vectors_.empty() || vectors_.size() > chart_.dim()) {
        throw DimensionError("frame size must satisfy 1 <= k <= m");
    }
    for (const auto& v : vectors_) {
        if (!v.chart().compatible(chart_)) throw DimensionError("frame vector on a different chart");
    }
}

SmoothMap::SmoothMap(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.empty()) throw DimensionError("smooth map needs at least one component");
    for (const auto& c : components_) chart_.require_vars(c, "map component");
}

Point SmoothMap::operator()(std::span<const double> point) const {
    const Binding b = chart_.bind(point);
    Point out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(eval(c, b));
    return out;
}

Frame standard_frame(const Chart& chart) {
    std::vector<VectorField> vectors;
    for (std::size_t a = 0; a < chart.dim(); ++a) {
        std::vector<Expr> comps(chart.dim(), Expr(0.0));
        comps[a] = Expr(1.0);
        vectors.emplace_back(chart, std::move(comps));
    }
    return Frame(chart, std::move(vectors));
}

Expr lie_derivative(const VectorField& xi, const Expr& f) {
    const Chart& chart = xi.chart();
    chart.require_vars(f, "function");
    Expr sum(0.0);
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        if (xi[i].is_const(0.0)) continue;
        sum = sum + xi[i] * diff(f, chart.coords()[i]);
    }
    return simplify(sum);
}

Expr anticommutator(const VectorField& xi_a, const VectorField& xi_b, const Expr& f) {
    if (!xi_a.chart().compatible(xi_b.chart())) {
        throw DimensionError("anticommutator: vector fields on different charts");
    }
    const Expr ab = lie_derivative(xi_a, lie_derivative(xi_b, f));
    const Expr ba = lie_derivative(xi_b, lie_derivative(xi_a, f));
    return simplify(ab + ba);
}

Expr flat_norm_sq(const VectorField& xi) {
    Expr sum(0.0);
    for (const auto& c : xi.components()) sum = sum + pow(c, 2);
    return simplify(sum);
}

bool frame_rank_check(const Frame& frame, std::span<const double> point, double tolerance) {
    const Chart& chart = frame.chart();
    chart.require_contains(point);
    const Binding b = chart.bind(point);
    Eigen::MatrixXd m(frame.size(), chart.dim());
    for (std::size_t a = 0; a < frame.size(); ++a) {
        for (std::size_t i = 0; i < chart.dim(); ++i) {
            m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = eval(frame[a][i], b);
        }
    }
    const RankReport r = rank_check(m, tolerance);
    return r.rank == frame.size();
}

}  // namespace hfree
