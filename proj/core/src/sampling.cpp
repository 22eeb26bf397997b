#include "hfree/sampling.hpp"

#include "hfree/error.hpp"

namespace hfree {

std::uint64_t SplitMix64::next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

std::vector<Point> random_points(const Chart& chart, const RandomPlan& plan) {
    if (plan.samples == 0) throw Error("sampling: zero samples requested");
    SplitMix64 rng(plan.seed);
    std::vector<Point> points(plan.samples, Point(chart.dim()));
    for (auto& p : points) {
        for (std::size_t i = 0; i < chart.dim(); ++i) {
            const Interval b = chart.box()[i];
            double x = b.lo + rng.next_unit() * (b.hi - b.lo);
            if (x > b.hi || (chart.periodic()[i] && x >= b.hi)) x = b.lo;  // rounding at the right edge
            p[i] = x;
        }
    }
    return points;
}

std::vector<double> axis_values(const Interval& b, std::size_t count, bool periodic) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (periodic) {
            v[i] = b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(count);
        } else if (count == 1) {
            v[i] = b.lo;
        } else if (i + 1 == count) {
            v[i] = b.hi;
        } else {
            v[i] = b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
    }
    return v;
}

std::vector<Point> grid_points(const Chart& chart, const GridPlan& plan) {
    if (plan.counts.size() != chart.dim()) {
        throw Error("sampling: grid has " + std::to_string(plan.counts.size()) + " axes, chart has " +
                    std::to_string(chart.dim()));
    }
    std::size_t total = 1;
    std::vector<std::vector<double>> axes;
    for (std::size_t i = 0; i < chart.dim(); ++i) {
        if (plan.counts[i] == 0) throw Error("sampling: zero samples requested");
        total *= plan.counts[i];
        axes.push_back(axis_values(chart.box()[i], plan.counts[i], chart.periodic()[i]));
    }
    std::vector<Point> points;
    points.reserve(total);
    std::vector<std::size_t> idx(chart.dim(), 0);
    for (std::size_t n = 0; n < total; ++n) {
        Point p(chart.dim());
        for (std::size_t i = 0; i < chart.dim(); ++i) p[i] = axes[i][idx[i]];
        points.push_back(std::move(p));
        for (std::size_t i = chart.dim(); i-- > 0;) {
            if (++idx[i] < plan.counts[i]) break;
            idx[i] = 0;
        }
    }
    return points;
}

}  // namespace

std::vector<Point> sample_points(const Chart& chart, const SamplePlan& plan) {
    if (const auto* r = std::get_if<RandomPlan>(&plan)) return random_points(chart, *r);
    return grid_points(chart, std::get<GridPlan>(plan));
}

}  // namespace hfree
