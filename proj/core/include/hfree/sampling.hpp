#pragma once

// Deterministic sampling of chart boxes.
//
// Random plans use SplitMix64 (Steele, Lea & Flood 2014):
//   state += 0x9E3779B97F4A7C15
//   z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// and map a draw to [0, 1) as (out >> 11) · 2⁻⁵³. Coordinates of one point
// are consecutive draws in chart order, scaled as lo + u·(hi − lo). All of
// this is integer arithmetic plus one multiply-add per coordinate, so the
// sequence is bit-identical across platforms (the build disables FP
// contraction).

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "hfree/fields.hpp"

namespace hfree {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double next_unit() noexcept;

private:
    std::uint64_t state_;
};

struct RandomPlan {
    std::size_t samples = 10000;
    std::uint64_t seed = 0;
};

/// Tensor-product lattice, first axis slowest. Non-periodic axes include both
/// endpoints; periodic axes exclude the right endpoint.
struct GridPlan {
    std::vector<std::size_t> counts;
};

using SamplePlan = std::variant<RandomPlan, GridPlan>;

/// Throws Error on zero samples or a grid whose rank differs from the chart.
std::vector<Point> sample_points(const Chart& chart, const SamplePlan& plan);

}  // namespace hfree
