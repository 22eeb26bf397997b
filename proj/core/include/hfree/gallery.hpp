#pragma once

// Registry of worked examples: planar line fields, integrable systems on
// T*𝕋ⁿ, Riemann-Poisson structures on 𝔼³ and 𝕋³, and the contact
// distribution on ℝ^{2n+1}.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfree/brackets.hpp"
#include "hfree/fields.hpp"

namespace hfree {

/// Closed-form assertion L_{ξ_a} function == value, compared with
/// |computed − value| ≤ tolerance · max(1, |value|). When `positive` is set
/// the value must also be > 0 at every sample.
struct ExpectedDerivative {
    std::string label;
    std::size_t frame_index = 0;
    Expr function;
    Expr value;
    double tolerance = 1e-10;
    bool positive = false;
};

struct Fixture {
    std::string name;
    Chart chart;
    std::optional<Frame> frame;
    std::optional<SmoothMap> immersion;
    std::optional<SmoothMap> free_map;  // compose(monomial_free_map(k), immersion)
    std::vector<ExpectedDerivative> expected;
    /// Structure whose bracket laws are exercised, with the test functions.
    std::optional<PoissonStructure> structure;
    std::vector<Expr> law_functions;
    std::vector<std::string> notes;
};

/// Throws Error on an unknown name.
Fixture fixture(std::string_view name);
std::vector<std::string> list_fixtures();

}  // namespace hfree
