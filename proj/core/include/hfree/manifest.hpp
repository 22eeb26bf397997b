#pragma once

// Check manifests: a flat sectioned key = value text format.
//
//   # comment
//   [manifold]
//   coords   = ["x", "y"]
//   periodic = [false, false]          # optional, default all false
//   box      = [[-2, 2], [-2, 2]]      # optional; bounds may be "2*pi"
//   dim      = 2                       # optional, must match coords
//
//   [frame]
//   vectors = [["2*y", "1 - y^2"]]
//   # or a structure reference:
//   # structure = "canonical";       hamiltonians = ["exp(p1)*cos(phi1)"]
//   # structure = "riemann-poisson"; H = ["..."] (or H_gradients = [[...]]),
//   #             hamiltonian = "...", sign = -1
//   # structure = "contact";         n = 2
//
//   [map]
//   components = ["y*exp(x)"]
//   outer = ["u", "u^2"]               # identity mode; default monomial map
//   outer_coords = ["u"]               # default x1, …, xq
//
//   [check]
//   mode = "immersion"                 # immersion | free | identity | bracket-laws
//   samples = 10000
//   seed = 0
//   tolerance = 1e-9
//   grid = [50, 50]                    # optional, replaces samples/seed
//   functions = ["x*y", "..."]         # bracket-laws test functions (>= 3)
//
// Values are double-quoted strings, numbers, true/false, or bracketed arrays
// that may span lines. Keys and sections are case-sensitive; unknown ones are
// errors.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfree/brackets.hpp"
#include "hfree/error.hpp"
#include "hfree/fields.hpp"
#include "hfree/sampling.hpp"

namespace hfree {

/// Malformed or inconsistent manifest. Line and column are one-based; 0 means
/// the problem concerns the file as a whole (e.g. a missing section).
class ManifestError : public Error {
public:
    ManifestError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class CheckMode { Immersion, Free, Identity, BracketLaws };

std::string_view to_string(CheckMode mode) noexcept;

struct Manifest {
    Chart chart;
    std::optional<Frame> frame;
    std::optional<SmoothMap> map;
    std::optional<SmoothMap> outer;  // identity mode only
    std::optional<PoissonStructure> structure;
    std::vector<Expr> functions;
    CheckMode mode = CheckMode::Immersion;
    SamplePlan plan = RandomPlan{};
    double tolerance = 1e-9;
};

Manifest parse_manifest(std::string_view text);
/// Reads and parses a file; an unreadable file is a ManifestError at line 0.
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace hfree
