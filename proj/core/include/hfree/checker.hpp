#pragma once

// Batch evaluation of a predicate over sampled points, with a deterministic
// reduction so reports do not depend on the worker schedule.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hfree/fields.hpp"
#include "hfree/gallery.hpp"
#include "hfree/manifest.hpp"
#include "hfree/sampling.hpp"

namespace hfree {

enum class Verdict { Pass, Fail, BelowCriticalDimension };

std::string_view to_string(Verdict v) noexcept;

/// 0 pass, 1 fail, 3 below critical dimension (2 is reserved for usage and
/// manifest errors).
int exit_code(Verdict v) noexcept;

inline constexpr std::size_t kFailureCap = 100;

/// Bracket-law thresholds: Leibniz relative, Jacobi absolute. Antisymmetry is
/// exact.
inline constexpr double kLeibnizTolerance = 1e-10;
inline constexpr double kJacobiTolerance = 1e-8;

struct PointFailure {
    Point point;
    std::string reason;
};

struct WorstPoint {
    Point point;
    double criterion = 0.0;
};

/// Outcome of one closed-form assertion across all points.
struct ExpectedOutcome {
    std::string label;
    double max_error = 0.0;  // max |computed − value| / max(1, |value|)
    bool passed = true;
};

struct Report {
    Verdict verdict = Verdict::Pass;
    std::string mode;
    std::size_t points_checked = 0;
    /// Rank modes: smallest σ_min. Residual modes: largest residual.
    std::optional<WorstPoint> worst;
    std::vector<PointFailure> failures;  // first kFailureCap failing points
    std::size_t failure_count = 0;       // uncapped
    std::vector<std::string> notes;
    std::vector<ExpectedOutcome> expected;
    std::vector<std::string> coords;
    std::vector<Interval> box;
    double wall_time_ms = 0.0;
};

struct RunOptions {
    /// Worker count; unset reads HFREE_THREADS, falling back to the hardware
    /// concurrency. 0 and 1 both mean serial.
    std::optional<std::size_t> threads;
};

std::size_t resolve_threads(const RunOptions& options);

Report run_check(const Manifest& manifest, const RunOptions& options = {});

/// Every assertion a fixture carries: immersion and free-map rank, expected
/// Lie derivatives (with positivity), and bracket laws when a structure is
/// attached. The worst criterion is the free map's σ_min, or the largest
/// Jacobi residual for structure-only fixtures.
Report run_gallery(const Fixture& fx, const SamplePlan& plan, double tolerance = 1e-9,
                   const RunOptions& options = {});

/// Keys, in order: verdict, mode, points_checked, worst, failures,
/// fixture_notes, box, expected, wall_time_ms (omitted when
/// include_wall_time is false).
std::string report_json(const Report& r, bool include_wall_time = true);
std::string report_text(const Report& r);

}  // namespace hfree
