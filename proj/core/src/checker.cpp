#include "hfree/checker.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "json.hpp"

#include "hfree/constructions.hpp"
#include "hfree/jets.hpp"

namespace hfree {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::BelowCriticalDimension: return "below-critical-dimension";
    }
    return "fail";
}

int exit_code(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return 0;
        case Verdict::Fail: return 1;
        case Verdict::BelowCriticalDimension: return 3;
    }
    return 1;
}

std::size_t resolve_threads(const RunOptions& options) {
    if (options.threads) return *options.threads;
    if (const char* env = std::getenv("HFREE_THREADS")) {
        std::size_t n = 0;
        const std::string_view s(env);
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
        if (ec == std::errc{} && end == s.data() + s.size()) return n;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

constexpr double kBlockLawTolerance = 1e-9;

std::string num(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

double rel_error(double computed, double expected) {
    return std::abs(computed - expected) / std::max(1.0, std::abs(expected));
}

struct ExpectedSample {
    double error = 0.0;
    bool ok = true;
};

struct PointResult {
    double criterion = 0.0;
    std::vector<std::string> reasons;
    std::vector<ExpectedSample> expected;
};

enum class Direction { Minimize, Maximize };

// ---------------------------------------------------------------------------
// Per-point probes
// ---------------------------------------------------------------------------

class FrameProbe {
public:
    explicit FrameProbe(const Frame& frame) : k_(frame.size()), m_(frame.chart().dim()) {
        for (const auto& v : frame.vectors()) {
            for (const auto& c : v.components()) entries_.emplace_back(c, frame.chart().coords());
        }
    }

    void check(std::span<const double> p, double tol, std::vector<std::string>& reasons) const {
        Eigen::MatrixXd a(static_cast<Eigen::Index>(k_), static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < k_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries_[i * m_ + j](p);
            }
        }
        const RankReport r = rank_check(a, tol);
        if (!r.full_rank) {
            reasons.push_back("degenerate frame: rank " + std::to_string(r.rank) + " < k = " + std::to_string(k_));
        }
    }

private:
    std::size_t k_;
    std::size_t m_;
    std::vector<CompiledExpr> entries_;
};

/// Returns σ_min and records a reason when the jet is rank deficient.
double jet_rank(const JetEvaluator& jet, std::span<const double> p, double tol, std::string_view name,
                std::vector<std::string>& reasons) {
    const RankReport r = rank_check(jet(p), tol);
    if (!r.full_rank) {
        reasons.push_back(std::string(name) + " rank " + std::to_string(r.rank) + " < " +
                          std::to_string(jet.rows()) + " (sigma_min " + num(r.sigma_min) + ")");
    }
    return r.sigma_min;
}

class LawProbe {
public:
    LawProbe(const PoissonStructure& s, const std::vector<Expr>& fns) {
        const auto& coords = structure_chart(s).coords();
        const std::size_t n = fns.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                antisym_.push_back({label("{f", i, j), CompiledExpr(bracket(s, fns[i], fns[j]), coords),
                                    CompiledExpr(bracket(s, fns[j], fns[i]), coords)});
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t l = j + 1; l < n; ++l) {
                    if (j == i || l == i) continue;
                    const Expr lhs = bracket(s, fns[i], simplify(fns[j] * fns[l]));
                    const Expr rhs = simplify(fns[j] * bracket(s, fns[i], fns[l]) + fns[l] * bracket(s, fns[i], fns[j]));
                    leibniz_.push_back({"Leibniz f" + std::to_string(i + 1) + ", f" + std::to_string(j + 1) + "*f" +
                                            std::to_string(l + 1),
                                        CompiledExpr(lhs, coords), CompiledExpr(rhs, coords)});
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t l = j + 1; l < n; ++l) {
                    jacobi_.push_back({"Jacobi f" + std::to_string(i + 1) + ", f" + std::to_string(j + 1) + ", f" +
                                           std::to_string(l + 1),
                                       CompiledExpr(jacobi_expr(s, fns[i], fns[j], fns[l]), coords)});
                }
            }
        }
    }

    /// Largest Jacobi residual at p; violations are appended to `reasons`.
    double check(std::span<const double> p, std::vector<std::string>& reasons) const {
        for (const auto& a : antisym_) {
            const double fg = a.fg(p);
            const double gf = a.gf(p);
            if (!(fg == -gf)) reasons.push_back(a.label + " antisymmetry: " + num(fg) + " vs " + num(gf));
        }
        for (const auto& l : leibniz_) {
            const double lhs = l.lhs(p);
            const double rhs = l.rhs(p);
            const double err = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
            if (!(err <= kLeibnizTolerance)) reasons.push_back(l.label + " residual " + num(err));
        }
        double worst = 0.0;
        for (const auto& j : jacobi_) {
            const double r = std::abs(j.expr(p));
            if (!(r <= kJacobiTolerance)) reasons.push_back(j.label + " residual " + num(r));
            if (!(r <= worst)) worst = r;
        }
        return worst;
    }

private:
    static std::string label(std::string_view head, std::size_t i, std::size_t j) {
        return std::string(head) + std::to_string(i + 1) + ", f" + std::to_string(j + 1) + "}";
    }

    struct Antisym {
        std::string label;
        CompiledExpr fg;
        CompiledExpr gf;
    };
    struct Leibniz {
        std::string label;
        CompiledExpr lhs;
        CompiledExpr rhs;
    };
    struct Jacobi {
        std::string label;
        CompiledExpr expr;
    };
    std::vector<Antisym> antisym_;
    std::vector<Leibniz> leibniz_;
    std::vector<Jacobi> jacobi_;
};

struct ExpectedProbe {
    std::string label;
    CompiledExpr computed;
    CompiledExpr value;
    double tolerance;
    bool positive;
};

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

template <class Fn>
PointResult guarded(const Fn& fn, const Point& p, Direction dir) {
    try {
        return fn(p);
    } catch (const std::exception& e) {
        PointResult r;
        r.criterion = dir == Direction::Minimize ? 0.0 : std::numeric_limits<double>::infinity();
        r.reasons.push_back(std::string("evaluation error: ") + e.what());
        return r;
    }
}

template <class Fn>
std::vector<PointResult> evaluate_all(const std::vector<Point>& points, std::size_t threads, const Fn& fn,
                                      Direction dir) {
    std::vector<PointResult> results(points.size());
    const std::size_t workers = std::min(threads, points.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) results[i] = guarded(fn, points[i], dir);
        return results;
    }
    constexpr std::size_t kChunk = 32;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= points.size()) return;
            const std::size_t end = std::min(points.size(), begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) results[i] = guarded(fn, points[i], dir);
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    return results;
}

bool worse(double candidate, double current, Direction dir) {
    if (std::isnan(candidate)) return !std::isnan(current);
    return dir == Direction::Minimize ? candidate < current : candidate > current;
}

/// Folds per-point results in index order, so the first (lowest-index) point
/// wins ties.
void reduce(Report& report, const std::vector<Point>& points, const std::vector<PointResult>& results,
            Direction dir) {
    report.points_checked = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PointResult& r = results[i];
        if (!report.worst || worse(r.criterion, report.worst->criterion, dir)) {
            report.worst = WorstPoint{points[i], r.criterion};
        }
        for (std::size_t e = 0; e < r.expected.size() && e < report.expected.size(); ++e) {
            auto& out = report.expected[e];
            if (!(r.expected[e].error <= out.max_error)) out.max_error = r.expected[e].error;
            out.passed = out.passed && r.expected[e].ok;
        }
        if (!r.reasons.empty()) {
            ++report.failure_count;
            if (report.failures.size() < kFailureCap) {
                std::string reason;
                for (const auto& s : r.reasons) reason += (reason.empty() ? "" : "; ") + s;
                report.failures.push_back({points[i], std::move(reason)});
            }
        }
    }
    report.verdict = report.failure_count == 0 ? Verdict::Pass : Verdict::Fail;
}

Report blank_report(std::string mode, const Chart& chart) {
    Report r;
    r.mode = std::move(mode);
    r.coords = chart.coords();
    r.box = chart.box();
    return r;
}

Report below_critical(Report r, std::size_t q, std::size_t k, int order) {
    r.verdict = Verdict::BelowCriticalDimension;
    const std::size_t crit = critical_dimension(k, order);
    r.notes.push_back("target dimension q = " + std::to_string(q) + " is below the critical dimension " +
                      std::to_string(crit) + (order == 1 ? " (k)" : " (k + s_k)") + " for k = " + std::to_string(k) +
                      "; the predicate is empty, no points were evaluated");
    return r;
}

template <class Fn>
Report timed(Report r, const std::vector<Point>& points, const RunOptions& options, const Fn& fn, Direction dir,
             std::chrono::steady_clock::time_point start) {
    const auto results = evaluate_all(points, resolve_threads(options), fn, dir);
    reduce(r, points, results, dir);
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

Report run_check(const Manifest& mf, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Report report = blank_report(std::string(to_string(mf.mode)), mf.chart);
    const double tol = mf.tolerance;

    if (mf.mode == CheckMode::BracketLaws) {
        const auto points = sample_points(mf.chart, mf.plan);
        const LawProbe laws(*mf.structure, mf.functions);
        return timed(
            std::move(report), points, options,
            [&](const Point& p) {
                PointResult r;
                r.criterion = laws.check(p, r.reasons);
                return r;
            },
            Direction::Maximize, start);
    }

    const Frame& frame = *mf.frame;
    const SmoothMap& map = *mf.map;
    const std::size_t k = frame.size();
    const std::size_t q = map.target_dim();
    const FrameProbe frame_probe(frame);

    if (mf.mode == CheckMode::Identity) {
        if (q < k) return below_critical(std::move(report), q, k, 1);
        const auto points = sample_points(mf.chart, mf.plan);
        const CompositionProbe probe(frame, map, mf.outer ? *mf.outer : monomial_free_map(k));
        return timed(
            std::move(report), points, options,
            [&](const Point& p) {
                PointResult r;
                frame_probe.check(p, tol, r.reasons);
                const IdentityResidual id = probe.identity(p, tol);
                r.criterion = id.rel_residual;
                if (!id.passed) {
                    r.reasons.push_back("det identity residual " + num(id.rel_residual) + " (lhs " + num(id.lhs) +
                                        ", rhs " + num(id.rhs) + ")");
                }
                const double block = probe.decompose(p).block_law_residual();
                if (!(block <= kBlockLawTolerance)) r.reasons.push_back("block law residual " + num(block));
                return r;
            },
            Direction::Maximize, start);
    }

    const int order = mf.mode == CheckMode::Immersion ? 1 : 2;
    if (q < critical_dimension(k, order)) return below_critical(std::move(report), q, k, order);
    const auto points = sample_points(mf.chart, mf.plan);
    const JetEvaluator jet(frame, map, order);
    return timed(
        std::move(report), points, options,
        [&](const Point& p) {
            PointResult r;
            frame_probe.check(p, tol, r.reasons);
            r.criterion = jet_rank(jet, p, tol, order == 1 ? "D1" : "D2", r.reasons);
            return r;
        },
        Direction::Minimize, start);
}

Report run_gallery(const Fixture& fx, const SamplePlan& plan, double tolerance, const RunOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Report report = blank_report("gallery", fx.chart);
    report.notes = fx.notes;

    std::optional<FrameProbe> frame_probe;
    std::optional<JetEvaluator> immersion;
    std::optional<JetEvaluator> free_map;
    std::vector<ExpectedProbe> expected;
    if (fx.frame) {
        frame_probe.emplace(*fx.frame);
        if (fx.immersion) immersion.emplace(*fx.frame, *fx.immersion, 1);
        if (fx.free_map) free_map.emplace(*fx.frame, *fx.free_map, 2);
        for (const auto& e : fx.expected) {
            expected.push_back({e.label, CompiledExpr(lie_derivative((*fx.frame)[e.frame_index], e.function),
                                                      fx.chart.coords()),
                                CompiledExpr(e.value, fx.chart.coords()), e.tolerance, e.positive});
            report.expected.push_back({e.label, 0.0, true});
        }
    }
    std::optional<LawProbe> laws;
    if (fx.structure && fx.law_functions.size() >= 3) laws.emplace(*fx.structure, fx.law_functions);

    const Direction dir = free_map ? Direction::Minimize : Direction::Maximize;
    const auto points = sample_points(fx.chart, plan);
    return timed(
        std::move(report), points, options,
        [&](const Point& p) {
            PointResult r;
            if (frame_probe) frame_probe->check(p, tolerance, r.reasons);
            if (immersion) jet_rank(*immersion, p, tolerance, "immersion D1", r.reasons);
            for (const auto& e : expected) {
                const double c = e.computed(p);
                const double v = e.value(p);
                ExpectedSample s{rel_error(c, v), true};
                if (!(s.error <= e.tolerance)) {
                    s.ok = false;
                    r.reasons.push_back(e.label + ": computed " + num(c) + ", expected " + num(v));
                }
                if (e.positive && !(c > 0.0 && v > 0.0)) {
                    s.ok = false;
                    r.reasons.push_back(e.label + ": not positive (" + num(c) + ")");
                }
                r.expected.push_back(s);
            }
            double jacobi = 0.0;
            if (laws) jacobi = laws->check(p, r.reasons);
            r.criterion = free_map ? jet_rank(*free_map, p, tolerance, "free map D2", r.reasons) : jacobi;
            return r;
        },
        dir, start);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string report_json(const Report& r, bool include_wall_time) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["verdict"] = std::string(to_string(r.verdict));
    j["mode"] = r.mode;
    j["points_checked"] = r.points_checked;
    if (r.worst) {
        j["worst"] = ordered_json{{"point", r.worst->point}, {"criterion", r.worst->criterion}};
    } else {
        j["worst"] = nullptr;
    }
    ordered_json failures = ordered_json::array();
    for (const auto& f : r.failures) failures.push_back(ordered_json{{"point", f.point}, {"reason", f.reason}});
    j["failures"] = std::move(failures);
    j["fixture_notes"] = r.notes;
    ordered_json box = ordered_json::array();
    for (std::size_t i = 0; i < r.box.size(); ++i) {
        box.push_back(ordered_json{{"coord", r.coords[i]}, {"lo", r.box[i].lo}, {"hi", r.box[i].hi}});
    }
    j["box"] = std::move(box);
    ordered_json expected = ordered_json::array();
    for (const auto& e : r.expected) {
        expected.push_back(ordered_json{{"label", e.label}, {"max_error", e.max_error}, {"passed", e.passed}});
    }
    j["expected"] = std::move(expected);
    if (include_wall_time) j["wall_time_ms"] = r.wall_time_ms;
    return j.dump(2) + "\n";
}

std::string report_text(const Report& r) {
    std::string out;
    out += "verdict: " + std::string(to_string(r.verdict)) + "\n";
    out += "mode: " + r.mode + "\n";
    out += "points_checked: " + std::to_string(r.points_checked) + "\n";
    out += "box:";
    for (std::size_t i = 0; i < r.box.size(); ++i) {
        out += (i ? ", " : " ") + r.coords[i] + " in [" + num(r.box[i].lo) + ", " + num(r.box[i].hi) + "]";
    }
    out += "\n";
    auto point = [&](const Point& p) {
        std::string s = "(";
        for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + num(p[i]);
        return s + ")";
    };
    if (r.worst) out += "worst: " + num(r.worst->criterion) + " at " + point(r.worst->point) + "\n";
    out += "failures: " + std::to_string(r.failure_count) + "\n";
    constexpr std::size_t kShown = 10;
    for (std::size_t i = 0; i < r.failures.size() && i < kShown; ++i) {
        out += "  " + point(r.failures[i].point) + ": " + r.failures[i].reason + "\n";
    }
    if (r.failure_count > kShown) out += "  ...\n";
    for (const auto& e : r.expected) {
        out += "expected " + e.label + ": max_error " + num(e.max_error) + (e.passed ? " ok" : " FAILED") + "\n";
    }
    for (const auto& n : r.notes) out += "note: " + n + "\n";
    out += "wall_time_ms: " + num(r.wall_time_ms) + "\n";
    return out;
}

}  // namespace hfree
