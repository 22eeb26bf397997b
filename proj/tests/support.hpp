#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "hfree/expr.hpp"

namespace hfree::test {

/// Test-side randomness, deliberately independent of the library sampler.
class Rng {
public:
    explicit Rng(unsigned long long seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    std::vector<double> point(std::size_t m, double lo = -2.0, double hi = 2.0) {
        std::vector<double> p(m);
        for (auto& x : p) x = uniform(lo, hi);
        return p;
    }

    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double lo = -2.0, double hi = 2.0) {
        Eigen::MatrixXd a(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = uniform(lo, hi);
        }
        return a;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Random expression over `vars` whose values stay moderate on [-1, 1]^n:
/// divisions and negative powers only ever see denominators bounded away
/// from zero.
class ExprGen {
public:
    ExprGen(Rng& rng, std::vector<std::string> vars) : rng_(rng), vars_(std::move(vars)) {}

    Expr operator()(int depth) {
        if (depth <= 0 || rng_.integer(0, 5) == 0) return leaf();
        switch (rng_.integer(0, 9)) {
            case 0: return (*this)(depth - 1) + (*this)(depth - 1);
            case 1: return (*this)(depth - 1) - (*this)(depth - 1);
            case 2:
            case 3: return (*this)(depth - 1) * (*this)(depth - 1);
            case 4: return (*this)(depth - 1) / (Expr(2.5) + sin((*this)(depth - 1)));
            case 5: return pow((*this)(depth - 1), rng_.integer(0, 3));
            case 6: return pow(Expr(1.5) + cos((*this)(depth - 1)), rng_.integer(-3, -1));
            case 7: return sin((*this)(depth - 1));
            case 8: return cos((*this)(depth - 1));
            default: return exp(sin((*this)(depth - 1)));
        }
    }

private:
    Expr leaf() {
        if (rng_.integer(0, 2) == 0) return Expr(static_cast<double>(rng_.integer(-4, 4)) / 2.0);
        return Expr::coord(vars_[static_cast<std::size_t>(rng_.integer(0, static_cast<int>(vars_.size()) - 1))]);
    }

    Rng& rng_;
    std::vector<std::string> vars_;
};

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

/// Determinant by the Leibniz permutation sum, accumulated in long double.
inline double permutation_det(const Eigen::MatrixXd& a) {
    const auto n = static_cast<int>(a.rows());
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    long double total = 0.0L;
    do {
        int inversions = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
        }
        long double term = inversions % 2 == 0 ? 1.0L : -1.0L;
        for (int i = 0; i < n; ++i) term *= a(i, perm[static_cast<std::size_t>(i)]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(total);
}

}  // namespace hfree::test
