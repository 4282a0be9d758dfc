#ifndef HPTM_RESIDUAL_HPP
#define HPTM_RESIDUAL_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hptm/solver.hpp"

// Independent verification that a truncated solution approximately satisfies
// the original fractional delay PDE.  The Caputo derivative is discretized
// with the standard L1 scheme on a uniform time grid, and the right-hand side
// is evaluated pointwise by direct (meshfree) series evaluation, so none of
// the series operators the solver itself relies on can confirm their own
// mistakes.  Delayed arguments (a*x, b*t) never need interpolation.

namespace hptm {

struct GridSpec {
    std::vector<double> x_points;  // ascending
    std::vector<double> t_points;  // ascending

    /// t = 0, h, 2h, ..., up to t_max (inclusive within rounding).
    static GridSpec uniform_time(std::vector<double> xs, double t_max, double h) {
        if (!(h > 0.0) || !(t_max > 0.0)) {
            throw std::invalid_argument("GridSpec: t_max and h must be positive");
        }
        GridSpec g;
        g.x_points = std::move(xs);
        const int m = static_cast<int>(std::floor(t_max / h + 0.5));
        for (int i = 0; i <= m; ++i) {
            g.t_points.push_back(i * h);
        }
        return g;
    }

    /// The L1 discretization needs t_0 = 0, at least 3 nodes and uniform
    /// spacing; evaluation-only consumers (table grids) may use any ascending
    /// list, so this is checked at the point of use.
    void validate_for_l1() const {
        if (t_points.size() < 3) {
            throw std::invalid_argument("GridSpec: need at least 3 time points");
        }
        if (t_points.front() != 0.0) {
            throw std::invalid_argument("GridSpec: time grid must start at 0");
        }
        const double h = t_points[1] - t_points[0];
        for (std::size_t i = 1; i < t_points.size(); ++i) {
            if (std::fabs((t_points[i] - t_points[i - 1]) - h) > 1e-12) {
                throw std::invalid_argument("GridSpec: time grid must be uniform");
            }
        }
    }

    double h() const { return t_points.size() > 1 ? t_points[1] - t_points[0] : 0.0; }
};

/// L1 discretization of the Caputo derivative on uniform samples u(t_0..t_M);
/// returns approximations at t_1..t_M.  Weights w_r = (r+1)^(1-alpha) -
/// r^(1-alpha); accuracy O(h^(2-alpha)) for twice-differentiable u.  At
/// alpha = 1 the scheme degenerates to plain backward differences, provided
/// here as the limiting branch.
inline std::vector<double> caputo_l1(std::span<const double> samples, double alpha, double h) {
    if (samples.size() < 2) {
        throw std::invalid_argument("caputo_l1: need at least two samples");
    }
    if (!(h > 0.0)) {
        throw std::invalid_argument("caputo_l1: spacing must be positive");
    }
    const std::size_t M = samples.size() - 1;
    std::vector<double> out;
    out.reserve(M);
    if (alpha == 1.0) {
        for (std::size_t m = 1; m <= M; ++m) {
            out.push_back((samples[m] - samples[m - 1]) / h);
        }
        return out;
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::domain_error("caputo_l1: alpha must lie in (0,1) (or exactly 1)");
    }
    std::vector<double> w(M);
    for (std::size_t r = 0; r < M; ++r) {
        w[r] = std::pow(r + 1.0, 1.0 - alpha) - std::pow(static_cast<double>(r), 1.0 - alpha);
    }
    const double scale = std::pow(h, -alpha) / std::exp(log_gamma(2.0 - alpha));
    for (std::size_t m = 1; m <= M; ++m) {
        long double acc = 0.0L;
        for (std::size_t r = 0; r < m; ++r) {
            acc += static_cast<long double>(w[r]) * (samples[m - r] - samples[m - r - 1]);
        }
        out.push_back(static_cast<double>(acc) * scale);
    }
    return out;
}

/// Pointwise value of the right-hand side applied to a fixed series S:
/// delayed derivatives transform S (delay, then differentiate) and evaluate;
/// everything else follows the tree structure.
inline double eval_rhs_at(const RhsExpr& expr, const GSeries& S, double x, double t) {
    struct V {
        const GSeries& S;
        double x, t;
        double at(const RhsExpr& e) const { return std::visit(V{S, x, t}, e.node); }
        double operator()(const DelayedDeriv& d) const {
            return S.delay(d.a, d.b).dx(d.m).eval(x, t);
        }
        double operator()(const Scaled& s) const { return s.c * at(*s.inner); }
        double operator()(const Sum& s) const {
            double acc = 0.0;
            for (const auto& a : s.addends) acc += at(*a);
            return acc;
        }
        double operator()(const Prod& p) const {
            double acc = 1.0;
            for (const auto& f : p.factors) acc *= at(*f);
            return acc;
        }
        double operator()(const Source& s) const {
            return detail::rebase_alpha_free(s.series, S.alpha()).eval(x, t);
        }
    };
    return std::visit(V{S, x, t}, expr.node);
}

/// Max defect | D_t^alpha S_ell - f(S_ell) | over the grid, t = 0 excluded
/// (the L1 formula is undefined there).
inline double residual_norm(const ProblemSpec& problem, const HptmSolution& sol, int ell,
                            const GridSpec& grid) {
    if (ell < 0 || ell > sol.order()) {
        throw std::invalid_argument("residual_norm: ell must lie in [0," +
                                    std::to_string(sol.order()) + "]");
    }
    grid.validate_for_l1();
    const GSeries S = partial_sum(sol, ell);
    const double h = grid.h();
    double worst = 0.0;
    std::vector<double> samples(grid.t_points.size());
    for (double x : grid.x_points) {
        for (std::size_t i = 0; i < grid.t_points.size(); ++i) {
            samples[i] = S.eval(x, grid.t_points[i]);
        }
        const std::vector<double> capu = caputo_l1(samples, problem.alpha, h);
        for (std::size_t m = 1; m < grid.t_points.size(); ++m) {
            const double f = eval_rhs_at(problem.rhs, S, x, grid.t_points[m]);
            worst = std::max(worst, std::fabs(capu[m - 1] - f));
        }
    }
    return worst;
}

struct CompareRow {
    double x = 0.0;
    double t = 0.0;
    double exact = 0.0;
    double approx = 0.0;
    double abs_err = 0.0;
};

/// Exact-vs-approximate rows over the grid (the reference-table layout).
/// Requires a closed form; without one, residual_norm is the diagnostic.
inline std::vector<CompareRow> compare_exact(const ProblemSpec& problem, const HptmSolution& sol,
                                             int ell, const GridSpec& grid) {
    if (ell < 0 || ell > sol.order()) {
        throw std::invalid_argument("compare_exact: ell must lie in [0," +
                                    std::to_string(sol.order()) + "]");
    }
    if (!exact_eval(problem, 0.0, 0.0)) {
        throw std::invalid_argument(
            "compare_exact: no closed form available at this alpha; use residual_norm instead");
    }
    const GSeries S = partial_sum(sol, ell);
    std::vector<CompareRow> rows;
    rows.reserve(grid.x_points.size() * grid.t_points.size());
    for (double x : grid.x_points) {
        for (double t : grid.t_points) {
            const double ex = *exact_eval(problem, x, t);
            const double ap = S.eval(x, t);
            rows.push_back({x, t, ex, ap, std::fabs(ex - ap)});
        }
    }
    return rows;
}

}  // namespace hptm

#endif  // HPTM_RESIDUAL_HPP
