#ifndef HPTM_SOLVER_HPP
#define HPTM_SOLVER_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hptm/problems.hpp"

// The HPTM recursion
//   u_0     = psi(x)
//   u_{n+1} = J^alpha[ H_n(u_0..u_n) ]
// where H_n is the order-n homotopy coefficient of the right-hand side, plus
// partial sums and the ratio-test truncation-error bound
//   ||u - S_ell|| <= gamma^(ell+1) / (1 - gamma) * ||u_0||.
//
// The Laplace / inverse-Laplace pair of the transform step collapses to the
// term-wise fractional integral J^alpha: on every monomial t^q the power rule
// gives exactly L^{-1}[s^{-alpha} L[t^q]], so no numeric transform inversion
// exists anywhere.

namespace hptm {

/// Thrown when the recursion's stored-monomial budget is exceeded.
class resource_error : public std::runtime_error {
public:
    resource_error(int order, std::size_t terms, std::size_t cap)
        : std::runtime_error("term budget exceeded at order " + std::to_string(order) + " (" +
                             std::to_string(terms) + " stored monomials, cap " +
                             std::to_string(cap) + ")"),
          order_(order) {}
    int order() const { return order_; }

private:
    int order_;
};

struct SolveOptions {
    std::size_t max_terms = 100000;  // total stored monomials across u_0..u_N
};

struct HptmSolution {
    ProblemSpec problem;
    std::vector<GSeries> terms;  // u_0 .. u_N

    double alpha() const { return problem.alpha; }
    int order() const { return static_cast<int>(terms.size()) - 1; }
};

inline HptmSolution solve(const ProblemSpec& problem, int order,
                          const SolveOptions& options = {}) {
    if (order < 1) {
        throw std::invalid_argument("solve: order must be >= 1");
    }
    HptmSolution sol{problem, {}};
    sol.terms.reserve(order + 1);
    sol.terms.push_back(problem.psi);
    std::size_t stored = problem.psi.size();
    for (int n = 0; n < order; ++n) {
        GSeries next = homotopy_coeff(problem.rhs, sol.terms, n).jalpha();
        stored += next.size();
        if (stored > options.max_terms) {
            throw resource_error(n + 1, stored, options.max_terms);
        }
        sol.terms.push_back(std::move(next));
    }
    return sol;
}

/// S_ell = u_0 + ... + u_ell.
inline GSeries partial_sum(const HptmSolution& sol, int ell) {
    if (ell < 0 || ell > sol.order()) {
        throw std::invalid_argument("partial_sum: ell must lie in [0," +
                                    std::to_string(sol.order()) + "]");
    }
    GSeries s = sol.terms[0];
    for (int n = 1; n <= ell; ++n) {
        s = s + sol.terms[n];
    }
    return s;
}

struct ErrorEstimate {
    std::vector<std::optional<double>> gammas;  // gammas[i] is the ratio for n = i+1
    std::optional<double> gamma;                // max finite ratio
    std::optional<double> bound;                // finite only when gamma < 1
    double x_max = 0.0;
    double t_max = 0.0;
};

/// Ratio-test certificate on [0,x_max] x [0,t_max].  Norms are the coefficient
/// bound (bound_norm), which dominates the sup norm, so a finite bound stays
/// valid for the true error.  Ratios with zero denominator are skipped.
inline ErrorEstimate error_bound(const HptmSolution& sol, int ell, double x_max, double t_max) {
    if (ell < 1 || ell > sol.order()) {
        throw std::invalid_argument("error_bound: ell must lie in [1," +
                                    std::to_string(sol.order()) + "]");
    }
    ErrorEstimate est;
    est.x_max = x_max;
    est.t_max = t_max;
    std::vector<double> norms;
    norms.reserve(ell + 1);
    for (int n = 0; n <= ell; ++n) {
        norms.push_back(sol.terms[n].bound_norm(x_max, t_max));
    }
    for (int n = 1; n <= ell; ++n) {
        if (norms[n - 1] == 0.0) {
            est.gammas.push_back(std::nullopt);
            continue;
        }
        const double g = norms[n] / norms[n - 1];
        est.gammas.push_back(g);
        if (!est.gamma || g > *est.gamma) {
            est.gamma = g;
        }
    }
    if (est.gamma && *est.gamma < 1.0) {
        double p = 1.0;
        for (int i = 0; i <= ell; ++i) {
            p *= *est.gamma;
        }
        est.bound = p / (1.0 - *est.gamma) * norms[0];
    }
    return est;
}

}  // namespace hptm

#endif  // HPTM_SOLVER_HPP
