#ifndef HPTM_GSERIES_HPP
#define HPTM_GSERIES_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hptm/format.hpp"
#include "hptm/gamma.hpp"

// Finite generalized power series  sum c * x^p * t^(j + k*alpha)  for a fixed
// alpha in (0,1].  This is the carrier of every HPTM iterate: closed under
// addition, Cauchy product, spatial derivative, proportional delay and the
// fractional integral J^alpha.
//
// Exponents are exact integer pairs (j,k); merging never goes through floats,
// so t^(2*alpha) reached along different derivation paths always lands on the
// same key.  Zero coefficients are not stored.

namespace hptm {

/// Time exponent j + k*alpha as an exact integer pair.
struct GExp {
    int j = 0;
    int k = 0;
    friend constexpr auto operator<=>(const GExp&, const GExp&) = default;
};

struct TermKey {
    int x_pow = 0;
    GExp t_exp;
    friend constexpr auto operator<=>(const TermKey&, const TermKey&) = default;
};

class GSeries {
public:
    using TermMap = std::map<TermKey, double>;

    explicit GSeries(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0) || !(alpha <= 1.0)) {
            throw std::invalid_argument("GSeries: alpha must lie in (0,1], got " +
                                        std::to_string(alpha));
        }
    }

    static GSeries monomial(double alpha, double coeff, int x_pow, GExp e = {}) {
        GSeries s(alpha);
        s.add_term(coeff, x_pow, e);
        return s;
    }

    double alpha() const { return alpha_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    /// Numeric value of a stored time exponent.
    double t_exponent(GExp e) const { return e.j + e.k * alpha_; }

    /// Accumulate one monomial, keeping the canonical (zero-free) form.
    GSeries& add_term(double coeff, int x_pow, GExp e = {}) {
        if (!std::isfinite(coeff)) {
            throw std::invalid_argument("GSeries: non-finite coefficient");
        }
        if (x_pow < 0 || e.j < 0 || e.k < 0) {
            throw std::invalid_argument("GSeries: negative exponent");
        }
        if (coeff == 0.0) {
            return *this;
        }
        const TermKey key{x_pow, e};
        auto [it, inserted] = terms_.try_emplace(key, coeff);
        if (!inserted) {
            it->second += coeff;
            if (it->second == 0.0) {
                terms_.erase(it);
            }
        }
        return *this;
    }

    friend GSeries operator+(const GSeries& a, const GSeries& b) {
        a.require_same_alpha(b);
        GSeries out = a;
        for (const auto& [key, c] : b.terms_) {
            out.add_term(c, key.x_pow, key.t_exp);
        }
        return out;
    }

    friend GSeries operator-(const GSeries& a, const GSeries& b) { return a + (-1.0) * b; }

    friend GSeries operator-(const GSeries& a) { return (-1.0) * a; }

    friend GSeries operator*(const GSeries& a, double c) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("GSeries: non-finite scale factor");
        }
        GSeries out(a.alpha_);
        if (c == 0.0) {
            return out;
        }
        for (const auto& [key, v] : a.terms_) {
            out.add_term(v * c, key.x_pow, key.t_exp);
        }
        return out;
    }

    friend GSeries operator*(double c, const GSeries& a) { return a * c; }

    /// Cauchy product: x-powers add, time exponents add componentwise.
    friend GSeries operator*(const GSeries& a, const GSeries& b) {
        a.require_same_alpha(b);
        GSeries out(a.alpha_);
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                out.add_term(ca * cb, ka.x_pow + kb.x_pow,
                             GExp{ka.t_exp.j + kb.t_exp.j, ka.t_exp.k + kb.t_exp.k});
            }
        }
        return out;
    }

    /// m-fold x-derivative; terms with x_pow < m vanish.
    GSeries dx(int m) const {
        if (m < 0) {
            throw std::invalid_argument("GSeries::dx: negative order");
        }
        GSeries out(alpha_);
        for (const auto& [key, c] : terms_) {
            if (key.x_pow < m) {
                continue;
            }
            double f = 1.0;
            for (int i = 0; i < m; ++i) {
                f *= key.x_pow - i;
            }
            out.add_term(c * f, key.x_pow - m, key.t_exp);
        }
        return out;
    }

    /// Proportional delay (x,t) -> (da*x, db*t); exponent keys are unchanged,
    /// each coefficient picks up da^p * db^(j+k*alpha).
    GSeries delay(double da, double db) const {
        if (!(da > 0.0) || !(da <= 1.0) || !(db > 0.0) || !(db <= 1.0)) {
            throw std::invalid_argument("GSeries::delay: factors must lie in (0,1]");
        }
        GSeries out(alpha_);
        for (const auto& [key, c] : terms_) {
            long double w = 1.0L;
            for (int i = 0; i < key.x_pow; ++i) {
                w *= da;
            }
            w *= std::pow(static_cast<long double>(db),
                          static_cast<long double>(t_exponent(key.t_exp)));
            out.add_term(static_cast<double>(c * w), key.x_pow, key.t_exp);
        }
        return out;
    }

    /// Fractional integral J^alpha: c * x^p * t^q  ->  c * G(q+1)/G(q+alpha+1)
    /// * x^p * t^(q+alpha), i.e. key (p,j,k) -> (p,j,k+1).
    GSeries jalpha() const {
        GSeries out(alpha_);
        for (const auto& [key, c] : terms_) {
            const double q = t_exponent(key.t_exp);
            out.add_term(c * frac_integral_coeff(q, alpha_), key.x_pow,
                         GExp{key.t_exp.j, key.t_exp.k + 1});
        }
        return out;
    }

    /// Point evaluation with the convention t^0 := 1 at t = 0 (so a partial
    /// sum evaluated at t = 0 returns the initial polynomial).
    double eval(double x, double t) const {
        if (!(t >= 0.0)) {
            throw std::invalid_argument("GSeries::eval: t must be >= 0");
        }
        long double acc = 0.0L;
        for (const auto& [key, c] : terms_) {
            const double q = t_exponent(key.t_exp);
            long double tv;
            if (t == 0.0) {
                tv = (q == 0.0) ? 1.0L : 0.0L;
            } else {
                tv = std::pow(static_cast<long double>(t), static_cast<long double>(q));
            }
            long double xv = 1.0L;
            for (int i = 0; i < key.x_pow; ++i) {
                xv *= x;
            }
            acc += static_cast<long double>(c) * xv * tv;
        }
        return static_cast<double>(acc);
    }

    /// sum |c| * x_max^p * t_max^q — dominates the sup norm on
    /// [0,x_max] x [0,t_max].
    double bound_norm(double x_max, double t_max) const {
        if (!(x_max > 0.0) || !(t_max > 0.0)) {
            throw std::invalid_argument("GSeries::bound_norm: box bounds must be positive");
        }
        long double acc = 0.0L;
        for (const auto& [key, c] : terms_) {
            long double w = std::fabs(static_cast<long double>(c));
            for (int i = 0; i < key.x_pow; ++i) {
                w *= x_max;
            }
            w *= std::pow(static_cast<long double>(t_max),
                          static_cast<long double>(t_exponent(key.t_exp)));
            acc += w;
        }
        return static_cast<double>(acc);
    }

    /// Copy without terms of magnitude <= eps.  Evaluation-speed helper only;
    /// the solver recursion never calls it.
    GSeries prune(double eps = 0.0) const {
        if (!(eps >= 0.0)) {
            throw std::invalid_argument("GSeries::prune: eps must be >= 0");
        }
        GSeries out(alpha_);
        for (const auto& [key, c] : terms_) {
            if (std::fabs(c) > eps) {
                out.add_term(c, key.x_pow, key.t_exp);
            }
        }
        return out;
    }

    /// Debug/serialized form: one term per line, `coeff x^p t^(j+k*alpha)`,
    /// sorted by (time-exponent value, x_pow).
    std::string to_debug_string() const {
        struct Row {
            double q;
            TermKey key;
            double c;
        };
        std::vector<Row> rows;
        rows.reserve(terms_.size());
        for (const auto& [key, c] : terms_) {
            rows.push_back({t_exponent(key.t_exp), key, c});
        }
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.q != b.q) return a.q < b.q;
            if (a.key.x_pow != b.key.x_pow) return a.key.x_pow < b.key.x_pow;
            return a.key.t_exp.j < b.key.t_exp.j;
        });
        std::string out;
        for (const Row& r : rows) {
            out += format_double(r.c);
            out += " x^" + std::to_string(r.key.x_pow);
            out += " t^(" + std::to_string(r.key.t_exp.j) + "+" +
                   std::to_string(r.key.t_exp.k) + "*alpha)\n";
        }
        return out;
    }

    friend bool operator==(const GSeries& a, const GSeries& b) {
        return a.alpha_ == b.alpha_ && a.terms_ == b.terms_;
    }

private:
    void require_same_alpha(const GSeries& other) const {
        if (alpha_ != other.alpha_) {
            throw std::invalid_argument("GSeries: mixed-alpha arithmetic (" +
                                        std::to_string(alpha_) + " vs " +
                                        std::to_string(other.alpha_) + ")");
        }
    }

    double alpha_;
    TermMap terms_;
};

}  // namespace hptm

#endif  // HPTM_GSERIES_HPP
