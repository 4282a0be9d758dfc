#ifndef HPTM_RHS_AST_HPP
#define HPTM_RHS_AST_HPP

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hptm/gseries.hpp"

// Expression tree for the delay right-hand side
//   f(x, u(a0 x, b0 t), d/dx u(a1 x, b1 t), ..., d^m/dx^m u(am x, bm t)),
// its text grammar, and the homotopy-coefficient extraction that drives the
// solver recursion.
//
// Grammar (whitespace insignificant, numbers are plain decimal literals):
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := 'D' digit '[' uref ']' | uref | number
//   uref   := 'u(' number 'x' ',' number 't' ')'
// A bare uref is a delayed value (derivative order 0); bare number factors
// fold into a scale; a leading '-' scales the term by -1.
//
// D m [u(ax,bt)] denotes the m-th derivative of the composite map
// x -> u(ax, bt): substitute first, then differentiate.  This is the reading
// under which all three built-in problems reproduce their closed forms.

namespace hptm {

struct RhsExpr;
using RhsExprPtr = std::shared_ptr<const RhsExpr>;

inline constexpr int kMaxDerivOrder = 4;
inline constexpr int kMaxDegree = 4;  // total multiplicative degree of a tree

/// d^m/dx^m [ u(a*x, b*t) ]
struct DelayedDeriv {
    int m = 0;
    double a = 1.0;
    double b = 1.0;
};

struct Scaled {
    double c = 1.0;
    RhsExprPtr inner;
};

struct Prod {
    std::vector<RhsExprPtr> factors;  // >= 2
};

struct Sum {
    std::vector<RhsExprPtr> addends;  // >= 1
};

/// Known analytic source term h(x,t), order-0 contribution only.
struct Source {
    GSeries series;
};

struct RhsExpr {
    std::variant<DelayedDeriv, Scaled, Prod, Sum, Source> node;
};

/// Total multiplicative degree: delayed values count 1, products add.
inline int multiplicative_degree(const RhsExpr& e) {
    struct V {
        int operator()(const DelayedDeriv&) const { return 1; }
        int operator()(const Source&) const { return 0; }
        int operator()(const Scaled& s) const { return multiplicative_degree(*s.inner); }
        int operator()(const Sum& s) const {
            int d = 0;
            for (const auto& a : s.addends) d = std::max(d, multiplicative_degree(*a));
            return d;
        }
        int operator()(const Prod& p) const {
            int d = 0;
            for (const auto& f : p.factors) d += multiplicative_degree(*f);
            return d;
        }
    };
    return std::visit(V{}, e.node);
}

inline RhsExpr delayed_deriv(int m, double a, double b) {
    if (m < 0 || m > kMaxDerivOrder) {
        throw std::invalid_argument("delayed_deriv: derivative order out of [0," +
                                    std::to_string(kMaxDerivOrder) + "]");
    }
    if (!(a > 0.0) || !(a <= 1.0) || !(b > 0.0) || !(b <= 1.0)) {
        throw std::invalid_argument("delayed_deriv: delay factors must lie in (0,1]");
    }
    return RhsExpr{DelayedDeriv{m, a, b}};
}

inline RhsExpr scaled(double c, RhsExpr inner) {
    if (!std::isfinite(c)) {
        throw std::invalid_argument("scaled: non-finite factor");
    }
    return RhsExpr{Scaled{c, std::make_shared<const RhsExpr>(std::move(inner))}};
}

inline RhsExpr product(std::vector<RhsExpr> factors) {
    if (factors.size() < 2) {
        throw std::invalid_argument("product: needs at least two factors");
    }
    Prod p;
    int deg = 0;
    for (auto& f : factors) {
        deg += multiplicative_degree(f);
        p.factors.push_back(std::make_shared<const RhsExpr>(std::move(f)));
    }
    if (deg > kMaxDegree) {
        throw std::invalid_argument("product: multiplicative degree " + std::to_string(deg) +
                                    " exceeds " + std::to_string(kMaxDegree));
    }
    return RhsExpr{std::move(p)};
}

inline RhsExpr sum_of(std::vector<RhsExpr> addends) {
    if (addends.empty()) {
        throw std::invalid_argument("sum_of: needs at least one addend");
    }
    Sum s;
    for (auto& a : addends) {
        s.addends.push_back(std::make_shared<const RhsExpr>(std::move(a)));
    }
    return RhsExpr{std::move(s)};
}

inline RhsExpr source(GSeries s) { return RhsExpr{Source{std::move(s)}}; }

inline bool operator==(const RhsExpr& a, const RhsExpr& b);

namespace detail {
inline bool ptr_eq(const RhsExprPtr& a, const RhsExprPtr& b) { return *a == *b; }
}  // namespace detail

inline bool operator==(const RhsExpr& a, const RhsExpr& b) {
    if (a.node.index() != b.node.index()) return false;
    struct V {
        const RhsExpr& rhs;
        bool operator()(const DelayedDeriv& x) const {
            const auto& y = std::get<DelayedDeriv>(rhs.node);
            return x.m == y.m && x.a == y.a && x.b == y.b;
        }
        bool operator()(const Scaled& x) const {
            const auto& y = std::get<Scaled>(rhs.node);
            return x.c == y.c && detail::ptr_eq(x.inner, y.inner);
        }
        bool operator()(const Prod& x) const {
            const auto& y = std::get<Prod>(rhs.node);
            if (x.factors.size() != y.factors.size()) return false;
            for (std::size_t i = 0; i < x.factors.size(); ++i) {
                if (!detail::ptr_eq(x.factors[i], y.factors[i])) return false;
            }
            return true;
        }
        bool operator()(const Sum& x) const {
            const auto& y = std::get<Sum>(rhs.node);
            if (x.addends.size() != y.addends.size()) return false;
            for (std::size_t i = 0; i < x.addends.size(); ++i) {
                if (!detail::ptr_eq(x.addends[i], y.addends[i])) return false;
            }
            return true;
        }
        bool operator()(const Source& x) const {
            return x.series == std::get<Source>(rhs.node).series;
        }
    };
    return std::visit(V{b}, a.node);
}

// ---------------------------------------------------------------------------
// Parsing

struct ParseDiagnostic {
    std::size_t offset = 0;
    std::string message;
    std::string fragment;
};

using ParseResult = std::variant<RhsExpr, ParseDiagnostic>;

namespace detail {

class RhsParser {
public:
    explicit RhsParser(std::string_view src) : src_(src) {}

    ParseResult run() {
        auto e = parse_expr();
        if (failed_) return diag_;
        skip_ws();
        if (pos_ != src_.size()) {
            return fail(pos_, "unexpected trailing input");
        }
        const int deg = multiplicative_degree(*e);
        if (deg > kMaxDegree) {
            return fail(0, "multiplicative degree " + std::to_string(deg) + " exceeds " +
                               std::to_string(kMaxDegree));
        }
        return std::move(*e);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    bool failed_ = false;
    ParseDiagnostic diag_;

    ParseDiagnostic fail(std::size_t at, std::string msg) {
        if (!failed_) {
            failed_ = true;
            diag_.offset = at;
            diag_.message = std::move(msg);
            diag_.fragment = std::string(src_.substr(at, std::min<std::size_t>(16, src_.size() - at)));
        }
        return diag_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    // number := digits ['.' digits] | '.' digits
    std::optional<double> parse_number() {
        skip_ws();
        std::size_t start = pos_;
        std::size_t i = pos_;
        while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
        bool any = i > start;
        if (i < src_.size() && src_[i] == '.') {
            ++i;
            std::size_t fs = i;
            while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
            any = any || i > fs;
        }
        if (!any) return std::nullopt;
        double v = std::strtod(std::string(src_.substr(start, i - start)).c_str(), nullptr);
        pos_ = i;
        return v;
    }

    // uref := 'u(' number 'x' ',' number 't' ')'
    std::optional<RhsExpr> parse_uref(int m) {
        skip_ws();
        const std::size_t at = pos_;
        if (!(pos_ < src_.size() && src_[pos_] == 'u')) {
            fail(pos_, "expected 'u('");
            return std::nullopt;
        }
        ++pos_;
        if (!consume('(')) {
            fail(pos_, "expected '(' after 'u'");
            return std::nullopt;
        }
        auto a = parse_number();
        if (!a) {
            fail(pos_, "expected delay factor before 'x'");
            return std::nullopt;
        }
        if (!consume('x')) {
            fail(pos_, "expected 'x' after delay factor");
            return std::nullopt;
        }
        if (!consume(',')) {
            fail(pos_, "expected ','");
            return std::nullopt;
        }
        auto b = parse_number();
        if (!b) {
            fail(pos_, "expected delay factor before 't'");
            return std::nullopt;
        }
        if (!consume('t')) {
            fail(pos_, "expected 't' after delay factor");
            return std::nullopt;
        }
        if (!consume(')')) {
            fail(pos_, "expected ')'");
            return std::nullopt;
        }
        if (!(*a > 0.0 && *a <= 1.0) || !(*b > 0.0 && *b <= 1.0)) {
            fail(at, "delay factors must lie in (0,1]");
            return std::nullopt;
        }
        return delayed_deriv(m, *a, *b);
    }

    // factor := 'D' digit '[' uref ']' | uref | number (number handled by caller)
    std::optional<RhsExpr> parse_deriv_or_uref() {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == 'D') {
            const std::size_t at = pos_;
            ++pos_;
            if (!(pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))) {
                fail(pos_, "expected derivative order digit after 'D'");
                return std::nullopt;
            }
            const int m = src_[pos_] - '0';
            ++pos_;
            if (m > kMaxDerivOrder) {
                fail(at, "derivative order exceeds " + std::to_string(kMaxDerivOrder));
                return std::nullopt;
            }
            if (!consume('[')) {
                fail(pos_, "expected '[' after derivative order");
                return std::nullopt;
            }
            auto u = parse_uref(m);
            if (!u) return std::nullopt;
            if (!consume(']')) {
                fail(pos_, "expected ']'");
                return std::nullopt;
            }
            return u;
        }
        return parse_uref(0);
    }

    // term := factor ('*' factor)*, numeric factors folded into one scale
    std::optional<RhsExpr> parse_term(bool negate) {
        double c = negate ? -1.0 : 1.0;
        std::vector<RhsExpr> factors;
        while (true) {
            skip_ws();
            if (pos_ < src_.size() &&
                (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
                auto v = parse_number();
                if (!v) {
                    fail(pos_, "malformed number");
                    return std::nullopt;
                }
                c *= *v;
            } else {
                auto f = parse_deriv_or_uref();
                if (!f) return std::nullopt;
                factors.push_back(std::move(*f));
            }
            if (!consume('*')) break;
        }
        if (factors.empty()) {
            // constant term: an alpha-free source monomial
            return source(GSeries::monomial(1.0, c, 0));
        }
        RhsExpr body = factors.size() == 1 ? std::move(factors.front()) : product(std::move(factors));
        if (c == 1.0) return body;
        return scaled(c, std::move(body));
    }

    std::optional<RhsExpr> parse_expr() {
        std::vector<RhsExpr> addends;
        bool neg = false;
        if (consume('-')) {
            neg = true;
        } else {
            consume('+');
        }
        while (true) {
            auto t = parse_term(neg);
            if (!t) return std::nullopt;
            addends.push_back(std::move(*t));
            skip_ws();
            if (consume('+')) {
                neg = false;
            } else if (consume('-')) {
                neg = true;
            } else {
                break;
            }
        }
        if (addends.size() == 1) return std::move(addends.front());
        return sum_of(std::move(addends));
    }
};

}  // namespace detail

/// Parse the RHS grammar; returns the tree or a position-tagged diagnostic.
inline ParseResult parse_rhs(std::string_view text) {
    try {
        return detail::RhsParser(text).run();
    } catch (const std::invalid_argument& e) {
        return ParseDiagnostic{0, e.what(), std::string(text.substr(0, 16))};
    }
}

// ---------------------------------------------------------------------------
// Printing (exact inverse of the parser on parser-shaped trees; nestings the
// grammar cannot express fall back to a bracketed debug form)

namespace detail {

inline std::string print_rhs(const RhsExpr& e, bool as_factor);

inline std::string print_signed_magnitude(const RhsExpr& e, bool& negative) {
    negative = false;
    if (const auto* s = std::get_if<Scaled>(&e.node)) {
        if (s->c < 0.0) {
            negative = true;
            if (s->c == -1.0) return print_rhs(*s->inner, false);
            return format_double(-s->c) + "*" + print_rhs(*s->inner, false);
        }
    }
    return print_rhs(e, false);
}

inline std::string print_rhs(const RhsExpr& e, bool as_factor) {
    struct V {
        bool as_factor;
        std::string operator()(const DelayedDeriv& d) const {
            std::string u = "u(" + format_double(d.a) + "x," + format_double(d.b) + "t)";
            if (d.m == 0) return u;
            return "D" + std::to_string(d.m) + "[" + u + "]";
        }
        std::string operator()(const Scaled& s) const {
            std::string body = format_double(s.c) + "*" + print_rhs(*s.inner, true);
            return as_factor ? "(" + body + ")" : body;
        }
        std::string operator()(const Prod& p) const {
            std::string out;
            for (std::size_t i = 0; i < p.factors.size(); ++i) {
                if (i) out += "*";
                out += print_rhs(*p.factors[i], true);
            }
            return out;
        }
        std::string operator()(const Sum& s) const {
            std::string out;
            for (std::size_t i = 0; i < s.addends.size(); ++i) {
                bool neg = false;
                std::string body = print_signed_magnitude(*s.addends[i], neg);
                if (i == 0) {
                    out += neg ? "-" + body : body;
                } else {
                    out += neg ? " - " + body : " + " + body;
                }
            }
            return as_factor ? "(" + out + ")" : out;
        }
        std::string operator()(const Source& s) const {
            const auto& tm = s.series.terms();
            if (tm.size() == 1) {
                const auto& [key, c] = *tm.begin();
                if (key.x_pow == 0 && key.t_exp == GExp{}) return format_double(c);
            }
            std::string flat = s.series.to_debug_string();
            for (auto& ch : flat) {
                if (ch == '\n') ch = ';';
            }
            return "(source: " + flat + ")";
        }
    };
    return std::visit(V{as_factor}, e.node);
}

/// Alpha-free series (all k = 0) may be re-tagged with a new alpha; anything
/// else must not cross alphas.
inline GSeries rebase_alpha_free(const GSeries& s, double alpha) {
    if (s.alpha() == alpha) return s;
    GSeries out(alpha);
    for (const auto& [key, c] : s.terms()) {
        if (key.t_exp.k != 0) {
            throw std::invalid_argument(
                "source term with fractional time powers cannot change alpha");
        }
        out.add_term(c, key.x_pow, key.t_exp);
    }
    return out;
}

}  // namespace detail

inline std::string to_string(const RhsExpr& e) { return detail::print_rhs(e, false); }

// ---------------------------------------------------------------------------
// Homotopy coefficients

/// Order-n coefficient of the RHS under the substitution u -> sum p^r u_r.
/// Delayed derivatives act order-by-order (delay, then differentiate);
/// products convolve over all ordered compositions r_1 + ... + r_k = n;
/// sources contribute at order 0 only.
inline GSeries homotopy_coeff(const RhsExpr& expr, std::span<const GSeries> u, int n) {
    if (u.empty()) {
        throw std::invalid_argument("homotopy_coeff: empty iterate list");
    }
    if (n < 0 || static_cast<std::size_t>(n) >= u.size()) {
        throw std::invalid_argument("homotopy_coeff: order " + std::to_string(n) +
                                    " needs iterates u_0..u_" + std::to_string(n));
    }
    const double alpha = u[0].alpha();

    struct V {
        std::span<const GSeries> u;
        int n;
        double alpha;

        GSeries at(const RhsExpr& e, int r) const { return std::visit(V{u, r, alpha}, e.node); }

        GSeries operator()(const DelayedDeriv& d) const {
            return u[n].delay(d.a, d.b).dx(d.m);
        }
        GSeries operator()(const Scaled& s) const { return at(*s.inner, n) * s.c; }
        GSeries operator()(const Sum& s) const {
            GSeries acc(alpha);
            for (const auto& a : s.addends) acc = acc + at(*a, n);
            return acc;
        }
        GSeries operator()(const Source& s) const {
            if (n != 0) return GSeries(alpha);
            return detail::rebase_alpha_free(s.series, alpha);
        }
        GSeries operator()(const Prod& p) const {
            const std::size_t k = p.factors.size();
            // contributions of each factor at every order 0..n
            std::vector<std::vector<GSeries>> per;
            per.reserve(k);
            for (const auto& f : p.factors) {
                std::vector<GSeries> row;
                row.reserve(n + 1);
                for (int r = 0; r <= n; ++r) row.push_back(at(*f, r));
                per.push_back(std::move(row));
            }
            GSeries acc(alpha);
            GSeries one = GSeries::monomial(alpha, 1.0, 0);
            // enumerate ordered compositions of n into k parts
            std::vector<int> parts(k, 0);
            auto rec = [&](auto&& self, std::size_t i, int rem, const GSeries& partial) -> void {
                if (i == k - 1) {
                    acc = acc + partial * per[i][rem];
                    return;
                }
                for (int r = 0; r <= rem; ++r) {
                    self(self, i + 1, rem - r, partial * per[i][r]);
                }
            };
            rec(rec, 0, n, one);
            return acc;
        }
    };
    return std::visit(V{u, n, alpha}, expr.node);
}

}  // namespace hptm

#endif  // HPTM_RHS_AST_HPP
