#ifndef HPTM_PROBLEMS_HPP
#define HPTM_PROBLEMS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "hptm/rhs_ast.hpp"

// Problem definitions: the three built-in delay problems plus a line-oriented
// `key = value` file format.
//
//   # comment
//   name  = ex2            (optional)
//   alpha = 0.8
//   ic    = 1*x^2
//   rhs   = u(1x,0.5t)*D2[u(1x,0.5t)] - u(1x,1t)
//   exact = x^2*exp(t)     (optional; one of x*exp(t), x^2*exp(t), x^2*exp(-t))
//
// Keys are case-sensitive; alpha must lie in (0,1]; the initial condition is
// a polynomial in x written as `c*x^p` terms joined by '+'/'-'.

namespace hptm {

enum class ExactForm { none, x_exp_t, x2_exp_t, x2_exp_neg_t };

inline std::string_view exact_form_name(ExactForm f) {
    switch (f) {
        case ExactForm::x_exp_t: return "x*exp(t)";
        case ExactForm::x2_exp_t: return "x^2*exp(t)";
        case ExactForm::x2_exp_neg_t: return "x^2*exp(-t)";
        default: return "";
    }
}

struct ProblemSpec {
    std::string name;
    double alpha = 1.0;
    GSeries psi;   // pure x-polynomial: every key has j = k = 0
    RhsExpr rhs;
    ExactForm exact_alpha1 = ExactForm::none;

    /// Same problem re-tagged with a different alpha (psi is alpha-free).
    ProblemSpec with_alpha(double a) const {
        ProblemSpec out = *this;
        out.alpha = a;
        out.psi = detail::rebase_alpha_free(psi, a);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Initial-condition polynomial:  poly := ['+'|'-'] pterm (('+'|'-') pterm)*
//                                pterm := number ['*' 'x' ['^' int]] | 'x' ['^' int]

namespace detail {

inline std::optional<GSeries> parse_polynomial(std::string_view text, double alpha,
                                               std::string& error) {
    GSeries out(alpha);
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto number = [&]() -> std::optional<double> {
        skip();
        std::size_t start = pos, i = pos;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        bool any = i > start;
        if (i < text.size() && text[i] == '.') {
            ++i;
            std::size_t fs = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            any = any || i > fs;
        }
        if (!any) return std::nullopt;
        double v = std::strtod(std::string(text.substr(start, i - start)).c_str(), nullptr);
        pos = i;
        return v;
    };

    bool neg = false;
    skip();
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        neg = text[pos] == '-';
        ++pos;
    }
    while (true) {
        skip();
        double coeff = neg ? -1.0 : 1.0;
        bool saw_number = false;
        if (pos < text.size() &&
            (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
            auto v = number();
            if (!v) {
                error = "malformed coefficient";
                return std::nullopt;
            }
            coeff *= *v;
            saw_number = true;
            skip();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                skip();
            }
        }
        int p = 0;
        if (pos < text.size() && text[pos] == 'x') {
            ++pos;
            p = 1;
            skip();
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                skip();
                std::size_t start = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
                if (pos == start) {
                    error = "missing exponent after '^'";
                    return std::nullopt;
                }
                p = std::stoi(std::string(text.substr(start, pos - start)));
            }
        } else if (!saw_number) {
            error = "expected coefficient or 'x'";
            return std::nullopt;
        }
        out.add_term(coeff, p);
        skip();
        if (pos == text.size()) break;
        if (text[pos] == '+') {
            neg = false;
            ++pos;
        } else if (text[pos] == '-') {
            neg = true;
            ++pos;
        } else {
            error = "unexpected character '" + std::string(1, text[pos]) + "' in polynomial";
            return std::nullopt;
        }
    }
    return out;
}

inline std::string polynomial_to_text(const GSeries& psi) {
    std::string out;
    bool first = true;
    for (const auto& [key, c] : psi.terms()) {
        const double mag = std::fabs(c);
        if (first) {
            out += (c < 0.0) ? "-" : "";
            first = false;
        } else {
            out += (c < 0.0) ? " - " : " + ";
        }
        out += format_double(mag);
        if (key.x_pow > 0) {
            out += "*x^" + std::to_string(key.x_pow);
        }
    }
    return out.empty() ? "0" : out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// The three built-in reference problems (alpha = 1 by default; the setting
/// of the published tables).  Unknown names are a usage error.
inline ProblemSpec builtin(std::string_view name) {
    std::string_view rhs_text;
    int psi_pow = 0;
    ExactForm exact = ExactForm::none;
    if (name == "ex1") {
        rhs_text = "D2[u(1x,1t)] + u(0.5x,0.5t)*D1[u(1x,0.5t)] + 0.5*u(1x,1t)";
        psi_pow = 1;
        exact = ExactForm::x_exp_t;
    } else if (name == "ex2") {
        rhs_text = "u(1x,0.5t)*D2[u(1x,0.5t)] - u(1x,1t)";
        psi_pow = 2;
        exact = ExactForm::x2_exp_t;
    } else if (name == "ex3") {
        rhs_text = "D2[u(0.5x,0.5t)]*D1[u(0.5x,0.5t)] - 0.125*D1[u(1x,1t)] - u(1x,1t)";
        psi_pow = 2;
        exact = ExactForm::x2_exp_neg_t;
    } else {
        throw std::invalid_argument("builtin: unknown problem '" + std::string(name) +
                                    "' (expected ex1, ex2 or ex3)");
    }
    auto parsed = parse_rhs(rhs_text);
    return ProblemSpec{std::string(name), 1.0, GSeries::monomial(1.0, 1.0, psi_pow),
                       std::get<RhsExpr>(std::move(parsed)), exact};
}

/// Parse the problem-file text.  Diagnostics carry the 1-based line number in
/// `offset` and the offending line in `fragment`.
inline std::variant<ProblemSpec, ParseDiagnostic> parse_problem_text(std::string_view text) {
    std::string name;
    std::optional<double> alpha;
    std::optional<std::string> ic_text, rhs_text, exact_text;

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t eol = text.find('\n', start);
        const bool last = eol == std::string_view::npos;
        std::string_view raw = last ? text.substr(start) : text.substr(start, eol - start);
        ++line_no;
        start = last ? text.size() + 1 : eol + 1;

        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto l = line.find_first_not_of(" \t\r");
        if (l == std::string_view::npos) {
            continue;
        }
        auto r = line.find_last_not_of(" \t\r");
        line = line.substr(l, r - l + 1);

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            return ParseDiagnostic{line_no, "expected 'key = value'", std::string(raw)};
        }
        auto trim = [](std::string_view s) {
            auto a = s.find_first_not_of(" \t");
            if (a == std::string_view::npos) return std::string_view{};
            auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));

        if (key == "name") {
            name = std::string(value);
        } else if (key == "alpha") {
            char* end = nullptr;
            std::string vs(value);
            double v = std::strtod(vs.c_str(), &end);
            if (end != vs.c_str() + vs.size() || vs.empty()) {
                return ParseDiagnostic{line_no, "alpha: not a decimal literal", std::string(raw)};
            }
            if (!(v > 0.0) || !(v <= 1.0)) {
                return ParseDiagnostic{line_no, "alpha: must lie in (0,1]", std::string(raw)};
            }
            alpha = v;
        } else if (key == "ic") {
            ic_text = std::string(value);
        } else if (key == "rhs") {
            rhs_text = std::string(value);
        } else if (key == "exact") {
            exact_text = std::string(value);
        } else {
            return ParseDiagnostic{line_no, "unknown key '" + std::string(key) + "'",
                                   std::string(raw)};
        }
    }

    if (!alpha) return ParseDiagnostic{0, "missing key 'alpha'", ""};
    if (!ic_text) return ParseDiagnostic{0, "missing key 'ic'", ""};
    if (!rhs_text) return ParseDiagnostic{0, "missing key 'rhs'", ""};

    std::string perr;
    auto psi = detail::parse_polynomial(*ic_text, *alpha, perr);
    if (!psi) {
        return ParseDiagnostic{0, "ic: " + perr, *ic_text};
    }
    auto rhs = parse_rhs(*rhs_text);
    if (const auto* d = std::get_if<ParseDiagnostic>(&rhs)) {
        return ParseDiagnostic{0, "rhs: " + d->message + " at column " + std::to_string(d->offset),
                               *rhs_text};
    }
    ExactForm exact = ExactForm::none;
    if (exact_text) {
        if (*exact_text == "x*exp(t)") {
            exact = ExactForm::x_exp_t;
        } else if (*exact_text == "x^2*exp(t)") {
            exact = ExactForm::x2_exp_t;
        } else if (*exact_text == "x^2*exp(-t)") {
            exact = ExactForm::x2_exp_neg_t;
        } else {
            return ParseDiagnostic{0, "exact: unrecognized closed form", *exact_text};
        }
    }
    return ProblemSpec{std::move(name), *alpha, std::move(*psi),
                       std::get<RhsExpr>(std::move(rhs)), exact};
}

inline std::variant<ProblemSpec, ParseDiagnostic> load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        return ParseDiagnostic{0, "cannot open file '" + path.string() + "'", ""};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_text(buf.str());
}

/// Canonical problem-file text; load_problem(format_problem(p)) == p.
inline std::string format_problem(const ProblemSpec& p) {
    std::string out;
    if (!p.name.empty()) {
        out += "name = " + p.name + "\n";
    }
    out += "alpha = " + format_double(p.alpha) + "\n";
    out += "ic = " + detail::polynomial_to_text(p.psi) + "\n";
    out += "rhs = " + to_string(p.rhs) + "\n";
    if (p.exact_alpha1 != ExactForm::none) {
        out += "exact = " + std::string(exact_form_name(p.exact_alpha1)) + "\n";
    }
    return out;
}

/// Closed-form reference value; empty when no form is tagged or alpha != 1.
inline std::optional<double> exact_eval(const ProblemSpec& p, double x, double t) {
    if (p.alpha != 1.0) return std::nullopt;
    switch (p.exact_alpha1) {
        case ExactForm::x_exp_t: return x * std::exp(t);
        case ExactForm::x2_exp_t: return x * x * std::exp(t);
        case ExactForm::x2_exp_neg_t: return x * x * std::exp(-t);
        default: return std::nullopt;
    }
}

}  // namespace hptm

#endif  // HPTM_PROBLEMS_HPP
