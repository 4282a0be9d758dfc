#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hptm/rhs_ast.hpp"
#include "prop_support.hpp"

using namespace hptm;

namespace {

const char* kEx1 = "D2[u(1x,1t)] + u(0.5x,0.5t)*D1[u(1x,0.5t)] + 0.5*u(1x,1t)";
const char* kEx2 = "u(1x,0.5t)*D2[u(1x,0.5t)] - u(1x,1t)";
const char* kEx3 = "D2[u(0.5x,0.5t)]*D1[u(0.5x,0.5t)] - 0.125*D1[u(1x,1t)] - u(1x,1t)";

RhsExpr must_parse(const char* text) {
    auto r = parse_rhs(text);
    REQUIRE(std::holds_alternative<RhsExpr>(r));
    return std::get<RhsExpr>(std::move(r));
}

ParseDiagnostic must_fail(const char* text) {
    auto r = parse_rhs(text);
    REQUIRE(std::holds_alternative<ParseDiagnostic>(r));
    return std::get<ParseDiagnostic>(std::move(r));
}

}  // namespace

TEST_CASE("the three built-in right-hand sides parse to the expected trees", "[rhs_ast]") {
    const RhsExpr ex1 = must_parse(kEx1);
    const RhsExpr want1 =
        sum_of({delayed_deriv(2, 1.0, 1.0),
                product({delayed_deriv(0, 0.5, 0.5), delayed_deriv(1, 1.0, 0.5)}),
                scaled(0.5, delayed_deriv(0, 1.0, 1.0))});
    REQUIRE(ex1 == want1);

    const RhsExpr ex2 = must_parse(kEx2);
    const RhsExpr want2 =
        sum_of({product({delayed_deriv(0, 1.0, 0.5), delayed_deriv(2, 1.0, 0.5)}),
                scaled(-1.0, delayed_deriv(0, 1.0, 1.0))});
    REQUIRE(ex2 == want2);

    const RhsExpr ex3 = must_parse(kEx3);
    const RhsExpr want3 =
        sum_of({product({delayed_deriv(2, 0.5, 0.5), delayed_deriv(1, 0.5, 0.5)}),
                scaled(-0.125, delayed_deriv(1, 1.0, 1.0)),
                scaled(-1.0, delayed_deriv(0, 1.0, 1.0))});
    REQUIRE(ex3 == want3);
}

TEST_CASE("parser folds and signs", "[rhs_ast]") {
    REQUIRE(must_parse("0.5*u(1x,1t)") == scaled(0.5, delayed_deriv(0, 1.0, 1.0)));
    REQUIRE(must_parse("2*3*u(1x,1t)") == scaled(6.0, delayed_deriv(0, 1.0, 1.0)));
    REQUIRE(must_parse("-u(1x,1t)") == scaled(-1.0, delayed_deriv(0, 1.0, 1.0)));
    REQUIRE(must_parse("u(1x,1t)*0.25") == scaled(0.25, delayed_deriv(0, 1.0, 1.0)));
    // a pure number is a constant source term
    const RhsExpr c = must_parse("3");
    const auto* src = std::get_if<Source>(&c.node);
    REQUIRE(src != nullptr);
    REQUIRE(src->series.eval(0.7, 0.3) == 3.0);
}

TEST_CASE("parse diagnostics carry positions", "[rhs_ast]") {
    const ParseDiagnostic out_of_range = must_fail("D2[u(2x,1t)]");
    REQUIRE(out_of_range.message.find("(0,1]") != std::string::npos);
    REQUIRE(out_of_range.offset == 3);

    REQUIRE(must_fail("").message == "expected 'u('");
    REQUIRE(must_fail("u(1x,1t").message.find("')'") != std::string::npos);
    REQUIRE(must_fail("D5[u(1x,1t)]").message.find("derivative order") != std::string::npos);
    REQUIRE(must_fail("u(1x,1t) + ").message.find("expected") != std::string::npos);
    const ParseDiagnostic trailing = must_fail("u(1x,1t))");
    REQUIRE(trailing.message.find("trailing") != std::string::npos);
    REQUIRE(trailing.offset == 8);
    // degree cap: five-fold product exceeds the configured degree bound
    REQUIRE(must_fail("u(1x,1t)*u(1x,1t)*u(1x,1t)*u(1x,1t)*u(1x,1t)")
                .message.find("degree") != std::string::npos);
}

TEST_CASE("printer inverts the parser on the built-in strings", "[rhs_ast]") {
    for (const char* text : {kEx1, kEx2, kEx3}) {
        const RhsExpr tree = must_parse(text);
        REQUIRE(to_string(tree) == text);
        REQUIRE(must_parse(to_string(tree).c_str()) == tree);
    }
}

TEST_CASE("order-0 homotopy coefficient of problem 1 at u0 = x", "[rhs_ast]") {
    const RhsExpr tree = must_parse(kEx1);
    std::vector<GSeries> u{GSeries::monomial(0.8, 1.0, 1)};
    const GSeries h = homotopy_coeff(tree, u, 0);
    // D2 contributes 0; the product gives x/2; the linear term gives x/2.
    REQUIRE(h.size() == 1);
    REQUIRE(h.terms().begin()->first == TermKey{1, GExp{0, 0}});
    REQUIRE(h.terms().begin()->second == 1.0);
}

TEST_CASE("linear trees act on u_n alone", "[rhs_ast]") {
    const RhsExpr tree = must_parse("D2[u(1x,1t)] + 0.5*u(1x,0.5t) - u(0.5x,1t)");
    std::mt19937 rng(7);
    std::vector<GSeries> u;
    for (int r = 0; r <= 3; ++r) {
        u.push_back(hptm_tests::random_series(rng, 0.6));
    }
    const GSeries got = homotopy_coeff(tree, u, 3);
    const GSeries want =
        u[3].delay(1.0, 1.0).dx(2) + 0.5 * u[3].delay(1.0, 0.5) - u[3].delay(0.5, 1.0);
    REQUIRE(got == want);
}

TEST_CASE("order-1 coefficient of problem 2 is the two-term convolution", "[rhs_ast]") {
    const RhsExpr tree = must_parse(kEx2);
    const double alpha = 0.8;
    const GSeries u0 = GSeries::monomial(alpha, 1.0, 2);
    const GSeries u1 = GSeries::monomial(
        alpha, 1.0 / std::exp(std::lgamma(1.0 + alpha)), 2, GExp{0, 1});
    std::vector<GSeries> u{u0, u1};
    const GSeries got = homotopy_coeff(tree, u, 1);
    const GSeries want = u0.delay(1.0, 0.5) * u1.delay(1.0, 0.5).dx(2) +
                         u1.delay(1.0, 0.5) * u0.delay(1.0, 0.5).dx(2) - u1;
    REQUIRE(got == want);
}

TEST_CASE("sources contribute at order zero only", "[rhs_ast]") {
    const RhsExpr tree = must_parse("u(1x,1t) + 2");
    std::vector<GSeries> u{GSeries::monomial(0.5, 1.0, 1),
                           GSeries::monomial(0.5, 3.0, 0, GExp{0, 1})};
    const GSeries h0 = homotopy_coeff(tree, u, 0);
    REQUIRE(h0.eval(0.0, 0.0) == 2.0);
    const GSeries h1 = homotopy_coeff(tree, u, 1);
    REQUIRE(h1 == u[1]);
}

TEST_CASE("sources with fractional keys cannot cross alphas", "[rhs_ast]") {
    const RhsExpr bad = source(GSeries::monomial(0.5, 1.0, 0, GExp{0, 1}));
    std::vector<GSeries> u{GSeries::monomial(0.8, 1.0, 1)};
    REQUIRE_THROWS_AS(homotopy_coeff(bad, u, 0), std::invalid_argument);
    // alpha-free sources may
    const RhsExpr ok = source(GSeries::monomial(0.5, 2.0, 1));
    const GSeries h = homotopy_coeff(ok, u, 0);
    REQUIRE(h.alpha() == 0.8);
    REQUIRE(h.eval(1.0, 0.0) == 2.0);
}

TEST_CASE("homotopy_coeff validates the order", "[rhs_ast]") {
    const RhsExpr tree = must_parse(kEx1);
    std::vector<GSeries> u{GSeries::monomial(0.5, 1.0, 1)};
    REQUIRE_THROWS_AS(homotopy_coeff(tree, u, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(homotopy_coeff(tree, {}, 0), std::invalid_argument);
}

TEST_CASE("factory validation", "[rhs_ast]") {
    REQUIRE_THROWS_AS(delayed_deriv(5, 1.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(delayed_deriv(1, 0.0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(delayed_deriv(1, 1.0, 1.5), std::invalid_argument);
    REQUIRE_THROWS_AS(product({delayed_deriv(0, 1.0, 1.0)}), std::invalid_argument);
    REQUIRE_THROWS_AS(sum_of({}), std::invalid_argument);
}

TEST_CASE("randomized structural properties", "[rhs_ast]") {
    std::mt19937 rng(42);
    const auto failure = hptm_tests::check_rhs_properties(rng, 200);
    if (failure) {
        FAIL(*failure);
    }
}
