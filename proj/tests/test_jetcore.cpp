#include <gtest/gtest.h>

#include "jetcalc/jet.hpp"
#include "jetcalc/random.hpp"

using namespace jetcalc;

namespace {

Poly x(std::size_t n, std::size_t j) { return Poly::variable(n, j); }
Poly c(std::size_t n, long v) { return Poly::constant(n, Scalar(v)); }

} // namespace

TEST(Scalar, ParsesExactLiterals)
{
    EXPECT_EQ(parse_scalar("3/6"), Scalar(1, 2));
    EXPECT_EQ(parse_scalar("-4"), Scalar(-4));
    EXPECT_EQ(parse_scalar("+7/3"), Scalar(7, 3));
    EXPECT_EQ(format_scalar(rational(-6, 4)), "-3/2");
    EXPECT_THROW(parse_scalar("0.5"), domain_error);
    EXPECT_THROW(parse_scalar("1e3"), domain_error);
    EXPECT_THROW(parse_scalar("1/0"), domain_error);
    EXPECT_THROW(parse_scalar("1/2/3"), domain_error);
    EXPECT_THROW(parse_scalar(""), domain_error);
}

TEST(MultiIndex, BinomialExamples)
{
    EXPECT_EQ(multi_binomial({2, 1}, {1, 1}), 2);
    EXPECT_EQ(multi_binomial({3, 0}, {0, 0}), 1);
    EXPECT_EQ(multi_binomial({1, 0}, {2, 0}), 0);
    EXPECT_THROW(multi_binomial({1, 0}, {1, 0, 0}), dimension_error);
}

TEST(MultiIndex, GradedEnumerationAndRank)
{
    const auto all = multi_indices_up_to(2, 2);
    const std::vector<MultiIndex> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    EXPECT_EQ(all, expected);
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto list = multi_indices_up_to(n, 4);
        EXPECT_EQ(list.size(), jet_slot_count(n, 4));
        for (std::size_t r = 0; r < list.size(); ++r) {
            EXPECT_EQ(multi_index_rank(list[r]), r);
            if (r > 0) {
                EXPECT_TRUE(list[r - 1] < list[r]);
            }
        }
    }
}

TEST(Poly, Arithmetic)
{
    const Poly one_plus = c(2, 1) + x(2, 0);
    const Poly sq = one_plus * one_plus;
    Poly expected = c(2, 1) + Scalar(2) * x(2, 0) + x(2, 0) * x(2, 0);
    EXPECT_EQ(sq, expected);

    const Poly p = x(2, 0) * x(2, 0) * x(2, 1);
    EXPECT_EQ(p.derivative(0), Scalar(2) * x(2, 0) * x(2, 1));
    EXPECT_EQ(p.evaluate(make_point({2, 3})), 12);
    EXPECT_THROW(p + x(3, 0), dimension_error);
    EXPECT_EQ((p - p).degree(), -1);
}

TEST(Poly, ShiftMatchesEvaluation)
{
    RandomSource rng(11);
    for (int t = 0; t < 30; ++t) {
        const Poly p = rng.poly(2, 3, 5);
        const Point a = rng.point(2);
        const Point h = rng.point(2);
        Point ah{a[0] + h[0], a[1] + h[1]};
        EXPECT_EQ(p.shifted(a).evaluate(h), p.evaluate(ah));
    }
}

TEST(Jet, ProlongFunctionExamples)
{
    const auto f = prolong_function(x(1, 0) * x(1, 0), 2);
    EXPECT_EQ(f[MultiIndex{0}], x(1, 0) * x(1, 0));
    EXPECT_EQ(f[MultiIndex{1}], Scalar(2) * x(1, 0));
    EXPECT_EQ(f[MultiIndex{2}], c(1, 2));

    const auto g = prolong_function(x(2, 0) * x(2, 1), 2);
    EXPECT_EQ(g[(MultiIndex{1, 1})], c(2, 1));
    EXPECT_EQ(g[(MultiIndex{1, 0})], x(2, 1));
    EXPECT_EQ(g[(MultiIndex{0, 1})], x(2, 0));
    EXPECT_TRUE(g[(MultiIndex{2, 0})].is_zero());

    const auto k = prolong_function(c(2, 5), 3);
    for (std::size_t r = 1; r < k.slot_count(); ++r) {
        EXPECT_TRUE(k.at(r).is_zero());
    }
}

TEST(Jet, ProlongVectorField)
{
    const auto d1 = prolong_vector_field({c(2, 1), Poly(2)}, 2);
    EXPECT_EQ(d1(0, MultiIndex(2)), c(2, 1));
    std::size_t nonzero = 0;
    for (std::size_t s = 0; s < d1.fiber_dimension(); ++s) {
        nonzero += d1.coord(s).is_zero() ? 0 : 1;
    }
    EXPECT_EQ(nonzero, 1U);

    const auto e = prolong_vector_field({x(1, 0)}, 1);
    EXPECT_EQ(e(0, MultiIndex{0}), x(1, 0));
    EXPECT_EQ(e(0, MultiIndex{1}), c(1, 1));
    EXPECT_EQ(e.fiber_dimension(), 2U);
    EXPECT_EQ(VectorJetSection(3, 2).fiber_dimension(), 30U);
}

TEST(Jet, Holonomy)
{
    EXPECT_TRUE(is_holonomic(prolong_function(x(1, 0) * x(1, 0) * x(1, 0), 3)).holonomic);
    FunctionJetSection bad(1, 1);
    bad[MultiIndex{1}] = c(1, 1);
    const auto check = is_holonomic(bad);
    EXPECT_FALSE(check.holonomic);
    ASSERT_TRUE(check.violation);
    EXPECT_EQ(check.violation->alpha, MultiIndex{0});
    EXPECT_THROW(is_holonomic(FunctionJetSection(1, 0)), order_error);

    RandomSource rng(3);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 3);
        EXPECT_TRUE(is_holonomic(prolong_vector_field(rng.vector_field(n, 3), 1 + t % 3)).holonomic);
    }
}

TEST(Jet, ProjectionTower)
{
    RandomSource rng(5);
    for (int t = 0; t < 20; ++t) {
        const auto s = rng.vector_section(2, 3, 2);
        EXPECT_EQ(project(project(s, 2), 1), project(s, 1));
        EXPECT_EQ(project(project(s, 2), 0), project(s, 0));
        EXPECT_EQ(project(s, 3), s);
        const auto v = project(s, 0);
        for (std::size_t i = 0; i < 2; ++i) {
            EXPECT_EQ(v(i, MultiIndex(2)), s(i, MultiIndex(2)));
        }
    }
    EXPECT_THROW(project(FunctionJetSection(2, 1), 2), order_error);
}

TEST(Jet, ProductSquareOracle)
{
    const Poly f = c(1, 1) + x(1, 0);
    const auto sq = jet_product(prolong_function(f, 2), prolong_function(f, 2));
    // (1+x)^2 = 1 + 2x + x^2, derivatives 2 + 2x and 2
    EXPECT_EQ(sq[MultiIndex{0}], c(1, 1) + Scalar(2) * x(1, 0) + x(1, 0) * x(1, 0));
    EXPECT_EQ(sq[MultiIndex{1}], c(1, 2) + Scalar(2) * x(1, 0));
    EXPECT_EQ(sq[MultiIndex{2}], c(1, 2));
}

TEST(Jet, ProductLaws)
{
    RandomSource rng(9);
    for (int t = 0; t < 20; ++t) {
        const auto f = rng.function_section(2, 2, 2);
        const auto g = rng.function_section(2, 2, 2);
        const auto h = rng.function_section(2, 2, 2);
        EXPECT_EQ(jet_product(f, g), jet_product(g, f));
        EXPECT_EQ(jet_product(jet_product(f, g), h), jet_product(f, jet_product(g, h)));
        EXPECT_EQ(jet_product(f, jet_unit<Poly>(2, 2)), f);

        const Poly phi = rng.poly(2, 2);
        const auto sm = smooth_function_jet(phi, 2);
        FunctionJetSection expected = g;
        expected.scale(phi);
        EXPECT_EQ(jet_product(sm, g), expected);

        const Poly p = rng.poly(2, 3);
        const Poly q = rng.poly(2, 3);
        EXPECT_EQ(jet_product(prolong_function(p, 3), prolong_function(q, 3)), prolong_function(p * q, 3));
    }
}

TEST(Jet, MismatchedShapesThrow)
{
    EXPECT_THROW(jet_product(FunctionJetSection(2, 1), FunctionJetSection(2, 2)), order_error);
    EXPECT_THROW(jet_product(FunctionJetSection(2, 1), FunctionJetSection(1, 1)), dimension_error);
    FunctionJetValue a(1, 1);
    FunctionJetValue b(1, 1);
    a.set_base(make_point({0}));
    b.set_base(make_point({1}));
    EXPECT_THROW(a + b, base_point_error);
    EXPECT_THROW(FunctionJetSection(0, 1), dimension_error);
}
