#include <gtest/gtest.h>

#include "jetcalc/klein.hpp"
#include "jetcalc/lie_equations.hpp"
#include "jetcalc/random.hpp"

using namespace jetcalc;

TEST(Realization, ValidationAndWitness)
{
    EXPECT_TRUE(validate_realization(lie_algebras::affine_line(), realizations::affine_line().fields()).ok);
    EXPECT_TRUE(validate_realization(lie_algebras::sl2(), realizations::projective_line().fields()).ok);
    // {d, x d} against [e0, e1] = e1 in the wrong order
    const Poly x = Poly::variable(1, 0);
    const std::vector<PolyField> swapped{{Poly::constant(1, Scalar(1))}, {x}};
    const auto bad = validate_realization(lie_algebras::affine_line(), swapped);
    EXPECT_FALSE(bad.ok);
    ASSERT_TRUE(bad.witness.has_value());
    EXPECT_EQ(*bad.witness, std::make_pair(std::size_t{0}, std::size_t{1}));
    EXPECT_THROW(RealizedLieAlgebra(lie_algebras::affine_line(), swapped), domain_error);
    for (std::size_t n = 1; n <= 3; ++n) {
        EXPECT_NO_THROW(realizations::projective_space(n));
    }
}

TEST(Filtration, AffineLine)
{
    const auto rep = isotropy_filtration(realizations::affine_line());
    ASSERT_TRUE(rep.order.has_value());
    EXPECT_EQ(*rep.order, 1);
    EXPECT_EQ(rep.dims, (std::vector<std::size_t>{1, 0, 0, 0}));
    EXPECT_TRUE(rep.ghost.empty());
    EXPECT_TRUE(rep.transitive);
}

TEST(Filtration, ProjectiveLine)
{
    const auto rep = isotropy_filtration(realizations::projective_line());
    ASSERT_TRUE(rep.order.has_value());
    EXPECT_EQ(*rep.order, 2);
    EXPECT_EQ(rep.dims, (std::vector<std::size_t>{2, 1, 0, 0, 0}));
    EXPECT_TRUE(rep.ghost.empty());
}

TEST(Filtration, ProjectiveSpacesHaveScalarGhost)
{
    for (std::size_t n = 1; n <= 2; ++n) {
        const auto a = realizations::projective_space(n);
        const auto rep = isotropy_filtration(a);
        ASSERT_TRUE(rep.order.has_value());
        EXPECT_EQ(*rep.order, 2);
        ASSERT_EQ(rep.ghost.size(), 1U);
        EXPECT_TRUE(rep.ghost_is_ideal);
        EXPECT_TRUE(rep.ghost_is_kernel);
        // the ghost is spanned by the identity matrix
        const std::size_t m = n + 1;
        Vector identity(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            identity[i * m + i] = 1;
        }
        EXPECT_TRUE(coordinates_in(rep.ghost, identity).has_value());
        // h_0 is the parabolic subalgebra: matrices with vanishing last row apart from the corner
        EXPECT_EQ(rep.dims[0], m * m - n);
        EXPECT_TRUE(rep.transitive);
    }
}

TEST(Filtration, NonIncreasingAndInvariantUnderConjugation)
{
    RandomSource rng(71);
    for (const auto& a : {realizations::affine_line(), realizations::projective_line(), realizations::projective_space(1),
                          realizations::projective_space(2)}) {
        const auto rep = isotropy_filtration(a, 5);
        for (std::size_t i = 1; i < rep.dims.size(); ++i) {
            EXPECT_LE(rep.dims[i], rep.dims[i - 1]);
        }
        const Arrow h = rng.arrow(a.base(), rng.point(a.chart_dim()), 8);
        const auto moved = isotropy_filtration(a, 5, h);
        EXPECT_EQ(moved.dims, rep.dims);
        EXPECT_EQ(moved.order, rep.order);
    }
}

TEST(Filtration, IntransitiveIsFlagged)
{
    // x d and x^2 d on the line both vanish at 0
    const Poly x = Poly::variable(1, 0);
    StructureConstants c(2);
    c.set_antisymmetric(0, 1, 1, 1);
    const RealizedLieAlgebra a(FiniteLieAlgebra(c), {{x}, {x * x}});
    const auto rep = isotropy_filtration(a);
    EXPECT_FALSE(rep.transitive);
    EXPECT_EQ(rep.dims[0], 2U);
}

TEST(Sigma, HomomorphismAndInjectivity)
{
    for (const auto& a : {realizations::affine_line(), realizations::projective_line(), realizations::projective_space(1),
                          realizations::projective_space(2)}) {
        for (int m = 1; m <= 3; ++m) {
            EXPECT_TRUE(sigma_homomorphism_check(a, m).ok) << m;
        }
    }
    const auto p = realizations::projective_line();
    EXPECT_EQ(sigma_rank(p, 1), 2U);
    EXPECT_EQ(sigma_rank(p, 2), 3U);
    EXPECT_EQ(sigma_rank(p, 3), 3U);
    EXPECT_EQ(sigma_rank(realizations::projective_space(1), 2), 3U);
}

TEST(SystemOrder, ProjectiveJets)
{
    const auto a = realizations::projective_space(1);
    const auto rep = klein_order_of_system([&](int k) { return span_of_field_jets(a.fields(), k, a.base()); }, 4);
    ASSERT_TRUE(rep.order.has_value());
    EXPECT_EQ(*rep.order, 2);
}
