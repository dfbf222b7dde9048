#include <gtest/gtest.h>

#include "jetcalc/forms.hpp"

using namespace jetcalc;

namespace {

Poly x(std::size_t n, std::size_t j) { return Poly::variable(n, j); }
Poly c(std::size_t n, long v) { return Poly::constant(n, Scalar(v)); }

Scalar factorial(std::size_t r)
{
    Scalar f = 1;
    for (std::size_t i = 2; i <= r; ++i) {
        f *= static_cast<long>(i);
    }
    return f;
}

/// Classical de Rham d on coefficient maps I -> f_I (determinant convention), written out directly.
std::map<SlotTuple, Poly> classical_d(std::size_t n, const std::map<SlotTuple, Poly>& form)
{
    std::map<SlotTuple, Poly> out;
    for (const auto& [t, f] : form) {
        for (std::uint32_t j = 0; j < n; ++j) {
            if (std::find(t.begin(), t.end(), j) != t.end()) {
                continue;
            }
            // dx_j ^ dx_t: move j into place
            std::size_t before = 0;
            while (before < t.size() && t[before] < j) {
                ++before;
            }
            SlotTuple u = t;
            u.insert(u.begin() + static_cast<std::ptrdiff_t>(before), j);
            Poly term = f.derivative(j);
            if (before % 2 == 1) {
                term = -term;
            }
            auto [it, fresh] = out.try_emplace(u, Poly(n));
            it->second += term;
        }
    }
    return out;
}

/// Random (k, r)-form generator with sparser coefficients for the slower identities.
FormKR sparse_form(RandomSource& rng, std::size_t n, int k, std::size_t r, bool kr_only = false)
{
    return random_form(rng, n, k, r, 2, kr_only, 15);
}

} // namespace

TEST(Forms, StorageAndSigns)
{
    FormKR w(2, 1, 2);
    FunctionJetSection v(2, 1);
    v.at(0) = x(2, 0);
    w.add({3, 1}, v);
    EXPECT_EQ(w.value({1, 3}).at(0), -x(2, 0));
    EXPECT_EQ(w.value({3, 1}).at(0), x(2, 0));
    EXPECT_TRUE(w.value({1, 1}).is_zero());
    w.add({1, 3}, v);
    EXPECT_TRUE(w.is_zero());
    EXPECT_THROW(w.add({0, 6}, v), dimension_error);
    EXPECT_THROW(w.add({0}, v), dimension_error);
    EXPECT_THROW(w.add({0, 1}, FunctionJetSection(2, 2)), order_error);
    EXPECT_THROW(FormKR(1, 0, 2), dimension_error);
}

TEST(Forms, EvaluationIsAlternatingAndFunctionLinear)
{
    RandomSource rng(41);
    for (int t = 0; t < 6; ++t) {
        const auto w = random_form(rng, 2, 1, 2, 1, false);
        const auto a = rng.vector_section(2, 1, 1);
        const auto b = rng.vector_section(2, 1, 1);
        const Poly phi = rng.poly(2, 2);
        EXPECT_EQ(eval_form(w, {a, b}) + eval_form(w, {b, a}), FunctionJetSection(2, 1));
        auto scaled = eval_form(w, {a, b});
        scaled.scale(phi);
        EXPECT_EQ(eval_form(w, {multiply_by_function(phi, a), b}), scaled);
    }
}

TEST(Forms, BasisActionMatchesJetAction)
{
    RandomSource rng(42);
    for (std::size_t n = 1; n <= 2; ++n) {
        for (int k = 0; k <= 2; ++k) {
            const auto f = rng.function_section(n, k, 2);
            for (std::size_t s = 0; s < vector_fiber_dimension(n, k); ++s) {
                EXPECT_EQ(basis_action(s, f), jet_action(basis_section(n, k, s), f)) << n << k << s;
            }
        }
    }
}

TEST(Forms, OrderZeroIsClassicalDeRham)
{
    RandomSource rng(43);
    for (std::size_t n = 2; n <= 3; ++n) {
        for (std::size_t r = 0; r < n; ++r) {
            std::map<SlotTuple, Poly> classical;
            FormKR w(n, 0, r);
            for (const auto& t : detail::increasing_tuples(n, r)) {
                const Poly f = rng.poly(n, 3, 4);
                classical.emplace(t, f);
                FunctionJetSection v(n, 0);
                v.at(0) = f * (Scalar(1) / factorial(r));
                w.add(t, v);
            }
            const auto dw = exterior_derivative(w);
            const auto expected = classical_d(n, classical);
            for (const auto& t : detail::increasing_tuples(n, r + 1)) {
                const auto it = expected.find(t);
                const Poly want = it == expected.end() ? Poly(n) : it->second * (Scalar(1) / factorial(r + 1));
                EXPECT_EQ(dw.value(t).at(0), want);
            }
        }
    }
    // d(x1 dx2) evaluated on (E_1, E_2) is 1/2 with the alternating-map convention
    FormKR w(2, 0, 1);
    FunctionJetSection v(2, 0);
    v.at(0) = x(2, 0);
    w.add({1}, v);
    EXPECT_EQ(exterior_derivative(w).value({0, 1}).at(0), Poly::constant(2, Scalar(1, 2)));
}

TEST(Forms, DSquaredIsZero)
{
    RandomSource rng(44);
    for (std::size_t n = 1; n <= 2; ++n) {
        for (int k = 0; k <= 2; ++k) {
            const BasisBrackets br(n, k);
            for (std::size_t r = 0; r < 2; ++r) {
                if (r + 2 > vector_fiber_dimension(n, k)) {
                    continue;
                }
                const auto w = sparse_form(rng, n, k, r);
                const auto dd = exterior_derivative(exterior_derivative(w, br, DegreeBound::fiber_dimension), br,
                                                    DegreeBound::fiber_dimension);
                EXPECT_TRUE(dd.is_zero()) << n << " " << k << " " << r;
            }
        }
    }
}

TEST(Forms, DegreeBoundIsEnforced)
{
    FormKR w(2, 1, 2);
    EXPECT_THROW(exterior_derivative(w), dimension_error);
    EXPECT_NO_THROW(exterior_derivative(w, DegreeBound::fiber_dimension));
    EXPECT_THROW(wedge(w, FormKR(2, 1, 1)), dimension_error);
}

TEST(Forms, FormulaIsIndependentOfExtension)
{
    // evaluating the intrinsic formula on arbitrary polynomial sections gives d omega evaluated on them
    RandomSource rng(45);
    for (int t = 0; t < 4; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 2);
        const int k = 1;
        const std::size_t r = static_cast<std::size_t>(t / 2);
        const auto w = sparse_form(rng, n, k, r);
        std::vector<VectorJetSection> xs;
        for (std::size_t i = 0; i <= r; ++i) {
            xs.push_back(rng.vector_section(n, k, 1));
        }
        const auto dw = exterior_derivative(w, DegreeBound::fiber_dimension);
        EXPECT_EQ(exterior_derivative_formula(w, xs), eval_form(dw, xs)) << t;
    }
    // two extensions agreeing at p give the same value at p
    const Point p = make_point({1, -1});
    const auto w = random_form(rng, 2, 1, 1, 2, false);
    for (std::size_t s = 0; s < 6; ++s) {
        for (std::size_t u = 0; u < 6; ++u) {
            auto xs = std::vector<VectorJetSection>{basis_section(2, 1, s), basis_section(2, 1, u)};
            auto bumped = xs;
            for (auto& b : bumped) {
                const Poly vanish = (x(2, 0) - c(2, 1)) * rng.poly(2, 1) + (x(2, 1) + c(2, 1)) * rng.poly(2, 1);
                b = b + multiply_by_function(vanish, rng.vector_section(2, 1, 1));
            }
            EXPECT_EQ(evaluate_at(exterior_derivative_formula(w, xs), p),
                      evaluate_at(exterior_derivative_formula(w, bumped), p));
        }
    }
}

TEST(Forms, CartanAndCommutation)
{
    RandomSource rng(46);
    for (int t = 0; t < 6; ++t) {
        const int k = t % 2;
        const std::size_t n = 2;
        const BasisBrackets br(n, k);
        const auto y = rng.vector_section(n, k, 1);
        for (std::size_t r = 0; r <= 1; ++r) {
            const auto w = sparse_form(rng, n, k, r);
            const auto dw = exterior_derivative(w, br);
            auto cartan = interior_product(y, dw);
            if (r > 0) {
                cartan += exterior_derivative(interior_product(y, w), br);
            }
            EXPECT_EQ(lie_derivative(y, w), cartan) << t << " " << r;
            EXPECT_EQ(lie_derivative(y, dw), exterior_derivative(lie_derivative(y, w), br)) << t << " " << r;
        }
    }
    // on functions L_Y f is the jet action
    const auto f = rng.function_section(2, 1, 2);
    const auto y = rng.vector_section(2, 1, 1);
    EXPECT_EQ(lie_derivative(y, function_form(f)), function_form(jet_action(y, f)));
}

TEST(Forms, InteriorProductOracle)
{
    // omega = value v on (E_0, E_1); (i_{E_0} omega)(E_1) = 2 v
    FormKR w(2, 0, 2);
    FunctionJetSection v(2, 0);
    v.at(0) = x(2, 1);
    w.add({0, 1}, v);
    const auto i0 = interior_product(basis_section(2, 0, 0), w);
    EXPECT_EQ(i0.value({1}).at(0), Scalar(2) * x(2, 1));
    const auto i1 = interior_product(basis_section(2, 0, 1), w);
    EXPECT_EQ(i1.value({0}).at(0), Scalar(-2) * x(2, 1));
    EXPECT_THROW(interior_product(basis_section(2, 0, 0), function_form(v)), dimension_error);
}

TEST(Forms, WedgeIsGradedDerivation)
{
    RandomSource rng(47);
    for (int t = 0; t < 4; ++t) {
        const int k = t % 2;
        const BasisBrackets br(2, k);
        const auto f = sparse_form(rng, 2, k, 0);
        const auto a = sparse_form(rng, 2, k, 1);
        const auto b = sparse_form(rng, 2, k, 1);
        EXPECT_EQ(exterior_derivative(wedge(f, a), br), wedge(exterior_derivative(f, br), a) + wedge(f, exterior_derivative(a, br)));
        EXPECT_EQ(wedge(a, b) + wedge(b, a), FormKR(2, k, 2));
        if (vector_fiber_dimension(2, k) < 3) {
            continue;
        }
        const auto dab = exterior_derivative(wedge(a, b), br, DegreeBound::fiber_dimension);
        const auto rhs = wedge(exterior_derivative(a, br), b, DegreeBound::fiber_dimension) -
                         wedge(a, exterior_derivative(b, br), DegreeBound::fiber_dimension);
        EXPECT_EQ(dab, rhs);
    }
    // dx ^ dy on (E_0, E_1) is 1/2
    FormKR dx(2, 0, 1);
    FormKR dy(2, 0, 1);
    dx.add({0}, jet_unit<Poly>(2, 0));
    dy.add({1}, jet_unit<Poly>(2, 0));
    EXPECT_EQ(wedge(dx, dy).value({0, 1}).at(0), Poly::constant(2, Scalar(1, 2)));
}

TEST(Forms, KrSubspaceAndProjection)
{
    RandomSource rng(48);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 2);
        const int k = 1 + t % 2;
        const BasisBrackets br(n, k);
        for (std::size_t r = 0; r <= 1; ++r) {
            const auto w = sparse_form(rng, n, k, r, true);
            ASSERT_TRUE(is_kr_form(w));
            const auto dw = exterior_derivative(w, br, DegreeBound::fiber_dimension);
            EXPECT_TRUE(is_kr_form(dw));
            for (int m = 0; m < k; ++m) {
                if (r + 1 > vector_fiber_dimension(n, m)) {
                    continue;
                }
                EXPECT_EQ(project(dw, m), exterior_derivative(project(w, m), DegreeBound::fiber_dimension))
                    << t << " " << r << " " << m;
            }
        }
    }
    // a form that reads order-0 values off an order-1 slot is not a (1, r)-form
    FormKR bad(1, 1, 1);
    bad.add({1}, jet_unit<Poly>(1, 1));
    EXPECT_FALSE(kr_membership(bad, 0));
    EXPECT_FALSE(is_kr_form(bad));
}

TEST(Forms, FiltrationTag)
{
    FormKR w(1, 2, 1);
    EXPECT_EQ(filtration_tag(w), 2);
    FunctionJetSection v(1, 2);
    v[MultiIndex{2}] = c(1, 1);
    w.add({0}, v);
    EXPECT_EQ(filtration_tag(w), 1);
    v[MultiIndex{1}] = c(1, 1);
    w.add({1}, v);
    EXPECT_EQ(filtration_tag(w), 0);
    w.add({2}, jet_unit<Poly>(1, 2));
    EXPECT_EQ(filtration_tag(w), -1);
}

TEST(Forms, ArrowActionIsFunctorial)
{
    RandomSource rng(49);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(t % 2);
        const int k = t % 2;
        const std::size_t r = 1 + static_cast<std::size_t>(t % 2 == 0 ? 0 : 1) * (n > 1 ? 1 : 0);
        const Point p = rng.point(n);
        const Point q = rng.point(n);
        const Arrow a = rng.arrow(p, q, k + 1);
        const Arrow b = rng.arrow(q, rng.point(n), k + 1);
        const auto w = evaluate_at(random_form(rng, n, k, r, 1, false, 50), p);
        EXPECT_EQ(arrow_transform_form(compose_arrows(b, a), w), arrow_transform_form(b, arrow_transform_form(a, w)));
        EXPECT_EQ(arrow_transform_form(Arrow::identity(p, k + 1), w), w);
        EXPECT_EQ(arrow_transform_form(invert_arrow(a), arrow_transform_form(a, w)), w);
    }
}

TEST(Forms, LinearArrowScalesVolumeForm)
{
    Matrix m(2, 2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 3;
    const Arrow a = Arrow::affine(origin(2), origin(2), m, 1);
    FormPointValue vol(2, 0, 2);
    vol.add({0, 1}, jet_unit<Scalar>(2, 0));
    vol.set_base(origin(2));
    const auto moved = arrow_transform_form(a, vol);
    EXPECT_EQ(moved.value({0, 1}).at(0), Scalar(1, 5));
    EXPECT_THROW(arrow_transform_form(project(Arrow::affine(origin(2), origin(2), m, 2), 1), FormPointValue(2, 1, 1)),
                 order_error);
}

TEST(StructureAlgebra, FullAlgebraLeavesConstants)
{
    for (std::size_t n = 1; n <= 2; ++n) {
        for (int k = 0; k <= 2; ++k) {
            const auto full = full_spanning_family(n, k);
            const auto theta = theta_structure_algebra(full, n, k, 3);
            ASSERT_EQ(theta.size(), 1U) << n << " " << k;
            EXPECT_TRUE(theta_is_closed_under_product(theta, full));
            EXPECT_TRUE(theta[0].at(0).degree() == 0);
            for (std::size_t b = 1; b < theta[0].slot_count(); ++b) {
                EXPECT_TRUE(theta[0].at(b).is_zero());
            }
        }
    }
}

TEST(StructureAlgebra, IntransitiveSlices)
{
    // jets of fields tangent to the slices x2 = const: xi^2_alpha = 0
    const std::size_t n = 2;
    const int k = 1;
    std::vector<VectorJetSection> tangent;
    for (const auto& alpha : multi_indices_up_to(n, k)) {
        tangent.push_back(basis_section(n, k, fiber_coordinate(n, 0, alpha)));
    }
    const int degree = 3;
    const auto theta = theta_structure_algebra(tangent, n, k, degree);
    // exactly the prolongations j_1 p(x2) with deg p <= 3, plus the zero-order-part-free jets
    EXPECT_TRUE(theta_is_closed_under_product(theta, tangent));
    const Poly p = x(n, 1) * x(n, 1) * x(n, 1) - Scalar(2) * x(n, 1) + c(n, 5);
    const auto jp = prolong_function(p, k);
    for (const auto& x_ : tangent) {
        EXPECT_TRUE(jet_action(x_, jp).is_zero());
    }
    for (const auto& f : theta) {
        for (const auto& x_ : tangent) {
            EXPECT_TRUE(jet_action(x_, f).is_zero());
        }
    }
    EXPECT_GT(theta.size(), 1U);
    // relative cochains: f in Theta and df are annihilated by L and i along the family
    const auto f = function_form(jp);
    EXPECT_TRUE(relative_membership(f, tangent));
    EXPECT_TRUE(relative_membership(exterior_derivative(f), tangent));
    EXPECT_FALSE(relative_membership(function_form(prolong_function(x(n, 0), k)), tangent));
}

TEST(Exactness, LowOrderProbes)
{
    const auto line = local_exactness_check(1, 0, 1, 3);
    EXPECT_EQ(line.closed_dimension, 4U);
    EXPECT_TRUE(line.all_exact());
    EXPECT_EQ(line.constants_dimension, 1U);

    const auto plane = local_exactness_check(2, 1, 1, 1);
    EXPECT_GT(plane.closed_dimension, 0U);
    EXPECT_TRUE(plane.all_exact()) << plane.unsolved.size() << " of " << plane.closed_dimension;
    EXPECT_EQ(plane.constants_dimension, 1U);
    EXPECT_THROW(local_exactness_check(2, 1, 0, 1), dimension_error);
}
