#include <gtest/gtest.h>

#include "jetcalc/lie_algebra.hpp"
#include "jetcalc/spencer.hpp"

using namespace jetcalc;

namespace {

/// Brute-force H^r dims for trivial coefficients from an independently assembled
/// differential on functions of basis tuples.
std::vector<std::size_t> brute_force_trivial_dims(const FiniteLieAlgebra& g, std::size_t r_max)
{
    const std::size_t d = g.dim();
    std::vector<std::vector<std::vector<std::size_t>>> tuples(r_max + 2);
    for (std::size_t mask = 0; mask < (1U << d); ++mask) {
        std::vector<std::size_t> t;
        for (std::size_t i = 0; i < d; ++i) {
            if ((mask >> i) & 1U) {
                t.push_back(i);
            }
        }
        if (t.size() <= r_max + 1) {
            tuples[t.size()].push_back(t);
        }
    }
    for (auto& level : tuples) {
        std::sort(level.begin(), level.end());
    }
    std::vector<std::size_t> ranks;
    for (std::size_t r = 0; r <= r_max; ++r) {
        Matrix m(tuples[r + 1].size(), tuples[r].size());
        for (std::size_t row = 0; row < tuples[r + 1].size(); ++row) {
            const auto& args = tuples[r + 1][row];
            for (std::size_t i = 0; i < args.size(); ++i) {
                for (std::size_t j = i + 1; j < args.size(); ++j) {
                    for (std::size_t l = 0; l < d; ++l) {
                        const Scalar c = g.constants()(args[i], args[j], l);
                        if (c == 0) {
                            continue;
                        }
                        std::vector<std::size_t> full{l};
                        for (std::size_t a = 0; a < args.size(); ++a) {
                            if (a != i && a != j) {
                                full.push_back(args[a]);
                            }
                        }
                        int sign = ((i + j) % 2 == 0) ? 1 : -1;
                        // sort full with sign
                        for (std::size_t p = 0; p < full.size(); ++p) {
                            for (std::size_t q = p + 1; q < full.size(); ++q) {
                                if (full[q] < full[p]) {
                                    std::swap(full[p], full[q]);
                                    sign = -sign;
                                }
                            }
                        }
                        bool repeated = false;
                        for (std::size_t p = 1; p < full.size(); ++p) {
                            repeated = repeated || full[p] == full[p - 1];
                        }
                        if (repeated) {
                            continue;
                        }
                        const auto it = std::find(tuples[r].begin(), tuples[r].end(), full);
                        m(row, static_cast<std::size_t>(it - tuples[r].begin())) += sign * c;
                    }
                }
            }
        }
        ranks.push_back(rank(m));
    }
    std::vector<std::size_t> dims;
    for (std::size_t r = 0; r <= r_max; ++r) {
        dims.push_back(tuples[r].size() - ranks[r] - (r == 0 ? 0 : ranks[r - 1]));
    }
    return dims;
}

} // namespace

TEST(LieAlgebra, Validation)
{
    EXPECT_TRUE(validate_lie_algebra(StructureConstants(3)).ok);
    EXPECT_TRUE(validate_lie_algebra(lie_algebras::sl2().constants()).ok);
    auto broken = lie_algebras::sl2().constants();
    broken(1, 2, 0) = -1; // [e, f] = -h but [f, e] = -h too
    const auto check = validate_lie_algebra(broken);
    EXPECT_FALSE(check.ok);
    EXPECT_EQ(check.failure, "antisymmetry");
    broken.set_antisymmetric(1, 2, 0, -1);
    broken.set_antisymmetric(0, 1, 1, 3);
    const auto jac = validate_lie_algebra(broken);
    EXPECT_FALSE(jac.ok);
    EXPECT_EQ(jac.failure, "jacobi");
    EXPECT_EQ(jac.witness, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_THROW(FiniteLieAlgebra{broken}, domain_error);
    EXPECT_TRUE(validate_lie_algebra(lie_algebras::gl(3).constants()).ok);
}

TEST(LieAlgebra, ModuleValidation)
{
    const auto g = lie_algebras::sl2();
    EXPECT_NO_THROW(LieModule::adjoint(g));
    std::vector<Matrix> bad(3, Matrix::identity(2));
    EXPECT_THROW(LieModule(g, bad), domain_error);
}

TEST(Cohomology, ClassicalDimensions)
{
    const auto line = FiniteLieAlgebra::abelian(1);
    EXPECT_EQ(ce_cohomology_dims(line, LieModule::trivial(line, 1), 1), (std::vector<std::size_t>{1, 1}));

    const auto aff = lie_algebras::affine_line();
    EXPECT_EQ(ce_cohomology_dims(aff, LieModule::trivial(aff, 1), 2), (std::vector<std::size_t>{1, 1, 0}));

    // H^0 = invariants: sl(2) adjoint has none; H^1 = H^2 = 0 by Whitehead, H^3(sl2, R) = 1
    const auto sl = lie_algebras::sl2();
    EXPECT_EQ(ce_cohomology_dims(sl, LieModule::adjoint(sl), 2), (std::vector<std::size_t>{0, 0, 0}));
    EXPECT_EQ(ce_cohomology_dims(sl, LieModule::trivial(sl, 1), 3), (std::vector<std::size_t>{1, 0, 0, 1}));

    // Betti numbers of the Heisenberg algebra: 1, 2, 2, 1
    const auto h = lie_algebras::heisenberg();
    EXPECT_EQ(ce_cohomology_dims(h, LieModule::trivial(h, 1), 3), (std::vector<std::size_t>{1, 2, 2, 1}));
}

TEST(Cohomology, MatchesBruteForceOracle)
{
    for (const auto& g : {lie_algebras::affine_line(), lie_algebras::heisenberg(), lie_algebras::sl2(),
                          jet_group_algebra(1, 3).algebra, jet_group_algebra(1, 4).algebra}) {
        const std::size_t r_max = g.dim() - 1;
        EXPECT_EQ(ce_cohomology_dims(g, LieModule::trivial(g, 1), r_max), brute_force_trivial_dims(g, r_max));
    }
}

TEST(Cohomology, DifferentialSquaresToZero)
{
    const auto g = jet_group_algebra(1, 3).algebra;
    for (const auto& v : {LieModule::adjoint(g), LieModule::trivial(g, 2)}) {
        for (std::size_t r = 0; r + 2 <= g.dim(); ++r) {
            const Matrix dd = ce_differential_matrix(g, v, r + 1) * ce_differential_matrix(g, v, r);
            EXPECT_EQ(rank(dd), 0U);
        }
    }
}

TEST(Cohomology, Relative)
{
    const auto aff = lie_algebras::affine_line();
    const auto triv = LieModule::trivial(aff, 1);
    EXPECT_EQ(relative_ce_cohomology_dims(aff, {}, triv, 2), ce_cohomology_dims(aff, triv, 2));
    EXPECT_EQ(relative_ce_cohomology_dims(aff, {aff.unit(0), aff.unit(1)}, triv, 2),
              (std::vector<std::size_t>{1, 0, 0}));
    // relative to the derived line span{e1}: only the cochain e0^* survives in degree 1, and it is closed
    EXPECT_EQ(relative_ce_cohomology_dims(aff, {aff.unit(1)}, triv, 2), (std::vector<std::size_t>{1, 1, 0}));
    const auto sl = lie_algebras::sl2();
    EXPECT_THROW(relative_ce_cohomology_dims(sl, {sl.unit(1), sl.unit(2)}, LieModule::trivial(sl, 1), 1),
                 domain_error);
}

TEST(Extension, HeisenbergIsNotSplit)
{
    const auto h = lie_algebras::heisenberg();
    const auto ext = make_extension(h, {h.unit(2)});
    EXPECT_EQ(ext.quotient.dim(), 2U);
    const auto cocycle = extension_two_cocycle(ext);
    EXPECT_TRUE(cocycle.is_cocycle);
    EXPECT_EQ(cocycle.cochain, (Vector{1}));
    EXPECT_EQ(is_split(ext), SplitVerdict::non_split);
}

TEST(Extension, DirectSumIsSplit)
{
    // affine line (+) R, kernel the R summand
    StructureConstants c(3);
    c.set_antisymmetric(0, 1, 1, 1);
    const FiniteLieAlgebra e(c);
    const auto ext = make_extension(e, {e.unit(2)});
    const auto cocycle = extension_two_cocycle(ext);
    EXPECT_EQ(cocycle.cochain, (Vector{0}));
    EXPECT_EQ(is_split(ext), SplitVerdict::split);
    // the affine line over its derived ideal splits too
    const auto aff = lie_algebras::affine_line();
    EXPECT_EQ(is_split(make_extension(aff, {aff.unit(1)})), SplitVerdict::split);
}

TEST(Extension, ClassIndependentOfSection)
{
    const auto g = jet_group_algebra(2, 2);
    const auto ext = make_extension(g.algebra, jet_group_kernel(g, 1));
    const auto base = extension_two_cocycle(ext);
    ASSERT_TRUE(base.is_cocycle);
    Matrix delta(ext.ideal.size(), ext.quotient.dim());
    for (std::size_t a = 0; a < delta.rows(); ++a) {
        for (std::size_t q = 0; q < delta.cols(); ++q) {
            delta(a, q) = rational(static_cast<long>((a * 7 + q * 3) % 5) - 2, 3);
        }
    }
    const auto shifted = extension_two_cocycle(with_shifted_section(ext, delta));
    EXPECT_TRUE(shifted.is_cocycle);
    EXPECT_NE(shifted.cochain, base.cochain);
    EXPECT_TRUE(cohomologous(ext.quotient, base.module, base.cochain, shifted.cochain));
}

TEST(Extension, NonAbelianKernelIsInapplicable)
{
    const auto g = jet_group_algebra(2, 3);
    const auto ext = make_extension(g.algebra, jet_group_kernel(g, 1));
    EXPECT_EQ(ext.big.dim(), ext.ideal.size() + ext.quotient.dim());
    EXPECT_EQ(is_split(ext), SplitVerdict::inapplicable);
}

TEST(Nilpotency, Series)
{
    EXPECT_TRUE(nilpotency_analysis(FiniteLieAlgebra::abelian(3)).abelian);
    EXPECT_EQ(nilpotency_analysis(FiniteLieAlgebra::abelian(3)).lower_central_dims,
              (std::vector<std::size_t>{3, 0}));
    const auto h = nilpotency_analysis(lie_algebras::heisenberg());
    EXPECT_TRUE(h.nilpotent);
    EXPECT_FALSE(h.abelian);
    EXPECT_EQ(h.lower_central_dims, (std::vector<std::size_t>{3, 1, 0}));
    const auto s = nilpotency_analysis(lie_algebras::sl2());
    EXPECT_FALSE(s.nilpotent);
    EXPECT_EQ(s.lower_central_dims, (std::vector<std::size_t>{3}));
}

TEST(Nilpotency, JetGroupKernels)
{
    for (std::size_t n = 1; n <= 2; ++n) {
        for (int m = 1; m <= 2; ++m) {
            const auto g = jet_group_algebra(n, m + 1);
            const auto ker = restrict_to_subalgebra(g.algebra, jet_group_kernel(g, m));
            EXPECT_TRUE(nilpotency_analysis(ker).abelian) << n << " " << m;
        }
    }
    // n = 2: ker(J_{3,0} -> J_{1,0}) is nilpotent but not abelian
    const auto g = jet_group_algebra(2, 3);
    const auto ker = nilpotency_analysis(restrict_to_subalgebra(g.algebra, jet_group_kernel(g, 1)));
    EXPECT_TRUE(ker.nilpotent);
    EXPECT_FALSE(ker.abelian);
}
