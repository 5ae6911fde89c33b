#include <gtest/gtest.h>

#include <random>

#include "sl2b/abelian.hpp"
#include "sl2b/classfun.hpp"

using namespace sl2b;

namespace {

bool close(cplx a, cplx b, double tol = 1e-8) { return std::abs(a - b) < tol; }

struct Fixture {
    FieldConfig K{3};
    Quotient Q{K.F, 2};
    SubgroupPtr G = std::make_shared<FullK>(Q);
    SubgroupPtr BK1 = std::make_shared<ShapeGroup>(Q, Shape{0, 0, 1, false});
    SubgroupPtr K1 = std::make_shared<ShapeGroup>(Q, Shape{1, 1, 1, false});
    SubgroupPtr ZK1 = std::make_shared<ShapeGroup>(Q, Shape{1, 1, 1, true});

    // lambda^j of the residue of a11 on BK_1
    CFPtr diag_char(int j) const
    {
        auto F = K.F;
        return std::make_shared<FormulaCharacter>(
            BK1, [F, j](const Mat& g) { return root_of_unity((long long)j * F->dlog(g.at(0, 0)), F->q - 1); },
            "lambda^" + std::to_string(j));
    }
    // Psi(Tr(Y (g - I)) / pi) on K_1, optionally times a central sign on Z K_1
    CFPtr lie_char(std::array<uint8_t, 4> Y, bool central, int sign) const
    {
        auto F = K.F;
        auto H = central ? ZK1 : K1;
        return std::make_shared<FormulaCharacter>(
            H,
            [F, Y, central, sign](const Mat& g0) {
                Mat g = g0;
                double s = 1.0;
                if (central && g.at(0, 0) != 1) {
                    for (auto& x : g.d) x = F->neg(x);
                    s = sign;
                }
                // (g - I) has digit-1 entries e0..e3; Tr(Y E) = Y11 E11 + Y12 E21 + Y21 E12 + Y22 E22
                uint8_t t = 0;
                t = F->add(t, F->mul(Y[0], g.at(0, 1)));
                t = F->add(t, F->mul(Y[1], g.at(2, 1)));
                t = F->add(t, F->mul(Y[2], g.at(1, 1)));
                t = F->add(t, F->mul(Y[3], g.at(3, 1)));
                return s * F->psi0(t);
            },
            "lie");
    }
    CFPtr random_linear(std::mt19937& rng) const
    {
        int kind = rng() % 3;
        if (kind == 0) return diag_char(rng() % 2);
        std::array<uint8_t, 4> Y{uint8_t(rng() % 3), uint8_t(rng() % 3), uint8_t(rng() % 3), uint8_t(rng() % 3)};
        return lie_char(Y, kind == 2, (rng() % 2) ? 1 : -1);
    }
};

}  // namespace

TEST(ClassFunction, TrivialCharacter)
{
    Fixture f;
    auto one = std::make_shared<FormulaCharacter>(f.G, [](const Mat&) { return cplx(1.0); }, "1");
    EXPECT_EQ(intertwining(*one, *one), 1);
    EXPECT_EQ(depth_of(*one), 0);
    EXPECT_TRUE(is_irreducible(*one));
    auto ind = induce(one, f.G);
    for (uint64_t i = 0; i < f.G->order(); i += 37) EXPECT_TRUE(close(ind->value(f.G->element(i)), 1.0));
}

TEST(ClassFunction, FrobeniusReciprocityRandomTriples)
{
    Fixture f;
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto chi = f.random_linear(rng);
        auto other = f.random_linear(rng);
        auto psi = induce(other, f.G);
        auto ind = induce(chi, f.G);
        cplx lhs = inner_product_direct(*ind, *psi);
        cplx rhs = inner_product_direct(*chi, *restrict_to(psi, chi->support()));
        EXPECT_TRUE(close(lhs, rhs, 1e-6)) << trial << ": " << lhs << " vs " << rhs;
        EXPECT_TRUE(close(inner_product(*ind, *psi), lhs, 1e-6));
        EXPECT_NO_THROW(nearest_integer(lhs));
    }
}

TEST(ClassFunction, InductionInStages)
{
    Fixture f;
    std::mt19937 rng(5);
    auto chi = f.lie_char({1, 2, 0, 1}, false, 1);
    auto direct = induce(chi, f.G);
    auto staged = induce(induce(chi, f.BK1), f.G);
    auto staged2 = induce(induce(chi, f.ZK1), f.G);
    for (int k = 0; k < 100; ++k) {
        Mat g = f.G->element(rng() % f.G->order());
        EXPECT_TRUE(close(direct->value(g), staged->value(g)));
        EXPECT_TRUE(close(direct->value(g), staged2->value(g)));
    }
    EXPECT_TRUE(close(direct->degree(), 24.0));
}

TEST(ClassFunction, ConjugationRoundTrip)
{
    Fixture f;
    std::mt19937 rng(9);
    auto chi = f.diag_char(1);
    Mat g = f.G->element(rng() % f.G->order());
    auto c = conjugate_cf(chi, g);
    auto back = conjugate_cf(c, f.Q.inv(g));
    for (uint64_t i = 0; i < f.BK1->order(); i += 7) {
        Mat h = f.BK1->element(i);
        EXPECT_TRUE(close(back->value(h), chi->value(h)));
        EXPECT_TRUE(c->support()->contains(f.Q.conj(h, g)));
        EXPECT_TRUE(close(c->value(f.Q.conj(h, g)), chi->value(h)));
    }
    EXPECT_FALSE(chi->at(f.Q.lower_unipotent(1, 0)).has_value());
}

TEST(ClassFunction, DepthOfInducedLieCharacter)
{
    Fixture f;
    auto chi = induce(f.lie_char({0, 1, 0, 0}, true, 1), f.G);
    EXPECT_EQ(depth_of(*chi), 1);
    auto lam = induce(f.diag_char(1), f.G);
    EXPECT_EQ(depth_of(*lam), 0);
    // at q = 3 the nontrivial lambda is quadratic, so the principal series splits in two
    EXPECT_EQ(intertwining(*lam, *lam), 2);
    EXPECT_TRUE(close(lam->degree(), 4.0));
}

TEST(Abelian, InvariantFactorsAndCharacters)
{
    // Z/4 x Z/6 on labels x = 6a + b
    FiniteAbelian A(24, [](int x, int y) { return ((x / 6 + y / 6) % 4) * 6 + (x % 6 + y % 6) % 6; });
    EXPECT_EQ(A.invariant_factors(), (std::vector<long long>{2, 12}));
    EXPECT_EQ(A.exponent(), 12);
    auto chars = A.characters();
    ASSERT_EQ(chars.size(), 24u);
    // orthogonality and multiplicativity
    for (size_t i = 0; i < chars.size(); ++i) {
        for (int x = 0; x < 24; ++x)
            for (int y = 0; y < 24; ++y) {
                int xy = ((x / 6 + y / 6) % 4) * 6 + (x % 6 + y % 6) % 6;
                ASSERT_EQ((chars[i][x] + chars[i][y]) % 12, chars[i][xy]);
            }
        for (size_t j = 0; j < chars.size(); ++j) {
            cplx s = 0;
            for (int x = 0; x < 24; ++x) s += A.value(chars[i], x) * std::conj(A.value(chars[j], x));
            EXPECT_TRUE(close(s, i == j ? 24.0 : 0.0, 1e-9));
        }
    }
    FiniteAbelian C(7, [](int x, int y) { return (x + y) % 7; });
    EXPECT_EQ(C.invariant_factors(), (std::vector<long long>{7}));
}

TEST(Abelian, SmithDiagonal)
{
    auto d = smith_diagonal({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
    std::sort(d.begin(), d.end());
    EXPECT_EQ(d, (std::vector<long long>{2, 6, 12}));
}

TEST(Parallel, DeterministicAcrossThreadCounts)
{
    auto f = [](uint64_t i) { return cplx(std::sin(double(i) * 0.37), std::cos(double(i) * 1.3) / (1.0 + i)); };
    set_thread_count(1);
    cplx a = parallel_sum<cplx>(200000, f);
    set_thread_count(3);
    cplx b = parallel_sum<cplx>(200000, f);
    set_thread_count(0);
    EXPECT_EQ(a.real(), b.real());
    EXPECT_EQ(a.imag(), b.imag());
}
