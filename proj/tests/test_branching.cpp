#include <gtest/gtest.h>

#include "sl2b/branching.hpp"

using namespace sl2b;

namespace {

bool close(cplx a, cplx b, double tol = 1e-8) { return std::abs(a - b) < tol; }

struct Fixture {
    FieldConfig K;
    std::shared_ptr<const SL2FqTable> T;
    std::vector<CuspidalChar> cusp;
    explicit Fixture(int q) : K(q), T(std::make_shared<const SL2FqTable>(q)), cusp(cuspidal_characters(*T)) {}
    const CuspidalChar& find(CuspidalKind k) const
    {
        for (const auto& c : cusp)
            if (c.kind == k) return c;
        throw std::logic_error("missing cuspidal");
    }
};

}  // namespace

TEST(Branching, PiPlusMinusModels)
{
    FieldConfig K(3);
    for (int th : {1, -1}) {
        auto p = pi_d_pm(K, th, 1, true), m = pi_d_pm(K, th, 1, false);
        EXPECT_TRUE(close(p->degree(), 4.0));
        EXPECT_TRUE(close(m->degree(), 4.0));
        EXPECT_EQ(intertwining(*p, *m), 0);
        EXPECT_TRUE(is_irreducible(*p));
        EXPECT_EQ(depth_of(*p), 1);
        EXPECT_TRUE(close(p->value(p->quotient().minus_identity()), 4.0 * th));
    }
    EXPECT_THROW(pi_d_pm(K, 1, 0, true), std::invalid_argument);
}

TEST(Branching, DepthZeroVertexZero)
{
    Fixture f(3);
    const auto& dl = f.find(CuspidalKind::DL);
    auto tab = depth_zero_components(f.K, f.T, dl, 0, 2);
    ASSERT_EQ(tab.rows.size(), 3u);
    EXPECT_EQ(tab.rows[0].label, "sigma");
    EXPECT_EQ(tab.rows[0].degree, 2);
    EXPECT_EQ(tab.rows[1].degree, 12);
    EXPECT_EQ(tab.rows[2].degree, 12);
    EXPECT_EQ(tab.rows[1].label, "pi+");
    EXPECT_EQ(tab.rows[2].label, "pi-");
    EXPECT_TRUE(tab.all_certified());
    // the two halves sum to (q+1) q^{d-1} deg sigma
    EXPECT_EQ(tab.rows[1].degree + tab.rows[2].degree, 4 * 3 * 2);
    auto j = tab.to_json();
    EXPECT_EQ(j["components"].size(), 3u);
    EXPECT_EQ(j["cutoff"], 2);
}

TEST(Branching, DepthZeroSplitVertexOne)
{
    Fixture f(3);
    const auto& sp = f.find(CuspidalKind::SplitPlus);
    auto tab = depth_zero_components(f.K, f.T, sp, 1, 1);
    ASSERT_EQ(tab.rows.size(), 1u);
    EXPECT_EQ(tab.rows[0].label, "pi+");
    EXPECT_EQ(tab.rows[0].degree, 4);
    EXPECT_TRUE(tab.rows[0].certified);
}

TEST(Branching, BudgetMarksRowsUnverified)
{
    Fixture f(3);
    BudgetConfig tiny;
    tiny.cap = 100;
    auto tab = depth_zero_components(f.K, f.T, f.find(CuspidalKind::DL), 1, 1, tiny);
    ASSERT_EQ(tab.rows.size(), 2u);
    EXPECT_FALSE(tab.all_certified());
    EXPECT_TRUE(tab.budget_skipped());
    EXPECT_EQ(tab.rows[0].status, "predicted, unverified");
}

TEST(Branching, RestrictionToBKd)
{
    for (int q : {3, 5}) {
        Fixture f(q);
        std::vector<const CuspidalChar*> dls;
        for (const auto& c : f.cusp)
            if (c.kind == CuspidalKind::DL) dls.push_back(&c);
        for (int d : {1, 2}) {
            for (auto* a : dls)
                for (auto* b : dls) {
                    bool same = a->central_sign == b->central_sign;
                    EXPECT_EQ(bk_intertwining(f.K, f.T, a->values, b->values, d, false), same ? 2 : 0);
                    if (!same) EXPECT_EQ(bk_intertwining(f.K, f.T, a->values, b->values, d, true), 2);
                }
        }
    }
}

TEST(Branching, SectionFivePsiDx)
{
    Fixture f(3);
    const auto& sp = f.find(CuspidalKind::SplitPlus);
    const auto& sm = f.find(CuspidalKind::SplitMinus);
    int th0 = sp.central_sign;
    for (int d : {1, 2}) {
        for (bool plus : {true, false}) {
            const auto& s0 = plus ? sp : sm;
            auto psi = psi_d_x(f.K, th0, d, plus);
            EXPECT_EQ(intertwining(*chi_d_x(f.K, f.T, s0, d, false), *psi), 1);
            auto psi_other = psi_d_x(f.K, -th0, d, plus);
            EXPECT_EQ(intertwining(*chi_d_x(f.K, f.T, s0, d, false), *psi_other), 0);
            EXPECT_EQ(intertwining(*chi_d_x(f.K, f.T, s0, d, true), *psi_other), 1);
            // psi_d^x(z I) = theta(z) (q-1)/2 q^{ceil(d/2)-1}
            const Quotient& Q = psi->quotient();
            double expect = (3 - 1) / 2.0 * std::pow(3.0, ceil_div(d, 2) - 1);
            EXPECT_TRUE(close(psi->value(Q.identity()), expect));
            EXPECT_TRUE(close(psi->value(Q.minus_identity()), th0 * expect));
        }
    }
}

TEST(Branching, PositiveDepthRamified)
{
    FieldConfig K(3);
    auto D = yu_data(K, torus_by_id(K, "r-1-pi"), 1).front();
    auto tab = positive_depth_components(D, 3);
    ASSERT_EQ(tab.rows.size(), 3u);
    EXPECT_EQ(tab.rows[0].d, 1);
    EXPECT_EQ(tab.rows[0].t, 0);
    EXPECT_EQ(tab.rows[1].d, 3);
    EXPECT_EQ(tab.rows[1].lambda, "1");
    EXPECT_EQ(tab.rows[2].d, 2);
    EXPECT_EQ(tab.rows[2].lambda, "w");
    for (const auto& r : tab.rows) {
        EXPECT_TRUE(r.certified) << r.d;
        EXPECT_EQ(r.label, "shalika");
        EXPECT_EQ(r.degree, ipow(3, r.d - 1) * 4);
        EXPECT_EQ(r.model_inner, 1);
    }
}

TEST(Branching, PositiveDepthUnramified)
{
    FieldConfig K(3);
    auto D = yu_data(K, torus_by_id(K, "u-eps"), 2).front();
    auto tab = positive_depth_components(D, 3);
    ASSERT_EQ(tab.rows.size(), 3u);
    EXPECT_EQ(tab.rows[0].label, "unramified-type");
    EXPECT_EQ(tab.rows[0].degree, 6);
    EXPECT_EQ(tab.rows[1].degree, 36);
    EXPECT_EQ(tab.rows[2].degree, 36);
    EXPECT_TRUE(tab.all_certified());
    EXPECT_THROW(positive_depth_components(D, 0), std::invalid_argument);
}

TEST(Branching, TwistRelationsAndDepth)
{
    FieldConfig K(3);
    auto data = yu_data(K, torus_by_id(K, "u-eps"), 2);
    int twists = 0, inverses = 0;
    for (const auto& a : data)
        for (const auto& b : data) {
            auto tw = twist_relation(a, b);
            if (&a == &b) EXPECT_EQ(tw.rel, Relation::Same);
            if (tw.rel == Relation::Twist) {
                ++twists;
                EXPECT_EQ(tw.m2, 0);
            }
            if (tw.rel == Relation::InverseTwist) ++inverses;
        }
    // |T/T_{0+}| = 4 and two of its characters are trivial on Z
    EXPECT_EQ(twists, int(data.size()));
    EXPECT_GT(inverses, 0);
}

TEST(Branching, SmallIntertwiningMatrix)
{
    FieldConfig K(3);
    auto data = yu_data(K, torus_by_id(K, "u-eps-eta"), 2);
    std::vector<BranchingTable> tabs;
    for (const auto& D : data) tabs.push_back(positive_depth_components(D, 2));
    auto M = intertwining_matrix(tabs);
    for (size_t i = 0; i < tabs.size(); ++i) {
        EXPECT_EQ(M[i][i], (long long)tabs[i].rows.size());
        for (size_t j = 0; j < tabs.size(); ++j) {
            auto tw = twist_relation(*tabs[i].yu, *tabs[j].yu);
            bool predicted = tw.rel == Relation::Same || tw.rel == Relation::Twist;
            EXPECT_EQ(M[i][j] > 0, predicted) << i << "," << j;
        }
    }
    auto rep = exhaustiveness(tabs, K.minus_one_is_square());
    EXPECT_TRUE(rep.ok());
}
