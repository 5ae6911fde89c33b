#include <gtest/gtest.h>

#include <random>

#include "sl2b/shalika.hpp"

using namespace sl2b;

namespace {

bool close(cplx a, cplx b, double tol = 1e-8) { return std::abs(a - b) < tol; }

bool in_level(const Quotient& Q, const Mat& g, int n)
{
    // g in G_{0,n}: diagonal = 1 and off-diagonal = 0 mod P^n
    for (int i = 0; i < std::min(n, Q.N()); ++i) {
        if (g.at(0, i) != (i == 0) || g.at(3, i) != (i == 0)) return false;
        if (g.at(1, i) || g.at(2, i)) return false;
    }
    return true;
}

}  // namespace

TEST(Shalika, PsiXIsACharacterOnGamma)
{
    FieldConfig K(3);
    auto ctx = shalika_context(K, 3, -K.pi_pow(-3) + K.pi_pow(-2), K.pi_pow(-1));
    const auto& G = *ctx->gamma();
    const Quotient& Q = ctx->quotient();
    std::mt19937 rng(17);
    for (int k = 0; k < 10000; ++k) {
        Mat g = G.element(rng() % G.order()), h = G.element(rng() % G.order());
        ASSERT_TRUE(close(ctx->psi_X(Q.mul(g, h)), ctx->psi_X(g) * ctx->psi_X(h)));
    }
    EXPECT_TRUE(close(ctx->psi_X(Q.identity()), 1.0));
    // Psi(Tr(X(g - I))) against the Laurent matrix trace
    LMat X{LocalElem::zero(K.F), ctx->u(), ctx->v(), LocalElem::zero(K.F)};
    for (int k = 0; k < 200; ++k) {
        Mat g = G.element(rng() % G.order());
        LMat gm = lift(Q, g);
        LMat E{gm.a11 - K.one(), gm.a12, gm.a21, gm.a22 - K.one()};
        EXPECT_TRUE(close(K.psi((X * E).trace()), ctx->psi_X(g)));
    }
    EXPECT_THROW(ctx->psi_X(Q.lower_unipotent(1, 0)), std::domain_error);
}

TEST(Shalika, PsiXLowerUnipotentPattern)
{
    for (int q : {3, 5}) {
        FieldConfig K(q);
        for (int d = 1; d <= 2; ++d) {
            auto ctx = shalika_context(K, d, -K.pi_pow(-d), LocalElem::zero(K.F));
            for (int c = 0; c < q; ++c) {
                Mat g = ctx->quotient().lower_unipotent(uint8_t(c), d);
                EXPECT_TRUE(close(ctx->psi_X(g), K.F->psi0(K.F->neg(uint8_t(c)))));
            }
        }
    }
}

TEST(Shalika, ExtensionCountsMatchBruteForce)
{
    FieldConfig K(3);
    for (int d = 1; d <= 2; ++d) {
        for (const auto& v : {LocalElem::zero(K.F), K.pi_pow(1 - d)}) {
            auto ctx = shalika_context(K, d, -K.pi_pow(-d), v);
            const Quotient& Q = ctx->quotient();
            LocalElem w = v * ctx->u().inverse();
            FullK G(Q);
            Shape s = gamma_shape(d);
            uint64_t nT = 0, nCap = 0;
            for (uint64_t i = 0; i < G.order(); ++i) {
                Mat g = G.element(i);
                if (!Q.entry(g, 0).equals(Q.entry(g, 3))) continue;
                if (!(Q.entry(g, 2) - Q.entry(g, 1) * w).with_precision(Q.N()).is_zero()) continue;
                ++nT;
                LocalElem a1 = Q.entry(g, 0) - K.one();
                bool cap = (a1.is_zero() || a1.val() >= s.diag) && Q.entry(g, 1).val() >= s.upper &&
                           Q.entry(g, 2).val() >= s.lower;
                if (cap) ++nCap;
            }
            EXPECT_EQ(ctx->torus()->order(), nT);
            EXPECT_EQ(ctx->torus_cap_gamma().size(), nCap);
            EXPECT_EQ(ctx->extension_count(), nT / nCap);
            EXPECT_EQ(ctx->extensions().size(), nT / nCap);
            EXPECT_EQ(ctx->extension_count(), 2u * (d == 1 ? 3 : 3));
        }
    }
    auto ctx3 = shalika_context(K, 3, -K.pi_pow(-3), LocalElem::zero(K.F));
    EXPECT_EQ(ctx3->extensions().size(), 18u);
}

TEST(Shalika, TheoremDegreeNormDepth)
{
    struct Case {
        int q, d;
        size_t take;
    };
    for (const auto& c : std::vector<Case>{{3, 1, 6}, {3, 2, 6}, {3, 3, 3}, {5, 1, 4}, {5, 2, 2}}) {
        FieldConfig K(c.q);
        LocalElem v = c.d >= 2 ? K.pi_pow(1 - c.d) * K.eps_elem() : K.pi();
        auto ctx = shalika_context(K, c.d, K.pi_pow(-c.d) * K.eps_elem(), v);
        auto data = shalika_data(ctx);
        ASSERT_GE(data.size(), c.take);
        for (size_t i = 0; i < c.take; ++i) {
            auto chi = shalika_character(data[i]);
            EXPECT_TRUE(close(chi->degree(), double(shalika_degree(c.q, c.d))));
            EXPECT_EQ(intertwining(*chi, *chi), 1) << c.q << " " << c.d << " " << i;
            EXPECT_EQ(depth_of(*chi), c.d);
        }
    }
    EXPECT_EQ(shalika_degree(3, 1), 4);
    EXPECT_EQ(shalika_degree(3, 2), 12);
}

TEST(Shalika, DistinctThetaGiveInequivalentReps)
{
    FieldConfig K(3);
    for (int d = 1; d <= 2; ++d) {
        auto ctx = shalika_context(K, d, -K.pi_pow(-d), LocalElem::zero(K.F));
        auto data = shalika_data(ctx);
        std::vector<CFPtr> chars;
        for (const auto& D : data) chars.push_back(shalika_character(D));
        for (size_t i = 0; i < chars.size(); ++i)
            for (size_t j = 0; j < chars.size(); ++j) EXPECT_EQ(intertwining(*chars[i], *chars[j]), i == j ? 1 : 0);
    }
}

TEST(Shalika, RejectsIncompatibleTheta)
{
    FieldConfig K(3);
    auto ctx = shalika_context(K, 2, -K.pi_pow(-2), K.pi_pow(-1));
    ShalikaDatum bad{ctx, std::vector<cplx>(ctx->torus()->order(), 1.0), "bad"};
    EXPECT_THROW(shalika_character(bad), std::invalid_argument);
    EXPECT_THROW(shalika_context(K, 2, K.pi_pow(-1), LocalElem::zero(K.F)), std::invalid_argument);
    EXPECT_THROW(shalika_context(K, 2, K.pi_pow(-2), K.pi_pow(-2)), std::invalid_argument);
}

TEST(Shalika, ConjugationInvariance)
{
    FieldConfig K(3);
    auto ctx = shalika_context(K, 2, -K.pi_pow(-2), K.one());
    auto D = shalika_data(ctx)[1];
    auto inner = shalika_inducing_character(D);
    SubgroupPtr G = std::make_shared<FullK>(ctx->quotient());
    auto chi = induce(inner, G);
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
        Mat g = G->element(rng() % G->order());
        auto chig = induce(conjugate_cf(inner, g), G);
        EXPECT_EQ(intertwining(*chi, *chig), 1);
    }
}

TEST(Shalika, TransferContainmentAndCorrection)
{
    FieldConfig K(3);
    int d = 2;
    auto X = shalika_context(K, d, K.pi_pow(-2), LocalElem::zero(K.F));
    for (const auto& vp : {K.pi(), K.one(), K.one() + K.pi()}) {
        auto Xp = shalika_context(K, d, K.pi_pow(-2), vp);
        const Quotient& Q = X->quotient();
        LocalElem w = LocalElem::zero(K.F), wp = vp * Xp->u().inverse();
        const auto& Tp = *Xp->torus();
        for (size_t i = 0; i < Tp.order(); ++i) {
            auto tr = transfer(Tp.element(i), *X, *Xp);
            EXPECT_TRUE(X->torus()->contains(tr.target));
            EXPECT_TRUE(in_level(Q, tr.correction, tr.n));
            LocalElem dd = Q.entry(tr.target, 0) - Q.entry(tr.source, 0);
            EXPECT_TRUE(dd.is_zero() || dd.val() >= tr.n);
            // t^{-1} t' from its explicit entries
            LocalElem a = Q.entry(tr.target, 0), ap = Q.entry(tr.source, 0), b = Q.entry(tr.source, 1);
            LocalElem da = a - ap;
            Mat expect = Q.make(K.one() + da * ap, da * b, da * b * w + a * b * (wp - w), K.one() - a * da);
            EXPECT_TRUE(Q.key(expect) == Q.key(tr.correction));
            if (tr.n >= ceil_div(d + 1, 2)) {
                EXPECT_TRUE(X->gamma()->contains(tr.correction));
                // Psi_X(t^{-1}t') = Psi(a b u (w' - w)) Psi(2 b v (a - a'))
                cplx f = K.psi(a * b * X->u() * (wp - w)) * K.psi(LocalElem::from_int(K.F, 2) * b * X->v() * da);
                EXPECT_TRUE(close(X->psi_X(tr.correction), f));
            }
        }
    }
    // X = X'
    const auto& T = *X->torus();
    for (size_t i = 0; i < T.order(); ++i) {
        auto tr = transfer(T.element(i), *X, *X);
        EXPECT_EQ(X->quotient().key(tr.target), X->quotient().key(T.element(i)));
        EXPECT_EQ(X->quotient().key(tr.correction), X->quotient().key(X->quotient().identity()));
    }
}

TEST(Shalika, MatchedThetaGivesEquivalentRep)
{
    FieldConfig K(3);
    int d = 2;
    auto X = shalika_context(K, d, K.pi_pow(-2), LocalElem::zero(K.F));
    auto data = shalika_data(X);
    for (const auto& vp : {K.one(), K.pi()}) {
        auto Xp = shalika_context(K, d, K.pi_pow(-2), vp);
        for (size_t i = 0; i < data.size(); i += 2) {
            auto Dp = matched_theta(data[i], Xp);
            EXPECT_TRUE(Xp->compatible(Dp.theta));
            EXPECT_EQ(intertwining(*shalika_character(data[i]), *shalika_character(Dp)), 1);
            if (vp.val() >= 1) {
                // w and w' agree mod P^{d+1}: theta' = theta on transfer pairs
                const auto& Tp = *Xp->torus();
                for (size_t k = 0; k < Tp.order(); ++k) {
                    auto tr = transfer(Tp.element(k), *X, *Xp);
                    EXPECT_TRUE(close(Dp.theta[k], data[i].theta[X->torus_index(tr.target)]));
                }
            }
        }
    }
    // X = X'
    auto same = matched_theta(data[0], X);
    for (size_t k = 0; k < same.theta.size(); ++k) EXPECT_TRUE(close(same.theta[k], data[0].theta[k]));
    auto far = shalika_context(K, d, K.pi_pow(-2) * K.eps_elem(), LocalElem::zero(K.F));
    EXPECT_THROW(matched_theta(data[0], far), std::invalid_argument);
}

TEST(Shalika, DiagonalTwist)
{
    for (int q : {3, 5}) {
        FieldConfig K(q);
        int d = 2;
        LocalElem u = -K.pi_pow(-d);
        auto X = shalika_context(K, d, u, LocalElem::zero(K.F));
        auto data = shalika_data(X);
        auto rep = diagonal_twist_test(data[0], data[0]);
        EXPECT_TRUE(rep.predicted_equivalent);
        EXPECT_EQ(rep.inner_product, 1);
        auto Xe = shalika_context(K, d, u * K.eps_elem(), LocalElem::zero(K.F));
        for (const auto& De : shalika_data(Xe)) {
            auto r = diagonal_twist_test(data[0], De);
            EXPECT_FALSE(r.square_ratio);
            EXPECT_EQ(r.inner_product, 0);
        }
        // c = 2: u' = 4u, theta'(t(z,b)) = theta(t(z, b/4))
        LocalElem four = LocalElem::from_int(K.F, 4);
        auto X4 = shalika_context(K, d, u * four, LocalElem::zero(K.F));
        const Quotient& Q = X->quotient();
        LocalElem quarter = four.inverse().with_precision(Q.N());
        int equivalent = 0;
        for (const auto& D4 : shalika_data(X4)) {
            auto r = diagonal_twist_test(data[1], D4);
            EXPECT_TRUE(r.square_ratio);
            EXPECT_TRUE(r.consistent());
            equivalent += r.predicted_equivalent;
            bool match = true;
            const auto& T4 = *X4->torus();
            for (size_t i = 0; i < T4.order(); ++i) {
                Mat t = T4.element(i);
                Mat s = Q.make(Q.entry(t, 0), (Q.entry(t, 1) * quarter).with_precision(Q.N()), LocalElem::zero(K.F, Q.N()),
                               Q.entry(t, 0));
                if (!close(D4.theta[i], data[1].theta[X->torus_index(s)])) match = false;
            }
            EXPECT_EQ(match, r.predicted_equivalent);
        }
        EXPECT_EQ(equivalent, 1);
    }
}
