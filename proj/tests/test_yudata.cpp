#include <gtest/gtest.h>

#include <random>

#include "sl2b/yudata.hpp"

using namespace sl2b;

namespace {

bool close(cplx a, cplx b, double tol = 1e-8) { return std::abs(a - b) < tol; }

bool same_lmat(const LMat& a, const LMat& b, int prec)
{
    auto eq = [prec](const LocalElem& x, const LocalElem& y) { return (x - y).with_precision(prec).is_zero(); };
    return eq(a.a11, b.a11) && eq(a.a12, b.a12) && eq(a.a21, b.a21) && eq(a.a22, b.a22);
}

// rho is a linear character on H: test on random pairs
void expect_multiplicative(const InducingData& I, int pairs)
{
    const auto& H = *I.H.group;
    const Quotient& Q = I.Q;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<uint64_t> pick(0, H.order() - 1);
    for (int k = 0; k < pairs; ++k) {
        Mat g = H.element(pick(rng)), h = H.element(pick(rng));
        ASSERT_TRUE(close(I.rho->value(Q.mul(g, h)), I.rho->value(g) * I.rho->value(h))) << I.label();
    }
}

}  // namespace

TEST(YuData, MuSetAndDepths)
{
    FieldConfig K(3);
    auto mus = mu_set(2);
    ASSERT_EQ(mus.size(), 5u);
    auto ram = torus_by_id(K, "r-1-pi");
    auto un = torus_by_id(K, "u-eps");
    auto eta = torus_by_id(K, "u-eps-eta");
    EXPECT_EQ(delta2(ram, {1, LambdaKind::D}), 3);
    EXPECT_EQ(delta2(ram, {1, LambdaKind::One}), 5);
    EXPECT_EQ(delta2(un, {2, LambdaKind::D}), 8);
    EXPECT_EQ(delta2(eta, {0, LambdaKind::One}), 2);
    auto D = yu_data(K, ram, 1).front();
    EXPECT_EQ(component_depth(D, {0, LambdaKind::One}), 1);
    EXPECT_EQ(component_depth(D, {1, LambdaKind::D}), 2);
    EXPECT_EQ(component_depth(D, {1, LambdaKind::One}), 3);
    Shape s = inducing_shape(D, {1, LambdaKind::D});
    EXPECT_EQ(s.diag, 1);
    EXPECT_EQ(s.upper, 0);
    EXPECT_EQ(s.lower, 2);
}

TEST(YuData, ConjugatedLieElements)
{
    FieldConfig K(5);
    Distinguished Dm(K);
    for (const auto& T : table1_tori(K)) {
        LocalElem u = T.gamma1, v = T.gamma2;
        LMat X = T.X();
        LMat Xw = Dm.w() * X * Dm.w().inverse();
        EXPECT_TRUE(same_lmat(Xw, LMat{Dm.zero(), -v, -u, Dm.zero()}, 8)) << T.id;
        for (int t = 1; t <= 2; ++t) {
            LMat Xa = Dm.alpha(t) * X * Dm.alpha(-t);
            EXPECT_TRUE(same_lmat(Xa, LMat{Dm.zero(), u * K.pi_pow(-2 * t), v * K.pi_pow(2 * t), Dm.zero()}, 8));
            LMat mu = mu_matrix(K, T, {t, LambdaKind::D});
            LMat Xm = mu * X * mu.inverse();
            EXPECT_TRUE(Xm.a11.with_precision(8).is_zero() && Xm.a22.with_precision(8).is_zero()) << T.id;
        }
    }
    LMat Xe = Dm.e() * torus_by_id(K, "u-eps").X() * Dm.e().inverse();
    EXPECT_TRUE(same_lmat(Xe, LMat{Dm.zero(), K.eps_elem(), K.one(), Dm.zero()}, 8));
    LMat Xee = Dm.e_eta() * torus_by_id(K, "u-eps-eta").X() * Dm.e_eta().inverse();
    EXPECT_TRUE(same_lmat(Xee, LMat{Dm.zero(), K.eps_elem() * K.pi_pow(-1), K.pi(), Dm.zero()}, 8));
}

TEST(YuData, PhiHatExtendsPhi)
{
    FieldConfig K(3);
    struct Case {
        std::string id;
        int r2;
    };
    for (const auto& c : std::vector<Case>{{"r-1-pi", 1}, {"r-eps-pi", 3}, {"u-eps", 2}, {"u-eps-eta", 2}}) {
        auto T = torus_by_id(K, c.id);
        auto data = yu_data(K, T, c.r2);
        ASSERT_FALSE(data.empty());
        for (size_t i = 0; i < data.size(); i += std::max<size_t>(1, data.size() / 3)) {
            const auto& D = data[i];
            for (const auto& mu : mu_set(1)) {
                auto I = inducing_data(D, mu);
                EXPECT_EQ(I.degree, 1);
                EXPECT_EQ(I.H.group->order() % I.Gmu->order(), 0u);
                // phi-hat restricted to the torus is phi, read in coordinates of T^mu
                for (size_t k = 0; k < I.Tmu->order(); ++k) {
                    Mat t = I.Tmu->element(k);
                    ASSERT_TRUE(close(I.rho->value(t), phi_on_coords(D.phi, I.Q, t, I.u_mu))) << I.label();
                }
                expect_multiplicative(I, 2000);
            }
        }
    }
}

TEST(YuData, PhiHatDepth)
{
    // trivial on G^mu_{y,r+} but not on G^mu_{y,r}
    FieldConfig K(3);
    auto T = torus_by_id(K, "u-eps");
    for (const auto& D : yu_data(K, T, 2)) {
        auto I = inducing_data(D, {0, LambdaKind::One});
        int r = D.r2 / 2;
        ShapeGroup Gr(I.Q, Shape{r, r, r, false}), Gr1(I.Q, Shape{r + 1, r + 1, r + 1, false});
        bool nontrivial = false;
        for (uint64_t k = 0; k < Gr.order(); ++k) {
            Mat g = Gr.element(k);
            cplx v = I.rho->value(g);
            if (Gr1.contains(g)) ASSERT_TRUE(close(v, 1.0));
            else if (!close(v, 1.0)) nontrivial = true;
        }
        EXPECT_TRUE(nontrivial) << D.describe();
    }
}

TEST(YuData, ImageOfConjugatedTorus)
{
    // K cap T^mu, compared with the conjugates mu t mu^{-1} of exact torus elements
    FieldConfig K(3);
    for (const auto& id : {"u-eps", "r-1-pi"}) {
        auto T = torus_by_id(K, id);
        int r2 = T.ramified ? 1 : 2;
        auto D = yu_data(K, T, r2).front();
        for (const auto& mu : mu_set(1)) {
            auto I = inducing_data(D, mu);
            LMat m = I.mu_mat, mi = I.mu_inv;
            int n = I.Q.N() + 4;
            TorusCoordGroup C(K, T.c(), n);
            size_t hits = 0;
            std::vector<char> seen(I.Tmu->order(), 0);
            for (int i = 0; i < C.order(); ++i) {
                const auto& [a, b] = C.element(i);
                LocalElem al = LocalElem::from_coeffs(K.F, 0, std::vector<uint8_t>(a.begin(), a.begin() + n), n);
                LocalElem bl = LocalElem::from_coeffs(K.F, 0, std::vector<uint8_t>(b.begin(), b.begin() + n), n);
                LMat t{al, bl * T.gamma1, bl * T.gamma2, al};
                LMat c = m * t * mi;
                if (c.a11.val() < 0 || c.a12.val() < 0 || c.a21.val() < 0 || c.a22.val() < 0) continue;
                Mat k = to_quotient(I.Q, c);
                int64_t idx = I.Tmu->index_of(k);
                ASSERT_GE(idx, 0) << I.label();
                if (!seen[idx]) ++hits;
                seen[idx] = 1;
            }
            EXPECT_EQ(hits, I.Tmu->order()) << I.label();
            // K cap T^mu = Z T^mu_delta: every element is +-1 modulo P on the diagonal
            for (size_t k = 0; k < I.Tmu->order() && mu.t > 0; ++k) {
                Mat g = I.Tmu->element(k);
                EXPECT_TRUE(g.at(0, 0) == 1 || g.at(0, 0) == K.F->minus_one);
                EXPECT_EQ(g.at(2, 0), 0);
            }
        }
    }
}

TEST(YuData, HeisenbergIsotypy)
{
    FieldConfig K(3);
    auto T = torus_by_id(K, "u-eps");
    auto data = yu_data(K, T, 4);
    ASSERT_FALSE(data.empty());
    for (size_t i : {size_t(0), data.size() - 1}) {
        const auto& D = data[i];
        ASSERT_TRUE(D.heisenberg());
        auto up = build_heisenberg_rho(D, Polarization::Upper);
        auto low = build_heisenberg_rho(D, Polarization::Lower);
        const auto& Q = up->Q;
        int q = K.q();
        EXPECT_TRUE(close(up->chi->degree(), double(q)));
        EXPECT_EQ(intertwining(*up->chi, *up->chi), 1);
        TracePairing psiG(up->Gamma, Q.N());
        for (size_t k = 0; k < up->torus0->order(); ++k) {
            Mat t = up->torus0->element(k);
            ASSERT_TRUE(close(up->chi->value(t), double(q) * phi_on_coords(D.phi, Q, t, K.one())));
        }
        for (uint64_t k = 0; k < up->Gsplus->order(); ++k) {
            Mat g = up->Gsplus->element(k);
            ASSERT_TRUE(close(up->chi->value(g), double(q) * psiG(g)));
        }
        ASSERT_EQ(up->B.group->order(), low->B.group->order());
        for (uint64_t k = 0; k < up->B.group->order(); ++k) {
            Mat g = up->B.group->element(k);
            ASSERT_TRUE(close(up->chi->value(g), low->chi->value(g)));
        }
    }
}

TEST(YuData, HeisenbergRhoMuRestriction)
{
    FieldConfig K(3);
    for (const auto& id : {"u-eps", "u-eps-eta"}) {
        auto T = torus_by_id(K, id);
        auto D = yu_data(K, T, 4).front();
        auto base = build_heisenberg_rho(D);
        for (const auto& mu : std::vector<MuSpec>{{1, LambdaKind::One}, {1, LambdaKind::D}}) {
            auto I = inducing_data(D, mu, 0, base);
            EXPECT_EQ(I.degree, 3);
            EXPECT_TRUE(close(I.rho->degree(), 3.0));
            EXPECT_EQ(intertwining(*I.rho, *I.rho), 1) << I.label();
            auto S = heisenberg_restriction_group(I);
            auto fam = heisenberg_family(I, S);
            auto spec = restriction_spectrum(I.rho, S, fam);
            ASSERT_EQ(spec.size(), 3u) << I.label();
            for (const auto& e : spec) EXPECT_EQ(e.multiplicity, 1);
            // every member agrees with Psi_{Gamma^mu} on G^mu_{y,s+}
            Shape sp = inducing_shape(D, mu);
            ShapeGroup Gs1(I.Q, Shape{sp.diag + 1, sp.upper + 1, sp.lower + 1, false});
            TracePairing psiG(I.Gamma_mu, I.Q.N());
            for (const auto& f : fam)
                for (const auto& g : Gs1.generators())
                    if (S->contains(g)) EXPECT_TRUE(close(f->value(g), psiG(g)));
        }
    }
}

TEST(YuData, HeisenbergNeedsWeilExtension)
{
    FieldConfig K(3);
    auto D = yu_data(K, torus_by_id(K, "u-eps"), 4).front();
    EXPECT_THROW(inducing_data(D, {0, LambdaKind::One}), std::domain_error);
}

TEST(YuData, AlternateGenericElement)
{
    FieldConfig K(3);
    auto T = torus_by_id(K, "u-eps");
    auto D0 = yu_data(K, T, 4, 0).front();
    auto D2 = yu_data(K, T, 4, 2).front();
    EXPECT_EQ(D2.gamma_index, 2);
    EXPECT_FALSE(same_lmat(D0.Gamma.Gamma, D2.Gamma.Gamma, 4));
    // the Heisenberg rho does not depend on the choice of Gamma
    auto a = build_heisenberg_rho(D0), b = build_heisenberg_rho(D2);
    for (uint64_t k = 0; k < a->B.group->order(); ++k) {
        Mat g = a->B.group->element(k);
        ASSERT_TRUE(close(a->chi->value(g), b->chi->value(g)));
    }
}

TEST(YuData, InducedComponentMatchesShalika)
{
    FieldConfig K(3);
    auto D = yu_data(K, torus_by_id(K, "r-1-pi"), 1).front();
    for (const auto& mu : std::vector<MuSpec>{{1, LambdaKind::D}, {1, LambdaKind::One}}) {
        auto I = inducing_data(D, mu);
        auto ind = induced_component(I);
        auto S = shalika_for(I);
        auto sh = shalika_character(S);
        ASSERT_TRUE(I.Q.same(sh->quotient()));
        EXPECT_EQ(intertwining(*ind, *sh), 1) << I.label();
        EXPECT_TRUE(close(ind->degree(), shalika_degree(K.q(), I.d)));
    }
}
