#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sl2b/shalika.hpp"
#include "sl2b/tori.hpp"

namespace sl2b {

struct YuDatum {
    FieldConfig K;
    TorusDescriptor T;
    int r2 = 0;  // 2r
    TorusCharacter phi;
    GenericElement Gamma;
    int gamma_index = 0;

    bool heisenberg() const { return !T.ramified && r2 % 4 == 0; }
    // ceil(s), s = r/2
    int ceil_s() const { return ceil_div(r2, 4); }
    std::string describe() const
    {
        return phi.describe() + ":Gamma" + std::to_string(gamma_index);
    }
};

inline std::vector<YuDatum> yu_data(const FieldConfig& K, const TorusDescriptor& T, int r2, int gamma_index = 0)
{
    std::vector<YuDatum> out;
    for (auto& phi : torus_characters_of_depth(K, T, r2)) {
        auto gens = generic_elements_for(K, phi);
        if (gens.empty()) throw std::logic_error("yu_data: no generic element for " + phi.describe());
        int gi = std::min<int>(gamma_index, int(gens.size()) - 1);
        out.push_back({K, T, r2, phi, gens[gi], gi});
    }
    return out;
}

enum class LambdaKind { One, D };

struct MuSpec {
    int t = 0;
    LambdaKind lambda = LambdaKind::One;
};

inline std::string lambda_name(const TorusDescriptor& T, LambdaKind l)
{
    if (l == LambdaKind::One) return "1";
    if (T.ramified) return "w";
    return T.y2 == 2 ? "e-eta" : "e";
}

inline LMat lambda_matrix(const FieldConfig& K, const TorusDescriptor& T, LambdaKind l)
{
    Distinguished Dm(K);
    if (l == LambdaKind::One) return Dm.identity();
    if (T.ramified) return Dm.w();
    return T.y2 == 2 ? Dm.e_eta() : Dm.e();
}

inline LMat mu_matrix(const FieldConfig& K, const TorusDescriptor& T, const MuSpec& mu)
{
    Distinguished Dm(K);
    return Dm.alpha(mu.t) * lambda_matrix(K, T, mu.lambda);
}

// 2 delta(mu): 2t - y for y = 1/2 and lambda = w, else 2t + y
inline int delta2(const TorusDescriptor& T, const MuSpec& mu)
{
    if (T.y2 == 1 && mu.lambda == LambdaKind::D) return 4 * mu.t - 1;
    return 4 * mu.t + T.y2;
}

// M(T) truncated at t <= tmax
inline std::vector<MuSpec> mu_set(int tmax)
{
    std::vector<MuSpec> out{{0, LambdaKind::One}};
    for (int t = 1; t <= tmax; ++t) {
        out.push_back({t, LambdaKind::One});
        out.push_back({t, LambdaKind::D});
    }
    return out;
}

// depth d = r + delta(mu)
inline int component_depth(const YuDatum& D, const MuSpec& mu)
{
    int d2 = D.r2 + delta2(D.T, mu);
    if (d2 % 2) throw std::logic_error("component depth is not integral");
    return d2 / 2;
}

// K cap G^mu_{y,s} = (U_{ceil s}, P^M; P^{ceil(s+delta)}), M = max(0, ceil(s-delta))
inline Shape inducing_shape(const YuDatum& D, const MuSpec& mu)
{
    int dl2 = delta2(D.T, mu);
    return {D.ceil_s(), std::max(0, ceil_div(D.r2 - 2 * dl2, 4)), ceil_div(D.r2 + 2 * dl2, 4), false};
}

// Disjoint union of t_i G over representatives t_i of T / (T cap G).
struct CosetProduct {
    std::shared_ptr<TableGroup> group;
    std::vector<int> rep;        // torus index per element
    std::vector<uint64_t> sub;   // index into G per element
    std::vector<int> reps;       // the representatives
};

inline CosetProduct coset_product(const Quotient& Q, const TableGroup& T, const SubgroupPtr& G, const std::string& label)
{
    CosetProduct P;
    for (size_t i = 0; i < T.order(); ++i) {
        Mat t = T.element(i);
        bool fresh = true;
        for (int r : P.reps)
            if (G->contains(Q.mul(Q.inv(T.element(r)), t))) {
                fresh = false;
                break;
            }
        if (fresh) P.reps.push_back(int(i));
    }
    std::vector<Mat> elems;
    elems.reserve(P.reps.size() * G->order());
    for (int r : P.reps) {
        Mat t = T.element(r);
        for (uint64_t j = 0; j < G->order(); ++j) {
            elems.push_back(Q.mul(t, G->element(j)));
            P.rep.push_back(r);
            P.sub.push_back(j);
        }
    }
    std::vector<Mat> gens = T.generators();
    for (const auto& g : G->generators()) gens.push_back(g);
    P.group = std::make_shared<TableGroup>(Q, std::move(elems), std::move(gens), label);
    if (P.group->order() != P.rep.size()) throw std::logic_error("coset_product: cosets overlap");
    return P;
}

// Heisenberg rho on Z T_{0+} G_{0,s} (in the coordinates of T_{1,eps}; y = 1 is conjugated by eta).
struct HeisenbergModel {
    Quotient Q;
    std::shared_ptr<TableGroup> torus0;  // Z T_{0+}
    SubgroupPtr G0s, Gsplus;
    CosetProduct B;
    std::shared_ptr<TabulatedCharacter> chi;
    LMat Gamma;  // a X(1, eps)
};

enum class Polarization { Upper, Lower };

inline cplx phi_on_coords(const TorusCharacter& phi, const Quotient& Q, const Mat& t, const LocalElem& u)
{
    auto [a, b] = torus_coords(Q, t, u, phi.G->ring());
    return phi(a, b);
}

inline std::shared_ptr<HeisenbergModel> build_heisenberg_rho(const YuDatum& D, Polarization pol = Polarization::Upper)
{
    if (!D.heisenberg()) throw std::invalid_argument("Heisenberg rho needs an unramified torus and even r");
    const FieldConfig& K = D.K;
    int r = D.r2 / 2, s = r / 2;
    auto M = std::make_shared<HeisenbergModel>(HeisenbergModel{Quotient(K.F, r + 1), nullptr, nullptr, nullptr, {}, nullptr, {}});
    const Quotient& Q = M->Q;
    LocalElem one = K.one(), eps = K.eps_elem();
    auto Tfull = torus_in_K(K, Q, one, eps, "T_{1,eps}");
    uint8_t m1 = K.F->minus_one;
    M->torus0 = TableGroup::filter(*Tfull, [&](const Mat& g) { return (g.at(0, 0) == 1 || g.at(0, 0) == m1) && g.at(1, 0) == 0; },
                                   "ZT0+");
    M->G0s = std::make_shared<ShapeGroup>(Q, Shape{s, s, s, false});
    M->Gsplus = std::make_shared<ShapeGroup>(Q, Shape{s + 1, s + 1, s + 1, false});
    SubgroupPtr JG = std::make_shared<ShapeGroup>(
        Q, pol == Polarization::Upper ? Shape{s + 1, s, s + 1, false} : Shape{s + 1, s + 1, s, false});
    M->Gamma = LMat{LocalElem::zero(K.F), one, eps, LocalElem::zero(K.F)} * D.Gamma.a;
    TracePairing psiG(M->Gamma, r + 1);
    auto J = coset_product(Q, *M->torus0, JG, "J");
    std::vector<cplx> jv(J.rep.size());
    for (size_t k = 0; k < jv.size(); ++k)
        jv[k] = phi_on_coords(D.phi, Q, M->torus0->element(J.rep[k]), one) * psiG(JG->element(J.sub[k]));
    // phi = Psi_Gamma where the torus meets JG
    for (size_t i = 0; i < M->torus0->order(); ++i) {
        Mat t = M->torus0->element(i);
        if (JG->contains(t) && std::abs(phi_on_coords(D.phi, Q, t, one) - psiG(t)) > 1e-9)
            throw std::logic_error("Heisenberg rho: phi and Psi_Gamma disagree on T cap J");
    }
    auto chiJ = std::make_shared<TabulatedCharacter>(J.group, std::move(jv), "chiJ");
    M->B = coset_product(Q, *M->torus0, M->G0s, "ZT0+G0s");
    auto ind = induce(chiJ, M->B.group);
    std::vector<cplx> bv(M->B.group->order());
    const auto& elems = M->B.group->elements();
    parallel_for(bv.size(), [&](uint64_t k) { bv[k] = ind->value(elems[k]); });
    M->chi = std::make_shared<TabulatedCharacter>(M->B.group, std::move(bv),
                                                  std::string("rho:") + D.describe() + (pol == Polarization::Upper ? ":up" : ":low"));
    return M;
}

// rho^mu on K cap (T G_{y,s})^mu, realized at modulus N >= d + 1.
struct InducingData {
    YuDatum D;
    MuSpec mu;
    int d = 0;
    Quotient Q;
    LMat mu_mat, mu_inv;
    LMat Xmu, Gamma_mu;
    LocalElem u_mu, v_mu;
    std::shared_ptr<TableGroup> Tmu;
    SubgroupPtr Gmu;
    CosetProduct H;
    CFPtr rho;
    int degree = 1;

    std::string label() const
    {
        return D.describe() + ":mu=(" + std::to_string(mu.t) + "," + lambda_name(D.T, mu.lambda) + ")";
    }
};

inline InducingData inducing_data(const YuDatum& D, const MuSpec& mu, int N = 0,
                                  std::shared_ptr<const HeisenbergModel> base = nullptr)
{
    const FieldConfig& K = D.K;
    int d = component_depth(D, mu);
    if (N == 0) N = d + 1;
    if (N < d + 1) throw std::invalid_argument("inducing_data: modulus below depth + 1");
    InducingData I{D, mu, d, Quotient(K.F, N), {}, {}, {}, {}, {}, {}, nullptr, nullptr, {}, nullptr, 1};
    const Quotient& Q = I.Q;
    I.mu_mat = mu_matrix(K, D.T, mu);
    I.mu_inv = I.mu_mat.inverse();
    I.Xmu = I.mu_mat * D.T.X() * I.mu_inv;
    if (!I.Xmu.a11.is_zero() || !I.Xmu.a22.is_zero()) throw std::logic_error("X^mu has a diagonal part");
    I.u_mu = I.Xmu.a12;
    I.v_mu = I.Xmu.a21;
    I.Gamma_mu = I.Xmu * D.Gamma.a;
    I.Tmu = torus_in_K(K, Q, I.u_mu, I.v_mu, "K cap T^mu");
    I.Gmu = std::make_shared<ShapeGroup>(Q, inducing_shape(D, mu));
    I.H = coset_product(Q, *I.Tmu, I.Gmu, "H:" + I.label());
    const auto& elems = I.H.group->elements();
    std::vector<cplx> vals(elems.size());
    if (!D.heisenberg()) {
        TracePairing psiG(I.Gamma_mu, N);
        for (size_t i = 0; i < I.Tmu->order(); ++i) {
            Mat t = I.Tmu->element(i);
            if (I.Gmu->contains(t) && std::abs(phi_on_coords(D.phi, Q, t, I.u_mu) - psiG(t)) > 1e-9)
                throw std::logic_error("phi-hat: phi and Psi_Gamma disagree on the torus part of G_{y,s}");
        }
        std::vector<cplx> tv(I.Tmu->order());
        for (int r : I.H.reps) tv[r] = phi_on_coords(D.phi, Q, I.Tmu->element(r), I.u_mu);
        parallel_for(vals.size(), [&](uint64_t k) { vals[k] = tv[I.H.rep[k]] * psiG(I.Gmu->element(I.H.sub[k])); });
    } else {
        if (D.T.y2 == 0 && mu.t == 0)
            throw std::domain_error("rho on T G_{0,s} needs the Weil extension over T/T_{0+}");
        if (!base) base = build_heisenberg_rho(D);
        I.degree = K.q();
        Distinguished Dm(K);
        LMat nu = D.T.y2 == 2 ? I.mu_mat * Dm.eta(1) : I.mu_mat;
        LMat nu_inv = nu.inverse();
        const auto& chi = *base->chi;
        parallel_for(vals.size(), [&](uint64_t k) {
            Mat b = conjugate_into(Q, elems[k], nu_inv, nu, base->Q);
            auto v = chi.try_value(b);
            if (!v) throw std::logic_error("Heisenberg rho^mu: conjugate leaves Z T_{0+} G_{0,s}");
            vals[k] = *v;
        });
    }
    I.rho = std::make_shared<TabulatedCharacter>(I.H.group, std::move(vals), "rho^mu:" + I.label());
    return I;
}

inline CFPtr induced_component(const InducingData& I)
{
    SubgroupPtr G = std::make_shared<FullK>(I.Q);
    return induce(I.rho, G, "Ind:" + I.label());
}

// The Shalika datum S_d(phi^mu, Gamma^mu) matched to a component with delta(mu) > 0.
inline ShalikaDatum shalika_for(const InducingData& I)
{
    const YuDatum& D = I.D;
    auto ctx = shalika_context(D.K, I.d, I.Gamma_mu.a12, I.Gamma_mu.a21);
    const auto& T = *ctx->torus();
    const Quotient& Q = ctx->quotient();
    std::vector<cplx> theta(T.order());
    for (size_t i = 0; i < T.order(); ++i) theta[i] = phi_on_coords(D.phi, Q, T.element(i), I.u_mu);
    return {ctx, std::move(theta), "S(" + I.label() + ")"};
}

struct SpectrumEntry {
    size_t index;
    long long multiplicity;
};

// Multiplicities of the candidate characters in Res_S f; throws when they do not exhaust f.
inline std::vector<SpectrumEntry> restriction_spectrum(const CFPtr& f, const SubgroupPtr& S, const std::vector<CFPtr>& candidates)
{
    auto res = restrict_to(f, S);
    std::vector<SpectrumEntry> out;
    cplx total = 0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        long long m = intertwining(*res, *candidates[i]);
        if (m) {
            out.push_back({i, m});
            total += double(m) * candidates[i]->degree();
        }
    }
    if (std::abs(total - f->degree()) > 1e-6) throw std::domain_error("restriction_spectrum: candidates do not exhaust the restriction");
    return out;
}

// Psi_{Y(x)} for x in the residue field, Y(x) = x (0, pi^{-C}; 0, 0) + Gamma^mu, C = s + delta(mu).
inline std::vector<CFPtr> heisenberg_family(const InducingData& I, const SubgroupPtr& S)
{
    const FieldConfig& K = I.D.K;
    int C = ceil_div(I.D.r2 + 2 * delta2(I.D.T, I.mu), 4);
    std::vector<CFPtr> out;
    for (int x = 0; x < K.q(); ++x) {
        LMat Y = I.Gamma_mu;
        Y.a12 = Y.a12 + K.pi_pow(-C) * K.constant(uint8_t(x));
        auto tp = std::make_shared<TracePairing>(Y, I.Q.N());
        out.push_back(std::make_shared<FormulaCharacter>(S, [tp](const Mat& g) { return (*tp)(g); },
                                                         "Psi_Y(" + std::to_string(x) + ")"));
    }
    return out;
}

// G^mu_{y,s} cap G_{[0,1/2],d/2} = (U_{ceil d/2}, P^{ceil d/2}; P^{s + delta}, U_{ceil d/2})
inline SubgroupPtr heisenberg_restriction_group(const InducingData& I)
{
    int cd = ceil_div(I.d, 2);
    int lower = ceil_div(I.D.r2 + 2 * delta2(I.D.T, I.mu), 4);
    return std::make_shared<ShapeGroup>(I.Q, Shape{cd, cd, lower, false});
}

}  // namespace sl2b
