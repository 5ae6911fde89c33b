#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sl2b/abelian.hpp"
#include "sl2b/classfun.hpp"
#include "sl2b/tori.hpp"

namespace sl2b {

// x -> Psi(c x) on R/P^N for a fixed c with val(c) > -N, as a dot product with the digits of x.
class LinearPsi {
public:
    LinearPsi() = default;
    LinearPsi(const LocalElem& c, int N) : F_(c.field()), w_(N, 0)
    {
        if (!c.is_zero() && c.val() <= -N) throw std::domain_error("LinearPsi: coefficient too singular");
        for (int i = 0; i < N; ++i) w_[i] = c.coeff(-i);
    }
    uint8_t arg(const Mat& g, int entry) const
    {
        uint8_t s = 0;
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] && g.at(entry, int(i))) s = F_->add(s, F_->mul(w_[i], g.at(entry, int(i))));
        return s;
    }
    const FqPtr& field() const { return F_; }

private:
    FqPtr F_;
    std::vector<uint8_t> w_;
};

// g -> Psi(Tr(Y (g - I))) on K/K_N for a Laurent matrix Y with entries of valuation > -N.
class TracePairing {
public:
    TracePairing() = default;
    TracePairing(const LMat& Y, int N)
        : F_(Y.a11.field()), p11_(Y.a11, N), p12_(Y.a12, N), p21_(Y.a21, N), p22_(Y.a22, N)
    {
        auto c0 = [](const LocalElem& x) { return x.is_zero() ? uint8_t(0) : x.coeff(0); };
        shift_ = F_->add(c0(Y.a11), c0(Y.a22));
    }
    uint8_t arg(const Mat& g) const
    {
        // Tr(Y(g - I)) = Y11 g11 + Y12 g21 + Y21 g12 + Y22 g22 - Tr(Y)
        uint8_t s = F_->add(F_->add(p11_.arg(g, 0), p12_.arg(g, 2)), F_->add(p21_.arg(g, 1), p22_.arg(g, 3)));
        return F_->sub(s, shift_);
    }
    cplx operator()(const Mat& g) const { return F_->psi0(arg(g)); }

private:
    FqPtr F_;
    LinearPsi p11_, p12_, p21_, p22_;
    uint8_t shift_ = 0;
};

// Shape of the group G_{0,d/2} cap G_{1/2,d/2}.
inline Shape gamma_shape(int d) { return {ceil_div(d, 2), ceil_div(d, 2), ceil_div(d + 1, 2), false}; }

// Everything attached to X = X(u,v) at level d: T(X), the Gamma-group, Psi_X, the extensions of Psi_X to T(X).
class ShalikaContext {
public:
    ShalikaContext(FieldConfig K, int d, LocalElem u, LocalElem v)
        : K_(std::move(K)), d_(d), u_(std::move(u)), v_(std::move(v)), Q_(K_.F, d + 1)
    {
        if (d < 1) throw std::invalid_argument("Shalika: d must be positive");
        if (u_.is_zero() || u_.val() != -d) throw std::invalid_argument("Shalika: val(u) must equal -d");
        if (!v_.is_zero() && v_.val() <= -d) throw std::invalid_argument("Shalika: val(v) must exceed val(u)");
        lu_ = LinearPsi(u_, d + 1);
        lv_ = LinearPsi(v_, d + 1);
        gamma_ = std::make_shared<ShapeGroup>(Q_, gamma_shape(d));
        T_ = torus_in_K(K_, Q_, K_.one(), v_ * u_.inverse(), "T(X)");
        for (size_t i = 0; i < T_->order(); ++i)
            if (gamma_->contains(T_->element(i))) cap_.push_back(int(i));
        for (size_t i = 0; i < T_->order(); ++i) {
            Mat t = T_->element(i);
            bool fresh = true;
            for (int r : reps_)
                if (gamma_->contains(Q_.mul(Q_.inv(T_->element(r)), t))) {
                    fresh = false;
                    break;
                }
            if (fresh) reps_.push_back(int(i));
        }
    }

    const FieldConfig& field() const { return K_; }
    int d() const { return d_; }
    const LocalElem& u() const { return u_; }
    const LocalElem& v() const { return v_; }
    const Quotient& quotient() const { return Q_; }
    const SubgroupPtr& gamma() const { return gamma_; }
    const std::shared_ptr<TableGroup>& torus() const { return T_; }
    const std::vector<int>& torus_cap_gamma() const { return cap_; }
    const std::vector<int>& torus_reps() const { return reps_; }
    uint64_t extension_count() const { return reps_.size(); }

    // Psi(Tr(X(g - I))) = Psi(u g21 + v g12), for g in the Gamma-group
    cplx psi_X(const Mat& g) const
    {
        if (!gamma_->contains(g)) throw std::domain_error("psi_X: element outside the Gamma-group");
        return psi_X_unchecked(g);
    }
    cplx psi_X_unchecked(const Mat& g) const
    {
        return K_.F->psi0(K_.F->add(lu_.arg(g, 2), lv_.arg(g, 1)));
    }

    // theta(t(a,b)) for an element of T(X) given as a matrix
    int torus_index(const Mat& t) const
    {
        int64_t i = T_->index_of(t);
        if (i < 0) throw std::domain_error("Shalika: element not in T(X)");
        return int(i);
    }

    // All characters of T(X) extending Psi_X on T(X) cap Gamma, as value vectors over T's element order.
    std::vector<std::vector<cplx>> extensions() const
    {
        std::call_once(ext_once_, [this] {
            FiniteAbelian A(int(T_->order()), [this](int i, int j) {
                return int(T_->index_of(Q_.mul(T_->element(i), T_->element(j))));
            });
            auto idx = int(T_->index_of(Q_.identity()));
            if (idx != 0) throw std::logic_error("Shalika: identity must be the first torus element");
            for (const auto& e : A.characters()) {
                std::vector<cplx> vals(T_->order());
                for (size_t i = 0; i < vals.size(); ++i) vals[i] = A.value(e, int(i));
                if (compatible(vals)) ext_.push_back(std::move(vals));
            }
        });
        return ext_;
    }

    bool compatible(const std::vector<cplx>& theta, double tol = 1e-9) const
    {
        if (theta.size() != T_->order()) return false;
        for (int i : cap_)
            if (std::abs(theta[i] - psi_X_unchecked(T_->element(i))) > tol) return false;
        return true;
    }

    // T(X) Gamma as the disjoint union of t_i Gamma over coset representatives t_i.
    struct Product {
        std::shared_ptr<TableGroup> group;
        std::vector<int> rep;      // torus index of the representative
        std::vector<cplx> psi;     // Psi_X(t_i^{-1} x)
    };
    const Product& product() const
    {
        std::call_once(prod_once_, [this] {
            std::vector<Mat> elems;
            elems.reserve(reps_.size() * gamma_->order());
            for (int r : reps_) {
                Mat t = T_->element(r);
                for (uint64_t j = 0; j < gamma_->order(); ++j) {
                    Mat g = gamma_->element(j);
                    elems.push_back(Q_.mul(t, g));
                    prod_.rep.push_back(r);
                    prod_.psi.push_back(psi_X_unchecked(g));
                }
            }
            std::vector<Mat> gens = T_->generators();
            for (const auto& g : gamma_->generators()) gens.push_back(g);
            prod_.group = std::make_shared<TableGroup>(Q_, std::move(elems), std::move(gens), "T(X)Gamma:" + label());
            if (prod_.group->order() != prod_.rep.size()) throw std::logic_error("Shalika: cosets overlap");
        });
        return prod_;
    }

    std::string label() const { return "d=" + std::to_string(d_) + ",u=" + u_.str() + ",v=" + v_.str(); }

private:
    FieldConfig K_;
    int d_;
    LocalElem u_, v_;
    Quotient Q_;
    LinearPsi lu_, lv_;
    SubgroupPtr gamma_;
    std::shared_ptr<TableGroup> T_;
    std::vector<int> cap_, reps_;
    mutable std::once_flag ext_once_, prod_once_;
    mutable std::vector<std::vector<cplx>> ext_;
    mutable Product prod_;
};

using ShalikaContextPtr = std::shared_ptr<const ShalikaContext>;

inline ShalikaContextPtr shalika_context(const FieldConfig& K, int d, const LocalElem& u, const LocalElem& v)
{
    return std::make_shared<const ShalikaContext>(K, d, u, v);
}

struct ShalikaDatum {
    ShalikaContextPtr ctx;
    std::vector<cplx> theta;  // values over ctx->torus() elements
    std::string label;

    int d() const { return ctx->d(); }
};

inline std::vector<ShalikaDatum> shalika_data(const ShalikaContextPtr& ctx)
{
    std::vector<ShalikaDatum> out;
    auto ext = ctx->extensions();
    for (size_t i = 0; i < ext.size(); ++i) out.push_back({ctx, ext[i], "S(" + ctx->label() + ",theta" + std::to_string(i) + ")"});
    return out;
}

// Psi_{theta,X}(t g) = theta(t) Psi_X(g) on T(X) Gamma
inline CFPtr shalika_inducing_character(const ShalikaDatum& D)
{
    if (!D.ctx->compatible(D.theta)) throw std::invalid_argument("Shalika: theta does not extend Psi_X");
    const auto& P = D.ctx->product();
    std::vector<cplx> vals(P.rep.size());
    for (size_t k = 0; k < vals.size(); ++k) vals[k] = D.theta[P.rep[k]] * P.psi[k];
    return std::make_shared<TabulatedCharacter>(P.group, std::move(vals), "Psi_theta,X:" + D.label);
}

inline CFPtr shalika_character(const ShalikaDatum& D)
{
    auto inner = shalika_inducing_character(D);
    SubgroupPtr G = std::make_shared<FullK>(D.ctx->quotient());
    return induce(inner, G, D.label);
}

inline long long shalika_degree(int q, int d)
{
    long long r = (long long)q * q - 1;
    for (int i = 1; i < d; ++i) r *= q;
    return r / 2;
}

// Psi_X = Psi_X' on the Gamma-group; both characters, so generators suffice.
inline bool same_psi_X(const ShalikaContext& a, const ShalikaContext& b)
{
    if (a.d() != b.d() || !a.quotient().same(b.quotient())) return false;
    for (const auto& g : a.gamma()->generators())
        if (std::abs(a.psi_X_unchecked(g) - b.psi_X_unchecked(g)) > 1e-9) return false;
    return true;
}

struct TransferPair {
    Mat source;      // t' in T(X')
    Mat target;      // t in T(X)
    Mat correction;  // t^{-1} t'
    int n = 0;       // val(u^{-1}v - u'^{-1}v'), capped at the modulus
};

// Transfer of t' = t(a', b) in T(X') to t = t(a, b) in T(X) with a = a' mod P.
inline TransferPair transfer(const Mat& t_prime, const ShalikaContext& X, const ShalikaContext& Xp)
{
    const Quotient& Q = X.quotient();
    const FieldConfig& K = X.field();
    int N = Q.N();
    LocalElem w = X.v() * X.u().inverse();
    LocalElem wp = Xp.v() * Xp.u().inverse();
    LocalElem diff = w - wp;
    int n = diff.is_zero() ? N : std::min(N, diff.val());
    LocalElem ap = Q.entry(t_prime, 0);
    LocalElem b = Q.entry(t_prime, 1);
    if (!ap.is_unit()) throw std::domain_error("transfer: a' is not a unit");
    LocalElem x = (K.one() + b * b * w).with_precision(N);
    LocalElem a = K.sqrt_unit(x, N, ap.leading());
    Mat t = Q.make(a, b, (b * w).with_precision(N), a);
    return {t_prime, t, Q.mul(Q.inv(t), t_prime), n};
}

// theta'(t') = theta(t) Psi_X(t^{-1} t') on T(X')
inline ShalikaDatum matched_theta(const ShalikaDatum& D, const ShalikaContextPtr& Xp)
{
    const ShalikaContext& X = *D.ctx;
    if (!same_psi_X(X, *Xp)) throw std::invalid_argument("matched_theta: Psi_X differs from Psi_X'");
    const auto& Tp = *Xp->torus();
    std::vector<cplx> vals(Tp.order());
    for (size_t i = 0; i < Tp.order(); ++i) {
        auto tp = transfer(Tp.element(i), X, *Xp);
        vals[i] = D.theta[X.torus_index(tp.target)] * X.psi_X(tp.correction);
    }
    return {Xp, std::move(vals), D.label + "'"};
}

struct TwistReport {
    bool square_ratio = false;
    bool theta_compatible = false;
    bool predicted_equivalent = false;
    long long inner_product = -1;
    bool consistent() const { return inner_product < 0 || (inner_product == 1) == predicted_equivalent; }
};

// For v = v' = 0: equivalent iff c^2 u = u' for a unit c and theta(t(z, c^{-2} b)) = theta'(t(z, b)).
inline TwistReport diagonal_twist_test(const ShalikaDatum& D1, const ShalikaDatum& D2, bool cross_check = true)
{
    const ShalikaContext& X1 = *D1.ctx;
    const ShalikaContext& X2 = *D2.ctx;
    if (!X1.v().is_zero() || !X2.v().is_zero()) throw std::invalid_argument("diagonal_twist_test: v must be 0");
    if (X1.d() != X2.d()) throw std::invalid_argument("diagonal_twist_test: depths differ");
    const FieldConfig& K = X1.field();
    const Quotient& Q = X1.quotient();
    TwistReport rep;
    LocalElem ratio = X2.u() * X1.u().inverse();
    rep.square_ratio = K.F->is_square(ratio.leading());
    if (rep.square_ratio) {
        // c^{-2} = u / u'
        LocalElem cm2 = (X1.u() * X2.u().inverse()).with_precision(Q.N());
        rep.theta_compatible = true;
        const auto& T2 = *X2.torus();
        for (size_t i = 0; i < T2.order() && rep.theta_compatible; ++i) {
            Mat t = T2.element(i);
            LocalElem z = Q.entry(t, 0);
            LocalElem b = (Q.entry(t, 1) * cm2).with_precision(Q.N());
            Mat s = Q.make(z, b, LocalElem::zero(K.F, Q.N()), z);
            if (std::abs(D1.theta[X1.torus_index(s)] - D2.theta[i]) > 1e-9) rep.theta_compatible = false;
        }
    }
    rep.predicted_equivalent = rep.square_ratio && rep.theta_compatible;
    if (cross_check)
        rep.inner_product = nearest_integer(inner_product(*shalika_character(D1), *shalika_character(D2)));
    return rep;
}

}  // namespace sl2b
