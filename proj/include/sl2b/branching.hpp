#pragma once

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sl2b/fqchars.hpp"
#include "sl2b/yudata.hpp"

namespace sl2b {

struct CertificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetConfig {
    double cap = 2e7;  // largest |K/K_{d+1}| attempted
    double tol = 1e-6;
};

inline double quotient_order(int q, int N)
{
    double qq = double(q) * q * q;
    return std::pow(qq, N) * (1.0 - 1.0 / (double(q) * q));
}

inline long long ipow(long long b, int e)
{
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

struct ComponentRow {
    int d = 0;
    int t = 0;
    std::string lambda;  // "1", "e", "w", "e-eta"; empty for depth zero
    std::string label;   // sigma | pi+ | pi- | shalika | unramified-type
    long long degree = 0;
    bool certified = false;
    std::string status;  // certified | predicted, unverified
    std::string note;
    long long model_inner = -1;
    CFPtr character;  // null when unverified
    // classifying data for the intertwining analysis
    int delta2 = 0;
    int sign_class = 0;  // +1 / -1: class of -u pi^d mod squares, for Gamma^mu = X(u, v)
};

struct BranchingTable {
    int q = 0;
    nlohmann::json datum;
    int cutoff = 0;
    std::vector<ComponentRow> rows;
    // depth zero
    bool depth_zero = false;
    std::string sigma_label;
    int vertex = 0;
    // positive depth
    std::shared_ptr<const YuDatum> yu;
    int theta_sign = 1;  // central character at -1

    bool all_certified() const
    {
        for (const auto& r : rows)
            if (!r.certified) return false;
        return true;
    }
    bool budget_skipped() const
    {
        for (const auto& r : rows)
            if (r.status == "predicted, unverified" && r.note.find("cap") != std::string::npos) return true;
        return false;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json c{{"d", r.d}, {"label", r.label}, {"degree", r.degree}, {"certified", r.certified}, {"status", r.status}};
            if (!r.lambda.empty()) c["mu"] = {{"t", r.t}, {"lambda", r.lambda}};
            else c["mu"] = {{"t", r.t}};
            if (r.model_inner >= 0) c["inner_product"] = r.model_inner;
            if (!r.note.empty()) c["note"] = r.note;
            comps.push_back(c);
        }
        return {{"q", q}, {"datum", datum}, {"cutoff", cutoff}, {"components", comps}};
    }

    std::string to_csv() const
    {
        std::ostringstream os;
        os << "d,t,lambda,label,degree,certified,status\n";
        for (const auto& r : rows)
            os << r.d << ',' << r.t << ',' << r.lambda << ',' << r.label << ',' << r.degree << ','
               << (r.certified ? "true" : "false") << ",\"" << r.status << "\"\n";
        return os.str();
    }
};

inline std::string half_string(int x2) { return x2 % 2 ? std::to_string(x2) + "/2" : std::to_string(x2 / 2); }

// pi_d^{+-}(theta) = S_d(theta, X(-x pi^{-d}, 0)), x = 1 or eps, theta extended trivially over U
inline ShalikaDatum pi_d_pm_datum(const FieldConfig& K, int theta_sign, int d, bool plus)
{
    if (d < 1) throw std::invalid_argument("pi_d_pm: d must be positive");
    LocalElem x = plus ? K.one() : K.eps_elem();
    auto ctx = shalika_context(K, d, -(x * K.pi_pow(-d)), LocalElem::zero(K.F));
    const auto& T = *ctx->torus();
    std::vector<cplx> theta(T.order());
    for (size_t i = 0; i < T.order(); ++i) theta[i] = T.element(i).at(0, 0) == 1 ? 1.0 : double(theta_sign);
    return {ctx, std::move(theta), std::string(plus ? "pi+" : "pi-") + "_" + std::to_string(d) + "(" + (theta_sign > 0 ? "+" : "-") + ")"};
}

inline CFPtr pi_d_pm(const FieldConfig& K, int theta_sign, int d, bool plus)
{
    return shalika_character(pi_d_pm_datum(K, theta_sign, d, plus));
}

// Ind_{BK_d}^K sigma^{eta^d} at modulus d + 1, optionally twisted by tau
inline CFPtr depth_zero_mackey(const FieldConfig& K, std::shared_ptr<const SL2FqTable> T, const std::vector<cplx>& sigma,
                               int d, bool with_tau, const std::string& label)
{
    Quotient Q(K.F, d + 1);
    auto inner = eta_pullback(std::move(T), sigma, Q, d, with_tau, label);
    return induce(inner, std::make_shared<FullK>(Q), "Ind_BK" + std::to_string(d) + "(" + label + ")");
}

// <sigma1^{eta^d}, sigma2^{eta^d}> (or tau sigma2^{eta^d}) on BK_d
inline long long bk_intertwining(const FieldConfig& K, std::shared_ptr<const SL2FqTable> T, const std::vector<cplx>& s1,
                                 const std::vector<cplx>& s2, int d, bool with_tau, double tol = 1e-6)
{
    Quotient Q(K.F, d + 1);
    auto a = eta_pullback(T, s1, Q, d, false, "sigma1");
    auto b = eta_pullback(T, s2, Q, d, with_tau, "sigma2");
    return intertwining(*a, *b, tol);
}

// psi_d^x = Ind from BK_d cap T(X)Gamma to BK_d of Psi_{theta,X}, X = X(-x pi^{-d}, 0)
inline CFPtr psi_d_x(const FieldConfig& K, int theta_sign, int d, bool plus)
{
    auto D = pi_d_pm_datum(K, theta_sign, d, plus);
    auto inner = shalika_inducing_character(D);
    const Quotient& Q = inner->quotient();
    auto full = materialize(*inner->support(), "T(X)Gamma");
    auto H = TableGroup::filter(*full, [d](const Mat& g) {
        for (int i = 0; i < d; ++i)
            if (g.at(2, i)) return false;
        return true;
    }, "BK_d cap T(X)Gamma");
    auto res = std::make_shared<FormulaCharacter>(H, [inner](const Mat& g) { return inner->value(g); }, "Psi_theta,X");
    return induce(res, std::make_shared<ShapeGroup>(Q, Shape{0, 0, d, false}), "psi_d^x");
}

// chi_d^x = (sigma_0^{sgn x})^{eta^d} on BK_d, optionally times tau
inline CFPtr chi_d_x(const FieldConfig& K, std::shared_ptr<const SL2FqTable> T, const CuspidalChar& sigma0, int d, bool with_tau)
{
    return eta_pullback(std::move(T), sigma0.values, Quotient(K.F, d + 1), d, with_tau, sigma0.label);
}

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw CertificationError(what);
}

inline void check_central(const ClassFunction& f, int theta_sign, long long degree, double tol, const std::string& where)
{
    cplx v = f.value(f.quotient().minus_identity());
    require(std::abs(v - double(degree) * theta_sign) < tol,
            where + ": value at -I is not deg * theta(-1)");
}

}  // namespace detail

inline BranchingTable depth_zero_components(const FieldConfig& K, std::shared_ptr<const SL2FqTable> T, const CuspidalChar& sigma,
                                            int vertex, int D, const BudgetConfig& B = {})
{
    if (D < 0) throw std::invalid_argument("depth_zero_components: D must be non-negative");
    if (vertex != 0 && vertex != 1) throw std::invalid_argument("depth_zero_components: vertex must be 0 or 1");
    int q = K.q();
    BranchingTable tab;
    tab.q = q;
    tab.cutoff = D;
    tab.depth_zero = true;
    tab.sigma_label = sigma.label;
    tab.vertex = vertex;
    tab.theta_sign = sigma.central_sign;
    tab.datum = {{"sigma", sigma.label}, {"vertex", vertex}, {"central_sign", sigma.central_sign}};
    bool split = sigma.kind != CuspidalKind::DL;
    bool plus_only = sigma.kind == CuspidalKind::SplitPlus;
    if (vertex == 0) {
        ComponentRow row;
        row.d = 0;
        row.label = "sigma";
        row.degree = sigma.degree;
        auto f = inflate_to_K(T, sigma.values, Quotient(K.F, 1), sigma.label);
        detail::require(is_irreducible(*f, B.tol), sigma.label + ": inflation is not irreducible");
        detail::require(std::abs(f->degree() - double(sigma.degree)) < B.tol, sigma.label + ": degree mismatch");
        row.character = f;
        row.certified = true;
        row.status = "certified";
        row.model_inner = 1;
        tab.rows.push_back(row);
    }
    for (int d = vertex == 0 ? 2 : 1; d <= D; d += 2) {
        long long pdeg = ipow(q, d - 1) * (q * q - 1) / 2;
        long long ind_deg = (q + 1) * ipow(q, d - 1) * sigma.degree;
        std::vector<bool> signs = split ? std::vector<bool>{plus_only} : std::vector<bool>{true, false};
        if (quotient_order(q, d + 1) > B.cap) {
            for (bool s : signs) {
                ComponentRow row;
                row.d = d;
                row.t = vertex == 0 ? d / 2 : (d + 1) / 2;
                row.label = s ? "pi+" : "pi-";
                row.degree = pdeg;
                row.status = "predicted, unverified";
                row.note = "|K/K_" + std::to_string(d + 1) + "| above cap";
                tab.rows.push_back(row);
            }
            continue;
        }
        auto ind = depth_zero_mackey(K, T, sigma.values, d, false, sigma.label);
        std::string where = sigma.label + " d=" + std::to_string(d);
        detail::require(std::abs(ind->degree() - double(ind_deg)) < B.tol, where + ": Mackey component degree");
        detail::require(intertwining(*ind, *ind, B.tol) == (long long)signs.size(), where + ": Mackey component norm");
        std::vector<CFPtr> models;
        for (bool s : signs) {
            auto pi = pi_d_pm(K, sigma.central_sign, d, s);
            long long m = intertwining(*ind, *pi, B.tol);
            detail::require(m == 1, where + ": <Ind, " + std::string(s ? "pi+" : "pi-") + "> = " + std::to_string(m));
            detail::require(std::abs(pi->degree() - double(pdeg)) < B.tol, where + ": pi degree");
            detail::require(depth_of(*pi, B.tol) == d, where + ": pi depth");
            detail::check_central(*pi, sigma.central_sign, pdeg, B.tol, where);
            for (const auto& o : models) detail::require(intertwining(*o, *pi, B.tol) == 0, where + ": pi+ and pi- intertwine");
            models.push_back(pi);
            ComponentRow row;
            row.d = d;
            row.t = vertex == 0 ? d / 2 : (d + 1) / 2;
            row.label = s ? "pi+" : "pi-";
            row.degree = pdeg;
            row.certified = true;
            row.status = "certified";
            row.model_inner = m;
            row.character = pi;
            row.sign_class = s ? 1 : -1;
            tab.rows.push_back(row);
        }
    }
    return tab;
}

inline nlohmann::json datum_json(const YuDatum& D)
{
    return {{"torus", D.T.id}, {"r", half_string(D.r2)}, {"phi", D.phi.index}, {"gamma", D.gamma_index}};
}

inline int central_sign(const TorusCharacter& phi)
{
    LocalElem m1 = LocalElem::from_int(phi.T.gamma1.field(), -1);
    cplx v = phi.at(m1, LocalElem::zero(phi.T.gamma1.field()));
    return v.real() > 0 ? 1 : -1;
}

// The Mackey components of Res_K c-Ind pi(T, y, r, phi) of depth at most D.
inline BranchingTable positive_depth_components(const YuDatum& D, int Dmax, const BudgetConfig& B = {},
                                                std::shared_ptr<const HeisenbergModel> base = nullptr)
{
    const FieldConfig& K = D.K;
    int q = K.q();
    int r2 = D.r2;
    if (2 * Dmax < r2) throw std::invalid_argument("positive_depth_components: D must be at least r");
    BranchingTable tab;
    tab.q = q;
    tab.cutoff = Dmax;
    tab.yu = std::make_shared<const YuDatum>(D);
    tab.theta_sign = central_sign(D.phi);
    tab.datum = datum_json(D);
    std::vector<MuSpec> mus;
    for (const auto& mu : mu_set(Dmax + 1))
        if (r2 + delta2(D.T, mu) <= 2 * Dmax) mus.push_back(mu);
    for (const auto& mu : mus) {
        int d = component_depth(D, mu);
        ComponentRow row;
        row.d = d;
        row.t = mu.t;
        row.lambda = lambda_name(D.T, mu.lambda);
        row.delta2 = delta2(D.T, mu);
        std::string where = D.describe() + " mu=(" + std::to_string(mu.t) + "," + row.lambda + ") d=" + std::to_string(d);
        bool unram = mu.t == 0 && D.T.y2 == 0;
        if (unram) {
            row.label = "unramified-type";
            row.degree = (q - 1) * ipow(q, r2 / 2);
        } else {
            row.label = "shalika";
            row.degree = ipow(q, d - 1) * (q * q - 1) / 2;
        }
        if (unram && D.heisenberg()) {
            row.status = "predicted, unverified";
            row.note = "rho on T G_{0,s} needs the Weil extension";
            tab.rows.push_back(row);
            continue;
        }
        if (quotient_order(q, d + 1) > B.cap) {
            row.status = "predicted, unverified";
            row.note = "|K/K_" + std::to_string(d + 1) + "| above cap";
            tab.rows.push_back(row);
            continue;
        }
        if (D.heisenberg() && !base) base = build_heisenberg_rho(D);
        auto I = inducing_data(D, mu, 0, base);
        auto ind = induced_component(I);
        detail::require(std::abs(ind->degree() - double(row.degree)) < B.tol,
                        where + ": degree " + std::to_string(ind->degree().real()) + " expected " + std::to_string(row.degree));
        detail::check_central(*ind, tab.theta_sign, row.degree, B.tol, where);
        if (unram) {
            long long n = intertwining(*ind, *ind, B.tol);
            detail::require(n == 1, where + ": unramified-type component has norm " + std::to_string(n));
            detail::require(depth_of(*ind, B.tol) == d, where + ": depth");
            row.model_inner = n;
        } else {
            LMat X = I.Gamma_mu;
            row.sign_class = K.F->is_square((-(X.a12 * K.pi_pow(d))).leading()) ? 1 : -1;
            auto S = shalika_character(shalika_for(I));
            long long m = intertwining(*ind, *S, B.tol);
            detail::require(m == 1, where + ": <Ind rho^mu, S_d(phi^mu, Gamma^mu)> = " + std::to_string(m));
            detail::require(depth_of(*ind, B.tol) == d, where + ": depth");
            row.model_inner = m;
        }
        row.character = ind;
        row.certified = true;
        row.status = "certified";
        tab.rows.push_back(row);
    }
    return tab;
}

// Hom-dimension between the K_{D+1}-fixed parts of two restrictions, summed over rows of equal depth.
inline std::vector<std::vector<long long>> intertwining_matrix(const std::vector<BranchingTable>& tabs, double tol = 1e-6)
{
    size_t n = tabs.size();
    std::vector<std::vector<long long>> M(n, std::vector<long long>(n, 0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            long long s = 0;
            for (const auto& a : tabs[i].rows)
                for (const auto& b : tabs[j].rows)
                    if (a.d == b.d && a.character && b.character) s += intertwining(*a.character, *b.character, tol);
            M[i][j] = M[j][i] = s;
        }
    return M;
}

// depth (2m) of a character psi of T given by exponents e: largest 2m with psi nontrivial on T_m; -1 if trivial
inline int torus_character_depth2(const TorusCharacter& like, const std::vector<long long>& e)
{
    const auto& G = *like.G;
    long long E = like.A->exponent();
    int best = -1;
    for (int m2 = 0; m2 <= like.r2; ++m2) {
        bool nontrivial = false;
        for (int i = 0; i < G.order() && !nontrivial; ++i)
            if (((e[i] % E) + E) % E != 0 && in_torus_filtration(like.T, G.ring(), G.element(i).first, G.element(i).second, m2))
                nontrivial = true;
        if (nontrivial) best = m2;
    }
    return best;
}

inline bool trivial_on_center(const TorusCharacter& like, const std::vector<long long>& e)
{
    const Quotient& R = like.G->ring();
    const FqPtr& F = like.T.gamma1.field();
    int i = like.G->index_of(R.ser_from(LocalElem::from_int(F, -1).with_precision(R.N())),
                             R.ser_from(LocalElem::zero(F).with_precision(R.N())));
    long long E = like.A->exponent();
    return ((e[i] % E) + E) % E == 0;
}

enum class Relation { None, Same, Twist, InverseTwist };

struct TwistInfo {
    Relation rel = Relation::None;
    int m2 = -1;  // 2 * depth of psi
};

// phi' = psi phi (Twist) or psi phi^{-1} (InverseTwist) with psi trivial on Z of depth below r
inline TwistInfo twist_relation(const YuDatum& a, const YuDatum& b)
{
    if (a.T.id != b.T.id || a.r2 != b.r2) return {};
    if (a.phi.index == b.phi.index) return {Relation::Same, -1};
    size_t n = a.phi.e.size();
    std::vector<long long> quo(n), prod(n);
    for (size_t i = 0; i < n; ++i) {
        quo[i] = b.phi.e[i] - a.phi.e[i];
        prod[i] = b.phi.e[i] + a.phi.e[i];
    }
    if (trivial_on_center(a.phi, quo)) {
        int m2 = torus_character_depth2(a.phi, quo);
        if (m2 < a.r2) return {Relation::Twist, m2};
    }
    if (trivial_on_center(a.phi, prod)) {
        int m2 = torus_character_depth2(a.phi, prod);
        if (m2 < a.r2) return {Relation::InverseTwist, m2};
    }
    return {};
}

enum class Prediction { No, Yes, Outside };

inline std::string prediction_name(Prediction p) { return p == Prediction::Yes ? "yes" : p == Prediction::No ? "no" : "outside"; }

// Whether rows ra of A and rb of B (same depth) are predicted equivalent by the intertwining section.
inline Prediction predict_coincidence(const BranchingTable& A, const ComponentRow& ra, const BranchingTable& B,
                                      const ComponentRow& rb, bool minus_one_square)
{
    if (ra.d != rb.d) return Prediction::No;
    auto is_pi_class = [](const BranchingTable& T, const ComponentRow& r) {
        if (T.depth_zero) return r.d > 0;
        return r.label == "shalika" && r.d > T.yu->r2;  // d > 2r
    };
    if (ra.label == "sigma" || rb.label == "sigma") {
        if (ra.label != rb.label) return Prediction::No;
        return A.sigma_label == B.sigma_label ? Prediction::Yes : Prediction::No;
    }
    bool pa = is_pi_class(A, ra), pb = is_pi_class(B, rb);
    if (pa || pb) {
        if (!(pa && pb)) return Prediction::No;
        return ra.sign_class == rb.sign_class && A.theta_sign == B.theta_sign ? Prediction::Yes : Prediction::No;
    }
    // both positive depth with d <= 2r (band, or the unramified-type component at d = r)
    const YuDatum& a = *A.yu;
    const YuDatum& b = *B.yu;
    bool ua = ra.label == "unramified-type", ub = rb.label == "unramified-type";
    TwistInfo tw = twist_relation(a, b);
    bool same_mu = ra.t == rb.t && ra.lambda == rb.lambda;
    if (ua || ub) {
        if (ua != ub) return Prediction::No;
        if (tw.rel == Relation::Same) return Prediction::Yes;
        if (tw.rel == Relation::Twist && same_mu) return ra.delta2 > tw.m2 ? Prediction::Yes : Prediction::No;
        return Prediction::Outside;
    }
    switch (tw.rel) {
    case Relation::Same:
        return same_mu ? Prediction::Yes : Prediction::No;
    case Relation::Twist:
        return same_mu && ra.delta2 > tw.m2 ? Prediction::Yes : Prediction::No;
    case Relation::InverseTwist:
        if (ra.delta2 != rb.delta2 || ra.delta2 <= tw.m2) return Prediction::No;
        if (minus_one_square) return same_mu ? Prediction::Yes : Prediction::No;
        return same_mu ? Prediction::No : Prediction::Yes;
    default:
        return Prediction::No;
    }
}

struct Coincidence {
    size_t ta, ra, tb, rb;
    int d;
    long long multiplicity;
    Prediction predicted;
};

struct ExhaustivenessReport {
    std::vector<Coincidence> pairs;  // every compared pair (ta, ra) < (tb, rb), plus diagonals
    size_t mismatches = 0;
    size_t outside_observed = 0;
    size_t diagonal_failures = 0;
    bool ok() const { return mismatches == 0 && diagonal_failures == 0; }
};

// Observed component coincidences across (and within) the given tables, compared with predict_coincidence.
inline ExhaustivenessReport exhaustiveness(const std::vector<BranchingTable>& tabs, bool minus_one_square, double tol = 1e-6)
{
    struct Ref {
        size_t t, r;
    };
    std::vector<Ref> refs;
    for (size_t t = 0; t < tabs.size(); ++t)
        for (size_t r = 0; r < tabs[t].rows.size(); ++r)
            if (tabs[t].rows[r].character) refs.push_back({t, r});
    std::vector<std::pair<size_t, size_t>> jobs;
    for (size_t i = 0; i < refs.size(); ++i)
        for (size_t j = i; j < refs.size(); ++j)
            if (tabs[refs[i].t].rows[refs[i].r].d == tabs[refs[j].t].rows[refs[j].r].d) jobs.push_back({i, j});
    ExhaustivenessReport rep;
    rep.pairs.resize(jobs.size());
    for (size_t k = 0; k < jobs.size(); ++k) {
        const auto& a = refs[jobs[k].first];
        const auto& b = refs[jobs[k].second];
        const auto& A = tabs[a.t];
        const auto& B = tabs[b.t];
        const auto& ra = A.rows[a.r];
        const auto& rb = B.rows[b.r];
        long long m = intertwining(*ra.character, *rb.character, tol);
        Prediction p = (a.t == b.t && a.r == b.r) ? Prediction::Yes : predict_coincidence(A, ra, B, rb, minus_one_square);
        rep.pairs[k] = {a.t, a.r, b.t, b.r, ra.d, m, p};
        if (a.t == b.t && a.r == b.r) {
            if (m != 1) ++rep.diagonal_failures;
        } else if (p == Prediction::Outside) {
            if (m) ++rep.outside_observed;
        } else if ((m > 0) != (p == Prediction::Yes)) {
            ++rep.mismatches;
        }
    }
    return rep;
}

}  // namespace sl2b
