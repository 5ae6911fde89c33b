#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sl2b/abelian.hpp"
#include "sl2b/classfun.hpp"

namespace sl2b {

// Anisotropic torus T_{g1,g2} = {t(a,b) = (a, b g1; b g2, a)} with barycenter y = y2/2.
struct TorusDescriptor {
    std::string id;
    LocalElem gamma1, gamma2;
    int y2 = 0;
    bool ramified = false;

    LocalElem c() const { return gamma1 * gamma2; }
    LMat X() const { return {LocalElem::zero(gamma1.field()), gamma1, gamma2, LocalElem::zero(gamma1.field())}; }
};

inline std::vector<TorusDescriptor> table1_tori(const FieldConfig& K)
{
    auto eps = K.eps_elem();
    auto epsinv = K.constant(K.F->inv(K.eps()));
    auto pi = K.pi();
    return {
        {"u-eps", K.one(), eps, 0, false},
        {"u-eps-eta", K.pi_pow(-1), eps * pi, 2, false},
        {"r-1-pi", K.one(), pi, 1, true},
        {"r-eps-invpi", eps, epsinv * pi, 1, true},
        {"r-1-epspi", K.one(), eps * pi, 1, true},
        {"r-eps-pi", eps, pi, 1, true},
    };
}

// Conjugacy classes: when -1 is a non-square the two pairs of ramified rows coincide.
inline std::vector<TorusDescriptor> torus_classes(const FieldConfig& K)
{
    auto all = table1_tori(K);
    if (K.minus_one_is_square()) return all;
    return {all[0], all[1], all[2], all[4]};
}

inline TorusDescriptor torus_by_id(const FieldConfig& K, const std::string& id)
{
    for (auto& T : table1_tori(K))
        if (T.id == id) return T;
    throw std::invalid_argument("unknown torus id: " + id);
}

// {(a, b) mod P^n : a^2 - c b^2 = 1} with (a,b)(a',b') = (aa' + c bb', ab' + a'b).
class TorusCoordGroup {
public:
    TorusCoordGroup(FieldConfig K, LocalElem c, int n) : K_(std::move(K)), c_(std::move(c)), Q_(K_.F, n)
    {
        int q = K_.q();
        uint64_t total = Q_.qpow(n);
        Ser cs = Q_.ser_from(c_.with_precision(n));
        Ser one = Q_.ser_one();
        for (uint64_t ia = 0; ia < total; ++ia) {
            uint64_t t = ia;
            Ser a = Q_.digits_from_index(t, 0);
            Ser a2 = Q_.ser_mul(a, a);
            for (uint64_t ib = 0; ib < total; ++ib) {
                uint64_t u = ib;
                Ser b = Q_.digits_from_index(u, 0);
                if (Q_.ser_sub(a2, Q_.ser_mul(cs, Q_.ser_mul(b, b))) == one) add(a, b);
            }
        }
        (void)q;
        // identity first
        auto id = index_of(one, Ser{});
        if (id != 0) {
            std::swap(elems_[0], elems_[id]);
            index_[key(elems_[0].first, elems_[0].second)] = 0;
            index_[key(elems_[id].first, elems_[id].second)] = id;
        }
        cs_ = cs;
    }

    int n() const { return Q_.N(); }
    int order() const { return int(elems_.size()); }
    const Quotient& ring() const { return Q_; }
    const std::pair<Ser, Ser>& element(int i) const { return elems_[i]; }
    int index_of(const Ser& a, const Ser& b) const
    {
        auto it = index_.find(key(a, b));
        if (it == index_.end()) throw std::domain_error("TorusCoordGroup: not a torus point");
        return it->second;
    }
    int mul(int i, int j) const
    {
        const auto& [a, b] = elems_[i];
        const auto& [a2, b2] = elems_[j];
        Ser na = Q_.ser_add(Q_.ser_mul(a, a2), Q_.ser_mul(cs_, Q_.ser_mul(b, b2)));
        Ser nb = Q_.ser_add(Q_.ser_mul(a, b2), Q_.ser_mul(a2, b));
        return index_of(na, nb);
    }
    std::shared_ptr<FiniteAbelian> abelian() const
    {
        return std::make_shared<FiniteAbelian>(order(), [this](int i, int j) { return mul(i, j); });
    }

private:
    FieldConfig K_;
    LocalElem c_;
    Quotient Q_;
    Ser cs_{};
    std::vector<std::pair<Ser, Ser>> elems_;
    absl::flat_hash_map<uint64_t, int> index_;

    uint64_t key(const Ser& a, const Ser& b) const
    {
        uint64_t k = 0;
        for (int i = 0; i < Q_.N(); ++i) k = k * Q_.q() + a[i];
        for (int i = 0; i < Q_.N(); ++i) k = k * Q_.q() + b[i];
        return k;
    }
    void add(const Ser& a, const Ser& b)
    {
        index_.emplace(key(a, b), int(elems_.size()));
        elems_.push_back({a, b});
    }
};

// Is the torus point (a, b) in T_r?  r = r2/2.  Requires the digits involved to be known.
inline bool in_torus_filtration(const TorusDescriptor& T, const Quotient& ring, const Ser& a, const Ser& b, int r2)
{
    if (r2 <= 0) return true;
    int n = ring.N();
    int ka = ceil_div(r2, 2);
    int kb = ceil_div(r2 - T.y2, 2) - T.gamma1.val();
    for (int i = 0; i < std::min(ka, n); ++i)
        if (a[i] != (i == 0 ? 1 : 0)) return false;
    for (int i = 0; i < std::min(kb, n); ++i)
        if (b[i]) return false;
    return true;
}

struct TorusCharacter {
    TorusDescriptor T;
    int r2 = 0;  // depth 2r
    std::shared_ptr<const TorusCoordGroup> G;
    std::shared_ptr<const FiniteAbelian> A;
    std::vector<long long> e;
    int index = 0;  // position in the enumeration

    cplx at_index(int i) const { return A->value(e, i); }
    // (a, b) known to at least n digits
    cplx operator()(const Ser& a, const Ser& b) const { return at_index(G->index_of(a, b)); }
    cplx at(const LocalElem& a, const LocalElem& b) const
    {
        const Quotient& R = G->ring();
        return (*this)(R.ser_from(a.with_precision(R.N())), R.ser_from(b.with_precision(R.N())));
    }
    int n() const { return G->n(); }
    std::string describe() const { return T.id + ":r2=" + std::to_string(r2) + ":phi" + std::to_string(index); }
};

// modulus n with T_{r+} the kernel of reduction: r+1 (unramified) or r+1/2 (ramified)
inline int torus_char_modulus(const TorusDescriptor& T, int r2) { return T.ramified ? (r2 + 1) / 2 : r2 / 2 + 1; }

// All characters of T of depth exactly r (nontrivial on T_r, trivial on T_{r+}).
inline std::vector<TorusCharacter> torus_characters_of_depth(const FieldConfig& K, const TorusDescriptor& T, int r2)
{
    if (r2 <= 0) throw std::invalid_argument("torus characters: r must be positive");
    if (T.ramified != (r2 % 2 == 1)) return {};
    int n = torus_char_modulus(T, r2);
    auto G = std::make_shared<const TorusCoordGroup>(K, T.c(), n);
    std::shared_ptr<const FiniteAbelian> A = G->abelian();
    std::vector<int> level;
    for (int i = 0; i < G->order(); ++i)
        if (in_torus_filtration(T, G->ring(), G->element(i).first, G->element(i).second, r2)) level.push_back(i);
    std::vector<TorusCharacter> out;
    int idx = 0;
    for (auto& e : A->characters()) {
        bool trivial = true;
        for (int i : level)
            if (e[i] % A->exponent() != 0) {
                trivial = false;
                break;
            }
        if (trivial) continue;
        out.push_back({T, r2, G, A, e, idx++});
    }
    return out;
}

struct GenericElement {
    LocalElem A;     // a * gamma1, val = -r - y
    LocalElem a;     // the scalar
    LMat Gamma;      // a X_T
};

// Search a with val(a g1) = -r-y and Psi(2 a b g1 g2) = phi(t) for t in T_{s+}, s = r/2.
// Digits of a*g1 range over depths <= -s; all matching candidates are returned, canonical first.
inline std::vector<GenericElement> generic_elements_for(const FieldConfig& K, const TorusCharacter& phi)
{
    const TorusDescriptor& T = phi.T;
    int r2 = phi.r2, y2 = T.y2;
    int lo2 = -r2 - y2;  // 2 * lowest index
    if (lo2 % 2) throw std::logic_error("generic element: -r-y is not integral");
    int lo = lo2 / 2;
    // depth of digit i is i + y; keep i + y <= -s, i.e. 4i <= -r2 - 2 y2
    int hi = floor_div(-r2 - 2 * y2, 4);
    const auto& G = *phi.G;
    const Quotient& R = G.ring();
    // T_{s+}: smallest filtration level strictly above s, on the half-integer grid
    int s4 = r2;  // 4s = 2r
    int next2 = floor_div(s4, 2) + 1;  // smallest 2r' > 2s
    std::vector<int> probe;
    for (int i = 0; i < G.order(); ++i)
        if (in_torus_filtration(T, R, G.element(i).first, G.element(i).second, next2)) probe.push_back(i);
    std::vector<LocalElem> bs;
    for (int i : probe) bs.push_back(LocalElem::from_coeffs(K.F, 0, std::vector<uint8_t>(G.element(i).second.begin(), G.element(i).second.begin() + R.N()), R.N()));

    int width = hi - lo + 1;
    if (width <= 0) throw std::logic_error("generic element: empty search window");
    std::vector<GenericElement> out;
    uint64_t total = (uint64_t)(K.q() - 1);
    for (int i = 1; i < width; ++i) total *= K.q();
    LocalElem two = LocalElem::from_int(K.F, 2);
    for (uint64_t idx = 0; idx < total; ++idx) {
        std::vector<uint8_t> dig(width);
        uint64_t t = idx;
        // high digits vary fastest so the canonical candidate has them zero when free
        dig[0] = uint8_t(1 + t % (K.q() - 1));
        t /= (K.q() - 1);
        for (int i = 1; i < width; ++i) {
            dig[i] = uint8_t(t % K.q());
            t /= K.q();
        }
        LocalElem A = LocalElem::from_coeffs(K.F, lo, dig);
        bool ok = true;
        for (size_t k = 0; k < probe.size() && ok; ++k) {
            cplx lhs = K.psi(two * A * bs[k] * T.gamma2);
            if (std::abs(lhs - phi.at_index(probe[k])) > 1e-9) ok = false;
        }
        if (!ok) continue;
        LocalElem a = A * T.gamma1.inverse();
        out.push_back({A, a, T.X() * a});
    }
    std::stable_sort(out.begin(), out.end(), [&](const GenericElement& x, const GenericElement& y) {
        for (int i = hi; i >= lo; --i) {
            if (x.A.coeff(i) != y.A.coeff(i)) return x.A.coeff(i) < y.A.coeff(i);
        }
        return false;
    });
    return out;
}

// Image in K/K_N of {a I + b X(u,v)} with integral entries, given u, v exact.
inline std::shared_ptr<TableGroup> torus_in_K(const FieldConfig& K, const Quotient& Q, const LocalElem& u,
                                              const LocalElem& v, const std::string& label)
{
    LocalElem w = v * u.inverse();  // lower = beta * w with beta = b u the (1,2) entry
    int e = std::max(0, -w.val());
    int N = Q.N();
    int Nb = N + e;
    std::vector<Mat> gens;
    uint64_t total = Q.qpow(N);
    for (uint64_t idx = 0; idx < total; ++idx) {
        uint64_t t = idx;
        std::vector<uint8_t> bd(Nb, 0);
        for (int i = e; i < Nb; ++i) {
            bd[i] = uint8_t(t % K.q());
            t /= K.q();
        }
        LocalElem beta = LocalElem::from_coeffs(K.F, 0, bd, Nb);
        LocalElem lower = beta * w;
        LocalElem one_c = K.one() + beta * lower;
        if (one_c.is_zero() || one_c.val() != 0 || !K.F->is_square(one_c.leading())) continue;
        uint8_t r0 = K.F->sqrt(one_c.leading());
        for (uint8_t hint : {r0, K.F->neg(r0)}) {
            LocalElem a = K.sqrt_unit(one_c, N, hint);
            gens.push_back(Q.make(a, beta.with_precision(N), lower.with_precision(N), a));
        }
    }
    if (w.val() == 0) {
        // points with a in P: beta^2 = (a^2 - 1) / w
        LocalElem winv = w.inverse();
        for (uint64_t idx = 0; idx < Q.qpow(N - 1); ++idx) {
            uint64_t t = idx;
            Ser ad = Q.digits_from_index(t, 1);
            LocalElem a = LocalElem::from_coeffs(K.F, 0, std::vector<uint8_t>(ad.begin(), ad.begin() + N), N);
            LocalElem x = (a * a - K.one()) * winv;
            if (!K.F->is_square(x.leading())) continue;
            uint8_t r0 = K.F->sqrt(x.leading());
            for (uint8_t hint : {r0, K.F->neg(r0)}) {
                LocalElem beta = K.sqrt_unit(x, N, hint);
                gens.push_back(Q.make(a, beta, (beta * w).with_precision(N), a));
            }
        }
    }
    return TableGroup::closure(Q, gens, label);
}

// Torus coordinates (a, b) of a matrix a I + b X(u,v), reduced mod P^n.
inline std::pair<Ser, Ser> torus_coords(const Quotient& Q, const Mat& m, const LocalElem& u, const Quotient& ring)
{
    LocalElem a = Q.entry(m, 0);
    LocalElem b = Q.entry(m, 1) * u.inverse();
    return {ring.ser_from(a.with_precision(ring.N())), ring.ser_from(b.with_precision(ring.N()))};
}

}  // namespace sl2b
