#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>
#include <sstream>

#include "sl2b/classfun.hpp"

namespace sl2b {

struct ConjClass {
    Mat rep;
    uint64_t size = 0;
    std::string label;
};

// Complex character table of SL_2(F_q) computed from class multiplication coefficients.
class SL2FqTable {
public:
    FieldConfig K;
    Quotient Q;
    std::vector<ConjClass> classes;
    std::vector<std::vector<cplx>> chars;  // chars[i][class]
    Mat torus_gen;                         // generator of the norm-one torus t(a,b) = (a b; b eps a)
    int recombination_rounds = 0;

    explicit SL2FqTable(int q, unsigned seed = 12345) : K(q), Q(K.F, 1)
    {
        if (q > 27) throw std::invalid_argument("sl2fq table: q above the configured bound");
        build_classes();
        build_torus();
        build_characters(seed);
    }

    uint64_t group_order() const { return Q.order(); }
    int class_of(const Mat& g) const
    {
        auto it = class_index_.find(Q.key(g));
        if (it == class_index_.end()) throw std::domain_error("class_of: not an element of SL2(F_q)");
        return it->second;
    }
    // torus power k with g conjugate to torus_gen^k, or -1
    int torus_exponent(int cls) const { return torus_exp_[cls]; }

    cplx value(int chi, const Mat& g) const { return chars[chi][class_of(g)]; }

    cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) const
    {
        cplx s = 0;
        for (size_t k = 0; k < classes.size(); ++k) s += double(classes[k].size) * a[k] * std::conj(b[k]);
        return s / double(group_order());
    }

    std::vector<Mat> unipotent_upper() const
    {
        std::vector<Mat> u;
        for (int b = 0; b < K.q(); ++b) u.push_back(Q.upper_unipotent(uint8_t(b), 0));
        return u;
    }

private:
    absl::flat_hash_map<uint64_t, int> class_index_;
    std::vector<int> torus_exp_;

    void build_classes()
    {
        FullK G(Q);
        auto gens = G.generators();
        for (uint64_t i = 0; i < G.order(); ++i) {
            Mat x = G.element(i);
            if (class_index_.contains(Q.key(x))) continue;
            int c = int(classes.size());
            std::vector<Mat> orbit{x};
            class_index_.emplace(Q.key(x), c);
            for (size_t j = 0; j < orbit.size(); ++j)
                for (const auto& s : gens) {
                    Mat y = Q.conj(orbit[j], s);
                    if (class_index_.emplace(Q.key(y), c).second) orbit.push_back(y);
                }
            classes.push_back({x, orbit.size(), ""});
        }
    }

    void build_torus()
    {
        const Fq& F = *K.F;
        int q = F.q;
        torus_exp_.assign(classes.size(), -1);
        for (int a = 0; a < q; ++a)
            for (int b = 1; b < q; ++b) {
                if (F.sub(F.mul(a, a), F.mul(F.eps, F.mul(b, b))) != 1) continue;
                Mat t;
                t.at(0, 0) = uint8_t(a);
                t.at(1, 0) = uint8_t(b);
                t.at(2, 0) = F.mul(uint8_t(b), F.eps);
                t.at(3, 0) = uint8_t(a);
                int ord = 1;
                Mat y = t;
                while (!(y == Q.identity())) {
                    y = Q.mul(y, t);
                    ++ord;
                }
                if (ord == q + 1) {
                    torus_gen = t;
                    Mat z = Q.identity();
                    for (int k = 0; k <= q; ++k) {
                        int c = class_of(z);
                        if (torus_exp_[c] < 0) torus_exp_[c] = k;
                        z = Q.mul(z, t);
                    }
                    label_classes();
                    return;
                }
            }
        throw std::logic_error("norm-one torus has no generator");
    }

    void label_classes()
    {
        const Fq& F = *K.F;
        for (auto& c : classes) {
            const Mat& g = c.rep;
            uint8_t tr = F.add(g.at(0, 0), g.at(3, 0));
            bool central = g.at(1, 0) == 0 && g.at(2, 0) == 0 && g.at(0, 0) == g.at(3, 0);
            std::ostringstream os;
            if (central) {
                os << (g.at(0, 0) == 1 ? "I" : "-I");
            } else if (tr == 2 || tr == F.neg(2)) {
                os << (tr == 2 ? "u" : "-u") << "(" << Q.str(g) << ")";
            } else {
                uint8_t disc = F.sub(F.mul(tr, tr), 4 % F.p);
                os << (F.is_square(disc) ? "split" : "elliptic") << "(tr=" << int(tr) << ")";
            }
            c.label = os.str();
        }
    }

    void build_characters(unsigned seed)
    {
        int h = int(classes.size());
        // c[i][j][k] = #{x in C_i : x^{-1} z_k in C_j}
        std::vector<std::vector<std::vector<double>>> c(h, std::vector<std::vector<double>>(h, std::vector<double>(h, 0)));
        FullK G(Q);
        std::vector<std::vector<Mat>> members(h);
        for (uint64_t i = 0; i < G.order(); ++i) {
            Mat x = G.element(i);
            members[class_of(x)].push_back(x);
        }
        for (int i = 0; i < h; ++i)
            for (int k = 0; k < h; ++k)
                for (const auto& x : members[i]) c[i][class_of(Q.mul(Q.inv(x), classes[k].rep))][k] += 1;

        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int round = 1; round <= 50; ++round) {
            recombination_rounds = round;
            Eigen::MatrixXd M = Eigen::MatrixXd::Zero(h, h);
            for (int i = 0; i < h; ++i) {
                double r = U(rng);
                for (int j = 0; j < h; ++j)
                    for (int k = 0; k < h; ++k) M(j, k) += r * c[i][j][k];
            }
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M.cast<cplx>());
            auto ev = es.eigenvalues();
            double gap = 1e300;
            for (int a = 0; a < h; ++a)
                for (int b = a + 1; b < h; ++b) gap = std::min(gap, std::abs(ev(a) - ev(b)));
            if (gap < 1e-6) continue;
            chars.clear();
            for (int a = 0; a < h; ++a) {
                Eigen::VectorXcd w = es.eigenvectors().col(a);
                w /= w(0);
                double s = 0;
                for (int k = 0; k < h; ++k) s += std::norm(w(k)) / double(classes[k].size);
                double deg = std::sqrt(double(group_order()) / s);
                deg = std::round(deg);
                std::vector<cplx> vals(h);
                for (int k = 0; k < h; ++k) vals[k] = deg * w(k) / double(classes[k].size);
                chars.push_back(vals);
            }
            std::sort(chars.begin(), chars.end(), [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
                for (size_t k = 0; k < x.size(); ++k) {
                    double a = std::round(x[k].real() * 1e6), b = std::round(y[k].real() * 1e6);
                    if (a != b) return a < b;
                    a = std::round(x[k].imag() * 1e6);
                    b = std::round(y[k].imag() * 1e6);
                    if (a != b) return a < b;
                }
                return false;
            });
            return;
        }
        throw std::runtime_error("sl2fq table: eigenvalue degeneracy unresolved after 50 recombination rounds");
    }
};

enum class CuspidalKind { DL, SplitPlus, SplitMinus };

struct CuspidalChar {
    CuspidalKind kind;
    std::string label;
    std::vector<cplx> values;  // per class of the table
    std::vector<int> omegas;   // matched norm-kernel characters j (omega_j(gen) = exp(2 pi i j/(q+1)))
    int central_sign = 1;      // theta(-1)
    int degree = 0;
};

// Deligne-Lusztig values of sigma(omega_j): (q-1)omega(z) at z, -omega(z) at z*unipotent,
// -(omega(zeta)+omega(zeta^-1)) on elliptic classes, 0 on split classes.
inline std::vector<cplx> dl_character(const SL2FqTable& T, int j)
{
    int q = T.K.q();
    std::vector<cplx> v(T.classes.size(), 0.0);
    const Fq& F = *T.K.F;
    for (size_t k = 0; k < T.classes.size(); ++k) {
        const Mat& g = T.classes[k].rep;
        uint8_t tr = F.add(g.at(0, 0), g.at(3, 0));
        bool central = g.at(1, 0) == 0 && g.at(2, 0) == 0 && g.at(0, 0) == g.at(3, 0);
        double zsign = (j % 2 == 0) ? 1.0 : -1.0;  // omega_j(-1)
        if (central) {
            v[k] = double(q - 1) * (g.at(0, 0) == 1 ? 1.0 : zsign);
        } else if (tr == 2 % F.p || tr == F.neg(2 % F.p)) {
            v[k] = -(tr == 2 % F.p ? 1.0 : zsign);
        } else {
            int e = T.torus_exponent(int(k));
            if (e >= 0) v[k] = -(root_of_unity((long long)j * e, q + 1) + root_of_unity(-(long long)j * e, q + 1));
        }
    }
    return v;
}

inline std::vector<CuspidalChar> cuspidal_characters(const SL2FqTable& T, double tol = 1e-6)
{
    int q = T.K.q();
    const Fq& F = *T.K.F;
    std::vector<CuspidalChar> out;
    auto U = T.unipotent_upper();
    std::vector<int> cusp;
    for (size_t i = 0; i < T.chars.size(); ++i) {
        cplx s = 0;
        for (const auto& u : U) s += T.value(int(i), u);
        if (std::abs(s) < tol) cusp.push_back(int(i));
    }
    auto same = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        for (size_t k = 0; k < a.size(); ++k)
            if (std::abs(a[k] - b[k]) > tol) return false;
        return true;
    };
    int cls_minus = T.class_of(T.Q.minus_identity());
    for (int i : cusp) {
        int deg = int(std::lround(T.chars[i][0].real()));
        CuspidalChar c;
        c.values = T.chars[i];
        c.degree = deg;
        c.central_sign = int(std::lround(T.chars[i][cls_minus].real() / deg));
        if (deg == q - 1) {
            c.kind = CuspidalKind::DL;
            for (int j = 1; j <= q; ++j)
                if (2 * j != q + 1 && same(dl_character(T, j), c.values)) c.omegas.push_back(j);
            if (c.omegas.empty()) throw std::runtime_error("cuspidal table: degree q-1 character matches no omega");
            c.label = "sigma(omega_" + std::to_string(c.omegas.front()) + ")";
        } else if (2 * deg == q - 1) {
            // xi-pattern chi((z 0; c z)) = xi_{-zcx} theta0(z) with x = 1 (+) or eps (-)
            bool plus = true, minus = true;
            for (int c0 = 1; c0 < q; ++c0)
                for (int zs : {1, -1}) {
                    uint8_t z = zs == 1 ? 1 : F.minus_one;
                    Mat g;
                    g.at(0, 0) = z;
                    g.at(3, 0) = z;
                    g.at(2, 0) = uint8_t(c0);
                    cplx val = T.value(i, g);
                    double th = zs == 1 ? 1.0 : double(c.central_sign);
                    uint8_t u = F.neg(F.mul(z, uint8_t(c0)));
                    if (std::abs(val - T.K.xi(u) * th) > tol) plus = false;
                    if (std::abs(val - T.K.xi(F.mul(u, F.eps)) * th) > tol) minus = false;
                }
            if (plus == minus) throw std::runtime_error("cuspidal table: split character fits no xi-pattern (Psi/S convention)");
            c.kind = plus ? CuspidalKind::SplitPlus : CuspidalKind::SplitMinus;
            c.label = plus ? "sigma0+" : "sigma0-";
            c.omegas = {(q + 1) / 2};
        } else {
            continue;
        }
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(), [](const CuspidalChar& a, const CuspidalChar& b) {
        if (a.kind != b.kind) return int(a.kind) < int(b.kind);
        return a.omegas.front() < b.omegas.front();
    });
    return out;
}

// lambda of kappa^x with lambda(generator) = exp(2 pi i/(q-1)), so lambda(-1) = -1.
inline cplx lambda_char(const Fq& F, uint8_t a) { return root_of_unity(F.dlog(a), F.q - 1); }

// tau(g) = lambda(g11 mod P) on BK_d
inline CFPtr tau_char(const Quotient& Q, int d)
{
    auto BK = std::make_shared<ShapeGroup>(Q, Shape{0, 0, d, false});
    auto F = Q.field();
    return std::make_shared<FormulaCharacter>(BK, [F](const Mat& g) { return lambda_char(*F, g.at(0, 0)); },
                                              "tau(d=" + std::to_string(d) + ")");
}

// sigma inflated from SL_2(F_q) to K/K_N
inline CFPtr inflate_to_K(std::shared_ptr<const SL2FqTable> T, std::vector<cplx> values, const Quotient& Q,
                          std::string label)
{
    auto G = std::make_shared<FullK>(Q);
    Quotient Q1 = T->Q;
    return std::make_shared<FormulaCharacter>(
        G, [T, values = std::move(values), Q, Q1](const Mat& g) { return values[T->class_of(Q.reduce(g, Q1))]; },
        "Infl(" + label + ")");
}

// sigma^{eta^d} on BK_d: g -> sigma((g11, g12 pi^d; g21 pi^{-d}, g22) mod P); optionally times tau
inline CFPtr eta_pullback(std::shared_ptr<const SL2FqTable> T, std::vector<cplx> values, const Quotient& Q, int d,
                          bool with_tau, std::string label)
{
    if (d < 1 || d >= Q.N()) throw std::invalid_argument("eta_pullback: need 1 <= d < N");
    auto BK = std::make_shared<ShapeGroup>(Q, Shape{0, 0, d, false});
    auto F = Q.field();
    Quotient Q1 = T->Q;
    return std::make_shared<FormulaCharacter>(
        BK,
        [T, values = std::move(values), F, Q1, d, with_tau](const Mat& g) {
            Mat m;
            m.at(0, 0) = g.at(0, 0);
            m.at(2, 0) = g.at(2, d);
            m.at(3, 0) = g.at(3, 0);
            cplx v = values[T->class_of(m)];
            return with_tau ? v * lambda_char(*F, g.at(0, 0)) : v;
        },
        label + "^eta" + std::to_string(d) + (with_tau ? "*tau" : ""));
}

}  // namespace sl2b
