#pragma once

#include <absl/container/flat_hash_map.h>
#include <absl/hash/hash.h>

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sl2b/localfield.hpp"

namespace sl2b {

constexpr int kMaxN = 8;

inline int floor_div(int a, int b)
{
    int d = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --d;
    return d;
}
inline int ceil_div(int a, int b) { return -floor_div(-a, b); }

// Entries a11, a12, a21, a22; entry k has residue digits d[k * kMaxN + i], i < N.
struct Mat {
    std::array<uint8_t, 4 * kMaxN> d{};
    uint8_t& at(int k, int i) { return d[k * kMaxN + i]; }
    uint8_t at(int k, int i) const { return d[k * kMaxN + i]; }
    friend bool operator==(const Mat& a, const Mat& b) { return a.d == b.d; }
};

using Ser = std::array<uint8_t, kMaxN>;

// The finite group SL_2(R / P^N) with R = F_q[[t]].
class Quotient {
public:
    Quotient() = default;
    Quotient(FqPtr F, int N) : F_(std::move(F)), N_(N)
    {
        if (N_ < 1 || N_ > kMaxN) throw std::invalid_argument("Quotient: modulus out of range");
        if (4 * N_ * F_->bits > 64) throw std::invalid_argument("Quotient: modulus too large for q (key packing)");
    }

    const FqPtr& field() const { return F_; }
    int N() const { return N_; }
    int q() const { return F_->q; }

    uint64_t order() const
    {
        uint64_t o = uint64_t(q()) * q() * q() - q();
        for (int i = 1; i < N_; ++i) o *= uint64_t(q()) * q() * q();
        return o;
    }

    Mat identity() const
    {
        Mat m;
        m.at(0, 0) = 1;
        m.at(3, 0) = 1;
        return m;
    }
    Mat minus_identity() const
    {
        Mat m;
        m.at(0, 0) = F_->minus_one;
        m.at(3, 0) = F_->minus_one;
        return m;
    }

    Ser entry_ser(const Mat& m, int k) const
    {
        Ser s{};
        for (int i = 0; i < N_; ++i) s[i] = m.at(k, i);
        return s;
    }
    void set_entry_ser(Mat& m, int k, const Ser& s) const
    {
        for (int i = 0; i < N_; ++i) m.at(k, i) = s[i];
    }

    // series helpers, all mod t^N
    Ser ser_mul(const Ser& x, const Ser& y) const
    {
        Ser out{};
        if (F_->f == 1) {
            int p = F_->p;
            for (int k = 0; k < N_; ++k) {
                int acc = 0;
                for (int i = 0; i <= k; ++i) acc += int(x[i]) * int(y[k - i]);
                out[k] = uint8_t(acc % p);
            }
        } else {
            for (int i = 0; i < N_; ++i) {
                if (!x[i]) continue;
                for (int j = 0; i + j < N_; ++j) out[i + j] = F_->add(out[i + j], F_->mul(x[i], y[j]));
            }
        }
        return out;
    }
    // x*y + z*w
    Ser ser_muladd(const Ser& x, const Ser& y, const Ser& z, const Ser& w) const
    {
        Ser out{};
        if (F_->f == 1) {
            int p = F_->p;
            for (int k = 0; k < N_; ++k) {
                int acc = 0;
                for (int i = 0; i <= k; ++i) acc += int(x[i]) * int(y[k - i]) + int(z[i]) * int(w[k - i]);
                out[k] = uint8_t(acc % p);
            }
        } else {
            for (int i = 0; i < N_; ++i)
                for (int j = 0; i + j < N_; ++j) {
                    out[i + j] = F_->add(out[i + j], F_->mul(x[i], y[j]));
                    out[i + j] = F_->add(out[i + j], F_->mul(z[i], w[j]));
                }
        }
        return out;
    }
    Ser ser_add(const Ser& x, const Ser& y) const
    {
        Ser o{};
        for (int i = 0; i < N_; ++i) o[i] = F_->add(x[i], y[i]);
        return o;
    }
    Ser ser_sub(const Ser& x, const Ser& y) const
    {
        Ser o{};
        for (int i = 0; i < N_; ++i) o[i] = F_->sub(x[i], y[i]);
        return o;
    }
    Ser ser_neg(const Ser& x) const
    {
        Ser o{};
        for (int i = 0; i < N_; ++i) o[i] = F_->neg(x[i]);
        return o;
    }
    Ser ser_one() const
    {
        Ser o{};
        o[0] = 1;
        return o;
    }
    Ser ser_inv(const Ser& x) const
    {
        if (x[0] == 0) throw std::domain_error("Quotient: inverse of a non-unit");
        Ser out{};
        uint8_t li = F_->inv(x[0]);
        for (int k = 0; k < N_; ++k) {
            uint8_t s = (k == 0) ? 1 : 0;
            for (int j = 1; j <= k; ++j) s = F_->sub(s, F_->mul(x[j], out[k - j]));
            out[k] = F_->mul(s, li);
        }
        return out;
    }
    int ser_val(const Ser& x) const
    {
        for (int i = 0; i < N_; ++i)
            if (x[i]) return i;
        return N_;
    }

    Mat mul(const Mat& a, const Mat& b) const
    {
        Mat c;
        Ser a11 = entry_ser(a, 0), a12 = entry_ser(a, 1), a21 = entry_ser(a, 2), a22 = entry_ser(a, 3);
        Ser b11 = entry_ser(b, 0), b12 = entry_ser(b, 1), b21 = entry_ser(b, 2), b22 = entry_ser(b, 3);
        set_entry_ser(c, 0, ser_muladd(a11, b11, a12, b21));
        set_entry_ser(c, 1, ser_muladd(a11, b12, a12, b22));
        set_entry_ser(c, 2, ser_muladd(a21, b11, a22, b21));
        set_entry_ser(c, 3, ser_muladd(a21, b12, a22, b22));
        return c;
    }
    Mat inv(const Mat& a) const
    {
        Mat c;
        for (int i = 0; i < N_; ++i) {
            c.at(0, i) = a.at(3, i);
            c.at(3, i) = a.at(0, i);
            c.at(1, i) = F_->neg(a.at(1, i));
            c.at(2, i) = F_->neg(a.at(2, i));
        }
        return c;
    }
    Mat neg(const Mat& a) const
    {
        Mat c;
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < N_; ++i) c.at(k, i) = F_->neg(a.at(k, i));
        return c;
    }
    // x g x^{-1}
    Mat conj(const Mat& g, const Mat& x) const { return mul(mul(x, g), inv(x)); }

    bool is_special(const Mat& a) const
    {
        Ser det = ser_sub(ser_mul(entry_ser(a, 0), entry_ser(a, 3)), ser_mul(entry_ser(a, 1), entry_ser(a, 2)));
        return det == ser_one();
    }

    uint64_t key(const Mat& a) const
    {
        uint64_t k = 0;
        int b = F_->bits;
        for (int e = 0; e < 4; ++e)
            for (int i = 0; i < N_; ++i) k = (k << b) | a.at(e, i);
        return k;
    }

    int entry_val(const Mat& a, int k) const
    {
        for (int i = 0; i < N_; ++i)
            if (a.at(k, i)) return i;
        return N_;
    }
    LocalElem entry(const Mat& a, int k) const
    {
        std::vector<uint8_t> c(N_);
        for (int i = 0; i < N_; ++i) c[i] = a.at(k, i);
        return LocalElem::from_coeffs(F_, 0, std::move(c), N_);
    }
    Ser ser_from(const LocalElem& x) const
    {
        if (!x.is_zero() && x.val() < 0) throw std::domain_error("Quotient: entry is not integral");
        if (x.precision() < N_) throw std::domain_error("Quotient: entry known to insufficient precision");
        Ser s{};
        for (int i = 0; i < N_; ++i) s[i] = x.coeff(i);
        return s;
    }
    Mat make(const LocalElem& a11, const LocalElem& a12, const LocalElem& a21, const LocalElem& a22) const
    {
        Mat m;
        set_entry_ser(m, 0, ser_from(a11));
        set_entry_ser(m, 1, ser_from(a12));
        set_entry_ser(m, 2, ser_from(a21));
        set_entry_ser(m, 3, ser_from(a22));
        if (!is_special(m)) throw std::domain_error("Quotient: determinant is not 1");
        return m;
    }
    Mat from_sers(const Ser& a11, const Ser& a12, const Ser& a21, const Ser& a22) const
    {
        Mat m;
        set_entry_ser(m, 0, a11);
        set_entry_ser(m, 1, a12);
        set_entry_ser(m, 2, a21);
        set_entry_ser(m, 3, a22);
        return m;
    }
    Mat upper_unipotent(uint8_t c, int i) const
    {
        Mat m = identity();
        if (i < N_) m.at(1, i) = c;
        return m;
    }
    Mat lower_unipotent(uint8_t c, int i) const
    {
        Mat m = identity();
        if (i < N_) m.at(2, i) = c;
        return m;
    }
    Mat diagonal(const Ser& a) const
    {
        Mat m;
        set_entry_ser(m, 0, a);
        set_entry_ser(m, 3, ser_inv(a));
        return m;
    }

    // reduction to a smaller modulus
    Mat reduce(const Mat& a, const Quotient& target) const
    {
        if (target.N() > N_) throw std::domain_error("Quotient: cannot lift");
        Mat m;
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < target.N(); ++i) m.at(k, i) = a.at(k, i);
        return m;
    }

    std::string str(const Mat& a) const
    {
        std::ostringstream os;
        os << "[";
        for (int k = 0; k < 4; ++k) {
            if (k) os << (k == 2 ? "; " : ", ");
            for (int i = 0; i < N_; ++i) os << int(a.at(k, i)) << (i + 1 < N_ ? "." : "");
        }
        os << "]";
        return os.str();
    }

    // mixed-radix helpers used by enumerators
    Ser digits_from_index(uint64_t& idx, int from) const
    {
        Ser s{};
        for (int i = from; i < N_; ++i) {
            s[i] = uint8_t(idx % q());
            idx /= q();
        }
        return s;
    }
    uint64_t qpow(int e) const
    {
        uint64_t r = 1;
        for (int i = 0; i < e; ++i) r *= q();
        return r;
    }

    bool same(const Quotient& o) const { return F_ == o.F_ && N_ == o.N_; }

private:
    FqPtr F_;
    int N_ = 0;
};

class Subgroup {
public:
    virtual ~Subgroup() = default;
    virtual const Quotient& quotient() const = 0;
    virtual uint64_t order() const = 0;
    virtual Mat element(uint64_t i) const = 0;
    virtual bool contains(const Mat& g) const = 0;
    virtual std::vector<Mat> generators() const = 0;
    virtual std::string describe() const = 0;
};

using SubgroupPtr = std::shared_ptr<const Subgroup>;

class FullK : public Subgroup {
public:
    explicit FullK(Quotient Q) : Q_(std::move(Q)) {}

    const Quotient& quotient() const override { return Q_; }
    uint64_t order() const override { return Q_.order(); }
    bool contains(const Mat& g) const override { return Q_.is_special(g); }
    std::string describe() const override { return "K/K" + std::to_string(Q_.N()); }

    Mat element(uint64_t i) const override
    {
        int N = Q_.N(), q = Q_.q();
        uint64_t units = uint64_t(q - 1) * Q_.qpow(N - 1);
        uint64_t caseA = units * Q_.qpow(2 * N);
        if (i < caseA) {
            Ser a = unit_from(i);
            Ser b = Q_.digits_from_index(i, 0);
            Ser c = Q_.digits_from_index(i, 0);
            Ser d = Q_.ser_mul(Q_.ser_add(Q_.ser_one(), Q_.ser_mul(b, c)), Q_.ser_inv(a));
            return Q_.from_sers(a, b, c, d);
        }
        i -= caseA;
        Ser a = Q_.digits_from_index(i, 1);
        Ser b = unit_from(i);
        Ser d = Q_.digits_from_index(i, 0);
        Ser c = Q_.ser_mul(Q_.ser_sub(Q_.ser_mul(a, d), Q_.ser_one()), Q_.ser_inv(b));
        return Q_.from_sers(a, b, c, d);
    }

    std::vector<Mat> generators() const override
    {
        std::vector<Mat> g;
        for (uint8_t al : Q_.field()->basis()) {
            g.push_back(Q_.upper_unipotent(al, 0));
            g.push_back(Q_.lower_unipotent(al, 0));
        }
        // the unipotents over R generate; add pi-multiples so BFS stays shallow
        for (int i = 1; i < Q_.N(); ++i)
            for (uint8_t al : Q_.field()->basis()) {
                g.push_back(Q_.upper_unipotent(al, i));
                g.push_back(Q_.lower_unipotent(al, i));
            }
        Ser gen{};
        gen[0] = Q_.field()->generator;
        g.push_back(Q_.diagonal(gen));
        return g;
    }

private:
    Quotient Q_;

    Ser unit_from(uint64_t& i) const
    {
        Ser a{};
        a[0] = uint8_t(1 + i % (Q_.q() - 1));
        i /= (Q_.q() - 1);
        for (int k = 1; k < Q_.N(); ++k) {
            a[k] = uint8_t(i % Q_.q());
            i /= Q_.q();
        }
        return a;
    }
};

// {(a b; c d) : a, d in U_diag, b in P^upper, c in P^lower}, optionally times {+-I}.
// diag = 0 means a, d are units.
struct Shape {
    int diag = 0;
    int upper = 0;
    int lower = 0;
    bool center = false;
};

inline bool operator==(const Shape& a, const Shape& b)
{
    return a.diag == b.diag && a.upper == b.upper && a.lower == b.lower && a.center == b.center;
}

class ShapeGroup : public Subgroup {
public:
    ShapeGroup(Quotient Q, Shape s) : Q_(std::move(Q))
    {
        int N = Q_.N();
        if (s.diag < 0 || s.upper < 0 || s.lower < 0) throw std::invalid_argument("ShapeGroup: negative exponent");
        s.diag = std::min(s.diag, N);
        s.upper = std::min(s.upper, N);
        s.lower = std::min(s.lower, N);
        if (s.upper + s.lower < std::max(s.diag, 1)) throw std::invalid_argument("ShapeGroup: shape is not a group");
        if (s.diag == 0) s.center = false;
        s_ = s;
    }

    const Shape& shape() const { return s_; }
    const Quotient& quotient() const override { return Q_; }

    uint64_t base_order() const
    {
        int N = Q_.N();
        uint64_t a = s_.diag == 0 ? uint64_t(Q_.q() - 1) * Q_.qpow(N - 1) : Q_.qpow(N - s_.diag);
        return a * Q_.qpow(N - s_.upper) * Q_.qpow(N - s_.lower);
    }
    uint64_t order() const override { return base_order() * (s_.center ? 2 : 1); }

    Mat element(uint64_t i) const override
    {
        uint64_t bo = base_order();
        bool negate = false;
        if (i >= bo) {
            i -= bo;
            negate = true;
        }
        Ser a{};
        if (s_.diag == 0) {
            a[0] = uint8_t(1 + i % (Q_.q() - 1));
            i /= (Q_.q() - 1);
            for (int k = 1; k < Q_.N(); ++k) {
                a[k] = uint8_t(i % Q_.q());
                i /= Q_.q();
            }
        } else {
            a = Q_.digits_from_index(i, s_.diag);
            a[0] = Q_.field()->add(a[0], 1);
        }
        Ser b = Q_.digits_from_index(i, s_.upper);
        Ser c = Q_.digits_from_index(i, s_.lower);
        Ser d = Q_.ser_mul(Q_.ser_add(Q_.ser_one(), Q_.ser_mul(b, c)), Q_.ser_inv(a));
        Mat m = Q_.from_sers(a, b, c, d);
        return negate ? Q_.neg(m) : m;
    }

    bool contains(const Mat& g) const override
    {
        if (!Q_.is_special(g)) return false;
        if (base_contains(g)) return true;
        return s_.center && base_contains(Q_.neg(g));
    }

    std::vector<Mat> generators() const override
    {
        std::vector<Mat> g;
        int N = Q_.N();
        auto basis = Q_.field()->basis();
        for (int i = s_.upper; i < N; ++i)
            for (uint8_t al : basis) g.push_back(Q_.upper_unipotent(al, i));
        for (int i = s_.lower; i < N; ++i)
            for (uint8_t al : basis) g.push_back(Q_.lower_unipotent(al, i));
        if (s_.diag == 0) {
            Ser gen{};
            gen[0] = Q_.field()->generator;
            g.push_back(Q_.diagonal(gen));
        }
        for (int i = std::max(1, s_.diag); i < N; ++i)
            for (uint8_t al : basis) {
                Ser a = Q_.ser_one();
                a[i] = al;
                g.push_back(Q_.diagonal(a));
            }
        if (s_.center) g.push_back(Q_.minus_identity());
        return g;
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os << "Shape(N=" << Q_.N() << ",U" << s_.diag << ",P" << s_.upper << ",P" << s_.lower << (s_.center ? ",Z" : "")
           << ")";
        return os.str();
    }

private:
    Quotient Q_;
    Shape s_;

    bool base_contains(const Mat& g) const
    {
        if (s_.diag == 0) {
            if (g.at(0, 0) == 0) return false;
        } else {
            for (int i = 0; i < s_.diag; ++i) {
                if (g.at(0, i) != (i == 0 ? 1 : 0)) return false;
                if (g.at(3, i) != (i == 0 ? 1 : 0)) return false;
            }
        }
        for (int i = 0; i < s_.upper; ++i)
            if (g.at(1, i)) return false;
        for (int i = 0; i < s_.lower; ++i)
            if (g.at(2, i)) return false;
        return true;
    }
};

// Explicit element list with a hash index.
class TableGroup : public Subgroup {
public:
    TableGroup(Quotient Q, std::vector<Mat> elems, std::vector<Mat> gens, std::string label)
        : Q_(std::move(Q)), gens_(std::move(gens)), label_(std::move(label))
    {
        index_.reserve(elems.size());
        elems_.reserve(elems.size());
        for (auto& e : elems) {
            auto [it, fresh] = index_.try_emplace(Q_.key(e), uint32_t(elems_.size()));
            if (fresh) elems_.push_back(e);
        }
        uint64_t h = 1469598103934665603ull;
        std::vector<uint64_t> keys;
        keys.reserve(elems_.size());
        for (auto& e : elems_) keys.push_back(Q_.key(e));
        std::sort(keys.begin(), keys.end());
        for (auto k : keys) h = (h ^ k) * 1099511628211ull;
        hash_ = h;
    }

    // Subgroup generated by gens (BFS closure).
    static std::shared_ptr<TableGroup> closure(const Quotient& Q, const std::vector<Mat>& gens, std::string label)
    {
        std::vector<Mat> elems{Q.identity()};
        absl::flat_hash_map<uint64_t, uint32_t> seen;
        seen.emplace(Q.key(Q.identity()), 0);
        for (size_t i = 0; i < elems.size(); ++i)
            for (const auto& g : gens) {
                Mat x = Q.mul(elems[i], g);
                if (seen.emplace(Q.key(x), uint32_t(elems.size())).second) elems.push_back(x);
            }
        return std::make_shared<TableGroup>(Q, std::move(elems), gens, std::move(label));
    }

    // Elements of `from` that satisfy pred; the caller asserts that this is a subgroup.
    template <class Pred>
    static std::shared_ptr<TableGroup> filter(const Subgroup& from, Pred pred, std::string label)
    {
        std::vector<Mat> out;
        for (uint64_t i = 0; i < from.order(); ++i) {
            Mat m = from.element(i);
            if (pred(m)) out.push_back(m);
        }
        return std::make_shared<TableGroup>(from.quotient(), std::move(out), std::vector<Mat>{}, std::move(label));
    }

    const Quotient& quotient() const override { return Q_; }
    uint64_t order() const override { return elems_.size(); }
    Mat element(uint64_t i) const override { return elems_[i]; }
    bool contains(const Mat& g) const override { return index_.contains(Q_.key(g)); }
    // -1 when absent
    int64_t index_of(const Mat& g) const
    {
        auto it = index_.find(Q_.key(g));
        return it == index_.end() ? -1 : int64_t(it->second);
    }
    const std::vector<Mat>& elements() const { return elems_; }
    uint64_t content_hash() const { return hash_; }

    std::vector<Mat> generators() const override
    {
        if (gens_.empty()) gens_ = greedy_generators();
        return gens_;
    }

    std::string describe() const override
    {
        std::ostringstream os;
        os << "Table(" << label_ << ",N=" << Q_.N() << ",|H|=" << elems_.size() << ",h=" << std::hex << hash_ << ")";
        return os.str();
    }

    bool is_closed() const
    {
        for (const auto& a : elems_) {
            if (!contains(Q_.inv(a))) return false;
            for (const auto& g : generators())
                if (!contains(Q_.mul(a, g))) return false;
        }
        return true;
    }

private:
    Quotient Q_;
    std::vector<Mat> elems_;
    absl::flat_hash_map<uint64_t, uint32_t> index_;
    mutable std::vector<Mat> gens_;
    std::string label_;
    uint64_t hash_ = 0;

    std::vector<Mat> greedy_generators() const
    {
        std::vector<Mat> gens;
        absl::flat_hash_map<uint64_t, char> span;
        std::vector<Mat> members{Q_.identity()};
        span.emplace(Q_.key(Q_.identity()), 1);
        for (const auto& e : elems_) {
            if (span.contains(Q_.key(e))) continue;
            gens.push_back(e);
            for (size_t i = 0; i < members.size(); ++i)
                for (const auto& g : gens) {
                    Mat x = Q_.mul(members[i], g);
                    if (span.emplace(Q_.key(x), 1).second) members.push_back(x);
                }
            if (members.size() == elems_.size()) break;
        }
        return gens;
    }
};

using TablePtr = std::shared_ptr<const TableGroup>;

inline std::shared_ptr<TableGroup> materialize(const Subgroup& H, std::string label)
{
    std::vector<Mat> e;
    e.reserve(H.order());
    for (uint64_t i = 0; i < H.order(); ++i) e.push_back(H.element(i));
    return std::make_shared<TableGroup>(H.quotient(), std::move(e), H.generators(), std::move(label));
}

// 2x2 matrix over k (Laurent entries), used for conjugations that leave K.
struct LMat {
    LocalElem a11, a12, a21, a22;

    static LMat diag(const LocalElem& x, const LocalElem& y) { return {x, LocalElem::zero(x.field()), LocalElem::zero(x.field()), y}; }

    friend LMat operator*(const LMat& x, const LMat& y)
    {
        return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22, x.a21 * y.a11 + x.a22 * y.a21,
                x.a21 * y.a12 + x.a22 * y.a22};
    }
    LMat operator*(const LocalElem& s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
    LocalElem det() const { return a11 * a22 - a12 * a21; }
    LocalElem trace() const { return a11 + a22; }
    // inverse of an exact matrix; det must be a monomial-exact element
    LMat inverse(int rel_cap = 64) const
    {
        LocalElem di = det().inverse(rel_cap);
        return {a22 * di, -a12 * di, -a21 * di, a11 * di};
    }
    std::string str() const { return "[" + a11.str() + ", " + a12.str() + "; " + a21.str() + ", " + a22.str() + "]"; }
};

inline LMat lift(const Quotient& Q, const Mat& g) { return {Q.entry(g, 0), Q.entry(g, 1), Q.entry(g, 2), Q.entry(g, 3)}; }

// Reduce a Laurent matrix into SL_2(R/P^N); throws if an entry is not integral or too imprecise.
inline Mat to_quotient(const Quotient& Q, const LMat& m) { return Q.make(m.a11, m.a12, m.a21, m.a22); }

struct Distinguished {
    FieldConfig K;
    uint8_t ex = 0, ey = 0;  // x^2 - y^2 eps = eps

    explicit Distinguished(const FieldConfig& k) : K(k)
    {
        const Fq& F = *K.F;
        bool found = false;
        for (int x = 0; x < F.q && !found; ++x)
            for (int y = 0; y < F.q && !found; ++y)
                if (F.sub(F.mul(x, x), F.mul(F.mul(y, y), F.eps)) == F.eps) {
                    ex = uint8_t(x);
                    ey = uint8_t(y);
                    found = true;
                }
        if (!found) throw std::logic_error("no solution of x^2 - y^2 eps = eps");
    }

    LocalElem zero() const { return LocalElem::zero(K.F); }
    LMat identity() const { return LMat::diag(K.one(), K.one()); }
    LMat eta(int d) const { return LMat::diag(K.one(), K.pi_pow(d)); }
    LMat alpha(int t) const { return LMat::diag(K.pi_pow(-t), K.pi_pow(t)); }
    LMat w() const { return {zero(), K.one(), -K.one(), zero()}; }
    LMat e() const
    {
        uint8_t ei = K.F->inv(K.F->eps);
        return {K.constant(ex), K.constant(ey), K.constant(ey), K.constant(K.F->mul(ei, ex))};
    }
    LMat e_eta() const { return eta(1) * e() * eta(-1); }
};

// x g x^{-1} for Laurent x, landing in SL_2(R/P^{out.N()}).
inline Mat conjugate_into(const Quotient& in, const Mat& g, const LMat& x, const LMat& xinv, const Quotient& out)
{
    return to_quotient(out, x * lift(in, g) * xinv);
}

// Moy-Prasad shape in K-coordinates; y2 = 2y, r4 = 4r. Entries may be negative (not inside K).
struct MPShape {
    int diag, upper, lower;
};

inline MPShape moy_prasad(int y2, int r4)
{
    if (r4 <= 0) throw std::invalid_argument("moy_prasad: r must be positive");
    int y4 = 2 * y2;
    return {ceil_div(r4, 4), ceil_div(r4 - y4, 4), ceil_div(r4 + y4, 4)};
}

}  // namespace sl2b
