#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sl2b {

using cplx = std::complex<double>;

inline cplx root_of_unity(long long num, long long den)
{
    num %= den;
    if (num < 0) num += den;
    double ang = 2.0 * std::numbers::pi * double(num) / double(den);
    return {std::cos(ang), std::sin(ang)};
}

// Residue field F_q = F_p[x]/(m(x)), elements encoded as integers 0..q-1
// whose base-p digits are the polynomial coefficients.
class Fq {
public:
    int p = 0;
    int f = 0;
    int q = 0;
    int bits = 0;
    uint8_t eps = 0;
    uint8_t minus_one = 0;
    uint8_t generator = 0;
    std::vector<int> modulus;

    static std::shared_ptr<const Fq> make(int q_)
    {
        auto F = std::shared_ptr<Fq>(new Fq());
        F->init(q_);
        return F;
    }

    uint8_t add(uint8_t a, uint8_t b) const { return add_[a * q + b]; }
    uint8_t sub(uint8_t a, uint8_t b) const { return sub_[a * q + b]; }
    uint8_t mul(uint8_t a, uint8_t b) const { return mul_[a * q + b]; }
    uint8_t neg(uint8_t a) const { return neg_[a]; }
    uint8_t inv(uint8_t a) const
    {
        if (a == 0) throw std::domain_error("Fq: inverse of zero");
        return inv_[a];
    }
    int trace(uint8_t a) const { return tr_[a]; }
    bool is_square(uint8_t a) const { return sq_[a] != 0; }
    bool is_nonzero_square(uint8_t a) const { return a != 0 && sq_[a] != 0; }
    uint8_t sqrt(uint8_t a) const
    {
        if (!sq_[a]) throw std::domain_error("Fq: not a square");
        return sqrt_[a];
    }
    uint8_t from_int(long long n) const
    {
        n %= p;
        if (n < 0) n += p;
        return uint8_t(n);
    }
    uint8_t pow(uint8_t a, long long e) const
    {
        uint8_t r = 1;
        while (e > 0) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    // F_p-basis of F_q: the monomials 1, x, ..., x^{f-1}.
    std::vector<uint8_t> basis() const
    {
        std::vector<uint8_t> b;
        int e = 1;
        for (int i = 0; i < f; ++i, e *= p) b.push_back(uint8_t(e));
        return b;
    }
    std::vector<uint8_t> nonzero_squares() const
    {
        std::vector<uint8_t> s;
        for (int a = 1; a < q; ++a)
            if (sq_[a]) s.push_back(uint8_t(a));
        return s;
    }
    // Fixed character of F_q^x with lambda(generator) = exp(2 pi i / (q-1)).
    int dlog(uint8_t a) const
    {
        if (a == 0) throw std::domain_error("Fq: dlog of zero");
        return dlog_[a];
    }
    cplx psi0(uint8_t a) const { return psi_[a]; }

private:
    std::vector<uint8_t> add_, sub_, mul_, neg_, inv_, sqrt_;
    std::vector<uint8_t> sq_;
    std::vector<int> tr_, dlog_;
    std::vector<cplx> psi_;

    std::vector<int> digits(int a) const
    {
        std::vector<int> d(f);
        for (int i = 0; i < f; ++i) {
            d[i] = a % p;
            a /= p;
        }
        return d;
    }
    int undigits(const std::vector<int>& d) const
    {
        int a = 0;
        for (int i = f - 1; i >= 0; --i) a = a * p + d[i];
        return a;
    }

    static bool poly_irreducible(const std::vector<int>& m, int p)
    {
        int deg = int(m.size()) - 1;
        if (deg <= 1) return true;
        // trial division by every monic polynomial of degree <= deg/2
        for (int dd = 1; dd <= deg / 2; ++dd) {
            long long count = 1;
            for (int i = 0; i < dd; ++i) count *= p;
            for (long long c = 0; c < count; ++c) {
                std::vector<int> g(dd + 1);
                long long t = c;
                for (int i = 0; i < dd; ++i) {
                    g[i] = int(t % p);
                    t /= p;
                }
                g[dd] = 1;
                std::vector<int> r = m;
                for (int i = deg; i >= dd; --i) {
                    int lead = r[i];
                    if (!lead) continue;
                    for (int j = 0; j <= dd; ++j)
                        r[i - dd + j] = ((r[i - dd + j] - lead * g[j]) % p + p) % p;
                }
                bool zero = true;
                for (int i = 0; i < dd; ++i)
                    if (r[i]) zero = false;
                if (zero) return false;
            }
        }
        return true;
    }

    void init(int q_)
    {
        q = q_;
        if (q < 3 || q % 2 == 0) throw std::invalid_argument("q must be an odd prime power");
        int pp = 0;
        for (int d = 2; d <= q; ++d)
            if (q % d == 0) {
                pp = d;
                break;
            }
        int t = q, ff = 0;
        while (t % pp == 0) {
            t /= pp;
            ++ff;
        }
        if (t != 1) throw std::invalid_argument("q must be an odd prime power");
        if (q > 256) throw std::invalid_argument("q too large for table arithmetic");
        p = pp;
        f = ff;
        bits = 0;
        while ((1 << bits) < q) ++bits;

        modulus.assign(f + 1, 0);
        modulus[f] = 1;
        if (f > 1) {
            long long count = 1;
            for (int i = 0; i < f; ++i) count *= p;
            for (long long c = 0; c < count; ++c) {
                long long tt = c;
                for (int i = 0; i < f; ++i) {
                    modulus[i] = int(tt % p);
                    tt /= p;
                }
                if (modulus[0] != 0 && poly_irreducible(modulus, p)) break;
            }
        }

        add_.resize(q * q);
        sub_.resize(q * q);
        mul_.resize(q * q);
        neg_.resize(q);
        inv_.assign(q, 0);
        for (int a = 0; a < q; ++a) {
            auto da = digits(a);
            std::vector<int> dn(f);
            for (int i = 0; i < f; ++i) dn[i] = (p - da[i]) % p;
            neg_[a] = uint8_t(undigits(dn));
            for (int b = 0; b < q; ++b) {
                auto db = digits(b);
                std::vector<int> s(f), dfr(f);
                for (int i = 0; i < f; ++i) {
                    s[i] = (da[i] + db[i]) % p;
                    dfr[i] = (da[i] - db[i] + p) % p;
                }
                add_[a * q + b] = uint8_t(undigits(s));
                sub_[a * q + b] = uint8_t(undigits(dfr));
                std::vector<int> prod(2 * f, 0);
                for (int i = 0; i < f; ++i)
                    for (int j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                for (int i = 2 * f - 1; i >= f; --i) {
                    int lead = prod[i];
                    if (!lead) continue;
                    for (int j = 0; j <= f; ++j)
                        prod[i - f + j] = ((prod[i - f + j] - lead * modulus[j]) % p + p) % p;
                }
                prod.resize(f);
                mul_[a * q + b] = uint8_t(undigits(prod));
            }
        }
        for (int a = 1; a < q; ++a)
            for (int b = 1; b < q; ++b)
                if (mul_[a * q + b] == 1) inv_[a] = uint8_t(b);

        sq_.assign(q, 0);
        sqrt_.assign(q, 0);
        for (int a = q - 1; a >= 0; --a) {
            uint8_t s = mul_[a * q + a];
            sq_[s] = 1;
            sqrt_[s] = uint8_t(a);
        }
        // prefer the smaller root
        for (int a = 0; a < q; ++a) {
            if (!sq_[a]) continue;
            uint8_t r = sqrt_[a];
            if (neg_[r] < r) sqrt_[a] = neg_[r];
        }

        // trace = sum of Frobenius conjugates; lands in the prime field
        tr_.assign(q, 0);
        for (int a = 0; a < q; ++a) {
            uint8_t s = 0, c = uint8_t(a);
            for (int i = 0; i < f; ++i) {
                s = add_[s * q + c];
                c = pow(c, p);
            }
            tr_[a] = digits(s)[0];
        }
        psi_.resize(q);
        for (int a = 0; a < q; ++a) psi_[a] = root_of_unity(tr_[a], p);

        minus_one = neg_[1];
        eps = 0;
        for (int a = 1; a < q; ++a)
            if (!sq_[a]) {
                eps = uint8_t(a);
                break;
            }
        if (!sq_[minus_one]) eps = minus_one;

        generator = 0;
        for (int a = 2; a < q && !generator; ++a) {
            uint8_t c = uint8_t(a);
            int ord = 1;
            while (c != 1) {
                c = mul(c, uint8_t(a));
                ++ord;
            }
            if (ord == q - 1) generator = uint8_t(a);
        }
        if (q == 3) generator = 2;
        dlog_.assign(q, 0);
        uint8_t c = 1;
        for (int k = 0; k < q - 1; ++k) {
            dlog_[c] = k;
            c = mul(c, generator);
        }
    }
};

using FqPtr = std::shared_ptr<const Fq>;

// Element of k = F_q((t)) known modulo t^prec.  Coefficients cover the window
// [val, val + size); beyond the window the element is zero when exact, unknown
// otherwise.
class LocalElem {
public:
    static constexpr int kExact = std::numeric_limits<int>::max() / 4;

    LocalElem() = default;
    LocalElem(FqPtr F, int prec) : F_(std::move(F)), val_(prec), prec_(prec) {}

    static LocalElem zero(FqPtr F, int prec = kExact) { return LocalElem(std::move(F), prec); }
    static LocalElem constant(FqPtr F, uint8_t c, int prec = kExact)
    {
        return monomial(std::move(F), c, 0, prec);
    }
    static LocalElem from_int(FqPtr F, long long n, int prec = kExact)
    {
        uint8_t c = F->from_int(n);
        return monomial(std::move(F), c, 0, prec);
    }
    static LocalElem monomial(FqPtr F, uint8_t c, int v, int prec = kExact)
    {
        LocalElem x(F, prec);
        if (c != 0 && v < prec) {
            x.val_ = v;
            x.c_ = {c};
        }
        return x;
    }
    static LocalElem uniformizer(FqPtr F) { return monomial(std::move(F), 1, 1); }
    // Sum of c[i] * t^(v+i) known modulo t^prec.
    static LocalElem from_coeffs(FqPtr F, int v, std::vector<uint8_t> c, int prec = kExact)
    {
        LocalElem x(F, prec);
        x.val_ = v;
        x.c_ = std::move(c);
        if (prec != kExact && x.val_ + int(x.c_.size()) > prec)
            x.c_.resize(std::max(0, prec - x.val_));
        x.normalize();
        return x;
    }

    const FqPtr& field() const { return F_; }
    bool is_zero() const { return c_.empty(); }
    bool is_exact() const { return prec_ == kExact; }
    int precision() const { return prec_; }
    int val() const { return c_.empty() ? kExact : val_; }
    int window_start() const { return val_; }
    uint8_t coeff(int i) const
    {
        if (i >= prec_) throw std::out_of_range("LocalElem: coefficient beyond precision");
        if (c_.empty() || i < val_ || i >= val_ + int(c_.size())) return 0;
        return c_[i - val_];
    }
    uint8_t leading() const
    {
        if (c_.empty()) throw std::domain_error("LocalElem: zero has no leading coefficient");
        return c_[0];
    }
    bool is_unit() const { return !c_.empty() && val_ == 0; }

    LocalElem with_precision(int prec) const
    {
        if (prec > prec_) throw std::domain_error("LocalElem: cannot raise precision");
        LocalElem r(F_, prec);
        if (!c_.empty() && val_ < prec) {
            r.val_ = val_;
            r.c_.assign(c_.begin(), c_.begin() + std::min<int>(int(c_.size()), prec - val_));
            r.normalize();
        }
        return r;
    }

    LocalElem operator-() const
    {
        LocalElem r = *this;
        for (auto& a : r.c_) a = F_->neg(a);
        return r;
    }
    friend LocalElem operator+(const LocalElem& a, const LocalElem& b) { return combine(a, b, false); }
    friend LocalElem operator-(const LocalElem& a, const LocalElem& b) { return combine(a, b, true); }
    friend LocalElem operator*(const LocalElem& a, const LocalElem& b)
    {
        const FqPtr& F = a.F_ ? a.F_ : b.F_;
        int prec;
        if (a.is_exact() && b.is_exact())
            prec = kExact;
        else if (a.is_exact())
            prec = a.c_.empty() ? kExact : sat_add(b.prec_, a.val_);
        else if (b.is_exact())
            prec = b.c_.empty() ? kExact : sat_add(a.prec_, b.val_);
        else
            prec = std::min(sat_add(a.prec_, b.val()), sat_add(b.prec_, a.val()));
        LocalElem r(F, prec);
        if (a.c_.empty() || b.c_.empty()) return r;
        int v = a.val_ + b.val_;
        int len = int(a.c_.size() + b.c_.size()) - 1;
        if (prec != kExact) len = std::min(len, prec - v);
        if (len <= 0) return r;
        std::vector<uint8_t> out(len, 0);
        for (int i = 0; i < int(a.c_.size()) && i < len; ++i) {
            if (!a.c_[i]) continue;
            for (int j = 0; j < int(b.c_.size()) && i + j < len; ++j)
                out[i + j] = F->add(out[i + j], F->mul(a.c_[i], b.c_[j]));
        }
        r.val_ = v;
        r.c_ = std::move(out);
        r.normalize();
        return r;
    }
    LocalElem& operator+=(const LocalElem& o) { return *this = *this + o; }
    LocalElem& operator-=(const LocalElem& o) { return *this = *this - o; }
    LocalElem& operator*=(const LocalElem& o) { return *this = *this * o; }

    LocalElem scaled(uint8_t c) const
    {
        LocalElem r = *this;
        for (auto& a : r.c_) a = F_->mul(a, c);
        r.normalize();
        return r;
    }
    LocalElem shifted(int k) const
    {
        LocalElem r = *this;
        r.val_ += k;
        if (r.prec_ != kExact) r.prec_ += k;
        return r;
    }

    // Inverse of a nonzero element with relative precision rel (exact inputs need a cap).
    LocalElem inverse(int rel_cap = 64) const
    {
        if (c_.empty()) throw std::domain_error("LocalElem: inverse of zero");
        int rel = is_exact() ? rel_cap : prec_ - val_;
        if (is_exact() && c_.size() == 1) return monomial(F_, F_->inv(c_[0]), -val_);
        std::vector<uint8_t> out(rel, 0);
        uint8_t li = F_->inv(c_[0]);
        for (int k = 0; k < rel; ++k) {
            uint8_t s = (k == 0) ? 1 : 0;
            for (int j = 1; j <= k && j < int(c_.size()); ++j) s = F_->sub(s, F_->mul(c_[j], out[k - j]));
            out[k] = F_->mul(s, li);
        }
        return from_coeffs(F_, -val_, std::move(out), -val_ + rel);
    }

    bool equals(const LocalElem& o) const
    {
        int prec = std::min(prec_, o.prec_);
        LocalElem d = *this - o;
        (void)prec;
        return d.is_zero();
    }

    std::vector<int> coeff_list(int from, int to) const
    {
        std::vector<int> out;
        for (int i = from; i < to; ++i) out.push_back(coeff(i));
        return out;
    }

    std::string str() const
    {
        if (c_.empty()) return is_exact() ? "0" : "O(t^" + std::to_string(prec_) + ")";
        std::string s;
        for (int i = 0; i < int(c_.size()); ++i) {
            if (!c_[i]) continue;
            if (!s.empty()) s += " + ";
            s += std::to_string(c_[i]) + "*t^" + std::to_string(val_ + i);
        }
        if (!is_exact()) s += " + O(t^" + std::to_string(prec_) + ")";
        return s;
    }

private:
    FqPtr F_;
    int val_ = kExact;
    int prec_ = kExact;
    std::vector<uint8_t> c_;

    static int sat_add(int a, int b)
    {
        long long s = (long long)a + b;
        if (s >= kExact) return kExact;
        return int(s);
    }

    void normalize()
    {
        size_t k = 0;
        while (k < c_.size() && c_[k] == 0) ++k;
        if (k == c_.size()) {
            c_.clear();
            val_ = prec_;
            return;
        }
        if (k) c_.erase(c_.begin(), c_.begin() + k);
        val_ += int(k);
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }

    static LocalElem combine(const LocalElem& a, const LocalElem& b, bool subtract)
    {
        const FqPtr& F = a.F_ ? a.F_ : b.F_;
        int prec = std::min(a.prec_, b.prec_);
        LocalElem r(F, prec);
        if (a.c_.empty() && b.c_.empty()) return r;
        int lo = std::min(a.c_.empty() ? kExact : a.val_, b.c_.empty() ? kExact : b.val_);
        if (lo >= prec) return r;
        int hi = std::max(a.c_.empty() ? lo : a.val_ + int(a.c_.size()), b.c_.empty() ? lo : b.val_ + int(b.c_.size()));
        if (prec != kExact) hi = std::min(hi, prec);
        std::vector<uint8_t> out(hi - lo, 0);
        for (int i = 0; i < int(a.c_.size()); ++i) {
            int k = a.val_ + i - lo;
            if (k < int(out.size())) out[k] = a.c_[i];
        }
        for (int i = 0; i < int(b.c_.size()); ++i) {
            int k = b.val_ + i - lo;
            if (k < int(out.size())) out[k] = subtract ? F->sub(out[k], b.c_[i]) : F->add(out[k], b.c_[i]);
        }
        r.val_ = lo;
        r.c_ = std::move(out);
        r.normalize();
        return r;
    }
};

enum class SquareClass { One, Eps, Pi, EpsPi };

inline std::string to_string(SquareClass c)
{
    switch (c) {
    case SquareClass::One: return "1";
    case SquareClass::Eps: return "eps";
    case SquareClass::Pi: return "pi";
    case SquareClass::EpsPi: return "eps*pi";
    }
    return "?";
}

struct FieldConfig {
    FqPtr F;

    explicit FieldConfig(int q) : F(Fq::make(q)) {}

    int p() const { return F->p; }
    int f() const { return F->f; }
    int q() const { return F->q; }
    uint8_t eps() const { return F->eps; }
    bool minus_one_is_square() const { return F->is_square(F->minus_one); }

    LocalElem one() const { return LocalElem::from_int(F, 1); }
    LocalElem pi() const { return LocalElem::uniformizer(F); }
    LocalElem pi_pow(int k) const { return LocalElem::monomial(F, 1, k); }
    LocalElem constant(uint8_t c) const { return LocalElem::constant(F, c); }
    LocalElem eps_elem() const { return LocalElem::constant(F, F->eps); }

    int val(const LocalElem& x) const { return x.val(); }

    SquareClass square_class(const LocalElem& u) const
    {
        if (u.is_zero()) throw std::domain_error("square_class: zero (or insufficient precision)");
        bool odd = (u.val() % 2 + 2) % 2 == 1;
        bool sq = F->is_square(u.leading());
        if (!odd) return sq ? SquareClass::One : SquareClass::Eps;
        return sq ? SquareClass::Pi : SquareClass::EpsPi;
    }

    cplx psi(const LocalElem& x) const
    {
        if (x.is_zero()) {
            if (x.precision() <= 0) throw std::domain_error("psi: window excludes index 0");
            return 1.0;
        }
        if (x.precision() <= 0) throw std::domain_error("psi: window excludes index 0");
        return F->psi0(x.coeff(0));
    }

    // a with a^2 = x mod t^N and a = hint mod t; x a unit square.
    LocalElem sqrt_unit(const LocalElem& x, int N, uint8_t hint) const
    {
        if (!x.is_unit()) throw std::domain_error("sqrt_unit: not a unit");
        uint8_t a0 = x.leading();
        if (!F->is_square(a0)) throw std::domain_error("sqrt_unit: no square root (non-square unit)");
        if (F->mul(hint, hint) != a0) throw std::domain_error("sqrt_unit: hint is not a residue square root");
        if (x.precision() < N) throw std::domain_error("sqrt_unit: insufficient precision");
        // digit-by-digit Hensel lifting: a_k = (x_k - sum_{0<i<k} a_i a_{k-i}) / (2 a_0)
        std::vector<uint8_t> a(N, 0);
        a[0] = hint;
        uint8_t inv2a = F->inv(F->mul(F->from_int(2), hint));
        for (int k = 1; k < N; ++k) {
            uint8_t s = x.coeff(k);
            for (int i = 1; i < k; ++i) s = F->sub(s, F->mul(a[i], a[k - i]));
            a[k] = F->mul(s, inv2a);
        }
        return LocalElem::from_coeffs(F, 0, std::move(a), N);
    }

    // a with a^2 = 1 + c mod t^N and a = 1 mod t.
    LocalElem solve_unit_square(const LocalElem& c, int N) const
    {
        LocalElem x = (one() + c);
        if (x.precision() < N) {
            if (!c.is_exact()) throw std::domain_error("solve_unit_square: insufficient precision");
        }
        if (c.is_zero()) return one().with_precision(N);
        if (c.val() < 0) throw std::domain_error("solve_unit_square: 1+c is not integral");
        if (c.val() == 0) {
            if (x.is_zero() || x.val() != 0 || !F->is_square(x.leading()))
                throw std::domain_error("solve_unit_square: 1+c is not a unit square");
            return sqrt_unit(x.is_exact() ? x : x, N, F->sqrt(x.leading()));
        }
        return sqrt_unit(x, N, 1);
    }

    cplx xi(uint8_t u) const
    {
        if (u == 0) throw std::domain_error("xi: u = 0");
        cplx s = 0;
        for (uint8_t y : F->nonzero_squares()) s += F->psi0(F->mul(u, y));
        return s;
    }
};

}  // namespace sl2b
