#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sl2b/parallel.hpp"
#include "sl2b/sl2group.hpp"

namespace sl2b {

class InducedCharacter;

class ClassFunction {
public:
    virtual ~ClassFunction() = default;
    virtual const SubgroupPtr& support() const = 0;
    // g must lie in the support
    virtual cplx value(const Mat& g) const = 0;
    virtual cplx value_by_index(uint64_t i) const { return value(support()->element(i)); }
    virtual std::string describe() const = 0;
    virtual const InducedCharacter* as_induced() const { return nullptr; }
    // value when g lies in the support
    virtual std::optional<cplx> try_value(const Mat& g) const
    {
        if (!support()->contains(g)) return std::nullopt;
        return value(g);
    }

    std::optional<cplx> at(const Mat& g) const { return try_value(g); }
    cplx degree() const { return value(support()->quotient().identity()); }
    const Quotient& quotient() const { return support()->quotient(); }
};

using CFPtr = std::shared_ptr<const ClassFunction>;

class FormulaCharacter : public ClassFunction {
public:
    FormulaCharacter(SubgroupPtr H, std::function<cplx(const Mat&)> f, std::string label)
        : H_(std::move(H)), f_(std::move(f)), label_(std::move(label))
    {
    }
    const SubgroupPtr& support() const override { return H_; }
    cplx value(const Mat& g) const override { return f_(g); }
    std::string describe() const override { return label_; }

private:
    SubgroupPtr H_;
    std::function<cplx(const Mat&)> f_;
    std::string label_;
};

class TabulatedCharacter : public ClassFunction {
public:
    TabulatedCharacter(TablePtr H, std::vector<cplx> values, std::string label)
        : H_(std::move(H)), Hs_(H_), values_(std::move(values)), label_(std::move(label))
    {
        if (values_.size() != H_->order()) throw std::invalid_argument("TabulatedCharacter: size mismatch");
    }
    const SubgroupPtr& support() const override { return Hs_; }
    const TablePtr& table() const { return H_; }
    cplx value(const Mat& g) const override
    {
        int64_t i = H_->index_of(g);
        if (i < 0) throw std::domain_error("TabulatedCharacter: element outside support");
        return values_[i];
    }
    cplx value_by_index(uint64_t i) const override { return values_[i]; }
    std::optional<cplx> try_value(const Mat& g) const override
    {
        int64_t i = H_->index_of(g);
        if (i < 0) return std::nullopt;
        return values_[i];
    }
    const std::vector<cplx>& values() const { return values_; }
    std::string describe() const override { return label_; }

private:
    TablePtr H_;
    SubgroupPtr Hs_;
    std::vector<cplx> values_;
    std::string label_;
};

// Right transversal {x_i} with G = disjoint union of H x_i, found by BFS over generators of G.
inline std::vector<Mat> right_transversal(const Subgroup& H, const Subgroup& G)
{
    const Quotient& Q = G.quotient();
    if (!Q.same(H.quotient())) throw std::invalid_argument("transversal: different quotients");
    if (G.order() % H.order() != 0) throw std::invalid_argument("transversal: |H| does not divide |G|");
    uint64_t index = G.order() / H.order();
    std::vector<Mat> reps{Q.identity()};
    std::vector<Mat> rep_inv{Q.identity()};
    auto gens = G.generators();
    for (size_t i = 0; i < reps.size() && reps.size() < index; ++i)
        for (const auto& s : gens) {
            Mat y = Q.mul(reps[i], s);
            bool found = false;
            for (const auto& ri : rep_inv)
                if (H.contains(Q.mul(y, ri))) {
                    found = true;
                    break;
                }
            if (!found) {
                reps.push_back(y);
                rep_inv.push_back(Q.inv(y));
                if (reps.size() == index) break;
            }
        }
    if (reps.size() != index) throw std::logic_error("transversal: BFS did not reach every coset");
    return reps;
}

inline std::vector<Mat> cached_transversal(const Subgroup& H, const Subgroup& G)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const std::vector<Mat>>> cache;
    std::string key = H.describe() + "|" + G.describe();
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto t = std::make_shared<const std::vector<Mat>>(right_transversal(H, G));
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, t);
    return *t;
}

class InducedCharacter : public ClassFunction {
public:
    InducedCharacter(CFPtr inner, SubgroupPtr G, std::string label = "")
        : inner_(std::move(inner)), G_(std::move(G)), label_(std::move(label))
    {
        const Quotient& Q = G_->quotient();
        for (const auto& g : inner_->support()->generators())
            if (!G_->contains(g)) throw std::invalid_argument("induce: H is not a subgroup of G");
        reps_ = cached_transversal(*inner_->support(), *G_);
        for (const auto& x : reps_) rep_inv_.push_back(Q.inv(x));
    }
    const SubgroupPtr& support() const override { return G_; }
    cplx value(const Mat& g) const override
    {
        const Quotient& Q = G_->quotient();
        cplx s = 0;
        for (size_t i = 0; i < reps_.size(); ++i) {
            Mat c = Q.mul(Q.mul(reps_[i], g), rep_inv_[i]);
            if (auto v = inner_->try_value(c)) s += *v;
        }
        return s;
    }
    std::string describe() const override
    {
        return label_.empty() ? "Ind(" + inner_->describe() + " -> " + G_->describe() + ")" : label_;
    }
    const InducedCharacter* as_induced() const override { return this; }
    const CFPtr& inner() const { return inner_; }
    uint64_t index() const { return reps_.size(); }
    const std::vector<Mat>& transversal() const { return reps_; }

private:
    CFPtr inner_;
    SubgroupPtr G_;
    std::string label_;
    std::vector<Mat> reps_, rep_inv_;
};

inline CFPtr induce(CFPtr chi, SubgroupPtr G, std::string label = "")
{
    return std::make_shared<InducedCharacter>(std::move(chi), std::move(G), std::move(label));
}

inline CFPtr restrict_to(CFPtr f, SubgroupPtr H)
{
    for (const auto& g : H->generators())
        if (!f->support()->contains(g)) throw std::invalid_argument("restrict: H is not contained in the support");
    auto label = "Res(" + f->describe() + " -> " + H->describe() + ")";
    return std::make_shared<FormulaCharacter>(std::move(H), [f](const Mat& g) { return f->value(g); }, label);
}

// gHg^{-1} for g in the same quotient
class ConjugateSubgroup : public Subgroup {
public:
    ConjugateSubgroup(SubgroupPtr H, Mat g) : H_(std::move(H)), g_(g), ginv_(H_->quotient().inv(g)) {}
    const Quotient& quotient() const override { return H_->quotient(); }
    uint64_t order() const override { return H_->order(); }
    Mat element(uint64_t i) const override { return quotient().conj(H_->element(i), g_); }
    bool contains(const Mat& h) const override { return H_->contains(quotient().conj(h, ginv_)); }
    std::vector<Mat> generators() const override
    {
        std::vector<Mat> out;
        for (const auto& h : H_->generators()) out.push_back(quotient().conj(h, g_));
        return out;
    }
    std::string describe() const override { return "Conj(" + H_->describe() + "," + std::to_string(quotient().key(g_)) + ")"; }

private:
    SubgroupPtr H_;
    Mat g_, ginv_;
};

// f^g(h) = f(g^{-1} h g) on gHg^{-1}
inline CFPtr conjugate_cf(CFPtr f, const Mat& g)
{
    const Quotient& Q = f->quotient();
    auto H = std::make_shared<ConjugateSubgroup>(f->support(), g);
    Mat gi = Q.inv(g);
    auto label = "Conj(" + f->describe() + ")";
    return std::make_shared<FormulaCharacter>(H, [f, gi, Q](const Mat& h) { return f->value(Q.conj(h, gi)); }, label);
}

inline cplx sum_over(const ClassFunction& a, const ClassFunction& b)
{
    // sum over a's support of a(h) conj(b(h))
    const auto& H = *a.support();
    return parallel_sum<cplx>(H.order(), [&](uint64_t i) {
        Mat h = H.element(i);
        return a.value_by_index(i) * std::conj(b.value(h));
    });
}

// <f1, f2> over the common support G. Induced arguments are unfolded by Frobenius reciprocity,
// summing over the smaller inducing subgroup.
inline cplx inner_product(const ClassFunction& f1, const ClassFunction& f2)
{
    const auto* i1 = f1.as_induced();
    const auto* i2 = f2.as_induced();
    if (i1 || i2) {
        bool use1 = i1 && (!i2 || i1->index() > i2->index() ||
                           (i1->index() == i2->index() && i1->inner()->support()->order() <= i2->inner()->support()->order()));
        if (use1) {
            const auto& chi = *i1->inner();
            return sum_over(chi, f2) / double(chi.support()->order());
        }
        const auto& chi = *i2->inner();
        return std::conj(sum_over(chi, f1)) / double(chi.support()->order());
    }
    return sum_over(f1, f2) / double(f1.support()->order());
}

// <f1, f2> summed over every element of f1's support, without unfolding inductions.
inline cplx inner_product_direct(const ClassFunction& f1, const ClassFunction& f2)
{
    return sum_over(f1, f2) / double(f1.support()->order());
}

struct IntegralityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline long long nearest_integer(cplx z, double tol = 1e-6)
{
    double r = std::round(z.real());
    if (std::abs(z.imag()) > tol || std::abs(z.real() - r) > tol) {
        std::ostringstream os;
        os << "value " << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i is not an integer within " << tol;
        throw IntegralityError(os.str());
    }
    return (long long)r;
}

inline long long intertwining(const ClassFunction& f1, const ClassFunction& f2, double tol = 1e-6)
{
    long long v = nearest_integer(inner_product(f1, f2), tol);
    if (v < 0) throw IntegralityError("negative intertwining number");
    return v;
}

inline bool is_irreducible(const ClassFunction& f, double tol = 1e-6) { return intertwining(f, f, tol) == 1; }

// Least n >= 0 such that K_{n+1} lies in the kernel; f must be defined on all of K/K_N.
inline int depth_of(const ClassFunction& f, double tol = 1e-6)
{
    const Quotient& Q = f.quotient();
    if (f.support()->order() != Q.order()) throw std::invalid_argument("depth_of: f must be defined on K");
    cplx deg = f.degree();
    for (int m = Q.N() - 1; m >= 1; --m) {
        ShapeGroup Km(Q, {m, m, m, false});
        bool trivial = true;
        for (uint64_t i = 0; i < Km.order() && trivial; ++i)
            if (std::abs(f.value(Km.element(i)) - deg) > tol) trivial = false;
        if (!trivial) return m;
    }
    return 0;
}

// Pointwise product of two class functions on the support of a.
inline CFPtr product(CFPtr a, CFPtr b, std::string label)
{
    return std::make_shared<FormulaCharacter>(a->support(), [a, b](const Mat& g) { return a->value(g) * b->value(g); },
                                              std::move(label));
}

}  // namespace sl2b
