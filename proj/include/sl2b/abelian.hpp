#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sl2b/localfield.hpp"

namespace sl2b {

// Diagonal of the Smith normal form of a small integer matrix (absolute values, zeros dropped).
inline std::vector<long long> smith_diagonal(std::vector<std::vector<long long>> A)
{
    std::vector<long long> diag;
    size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    size_t t = 0;
    while (t < rows && t < cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        long long best = 0;
        size_t pr = 0, pc = 0;
        for (size_t i = t; i < rows; ++i)
            for (size_t j = t; j < cols; ++j)
                if (A[i][j] != 0 && (best == 0 || std::llabs(A[i][j]) < best)) {
                    best = std::llabs(A[i][j]);
                    pr = i;
                    pc = j;
                }
        if (best == 0) break;
        std::swap(A[t], A[pr]);
        for (auto& row : A) std::swap(row[t], row[pc]);
        bool clean = true;
        for (size_t i = t + 1; i < rows; ++i) {
            long long f = A[i][t] / A[t][t];
            for (size_t j = t; j < cols; ++j) A[i][j] -= f * A[t][j];
            if (A[i][t]) clean = false;
        }
        for (size_t j = t + 1; j < cols; ++j) {
            long long f = A[t][j] / A[t][t];
            for (size_t i = t; i < rows; ++i) A[i][j] -= f * A[i][t];
            if (A[t][j]) clean = false;
        }
        if (!clean) continue;
        // divisibility condition
        bool divides = true;
        for (size_t i = t + 1; i < rows && divides; ++i)
            for (size_t j = t + 1; j < cols; ++j)
                if (A[i][j] % A[t][t] != 0) {
                    for (size_t k = t; k < cols; ++k) A[t][k] += A[i][k];
                    divides = false;
                    break;
                }
        if (!divides) continue;
        diag.push_back(std::llabs(A[t][t]));
        ++t;
    }
    return diag;
}

// Finite abelian group on labels 0..n-1 (0 = identity) with a multiplication callback.
// Characters are returned as exponent vectors e with chi(x) = exp(2 pi i e[x] / exponent()).
class FiniteAbelian {
public:
    FiniteAbelian(int n, std::function<int(int, int)> mul) : n_(n), mul_(std::move(mul)) { build(); }

    int order() const { return n_; }
    long long exponent() const { return E_; }
    const std::vector<int>& generators() const { return gens_; }
    const std::vector<int>& extension_orders() const { return ext_; }

    std::vector<long long> invariant_factors() const
    {
        auto d = smith_diagonal(relations_);
        std::vector<long long> out;
        for (auto x : d)
            if (x != 1) out.push_back(x);
        std::sort(out.begin(), out.end());
        return out;
    }

    int element_order(int x) const
    {
        int k = 1, y = x;
        while (y != 0) {
            y = mul_(y, x);
            ++k;
        }
        return k;
    }

    std::vector<std::vector<long long>> characters() const
    {
        std::vector<std::vector<long long>> chars{std::vector<long long>(n_, -1)};
        chars[0][0] = 0;
        std::vector<int> members{0};
        for (size_t k = 0; k < gens_.size(); ++k) {
            int g = gens_[k];
            int m = ext_[k];
            // g^m lies in the previous subgroup
            int gm = 0;
            for (int i = 0; i < m; ++i) gm = mul_(gm, g);
            std::vector<int> powers{0};
            for (int i = 1; i < m; ++i) powers.push_back(mul_(powers.back(), g));
            std::vector<std::vector<long long>> next;
            for (const auto& c : chars) {
                long long base = c[gm];
                if (base % m != 0) throw std::logic_error("FiniteAbelian: inconsistent extension");
                for (int j = 0; j < m; ++j) {
                    long long cg = (base / m + (long long)j * (E_ / m)) % E_;
                    std::vector<long long> e(n_, -1);
                    for (int h : members)
                        for (int i = 0; i < m; ++i) e[mul_(h, powers[i])] = (c[h] + i * cg) % E_;
                    next.push_back(std::move(e));
                }
            }
            std::vector<int> nm;
            for (int h : members)
                for (int i = 0; i < m; ++i) nm.push_back(mul_(h, powers[i]));
            members = std::move(nm);
            chars = std::move(next);
        }
        return chars;
    }

    cplx value(const std::vector<long long>& chi, int x) const { return root_of_unity(chi[x], E_); }

private:
    int n_;
    std::function<int(int, int)> mul_;
    std::vector<int> gens_;
    std::vector<int> ext_;
    long long E_ = 1;
    std::vector<std::vector<long long>> relations_;

    void build()
    {
        if (n_ <= 0) throw std::invalid_argument("FiniteAbelian: empty group");
        // exponent vectors w.r.t. the generators found so far, -1 marks "not yet reached"
        std::vector<std::vector<int>> expo(n_);
        std::vector<char> in(n_, 0);
        in[0] = 1;
        std::vector<int> members{0};
        for (int x = 0; x < n_ && int(members.size()) < n_; ++x) {
            if (in[x]) continue;
            // choose the element of largest order among those outside, for a short chain
            int best = x, best_ord = 0;
            for (int y = 0; y < n_; ++y)
                if (!in[y]) {
                    int o = element_order(y);
                    if (o > best_ord) {
                        best_ord = o;
                        best = y;
                    }
                }
            int g = best;
            int m = 1, gm = g;
            while (!in[gm]) {
                gm = mul_(gm, g);
                ++m;
            }
            size_t k = gens_.size();
            gens_.push_back(g);
            ext_.push_back(m);
            std::vector<long long> rel(k + 1, 0);
            for (size_t j = 0; j < k; ++j) rel[j] = -(long long)(expo[gm].empty() ? 0 : expo[gm][j]);
            rel[k] = m;
            for (auto& r : relations_) r.push_back(0);
            relations_.push_back(rel);
            std::vector<int> nm;
            for (int h : members) {
                int y = h;
                for (int i = 0; i < m; ++i) {
                    if (i > 0) {
                        y = mul_(y, g);
                        in[y] = 1;
                        auto v = expo[h];
                        v.resize(k + 1, 0);
                        v[k] = i;
                        expo[y] = v;
                    } else {
                        expo[y].resize(k + 1, 0);
                    }
                    nm.push_back(y);
                }
            }
            members = std::move(nm);
            x = -1;
        }
        if (int(members.size()) != n_) throw std::logic_error("FiniteAbelian: generators do not span");
        E_ = 1;
        for (int x = 0; x < n_; ++x) E_ = std::lcm(E_, (long long)element_order(x));
    }
};

}  // namespace sl2b
