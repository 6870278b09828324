#pragma once

// Counting perfect matchings of a bipartite graph, i.e. the permanent of its
// 0/1 biadjacency matrix.  Two engines:
//
//  * count_perfect_exact: inclusion-exclusion over column subsets visited in
//    Gray-code order, so each step updates one column's contribution to the
//    row sums.  Exponential in n, intended for n <= 24.
//
//  * estimate_perfect: sequential importance sampling.  Rows are matched one
//    at a time (fewest-options row first); a column is drawn with probability
//    proportional to the Minc-Bregman permanent bound of the residual matrix,
//    which only needs per-row degree ratios.  Each sample multiplies the
//    reciprocals of the chosen probabilities and is an unbiased estimate of
//    the permanent; batches are reduced by median-of-means.  The (epsilon,
//    delta) contract is calibrated empirically, not proven.

#include <gmpxx.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "popmatch/bipartite.hpp"
#include "popmatch/instance.hpp"

namespace popmatch {

enum class CountMethod { exact, oracle, estimate };

inline const char* count_method_name(CountMethod m) {
    switch (m) {
        case CountMethod::exact: return "exact";
        case CountMethod::oracle: return "oracle";
        case CountMethod::estimate: return "estimate";
    }
    return "?";
}

// Exact and oracle results populate `value`; estimates populate `estimate`
// and echo their parameters.
struct CountResult {
    mpz_class value;
    double estimate = 0.0;
    CountMethod method = CountMethod::exact;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultExactPermanentLimit = 24;

namespace permanent_detail {

inline void add_int128(mpz_class& acc, __int128 v) {
    bool neg = v < 0;
    unsigned __int128 mag = neg ? (unsigned __int128)0 - (unsigned __int128)v
                                : (unsigned __int128)v;
    mpz_class chunk((unsigned long)(mag >> 64));
    chunk <<= 64;
    chunk += (unsigned long)(mag & ~0ULL);
    if (neg)
        acc -= chunk;
    else
        acc += chunk;
}

// splitmix64 finalizer; decorrelates per-batch streams from one user seed
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + (salt + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

class SisSampler {
  public:
    explicit SisSampler(const BipartiteGraph& g) : n_(g.num_left()) {
        row_cols_.resize(n_);
        col_rows_.resize(n_);
        for (std::size_t u = 0; u < n_; ++u)
            for (int v : g.neighbors(u)) {
                row_cols_[u].push_back(v);
                col_rows_[v].push_back((int)u);
            }
        // ratio_[d] = (d-1 choices bound) / (d choices bound), Minc-Bregman
        ratio_.assign(n_ + 1, 0.0);
        std::vector<double> bound(n_ + 1, 0.0);
        for (std::size_t d = 1; d <= n_; ++d)
            bound[d] = std::exp(std::lgamma((double)d + 1.0) / (double)d);
        for (std::size_t d = 1; d <= n_; ++d) ratio_[d] = (d == 1 ? 0.0 : bound[d - 1]) / bound[d];
        degree_.resize(n_);
        row_done_.resize(n_);
        col_taken_.resize(n_);
    }

    // One unbiased sample of the permanent (0 on dead ends).
    double sample(std::mt19937_64& rng) {
        for (std::size_t r = 0; r < n_; ++r) {
            degree_[r] = (int)row_cols_[r].size();
            row_done_[r] = 0;
        }
        std::fill(col_taken_.begin(), col_taken_.end(), (char)0);
        double x = 1.0;
        for (std::size_t step = 0; step < n_; ++step) {
            int row = -1;
            for (std::size_t r = 0; r < n_; ++r)
                if (!row_done_[r] && (row < 0 || degree_[r] < degree_[row])) row = (int)r;
            if (degree_[row] == 0) return 0.0;
            cand_.clear();
            weight_.clear();
            double total = 0.0;
            for (int j : row_cols_[row]) {
                if (col_taken_[j]) continue;
                double w = 1.0;
                for (int r : col_rows_[j])
                    if (!row_done_[r] && r != row) w *= ratio_[degree_[r]];
                cand_.push_back(j);
                weight_.push_back(w);
                total += w;
            }
            if (total <= 0.0) return 0.0;  // every choice strands some row
            double u = uniform01(rng) * total;
            std::size_t pick = cand_.size() - 1;
            double csum = 0.0;
            for (std::size_t i = 0; i < cand_.size(); ++i) {
                csum += weight_[i];
                if (u < csum) {
                    pick = i;
                    break;
                }
            }
            if (weight_[pick] <= 0.0) return 0.0;  // u landed past all positive mass
            x *= total / weight_[pick];
            int j = cand_[pick];
            col_taken_[j] = 1;
            row_done_[row] = 1;
            for (int r : col_rows_[j])
                if (!row_done_[r]) --degree_[r];
        }
        return x;
    }

  private:
    std::size_t n_;
    std::vector<std::vector<int>> row_cols_, col_rows_;
    std::vector<double> ratio_;
    std::vector<int> degree_;
    std::vector<char> row_done_, col_taken_;
    std::vector<int> cand_;
    std::vector<double> weight_;
};

}  // namespace permanent_detail

inline mpz_class count_perfect_exact(const BipartiteGraph& g,
                                     std::size_t limit = kDefaultExactPermanentLimit) {
    if (g.num_left() != g.num_right())
        throw ValidationError("perfect-matching count needs equal sides, got " +
                              std::to_string(g.num_left()) + " and " +
                              std::to_string(g.num_right()));
    const std::size_t n = g.num_left();
    if (n > limit)
        throw LimitError("side size " + std::to_string(n) +
                         " exceeds the exact counting limit " + std::to_string(limit));
    if (n == 0) return 1;

    std::vector<std::vector<int>> col_rows(n);
    for (std::size_t u = 0; u < n; ++u)
        for (int v : g.neighbors(u)) col_rows[v].push_back((int)u);

    mpz_class result = 0;
    __int128 acc = 0;
    int pending = 0;
    std::vector<int> rowsum(n, 0);
    std::uint32_t gray = 0;
    const std::uint64_t subsets = 1ULL << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        int j = std::countr_zero(k);
        std::uint32_t bit = 1u << j;
        gray ^= bit;
        int dir = (gray & bit) ? 1 : -1;
        for (int i : col_rows[j]) rowsum[i] += dir;
        unsigned __int128 prod = 1;
        bool zero = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (rowsum[i] == 0) {
                zero = true;
                break;
            }
            prod *= (unsigned)rowsum[i];
        }
        if (zero) continue;
        if (((n - (std::size_t)std::popcount(gray)) & 1) != 0)
            acc -= (__int128)prod;
        else
            acc += (__int128)prod;
        if (++pending == 8192) {  // max |term| is 24^24, so this cannot overflow
            permanent_detail::add_int128(result, acc);
            acc = 0;
            pending = 0;
        }
    }
    permanent_detail::add_int128(result, acc);
    if (result < 0) throw Error("internal: negative permanent for a 0/1 matrix");
    return result;
}

inline CountResult estimate_perfect(const BipartiteGraph& g, double epsilon, double delta,
                                    std::uint64_t seed) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ValidationError("epsilon must lie strictly between 0 and 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw ValidationError("delta must lie strictly between 0 and 1");

    CountResult out;
    out.method = CountMethod::estimate;
    out.epsilon = epsilon;
    out.delta = delta;
    out.seed = seed;

    const std::size_t n = g.num_left();
    if (g.num_left() != g.num_right() || max_matching(g).size() < n) {
        out.method = CountMethod::exact;  // provably zero, no sampling needed
        out.value = 0;
        return out;
    }

    permanent_detail::SisSampler sampler(g);
    int batches = std::max(1, (int)std::ceil(std::log(1.0 / delta)));
    std::uint64_t per_batch = (std::uint64_t)std::ceil(8.0 * (double)n / (epsilon * epsilon));
    per_batch = std::max<std::uint64_t>(per_batch, 100);

    std::vector<double> means((std::size_t)batches);
    for (int b = 0; b < batches; ++b) {
        std::mt19937_64 rng(permanent_detail::mix_seed(seed, (std::uint64_t)b));
        double sum = 0.0;
        for (std::uint64_t t = 0; t < per_batch; ++t) sum += sampler.sample(rng);
        means[(std::size_t)b] = sum / (double)per_batch;
    }
    std::sort(means.begin(), means.end());
    std::size_t m = means.size();
    out.estimate = (means[(m - 1) / 2] + means[m / 2]) / 2.0;
    return out;
}

}  // namespace popmatch
