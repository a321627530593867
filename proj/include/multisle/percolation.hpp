#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "multisle/parallel.hpp"
#include "multisle/specfun.hpp"

namespace multisle {

// Predicted vertical-crossing probability of a rectangle with geometric
// aspect ratio width/height.  The elliptic-modulus ratio of the aspect map
// runs opposite to the geometric one for this crossing direction (a wide
// rectangle crosses top-to-bottom easily), so the cross-ratio fed to Cardy's
// formula is lambda_from_aspect(1/R) = 1 - lambda_from_aspect(R).
inline double cardy_vertical_probability(double width_over_height) {
    return cardy_probability(lambda_from_aspect(1.0 / width_over_height));
}

// ---------------------------------------------------------------------------
// splitmix64: the per-trial generator.  Every trial derives an independent
// stream from (seed, trial index), so results are reproducible bit for bit
// and independent of the thread count.
// ---------------------------------------------------------------------------

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t s) : state(s) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    bool bernoulli(double p) {
        const std::uint64_t draw = next();
        if (p >= 1.0)
            return true;
        if (p <= 0.0)
            return false;
        return draw < static_cast<std::uint64_t>(
                          p * 18446744073709551616.0 /* 2^64 */);
    }
};

inline std::uint64_t trial_stream_seed(std::uint64_t seed, std::uint64_t trial) {
    SplitMix64 mix(seed ^ (0xD1B54A32D192ED03ULL * (trial + 1)));
    return mix.next();
}

// ---------------------------------------------------------------------------
// Bond percolation on a rectangle.  width counts the bottom-side bonds and
// height the left-side bonds, so the site grid is (width+1) x (height+1).
// The vertical-crossing event connects the fully wired bottom row to the
// fully wired top row through open bonds.
// ---------------------------------------------------------------------------

struct LatticeSpec {
    int width;
    int height;
    double p;
    std::uint64_t seed;

    LatticeSpec(int w, int h, double prob, std::uint64_t s)
        : width(w), height(h), p(prob), seed(s) {
        if (w < 1 || h < 1)
            throw std::domain_error("LatticeSpec: need width, height >= 1");
        if (!(prob >= 0.0 && prob <= 1.0))
            throw std::domain_error("LatticeSpec: p must lie in [0,1]");
    }

    double aspect_ratio() const {
        return static_cast<double>(width) / height;
    }
};

namespace detail {

class UnionFind {
  public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1) {
        for (int i = 0; i < n; ++i)
            parent_[i] = i;
    }
    void reset(int n) {
        parent_.resize(n);
        size_.assign(n, 1);
        for (int i = 0; i < n; ++i)
            parent_[i] = i;
    }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]]; // path halving
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }
    bool connected(int a, int b) { return find(a) == find(b); }

  private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

struct CrossingSampler {
    // Reusable buffers for one worker.
    UnionFind primal{1};
    UnionFind dual{1};

    // Samples one configuration; when dual_out is non-null it also reports
    // the left-right crossing of the dual lattice (open dual bond == closed
    // primal bond), which complements the primal crossing exactly.
    bool sample(const LatticeSpec& spec, std::uint64_t trial, bool* dual_out) {
        const int cols = spec.width + 1, rows = spec.height + 1;
        const int nsites = cols * rows;
        const int bottom = nsites, top = nsites + 1;
        primal.reset(nsites + 2);
        auto site = [cols](int i, int j) { return j * cols + i; };

        const bool want_dual = dual_out != nullptr;
        // Dual sites: columns 0..cols (0 and cols are the wired virtual
        // sides), rows 0..rows-2 (plaquette centers).
        const int dcols = cols + 1, drows = rows - 1;
        const int dleft = dcols * drows, dright = dcols * drows + 1;
        auto dsite = [dcols](int i, int j) { return j * dcols + i; };
        if (want_dual)
            dual.reset(dcols * drows + 2);

        SplitMix64 rng(trial_stream_seed(spec.seed, trial));
        // Horizontal bonds, row-major.
        for (int j = 0; j < rows; ++j)
            for (int i = 0; i < spec.width; ++i) {
                const bool open = rng.bernoulli(spec.p);
                if (open)
                    primal.unite(site(i, j), site(i + 1, j));
                else if (want_dual && j >= 1 && j <= rows - 2)
                    // Crossed by the dual vertical bond through (i+1, j-1/2).
                    dual.unite(dsite(i + 1, j - 1), dsite(i + 1, j));
            }
        // Vertical bonds, row-major.
        for (int j = 0; j < spec.height; ++j)
            for (int i = 0; i < cols; ++i) {
                const bool open = rng.bernoulli(spec.p);
                if (open)
                    primal.unite(site(i, j), site(i, j + 1));
                else if (want_dual)
                    dual.unite(dsite(i, j), dsite(i + 1, j));
            }
        for (int i = 0; i < cols; ++i) {
            primal.unite(bottom, site(i, 0));
            primal.unite(top, site(i, rows - 1));
        }
        if (want_dual) {
            for (int j = 0; j < drows; ++j) {
                dual.unite(dleft, dsite(0, j));
                dual.unite(dright, dsite(cols, j));
            }
            *dual_out = dual.connected(dleft, dright);
        }
        return primal.connected(bottom, top);
    }
};

} // namespace detail

// One independent configuration (trial index 0).
inline bool sample_crossing(const LatticeSpec& spec, std::uint64_t trial = 0) {
    detail::CrossingSampler s;
    return s.sample(spec, trial, nullptr);
}

inline std::pair<bool, bool> sample_crossing_with_dual(const LatticeSpec& spec,
                                                       std::uint64_t trial = 0) {
    detail::CrossingSampler s;
    bool dual = false;
    const bool primal = s.sample(spec, trial, &dual);
    return {primal, dual};
}

struct CrossingEstimate {
    double p_hat;
    double stderr_;
    long trials;
};

inline CrossingEstimate estimate_crossing(const LatticeSpec& spec, long trials,
                                          int threads = 1) {
    if (trials < 100)
        throw std::domain_error("estimate_crossing: need at least 100 trials");
    const int nchunks = threads <= 1 ? 1 : 4 * threads;
    std::vector<long> hits(nchunks, 0);
    parallel_for(nchunks, threads, [&](int c) {
        detail::CrossingSampler sampler;
        long h = 0;
        for (long t = c; t < trials; t += nchunks)
            if (sampler.sample(spec, static_cast<std::uint64_t>(t), nullptr))
                ++h;
        hits[c] = h;
    });
    long total = 0;
    for (long h : hits)
        total += h;
    const double p_hat = static_cast<double>(total) / trials;
    const double se = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / trials);
    return {p_hat, se, trials};
}

} // namespace multisle
