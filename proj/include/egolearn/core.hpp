#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace egolearn {

// ---------------------------------------------------------------------------
// Basic geometry / image
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Interleaved RGB float raster, values in [0,1]. Row-major, origin top-left.
struct Image {
    int w = 0;
    int h = 0;
    std::vector<float> px;  // size w*h*3

    Image() = default;
    Image(int width, int height, float fill = 0.0f)
        : w(width), h(height), px(static_cast<size_t>(width) * height * 3, fill) {}

    bool empty() const { return w == 0 || h == 0; }
    size_t idx(int x, int y) const { return (static_cast<size_t>(y) * w + x) * 3; }
    float* at(int x, int y) { return px.data() + idx(x, y); }
    const float* at(int x, int y) const { return px.data() + idx(x, y); }

    void set(int x, int y, float r, float g, float b) {
        float* p = at(x, y);
        p[0] = r; p[1] = g; p[2] = b;
    }
};

inline float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SessionTooShortError : ValidationError {
    using ValidationError::ValidationError;
};
struct DegenerateSplitError : ValidationError {
    using ValidationError::ValidationError;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Hashing / seed derivation
// ---------------------------------------------------------------------------

inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 14695981039346656037ull) {
    const auto* p = static_cast<const uint8_t*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Stable sub-stream seeds: hash of (master, label, index). Adding new labels
// never shifts existing streams.
inline uint64_t derive_seed(uint64_t master, std::string_view label, uint64_t index = 0) {
    uint64_t h = fnv1a64(&master, sizeof(master));
    h = fnv1a64(label.data(), label.size(), h);
    h = fnv1a64(&index, sizeof(index), h);
    uint64_t s = h;
    return splitmix64(s);
}

// xoshiro256++ with splitmix64 seeding. Fully specified, platform-stable.
class Rng {
public:
    explicit Rng(uint64_t seed = 1) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + uniform() * (b - a); }

    // [0,n)
    uint64_t uniform_int(uint64_t n) {
        // rejection sampling to stay unbiased
        const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do { v = next(); } while (v >= lim);
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean = 0.0, double sd = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        // Marsaglia polar method
        double u, v, r2;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * f;
        have_spare_ = true;
        return mean + sd * u * f;
    }

    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_int(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0,n), in random order
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        if (k > n) throw ValidationError("sample_without_replacement: k > n");
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + uniform_int(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4] = {};
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Small statistics helpers
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw ValidationError("median of empty list");
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ranks with ties averaged
inline std::vector<double> ranks_of(const std::vector<double>& v) {
    const size_t n = v.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw ValidationError("spearman: bad input");
    const auto ra = ranks_of(a);
    const auto rb = ranks_of(b);
    const double ma = mean_of(ra), mb = mean_of(rb);
    double num = 0.0, da = 0.0, db = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0.0 || db == 0.0) return 0.0;
    return num / std::sqrt(da * db);
}

// first index of the maximum (ties resolve to the lowest index)
inline int argmax_lowest(const float* v, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline uint64_t hash_image(const Image& img) {
    // quantize to 8 bit so equal renders hash equal regardless of float noise
    std::vector<uint8_t> q(img.px.size());
    for (size_t i = 0; i < img.px.size(); ++i)
        q[i] = static_cast<uint8_t>(std::lround(clamp01(img.px[i]) * 255.0f));
    uint64_t h = fnv1a64(&img.w, sizeof(img.w));
    h = fnv1a64(&img.h, sizeof(img.h), h);
    return fnv1a64(q.data(), q.size(), h);
}

}  // namespace egolearn
