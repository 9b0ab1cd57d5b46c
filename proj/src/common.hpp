#pragma once

// Shared numeric plumbing: errors, checked 64-bit modular arithmetic,
// pairwise summation, small rationals, least-squares fits, a deterministic
// RNG and SHA-256 for report/cache hashing.

#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace wlab {

using cplx = std::complex<double>;
inline constexpr double PI = 3.14159265358979323846264338327950288;

class Error : public std::runtime_error {
public:
    enum Code {
        invalid_argument = 1,
        overflow = 2,
        unsupported = 3,
        precision_loss = 4,
        validation_failed = 5,
        data_shortage = 6,
        convergence_failure = 7,
        io_error = 8,
        network_error = 9,
        internal = 10,
    };
    Error(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

// ---- integer helpers (all inputs expected < 2^31 in modulus) ----

inline int64_t mul_mod(int64_t a, int64_t b, int64_t m) {
    return (a % m) * (b % m) % m;
}

inline int64_t pow_mod(int64_t a, int64_t e, int64_t m) {
    a %= m;
    if (a < 0) a += m;
    int64_t r = 1;
    while (e > 0) {
        if (e & 1) r = mul_mod(r, a, m);
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    return r;
}

inline int64_t inv_mod(int64_t a, int64_t m) {
    int64_t t = 0, nt = 1, r = m, nr = ((a % m) + m) % m;
    while (nr != 0) {
        int64_t q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (r != 1) throw Error(Error::invalid_argument, "inv_mod: not invertible");
    return t < 0 ? t + m : t;
}

inline int64_t checked_ipow(int64_t b, int e, int64_t limit) {
    int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > limit / b) throw Error(Error::overflow, "integer power exceeds limit");
        r *= b;
    }
    return r;
}

bool is_prime(int64_t n);
std::vector<int64_t> prime_factors(int64_t n);  // distinct primes

// ---- pairwise (tree) summation: reproducible, O(eps log n) error ----

template <typename T>
T pairwise_sum(const T* v, size_t n) {
    if (n <= 8) {
        T s{};
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
    return pairwise_sum(v.data(), v.size());
}

// Streaming variant with bounded memory: terms are folded pairwise in
// blocks of 4096, block sums reduced pairwise at the end.
template <typename T>
class PairwiseAcc {
public:
    void add(T x) {
        buf_.push_back(x);
        if (buf_.size() == kBlock) flush();
    }
    T total() const {
        T tail = pairwise_sum(buf_);
        return pairwise_sum(partials_) + tail;
    }
    size_t count() const { return n_ + buf_.size(); }

private:
    static constexpr size_t kBlock = 4096;
    void flush() {
        partials_.push_back(pairwise_sum(buf_));
        n_ += buf_.size();
        buf_.clear();
    }
    std::vector<T> buf_;
    std::vector<T> partials_;
    size_t n_ = 0;
};

// ---- exact small rationals (int64 with __int128 intermediates) ----

struct Rat {
    int64_t num = 0;
    int64_t den = 1;

    Rat() = default;
    Rat(int64_t n) : num(n), den(1) {}
    Rat(int64_t n, int64_t d);

    double dbl() const { return double(num) / double(den); }
    bool is_zero() const { return num == 0; }

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    Rat operator-() const { return Rat(-num, den); }
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rat& o) const;
};

// ---- least squares slope of y against x ----

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double max_residual = 0;
};
FitResult least_squares(const std::vector<double>& x, const std::vector<double>& y);

// ---- deterministic RNG (splitmix64) : platform-stable draws ----

class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}
    uint64_t next() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    int64_t below(int64_t n) { return int64_t(next() % uint64_t(n)); }

private:
    uint64_t s_;
};

// ---- hashing ----

std::string sha256_hex(const void* data, size_t len);
std::string sha256_hex(const std::string& s);

// ---- parallel map over [0, n) with a job count; deterministic output slots ----

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

// fixed-format float printing for byte-stable reports
std::string fmt_g17(double x);

}  // namespace wlab
