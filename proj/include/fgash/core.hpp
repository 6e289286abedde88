#ifndef FGASH_CORE_HPP
#define FGASH_CORE_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fgash {

using Complex = std::complex<double>;

/// Raised when an input violates an operation's contract (bad dimension,
/// nonpositive epsilon, malformed config, ...). Mapped to exit code 2 by the CLI.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Raised when the numerics abort mid-run (singular Z, per-step hop
/// probability above the cap, boundary contamination). Exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

/// SplitMix64 mixing step; used to derive decorrelated per-trajectory seeds
/// from (master seed, trajectory index) independent of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

/// Stream of uniform variates on [0,1). The engine consumes exactly one
/// variate per time step, so tests can rig hop decisions deterministically.
class UniformStream {
public:
    virtual ~UniformStream() = default;
    virtual double next() = 0;
};

/// mt19937_64-backed stream with a portable bits-to-double mapping
/// (uniform_real_distribution is implementation-defined).
class SeededStream final : public UniformStream {
public:
    explicit SeededStream(std::uint64_t seed) : gen_(seed) {}
    double next() override { return double(gen_() >> 11) * 0x1.0p-53; }
    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

} // namespace fgash

#endif
