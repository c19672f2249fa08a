#pragma once

#include <charconv>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sysrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A scenario or command-line setting is invalid. The message names the key.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Malformed external input (CSV, JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not produce a usable answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message)
{
    if (!condition) {
        throw ValidationError(message);
    }
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_name(std::string_view name)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seeded generator with named substreams.
///
/// A substream's seed depends only on the parent seed and the name, so adding
/// or reordering draws in one subsystem never shifts another subsystem's
/// random numbers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

    [[nodiscard]] Rng substream(std::string_view name) const
    {
        return Rng(mix64(seed_ ^ hash_name(name)));
    }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    double normal() { return normal_(engine_); }

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sysrisk
