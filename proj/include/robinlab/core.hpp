// Shared basics: error type, logging, deterministic helpers.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace robinlab {

// All contract violations surface as Error; the CLI maps them to exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool ok, const std::string& msg) {
    if (!ok) fail(msg);
}

// Point in physical space; y is unused (zero) for interval meshes.
using Point = std::array<double, 2>;

enum class LogLevel { Off = 0, Info = 1, Debug = 2 };

// Level read once from ROBIN_LAB_LOG ("off" | "info" | "debug").
inline LogLevel log_level() {
    static const LogLevel lvl = [] {
        const char* env = std::getenv("ROBIN_LAB_LOG");
        if (!env) return LogLevel::Off;
        std::string s(env);
        if (s == "debug") return LogLevel::Debug;
        if (s == "info") return LogLevel::Info;
        return LogLevel::Off;
    }();
    return lvl;
}

template <typename... Args>
inline void log_info(const char* fmt, Args... args) {
    if (log_level() >= LogLevel::Info) {
        std::fprintf(stderr, "[robinlab] ");
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

template <typename... Args>
inline void log_debug(const char* fmt, Args... args) {
    if (log_level() >= LogLevel::Debug) {
        std::fprintf(stderr, "[robinlab:debug] ");
        std::fprintf(stderr, fmt, args...);
        std::fprintf(stderr, "\n");
    }
}

// Round-trip-safe text form of a double; used everywhere artifacts are
// written so that identical runs produce identical bytes.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// SplitMix64: fixed-algorithm generator so random seeds are reproducible
// independent of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1).
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [a,b).
    double next_in(double a, double b) { return a + (b - a) * next_unit(); }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    a ^= b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2);
    return a;
}

}  // namespace robinlab
