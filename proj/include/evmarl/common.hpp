#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evmarl {

// Bad or inconsistent configuration (CLI exit code 1).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated an operation's contract, or a numeric invariant broke
// mid-run (CLI exit code 2).
struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The oracle instance admits no feasible schedule, or enumeration would
// exceed its cap (CLI exit code 3).
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SplitMix64 finalizer; used to derive independent seed streams from one
// user-facing seed without correlated low bits.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a stream seed from (seed, tag). Tags are short ASCII labels like
// "profiles" or "noise"; matched arms of an experiment share the tags that
// must coincide (behavior sampling) and differ on none.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = mix64(seed);
    for (char c : tag) h = mix64(h ^ static_cast<std::uint8_t>(c));
    return h;
}

// FNV-1a over a string; stable across builds, used for content-addressed
// run directory names.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Emit a diagnostic at most once per process (keyed by the message
// pointer). Observation clamping in long training runs would otherwise
// flood stderr.
inline void warn_once(const char* msg) {
    static std::vector<const char*> seen;
    for (const char* p : seen)
        if (p == msg) return;
    seen.push_back(msg);
    std::fprintf(stderr, "evmarl: warning: %s\n", msg);
}

}  // namespace evmarl
