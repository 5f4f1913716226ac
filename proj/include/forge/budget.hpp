#pragma once

#include <atomic>
#include <cstdlib>

#include "forge/errors.hpp"

namespace forge {

/// Process-wide cap on the total number of stored series coefficients,
/// configurable through FORGE_MAX_TERMS (default 10^7). Out-of-memory guard
/// for runaway truncation orders, not a precision knob.
class TermBudget {
  public:
    static long long cap() {
        static long long c = [] {
            const char *e = std::getenv("FORGE_MAX_TERMS");
            if (!e) return 10'000'000LL;
            long long v = std::atoll(e);
            return v > 0 ? v : 10'000'000LL;
        }();
        return c;
    }

    static void add(long long n) {
        long long now = live().fetch_add(n) + n;
        if (n > 0 && now > cap())
            throw BudgetExceeded("stored series terms exceed FORGE_MAX_TERMS = " + std::to_string(cap()));
    }

    static long long current() { return live().load(); }

  private:
    static std::atomic<long long> &live() {
        static std::atomic<long long> v{0};
        return v;
    }
};

} // namespace forge
