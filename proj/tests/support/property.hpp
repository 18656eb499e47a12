#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <gtest/gtest.h>

#include "rng.hpp"

namespace econloop::testing {

/// Runs `body` for `cases` seeds derived from `base`; a failure reports the
/// seed so the case can be replayed alone.
inline void for_all(std::uint64_t base, int cases, const std::function<void(Rng&, int)>& body) {
    for (int i = 0; i < cases; ++i) {
        const std::uint64_t seed = base * 1000003ULL + static_cast<std::uint64_t>(i);
        SCOPED_TRACE("property case " + std::to_string(i) + " seed " + std::to_string(seed));
        Rng rng(seed);
        body(rng, i);
        if (::testing::Test::HasFatalFailure()) return;
    }
}

}  // namespace econloop::testing
