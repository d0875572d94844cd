#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "waveguide/acceptance.hpp"

using namespace wg;

TEST_CASE("validation gates") {
    auto results = run_acceptance();
    REQUIRE(results.size() == 9);
    for (const auto& r : results) {
        std::printf("%s  %d  %-55s  %7.2fs  %s\n", r.pass ? "PASS" : "FAIL",
                    r.index, r.name.c_str(), r.seconds, r.detail.c_str());
        std::fflush(stdout);
        CHECK_MESSAGE(r.pass, r.name, ": ", r.detail);
    }
    CHECK(all_pass(results));
}
