#pragma once
// Bundled example corpus run as a pass/fail matrix.
#include <string>
#include <vector>

namespace mvfix {

struct SelftestRow {
    std::string name;
    std::string expected;
    std::string got;
    bool pass = false;
    double ms = 0;
};

std::vector<SelftestRow> run_selftest();

}  // namespace mvfix
