#pragma once

#include <iosfwd>

namespace bqmc {

/// Fast invariant checks on small inputs; prints one PASS/FAIL line per check
/// and returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace bqmc
