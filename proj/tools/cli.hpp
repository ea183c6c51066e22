#pragma once

#include <iosfwd>

namespace dirac::cli {

// Runs dirac-spect with the given arguments. Data goes to `out` (or files),
// summaries and diagnostics to `err`. Failures print {"error": {...}} on `out`.
//
// exit codes: 0 ok, 1 internal failure, 2 bad input or usage, 3 root not
// bracketed, 4 spectral data fails validation, 5 positivity fails,
// 6 round-trip metric above threshold
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dirac::cli
