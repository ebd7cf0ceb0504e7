#pragma once

namespace grassmin {

/// Command-line front-end (solve / certify / bath / oracle / bench).
/// Factored out of main() so the test suite can drive it directly.
/// Exit codes: 0 success, 2 usage/config, 3 file load/parse,
/// 4 input validation, 5 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace grassmin
