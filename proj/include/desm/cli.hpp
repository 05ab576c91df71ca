#pragma once

namespace desm::cli {

/// Entry point behind the desm binary. Exit codes: 0 success, 1 runtime
/// failure (missing/malformed files, contract violations), 2 usage errors.
/// Errors print a single "error: ..." line on stderr.
int run(int argc, const char* const* argv);

}  // namespace desm::cli
