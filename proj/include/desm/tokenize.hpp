#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace desm {

/// Splits UTF-8 text into lowercased tokens. Tokens are separated by Unicode
/// whitespace; leading and trailing ASCII punctuation is stripped from each
/// token and tokens that become empty are dropped. Lowercasing applies to
/// ASCII letters only, so the mapping is locale-independent.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace desm
