#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace specbench {

enum class ParseMode {
  Strict,
  Lenient,
};

std::string_view parse_mode_name(ParseMode mode);

/// Result of parsing a model answer. `failed` means no in-range index was
/// found in either mode; such records score as empty predictions.
struct ParsedAnswer {
  std::set<int> indices;
  ParseMode mode = ParseMode::Strict;
  bool failed = false;
  std::vector<std::string> warnings;
};

/// Parses the constrained "(X)" answer grammar.
///
/// Strict mode accepts only a comma-separated sequence of "(k)" tokens with
/// optional surrounding whitespace. When strict parsing yields nothing, the
/// lenient fallback extracts every "(k)" substring anywhere in the text.
/// Out-of-range indices are dropped with a warning. For single-label tasks
/// the first surviving index (in order of appearance) wins.
///
/// Never throws on malformed input.
ParsedAnswer parse_answer(std::string_view text, int n_classes, bool multi_label);

/// Formats an index set in the answer grammar, ascending: "(1),(3)".
std::string format_answer(const std::set<int>& indices);

}  // namespace specbench
