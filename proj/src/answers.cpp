#include "specbench/answers.hpp"

#include <charconv>
#include <optional>

namespace specbench {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Parses "(123)" starting at pos; on success returns the value (or nullopt on
// integer overflow, reported as -1) and advances pos past the ')'.
std::optional<long> token_at(std::string_view text, std::size_t& pos) {
  if (pos >= text.size() || text[pos] != '(') return std::nullopt;
  std::size_t p = pos + 1;
  std::size_t digits_start = p;
  while (p < text.size() && text[p] >= '0' && text[p] <= '9') ++p;
  if (p == digits_start || p >= text.size() || text[p] != ')') return std::nullopt;
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + digits_start, text.data() + p, value);
  if (ec == std::errc::result_out_of_range) value = -1;  // out of range, dropped later
  pos = p + 1;
  return value;
}

// Strict grammar: ws? token (ws? ',' ws? token)* ws?
std::optional<std::vector<long>> strict_scan(std::string_view text) {
  std::vector<long> values;
  std::size_t pos = 0;
  while (pos < text.size() && is_space(text[pos])) ++pos;
  auto first = token_at(text, pos);
  if (!first) return std::nullopt;
  values.push_back(*first);
  while (true) {
    std::size_t save = pos;
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) return values;
    if (text[pos] != ',') {
      pos = save;
      break;
    }
    ++pos;
    while (pos < text.size() && is_space(text[pos])) ++pos;
    auto next = token_at(text, pos);
    if (!next) return std::nullopt;
    values.push_back(*next);
  }
  while (pos < text.size() && is_space(text[pos])) ++pos;
  if (pos != text.size()) return std::nullopt;
  return values;
}

std::vector<long> lenient_scan(std::string_view text) {
  std::vector<long> values;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == '(') {
      std::size_t p = pos;
      if (auto v = token_at(text, p)) {
        values.push_back(*v);
        pos = p;
        continue;
      }
    }
    ++pos;
  }
  return values;
}

// Range filter + dedup preserving order of appearance.
std::vector<int> filter_indices(const std::vector<long>& raw, int n_classes,
                                std::vector<std::string>& warnings) {
  std::vector<int> kept;
  std::set<long> seen;
  for (long v : raw) {
    if (v < 1 || v > n_classes) {
      warnings.push_back("index " + std::to_string(v) + " outside [1, " +
                         std::to_string(n_classes) + "] dropped");
      continue;
    }
    if (!seen.insert(v).second) continue;
    kept.push_back(static_cast<int>(v));
  }
  return kept;
}

}  // namespace

std::string_view parse_mode_name(ParseMode mode) {
  return mode == ParseMode::Strict ? "strict" : "lenient";
}

ParsedAnswer parse_answer(std::string_view text, int n_classes, bool multi_label) {
  ParsedAnswer out;

  std::vector<int> kept;
  if (auto strict = strict_scan(text)) {
    kept = filter_indices(*strict, n_classes, out.warnings);
    out.mode = ParseMode::Strict;
  }
  if (kept.empty()) {
    out.warnings.clear();
    out.warnings.push_back("answer is not a plain \"(k)\" list; lenient extraction used");
    kept = filter_indices(lenient_scan(text), n_classes, out.warnings);
    out.mode = ParseMode::Lenient;
  }
  if (kept.empty()) {
    out.failed = true;
    out.warnings.push_back("no valid class index found");
    return out;
  }
  if (!multi_label && kept.size() > 1) {
    out.warnings.push_back("single-label task but " + std::to_string(kept.size()) +
                           " indices answered; keeping the first");
    kept.resize(1);
  }
  out.indices.insert(kept.begin(), kept.end());
  return out;
}

std::string format_answer(const std::set<int>& indices) {
  std::string out;
  for (int k : indices) {
    if (!out.empty()) out += ',';
    out += "(" + std::to_string(k) + ")";
  }
  return out;
}

}  // namespace specbench
