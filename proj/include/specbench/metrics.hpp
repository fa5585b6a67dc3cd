#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specbench/answers.hpp"

namespace specbench {

struct PrfTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Example-based precision/recall/F1 for one record.
/// p = |pred ∩ truth| / |pred| (0 when pred is empty),
/// r = |pred ∩ truth| / |truth|, f1 = 2pr/(p+r) (0 when p+r = 0).
/// Throws when truth is empty.
PrfTriple sample_prf(const std::set<int>& predicted, const std::set<int>& truth);

struct PredictionRecord {
  std::string patch_id;
  std::set<int> predicted;
  std::set<int> truth;
  std::string raw_text;
  ParseMode parse_mode = ParseMode::Strict;
  bool parse_failed = false;
  std::string backend_id;
  double latency_ms = 0.0;
};

struct ClassCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

struct MetricsReport {
  PrfTriple sample;
  PrfTriple micro;
  PrfTriple macro;
  std::optional<double> accuracy;  // single-label tasks only
  std::vector<ClassCounts> per_class;  // index 0 = class 1
  long n_records = 0;
  long n_parse_failures = 0;
};

/// Aggregates records into all three averaging modes. Sample = mean of
/// per-record sample_prf; Micro = pooled TP/FP/FN over records and classes;
/// Macro = unweighted mean of per-class P/R/F1 over classes with truth
/// support >= 1. Records are sorted by patch_id before reduction so the
/// result does not depend on arrival order. Throws on an empty record list.
MetricsReport aggregate(const std::vector<PredictionRecord>& records, int n_classes,
                        bool multi_label);

/// Fraction of records whose prediction equals the single truth label.
/// Throws when a record has |truth| != 1 or |predicted| > 1.
double top1_accuracy(const std::vector<PredictionRecord>& records);

/// Class-index mapping from a source label space to a smaller target space.
/// Source classes the target nomenclature drops map to nothing.
class ClassMapping {
 public:
  /// Parses "from_index,from_name,to_index,to_name" CSV (RFC 4180 quoting,
  /// header row required). When expected_sha256 is given, the raw bytes are
  /// checksummed first and a mismatch throws.
  static ClassMapping from_csv(std::string_view csv,
                               std::optional<std::string_view> expected_sha256);

  /// The BigEarthNet 43 -> 19 nomenclature table shipped with the library,
  /// validated against its pinned checksum.
  static const ClassMapping& bigearthnet_43_to_19();

  /// Maps a set of source indices; dropped classes vanish, result deduplicated.
  /// Throws on an out-of-range source index.
  std::set<int> map(const std::set<int>& source) const;

  int n_from() const { return static_cast<int>(targets_.size()); }
  int n_to() const { return n_to_; }

 private:
  std::vector<int> targets_;  // per source index (1-based -> slot i-1); 0 = dropped
  int n_to_ = 0;
};

}  // namespace specbench
