#include "specbench/metrics.hpp"

#include <algorithm>

#include "specbench/assets.hpp"
#include "specbench/digest.hpp"
#include "specbench/error.hpp"

namespace specbench {

namespace {

// Pinned checksum of data/bigearthnet43_to_19.csv; also recorded in the
// .sha256 sidecar next to the data file.
constexpr std::string_view kMapping43to19Sha256 =
    "8e5bb790b8f6d34cfe50f304db0eaea0ebef30d301b9d3ac60d19624c134eefe";

long intersection_size(const std::set<int>& a, const std::set<int>& b) {
  long n = 0;
  for (int v : a) n += b.count(v);
  return n;
}

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// Minimal RFC 4180 row reader for the mapping table.
std::vector<std::vector<std::string>> parse_csv(std::string_view csv) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  auto end_field = [&] { row.push_back(std::move(field)); field.clear(); };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < csv.size()) {
    char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_row();
    } else {
      field += c;
    }
    ++i;
  }
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

PrfTriple sample_prf(const std::set<int>& predicted, const std::set<int>& truth) {
  if (truth.empty()) throw Error("sample_prf: truth set is empty");
  const long hit = intersection_size(predicted, truth);
  PrfTriple out;
  out.precision = predicted.empty() ? 0.0
                                    : static_cast<double>(hit) /
                                          static_cast<double>(predicted.size());
  out.recall = static_cast<double>(hit) / static_cast<double>(truth.size());
  out.f1 = f1_of(out.precision, out.recall);
  return out;
}

MetricsReport aggregate(const std::vector<PredictionRecord>& records, int n_classes,
                        bool multi_label) {
  if (records.empty()) throw Error("aggregate: no records");
  if (n_classes < 1) throw Error("aggregate: n_classes must be positive");

  std::vector<const PredictionRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* a, const auto* b) { return a->patch_id < b->patch_id; });

  MetricsReport report;
  report.n_records = static_cast<long>(records.size());
  report.per_class.resize(static_cast<std::size_t>(n_classes));

  double sum_p = 0.0, sum_r = 0.0, sum_f1 = 0.0;
  for (const auto* rec : sorted) {
    if (rec->parse_failed) ++report.n_parse_failures;
    const PrfTriple prf = sample_prf(rec->predicted, rec->truth);
    sum_p += prf.precision;
    sum_r += prf.recall;
    sum_f1 += prf.f1;
    for (int c : rec->predicted) {
      if (c < 1 || c > n_classes) throw Error("predicted index out of class range");
      if (rec->truth.count(c)) {
        ++report.per_class[c - 1].tp;
      } else {
        ++report.per_class[c - 1].fp;
      }
    }
    for (int c : rec->truth) {
      if (c < 1 || c > n_classes) throw Error("truth index out of class range");
      if (!rec->predicted.count(c)) ++report.per_class[c - 1].fn;
    }
  }

  const double n = static_cast<double>(records.size());
  report.sample = {sum_p / n, sum_r / n, sum_f1 / n};

  long tp = 0, fp = 0, fn = 0;
  for (const auto& c : report.per_class) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  report.micro.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
  report.micro.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
  report.micro.f1 = f1_of(report.micro.precision, report.micro.recall);

  // Macro averages over classes with truth support >= 1.
  double macro_p = 0.0, macro_r = 0.0, macro_f1 = 0.0;
  long supported = 0;
  for (const auto& c : report.per_class) {
    if (c.tp + c.fn == 0) continue;  // class never appears in truth
    ++supported;
    const double cp = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
    const double cr = static_cast<double>(c.tp) / (c.tp + c.fn);
    macro_p += cp;
    macro_r += cr;
    macro_f1 += f1_of(cp, cr);
  }
  if (supported > 0) {
    report.macro = {macro_p / supported, macro_r / supported, macro_f1 / supported};
  }

  if (!multi_label) report.accuracy = top1_accuracy(records);
  return report;
}

double top1_accuracy(const std::vector<PredictionRecord>& records) {
  if (records.empty()) throw Error("top1_accuracy: no records");
  long correct = 0;
  for (const auto& rec : records) {
    if (rec.truth.size() != 1) {
      throw Error("top1_accuracy: record " + rec.patch_id + " has " +
                  std::to_string(rec.truth.size()) + " truth labels, expected 1");
    }
    if (rec.predicted.size() > 1) {
      throw Error("top1_accuracy: record " + rec.patch_id + " has multiple predictions");
    }
    if (rec.predicted == rec.truth) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

ClassMapping ClassMapping::from_csv(std::string_view csv,
                                    std::optional<std::string_view> expected_sha256) {
  if (expected_sha256) {
    const std::string actual = sha256_hex(csv);
    if (actual != *expected_sha256) {
      throw Error("class mapping checksum mismatch: expected " +
                  std::string(*expected_sha256) + ", got " + actual);
    }
  }
  auto rows = parse_csv(csv);
  if (rows.empty() || rows[0].size() != 4 || rows[0][0] != "from_index") {
    throw Error("class mapping CSV missing 'from_index,from_name,to_index,to_name' header");
  }
  ClassMapping mapping;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) throw Error("class mapping CSV row has wrong field count");
    const int from = std::stoi(row[0]);
    if (from != static_cast<int>(i)) {
      throw Error("class mapping CSV rows must be ordered by from_index");
    }
    const int to = row[2].empty() ? 0 : std::stoi(row[2]);
    mapping.targets_.push_back(to);
    mapping.n_to_ = std::max(mapping.n_to_, to);
  }
  return mapping;
}

const ClassMapping& ClassMapping::bigearthnet_43_to_19() {
  static const ClassMapping mapping = ClassMapping::from_csv(
      assets::get("bigearthnet43_to_19.csv"), kMapping43to19Sha256);
  return mapping;
}

std::set<int> ClassMapping::map(const std::set<int>& source) const {
  std::set<int> out;
  for (int s : source) {
    if (s < 1 || s > n_from()) {
      throw Error("class index " + std::to_string(s) + " outside [1, " +
                  std::to_string(n_from()) + "]");
    }
    const int t = targets_[s - 1];
    if (t != 0) out.insert(t);
  }
  return out;
}

}  // namespace specbench
