#pragma once

#include <span>
#include <string>
#include <vector>

#include "specbench/products.hpp"

namespace specbench {

enum class Dataset {
  BigEarthNet43,
  BigEarthNet19,
  EuroSat10,
};

std::string_view dataset_name(Dataset dataset);
std::optional<Dataset> dataset_from_name(std::string_view name);

/// Classification task: class catalog plus label arity.
///
/// `class_listing` holds each option line exactly as it appears in the prompt
/// (including any trailing whitespace); `class_names` holds the trimmed names
/// used for label matching.
struct TaskSpec {
  Dataset dataset;
  bool multi_label;
  std::vector<std::string> class_listing;
  std::vector<std::string> class_names;

  int n_classes() const { return static_cast<int>(class_names.size()); }
};

const TaskSpec& task_spec(Dataset dataset);

enum class Modality {
  RgbOnly,
  MultiSpectral,
};

std::string_view modality_name(Modality modality);
std::optional<Modality> modality_from_name(std::string_view name);

struct Prompt {
  std::string text;
  std::vector<PseudoImage> attachments;
  Modality modality = Modality::RgbOnly;
};

/// The numbered 12-line Sentinel-2 band description block used by
/// multi-spectral prompts.
std::string band_glossary();

/// "(1)Name..." option block for a task, one line per class.
std::string render_class_block(const TaskSpec& task);

/// Prompt text for a task/modality and an ordered product selection.
/// RgbOnly ignores the product descriptions; MultiSpectral numbers each
/// product ("The first image is ...") in selection order.
std::string prompt_text(const TaskSpec& task, Modality modality,
                        std::span<const ProductId> products);

/// Full prompt with attachments. RgbOnly requires exactly one image; the
/// canonical MultiSpectral prompt carries the six default products, while
/// reduced selections (input ablations) are allowed and renumber the
/// image descriptions accordingly.
Prompt build_prompt(const TaskSpec& task, Modality modality,
                    std::vector<PseudoImage> images);

}  // namespace specbench
