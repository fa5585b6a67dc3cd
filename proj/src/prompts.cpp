#include "specbench/prompts.hpp"

#include <map>

#include "specbench/assets.hpp"
#include "specbench/error.hpp"

namespace specbench {

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.pop_back();
  }
  return s;
}

TaskSpec load_task(Dataset dataset, bool multi_label, std::string_view class_asset) {
  TaskSpec task;
  task.dataset = dataset;
  task.multi_label = multi_label;
  task.class_listing = split_lines(assets::get(class_asset));
  for (const auto& line : task.class_listing) {
    task.class_names.push_back(rtrim(line));
  }
  return task;
}

void replace_all(std::string& text, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
}

// Per-product description snippets, parsed once from the sectioned data file:
//   [ProductName]
//   <verbatim lines, {{ORDINAL}} marks the image position word>
const std::string& product_description_template(ProductId id) {
  static std::map<std::string, std::string, std::less<>> sections = [] {
    std::map<std::string, std::string, std::less<>> out;
    std::string current;
    for (const auto& line : split_lines(assets::get("templates/image_descriptions.txt"))) {
      if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
        current = line.substr(1, line.size() - 2);
        continue;
      }
      if (current.empty()) continue;
      auto& body = out[current];
      if (!body.empty()) body += '\n';
      body += line;
    }
    return out;
  }();
  auto it = sections.find(product_name(id));
  if (it == sections.end()) {
    throw Error("no prompt description for product " + std::string(product_name(id)));
  }
  return it->second;
}

constexpr std::array<std::string_view, 12> kOrdinals = {
    "first", "second", "third",   "fourth",   "fifth",    "sixth",
    "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth",
};

std::string image_descriptions(std::span<const ProductId> products) {
  if (products.size() > kOrdinals.size()) {
    throw Error("too many products for a prompt");
  }
  std::string out;
  for (std::size_t i = 0; i < products.size(); ++i) {
    std::string desc = product_description_template(products[i]);
    replace_all(desc, "{{ORDINAL}}", kOrdinals[i]);
    if (i) out += '\n';
    out += desc;
  }
  return out;
}

std::string_view template_asset(Modality modality, bool multi_label) {
  if (modality == Modality::MultiSpectral) {
    return multi_label ? "templates/multispectral_multilabel.txt"
                       : "templates/multispectral_singlelabel.txt";
  }
  return multi_label ? "templates/rgb_multilabel.txt"
                     : "templates/rgb_singlelabel.txt";
}

}  // namespace

std::string_view dataset_name(Dataset dataset) {
  switch (dataset) {
    case Dataset::BigEarthNet43: return "bigearthnet43";
    case Dataset::BigEarthNet19: return "bigearthnet19";
    case Dataset::EuroSat10: return "eurosat10";
  }
  throw Error("invalid Dataset");
}

std::optional<Dataset> dataset_from_name(std::string_view name) {
  if (name == "bigearthnet43") return Dataset::BigEarthNet43;
  if (name == "bigearthnet19") return Dataset::BigEarthNet19;
  if (name == "eurosat10") return Dataset::EuroSat10;
  return std::nullopt;
}

const TaskSpec& task_spec(Dataset dataset) {
  static const TaskSpec ben43 = load_task(Dataset::BigEarthNet43, true, "classes/bigearthnet43.txt");
  static const TaskSpec ben19 = load_task(Dataset::BigEarthNet19, true, "classes/bigearthnet19.txt");
  static const TaskSpec eurosat = load_task(Dataset::EuroSat10, false, "classes/eurosat10.txt");
  switch (dataset) {
    case Dataset::BigEarthNet43: return ben43;
    case Dataset::BigEarthNet19: return ben19;
    case Dataset::EuroSat10: return eurosat;
  }
  throw Error("invalid Dataset");
}

std::string_view modality_name(Modality modality) {
  return modality == Modality::RgbOnly ? "rgb" : "multispectral";
}

std::optional<Modality> modality_from_name(std::string_view name) {
  if (name == "rgb") return Modality::RgbOnly;
  if (name == "multispectral" || name == "ms") return Modality::MultiSpectral;
  return std::nullopt;
}

std::string band_glossary() {
  std::string text(assets::get("templates/band_glossary.txt"));
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::string render_class_block(const TaskSpec& task) {
  std::string out;
  for (std::size_t i = 0; i < task.class_listing.size(); ++i) {
    if (i) out += '\n';
    out += "(" + std::to_string(i + 1) + ")" + task.class_listing[i];
  }
  return out;
}

std::string prompt_text(const TaskSpec& task, Modality modality,
                        std::span<const ProductId> products) {
  std::string text(assets::get(template_asset(modality, task.multi_label)));

  if (modality == Modality::MultiSpectral) {
    if (products.empty()) throw Error("multi-spectral prompt needs at least one product");
    replace_all(text, "{{IMAGE_COUNT}}", std::to_string(products.size()));
    replace_all(text, "{{BAND_GLOSSARY}}", band_glossary());
    replace_all(text, "{{IMAGE_DESCRIPTIONS}}", image_descriptions(products));
  }
  replace_all(text, "{{RANGE}}", "1 to " + std::to_string(task.n_classes()));
  replace_all(text, "{{CLASS_BLOCK}}", render_class_block(task));

  if (text.find("{{") != std::string::npos) {
    throw Error("unresolved placeholder in prompt template");
  }
  return text;
}

Prompt build_prompt(const TaskSpec& task, Modality modality,
                    std::vector<PseudoImage> images) {
  if (modality == Modality::RgbOnly && images.size() != 1) {
    throw Error("rgb prompt expects exactly 1 attachment, got " +
                std::to_string(images.size()));
  }
  if (modality == Modality::MultiSpectral && images.empty()) {
    throw Error("multi-spectral prompt expects at least 1 attachment");
  }
  std::vector<ProductId> products;
  products.reserve(images.size());
  for (const auto& img : images) products.push_back(img.product);

  Prompt prompt;
  prompt.modality = modality;
  prompt.text = prompt_text(task, modality, products);
  prompt.attachments = std::move(images);
  return prompt;
}

}  // namespace specbench
