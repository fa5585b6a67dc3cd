#pragma once

#include <string_view>
#include <vector>

namespace specbench::assets {

/// Returns the embedded data file with the given relative name
/// (e.g. "templates/rgb_multilabel.txt"). Throws Error if unknown.
std::string_view get(std::string_view name);

/// Names of all embedded data files.
std::vector<std::string_view> names();

}  // namespace specbench::assets
