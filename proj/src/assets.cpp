#include "specbench/assets.hpp"

#include <string>
#include <utility>

#include "specbench/error.hpp"

#include "asset_table.inc"

namespace specbench::assets {

std::string_view get(std::string_view name) {
  for (const auto& [key, value] : kAssetTable) {
    if (key == name) return value;
  }
  throw Error("unknown embedded asset: " + std::string(name));
}

std::vector<std::string_view> names() {
  std::vector<std::string_view> out;
  for (const auto& [key, value] : kAssetTable) out.push_back(key);
  return out;
}

}  // namespace specbench::assets
