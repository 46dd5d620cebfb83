#pragma once

#include <filesystem>

#include "growgraph/dataset.hpp"

namespace growgraph {

inline constexpr const char* kDatasetMagic = "GGDATAS1";

/// Parameter-file container layout with header {"count", "nodes", "input_features",
/// "output_features"}; per sample the GSO, x and y follow in that order. All samples must
/// share one node count.
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace growgraph
