#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "growgraph/linalg.hpp"
#include "growgraph/params.hpp"

namespace growgraph {

// Binary container shared by parameter and dataset files:
//   8 bytes   ASCII magic
//   8 bytes   little-endian uint64 header length h
//   h bytes   UTF-8 JSON header
//   rest      little-endian IEEE-754 doubles, row-major per matrix

struct ContainerHeader {
  std::string magic;
  nlohmann::json header;
};

void write_container(std::ostream& out, const std::string& magic, const nlohmann::json& header);
ContainerHeader read_container_header(std::istream& in);
void write_doubles(std::ostream& out, const Matrix& m);
void read_doubles(std::istream& in, Matrix& m);

inline constexpr const char* kParamMagic = "GGPARAM1";

struct StoredParams {
  ParamTensor params;
  ActivationPlan plan;
  std::uint64_t seed = 0;
};

/// Header {"L", "K", "dims", "activation", "identity_readout", "seed"} then every H_lk in
/// (l, k) order.
void save_params(const std::filesystem::path& path, const ParamTensor& params,
                 const ActivationPlan& plan, std::uint64_t seed);
StoredParams load_params(const std::filesystem::path& path);

/// `layer,tap,row,col,value` with 1-based layer and 0-based tap.
void export_params_csv(std::ostream& out, const ParamTensor& params);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace growgraph
