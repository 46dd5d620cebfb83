#include "growgraph/dataset_io.hpp"

#include <fstream>
#include <memory>

#include "growgraph/params_io.hpp"

namespace growgraph {

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  data.validate();
  const std::size_t nodes = data.samples.empty() ? 0 : static_cast<std::size_t>(data.samples[0].x.rows());
  for (const auto& s : data.samples) {
    if (static_cast<std::size_t>(s.x.rows()) != nodes) {
      throw std::invalid_argument("save_dataset: samples must share one node count");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_container(out, kDatasetMagic,
                  {{"count", data.size()},
                   {"nodes", nodes},
                   {"input_features", data.input_features},
                   {"output_features", data.output_features}});
  for (const auto& s : data.samples) {
    write_doubles(out, *s.gso);
    write_doubles(out, s.x);
    write_doubles(out, s.y);
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto h = read_container_header(in);
  if (h.magic != kDatasetMagic) throw std::runtime_error(path.string() + ": not a dataset file");
  Dataset d;
  const auto count = h.header.at("count").get<std::size_t>();
  const auto nodes = static_cast<Eigen::Index>(h.header.at("nodes").get<std::size_t>());
  d.input_features = h.header.at("input_features").get<std::size_t>();
  d.output_features = h.header.at("output_features").get<std::size_t>();
  d.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Matrix gso(nodes, nodes);
    read_doubles(in, gso);
    Sample s;
    s.gso = std::make_shared<const Matrix>(std::move(gso));
    s.x.resize(nodes, static_cast<Eigen::Index>(d.input_features));
    read_doubles(in, s.x);
    s.y.resize(nodes, static_cast<Eigen::Index>(d.output_features));
    read_doubles(in, s.y);
    d.samples.push_back(std::move(s));
  }
  return d;
}

}  // namespace growgraph
