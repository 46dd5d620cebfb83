#include "growgraph/params_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "growgraph/errors.hpp"

namespace growgraph {

static_assert(std::endian::native == std::endian::little, "container IO assumes little-endian");

void write_container(std::ostream& out, const std::string& magic, const nlohmann::json& header) {
  if (magic.size() != 8) throw std::invalid_argument("container magic must be 8 bytes");
  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  out.write(magic.data(), 8);
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

ContainerHeader read_container_header(std::istream& in) {
  ContainerHeader h;
  h.magic.resize(8);
  std::uint64_t len = 0;
  if (!in.read(h.magic.data(), 8) || !in.read(reinterpret_cast<char*>(&len), sizeof(len)) ||
      len > (1u << 30)) {
    throw std::runtime_error("container: truncated or corrupt header");
  }
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
    throw std::runtime_error("container: truncated header");
  }
  h.header = nlohmann::json::parse(text);
  return h;
}

void write_doubles(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
}

void read_doubles(std::istream& in, Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      double v = 0.0;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw std::runtime_error("container: truncated payload");
      }
      m(r, c) = v;
    }
  }
}

void save_params(const std::filesystem::path& path, const ParamTensor& params,
                 const ActivationPlan& plan, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const nlohmann::json header = {{"L", params.layers()},
                                 {"K", params.taps()},
                                 {"dims", params.dims()},
                                 {"activation", to_string(plan.hidden)},
                                 {"identity_readout", plan.identity_readout},
                                 {"seed", seed}};
  write_container(out, kParamMagic, header);
  for (std::size_t l = 0; l < params.layers(); ++l) {
    for (std::size_t k = 0; k < params.taps(); ++k) write_doubles(out, params.tap(l, k));
  }
}

StoredParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto h = read_container_header(in);
  if (h.magic != kParamMagic) throw std::runtime_error(path.string() + ": not a parameter file");
  const auto& j = h.header;
  StoredParams s;
  s.params = ParamTensor(j.at("K").get<std::size_t>(), j.at("dims").get<std::vector<std::size_t>>());
  if (s.params.layers() != j.at("L").get<std::size_t>()) {
    throw std::runtime_error(path.string() + ": L disagrees with dims");
  }
  s.plan.hidden = activation_from_string(j.at("activation").get<std::string>());
  s.plan.identity_readout = j.at("identity_readout").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  for (std::size_t l = 0; l < s.params.layers(); ++l) {
    for (std::size_t k = 0; k < s.params.taps(); ++k) read_doubles(in, s.params.tap(l, k));
  }
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void export_params_csv(std::ostream& out, const ParamTensor& params) {
  out << "layer,tap,row,col,value\n";
  for (std::size_t l = 0; l < params.layers(); ++l) {
    for (std::size_t k = 0; k < params.taps(); ++k) {
      const Matrix& h = params.tap(l, k);
      for (Eigen::Index r = 0; r < h.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.cols(); ++c) {
          out << (l + 1) << ',' << k << ',' << r << ',' << c << ',' << format_double(h(r, c)) << '\n';
        }
      }
    }
  }
}

}  // namespace growgraph
