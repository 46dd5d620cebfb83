#include "growgraph/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "growgraph/errors.hpp"
#include "growgraph/strict_json.hpp"

namespace growgraph {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
  }
}

double grid_eval(const Matrix& t, double u, double v) {
  const auto m = static_cast<std::size_t>(t.rows());
  const double scale = static_cast<double>(m - 1);
  const double x = u * scale;
  const double y = v * scale;
  const auto i = std::min(static_cast<std::size_t>(x), m - 2);
  const auto j = std::min(static_cast<std::size_t>(y), m - 2);
  const double s = x - static_cast<double>(i);
  const double r = y - static_cast<double>(j);
  return (1 - s) * (1 - r) * t(i, j) + s * (1 - r) * t(i + 1, j) + (1 - s) * r * t(i, j + 1) +
         s * r * t(i + 1, j + 1);
}

std::size_t block_of(double u, std::size_t n) {
  const auto b = static_cast<std::size_t>(u * static_cast<double>(n));
  return std::min(b, n - 1);
}

}  // namespace

Graphon Graphon::constant(double p) {
  check_unit(p, "constant graphon value");
  return Graphon(Constant{p});
}

Graphon Graphon::product() { return Graphon(Product{}); }

Graphon Graphon::additive() { return Graphon(Additive{}); }

Graphon Graphon::exp_distance(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("exp_distance: beta must be finite and non-negative");
  }
  return Graphon(ExpDistance{beta});
}

Graphon Graphon::grid(Matrix table) {
  if (table.rows() != table.cols() || table.rows() < 2) {
    throw std::invalid_argument("grid graphon: table must be square with at least 2 rows");
  }
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      if (!(table(i, j) >= 0.0 && table(i, j) <= 1.0)) {
        throw std::invalid_argument("grid graphon: entries must lie in [0,1]");
      }
      if (table(i, j) != table(j, i)) {
        throw std::invalid_argument("grid graphon: table must be symmetric");
      }
    }
  }
  return Graphon(Grid{std::move(table)});
}

double Graphon::operator()(double u, double v) const {
  return std::visit(overloaded{
                        [](const Constant& c) { return c.p; },
                        [&](const Product&) { return u * v; },
                        [&](const Additive&) { return 0.5 * (u + v); },
                        [&](const ExpDistance& e) { return std::exp(-e.beta * std::abs(u - v)); },
                        [&](const Grid& g) { return grid_eval(g.table, std::min(u, v), std::max(u, v)); },
                    },
                    family_);
}

double Graphon::lipschitz_constant() const {
  return std::visit(overloaded{
                        [](const Constant&) { return 0.0; },
                        [](const Product&) { return 1.0; },
                        [](const Additive&) { return 0.5; },
                        [](const ExpDistance& e) { return e.beta; },
                        [](const Grid& g) {
                          const Matrix& t = g.table;
                          double step = 0.0;
                          for (Eigen::Index i = 0; i + 1 < t.rows(); ++i) {
                            for (Eigen::Index j = 0; j < t.cols(); ++j) {
                              step = std::max(step, std::abs(t(i + 1, j) - t(i, j)));
                            }
                          }
                          return step * static_cast<double>(t.rows() - 1);
                        },
                    },
                    family_);
}

std::string Graphon::family_name() const {
  return std::visit(overloaded{
                        [](const Constant&) { return std::string("constant"); },
                        [](const Product&) { return std::string("product"); },
                        [](const Additive&) { return std::string("additive"); },
                        [](const ExpDistance&) { return std::string("exp_distance"); },
                        [](const Grid&) { return std::string("grid"); },
                    },
                    family_);
}

nlohmann::json Graphon::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  std::visit(overloaded{
                 [&](const Constant& c) { params["p"] = c.p; },
                 [](const Product&) {},
                 [](const Additive&) {},
                 [&](const ExpDistance& e) { params["beta"] = e.beta; },
                 [&](const Grid& g) {
                   auto rows = nlohmann::json::array();
                   for (Eigen::Index i = 0; i < g.table.rows(); ++i) {
                     auto row = nlohmann::json::array();
                     for (Eigen::Index j = 0; j < g.table.cols(); ++j) row.push_back(g.table(i, j));
                     rows.push_back(std::move(row));
                   }
                   params["table"] = std::move(rows);
                 },
             },
             family_);
  return {{"family", family_name()}, {"params", params}};
}

Graphon Graphon::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  strict::require_keys(j, {"family", "params"}, "graphon");
  if (!j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("graphon: missing string key 'family'");
  }
  const auto family = j.at("family").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  const std::string where = "graphon." + family + ".params";
  try {
    if (family == "constant") {
      strict::require_keys(params, {"p"}, where);
      return constant(strict::number(params, "p", where));
    }
    if (family == "product") {
      strict::require_keys(params, {}, where);
      return product();
    }
    if (family == "additive") {
      strict::require_keys(params, {}, where);
      return additive();
    }
    if (family == "exp_distance") {
      strict::require_keys(params, {"beta"}, where);
      return exp_distance(strict::number(params, "beta", where));
    }
    if (family == "grid") {
      strict::require_keys(params, {"csv", "table"}, where);
      if (params.contains("csv") == params.contains("table")) {
        throw ConfigError(where + ": exactly one of 'csv' or 'table' is required");
      }
      if (params.contains("csv")) {
        std::filesystem::path p = params.at("csv").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return grid(load_grid_csv(p));
      }
      const auto& rows = params.at("table");
      const auto m = static_cast<Eigen::Index>(rows.size());
      Matrix t(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (rows[i].size() != rows.size()) throw ConfigError(where + ": table must be square");
        for (Eigen::Index k = 0; k < m; ++k) t(i, k) = rows[i][k].get<double>();
      }
      return grid(std::move(t));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError("graphon: unknown family '" + family + "'");
}

double evaluate(const Graphon& graphon, double u, double v) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) {
    throw std::domain_error("graphon arguments must lie in [0,1]");
  }
  return graphon(u, v);
}

Matrix load_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid csv: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("grid csv: bad value '" + cell + "' in " + path.string());
      }
    }
    rows.push_back(std::move(row));
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Matrix t(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != m) {
      throw ConfigError("grid csv must be square: " + path.string());
    }
    for (Eigen::Index j = 0; j < m; ++j) t(i, j) = rows[i][j];
  }
  return t;
}

GraphonSignal GraphonSignal::fourier(std::vector<double> amplitudes) {
  if (amplitudes.empty()) throw std::invalid_argument("fourier signal needs at least one mode");
  return GraphonSignal(Fourier{std::move(amplitudes)});
}

GraphonSignal GraphonSignal::step(Vector values) {
  if (values.size() == 0) throw std::invalid_argument("step signal needs at least one block");
  return GraphonSignal(Step{std::move(values)});
}

double GraphonSignal::operator()(double u) const {
  using std::numbers::pi;
  return std::visit(overloaded{
                        [](const Constant& c) { return c.value; },
                        [&](const Identity&) { return u; },
                        [&](const Sine&) { return std::sin(pi * u) / pi; },
                        [&](const Fourier& f) {
                          const double modes = static_cast<double>(f.amplitudes.size());
                          double acc = 0.0;
                          for (std::size_t m = 0; m < f.amplitudes.size(); ++m) {
                            const double k = static_cast<double>(m + 1);
                            acc += f.amplitudes[m] * std::sin(pi * k * u) / (pi * k * modes);
                          }
                          return acc;
                        },
                        [&](const Step& s) {
                          return s.values[static_cast<Eigen::Index>(
                              block_of(u, static_cast<std::size_t>(s.values.size())))];
                        },
                    },
                    family_);
}

double GraphonSignal::lipschitz_constant() const {
  return std::visit(overloaded{
                        [](const Constant&) { return 0.0; },
                        [](const Identity&) { return 1.0; },
                        [](const Sine&) { return 1.0; },
                        [](const Fourier& f) {
                          double s = 0.0;
                          for (double a : f.amplitudes) s += std::abs(a);
                          return s / static_cast<double>(f.amplitudes.size());
                        },
                        // Discontinuous unless constant.
                        [](const Step& s) {
                          return (s.values.maxCoeff() == s.values.minCoeff())
                                     ? 0.0
                                     : std::numeric_limits<double>::infinity();
                        },
                    },
                    family_);
}

std::size_t GraphonSignal::blocks() const noexcept {
  if (const auto* s = std::get_if<Step>(&family_)) return static_cast<std::size_t>(s->values.size());
  return 0;
}

Vector GraphonSignal::sample(std::size_t n) const {
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x[static_cast<Eigen::Index>(i)] = (*this)(static_cast<double>(i) / static_cast<double>(n));
  }
  return x;
}

GraphonSignal signal_from_name(const std::string& name) {
  if (name == "identity") return GraphonSignal::identity();
  if (name == "sine") return GraphonSignal::sine();
  if (name.rfind("constant:", 0) == 0) {
    try {
      return GraphonSignal::constant(std::stod(name.substr(9)));
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("unknown signal '" + name + "'");
}

}  // namespace growgraph
