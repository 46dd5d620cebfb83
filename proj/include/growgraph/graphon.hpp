#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "growgraph/linalg.hpp"

namespace growgraph {

/// A symmetric kernel W : [0,1]^2 -> [0,1] from one of a few Lipschitz families.
///
/// The grid family stores an m x m table of node values at u = i/(m-1) and evaluates by
/// bilinear interpolation, which keeps it Lipschitz with constant (m-1) * max adjacent step.
class Graphon {
 public:
  struct Constant {
    double p;
  };
  struct Product {};
  struct Additive {};
  struct ExpDistance {
    double beta;
  };
  struct Grid {
    Matrix table;
  };
  using Family = std::variant<Constant, Product, Additive, ExpDistance, Grid>;

  static Graphon constant(double p);
  static Graphon product();
  static Graphon additive();
  static Graphon exp_distance(double beta);
  /// Table must be square (m >= 2), symmetric and valued in [0,1].
  static Graphon grid(Matrix table);

  /// No domain checks; see evaluate() for the checked entry point.
  double operator()(double u, double v) const;

  /// A such that |W(u,v) - W(u',v')| <= A (|u-u'| + |v-v'|).
  double lipschitz_constant() const;

  /// "constant", "product", "additive", "exp_distance" or "grid".
  std::string family_name() const;
  const Family& family() const noexcept { return family_; }

  /// {"family": ..., "params": {...}}. Grid tables are written inline as "table".
  nlohmann::json to_json() const;
  /// Accepts the same shape; a grid may instead give {"csv": path}, resolved against base_dir.
  static Graphon from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

 private:
  explicit Graphon(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// W(u,v) with u, v checked to lie in [0,1]; throws std::domain_error otherwise.
double evaluate(const Graphon& graphon, double u, double v);

/// Row-major comma-separated table, no header.
Matrix load_grid_csv(const std::filesystem::path& path);

/// A function X : [0,1] -> R, either closed-form or piecewise constant on I_i = [(i-1)/n, i/n).
class GraphonSignal {
 public:
  struct Constant {
    double value;
  };
  struct Identity {};
  /// sin(pi u) / pi.
  struct Sine {};
  /// sum_m a_m sin(pi m u) / (pi m M) with M = number of modes; normalized Lipschitz if |a_m| <= 1.
  struct Fourier {
    std::vector<double> amplitudes;
  };
  struct Step {
    Vector values;
  };
  using Family = std::variant<Constant, Identity, Sine, Fourier, Step>;

  static GraphonSignal constant(double value) { return GraphonSignal(Constant{value}); }
  static GraphonSignal identity() { return GraphonSignal(Identity{}); }
  static GraphonSignal sine() { return GraphonSignal(Sine{}); }
  static GraphonSignal fourier(std::vector<double> amplitudes);
  static GraphonSignal step(Vector values);

  double operator()(double u) const;
  double lipschitz_constant() const;
  bool is_step() const noexcept { return std::holds_alternative<Step>(family_); }
  /// Number of blocks for step signals, 0 otherwise.
  std::size_t blocks() const noexcept;
  const Family& family() const noexcept { return family_; }

  /// Values X(u_i) at the grid points u_i = (i-1)/n.
  Vector sample(std::size_t n) const;

 private:
  explicit GraphonSignal(Family f) : family_(std::move(f)) {}
  Family family_;
};

/// Parses "constant:<c>", "identity", "sine" into a closed-form signal.
GraphonSignal signal_from_name(const std::string& name);

}  // namespace growgraph
