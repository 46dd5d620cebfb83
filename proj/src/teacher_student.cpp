#include "growgraph/teacher_student.hpp"

#include <memory>

#include "growgraph/errors.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/graph.hpp"

namespace growgraph {

SignalFamily signal_family_from_string(const std::string& name) {
  if (name == "fourier") return SignalFamily::Fourier;
  if (name == "identity") return SignalFamily::Identity;
  if (name == "sine") return SignalFamily::Sine;
  throw ConfigError("unknown signal family '" + name + "'");
}

std::string to_string(SignalFamily family) {
  switch (family) {
    case SignalFamily::Identity:
      return "identity";
    case SignalFamily::Sine:
      return "sine";
    case SignalFamily::Fourier:
      break;
  }
  return "fourier";
}

std::vector<GraphonSignal> draw_signals(const SignalSpec& spec, std::size_t features, Rng& rng) {
  std::vector<GraphonSignal> out;
  out.reserve(features);
  for (std::size_t f = 0; f < features; ++f) {
    switch (spec.family) {
      case SignalFamily::Identity:
        out.push_back(GraphonSignal::identity());
        break;
      case SignalFamily::Sine:
        out.push_back(GraphonSignal::sine());
        break;
      case SignalFamily::Fourier: {
        std::vector<double> amps(std::max<std::size_t>(spec.modes, 1));
        for (auto& a : amps) a = uniform(rng, -1.0, 1.0);
        out.push_back(GraphonSignal::fourier(std::move(amps)));
        break;
      }
    }
  }
  return out;
}

namespace {

Matrix signal_matrix(const std::vector<GraphonSignal>& signals, std::size_t n, double noise_std,
                     Rng& noise_rng) {
  Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(signals.size()));
  for (std::size_t f = 0; f < signals.size(); ++f) x.col(static_cast<Eigen::Index>(f)) = signals[f].sample(n);
  if (noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += noise(noise_rng);
  }
  return x;
}

std::shared_ptr<const Matrix> graph_gso(const Graphon& graphon, std::size_t n, std::uint64_t seed) {
  return std::make_shared<const Matrix>(sample_graph(graphon, n, seed).gso());
}

// Stream identifiers under a parent seed.
constexpr std::uint64_t kSignalStream = 1;
constexpr std::uint64_t kGraphStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

}  // namespace

Dataset teacher_student_dataset(const Graphon& graphon, const ParamTensor& teacher,
                                const ActivationPlan& plan, std::size_t n, std::size_t m_samples,
                                const SignalSpec& signal, std::uint64_t seed, GraphDraw draw) {
  if (n < 1) throw std::invalid_argument("teacher_student_dataset: n must be >= 1");
  Dataset d;
  d.input_features = teacher.dims().front();
  d.output_features = teacher.dims().back();
  d.samples.reserve(m_samples);
  std::shared_ptr<const Matrix> shared;
  if (draw == GraphDraw::Shared) shared = graph_gso(graphon, n, derive_seed(seed, kGraphStream));
  for (std::size_t j = 0; j < m_samples; ++j) {
    Rng signal_rng = make_rng(derive_seed(derive_seed(seed, kSignalStream), j));
    Rng noise_rng = make_rng(derive_seed(derive_seed(seed, kNoiseStream), j));
    const auto signals = draw_signals(signal, d.input_features, signal_rng);
    Sample s;
    s.gso = shared ? shared
                   : graph_gso(graphon, n, derive_seed(derive_seed(seed, kGraphStream), j + 1));
    s.x = signal_matrix(signals, n, signal.noise_std, noise_rng);
    s.y = gnn_output(teacher, *s.gso, s.x, plan);
    d.samples.push_back(std::move(s));
  }
  return d;
}

TeacherStudentTask::TeacherStudentTask(Graphon graphon, ParamTensor teacher, ActivationPlan plan,
                                       std::size_t samples, SignalSpec signal, std::uint64_t seed)
    : graphon_(std::move(graphon)),
      teacher_(std::move(teacher)),
      plan_(plan),
      samples_(samples),
      signal_(signal),
      seed_(seed) {}

Dataset TeacherStudentTask::epoch_dataset(std::size_t n, std::size_t epoch) const {
  Dataset d;
  d.input_features = input_features();
  d.output_features = output_features();
  d.samples.reserve(samples_);
  const auto gso = graph_gso(graphon_, n, derive_seed(derive_seed(seed_, kGraphStream), epoch));
  for (std::size_t j = 0; j < samples_; ++j) {
    Rng signal_rng = make_rng(derive_seed(derive_seed(seed_, kSignalStream), j));
    Rng noise_rng = make_rng(derive_seed(derive_seed(derive_seed(seed_, kNoiseStream), epoch), j));
    const auto signals = draw_signals(signal_, d.input_features, signal_rng);
    Sample s;
    s.gso = gso;
    s.x = signal_matrix(signals, n, signal_.noise_std, noise_rng);
    s.y = gnn_output(teacher_, *gso, s.x, plan_);
    d.samples.push_back(std::move(s));
  }
  return d;
}

Sample TeacherStudentTask::probe(std::size_t n, std::uint64_t trial_seed) const {
  Rng signal_rng = make_rng(derive_seed(trial_seed, kSignalStream));
  const auto signals = draw_signals(signal_, input_features(), signal_rng);
  Rng no_noise = make_rng(0);
  Sample s;
  s.gso = graph_gso(graphon_, n, derive_seed(derive_seed(trial_seed, kGraphStream), n));
  s.x = signal_matrix(signals, n, 0.0, no_noise);
  s.y = gnn_output(teacher_, *s.gso, s.x, plan_);
  return s;
}

}  // namespace growgraph
