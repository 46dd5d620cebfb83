#pragma once

#include <cstdint>
#include <string>

#include "growgraph/graphon.hpp"
#include "growgraph/params.hpp"
#include "growgraph/random.hpp"
#include "growgraph/task.hpp"

namespace growgraph {

enum class SignalFamily {
  Fourier,   ///< random normalized-Lipschitz sine series (amplitudes uniform in [-1,1])
  Identity,  ///< X(u) = u
  Sine,      ///< X(u) = sin(pi u) / pi
};

SignalFamily signal_family_from_string(const std::string& name);
std::string to_string(SignalFamily family);

struct SignalSpec {
  SignalFamily family = SignalFamily::Fourier;
  std::size_t modes = 4;     ///< Fourier only
  double noise_std = 0.0;    ///< additive Gaussian noise on the sampled node values
};

/// Draws one graphon signal per input feature.
std::vector<GraphonSignal> draw_signals(const SignalSpec& spec, std::size_t features, Rng& rng);

enum class GraphDraw {
  PerSample,  ///< a fresh stochastic graph for every sample
  Shared,     ///< one graph for the whole dataset
};

/// Labeled pairs from a fixed teacher network: per sample a stochastic graph S_n, inputs
/// x = X(u_i) (+ noise) and targets y = Phi(x; teacher, S_n).
Dataset teacher_student_dataset(const Graphon& graphon, const ParamTensor& teacher,
                                const ActivationPlan& plan, std::size_t n, std::size_t m_samples,
                                const SignalSpec& signal, std::uint64_t seed,
                                GraphDraw draw = GraphDraw::PerSample);

/// Teacher-student task on a graphon. The signals X^j are fixed for the lifetime of the task;
/// each epoch samples a single new graph S_n shared by all samples.
class TeacherStudentTask final : public Task {
 public:
  TeacherStudentTask(Graphon graphon, ParamTensor teacher, ActivationPlan plan, std::size_t samples,
                     SignalSpec signal, std::uint64_t seed);

  std::size_t input_features() const override { return teacher_.dims().front(); }
  std::size_t output_features() const override { return teacher_.dims().back(); }
  Dataset epoch_dataset(std::size_t n, std::size_t epoch) const override;
  bool supports_probe() const override { return true; }
  Sample probe(std::size_t n, std::uint64_t trial_seed) const override;

  const ParamTensor& teacher() const noexcept { return teacher_; }
  const Graphon& graphon() const noexcept { return graphon_; }

 private:
  Graphon graphon_;
  ParamTensor teacher_;
  ActivationPlan plan_;
  std::size_t samples_;
  SignalSpec signal_;
  std::uint64_t seed_;
};

}  // namespace growgraph
