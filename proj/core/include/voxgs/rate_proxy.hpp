#pragma once

#include "voxgs/matrix.hpp"
#include "voxgs/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace voxgs {

// Probabilities are floored here, so no symbol costs more than 40 bits.
inline constexpr double kProbabilityFloor = 0x1p-40;
inline constexpr double kMaxSymbolBits = 40.0;
// Scale used for constant streams, where the sample deviation is zero.
inline constexpr double kMinLaplaceScale = 1e-3;

struct LaplaceModel {
  double mu = 0.0;
  double b = 1.0;      // scale
  double sigma = 0.0;  // sample standard deviation the scale was derived from
};

// Moment fit: mu is the sample mean, sigma the population deviation and
// b = sigma / sqrt(2), floored at kMinLaplaceScale. Empty input throws.
LaplaceModel fit_laplace(std::span<const double> values);
LaplaceModel fit_laplace(std::span<const std::int32_t> values);

double laplace_cdf(const LaplaceModel& model, double t);

// Mass of [x - 0.5, x + 0.5]. The unclamped form is exposed for the
// normalization checks; interval_prob applies kProbabilityFloor.
double interval_prob_unclamped(const LaplaceModel& model, double x);
double interval_prob(const LaplaceModel& model, double x);

// -log2 q(x) together with its partial derivatives. x is treated as a
// continuous variable. Where the floor binds, all partials are zero.
struct SymbolCost {
  double bits = 0.0;
  double d_x = 0.0;
  double d_mu = 0.0;
  double d_b = 0.0;
};

SymbolCost symbol_cost(double x, double mu, double b);

double estimate_bits(const LaplaceModel& model, std::span<const std::int32_t> values);

// Estimated bits per anchor summed over the O, A and S groups, each group
// under its own freshly fitted model. Empty groups contribute nothing.
double rate_loss(
  const Matrix<std::int32_t>& offsets, const Matrix<std::int32_t>& features,
  const Matrix<std::int32_t>& scalings);

struct RateLossGradient {
  double value = 0.0;
  std::array<double, 3> group_values{};
  std::array<LaplaceModel, 3> models{};
  // d(rate_loss)/d(value), one matrix per group, same shapes as the input.
  std::array<Matrix<double>, 3> grad;
};

// rate_loss on real-valued symbols with gradients. When `detach_fit` is set
// the fitted (mu, b) are treated as constants; otherwise the gradient
// flows through the mean and deviation of each group.
RateLossGradient rate_loss_with_grad(
  const std::array<const Matrix<double>*, 3>& groups, bool detach_fit);

struct CalibrationPoint {
  double estimated_bits = 0.0;
  double actual_bits = 0.0;
};

struct CalibrationResult {
  double alpha = 0.0;  // total actual / total estimated
  std::optional<double> correlation;  // unset when Pearson r is undefined
  std::vector<CalibrationPoint> points;
};

// One corpus sample is a set of channels; each channel gets its own
// Laplace fit and its own RLC stream, and a sample's bits are summed.
using CalibrationSample = std::vector<std::vector<std::int32_t>>;

CalibrationPoint measure_sample(const CalibrationSample& sample);

// Throws InvalidArgument for an empty corpus or an empty channel.
CalibrationResult calibrate_alpha(std::span<const CalibrationSample> corpus);
CalibrationResult calibrate_alpha(std::span<const std::vector<std::int32_t>> sequences);
CalibrationResult calibrate_points(std::span<const CalibrationPoint> points);

std::optional<double> pearson(std::span<const CalibrationPoint> points);

// Bit allocation of one container plus the proxy diagnostics for its
// attribute groups.
struct RateReport {
  struct Component {
    std::string name;  // P, O, A, S, MLP
    std::uint64_t bytes = 0;
    double percent = 0.0;
    std::optional<double> estimated_bits;  // O, A, S only
  };

  std::array<Component, 5> components;
  std::uint64_t header_bytes = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t anchor_count = 0;
  double alpha = 0.0;
  std::optional<double> correlation;

  std::string to_text() const;
  std::string to_kv() const;
};

}  // namespace voxgs
