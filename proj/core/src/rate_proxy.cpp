#include "voxgs/rate_proxy.hpp"

#include "voxgs/error.hpp"
#include "voxgs/rlc.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace voxgs {

namespace {

  constexpr double kLn2 = std::numbers::ln2;

  template<typename T>
  LaplaceModel fit_impl(std::span<const T> values)
  {
    if (values.empty())
      throw InvalidArgument("fit_laplace: empty sequence");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (auto v : values)
      sum += static_cast<double>(v);
    const double mu = sum / n;
    double ss = 0.0;
    for (auto v : values) {
      const double d = static_cast<double>(v) - mu;
      ss += d * d;
    }
    const double sigma = std::sqrt(ss / n);
    return {mu, std::max(sigma / std::numbers::sqrt2, kMinLaplaceScale), sigma};
  }

}  // namespace

LaplaceModel
fit_laplace(std::span<const double> values)
{
  return fit_impl(values);
}

LaplaceModel
fit_laplace(std::span<const std::int32_t> values)
{
  return fit_impl(values);
}

double
laplace_cdf(const LaplaceModel& model, double t)
{
  const double z = t - model.mu;
  if (z < 0)
    return 0.5 * std::exp(z / model.b);
  return 1.0 - 0.5 * std::exp(-z / model.b);
}

double
interval_prob_unclamped(const LaplaceModel& model, double x)
{
  const double lo = x - 0.5;
  const double hi = x + 0.5;
  const double b = model.b;
  // Same-side intervals factor as 0.5 * exp(-dist/b) * (1 - exp(-1/b)),
  // which avoids cancellation far in the tails.
  if (lo >= model.mu)
    return -0.5 * std::exp(-(lo - model.mu) / b) * std::expm1(-1.0 / b);
  if (hi <= model.mu)
    return -0.5 * std::exp(-(model.mu - hi) / b) * std::expm1(-1.0 / b);
  return -0.5 * std::expm1(-(hi - model.mu) / b) - 0.5 * std::expm1(-(model.mu - lo) / b);
}

double
interval_prob(const LaplaceModel& model, double x)
{
  return std::max(interval_prob_unclamped(model, x), kProbabilityFloor);
}

SymbolCost
symbol_cost(double x, double mu, double b)
{
  const double lo = x - 0.5;
  const double hi = x + 0.5;
  SymbolCost c;

  if (lo >= mu || hi <= mu) {
    // Work in the log domain: -ln q = ln 2 + dist/b - ln(1 - e^{-1/b}).
    const bool right = lo >= mu;
    const double dist = right ? lo - mu : mu - hi;
    const double one_minus = -std::expm1(-1.0 / b);
    c.bits = (kLn2 + dist / b - std::log(one_minus)) / kLn2;
    const double slope = 1.0 / (b * kLn2);
    c.d_x = right ? slope : -slope;
    c.d_mu = -c.d_x;
    c.d_b = (-dist / (b * b) + std::exp(-1.0 / b) / (b * b * one_minus)) / kLn2;
  } else {
    const double a = hi - mu;
    const double g = mu - lo;
    const double ea = std::exp(-a / b);
    const double eg = std::exp(-g / b);
    const double q = -0.5 * std::expm1(-a / b) - 0.5 * std::expm1(-g / b);
    const double dq_dx = 0.5 * (ea - eg) / b;
    const double dq_db = -0.5 * (ea * a + eg * g) / (b * b);
    c.bits = -std::log(q) / kLn2;
    c.d_x = -dq_dx / (q * kLn2);
    c.d_mu = -c.d_x;
    c.d_b = -dq_db / (q * kLn2);
  }

  if (!(c.bits <= kMaxSymbolBits))
    return {kMaxSymbolBits, 0.0, 0.0, 0.0};
  return c;
}

double
estimate_bits(const LaplaceModel& model, std::span<const std::int32_t> values)
{
  double bits = 0.0;
  for (auto v : values)
    bits += symbol_cost(static_cast<double>(v), model.mu, model.b).bits;
  return bits;
}

double
rate_loss(
  const Matrix<std::int32_t>& offsets, const Matrix<std::int32_t>& features,
  const Matrix<std::int32_t>& scalings)
{
  double total = 0.0;
  for (const auto* g : {&offsets, &features, &scalings}) {
    if (g->empty())
      continue;
    const auto model = fit_laplace(g->data());
    total += estimate_bits(model, g->data()) / static_cast<double>(g->rows());
  }
  return total;
}

RateLossGradient
rate_loss_with_grad(const std::array<const Matrix<double>*, 3>& groups, bool detach_fit)
{
  RateLossGradient out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& mat = *groups[gi];
    out.grad[gi] = Matrix<double>(mat.rows(), mat.cols());
    if (mat.empty())
      continue;

    const auto values = mat.data();
    const auto model = fit_laplace(values);
    out.models[gi] = model;
    const bool scale_floored = model.sigma / std::numbers::sqrt2 < kMinLaplaceScale;
    const double n = static_cast<double>(values.size());
    const double per_anchor = 1.0 / static_cast<double>(mat.rows());

    auto grad = out.grad[gi].data();
    double bits = 0.0;
    double sum_d_mu = 0.0;
    double sum_d_b = 0.0;
    for (std::size_t e = 0; e < values.size(); ++e) {
      const auto c = symbol_cost(values[e], model.mu, model.b);
      bits += c.bits;
      grad[e] = c.d_x;
      sum_d_mu += c.d_mu;
      sum_d_b += c.d_b;
    }

    if (!detach_fit) {
      // mu = mean(v): d mu / d v_e = 1/n.
      // b = sigma / sqrt2: d b / d v_e = (v_e - mu) / (n sigma sqrt2).
      const double via_mu = sum_d_mu / n;
      const double via_b = scale_floored ? 0.0 : sum_d_b / (n * model.sigma * std::numbers::sqrt2);
      for (std::size_t e = 0; e < values.size(); ++e)
        grad[e] += via_mu + via_b * (values[e] - model.mu);
    }
    for (auto& g : grad)
      g *= per_anchor;

    out.group_values[gi] = bits * per_anchor;
    out.value += out.group_values[gi];
  }
  return out;
}

CalibrationPoint
measure_sample(const CalibrationSample& sample)
{
  CalibrationPoint p;
  for (const auto& channel : sample) {
    if (channel.empty())
      throw InvalidArgument("calibrate_alpha: empty sequence in corpus");
    p.estimated_bits += estimate_bits(fit_laplace(std::span<const std::int32_t>(channel)), channel);
    ByteWriter w;
    rlc_append(w, channel);
    p.actual_bits += 8.0 * static_cast<double>(w.size());
  }
  return p;
}

std::optional<double>
pearson(std::span<const CalibrationPoint> points)
{
  if (points.size() < 2)
    return std::nullopt;
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.estimated_bits;
    my += p.actual_bits;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.estimated_bits - mx;
    const double dy = p.actual_bits - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

CalibrationResult
calibrate_points(std::span<const CalibrationPoint> points)
{
  if (points.empty())
    throw InvalidArgument("calibrate_alpha: empty corpus");
  CalibrationResult r;
  r.points.assign(points.begin(), points.end());
  double est = 0.0, act = 0.0;
  for (const auto& p : points) {
    est += p.estimated_bits;
    act += p.actual_bits;
  }
  r.alpha = est > 0.0 ? act / est : std::numeric_limits<double>::infinity();
  r.correlation = pearson(points);
  return r;
}

CalibrationResult
calibrate_alpha(std::span<const CalibrationSample> corpus)
{
  if (corpus.empty())
    throw InvalidArgument("calibrate_alpha: empty corpus");
  std::vector<CalibrationPoint> points;
  points.reserve(corpus.size());
  for (const auto& sample : corpus)
    points.push_back(measure_sample(sample));
  return calibrate_points(points);
}

CalibrationResult
calibrate_alpha(std::span<const std::vector<std::int32_t>> sequences)
{
  if (sequences.empty())
    throw InvalidArgument("calibrate_alpha: empty corpus");
  std::vector<CalibrationPoint> points;
  points.reserve(sequences.size());
  for (const auto& seq : sequences)
    points.push_back(measure_sample(CalibrationSample{seq}));
  return calibrate_points(points);
}

namespace {

  std::string fmt(const char* spec, double v)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
  }

}  // namespace

std::string
RateReport::to_text() const
{
  std::ostringstream os;
  os << "component       bytes    share      est_bits    alpha\n";
  for (const auto& c : components) {
    char line[160];
    std::string est = "-", a = "-";
    if (c.estimated_bits) {
      est = fmt("%.1f", *c.estimated_bits);
      a = *c.estimated_bits > 0 ? fmt("%.3f", 8.0 * static_cast<double>(c.bytes) / *c.estimated_bits)
                                : "inf";
    }
    std::snprintf(
      line, sizeof line, "%-9s %11llu  %6.2f%%  %12s  %7s\n", c.name.c_str(),
      static_cast<unsigned long long>(c.bytes), c.percent, est.c_str(), a.c_str());
    os << line;
  }
  os << "header    " << fmt("%11.0f", static_cast<double>(header_bytes)) << "\n";
  os << "Size (MB) " << fmt("%.4f", static_cast<double>(total_bytes) / 1e6) << "  anchors "
     << anchor_count << "\n";
  os << "alpha " << fmt("%.4f", alpha) << "  correlation "
     << (correlation ? fmt("%.4f", *correlation) : std::string("undefined")) << "\n";
  return os.str();
}

std::string
RateReport::to_kv() const
{
  std::ostringstream os;
  os << "anchors=" << anchor_count << "\n";
  os << "size_bytes=" << total_bytes << "\n";
  os << "header_bytes=" << header_bytes << "\n";
  for (const auto& c : components) {
    os << c.name << ".bytes=" << c.bytes << "\n";
    os << c.name << ".percent=" << fmt("%.4f", c.percent) << "\n";
    if (c.estimated_bits)
      os << c.name << ".est_bits=" << fmt("%.3f", *c.estimated_bits) << "\n";
  }
  os << "alpha=" << fmt("%.6f", alpha) << "\n";
  os << "correlation=" << (correlation ? fmt("%.6f", *correlation) : std::string("undefined"))
     << "\n";
  return os.str();
}

}  // namespace voxgs
