#include "cli.hpp"

#include "voxgs/anchor_file.hpp"
#include "voxgs/container.hpp"
#include "voxgs/error.hpp"
#include "voxgs/geometry.hpp"
#include "voxgs/io.hpp"
#include "voxgs/quantize.hpp"
#include "voxgs/rate_proxy.hpp"
#include "voxgs/sandbox.hpp"
#include "voxgs/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace voxgs::cli {

namespace {

  namespace fs = std::filesystem;

  // Raised for a calibration whose correlation is undefined.
  class Degenerate : public Error {
  public:
    using Error::Error;
  };

  std::string fmt(const char* spec, double v)
  {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
  }

  std::size_t thread_budget()
  {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VOXGS_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0)
        n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return n;
  }

  // Runs fn(0..n-1) on up to thread_budget() workers; the first exception
  // is rethrown after all workers finish.
  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
  {
    const std::size_t workers = std::min(thread_budget(), n);
    if (workers <= 1) {
      for (std::size_t i = 0; i < n; ++i)
        fn(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure)
              failure = std::current_exception();
          }
        }
      });
    for (auto& t : pool)
      t.join();
    if (failure)
      std::rethrow_exception(failure);
  }

  enum class Format { Text, Kv, Csv };

  struct QuantFlags {
    std::string preset;
    std::optional<std::uint32_t> qp;
    std::optional<std::string> qo, qa, qs;

    void add_to(CLI::App& app)
    {
      app.add_option("--preset", preset, "Dataset preset fixing q_p")
        ->check(CLI::IsMember({"synthetic-nerf", "large-scene"}));
      app.add_option("--qp", qp, "Position grid resolution");
      app.add_option("--qo", qo, "Offset scale (integer, decimal or a/b)");
      app.add_option("--qa", qa, "Feature scale");
      app.add_option("--qs", qs, "Scaling scale");
    }

    // Precedence: explicit flags, then `base` (e.g. from the input file),
    // then the preset, then the defaults.
    QuantParams resolve(const std::optional<QuantParams>& base = std::nullopt) const
    {
      QuantParams q;
      if (preset == "large-scene")
        q.q_p = 200;
      if (base)
        q = *base;
      if (qp)
        q.q_p = *qp;
      if (qo)
        q.q_o = Rational::parse(*qo);
      if (qa)
        q.q_a = Rational::parse(*qa);
      if (qs)
        q.q_s = Rational::parse(*qs);
      q.check();
      return q;
    }
  };

  void add_format(CLI::App& app, Format& format, Format fallback)
  {
    format = fallback;
    app.add_option("--format", format, "Report format")
      ->transform(CLI::CheckedTransformer(
        std::map<std::string, Format>{{"text", Format::Text}, {"kv", Format::Kv}, {"csv", Format::Csv}},
        CLI::ignore_case))
      ->option_text("text|kv|csv");
  }

  std::string report_csv(const RateReport& r)
  {
    std::string out = "component,bytes,percent,est_bits\n";
    for (const auto& c : r.components)
      out += c.name + "," + std::to_string(c.bytes) + "," + fmt("%.4f", c.percent) + ","
        + (c.estimated_bits ? fmt("%.3f", *c.estimated_bits) : std::string()) + "\n";
    out += "header," + std::to_string(r.header_bytes) + ",,\n";
    out += "total," + std::to_string(r.total_bytes) + ",,\n";
    return out;
  }

  void print_report(std::ostream& out, const RateReport& r, Format f)
  {
    switch (f) {
      case Format::Text:
        out << r.to_text();
        break;
      case Format::Kv:
        out << r.to_kv();
        break;
      case Format::Csv:
        out << report_csv(r);
        break;
    }
  }

  // ---- encode / decode / analyze -------------------------------------------------

  struct EncodeArgs {
    std::string input, output;
    QuantFlags quant;
    Format format = Format::Text;
  };

  void cmd_encode(const EncodeArgs& a, std::ostream& out)
  {
    auto file = read_anchor_file(a.input);
    const auto quant = a.quant.resolve(file.quant);
    const auto bytes = encode_container(quantize_cloud(file.cloud, quant));
    write_file_atomic(a.output, bytes);
    print_report(out, analyze_container(bytes), a.format);
  }

  struct DecodeArgs {
    std::string input, output;
  };

  void cmd_decode(const DecodeArgs& a, std::ostream& out)
  {
    const auto cloud = decode_container(read_file(a.input));
    write_file_atomic(a.output, format_anchor_file(dequantize_cloud(cloud), cloud.quant));
    out << "decoded " << cloud.size() << " anchors to " << a.output << "\n";
  }

  struct AnalyzeArgs {
    std::string input;
    Format format = Format::Text;
  };

  void cmd_analyze(const AnalyzeArgs& a, std::ostream& out)
  {
    print_report(out, analyze_container(read_file(a.input)), a.format);
  }

  // ---- generate ------------------------------------------------------------------

  struct SceneArgs {
    std::size_t anchors = 10000;
    double run_bias = 0.5;
    double laplace_scale = 2.0;
    std::uint32_t k = 10;
    std::uint32_t m = 50;
    std::uint64_t seed = 1;
    std::size_t mlp_bytes = 0;

    void add_to(CLI::App& app)
    {
      app.add_option("--anchors", anchors, "Anchor count of the synthetic scene");
      app.add_option("--run-bias", run_bias, "Spatial run structure in [0, 1]")
        ->check(CLI::Range(0.0, 1.0));
      app.add_option("--scale", laplace_scale, "Laplace scale of fresh attribute draws");
      app.add_option("--k", k, "Gaussians per anchor");
      app.add_option("--m", m, "Anchor feature width");
      app.add_option("--seed", seed, "Random seed");
    }

    FloatAnchorCloud generate() const
    {
      SyntheticOptions opts;
      opts.laplace_scale = laplace_scale;
      opts.mlp_bytes = mlp_bytes;
      return generate_synthetic(seed, anchors, AttributeLayout{k, m}, run_bias, opts);
    }
  };

  struct GenerateArgs {
    std::string output;
    SceneArgs scene;
  };

  void cmd_generate(const GenerateArgs& a, std::ostream& out)
  {
    const auto cloud = a.scene.generate();
    write_file_atomic(a.output, format_anchor_file(cloud));
    out << "wrote " << cloud.size() << " anchors to " << a.output << "\n";
  }

  // ---- calibrate -----------------------------------------------------------------

  struct CalibrateArgs {
    std::vector<std::string> inputs;
    bool synthetic = false;
    std::size_t scenes = 50;
    std::uint64_t seed = 1;
    QuantFlags quant;
    Format format = Format::Text;
  };

  void cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err)
  {
    if (!a.synthetic && a.inputs.empty())
      throw InvalidArgument("calibrate needs corpus files or --synthetic");

    std::vector<std::string> labels;
    std::vector<std::function<CalibrationSample()>> jobs;
    if (a.synthetic) {
      const auto quant = a.quant.resolve();
      for (const auto& scene : calibration_corpus(a.scenes, a.seed)) {
        labels.push_back("rb=" + fmt("%.3f", scene.run_bias) + ";b=" + fmt("%.3f", scene.laplace_scale));
        jobs.emplace_back([scene, quant] { return scene_channels(scene, kCalibrationLayout, quant); });
      }
    }
    for (const auto& path : a.inputs) {
      labels.push_back(path);
      jobs.emplace_back([path, &a] {
        auto file = read_anchor_file(path);
        const auto cloud = sort_by_morton(quantize_cloud(file.cloud, a.quant.resolve(file.quant)));
        CalibrationSample sample;
        for (auto g : kAttributeGroups)
          for (std::size_t c = 0; c < cloud.group(g).cols(); ++c)
            sample.push_back(cloud.group(g).column(c));
        if (cloud.size() == 0)
          throw InvalidArgument(path + " holds no anchors");
        return sample;
      });
    }

    std::vector<CalibrationPoint> points(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) { points[i] = measure_sample(jobs[i]()); });
    const auto result = calibrate_points(points);

    if (a.format == Format::Kv) {
      out << "points=" << points.size() << "\n";
    } else {
      out << "sample,est_bits,actual_bits\n";
      for (std::size_t i = 0; i < points.size(); ++i)
        out << labels[i] << "," << fmt("%.3f", points[i].estimated_bits) << ","
            << fmt("%.0f", points[i].actual_bits) << "\n";
    }
    out << "alpha=" << fmt("%.6f", result.alpha) << "\n";
    out << "correlation="
        << (result.correlation ? fmt("%.6f", *result.correlation) : std::string("undefined")) << "\n";

    const bool near_free = std::any_of(points.begin(), points.end(), [](const auto& p) {
      return p.estimated_bits < 1.0;
    });
    if (near_free)
      err << "warning: some samples are estimated at under one bit (constant channels); the "
             "proxy cannot see run structure, so alpha is not meaningful for them\n";
    if (!result.correlation)
      throw Degenerate("correlation undefined (need at least two samples with distinct estimates)");
  }

  // ---- sweep ---------------------------------------------------------------------

  struct SweepArgs {
    std::optional<std::string> input;
    std::string axis = "q_p";
    std::vector<std::string> values;
    SceneArgs scene;
    QuantFlags quant;
    Format format = Format::Csv;
  };

  struct SweepRow {
    std::string value;
    std::uint64_t size_bits = 0;
    std::array<std::uint64_t, 4> section_bits{};
    double mse = 0.0;
    std::array<double, 3> group_mse{};
  };

  void cmd_sweep(const SweepArgs& a, std::ostream& out)
  {
    std::string axis = a.axis;
    axis.erase(std::remove(axis.begin(), axis.end(), '_'), axis.end());
    if (axis != "qp" && axis != "qo" && axis != "qa" && axis != "qs")
      throw InvalidArgument("sweep axis must be one of q_p, q_o, q_a, q_s (got '" + a.axis + "')");
    if (a.values.empty())
      throw InvalidArgument("sweep needs at least one value");

    FloatAnchorCloud cloud;
    std::optional<QuantParams> file_quant;
    if (a.input) {
      auto file = read_anchor_file(*a.input);
      cloud = std::move(file.cloud);
      file_quant = file.quant;
    } else {
      cloud = a.scene.generate();
    }
    const auto base = a.quant.resolve(file_quant);

    std::vector<QuantParams> points;
    for (const auto& v : a.values) {
      auto q = base;
      if (axis == "qp") {
        const auto r = Rational::parse(v);
        if (r.den != 1 || r.num > kMaxGridResolution)
          throw InvalidArgument("q_p must be an integer up to 2^21, got '" + v + "'");
        q.q_p = static_cast<std::uint32_t>(r.num);
      } else {
        (axis == "qo" ? q.q_o : axis == "qa" ? q.q_a : q.q_s) = Rational::parse(v);
      }
      q.check();
      points.push_back(q);
    }

    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
      const auto& q = points[i];
      const auto bytes = encode_container(quantize_cloud(cloud, q));
      const auto h = read_container_header(bytes);
      auto& row = rows[i];
      row.value = a.values[i];
      row.size_bits = 8 * bytes.size();
      for (std::size_t s = 0; s < kSectionCount; ++s)
        row.section_bits[s] = 8 * h.sections[s].length;

      const std::array<Rational, 3> scales{q.q_o, q.q_a, q.q_s};
      double total = 0.0;
      std::size_t count = 0;
      for (std::size_t g = 0; g < 3; ++g) {
        const auto& src = cloud.group(kAttributeGroups[g]);
        const auto back = dequantize_features(quantize_features(src, scales[g]), scales[g]);
        double se = 0.0;
        for (std::size_t e = 0; e < src.size(); ++e) {
          const double d = back.data()[e] - src.data()[e];
          se += d * d;
        }
        row.group_mse[g] = src.size() ? se / static_cast<double>(src.size()) : 0.0;
        total += se;
        count += src.size();
      }
      row.mse = count ? total / static_cast<double>(count) : 0.0;
    });

    if (a.format == Format::Kv) {
      for (const auto& r : rows) {
        const std::string p = a.axis + "=" + r.value + ".";
        out << p << "size_bits=" << r.size_bits << "\n" << p << "geometry_bits=" << r.section_bits[0]
            << "\n" << p << "mse=" << fmt("%.9g", r.mse) << "\n";
      }
      return;
    }
    const bool csv = a.format == Format::Csv;
    const char* sep = csv ? "," : "  ";
    out << a.axis << sep << "size_bits" << sep << "geometry_bits" << sep << "offset_bits" << sep
        << "feature_bits" << sep << "scaling_bits" << sep << "mse" << sep << "mse_o" << sep
        << "mse_a" << sep << "mse_s\n";
    for (const auto& r : rows) {
      out << r.value << sep << r.size_bits;
      for (auto b : r.section_bits)
        out << sep << b;
      out << sep << fmt("%.9g", r.mse);
      for (double m : r.group_mse)
        out << sep << fmt("%.9g", m);
      out << "\n";
    }
  }

  // ---- sandbox -------------------------------------------------------------------

  struct SandboxArgs {
    SandboxConfig config;
    std::optional<std::string> trace_dir;
    Format format = Format::Text;
  };

  void cmd_sandbox(const SandboxArgs& a, std::ostream& out)
  {
    a.config.check();
    const auto r = run_ablation(a.config);
    if (a.trace_dir) {
      fs::create_directories(*a.trace_dir);
      write_file_atomic(fs::path(*a.trace_dir) / "baseline.csv", r.baseline.to_csv());
      write_file_atomic(fs::path(*a.trace_dir) / "constrained.csv", r.constrained.to_csv());
    }
    const auto& b = r.baseline.final();
    const auto& c = r.constrained.final();
    switch (a.format) {
      case Format::Csv: {
        out << "run," << r.baseline.to_csv().substr(0, r.baseline.to_csv().find('\n') + 1);
        for (const auto& [name, trace] :
             {std::pair{"baseline", &r.baseline}, std::pair{"constrained", &r.constrained}}) {
          std::istringstream lines(trace->to_csv());
          std::string line;
          std::getline(lines, line);
          while (std::getline(lines, line))
            out << name << "," << line << "\n";
        }
        break;
      }
      case Format::Kv:
        out << "baseline.actual_bits=" << *b.actual_bits << "\n"
            << "baseline.distortion=" << fmt("%.9g", b.distortion) << "\n"
            << "constrained.actual_bits=" << *c.actual_bits << "\n"
            << "constrained.distortion=" << fmt("%.9g", c.distortion) << "\n"
            << "bits_ratio=" << fmt("%.6f", r.bits_ratio) << "\n"
            << "rate_reduction=" << fmt("%.6f", 1.0 - r.bits_ratio) << "\n"
            << "distortion_change=" << fmt("%.6f", r.distortion_change) << "\n";
        break;
      case Format::Text:
        out << "run            actual_bits   est_bits      distortion\n";
        out << "baseline       " << fmt("%-13.0f", static_cast<double>(*b.actual_bits))
            << fmt("%-14.1f", b.estimated_bits) << fmt("%.6f", b.distortion) << "\n";
        out << "constrained    " << fmt("%-13.0f", static_cast<double>(*c.actual_bits))
            << fmt("%-14.1f", c.estimated_bits) << fmt("%.6f", c.distortion) << "\n";
        out << "rate reduction " << fmt("%.1f%%", 100.0 * (1.0 - r.bits_ratio))
            << "  distortion change " << fmt("%+.2f%%", 100.0 * r.distortion_change) << "\n";
        break;
    }
  }

}  // namespace

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Codec and rate-estimation toolkit for voxelized Gaussian-splat anchor clouds"};
  app.name("voxgs");
  app.require_subcommand(1);
  app.set_version_flag("--version", "voxgs 0.1.0");

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Quantize an anchor file and write a container");
  encode->add_option("input", enc.input, "Anchor file")->required();
  encode->add_option("output", enc.output, "Container to write")->required();
  enc.quant.add_to(*encode);
  add_format(*encode, enc.format, Format::Text);

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Write a container back out as a dequantized anchor file");
  decode->add_option("input", dec.input, "Container")->required();
  decode->add_option("output", dec.output, "Anchor file to write")->required();

  AnalyzeArgs ana;
  auto* analyze = app.add_subcommand("analyze", "Bit allocation and rate-proxy diagnostics of a container");
  analyze->add_option("input", ana.input, "Container")->required();
  add_format(*analyze, ana.format, Format::Text);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic anchor file");
  generate->add_option("output", gen.output, "Anchor file to write")->required();
  gen.scene.add_to(*generate);
  generate->add_option("--mlp-bytes", gen.scene.mlp_bytes, "Size of a random MLP blob");

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit alpha and correlation of estimated vs actual bits");
  calibrate->add_option("inputs", cal.inputs, "Corpus anchor files");
  calibrate->add_flag("--synthetic", cal.synthetic, "Use the seeded synthetic corpus");
  calibrate->add_option("--scenes", cal.scenes, "Synthetic corpus size");
  calibrate->add_option("--seed", cal.seed, "Synthetic corpus seed");
  cal.quant.add_to(*calibrate);
  add_format(*calibrate, cal.format, Format::Text);

  SweepArgs swp;
  auto* sweep = app.add_subcommand("sweep", "Size and distortion over a grid of one quantization parameter");
  sweep->add_option("--input", swp.input, "Anchor file (default: synthetic scene)");
  sweep->add_option("--axis", swp.axis, "q_p, q_o, q_a or q_s");
  sweep->add_option("--values", swp.values, "Comma-separated values")->delimiter(',')->required();
  swp.scene.add_to(*sweep);
  swp.quant.add_to(*sweep);
  add_format(*sweep, swp.format, Format::Csv);

  SandboxArgs sbx;
  auto* sandbox = app.add_subcommand("sandbox", "Rate-distortion ablation: rate weight 0 against the configured one");
  auto& sc = sbx.config;
  sandbox->add_option("--lambda1", sc.weights.l1, "L1 distortion weight");
  sandbox->add_option("--lambda2", sc.weights.l2, "L2 distortion weight");
  sandbox->add_option("--lambda3", sc.weights.rate, "Rate weight");
  sandbox->add_option("--steps", sc.steps, "Total steps");
  sandbox->add_option("--warmup", sc.warmup, "Distortion-only steps");
  sandbox->add_option("--lr", sc.learning_rate, "Per-element learning rate");
  sandbox->add_option("--anchors", sc.anchors, "Anchors in the scene");
  sandbox->add_option("--k", sc.layout.k, "Gaussians per anchor");
  sandbox->add_option("--m", sc.layout.m, "Anchor feature width");
  sandbox->add_option("--seed", sc.seed, "Scene seed");
  sandbox->add_flag("--detach-fit", sc.detach_fit, "Stop gradients through the fitted mu and b");
  sandbox->add_option("--trace-dir", sbx.trace_dir, "Write baseline.csv and constrained.csv here");
  QuantFlags sandbox_quant;
  sandbox_quant.add_to(*sandbox);
  add_format(*sandbox, sbx.format, Format::Text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*encode)
      cmd_encode(enc, out);
    else if (*decode)
      cmd_decode(dec, out);
    else if (*analyze)
      cmd_analyze(ana, out);
    else if (*generate)
      cmd_generate(gen, out);
    else if (*calibrate)
      cmd_calibrate(cal, out, err);
    else if (*sweep)
      cmd_sweep(swp, out);
    else if (*sandbox) {
      sc.quant = sandbox_quant.resolve(sc.quant);
      cmd_sandbox(sbx, out);
    }
  } catch (const CorruptStream& e) {
    err << "error: corrupt container: " << e.what() << "\n";
    return kExitCorrupt;
  } catch (const Degenerate& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace voxgs::cli
