#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "popre/config.hpp"
#include "popre/estimate.hpp"
#include "popre/format.hpp"
#include "popre/experiments.hpp"
#include "popre/extremal.hpp"
#include "popre/io.hpp"
#include "popre/lp.hpp"
#include "popre/recover.hpp"

namespace {

using popre::io::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;
constexpr int kExitVerification = 3;

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

popre::NoiseModel parse_model(const std::string& model, double nu) {
  return popre::NoiseModel(popre::noise_kind_from_string(model), nu);
}

struct SweepFitSpec {
  std::string predictor;
  std::vector<double> xs, ys;
};

// Assembles fit inputs from sweep rows for a named predictor. Raw-parameter
// predictors use every solved row; theory-exponent predictors drop rows whose
// hypothesis flag is raised (their exponent value is outside the theorem's
// window). Fits of log(1/eta) against n measure the power of the exponent,
// so they regress log(log(1/eta)).
SweepFitSpec assemble_fit(const std::vector<popre::SweepRow>& rows, const std::string& predictor) {
  SweepFitSpec spec;
  spec.predictor = predictor;
  for (const popre::SweepRow& r : rows) {
    if (r.failed || !(r.eta > 0.0)) continue;
    const double log_inv_eta = std::log(1.0 / r.eta);
    if (predictor == "eps") {
      spec.xs.push_back(1.0 / r.eps);
      spec.ys.push_back(log_inv_eta);
    } else if (predictor == "nu") {
      spec.xs.push_back(1.0 / r.nu);
      spec.ys.push_back(log_inv_eta);
    } else if (predictor == "n") {
      if (log_inv_eta <= 0.0) continue;
      spec.xs.push_back(r.n);
      spec.ys.push_back(std::log(log_inv_eta));
    } else if (predictor == "exponent_bitflip_lo" || predictor == "exponent_bitflip_hi" ||
               predictor == "exponent_erasure") {
      if (r.flag != "ok") continue;
      double x = predictor == "exponent_bitflip_lo"   ? r.exponent_bitflip_lo
                 : predictor == "exponent_bitflip_hi" ? r.exponent_bitflip_hi
                                                      : r.exponent_erasure;
      spec.xs.push_back(x);
      spec.ys.push_back(log_inv_eta);
    } else {
      throw std::invalid_argument("unknown fit predictor: " + predictor);
    }
  }
  return spec;
}

int run_verify(const popre::NoiseModel& model, int n, double eps, std::uint64_t seed, int trials,
               std::ostream& os, const std::string& poly_out) {
  json records = json::array();
  bool all_pass = true;
  const auto note = [&records, &all_pass](const char* kind, json j, bool pass) {
    j["check"] = kind;
    records.push_back(std::move(j));
    all_pass = all_pass && pass;
  };

  const popre::EtaReport eta = popre::eta_exact(model, n, eps);
  note("eta", popre::io::to_json(eta), true);

  {
    const popre::BoundCheck tl = popre::three_lines_lower_bound(eta.certificate.c, eps, model.nu);
    note("three-lines", popre::io::to_json(tl), tl.pass);
  }

  // Repeated-root construction at the theory-suggested size, clamped to the
  // LP-friendly range.
  const popre::TheoryBounds tb = popre::theory_bounds(model, n, eps);
  {
    int m = model.kind == popre::NoiseKind::Erasure ? tb.m_erasure : tb.m_bitflip;
    m = std::max(2, std::min(m, 128));
    int t = 1;
    if (2.0 * eps < 1.0 / 17.0)
      t = std::max(1, static_cast<int>(popre::erdelyi_t_bound(m, 2.0 * eps)));
    t = std::min(t, m);
    const popre::RepeatedRootPoly poly = popre::construct_repeated_root_poly(m, t);
    json pj{{"m", m}, {"t", t}, {"a0_level", poly.a0_level}, {"certified", poly.certified}};
    note("repeated-root", pj, poly.certified >= 1);
    if (!poly_out.empty()) {
      std::ofstream pf(poly_out);
      if (!pf) throw std::runtime_error("cannot open output file: " + poly_out);
      for (std::size_t i = 0; i < poly.coeffs.size(); ++i)
        pf << (i ? "," : "") << popre::format_double(poly.coeffs[i]);
      pf << '\n';
    }

    const popre::RootBoundsRecord rb = popre::verify_root_bounds(poly, poly.certified);
    note("root-bounds", popre::io::to_json(rb), rb.segment.pass && rb.arc.pass);

    const double a = std::max(1e-3, model.nu / 63.0);
    const popre::ThreeCircleRecord tc = popre::three_circle_check(poly.coeffs, a);
    note("three-circle", popre::io::to_json(tc), tc.hadamard.pass && tc.corollary.pass);
  }

  popre::Rng rng(seed);
  const popre::ChannelMatrix a = popre::build_channel_matrix(model, n);
  for (int trial = 0; trial < trials; ++trial) {
    const popre::DeltaVector c = popre::random_delta_vector(n, rng);
    double norm = 0.0;
    const std::vector<double> q = popre::noise_transform_coeffs(c.c, a);
    for (double v : q) norm += std::abs(v);
    const popre::SupResult sup = popre::noise_circle_sup(c.c, model, n);
    const bool sandwich =
        sup.value <= norm * (1.0 + 1e-6) + 1e-12 &&
        norm <= std::sqrt(n + 1.0) * (sup.value + sup.error_bound) * (1.0 + 1e-6);
    const popre::ThreeCircleRecord tc = popre::three_circle_check(c.c, 0.02);
    json j{{"trial", trial},
           {"l1_norm", norm},
           {"circle_sup", sup.value},
           {"sandwich_pass", sandwich},
           {"three_circle", popre::io::to_json(tc)}};
    note("random-delta", j, sandwich && tc.hadamard.pass && tc.corollary.pass);
  }

  os << json{{"model", popre::to_string(model.kind)},
             {"nu", model.nu},
             {"n", n},
             {"eps", eps},
             {"all_pass", all_pass},
             {"records", records}}
            .dump(2)
     << '\n';
  return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisy population recovery toolkit"};
  app.require_subcommand(1);

  std::string model_str = "bitflip";
  double nu = 0.5;
  int n = 8;
  double eps = 0.1;
  std::uint64_t seed = 0;
  std::string out_path, samples_path, dist_path, u_str;
  std::int64_t count = 1000;
  bool normalize = false;
  bool boost = false;
  std::string delta_mode = "oracle";
  double delta = 0.0;
  int jobs = 1;
  int trials = 20;
  std::vector<double> nu_list, eps_list;
  std::vector<int> n_list;
  std::string fit_predictor, fit_out, poly_out_path;

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", model_str, "noise model: bitflip or erasure")
        ->check(CLI::IsMember({"bitflip", "erasure"}));
    cmd->add_option("--nu", nu, "correlation/retention parameter in (0,1], 1 = noiseless");
  };

  CLI::App* channel = app.add_subcommand("channel", "emit the weight-transition matrix as CSV");
  add_model(channel);
  channel->add_option("--n", n, "dimension")->required();
  channel->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* sample = app.add_subcommand("sample", "draw noisy samples from a distribution spec");
  add_model(sample);
  sample->add_option("--n", n, "dimension (validated against the distribution file)");
  sample->add_option("--dist", dist_path, "distribution spec JSON")->required();
  sample->add_option("--count", count, "number of samples")->required();
  sample->add_option("--seed", seed, "rng seed");
  sample->add_flag("--normalize", normalize, "renormalize spec masses to sum 1");
  sample->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* estimate = app.add_subcommand("estimate", "estimate D(u) from a sample file");
  estimate->add_option("--samples", samples_path, "sample file path")->required();
  estimate->add_option("--u", u_str, "target string (default all-zeros)");
  estimate->add_option("--eps", eps, "accuracy parameter (reported accuracy is 2 eps)")->required();
  estimate->add_option("--delta-mode", delta_mode, "oracle or manual")
      ->check(CLI::IsMember({"oracle", "manual"}));
  estimate->add_option("--delta", delta, "manual delta");
  estimate->add_flag("--boost", boost, "median-of-repetitions confidence amplification");
  estimate->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* recover = app.add_subcommand("recover", "full NPR from simulated channel samples");
  add_model(recover);
  recover->add_option("--n", n, "dimension")->required();
  recover->add_option("--eps", eps, "heavy-hitter threshold")->required();
  recover->add_option("--dist", dist_path, "ground-truth distribution spec JSON")->required();
  recover->add_option("--seed", seed, "rng seed");
  recover->add_flag("--normalize", normalize, "renormalize spec masses to sum 1");
  recover->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* eta = app.add_subcommand("eta", "exact eta(eps, nu) via LP");
  add_model(eta);
  eta->add_option("--n", n, "dimension")->required();
  eta->add_option("--eps", eps, "accuracy parameter")->required();
  eta->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "run the extremal inequality battery");
  add_model(verify);
  verify->add_option("--n", n, "dimension")->required();
  verify->add_option("--eps", eps, "accuracy parameter")->required();
  verify->add_option("--seed", seed, "rng seed for random delta vectors");
  verify->add_option("--trials", trials, "random delta vector count");
  verify->add_option("--poly-out", poly_out_path, "write the constructed polynomial's coefficients as CSV");
  verify->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "eta scaling sweeps over a parameter grid");
  sweep->add_option("--model", model_str, "noise model")->check(CLI::IsMember({"bitflip", "erasure"}));
  sweep->add_option("--nu", nu_list, "nu grid values")->required();
  sweep->add_option("--eps", eps_list, "eps grid values")->required();
  sweep->add_option("--n", n_list, "n grid values")->required();
  sweep->add_option("--seed", seed, "seed recorded with the grid");
  sweep->add_option("--jobs", jobs, "parallel workers");
  sweep->add_option("--fit", fit_predictor,
                    "fit log(1/eta) against: eps, nu, n, exponent_bitflip_lo, "
                    "exponent_bitflip_hi, exponent_erasure");
  sweep->add_option("--fit-out", fit_out, "fit result JSON path (default stdout)");
  sweep->add_option("--out", out_path, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    std::ofstream file;
    if (channel->parsed()) {
      const popre::ChannelMatrix a = popre::build_channel_matrix(parse_model(model_str, nu), n);
      popre::write_channel_csv(open_output(file, out_path), a);
      return kExitOk;
    }

    if (sample->parsed()) {
      std::ifstream din(dist_path);
      if (!din) throw popre::io::ParseError("cannot open distribution spec: " + dist_path, 0);
      const popre::Distribution dist = popre::io::load_distribution_json(din, normalize);
      if (sample->count("--n") && n != dist.n)
        throw popre::io::ParseError("--n does not match the distribution spec", 0);
      const popre::NoiseModel model = parse_model(model_str, nu);
      popre::ChannelSampler sampler(dist, model, popre::Rng(seed));
      popre::SampleBatch batch{{}, model, dist.n};
      batch.items.reserve(static_cast<std::size_t>(count));
      for (std::int64_t i = 0; i < count; ++i) batch.items.push_back(sampler.next());
      popre::io::write_sample_file(open_output(file, out_path), batch);
      return kExitOk;
    }

    if (estimate->parsed()) {
      std::ifstream sin(samples_path);
      if (!sin) throw popre::io::ParseError("cannot open sample file: " + samples_path, 0);
      const popre::SampleBatch batch = popre::io::load_sample_file(sin);
      const popre::BitString u =
          u_str.empty() ? popre::BitString::zeros(batch.n) : popre::BitString(u_str);
      const popre::DeltaMode mode =
          delta_mode == "oracle" ? popre::DeltaMode::Oracle : popre::DeltaMode::Manual;
      const popre::EstimateReport rep = popre::estimate_point_mass(batch, u, eps, mode, delta, boost);
      open_output(file, out_path) << popre::io::to_json(rep).dump(2) << '\n';
      return kExitOk;
    }

    if (recover->parsed()) {
      std::ifstream din(dist_path);
      if (!din) throw popre::io::ParseError("cannot open distribution spec: " + dist_path, 0);
      const popre::Distribution dist = popre::io::load_distribution_json(din, normalize);
      if (dist.n != n) throw popre::io::ParseError("--n does not match the distribution spec", 0);
      const popre::NoiseModel model = parse_model(model_str, nu);
      popre::ChannelSampler sampler(dist, model, popre::Rng(seed));
      const popre::RecoveryResult result = popre::recover_distribution(sampler, model, n, eps);
      open_output(file, out_path) << popre::io::to_json(result).dump(2) << '\n';
      return kExitOk;
    }

    if (eta->parsed()) {
      const popre::EtaReport report = popre::eta_exact(parse_model(model_str, nu), n, eps);
      open_output(file, out_path) << popre::io::to_json(report).dump(2) << '\n';
      return kExitOk;
    }

    if (verify->parsed()) {
      return run_verify(parse_model(model_str, nu), n, eps, seed, trials,
                        open_output(file, out_path), poly_out_path);
    }

    if (sweep->parsed()) {
      popre::SweepGrid grid;
      grid.model = popre::noise_kind_from_string(model_str);
      grid.nu_values = nu_list;
      grid.eps_values = eps_list;
      grid.n_values = n_list;
      grid.seed = seed;
      const std::vector<popre::SweepRow> rows = popre::scaling_sweep(grid, jobs);
      popre::write_sweep_csv(open_output(file, out_path), rows);
      if (!fit_predictor.empty()) {
        const SweepFitSpec spec = assemble_fit(rows, fit_predictor);
        const popre::FitResult fit =
            popre::fit_power_law(spec.xs, spec.ys, popre::FitMode::PowerLaw, spec.predictor);
        std::ofstream fit_file;
        open_output(fit_file, fit_out) << popre::io::to_json(fit).dump(2) << '\n';
      }
      return kExitOk;
    }
  } catch (const popre::io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const popre::lp::LpIterationLimitError& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kExitComputation;
  } catch (const popre::EnumerationOverflowError& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kExitComputation;
  } catch (const popre::InsufficientSamplesError& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitUsage;
}
