#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>

#include "popre/channel.hpp"
#include "popre/config.hpp"
#include "popre/estimate.hpp"
#include "popre/experiments.hpp"
#include "popre/extremal.hpp"
#include "popre/io.hpp"
#include "popre/recover.hpp"

namespace py = pybind11;

namespace {

popre::NoiseModel make_model(const std::string& model, double nu) {
  return popre::NoiseModel(popre::noise_kind_from_string(model), nu);
}

popre::RegionSpec make_region(const std::string& kind, double p1, double p2) {
  using popre::RegionSpec;
  if (kind == "unit_circle") return RegionSpec::unit_circle();
  if (kind == "arc") return RegionSpec::arc(p1, p2);
  if (kind == "segment") return RegionSpec::segment(p1, p2);
  if (kind == "circle") return RegionSpec::circle_disk(p1, p2);
  if (kind == "ellipse_b") return RegionSpec::ellipse_b(p1, p2);
  throw std::invalid_argument("unknown region kind: " + kind);
}

popre::Distribution make_distribution(const std::vector<std::pair<std::string, double>>& entries) {
  popre::Distribution d;
  for (const auto& [x, p] : entries) d.entries.emplace_back(popre::BitString(x), p);
  if (d.entries.empty()) throw std::invalid_argument("empty distribution");
  d.n = d.entries.front().first.size();
  d.validate();
  return d;
}

}  // namespace

PYBIND11_MODULE(_popre, m) {
  m.doc() = "noisy population recovery toolkit (C++ core)";

  m.def("max_dimension", &popre::max_dimension);

  m.def(
      "channel_matrix",
      [](const std::string& model, double nu, int n) {
        const popre::ChannelMatrix a = popre::build_channel_matrix(make_model(model, nu), n);
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < a.dim(); ++i) rows.emplace_back(a.row(i).begin(), a.row(i).end());
        return rows;
      },
      py::arg("model"), py::arg("nu"), py::arg("n"),
      "Weight-transition matrix rows for the given noise model.");

  m.def(
      "apply_noise",
      [](const std::string& model, double nu, const std::string& x, std::uint64_t seed) {
        popre::Rng rng(seed);
        return popre::apply_noise(make_model(model, nu), popre::BitString(x), rng).str();
      },
      py::arg("model"), py::arg("nu"), py::arg("x"), py::arg("seed") = 0);

  m.def(
      "push_forward",
      [](const std::vector<double>& p, const std::string& model, double nu) {
        const popre::ChannelMatrix a =
            popre::build_channel_matrix(make_model(model, nu), static_cast<int>(p.size()) - 1);
        return popre::push_forward(p, a);
      },
      py::arg("p"), py::arg("model"), py::arg("nu"));

  m.def(
      "eta_exact",
      [](const std::string& model, double nu, int n, double eps) {
        const popre::EtaReport r = popre::eta_exact(make_model(model, nu), n, eps);
        py::dict d;
        d["model"] = popre::to_string(r.model.kind);
        d["nu"] = r.model.nu;
        d["n"] = r.n;
        d["eps"] = r.eps;
        d["eta"] = r.eta;
        d["circle_sup"] = r.circle_sup;
        d["circle_sup_error"] = r.circle_sup_error;
        d["certificate"] = r.certificate.c;
        return d;
      },
      py::arg("model"), py::arg("nu"), py::arg("n"), py::arg("eps"));

  m.def(
      "required_samples", [](int n, double delta) { return popre::required_samples(n, delta); },
      py::arg("n"), py::arg("delta"));

  m.def(
      "estimate_point_mass",
      [](const std::string& model, double nu, const std::vector<std::string>& samples,
         const std::string& u, double eps, const std::string& delta_mode, double delta,
         bool boost) {
        popre::SampleBatch batch{{}, make_model(model, nu), static_cast<int>(u.size())};
        for (const std::string& s : samples) batch.items.emplace_back(s);
        const popre::EstimateReport r = popre::estimate_point_mass(
            batch, popre::BitString(u), eps,
            delta_mode == "manual" ? popre::DeltaMode::Manual : popre::DeltaMode::Oracle, delta,
            boost);
        py::dict d;
        d["target"] = r.target.str();
        d["estimate"] = r.estimate;
        d["eps"] = r.eps;
        d["samples_used"] = r.samples_used;
        d["delta_used"] = r.delta_used;
        d["clamped"] = r.clamped;
        d["repetitions"] = r.repetitions;
        return d;
      },
      py::arg("model"), py::arg("nu"), py::arg("samples"), py::arg("u"), py::arg("eps"),
      py::arg("delta_mode") = "oracle", py::arg("delta") = 0.0, py::arg("boost") = false);

  m.def(
      "recover_distribution",
      [](const std::string& model, double nu, int n,
         const std::vector<std::pair<std::string, double>>& dist, double eps, std::uint64_t seed) {
        const popre::NoiseModel nm = make_model(model, nu);
        popre::ChannelSampler sampler(make_distribution(dist), nm, popre::Rng(seed));
        const popre::RecoveryResult r = popre::recover_distribution(sampler, nm, n, eps);
        std::vector<std::pair<std::string, double>> out;
        for (const auto& [x, p] : r.entries) out.emplace_back(x.str(), p);
        return out;
      },
      py::arg("model"), py::arg("nu"), py::arg("n"), py::arg("dist"), py::arg("eps"),
      py::arg("seed") = 0);

  m.def(
      "sup_on_region",
      [](const std::vector<double>& coeffs, const std::string& region, double p1, double p2) {
        const popre::SupResult s = popre::sup_on_region(coeffs, make_region(region, p1, p2));
        py::dict d;
        d["value"] = s.value;
        d["error_bound"] = s.error_bound;
        d["param"] = s.param;
        return d;
      },
      py::arg("coeffs"), py::arg("region") = "unit_circle", py::arg("p1") = 0.0,
      py::arg("p2") = 0.0);

  m.def(
      "construct_repeated_root_poly",
      [](int m_deg, int t) {
        const popre::RepeatedRootPoly p = popre::construct_repeated_root_poly(m_deg, t);
        py::dict d;
        d["coeffs"] = p.coeffs;
        d["m"] = p.m;
        d["t"] = p.t;
        d["a0_level"] = p.a0_level;
        d["certified"] = p.certified;
        return d;
      },
      py::arg("m"), py::arg("t"));

  m.def(
      "theory_bounds",
      [](const std::string& model, double nu, int n, double eps) {
        return popre::io::to_json(popre::theory_bounds(make_model(model, nu), n, eps)).dump();
      },
      py::arg("model"), py::arg("nu"), py::arg("n"), py::arg("eps"),
      "Unit-constant bound record, JSON-encoded.");

  m.def(
      "fit_power_law",
      [](const std::vector<double>& xs, const std::vector<double>& ys, const std::string& mode) {
        const popre::FitResult f = popre::fit_power_law(
            xs, ys, mode == "exponent" ? popre::FitMode::Exponent : popre::FitMode::PowerLaw);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["r_squared"] = f.r_squared;
        d["residuals"] = f.residuals;
        return d;
      },
      py::arg("xs"), py::arg("ys"), py::arg("mode") = "power_law");
}
