#include "popre/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "popre/format.hpp"

namespace popre::io {

void write_sample_file(std::ostream& os, const SampleBatch& batch) {
  os << "# model=" << to_string(batch.model.kind) << " nu=" << format_double(batch.model.nu)
     << " n=" << batch.n << '\n';
  for (const NoisyString& y : batch.items) os << y.str() << '\n';
}

SampleBatch load_sample_file(std::istream& is) {
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line)) throw ParseError("sample file is empty", 0);
  ++lineno;

  std::string model_str;
  double nu = -1.0;
  int n = -1;
  {
    std::istringstream hs(line);
    std::string tok;
    hs >> tok;
    if (tok != "#") throw ParseError("line 1: expected header '# model=... nu=... n=...'", 1);
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("line 1: malformed header token '" + tok + "'", 1);
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      try {
        if (key == "model")
          model_str = val;
        else if (key == "nu")
          nu = std::stod(val);
        else if (key == "n")
          n = std::stoi(val);
        else
          throw ParseError("line 1: unknown header key '" + key + "'", 1);
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError("line 1: cannot parse header value '" + val + "'", 1);
      }
    }
  }
  if (model_str.empty() || nu < 0.0 || n < 0) throw ParseError("line 1: header missing model, nu or n", 1);

  NoiseKind kind;
  try {
    kind = noise_kind_from_string(model_str);
  } catch (const std::exception& e) {
    throw ParseError(std::string("line 1: ") + e.what(), 1);
  }
  NoiseModel model = [&] {
    try {
      return NoiseModel(kind, nu);
    } catch (const std::exception& e) {
      throw ParseError(std::string("line 1: ") + e.what(), 1);
    }
  }();

  SampleBatch batch{{}, model, n};
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (static_cast<int>(line.size()) != n)
      throw ParseError("line " + std::to_string(lineno) + ": sample length " +
                           std::to_string(line.size()) + " does not match n=" + std::to_string(n),
                       lineno);
    NoisyString y = [&] {
      try {
        return NoisyString(line);
      } catch (const std::exception& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
      }
    }();
    if (y.has_erasures() && kind != NoiseKind::Erasure)
      throw ParseError("line " + std::to_string(lineno) + ": '?' symbol under a bit-flip model", lineno);
    batch.items.push_back(std::move(y));
  }
  return batch;
}

Distribution load_distribution_json(std::istream& is, bool renormalize) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("distribution spec: ") + e.what(), 0);
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
    throw ParseError("distribution spec must be an object with an 'entries' array", 0);

  Distribution dist;
  for (const auto& entry : doc["entries"]) {
    if (!entry.contains("x") || !entry.contains("p"))
      throw ParseError("distribution entry needs 'x' and 'p'", 0);
    dist.entries.emplace_back(BitString(entry["x"].get<std::string>()), entry["p"].get<double>());
  }
  if (doc.contains("n"))
    dist.n = doc["n"].get<int>();
  else if (!dist.entries.empty())
    dist.n = dist.entries.front().first.size();
  else
    throw ParseError("distribution spec needs 'n' or at least one entry", 0);

  if (renormalize) {
    double sum = 0.0;
    for (const auto& [x, p] : dist.entries) sum += p;
    if (!(sum > 0.0)) throw ParseError("distribution has no mass to normalize", 0);
    for (auto& [x, p] : dist.entries) p /= sum;
  }
  dist.validate();
  return dist;
}

void write_distribution_json(std::ostream& os, const Distribution& dist) {
  json doc;
  doc["n"] = dist.n;
  doc["entries"] = json::array();
  for (const auto& [x, p] : dist.entries) doc["entries"].push_back({{"x", x.str()}, {"p", p}});
  os << doc.dump(2) << '\n';
}

json to_json(const EstimateReport& report) {
  return json{{"target", report.target.str()},   {"estimate", report.estimate},
              {"eps", report.eps},               {"samples_used", report.samples_used},
              {"delta_used", report.delta_used}, {"clamped", report.clamped},
              {"repetitions", report.repetitions}};
}

json to_json(const EtaReport& report) {
  return json{{"model", to_string(report.model.kind)},
              {"nu", report.model.nu},
              {"n", report.n},
              {"eps", report.eps},
              {"eta", report.eta},
              {"circle_sup", report.circle_sup},
              {"circle_sup_error", report.circle_sup_error},
              {"certificate", report.certificate.c}};
}

json to_json(const RecoveryResult& result) {
  json entries = json::array();
  for (const auto& [x, p] : result.entries) entries.push_back({{"x", x.str()}, {"p", p}});
  return json{{"eps", result.eps}, {"entries", entries}};
}

json to_json(const FitResult& fit) {
  return json{{"predictor", fit.predictor},
              {"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r_squared", fit.r_squared},
              {"residuals", fit.residuals}};
}

json to_json(const BoundCheck& check) {
  return json{{"name", check.name},     {"measured", check.measured},
              {"measured_error", check.measured_error}, {"bound", check.bound},
              {"slack", check.slack},   {"pass", check.pass}};
}

json to_json(const RootBoundsRecord& record) {
  return json{{"k", record.k},
              {"segment", to_json(record.segment)},
              {"arc", to_json(record.arc)},
              {"segment_scale", record.segment_scale},
              {"arc_scale", record.arc_scale}};
}

json to_json(const ThreeCircleRecord& record) {
  return json{{"a", record.a},
              {"sup_disk", record.sup_disk},     {"err_disk", record.err_disk},
              {"sup_b1", record.sup_b1},         {"err_b1", record.err_b1},
              {"sup_b2", record.sup_b2},         {"err_b2", record.err_b2},
              {"sup_b4", record.sup_b4},         {"err_b4", record.err_b4},
              {"hadamard", to_json(record.hadamard)},
              {"corollary", to_json(record.corollary)}};
}

json to_json(const TheoryBounds& tb) {
  return json{{"model", to_string(tb.model)},
              {"nu", tb.nu},
              {"n", tb.n},
              {"eps", tb.eps},
              {"exponent_bitflip_lo", tb.exponent_bitflip_lo},
              {"exponent_bitflip_hi", tb.exponent_bitflip_hi},
              {"exponent_erasure", tb.exponent_erasure},
              {"bitflip_window_ok", tb.bitflip_window_ok},
              {"bitflip_upper_ok", tb.bitflip_upper_ok},
              {"erasure_lower_ok", tb.erasure_lower_ok},
              {"erasure_upper_ok", tb.erasure_upper_ok},
              {"hypothesis_ok", tb.hypothesis_ok},
              {"m_bitflip", tb.m_bitflip},
              {"t_bitflip", tb.t_bitflip},
              {"theta_star_bitflip", tb.theta_star_bitflip},
              {"theta_star_bitflip_lower", tb.theta_star_bitflip_lower},
              {"m_erasure", tb.m_erasure},
              {"t_erasure", tb.t_erasure},
              {"theta_erasure", tb.theta_erasure}};
}

}  // namespace popre::io
