#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "popre/channel.hpp"
#include "popre/estimate.hpp"
#include "popre/experiments.hpp"
#include "popre/extremal.hpp"
#include "popre/recover.hpp"

namespace popre::io {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

// Sample files: header line '# model=<bitflip|erasure> nu=<float> n=<int>',
// then one string per line over {0,1} (bit-flip) or {0,1,?} (erasure).
void write_sample_file(std::ostream& os, const SampleBatch& batch);
SampleBatch load_sample_file(std::istream& is);

// Distribution specs: {"n":..., "entries":[{"x":"0101","p":0.3},...]}.
// RecoveryResult JSON is accepted too (its "eps" is ignored and n is derived
// from the entries when missing).
Distribution load_distribution_json(std::istream& is, bool renormalize = false);
void write_distribution_json(std::ostream& os, const Distribution& dist);

json to_json(const EstimateReport& report);
json to_json(const EtaReport& report);
json to_json(const RecoveryResult& result);
json to_json(const FitResult& fit);
json to_json(const BoundCheck& check);
json to_json(const RootBoundsRecord& record);
json to_json(const ThreeCircleRecord& record);
json to_json(const TheoryBounds& bounds);

}  // namespace popre::io
