#pragma once
//
// JSON forms of problems, groups, sampling configs and reports.
//
//   problem: {n, r, N, a, b, alpha?, beta?, constants{}, phi[], L[],
//             constraints[{g, xi, kind}], omega[{lo?, hi?}],
//             stateDomain?[{lo?, hi?}]}
//   group:   {T, X[], U[], epsilon, uDot?[], name?}
//   samples: {intervals{var: [lo, hi]}, default?: [lo, hi], samples, seed,
//             tolerance, skipDomainErrors?}
//

#include <filesystem>
#include <string>

#include <json.hpp>

#include "noether/extremal.hpp"
#include "noether/noether.hpp"
#include "noether/symmetry.hpp"

namespace noether::io {

using nlohmann::json;

/// Input file errors (unreadable file, malformed JSON with byte position,
/// missing keys, bad expressions).
class InputError : public Error {
public:
  using Error::Error;
};

json readJsonFile(const std::filesystem::path& path);
void writeJsonFile(const std::filesystem::path& path, const json& value);

ControlProblem problemFromJson(const json& j);
json toJson(const ControlProblem& p);

OneParamGroup groupFromJson(const json& j);
json toJson(const OneParamGroup& g);

SampleConfig sampleConfigFromJson(const json& j);
json toJson(const SampleConfig& cfg);

json toJson(const InvarianceReport& report);
json toJson(const ConservationLaw& law);
json toJson(const ConservationReport& report);
json toJson(const HamiltonianIdentityReport& report);

std::string formName(ProblemForm form);

}  // namespace noether::io
