#ifndef PIE_SERIALIZE_HPP
#define PIE_SERIALIZE_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pie/convert.hpp"
#include "pie/lpi.hpp"
#include "pie/model.hpp"
#include "pie/numeric.hpp"

namespace pie {

/// Alphabetically-ordered JSON; object key order is canonical by
/// construction, so equal specs dump to identical strings.
using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Named scalar parameters substitutable into coefficient entries.
using ParamMap = std::map<std::string, double>;

inline constexpr const char* kToolVersion = "1.0.0";

// ---- polynomial schema ----
// {"rows", "cols", "entries": [{"row", "col", "coeffs": [...]}]} for one
// variable and the same with "grid": [[...], ...] (c[p][q] of s^p theta^q)
// for two. A coefficient is a plain number or {"param": name, "scale": k}.
Json toJson(const MatPoly1& p);
Json toJson(const MatPoly2& p);
MatPoly1 poly1FromJson(const Json& j, const ParamMap& params = {});
MatPoly2 poly2FromJson(const Json& j, const ParamMap& params = {});

/// Constant matrices reuse the one-variable schema with degree-0 entries.
Json matrixToJson(const Matrix& m);
Matrix matrixFromJson(const Json& j, const ParamMap& params = {});

/// Dense numeric matrix as an array of row arrays (report payloads).
Json denseToJson(const Matrix& m);

// ---- spec files ----
// {"domain": [a,b], "n": [n0,n1,n2], "dynamics": {"A0","A1","A2"},
//  "bc": {"B","BI"}, "parameters": {name: value, ...}}. Unknown keys are
// rejected at every level; A1/A2 may be omitted when zero. Serialization is
// canonical: parameters resolved, entries sorted, keys alphabetical.
Json specToJson(const PDESpec& spec);
PDESpec specFromJson(const Json& j, const ParamMap& overrides = {});
std::vector<std::string> parameterNames(const Json& specJson);
PDESpec loadSpecFile(const std::string& path, const ParamMap& overrides = {});
void saveSpecFile(const std::string& path, const PDESpec& spec);

/// 64-bit FNV-1a over the canonical dump; identifies a PDESpec in reports.
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t specHash(const PDESpec& spec);
std::string specHashHex(const PDESpec& spec);

// ---- operator / system kernels ----
Json toJson(const PIOperator& p);
Json toJson(const PIESystem& sys);

// ---- report payloads ----
std::string verdictString(Verdict v);
Json toJson(const AdmissibilityReport& rep);
Json toJson(const StabilityCertificate& cert);
Json toJson(const VerificationReport& rep);
Json toJson(const Spectrum& spec);

/// Report skeleton: version, command, spec hash, empty stage map, timing.
Json makeReport(const std::string& command, const PDESpec& spec);

/// Structural schema check: required top-level fields, every number finite,
/// verdict strings drawn from the fixed enum. Throws ParseError on violation.
void validateReport(const Json& report);

/// Named fixture as a spec file; "mckendrick" and "dirichlet-diffusion" carry
/// their scalar as a named parameter so the file drives bisection directly.
Json fixtureJson(const std::string& name,
                 const std::map<std::string, double>& params);

}  // namespace pie

#endif  // PIE_SERIALIZE_HPP
