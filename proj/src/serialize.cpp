#include "pie/serialize.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "pie/fixtures.hpp"

namespace pie {

namespace {

void requireObject(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
}

void checkKeys(const Json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ParseError(where + ": unknown key \"" + item.key() + "\"");
  }
}

const Json& field(const Json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw ParseError(where + ": missing required key \"" + key + "\"");
  return *it;
}

double numberAt(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite number");
  return v;
}

int intAt(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<int>();
}

// a coefficient: plain number or {"param": name, "scale": k}
double coeffValue(const Json& j, const ParamMap& params,
                  const std::string& where) {
  if (j.is_number()) return numberAt(j, where);
  if (j.is_object()) {
    checkKeys(j, where, {"param", "scale"});
    const Json& name = field(j, where, "param");
    if (!name.is_string()) throw ParseError(where + ": \"param\" must name a parameter");
    auto it = params.find(name.get<std::string>());
    if (it == params.end())
      throw ParseError(where + ": undefined parameter \"" +
                       name.get<std::string>() + "\"");
    double scale = j.contains("scale") ? numberAt(j["scale"], where + ".scale") : 1.0;
    return scale * it->second;
  }
  throw ParseError(where + ": coefficient must be a number or a param reference");
}

struct EntryHeader {
  int row, col;
};

EntryHeader entryHeader(const Json& e, int rows, int cols,
                        const std::string& where, const char* payloadKey) {
  requireObject(e, where);
  checkKeys(e, where, {"row", "col", payloadKey});
  int r = intAt(field(e, where, "row"), where + ".row");
  int c = intAt(field(e, where, "col"), where + ".col");
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw ParseError(where + ": entry index out of range");
  return {r, c};
}

void shape(const Json& j, const std::string& where, int& rows, int& cols) {
  requireObject(j, where);
  rows = intAt(field(j, where, "rows"), where + ".rows");
  cols = intAt(field(j, where, "cols"), where + ".cols");
  if (rows < 0 || cols < 0) throw ParseError(where + ": negative dimensions");
  if (!field(j, where, "entries").is_array())
    throw ParseError(where + ": \"entries\" must be an array");
}

Json coeffsJson(const Coeffs1& c) {
  Json out = Json::array();
  for (double v : c) out.push_back(v);
  return out;
}

}  // namespace

Json toJson(const MatPoly1& p) {
  Json j;
  j["rows"] = p.rows();
  j["cols"] = p.cols();
  Json entries = Json::array();
  for (const auto& [ij, coeffs] : p.entries()) {
    Json e;
    e["row"] = ij.first;
    e["col"] = ij.second;
    e["coeffs"] = coeffsJson(coeffs);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

Json toJson(const MatPoly2& p) {
  Json j;
  j["rows"] = p.rows();
  j["cols"] = p.cols();
  Json entries = Json::array();
  for (const auto& [ij, grid] : p.entries()) {
    Json e;
    e["row"] = ij.first;
    e["col"] = ij.second;
    Json g = Json::array();
    for (const auto& row : grid) g.push_back(coeffsJson(row));
    e["grid"] = std::move(g);
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

MatPoly1 poly1FromJson(const Json& j, const ParamMap& params) {
  int rows, cols;
  shape(j, "poly", rows, cols);
  MatPoly1 p(rows, cols);
  checkKeys(j, "poly", {"rows", "cols", "entries"});
  for (const Json& e : j["entries"]) {
    EntryHeader h = entryHeader(e, rows, cols, "poly.entry", "coeffs");
    const Json& cj = field(e, "poly.entry", "coeffs");
    if (!cj.is_array()) throw ParseError("poly.entry: \"coeffs\" must be an array");
    if (!p.entry(h.row, h.col).empty())
      throw ParseError("poly: duplicate entry (" + std::to_string(h.row) + "," +
                       std::to_string(h.col) + ")");
    Coeffs1 c;
    c.reserve(cj.size());
    for (const Json& v : cj) c.push_back(coeffValue(v, params, "poly.coeff"));
    p.set(h.row, h.col, std::move(c));
  }
  return p;
}

MatPoly2 poly2FromJson(const Json& j, const ParamMap& params) {
  int rows, cols;
  shape(j, "poly2", rows, cols);
  MatPoly2 p(rows, cols);
  checkKeys(j, "poly2", {"rows", "cols", "entries"});
  for (const Json& e : j["entries"]) {
    EntryHeader h = entryHeader(e, rows, cols, "poly2.entry", "grid");
    const Json& gj = field(e, "poly2.entry", "grid");
    if (!gj.is_array()) throw ParseError("poly2.entry: \"grid\" must be an array");
    if (!p.entry(h.row, h.col).empty())
      throw ParseError("poly2: duplicate entry (" + std::to_string(h.row) + "," +
                       std::to_string(h.col) + ")");
    for (std::size_t a = 0; a < gj.size(); ++a) {
      if (!gj[a].is_array())
        throw ParseError("poly2.entry: grid rows must be arrays");
      for (std::size_t b = 0; b < gj[a].size(); ++b)
        p.accumulate(h.row, h.col, static_cast<int>(a), static_cast<int>(b),
                     coeffValue(gj[a][b], params, "poly2.coeff"));
    }
  }
  p.canonicalize();
  return p;
}

Json matrixToJson(const Matrix& m) {
  MatPoly1 p(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k)
      if (m(i, k) != 0.0) p.set(i, k, {m(i, k)});
  return toJson(p);
}

Matrix matrixFromJson(const Json& j, const ParamMap& params) {
  MatPoly1 p = poly1FromJson(j, params);
  if (p.degree() > 0)
    throw ParseError("matrix: constant matrix required, found s-dependence");
  return p.eval(0.0);
}

Json denseToJson(const Matrix& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Json specToJson(const PDESpec& spec) {
  Json j;
  j["domain"] = Json::array({spec.a, spec.b});
  j["n"] = Json::array({spec.n0, spec.n1, spec.n2});
  Json dyn;
  dyn["A0"] = toJson(spec.A0);
  if (!spec.A1.isZero()) dyn["A1"] = toJson(spec.A1);
  if (!spec.A2.isZero()) dyn["A2"] = toJson(spec.A2);
  j["dynamics"] = std::move(dyn);
  Json bc;
  bc["B"] = matrixToJson(spec.B);
  bc["BI"] = toJson(spec.BI);
  j["bc"] = std::move(bc);
  return j;
}

PDESpec specFromJson(const Json& j, const ParamMap& overrides) {
  requireObject(j, "spec");
  checkKeys(j, "spec", {"domain", "n", "dynamics", "bc", "parameters"});

  ParamMap params;
  if (j.contains("parameters")) {
    const Json& pj = j["parameters"];
    requireObject(pj, "spec.parameters");
    for (const auto& item : pj.items())
      params[item.key()] = numberAt(item.value(), "spec.parameters." + item.key());
  }
  for (const auto& [k, v] : overrides) {
    if (params.find(k) == params.end())
      throw ParseError("spec: override of undeclared parameter \"" + k + "\"");
    params[k] = v;
  }

  PDESpec spec;
  const Json& dom = field(j, "spec", "domain");
  if (!dom.is_array() || dom.size() != 2)
    throw ParseError("spec.domain: expected [a, b]");
  spec.a = numberAt(dom[0], "spec.domain[0]");
  spec.b = numberAt(dom[1], "spec.domain[1]");

  const Json& n = field(j, "spec", "n");
  if (!n.is_array() || n.size() != 3)
    throw ParseError("spec.n: expected [n0, n1, n2]");
  spec.n0 = intAt(n[0], "spec.n[0]");
  spec.n1 = intAt(n[1], "spec.n[1]");
  spec.n2 = intAt(n[2], "spec.n[2]");
  if (spec.n0 < 0 || spec.n1 < 0 || spec.n2 < 0)
    throw ParseError("spec.n: negative state count");
  StateLayout layout{spec.n0, spec.n1, spec.n2};

  const Json& dyn = field(j, "spec", "dynamics");
  requireObject(dyn, "spec.dynamics");
  checkKeys(dyn, "spec.dynamics", {"A0", "A1", "A2"});
  spec.A0 = poly1FromJson(field(dyn, "spec.dynamics", "A0"), params);
  spec.A1 = dyn.contains("A1") ? poly2FromJson(dyn["A1"], params)
                               : MatPoly2::zero(layout.nx(), layout.nD());
  spec.A2 = dyn.contains("A2") ? poly2FromJson(dyn["A2"], params)
                               : MatPoly2::zero(layout.nx(), layout.nD());

  const Json& bc = field(j, "spec", "bc");
  requireObject(bc, "spec.bc");
  checkKeys(bc, "spec.bc", {"B", "BI"});
  spec.B = matrixFromJson(field(bc, "spec.bc", "B"), params);
  spec.BI = poly1FromJson(field(bc, "spec.bc", "BI"), params);
  return spec;
}

std::vector<std::string> parameterNames(const Json& specJson) {
  std::vector<std::string> out;
  if (specJson.is_object() && specJson.contains("parameters") &&
      specJson["parameters"].is_object())
    for (const auto& item : specJson["parameters"].items())
      out.push_back(item.key());
  return out;
}

PDESpec loadSpecFile(const std::string& path, const ParamMap& overrides) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spec file: " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return specFromJson(j, overrides);
}

void saveSpecFile(const std::string& path, const PDESpec& spec) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write spec file: " + path);
  out << specToJson(spec).dump(2) << '\n';
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t specHash(const PDESpec& spec) {
  return fnv1a64(specToJson(spec).dump());
}

std::string specHashHex(const PDESpec& spec) {
  std::ostringstream os;
  os << std::hex << specHash(spec);
  return os.str();
}

Json toJson(const PIOperator& p) {
  Json j;
  j["a"] = p.a();
  j["b"] = p.b();
  j["R0"] = toJson(p.R0());
  j["R1"] = toJson(p.R1());
  j["R2"] = toJson(p.R2());
  return j;
}

Json toJson(const PIESystem& sys) {
  Json j;
  j["n"] = Json::array({sys.layout.n0, sys.layout.n1, sys.layout.n2});
  j["T"] = toJson(sys.T);
  j["A"] = toJson(sys.A);
  Json deg;
  deg["T_R0"] = sys.T.R0().degree();
  deg["T_R1"] = sys.T.R1().totalDegree();
  deg["T_R2"] = sys.T.R2().totalDegree();
  deg["A_R0"] = sys.A.R0().degree();
  deg["A_R1"] = sys.A.R1().totalDegree();
  deg["A_R2"] = sys.A.R2().totalDegree();
  j["degrees"] = std::move(deg);
  j["pathDiscrepancy"] = sys.pathDiscrepancy;
  return j;
}

std::string verdictString(Verdict v) {
  switch (v) {
    case Verdict::CertifiedStable: return "certified_stable";
    case Verdict::InfeasibleAtDegree: return "infeasible_at_degree";
    default: return "solver_failure";
  }
}

Json toJson(const AdmissibilityReport& rep) {
  Json j;
  j["admissible"] = rep.admissible;
  j["sigmaMin"] = std::isfinite(rep.sigmaMin) ? rep.sigmaMin : 0.0;
  // a negative condition number marks a numerically singular B_T
  j["conditionNumber"] =
      std::isfinite(rep.conditionNumber) ? rep.conditionNumber : -1.0;
  j["BT"] = denseToJson(rep.BT);
  return j;
}

Json toJson(const StabilityCertificate& cert) {
  Json j;
  j["verdict"] = verdictString(cert.verdict);
  j["dP"] = cert.dP;
  j["dH"] = cert.dH;
  j["alpha"] = cert.alpha;
  j["delta"] = cert.delta;
  j["equalityResidual"] = cert.equalityResidual;
  j["minEigQP"] = cert.minEigQP;
  j["minEigQH"] = cert.minEigQH;
  j["sdpIterations"] = cert.sdpIterations;
  j["message"] = cert.message;
  j["QP"] = denseToJson(cert.QP);
  j["QH"] = denseToJson(cert.QH);
  return j;
}

Json toJson(const VerificationReport& rep) {
  Json j;
  j["verified"] = rep.verified;
  j["kernelDiscrepancy"] = rep.kernelDiscrepancy;
  j["minSampledMargin"] = rep.minSampledMargin;
  j["minEigQP"] = rep.minEigQP;
  j["minEigQH"] = rep.minEigQH;
  j["failures"] = rep.failures;
  return j;
}

Json toJson(const Spectrum& spec) {
  Json j;
  j["rightmost"] = spec.rightmost;
  j["finiteCount"] = static_cast<int>(spec.finite.size());
  j["spuriousCount"] = spec.spuriousCount;
  Json eigs = Json::array();
  for (const auto& z : spec.finite)
    eigs.push_back(Json::array({z.real(), z.imag()}));
  j["eigenvalues"] = std::move(eigs);
  return j;
}

Json makeReport(const std::string& command, const PDESpec& spec) {
  Json j;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["specHash"] = specHashHex(spec);
  j["stages"] = Json::object();
  j["timingSeconds"] = 0.0;
  return j;
}

namespace {

const char* const kVerdictEnum[] = {"certified_stable", "infeasible_at_degree",
                                    "solver_failure"};

void checkFinite(const Json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw ParseError("report: non-finite number at " + path);
  if (j.is_object()) {
    for (const auto& item : j.items()) {
      if (item.key() == "verdict") {
        bool ok = item.value().is_string();
        if (ok) {
          ok = false;
          for (const char* v : kVerdictEnum)
            if (item.value() == v) ok = true;
        }
        if (!ok)
          throw ParseError("report: verdict outside the fixed enum at " + path);
      }
      checkFinite(item.value(), path + "." + item.key());
    }
  }
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i)
      checkFinite(j[i], path + "[" + std::to_string(i) + "]");
}

}  // namespace

void validateReport(const Json& report) {
  requireObject(report, "report");
  checkKeys(report, "report",
            {"version", "command", "specHash", "stages", "timingSeconds"});
  for (const char* key : {"version", "command", "specHash", "stages",
                          "timingSeconds"})
    field(report, "report", key);
  if (!report["version"].is_string() || !report["command"].is_string() ||
      !report["specHash"].is_string())
    throw ParseError("report: version, command and specHash must be strings");
  if (!report["stages"].is_object())
    throw ParseError("report: stages must be an object");
  double t = numberAt(report["timingSeconds"], "report.timingSeconds");
  if (t < 0.0) throw ParseError("report: negative timing");
  checkFinite(report, "report");
}

Json fixtureJson(const std::string& name,
                 const std::map<std::string, double>& params) {
  PDESpec spec = makeFixture(name, params);
  Json j = specToJson(spec);
  // the scalar fixtures expose their parameter symbolically so the same file
  // drives both single runs and bisection sweeps
  const char* pname = nullptr;
  double value = 0.0;
  if (name == "mckendrick") {
    pname = "c";
    value = params.count("c") ? params.at("c") : 0.0;
  } else if (name == "dirichlet-diffusion") {
    pname = "lambda";
    value = params.count("lambda") ? params.at("lambda") : 0.0;
  }
  if (pname == nullptr) return j;

  j["parameters"] = Json::object();
  j["parameters"][pname] = value;
  Json ref;
  ref["param"] = pname;
  Json& a0 = j["dynamics"]["A0"];
  bool patched = false;
  for (Json& e : a0["entries"])
    if (e["row"] == 0 && e["col"] == 0) {
      if (e["coeffs"].empty()) e["coeffs"].push_back(0.0);
      e["coeffs"][0] = ref;
      patched = true;
    }
  if (!patched) {
    Json e;
    e["row"] = 0;
    e["col"] = 0;
    e["coeffs"] = Json::array({ref});
    a0["entries"].push_back(std::move(e));
  }
  return j;
}

}  // namespace pie
