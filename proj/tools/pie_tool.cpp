// Command-line front end: load PDE spec files, run the admissibility /
// conversion / stability / spectrum / simulation / bisection pipeline, and
// emit human-readable text plus machine-readable JSON reports.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pie/fixtures.hpp"
#include "pie/lpi.hpp"
#include "pie/numeric.hpp"
#include "pie/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;     // schema violations, solver failure
constexpr int kExitNegative = 2;  // not admissible / no certificate

struct Output {
  bool json = false;            // print the JSON report instead of text
  std::string reportPath;       // also write the JSON report here
};

void addOutputFlags(CLI::App* cmd, Output& out) {
  cmd->add_flag("--json", out.json, "print the JSON report instead of text");
  cmd->add_option("--report", out.reportPath, "write the JSON report to a file");
}

int emit(const pie::Json& report, const Output& out, const std::string& text,
         int code) {
  pie::validateReport(report);
  if (!out.reportPath.empty()) {
    std::ofstream f(out.reportPath);
    if (!f) throw pie::ParseError("cannot write report: " + out.reportPath);
    f << report.dump(2) << '\n';
  }
  if (out.json)
    std::cout << report.dump(2) << '\n';
  else
    std::cout << text;
  return code;
}

pie::ParamMap parseSets(const std::vector<std::string>& sets) {
  pie::ParamMap out;
  for (const std::string& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw pie::ParseError("--set expects name=value, got \"" + s + "\"");
    try {
      out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw pie::ParseError("--set: bad numeric value in \"" + s + "\"");
    }
  }
  return out;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

pie::Json loadSpecJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pie::ParseError("cannot open spec file: " + path);
  try {
    return pie::Json::parse(in);
  } catch (const pie::Json::parse_error& e) {
    throw pie::ParseError(path + ": " + e.what());
  }
}

// resolve the free parameter name for bisection: --param wins, otherwise the
// file must declare exactly one parameter
std::string freeParameter(const pie::Json& specJson, std::string requested) {
  std::vector<std::string> names = pie::parameterNames(specJson);
  if (!requested.empty()) {
    for (const std::string& n : names)
      if (n == requested) return requested;
    throw pie::ParseError("spec file does not declare parameter \"" +
                          requested + "\"");
  }
  if (names.size() != 1)
    throw pie::ParseError(
        "bisect needs a spec file with exactly one parameter, or --param");
  return names.front();
}

int runCheck(const std::string& path, const pie::ParamMap& sets,
             const Output& out) {
  Timer timer;
  pie::PDESpec spec = pie::loadSpecFile(path, sets);
  pie::ValidationResult val = pie::validate(spec);
  pie::Json report = pie::makeReport("check", spec);
  std::ostringstream text;
  if (!val.valid) {
    pie::Json stage;
    stage["valid"] = false;
    stage["errors"] = val.errors;
    report["stages"]["validation"] = stage;
    report["timingSeconds"] = timer.seconds();
    text << "spec invalid:\n";
    for (const std::string& e : val.errors) text << "  " << e << '\n';
    return emit(report, out, text.str(), kExitNegative);
  }
  pie::AdmissibilityReport rep = pie::checkAdmissibility(spec);
  report["stages"]["validation"] = {{"valid", true}};
  report["stages"]["admissibility"] = pie::toJson(rep);
  report["timingSeconds"] = timer.seconds();
  text << (rep.admissible ? "admissible" : "not admissible")
       << "  sigma_min=" << rep.sigmaMin << "  cond=" << rep.conditionNumber
       << '\n';
  return emit(report, out, text.str(), rep.admissible ? kExitOk : kExitNegative);
}

int runConvert(const std::string& path, const pie::ParamMap& sets,
               const std::string& outPath, const Output& out) {
  Timer timer;
  pie::PDESpec spec = pie::loadSpecFile(path, sets);
  pie::PIESystem sys = pie::convert(spec);
  pie::Json report = pie::makeReport("convert", spec);
  report["stages"]["pie"] = pie::toJson(sys);
  report["timingSeconds"] = timer.seconds();
  if (!outPath.empty()) {
    std::ofstream f(outPath);
    if (!f) throw pie::ParseError("cannot write kernels: " + outPath);
    f << pie::toJson(sys).dump(2) << '\n';
  }
  std::ostringstream text;
  text << "PIE kernels built: nx=" << sys.layout.nx()
       << "  T degrees (R0,R1,R2)=(" << sys.T.R0().degree() << ','
       << sys.T.R1().totalDegree() << ',' << sys.T.R2().totalDegree()
       << ")  A degrees=(" << sys.A.R0().degree() << ','
       << sys.A.R1().totalDegree() << ',' << sys.A.R2().totalDegree()
       << ")  path discrepancy=" << sys.pathDiscrepancy << '\n';
  return emit(report, out, text.str(), kExitOk);
}

// optional external-solver cross-check: when PIE_SDP_EXEC is set, the
// assembled problem is exported in the sparse interchange format and the
// executable is invoked on it; its exit status is recorded in the report
void externalCrossCheck(const pie::PIESystem& sys,
                        const pie::StabilityCertificate& cert,
                        pie::Json& stage) {
  const char* exe = std::getenv("PIE_SDP_EXEC");
  if (exe == nullptr || *exe == '\0') return;
  pie::LPIProblem prob =
      pie::assemble(sys, cert.dP, cert.dH, cert.alpha, cert.delta);
  const std::string file = "lpi_problem.sdpa";
  std::ofstream f(file);
  pie::writeSDPA(prob.sdp, f);
  f.close();
  int rc = std::system((std::string(exe) + " " + file).c_str());
  stage["externalSolver"] = {{"command", std::string(exe) + " " + file},
                             {"exitStatus", rc}};
}

int runStability(const std::string& path, const pie::ParamMap& sets, int deg,
                 int maxDeg, double alpha, double delta, const Output& out) {
  Timer timer;
  pie::PDESpec spec = pie::loadSpecFile(path, sets);
  pie::PIESystem sys = pie::convert(spec);
  pie::LPIOptions opts;
  opts.dP = deg;
  opts.maxDP = maxDeg < deg ? deg : maxDeg;
  opts.alpha = alpha;
  opts.delta = delta;
  pie::StabilityCertificate cert = pie::analyzeStability(sys, opts);

  pie::Json report = pie::makeReport("stability", spec);
  pie::Json stage = pie::toJson(cert);
  std::ostringstream text;
  int code = kExitError;
  switch (cert.verdict) {
    case pie::Verdict::CertifiedStable: {
      pie::VerificationReport ver = pie::verifyCertificate(sys, cert);
      stage["verification"] = pie::toJson(ver);
      code = ver.verified ? kExitOk : kExitError;
      text << "certified stable (dP=" << cert.dP << ", dH=" << cert.dH
           << ", residual=" << cert.equalityResidual
           << ", verification=" << (ver.verified ? "passed" : "FAILED")
           << ")\n";
      break;
    }
    case pie::Verdict::InfeasibleAtDegree:
      code = kExitNegative;
      text << "no certificate at this degree (dP<=" << opts.maxDP
           << "); the test is one-sided and does not prove instability\n";
      break;
    default:
      code = kExitError;
      text << "solver failure: " << cert.message << '\n';
      break;
  }
  externalCrossCheck(sys, cert, stage);
  report["stages"]["certificate"] = std::move(stage);
  report["timingSeconds"] = timer.seconds();
  return emit(report, out, text.str(), code);
}

int runSpectrum(const std::string& path, const pie::ParamMap& sets, int grid,
                const std::string& csvPath, const Output& out) {
  Timer timer;
  pie::PDESpec spec = pie::loadSpecFile(path, sets);
  pie::PIESystem sys = pie::convert(spec);
  pie::Spectrum sp;
  int usedGrid = grid;
  if (grid > 0) {
    sp = pie::spectrum(
        pie::discretizePIE(sys, pie::makeGrid(grid, spec.a, spec.b)));
  } else {
    pie::RefinedSpectrum r = pie::refinedSpectrum(sys);
    sp = r.spec;
    usedGrid = r.gridSize;
  }
  if (!csvPath.empty()) {
    std::ofstream f(csvPath);
    if (!f) throw pie::ParseError("cannot write csv: " + csvPath);
    pie::writeSpectrumCsv(f, sp);
  }
  pie::Json report = pie::makeReport("spectrum", spec);
  pie::Json stage = pie::toJson(sp);
  stage["gridSize"] = usedGrid;
  report["stages"]["spectrum"] = std::move(stage);
  report["timingSeconds"] = timer.seconds();
  std::ostringstream text;
  text << "rightmost eigenvalue " << sp.rightmost << " (N=" << usedGrid << ", "
       << sp.finite.size() << " finite, " << sp.spuriousCount
       << " pencil-infinite)\n";
  return emit(report, out, text.str(), kExitOk);
}

int runSimulate(const std::string& path, const pie::ParamMap& sets, int grid,
                double tmax, double dt, const std::string& csvPath,
                const Output& out) {
  Timer timer;
  pie::PDESpec spec = pie::loadSpecFile(path, sets);
  pie::PIESystem sys = pie::convert(spec);
  pie::CollocationGrid g = pie::makeGrid(grid, spec.a, spec.b);
  pie::DiscretizedPIE d = pie::discretizePIE(sys, g);
  pie::Trajectory traj =
      pie::simulate(d, pie::Vector::Ones(d.nx * g.N), tmax, dt);
  if (!csvPath.empty()) {
    std::ofstream f(csvPath);
    if (!f) throw pie::ParseError("cannot write csv: " + csvPath);
    pie::writeTrajectoryCsv(f, traj, d.nx, g.N);
  }
  const int last = static_cast<int>(traj.times.size()) - 1;
  pie::Json report = pie::makeReport("simulate", spec);
  report["stages"]["simulation"] = {{"gridSize", grid},
                                    {"tmax", tmax},
                                    {"dt", dt},
                                    {"initialNorm", traj.xNorm(0)},
                                    {"finalNorm", traj.xNorm(last)}};
  report["timingSeconds"] = timer.seconds();
  std::ostringstream text;
  text << "simulated to t=" << traj.times(last) << ": |x| "
       << traj.xNorm(0) << " -> " << traj.xNorm(last) << '\n';
  return emit(report, out, text.str(), kExitOk);
}

int runBisect(const std::string& path, std::string param, double lo, double hi,
              double tol, int deg, int maxDeg, bool spectral,
              const Output& out) {
  Timer timer;
  pie::Json specJson = loadSpecJson(path);
  param = freeParameter(specJson, param);
  auto family = [&](double x) {
    return pie::specFromJson(specJson, {{param, x}});
  };
  pie::LPIOptions opts;
  opts.dP = deg;
  opts.maxDP = maxDeg < deg ? deg : maxDeg;
  pie::BisectionResult res = pie::bisectParameter(family, lo, hi, tol, opts);

  pie::Json report = pie::makeReport("bisect", family(lo));
  pie::Json stage;
  stage["parameter"] = param;
  stage["lpiThreshold"] = res.threshold;
  stage["monotone"] = res.monotone;
  if (!res.note.empty()) stage["note"] = res.note;
  pie::Json evals = pie::Json::array();
  for (const auto& [x, ok] : res.evaluations)
    evals.push_back({{"value", x}, {"certified", ok}});
  stage["evaluations"] = std::move(evals);

  std::ostringstream text;
  text << "LPI threshold for " << param << ": " << res.threshold << " ("
       << res.evaluations.size() << " certification runs)\n";
  if (!res.monotone)
    text << "warning: verdicts were not monotone along the sweep: " << res.note
         << '\n';
  if (spectral) {
    pie::SpectralBisection sb = pie::bisectRightmost(family, lo, hi, tol);
    stage["spectralThreshold"] = sb.threshold;
    text << "spectral-oracle threshold: " << sb.threshold << '\n';
  }
  report["stages"]["bisection"] = std::move(stage);
  report["timingSeconds"] = timer.seconds();
  return emit(report, out, text.str(), kExitOk);
}

int runFixture(const std::string& name, const pie::ParamMap& sets,
               const std::string& outPath) {
  pie::Json j = pie::fixtureJson(name, sets);
  if (outPath.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream f(outPath);
    if (!f) throw pie::ParseError("cannot write spec file: " + outPath);
    f << j.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "PDE stability toolkit: converts linear PDE specs to partial integral "
      "equations and certifies exponential stability"};
  app.require_subcommand(1);

  std::string specPath, csvPath, outPath, param, fixtureName;
  std::vector<std::string> sets;
  Output out;
  int deg = 1, maxDeg = 3, grid = 32;
  double alpha = 1e-4, delta = 1e-4, tmax = 1.0, dt = 1e-3;
  double lo = 0.0, hi = 1.0, tol = 1e-2;
  bool spectral = false;

  auto addCommon = [&](CLI::App* cmd, bool needsSpec = true) {
    if (needsSpec)
      cmd->add_option("spec", specPath, "spec file (JSON)")->required();
    cmd->add_option("--set", sets, "parameter override name=value");
    addOutputFlags(cmd, out);
  };

  CLI::App* check = app.add_subcommand("check", "validate and test admissibility");
  addCommon(check);

  CLI::App* convert = app.add_subcommand("convert", "build the PIE kernels");
  addCommon(convert);
  convert->add_option("--out", outPath, "write the kernel JSON to a file");

  CLI::App* stability =
      app.add_subcommand("stability", "search for a stability certificate");
  addCommon(stability);
  stability->add_option("--deg", deg, "starting Gram degree for P");
  stability->add_option("--max-deg", maxDeg, "escalation cap on the P degree");
  stability->add_option("--alpha", alpha, "coercivity margin");
  stability->add_option("--delta", delta, "decrease-rate margin");

  CLI::App* spectrum =
      app.add_subcommand("spectrum", "collocation eigenvalues of the pencil");
  addCommon(spectrum);
  spectrum->add_option("--grid", grid, "grid size (0 = auto-refine)");
  spectrum->add_option("--csv", csvPath, "write eigenvalues as CSV");

  CLI::App* simulate =
      app.add_subcommand("simulate", "trapezoidal time stepping");
  addCommon(simulate);
  simulate->add_option("--grid", grid, "grid size");
  simulate->add_option("--tmax", tmax, "final time");
  simulate->add_option("--dt", dt, "time step");
  simulate->add_option("--csv", csvPath, "write the trajectory as CSV");

  CLI::App* bisect = app.add_subcommand(
      "bisect", "bisection on certification verdicts over a free parameter");
  addCommon(bisect);
  bisect->add_option("--param", param, "free parameter name");
  bisect->add_option("--lo", lo, "bracket lower end")->required();
  bisect->add_option("--hi", hi, "bracket upper end")->required();
  bisect->add_option("--tol", tol, "bracket width tolerance");
  bisect->add_option("--deg", deg, "starting Gram degree for P");
  bisect->add_option("--max-deg", maxDeg, "escalation cap on the P degree");
  bisect->add_flag("--spectral", spectral,
                   "also bisect the spectral-oracle rightmost eigenvalue");

  CLI::App* fixture =
      app.add_subcommand("fixture", "write a named example spec file");
  fixture->add_option("name", fixtureName,
                      "mckendrick | dirichlet-diffusion | rd-observer")
      ->required();
  fixture->add_option("--set", sets, "fixture parameter name=value");
  fixture->add_option("--out", outPath, "output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    pie::ParamMap overrides = parseSets(sets);
    if (check->parsed()) return runCheck(specPath, overrides, out);
    if (convert->parsed())
      return runConvert(specPath, overrides, outPath, out);
    if (stability->parsed())
      return runStability(specPath, overrides, deg, maxDeg, alpha, delta, out);
    if (spectrum->parsed())
      return runSpectrum(specPath, overrides, grid, csvPath, out);
    if (simulate->parsed())
      return runSimulate(specPath, overrides, grid, tmax, dt, csvPath, out);
    if (bisect->parsed())
      return runBisect(specPath, param, lo, hi, tol, deg, maxDeg, spectral,
                       out);
    if (fixture->parsed()) return runFixture(fixtureName, overrides, outPath);
  } catch (const pie::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const pie::ConversionError& e) {
    std::cerr << "not admissible: " << e.what() << '\n';
    return kExitNegative;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
