#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "diracspec/direct_spectra.hpp"
#include "diracspec/errors.hpp"
#include "diracspec/glm_krein.hpp"
#include "diracspec/io.hpp"
#include "diracspec/spectral_products.hpp"
#include "diracspec/transform_kernel.hpp"
#include "json.hpp"

namespace dirac::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::string report;
  std::string h_profile;
  int N = 64;
  int M = 256;
  double tol = 1e-6;
  std::string cesaro = "auto";
  std::string solver = "dense";
  std::string diag = "nystrom";
  int threads = -1;
  std::string format = "json";
  bool norming = false;
  double threshold = 0.5;
  double max_l1 = 5e-2;
  double max_lambda = 1e-3;
  double max_alpha = 1e-2;
  int grid = 512;
  int n_max = 0;
  double p = 2.0;
};

// A failure that carries its exit code and, optionally, the report produced
// before the failure was detected.
struct Failure {
  int code;
  Error error;
  std::optional<json> report;
};

int exit_code_for(const Error& e) {
  const std::string& m = e.module();
  const std::string& c = e.condition();
  if (m == "io") return 2;
  if (m == "core" && (c == "InvalidPotential" || c == "StructureViolation" || c == "InvalidGrid")) return 2;
  if (c == "RootNotBracketed" || c == "DuplicateRoot") return 3;
  if (c == "NonPositiveAlpha" || c == "AsymmetricRange" || c == "ValidationFailed") return 4;
  if (c == "NotPositive") return 5;
  if (c == "RoundtripExceeded") return 6;
  if (c == "InvalidArgument" || c == "UsageError") return 2;
  return 1;
}

json error_object(const Error& e) {
  json o;
  o["module"] = e.module();
  o["condition"] = e.condition();
  o["message"] = e.what();
  if (e.has_index()) o["index"] = e.index();
  return o;
}

Executor make_executor(const RunConfig& cfg) {
  int t = cfg.threads;
  if (t < 0) {
    const char* env = std::getenv("DIRAC_SPECT_THREADS");
    t = 0;
    if (env != nullptr && *env != '\0') {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0' || v < 0)
        throw Error("cli", "UsageError", "DIRAC_SPECT_THREADS must be a non-negative integer");
      t = static_cast<int>(v);
    }
  }
  return Executor(static_cast<unsigned>(t));
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << text;
  } else {
    write_text_file(cfg.output, text);
  }
}

void emit_report(const std::string& path, std::ostream& err, const json& rep) {
  const std::string text = rep.dump(1) + "\n";
  if (path.empty()) {
    err << text;
  } else {
    write_text_file(path, text);
  }
}

json residual_json(const ResidualReport& r) {
  json o;
  o["outer_max"] = r.outer_max;
  o["sum_sq"] = r.sum_sq;
  o["quartile_max"] = r.quartile_max;
  return o;
}

std::optional<bool> cesaro_flag(const RunConfig& cfg) {
  if (cfg.cesaro == "on") return true;
  if (cfg.cesaro == "off") return false;
  return std::nullopt;
}

ReconstructionOptions recon_options(const RunConfig& cfg) {
  ReconstructionOptions opt;
  opt.cells = cfg.M;
  opt.cesaro = cesaro_flag(cfg);
  opt.krein.method = cfg.solver == "levinson" ? KreinMethod::levinson : KreinMethod::dense;
  opt.krein.diagonal = cfg.diag == "extrapolate" ? DiagonalRule::extrapolate : DiagonalRule::nystrom;
  return opt;
}

void require_symmetric(const IndexedSeq& s) {
  if (!s.symmetric())
    throw Error("glm_krein", "AsymmetricRange",
                "reconstruction needs a symmetric index range [-N, N], got [" + std::to_string(s.n_min) +
                    ", " + std::to_string(s.n_max) + "]");
}

json reconstruction_report(const Reconstruction& rec, const NormingData& nd) {
  json o;
  o["cells"] = rec.H.cells();
  o["n_max"] = nd.lambda.n_max;
  o["summation"] = rec.H.summation() == Summation::fejer ? "fejer" : "raw";
  o["min_eigenvalue"] = rec.positivity.min_eigenvalue;
  o["positive"] = rec.positivity.pass;
  o["krein_residual"] = rec.krein.residual_norm;
  o["min_rcond"] = rec.krein.min_rcond;
  o["structure_violation"] = rec.recovered.asymmetry;
  json nodes = json::array();
  const int M = rec.H.cells();
  for (int i = 0; i <= M; ++i) {
    const Mat2 Q = rec.krein.diag[static_cast<std::size_t>(i)] * kJ * kB;
    nodes.push_back({static_cast<double>(i) / M, 0.5 * (Q.a11 - Q.a22), 0.5 * (Q.a12 + Q.a21)});
  }
  o["nodes"] = nodes;
  return o;
}

void write_h_profile(const std::string& path, const ToeplitzSlice& H) {
  std::ostringstream os;
  os << std::setprecision(17) << "s,a,b\n";
  const int L = 4 * H.cells();
  for (int m = -L; m <= L; ++m) os << m * H.lattice_step() << ',' << H.a(m) << ',' << H.b(m) << '\n';
  write_text_file(path, os.str());
}

int finish_reconstruction(const RunConfig& cfg, const NormingData& nd, std::ostream& out,
                          std::ostream& err, const Executor& ex) {
  const Reconstruction rec = reconstruct(nd, recon_options(cfg), ex);
  if (!cfg.h_profile.empty()) write_h_profile(cfg.h_profile, rec.H);
  emit(cfg, out, potential_to_json(rec.recovered.potential));
  emit_report(cfg.report, err, reconstruction_report(rec, nd));
  return 0;
}

// ---------------------------------------------------------------- commands

int run_direct(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Executor& ex) {
  const Potential q = load_potential(cfg.input).with_p(cfg.p);
  const SpectrumPair sp = compute_spectra(q, -cfg.N, cfg.N, ex);
  SpectraFile f;
  f.p = q.p();
  f.lambda = sp.lambda;
  f.mu = sp.mu;
  if (cfg.norming) f.alpha = norming_quadrature(q, sp.lambda, ex).alpha;

  if (cfg.format == "csv") {
    std::ostringstream os;
    os << std::setprecision(17) << "n,lambda,mu" << (f.alpha ? ",alpha" : "") << '\n';
    for (int n = -cfg.N; n <= cfg.N; ++n) {
      os << n << ',' << f.lambda[n] << ',' << (*f.mu)[n];
      if (f.alpha) os << ',' << (*f.alpha)[n];
      os << '\n';
    }
    emit(cfg, out, os.str());
  } else {
    emit(cfg, out, spectra_to_json(f));
  }

  json summary;
  const ResidualReport rl = asymptotic_residuals(sp.lambda, ResidualKind::lambda);
  const ResidualReport rm = asymptotic_residuals(sp.mu, ResidualKind::mu);
  summary["lambda"] = residual_json(rl);
  summary["mu"] = residual_json(rm);
  if (f.alpha) summary["alpha"] = residual_json(asymptotic_residuals(*f.alpha, ResidualKind::alpha));
  int above = 0;
  for (double r : rl.r.v) above += std::abs(r) > cfg.tol;
  for (double r : rm.r.v) above += std::abs(r) > cfg.tol;
  summary["residuals_above_tol"] = above;
  summary["tol"] = cfg.tol;
  emit_report(cfg.report, err, summary);
  return 0;
}

json validation_report(const SdReport& rep) {
  json o;
  o["pass"] = rep.pass;
  o["interlacing"] = rep.interlacing;
  if (const auto v = rep.first_violation()) {
    o["first_violation"] = *v;
  } else {
    o["first_violation"] = nullptr;
  }
  o["violations"] = rep.violations;
  o["threshold"] = rep.threshold;
  o["outer_ok"] = rep.outer_ok;
  o["monotone_ok"] = rep.monotone_ok;
  o["lambda"] = residual_json(rep.lambda_res);
  o["mu"] = residual_json(rep.mu_res);
  return o;
}

Failure validation_failure(const SdReport& rep, json report) {
  std::string msg;
  long idx = Error::kNoIndex;
  if (!rep.interlacing) {
    idx = *rep.first_violation();
    msg = "interlacing condition lambda_{n-1} < mu_n < lambda_n fails at n = " + std::to_string(idx);
  } else if (!rep.outer_ok) {
    msg = "outer-quartile residual exceeds " + std::to_string(rep.threshold);
  } else {
    msg = "residual quartile maxima do not decay outward";
  }
  return {4, Error("spectral_products", "ValidationFailed", msg, idx), std::move(report)};
}

int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream&, const Executor&) {
  const SpectraFile f = load_spectra(cfg.input);
  const SdReport rep = validate_sd(f.pair(), cfg.threshold);
  json report = validation_report(rep);
  if (!rep.pass) throw validation_failure(rep, std::move(report));
  emit(cfg, out, report.dump(1) + "\n");
  return 0;
}

int run_inverse(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Executor& ex) {
  const SpectraFile f = load_spectra(cfg.input);
  const SpectrumPair sp = f.pair();
  const SdReport rep = validate_sd(sp, cfg.threshold);
  if (!rep.pass) throw validation_failure(rep, validation_report(rep));
  require_symmetric(sp.lambda);
  const NormingData nd = norming_from_two_spectra(sp, 2048, ex);
  return finish_reconstruction(cfg, nd, out, err, ex);
}

int run_inverse_norming(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Executor& ex) {
  const SpectraFile f = load_spectra(cfg.input);
  const NormingData nd = f.norming();
  for (int n = nd.alpha.n_min; n <= nd.alpha.n_max; ++n) {
    if (!(nd.alpha[n] > 0.0))
      throw Error("spectral_products", "NonPositiveAlpha",
                  "norming constant " + std::to_string(n) + " is not positive", n);
  }
  for (int n = nd.lambda.n_min + 1; n <= nd.lambda.n_max; ++n) {
    if (!(nd.lambda[n] > nd.lambda[n - 1]))
      throw Error("spectral_products", "ValidationFailed", "lambda must strictly increase", n);
  }
  require_symmetric(nd.lambda);
  return finish_reconstruction(cfg, nd, out, err, ex);
}

int run_roundtrip(const RunConfig& cfg, std::ostream& out, std::ostream&, const Executor& ex) {
  const Potential q = load_potential(cfg.input).with_p(cfg.p);
  const SpectrumPair sp = compute_spectra(q, -cfg.N, cfg.N, ex);
  const NormingData nd = norming_from_two_spectra(sp, 2048, ex);
  const Reconstruction rec = reconstruct(nd, recon_options(cfg), ex);
  const Potential& qh = rec.recovered.potential;
  const IndexedSeq lam_out = find_eigenvalues(qh, Boundary::A1, -cfg.N, cfg.N, ex);
  const NormingData a_in = norming_quadrature(q, sp.lambda, ex);
  const NormingData a_out = norming_quadrature(qh, lam_out, ex);

  const double dist = l1_distance(qh, q);
  const double base = l1_norm(q);
  const double l1 = base > 0.0 ? dist / base : dist;
  double dl = 0.0;
  double da = 0.0;
  for (int n = -cfg.N; n <= cfg.N; ++n) {
    dl = std::max(dl, std::abs(lam_out[n] - sp.lambda[n]));
    da = std::max(da, std::abs(a_out.alpha[n] - a_in.alpha[n]));
  }
  json report;
  report["N"] = cfg.N;
  report["M"] = cfg.M;
  report["summation"] = rec.H.summation() == Summation::fejer ? "fejer" : "raw";
  report["l1_error"] = l1;
  report["l1_error_absolute"] = dist;
  report["lambda_max_error"] = dl;
  report["alpha_max_error"] = da;
  report["min_eigenvalue"] = rec.positivity.min_eigenvalue;
  report["krein_residual"] = rec.krein.residual_norm;
  report["thresholds"] = {{"l1_error", cfg.max_l1}, {"lambda_max_error", cfg.max_lambda},
                          {"alpha_max_error", cfg.max_alpha}};
  const std::pair<const char*, std::pair<double, double>> metrics[] = {
      {"l1_error", {l1, cfg.max_l1}},
      {"lambda_max_error", {dl, cfg.max_lambda}},
      {"alpha_max_error", {da, cfg.max_alpha}}};
  for (const auto& [name, v] : metrics) {
    if (!(v.first <= v.second)) {
      std::ostringstream msg;
      msg << name << " = " << v.first << " exceeds " << v.second;
      report["pass"] = false;
      throw Failure{6, Error("cli", "RoundtripExceeded", msg.str()), report};
    }
  }
  report["pass"] = true;
  emit(cfg, out, report.dump(1) + "\n");
  return 0;
}

int run_kernel(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Executor& ex) {
  const Potential q = load_potential(cfg.input).with_p(cfg.p);
  const Grid grid = Grid::uniform(cfg.grid);
  const int n_max = cfg.n_max > 0 ? cfg.n_max : auto_n_max(l1_norm(q), cfg.tol);
  const PSeries ps = build_P_series(q, n_max, grid, ex);
  const KernelPair kp = assemble_K(ps, q);
  std::ostringstream os;
  write_kernel_csv(os, kp.K);
  emit(cfg, out, os.str());
  json rep;
  rep["n_max"] = ps.n_max;
  rep["p"] = q.p();
  rep["gp_norm_terms"] = ps.gp;
  rep["last_increment"] = ps.last_increment;
  rep["bound"] = ps.bound;
  rep["warning"] = ps.warning;
  rep["gp_norm_K"] = gp_norm(kp.K, q.p());
  emit_report(cfg.report, err, rep);
  return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-i,--input", cfg.input, "input file")->required()->check(CLI::ExistingFile);
  sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
  sub->add_option("--threads", cfg.threads, "worker threads, 0 = all cores (default $DIRAC_SPECT_THREADS or 0)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", cfg.tol, "report threshold")->check(CLI::PositiveNumber);
}

void add_recon(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-M", cfg.M, "reconstruction grid cells")->check(CLI::Range(16, 1 << 14));
  sub->add_option("--cesaro", cfg.cesaro, "Fejer means for H: auto (only p = 1), on, off")
      ->check(CLI::IsMember({"auto", "on", "off"}));
  sub->add_option("--solver", cfg.solver, "Krein solver")->check(CLI::IsMember({"dense", "levinson"}));
  sub->add_option("--diag", cfg.diag, "rule for R~(x,0)")->check(CLI::IsMember({"nystrom", "extrapolate"}));
  sub->add_option("--report", cfg.report, "report JSON (default stderr)");
  sub->add_option("--h-profile", cfg.h_profile, "write H as CSV s,a,b");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Direct and inverse spectral problems for 1D Dirac operators on (0,1)", "dirac-spect"};
  app.require_subcommand(1);

  CLI::App* direct = app.add_subcommand("direct", "potential -> two spectra (and norming constants)");
  add_common(direct, cfg);
  direct->add_option("-N", cfg.N, "index half-range")->check(CLI::Range(1, 1 << 16));
  direct->add_flag("--norming", cfg.norming, "add alpha by quadrature");
  direct->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  direct->add_option("--report", cfg.report, "residual summary JSON (default stderr)");
  direct->add_option("-p", cfg.p, "L_p exponent recorded with the spectra")->check(CLI::Range(1.0, 1e9));

  CLI::App* inverse = app.add_subcommand("inverse", "two spectra -> potential");
  add_common(inverse, cfg);
  add_recon(inverse, cfg);
  inverse->add_option("--threshold", cfg.threshold, "outer-quartile residual threshold");

  CLI::App* inorm = app.add_subcommand("inverse-norming", "eigenvalues and norming constants -> potential");
  add_common(inorm, cfg);
  add_recon(inorm, cfg);

  CLI::App* round = app.add_subcommand("roundtrip", "direct -> inverse -> direct closure test");
  add_common(round, cfg);
  add_recon(round, cfg);
  round->add_option("-N", cfg.N, "index half-range")->check(CLI::Range(1, 1 << 16));
  round->add_option("--max-l1", cfg.max_l1, "threshold on the relative L1 potential error");
  round->add_option("--max-lambda", cfg.max_lambda, "threshold on max |lambda_in - lambda_out|");
  round->add_option("--max-alpha", cfg.max_alpha, "threshold on max |alpha_in - alpha_out|");
  round->add_option("-p", cfg.p, "L_p exponent")->check(CLI::Range(1.0, 1e9));

  CLI::App* validate = app.add_subcommand("validate", "check a spectra file for interlacing and decay");
  add_common(validate, cfg);
  validate->add_option("--threshold", cfg.threshold, "outer-quartile residual threshold");

  CLI::App* kernel = app.add_subcommand("kernel", "transformation-operator kernel K on the triangle");
  add_common(kernel, cfg);
  kernel->add_option("--grid", cfg.grid, "grid cells")->check(CLI::Range(2, 1 << 14));
  kernel->add_option("--n-max", cfg.n_max, "series terms (default from --tol)");
  kernel->add_option("--report", cfg.report, "G_p report JSON (default stderr)");
  kernel->add_option("-p", cfg.p, "L_p exponent")->check(CLI::Range(1.0, 1e9));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << e.what() << '\n';
    json o;
    o["error"] = error_object(Error("cli", "UsageError", e.what()));
    out << o.dump() << '\n';
    return 2;
  }

  try {
    const Executor ex = make_executor(cfg);
    if (direct->parsed()) return run_direct(cfg, out, err, ex);
    if (inverse->parsed()) return run_inverse(cfg, out, err, ex);
    if (inorm->parsed()) return run_inverse_norming(cfg, out, err, ex);
    if (round->parsed()) return run_roundtrip(cfg, out, err, ex);
    if (validate->parsed()) return run_validate(cfg, out, err, ex);
    return run_kernel(cfg, out, err, ex);
  } catch (const Failure& f) {
    err << "dirac-spect: " << f.error.what() << '\n';
    const bool to_stdout = cfg.output.empty() || cfg.output == "-";
    if (f.report && to_stdout) {
      json rep = *f.report;
      rep["error"] = error_object(f.error);
      out << rep.dump(1) << '\n';
    } else {
      if (f.report) emit(cfg, out, f.report->dump(1) + "\n");
      json o;
      o["error"] = error_object(f.error);
      out << o.dump() << '\n';
    }
    return f.code;
  } catch (const Error& e) {
    err << "dirac-spect: " << e.what() << '\n';
    json o;
    o["error"] = error_object(e);
    out << o.dump() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "dirac-spect: " << e.what() << '\n';
    json o;
    o["error"] = error_object(Error("cli", "Internal", e.what()));
    out << o.dump() << '\n';
    return 1;
  }
}

}  // namespace dirac::cli
