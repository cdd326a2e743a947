#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "covgeom/covgeom.h"
#include "covgeom_cli/cli.h"
#include "covgeom_cli/manifest.h"
#include "covgeom_cli/matrix_io.h"
#include "covgeom_cli/report.h"

namespace covgeom::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  // Shared solver flags. A negative rank_tol means "library default".
  double rel_tol = MeanConfig{}.rel_tol;
  int max_iter = MeanConfig{}.max_iter;
  double rank_tol = -1.0;
  std::string init = "euclidean";
  std::uint64_t seed = 0;
  std::string basis = "standard";
  std::string output = ".";

  std::string a;
  std::string b;
  std::string manifest;
  std::string input;
  std::string templ;
  std::string algorithm = "descent";
  bool cross_check = false;
  int steps = 11;
  int k = 0;
  int n = 0;
  double eps = 0.1;
  int m = 3;
  double ratio = 5.0;
  double b0 = 1.0;
  std::vector<int> ranks;
};

std::optional<double> RankTol(const Options& o) {
  if (o.rank_tol < 0.0) return std::nullopt;
  return o.rank_tol;
}

Json RankTolJson(const Options& o) {
  return o.rank_tol < 0.0 ? Json("default") : Json(o.rank_tol);
}

MeanConfig MakeConfig(const Options& o) {
  MeanConfig cfg;
  cfg.rel_tol = o.rel_tol;
  cfg.max_iter = o.max_iter;
  cfg.rank_tol = RankTol(o);
  cfg.init = o.init == "rms" ? MeanInit::kRootMeanSquare : MeanInit::kEuclideanMean;
  return cfg;
}

Json ConfigJson(const MeanConfig& cfg, const Options& o) {
  Json j;
  j["rel_tol"] = cfg.rel_tol;
  j["grad_tol"] = cfg.grad_tol;
  j["residual_tol"] = cfg.residual_tol;
  j["max_iter"] = cfg.max_iter;
  j["rank_tol"] = RankTolJson(o);
  j["init"] = o.init;
  return j;
}

Basis MakeBasis(const Options& o) {
  return o.basis == "eigen" ? Basis::Eigen() : Basis::Standard();
}

struct SolveOutcome {
  MeanResult result;
  bool hit_max_iter = false;
};

SolveOutcome Solve(std::span<const Covariance> family, const MeanConfig& cfg, bool gpa) {
  try {
    return {gpa ? mean_procrustes_averaging(family, cfg) : mean_fixed_point(family, cfg), false};
  } catch (const MaxIterExceeded& e) {
    return {e.best(), true};
  }
}

Json SolverJson(const MeanResult& r) {
  Json j;
  j["functional_trace"] = r.functional_trace;
  j["residual_trace"] = r.residual_trace;
  j["trace_of_iterates"] = r.trace_of_iterates;
  j["min_eigenvalue_trace"] = r.min_eigenvalue_trace;
  j["active_dim"] = r.active_dim;
  return j;
}

Json ManifestJson(const Manifest& m) {
  std::vector<std::string> ops;
  for (const auto& p : m.operators) ops.push_back(p.string());
  Json j;
  j["operators"] = ops;
  if (!m.labels.empty()) j["labels"] = m.labels;
  return j;
}

std::string Numbered(const std::string& stem, std::size_t k, std::size_t count) {
  const std::string digits = std::to_string(count);
  std::string index = std::to_string(k);
  index.insert(0, digits.size() - std::min(digits.size(), index.size()), '0');
  return stem + "_" + index + ".csv";
}

int Emit(const Report& report, std::ostream& out, int code = kExitOk) {
  out << Serialize(report);
  return code;
}

int CmdDistance(const Options& o, std::ostream& out) {
  const Covariance a = ReadCovariance(o.a);
  const Covariance b = ReadCovariance(o.b);
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch, o.a + " has dimension " + std::to_string(a.dim()) +
                                             " but " + o.b + " has dimension " +
                                             std::to_string(b.dim()));
  }
  const EquivalenceReport eq = convergence_equivalence(a, b);
  const AlignmentResult aligned = procrustes_distance_via_alignment(a, b);

  Report r{"distance"};
  r.inputs["a"] = o.a;
  r.inputs["b"] = o.b;
  r.results["procrustes"] = eq.wasserstein;
  r.results["procrustes_squared"] = eq.wasserstein * eq.wasserstein;
  r.results["root_hs"] = eq.root_hs;
  r.results["trace_distance"] = eq.trace_dist;
  r.results["dimension"] = a.dim();
  r.diagnostics["alignment_distance"] = aligned.distance;
  r.diagnostics["alignment_rotation"] = ToJson(aligned.rotation);
  r.diagnostics["bound_constant"] = eq.bound_constant;
  r.diagnostics["bound_applicable"] = eq.bound_applicable;
  r.diagnostics["bound_holds"] = eq.bound_holds;
  r.diagnostics["unconditional_bound"] = eq.unconditional_bound;
  return Emit(r, out);
}

int CmdMean(const Options& o, std::ostream& out) {
  const Manifest manifest = ReadManifest(o.manifest);
  const std::vector<Covariance> family = LoadFamily(manifest);
  const MeanConfig cfg = MakeConfig(o);
  const bool gpa = o.algorithm == "gpa";
  const SolveOutcome solved = Solve(family, cfg, gpa);
  const MeanResult& res = solved.result;

  const fs::path dir = o.output;
  WriteMatrixFile(dir / "mean.csv", res.mean.matrix());

  Report r{"mean"};
  r.inputs["manifest"] = ManifestJson(manifest);
  r.inputs["algorithm"] = o.algorithm;
  r.inputs["config"] = ConfigJson(cfg, o);
  r.inputs["cross_check"] = o.cross_check;
  r.results["mean"] = ToJson(res.mean.matrix());
  r.results["mean_file"] = "mean.csv";
  r.results["iterations"] = res.iterations;
  r.results["converged"] = res.converged;
  r.results["max_iter_exceeded"] = solved.hit_max_iter;
  r.results["fixed_point_residual"] = fixed_point_residual(res.mean, family);
  r.results["frechet_functional"] = frechet_functional(res.mean, family);
  r.results["mean_trace"] = res.mean.trace();
  double avg_trace = 0.0;
  for (const auto& s : family) avg_trace += s.trace();
  r.results["average_member_trace"] = avg_trace / static_cast<double>(family.size());
  if (o.cross_check) {
    const SolveOutcome other = Solve(family, cfg, !gpa);
    Json c;
    c["algorithm"] = gpa ? "descent" : "gpa";
    c["procrustes_between_outputs"] = procrustes_distance(res.mean, other.result.mean);
    c["iterations"] = other.result.iterations;
    c["max_iter_exceeded"] = other.hit_max_iter;
    r.results["cross_check"] = c;
  }
  r.diagnostics = SolverJson(res);
  return Emit(r, out, solved.hit_max_iter ? kExitMaxIter : kExitOk);
}

int CmdGeodesic(const Options& o, std::ostream& out) {
  if (o.steps < 2) throw Error(ErrorCode::kOutOfRange, "--steps must be at least 2");
  const Covariance a = ReadCovariance(o.a);
  const Covariance b = ReadCovariance(o.b);
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimMismatch, o.a + " and " + o.b + " differ in dimension");
  }
  // Fails early with KernelCondition even when only endpoints are requested.
  try {
    log_map(a, b, RankTol(o));
  } catch (const KernelConditionError& e) {
    throw Error(ErrorCode::kKernelCondition, o.a + " -> " + o.b + ": " + ErrorDetail(e));
  }
  const double total = procrustes_distance(a, b);

  const auto count = static_cast<std::size_t>(o.steps);
  std::vector<double> ts(count);
  std::vector<Covariance> points;
  Json files = Json::array();
  Json traces = Json::array();
  const fs::path dir = o.output;
  for (std::size_t k = 0; k < count; ++k) {
    ts[k] = static_cast<double>(k) / static_cast<double>(count - 1);
    points.push_back(geodesic(a, b, ts[k], RankTol(o)));
    const std::string name = Numbered("geodesic", k, count - 1);
    WriteMatrixFile(dir / name, points.back().matrix());
    files.push_back(name);
    traces.push_back(points.back().trace());
  }

  Json table = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double pi = procrustes_distance(points[i], points[j]);
      const double expected = (ts[j] - ts[i]) * total;
      const double dev = std::abs(pi - expected);
      worst = std::max(worst, dev);
      table.push_back(Json{{"s", ts[i]}, {"t", ts[j]}, {"procrustes", pi},
                           {"expected", expected}, {"deviation", dev}});
    }
  }

  Report r{"geodesic"};
  r.inputs["a"] = o.a;
  r.inputs["b"] = o.b;
  r.inputs["steps"] = o.steps;
  r.inputs["rank_tol"] = RankTolJson(o);
  r.results["t"] = ts;
  r.results["files"] = files;
  r.results["traces"] = traces;
  r.results["procrustes_endpoints"] = total;
  r.results["speed_table"] = table;
  r.results["max_speed_deviation"] = worst;
  r.results["speed_tolerance"] = 1e-6 * (1.0 + total);
  r.results["constant_speed"] = worst <= 1e-6 * (1.0 + total);
  r.diagnostics["map_condition_number"] =
      map_condition_number(optimal_map(a, b, RankTol(o)));
  return Emit(r, out);
}

int CmdPca(const Options& o, std::ostream& out) {
  const Manifest manifest = ReadManifest(o.manifest);
  const std::vector<Covariance> family = LoadFamily(manifest);
  const MeanConfig cfg = MakeConfig(o);
  const SolveOutcome solved = Solve(family, cfg, o.algorithm == "gpa");
  const Covariance& mean = solved.result.mean;

  const auto n = static_cast<Index>(family.size());
  const Index d = mean.dim();
  const Index k = o.k > 0 ? o.k : std::min<Index>(n, d * (d + 1) / 2);
  const std::vector<TangentVector> lifts = lift(family, mean, RankTol(o));
  const PcaResult pca = tangent_pca(lifts, mean, k);

  const fs::path dir = o.output;
  WriteMatrixFile(dir / "mean.csv", mean.matrix());
  Json files = Json::array();
  for (std::size_t a = 0; a < pca.components.size(); ++a) {
    const std::string name = Numbered("component", a + 1, pca.components.size());
    WriteMatrixFile(dir / name, pca.components[a].matrix());
    files.push_back(name);
  }

  Json errors = Json::array();
  for (Index i = 0; i < n; ++i) {
    Json row = Json::array();
    for (Index kk = 0; kk <= pca.effective_rank; ++kk) {
      try {
        row.push_back(procrustes_distance(reconstruct(mean, pca, i, kk), family[i]));
      } catch (const LeavesConeError&) {
        row.push_back(nullptr);
      }
    }
    errors.push_back(row);
  }

  Report r{"pca"};
  r.inputs["manifest"] = ManifestJson(manifest);
  r.inputs["k"] = k;
  r.inputs["config"] = ConfigJson(cfg, o);
  r.results["variances"] = pca.variances;
  r.results["total_variance"] = pca.total_variance;
  r.results["effective_rank"] = pca.effective_rank;
  r.results["scores"] = ToJson(pca.scores);
  r.results["component_files"] = files;
  r.results["mean_file"] = "mean.csv";
  r.results["reconstruction_errors"] = errors;
  r.diagnostics["lifted_mean_norm"] = pca.lifted_mean_norm;
  r.diagnostics["mean_iterations"] = solved.result.iterations;
  r.diagnostics["mean_max_iter_exceeded"] = solved.hit_max_iter;
  r.diagnostics["fixed_point_residual"] = fixed_point_residual(mean, family);
  return Emit(r, out, solved.hit_max_iter ? kExitMaxIter : kExitOk);
}

int CmdMulticouple(const Options& o, std::ostream& out) {
  const Manifest manifest = ReadManifest(o.manifest);
  const std::vector<Covariance> family = LoadFamily(manifest);
  const MeanConfig cfg = MakeConfig(o);
  const SolveOutcome solved = Solve(family, cfg, o.algorithm == "gpa");
  const Covariance& mean = solved.result.mean;

  const JointCovariance joint = multicoupling(mean, family, RankTol(o));
  const double g = multicoupling_cost(joint);
  const double f = frechet_functional(mean, family);
  double marginal = 0.0;
  for (Index i = 0; i < joint.count(); ++i) {
    marginal = std::max(marginal, max_abs(joint.block(i, i) - family[i].matrix()));
  }
  const double lambda_min = sym_eigen(SymMatrix(joint.full())).values.minCoeff();

  const fs::path dir = o.output;
  WriteMatrixFile(dir / "coupling.csv", joint.full());
  WriteMatrixFile(dir / "mean.csv", mean.matrix());

  Report r{"multicouple"};
  r.inputs["manifest"] = ManifestJson(manifest);
  r.inputs["config"] = ConfigJson(cfg, o);
  r.results["coupling_file"] = "coupling.csv";
  r.results["mean_file"] = "mean.csv";
  r.results["G"] = g;
  r.results["F"] = f;
  r.results["difference"] = g - f;
  r.results["marginal_max_error"] = marginal;
  r.results["coupling_lambda_min"] = lambda_min;
  r.results["coupling_trace"] = joint.full().trace();
  r.diagnostics["mean_iterations"] = solved.result.iterations;
  r.diagnostics["mean_max_iter_exceeded"] = solved.hit_max_iter;
  r.diagnostics["fixed_point_residual"] = fixed_point_residual(mean, family);
  return Emit(r, out, solved.hit_max_iter ? kExitMaxIter : kExitOk);
}

int CmdDeform(const Options& o, std::ostream& out) {
  const Covariance templ = ReadCovariance(o.templ);
  const Index n = o.n > 0 ? o.n : 3;
  const DeformationFamily fam = deformation_family(templ, n, o.eps, {o.seed, "deform"});

  const fs::path dir = o.output;
  std::vector<std::string> names;
  double drift = 0.0;
  double max_op = 0.0;
  Matrix sum = Matrix::Zero(templ.dim(), templ.dim());
  for (std::size_t i = 0; i < fam.deformed.size(); ++i) {
    names.push_back(Numbered("deformed", i + 1, fam.deformed.size()));
    WriteMatrixFile(dir / names.back(), fam.deformed[i].matrix());
    drift = std::max(drift, max_abs(fam.deformed[i].matrix() - templ.matrix()));
    max_op = std::max(max_op, norms(fam.maps[i]).op_norm);
    sum += fam.maps[i].matrix();
  }
  WriteFileAtomic(dir / "deformed.json", FormatManifest(names));

  const MeanConfig cfg = MakeConfig(o);
  const SolveOutcome solved = Solve(fam.deformed, cfg, false);

  Report r{"simulate deform"};
  r.inputs["template"] = o.templ;
  r.inputs["n"] = n;
  r.inputs["eps"] = o.eps;
  r.inputs["seed"] = o.seed;
  r.inputs["config"] = ConfigJson(cfg, o);
  r.results["files"] = names;
  r.results["manifest_file"] = "deformed.json";
  r.results["template_fixed_point_residual"] = fixed_point_residual(templ, fam.deformed);
  r.results["template_functional"] = frechet_functional(templ, fam.deformed);
  r.results["max_deviation_from_template"] = drift;
  r.results["recovered_procrustes_to_template"] = procrustes_distance(solved.result.mean, templ);
  r.diagnostics["max_map_op_norm"] = max_op;
  r.diagnostics["map_sum_max_abs"] = max_abs(sum);
  r.diagnostics["mean_iterations"] = solved.result.iterations;
  r.diagnostics["mean_max_iter_exceeded"] = solved.hit_max_iter;
  return Emit(r, out, solved.hit_max_iter ? kExitMaxIter : kExitOk);
}

std::vector<Index> Ranks(const Options& o, Index d) {
  std::vector<Index> ranks;
  if (o.ranks.empty()) {
    for (Index r = 1; r <= d; ++r) ranks.push_back(r);
  } else {
    for (int r : o.ranks) ranks.push_back(r);
  }
  return ranks;
}

int CmdProject(const Options& o, std::ostream& out) {
  if (o.input.empty() == o.manifest.empty()) {
    throw Error(ErrorCode::kOutOfRange, "exactly one of --input and --manifest is required");
  }
  Report r{"simulate project"};
  r.inputs["basis"] = o.basis;
  const Basis basis = MakeBasis(o);

  if (!o.input.empty()) {
    const Covariance s = ReadCovariance(o.input);
    const std::vector<Index> ranks = Ranks(o, s.dim());
    r.inputs["input"] = o.input;
    r.inputs["ranks"] = ranks;
    const Vector diag = s.matrix().diagonal();
    const Vector& eig = s.spectrum().values;
    Json rows = Json::array();
    double worst = 0.0;
    for (Index rank : ranks) {
      const double err = projection_error(s, rank, basis);
      const double pi = procrustes_distance(s, project(s, rank, basis));
      const Vector& tail_src = basis.kind == Basis::Kind::kEigen ? eig : diag;
      const double tail = tail_src.tail(s.dim() - rank).sum();
      worst = std::max(worst, std::abs(err - pi * pi));
      rows.push_back(Json{{"rank", rank}, {"projection_error", err},
                          {"procrustes_squared", pi * pi}, {"tail_sum", tail}});
    }
    r.results["rows"] = rows;
    r.results["max_identity_gap"] = worst;
    return Emit(r, out);
  }

  const Manifest manifest = ReadManifest(o.manifest);
  const std::vector<Covariance> family = LoadFamily(manifest);
  const std::vector<Index> ranks = Ranks(o, family[0].dim());
  const MeanConfig cfg = MakeConfig(o);
  const ProjectionStabilityReport rep =
      projection_stability_experiment(family, ranks, basis, cfg);
  r.inputs["manifest"] = ManifestJson(manifest);
  r.inputs["ranks"] = ranks;
  r.inputs["config"] = ConfigJson(cfg, o);
  Json rows = Json::array();
  for (const ProjectionRow& row : rep.rows) {
    Json j;
    j["rank"] = row.rank;
    j["mean_trace_distance"] =
        row.mean_trace_distance ? Json(*row.mean_trace_distance) : Json(nullptr);
    j["pairwise_discrepancy"] = row.pairwise_discrepancy;
    j["max_tail"] = row.max_tail;
    j["projection_errors"] = row.projection_errors;
    j["solver_iterations"] = row.solver_iterations;
    if (!row.solver_error.empty()) j["solver_error"] = row.solver_error;
    rows.push_back(j);
  }
  r.results["rows"] = rows;
  r.results["monotone"] = rep.monotone;
  r.results["full_mean"] = ToJson(rep.full_mean.matrix());
  return Emit(r, out);
}

int CmdCounterexample(const Options& o, std::ostream& out) {
  const MeanConfig cfg = MakeConfig(o);
  const CounterexampleFamily fam = counterexample_family(o.m, o.ratio, o.b0, cfg);
  const fs::path dir = o.output;
  WriteMatrixFile(dir / "mean.csv", fam.mean.matrix());
  WriteMatrixFile(dir / "s1.csv", fam.s1.matrix());
  WriteMatrixFile(dir / "s2.csv", fam.s2.matrix());

  bool positive = true;
  for (double c : fam.thresholds) positive = positive && c > 0.0;

  Report r{"simulate counterexample"};
  r.inputs["m"] = o.m;
  r.inputs["ratio"] = o.ratio;
  r.inputs["b0"] = o.b0;
  r.inputs["config"] = ConfigJson(cfg, o);
  r.results["files"] = {"mean.csv", "s1.csv", "s2.csv"};
  r.results["lambdas"] = fam.lambdas;
  r.results["mus"] = fam.mus;
  r.results["couplings"] = fam.couplings;
  r.results["thresholds"] = fam.thresholds;
  r.results["min_threshold"] = *std::min_element(fam.thresholds.begin(), fam.thresholds.end());
  r.results["thresholds_positive"] = positive;
  r.results["recovery_distance"] = fam.recovery_distance;
  r.diagnostics["solver_iterations"] = fam.solver_iterations;
  r.diagnostics["deformation"] = ToJson(fam.deformation.matrix());
  return Emit(r, out);
}

int CmdMoments(const Options& o, std::ostream& out) {
  const Covariance s = ReadCovariance(o.input);
  const Index n = o.n > 0 ? o.n : 100000;
  const FourthMomentReport rep = fourth_moment_check(s, n, {o.seed, "moments"});
  Report r{"simulate moments"};
  r.inputs["input"] = o.input;
  r.inputs["n"] = n;
  r.inputs["seed"] = o.seed;
  r.results["exact"] = rep.exact;
  r.results["upper_bound"] = rep.upper_bound;
  r.results["estimate"] = rep.estimate;
  r.results["std_error"] = rep.std_error;
  r.results["z_score"] = rep.z_score;
  r.results["rank"] = rep.rank;
  r.results["within_tolerance"] = rep.within_tolerance;
  r.results["bound_holds"] = rep.bound_holds;
  r.results["equality_case"] = rep.equality_case;
  r.diagnostics["sample_size"] = rep.sample_size;
  return Emit(r, out);
}

void AddSolverFlags(CLI::App* app, Options& o) {
  app->add_option("--rel-tol", o.rel_tol, "Relative convergence tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  app->add_option("--init", o.init, "Initial point")
      ->check(CLI::IsMember({"euclidean", "rms"}));
  app->add_option("--algorithm", o.algorithm, "Mean solver")
      ->check(CLI::IsMember({"descent", "gpa"}));
}

void AddRankTol(CLI::App* app, Options& o) {
  app->add_option("--rank-tol", o.rank_tol, "Relative numerical-rank threshold")
      ->check(CLI::PositiveNumber);
}

void AddOutput(CLI::App* app, Options& o) {
  app->add_option("--output", o.output, "Directory for matrix outputs");
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return kExitParse;
    case ErrorCode::kDimMismatch: return kExitDim;
    case ErrorCode::kNotPsd: return kExitPsd;
    case ErrorCode::kKernelCondition: return kExitKernel;
    case ErrorCode::kMaxIterExceeded: return kExitMaxIter;
    default: return kExitUsage;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  std::function<int()> action;

  CLI::App app{"Covariance geometry under the Procrustes metric", "covgeom"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* distance = app.add_subcommand("distance", "Procrustes distance between two matrices");
  distance->add_option("a", o.a, "First matrix file")->required();
  distance->add_option("b", o.b, "Second matrix file")->required();
  distance->callback([&] { action = [&] { return CmdDistance(o, out); }; });

  auto* mean = app.add_subcommand("mean", "Frechet mean of a manifest family");
  mean->add_option("manifest", o.manifest, "Manifest file")->required();
  AddSolverFlags(mean, o);
  AddRankTol(mean, o);
  AddOutput(mean, o);
  mean->add_flag("--cross-check", o.cross_check, "Also run the other algorithm");
  mean->callback([&] { action = [&] { return CmdMean(o, out); }; });

  auto* geo = app.add_subcommand("geodesic", "Sample the geodesic between two matrices");
  geo->add_option("a", o.a, "Start matrix file")->required();
  geo->add_option("b", o.b, "End matrix file")->required();
  geo->add_option("--steps", o.steps, "Grid points including endpoints")->check(CLI::Range(2, 100000));
  AddRankTol(geo, o);
  AddOutput(geo, o);
  geo->callback([&] { action = [&] { return CmdGeodesic(o, out); }; });

  auto* pca = app.add_subcommand("pca", "Tangent PCA at the Frechet mean");
  pca->add_option("manifest", o.manifest, "Manifest file")->required();
  pca->add_option("--k", o.k, "Number of components")->check(CLI::PositiveNumber);
  AddSolverFlags(pca, o);
  AddRankTol(pca, o);
  AddOutput(pca, o);
  pca->callback([&] { action = [&] { return CmdPca(o, out); }; });

  auto* mc = app.add_subcommand("multicouple", "Optimal Gaussian multicoupling");
  mc->add_option("manifest", o.manifest, "Manifest file")->required();
  AddSolverFlags(mc, o);
  AddRankTol(mc, o);
  AddOutput(mc, o);
  mc->callback([&] { action = [&] { return CmdMulticouple(o, out); }; });

  auto* sim = app.add_subcommand("simulate", "Seeded experiments");
  sim->require_subcommand(1);

  auto* deform = sim->add_subcommand("deform", "Random deformations of a template");
  deform->add_option("--template", o.templ, "Template matrix file")->required();
  deform->add_option("--n", o.n, "Family size (default 3)")->check(CLI::PositiveNumber);
  deform->add_option("--eps", o.eps, "Largest deformation operator norm")
      ->check(CLI::Range(0.0, 1.0));
  deform->add_option("--seed", o.seed, "Random seed");
  AddSolverFlags(deform, o);
  AddOutput(deform, o);
  deform->callback([&] { action = [&] { return CmdDeform(o, out); }; });

  auto* project = sim->add_subcommand("project", "Finite-rank projection errors and stability");
  project->add_option("--input", o.input, "Single matrix file");
  project->add_option("--manifest", o.manifest, "Family manifest");
  project->add_option("--ranks", o.ranks, "Ranks (default 1..d)")->check(CLI::PositiveNumber);
  project->add_option("--basis", o.basis, "Projection frame")
      ->check(CLI::IsMember({"standard", "eigen"}));
  AddSolverFlags(project, o);
  AddRankTol(project, o);
  project->callback([&] { action = [&] { return CmdProject(o, out); }; });

  auto* counter = sim->add_subcommand("counterexample", "Family whose mean no member bounds");
  counter->add_option("--m", o.m, "Number of coupled blocks")->check(CLI::Range(1, 15));
  counter->add_option("--ratio", o.ratio, "Eigenvalue decay ratio");
  counter->add_option("--b0", o.b0, "Coupling scale");
  AddSolverFlags(counter, o);
  AddRankTol(counter, o);
  AddOutput(counter, o);
  counter->callback([&] { action = [&] { return CmdCounterexample(o, out); }; });

  auto* moments = sim->add_subcommand("moments", "Monte Carlo fourth moment check");
  moments->add_option("--input", o.input, "Matrix file")->required();
  moments->add_option("--n", o.n, "Sample size (default 100000)")->check(CLI::PositiveNumber);
  moments->add_option("--seed", o.seed, "Random seed");
  moments->callback([&] { action = [&] { return CmdMoments(o, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const int code = action();
    if (code == kExitMaxIter) err << "error: iteration cap reached; best iterate written\n";
    return code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const MaxIterExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitMaxIter;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace covgeom::cli
