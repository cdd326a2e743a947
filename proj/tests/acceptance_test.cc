// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "covgeom/covgeom.h"
#include "covgeom_cli/cli.h"
#include "covgeom_cli/matrix_io.h"
#include "test_support.h"

namespace covgeom {
namespace {

namespace fs = std::filesystem;
using testing::Rng;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates failures with a short reason; the first few are kept.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) reasons_ += (reasons_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  std::string reasons() const {
    return reasons_ + (failures_ > 3 ? " (+" + std::to_string(failures_ - 3) + " more)" : "");
  }
  Outcome Finish(const std::string& summary) const {
    return {ok(), ok() ? summary : summary + " | FAILURES: " + reasons()};
  }

 private:
  int failures_ = 0;
  std::string reasons_;
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Every mean-solver run in the suite, for the descent-diagnostics criterion.
struct SolverRun {
  std::string origin;
  MeanResult result;
  bool euclidean_init;
};
std::vector<SolverRun>& SolverLog() {
  static std::vector<SolverRun> log;
  return log;
}

MeanResult Logged(const std::string& origin, MeanResult r, bool euclidean_init) {
  SolverLog().push_back({origin, r, euclidean_init});
  return r;
}

std::vector<Covariance> RandomFamily(Rng& rng, Index n, Index d) {
  std::vector<Covariance> fam;
  fam.push_back(testing::RandomSpd(rng, d));
  std::uniform_int_distribution<Index> rank(1, d);
  for (Index i = 1; i < n; ++i) {
    fam.push_back(i % 2 ? make_covariance(testing::RandomPsdRankMatrix(rng, d, rank(rng)))
                        : testing::RandomSpd(rng, d));
  }
  return fam;
}

Outcome DistanceCorrectness() {
  Check c;
  Rng rng(1001);
  double worst_rel = 0.0;
  double worst_commuting = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + trial % 15;
    const Covariance a = testing::RandomSpd(rng, d);
    const Covariance b = testing::RandomSpd(rng, d);
    const double formula = procrustes_distance(a, b);
    const double aligned = procrustes_distance_via_alignment(a, b).distance;
    const double rel = std::abs(formula - aligned) / std::max(formula, 1e-300);
    worst_rel = std::max(worst_rel, rel);
    c.Expect(rel <= 1e-8, "pair " + std::to_string(trial) + " rel gap " + Fmt(rel));
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 2 + trial % 15;
    const auto fam = testing::CommutingFamily(rng, testing::RandomOrthogonal(rng, d), 2);
    const double oracle = testing::RootHsDistance(fam[0].matrix(), fam[1].matrix());
    const double gap = std::max(std::abs(procrustes_distance(fam[0], fam[1]) - oracle),
                                std::abs(procrustes_distance_via_alignment(fam[0], fam[1]).distance -
                                         oracle));
    worst_commuting = std::max(worst_commuting, gap);
    c.Expect(gap <= 1e-9, "commuting pair " + std::to_string(trial) + " gap " + Fmt(gap));
  }
  return c.Finish("200 random pairs, max relative gap " + Fmt(worst_rel) +
                  "; 200 commuting pairs, max gap to root-HS oracle " + Fmt(worst_commuting));
}

Outcome TransportPushforward() {
  Check c;
  Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + trial % 12;
    const Covariance s1 = testing::RandomSpd(rng, d, 0.05, 5.0);
    const Covariance s2 = trial % 3 == 0
                              ? make_covariance(testing::RandomPsdRankMatrix(rng, d, (d + 1) / 2))
                              : testing::RandomSpd(rng, d);
    const Matrix t = optimal_map(s1, s2).map.matrix();
    const double err = max_abs(t * s1.matrix() * t - s2.matrix()) / (1.0 + s2.trace());
    worst = std::max(worst, err);
    c.Expect(err <= 1e-8, "pair " + std::to_string(trial) + " scaled error " + Fmt(err));
  }
  int raised = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 8;
    const Covariance s1 = make_covariance(testing::RandomPsdRankMatrix(rng, d, d - 1 - trial % (d - 1)));
    const Covariance s2 = testing::RandomSpd(rng, d);
    try {
      optimal_map(s1, s2);
    } catch (const KernelConditionError&) {
      ++raised;
    }
  }
  c.Expect(raised == 50, "only " + std::to_string(raised) + "/50 violations raised");
  return c.Finish("200 pairs, max ||t S1 t - S2||_inf/(1+tr S2) = " + Fmt(worst) + "; " +
                  std::to_string(raised) + "/50 kernel violations raised KernelCondition");
}

Outcome GeodesicConstantSpeed() {
  Check c;
  Rng rng(1003);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = 2 + trial % 9;
    const Covariance s0 = testing::RandomSpd(rng, d);
    const Covariance s1 = trial % 4 == 0
                              ? make_covariance(testing::RandomPsdRankMatrix(rng, d, d - 1))
                              : testing::RandomSpd(rng, d);
    const double total = procrustes_distance(s0, s1);
    std::vector<Covariance> pts;
    for (int k = 0; k <= 10; ++k) pts.push_back(geodesic(s0, s1, k / 10.0));
    for (int i = 0; i <= 10; ++i) {
      for (int j = i + 1; j <= 10; ++j) {
        const double dev = std::abs(procrustes_distance(pts[i], pts[j]) - (j - i) / 10.0 * total) /
                           (1.0 + total);
        worst = std::max(worst, dev);
        c.Expect(dev <= 1e-6, "pair " + std::to_string(trial) + " deviation " + Fmt(dev));
      }
    }
  }
  return c.Finish("50 pairs x 55 grid pairs, max scaled deviation " + Fmt(worst));
}

Outcome ExpLogInversion() {
  Check c;
  Rng rng(1004);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 1 + trial % 10;
    const Covariance base = testing::RandomSpd(rng, d);
    const Covariance target = trial % 3 == 0
                                  ? make_covariance(testing::RandomPsdRankMatrix(rng, d, (d + 1) / 2))
                                  : testing::RandomSpd(rng, d);
    const Covariance back = exp_map(base, log_map(base, target).direction);
    const double err = max_abs(back.matrix() - target.matrix()) / (1.0 + target.trace());
    worst = std::max(worst, err);
    c.Expect(err <= 1e-8, "pair " + std::to_string(trial) + " error " + Fmt(err));
  }
  return c.Finish("100 pairs, max scaled error " + Fmt(worst));
}

Outcome FrechetMeanOptimality() {
  Check c;
  Rng rng(1005);
  double worst_residual = 0.0;
  double worst_trace = -std::numeric_limits<double>::infinity();
  double worst_agreement = 0.0;
  const int families = 60;
  for (int trial = 0; trial < families; ++trial) {
    const Index d = 1 + trial % 12;
    const Index n = 2 + trial % 9;
    const auto fam = RandomFamily(rng, n, d);
    const std::string tag = "family " + std::to_string(trial);
    const MeanResult descent = Logged("optimality/descent", mean_fixed_point(fam), true);
    const MeanResult gpa = Logged("optimality/gpa", mean_procrustes_averaging(fam), false);
    double avg_trace = 0.0;
    for (const auto& s : fam) avg_trace += s.trace() / static_cast<double>(n);
    for (const MeanResult* r : {&descent, &gpa}) {
      const double res = fixed_point_residual(r->mean, fam) / (1.0 + r->mean.trace());
      worst_residual = std::max(worst_residual, res);
      c.Expect(res <= 1e-6, tag + " residual " + Fmt(res));
      worst_trace = std::max(worst_trace, r->mean.trace() - avg_trace);
      c.Expect(r->mean.trace() <= avg_trace + 1e-9, tag + " trace bound");
    }
    const double agree = procrustes_distance(descent.mean, gpa.mean);
    worst_agreement = std::max(worst_agreement, agree);
    c.Expect(agree <= 1e-5, tag + " algorithms differ by " + Fmt(agree));
  }
  return c.Finish(std::to_string(families) + " families (N<=10, d<=12), max scaled residual " +
                  Fmt(worst_residual) + ", max tr(mean) - avg tr " + Fmt(worst_trace) +
                  ", max Pi(descent, gpa) " + Fmt(worst_agreement));
}

Outcome CommutingOneStep() {
  Check c;
  Rng rng(1007);
  double worst_res = 0.0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 2 + trial % 10;
    const auto fam =
        testing::CommutingFamily(rng, testing::RandomOrthogonal(rng, d), 2 + trial % 6);
    MeanConfig cfg;
    cfg.max_iter = 1;
    cfg.init = MeanInit::kEuclideanMean;
    const MeanResult r = Logged("commuting", mean_fixed_point(fam, cfg), true);
    Matrix root_avg = Matrix::Zero(d, d);
    for (const auto& s : fam) root_avg += testing::ReferenceSqrt(s.matrix());
    root_avg /= static_cast<double>(fam.size());
    const double res = fixed_point_residual(r.mean, fam);
    const double gap = max_abs(r.mean.matrix() - root_avg * root_avg);
    worst_res = std::max(worst_res, res);
    worst_gap = std::max(worst_gap, gap);
    const std::string tag = "family " + std::to_string(trial);
    c.Expect(r.iterations <= 1, tag + " took " + std::to_string(r.iterations) + " iterations");
    c.Expect(res <= 1e-10, tag + " residual " + Fmt(res));
    c.Expect(gap <= 1e-10, tag + " differs from (mean of roots)^2 by " + Fmt(gap));
  }
  return c.Finish("40 shared-eigenbasis families, max_iter = 1: max residual " + Fmt(worst_res) +
                  ", max gap to (mean of roots)^2 " + Fmt(worst_gap));
}

Outcome Multicoupling() {
  Check c;
  Rng rng(1008);
  double worst_marginal = 0.0;
  double worst_psd = 0.0;
  double worst_gf = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 1 + trial % 8;
    const Index n = 2 + trial % 5;
    const auto fam = RandomFamily(rng, n, d);
    const MeanResult r = Logged("multicoupling", mean_fixed_point(fam), true);
    const JointCovariance joint = multicoupling(r.mean, fam);
    const std::string tag = "family " + std::to_string(trial);
    for (Index i = 0; i < n; ++i) {
      const double m = max_abs(joint.block(i, i) - fam[i].matrix());
      worst_marginal = std::max(worst_marginal, m);
      c.Expect(m <= 1e-8, tag + " marginal " + std::to_string(i) + " off by " + Fmt(m));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(joint.full());
    const double scaled = -es.eigenvalues().minCoeff() / (1.0 + joint.full().trace());
    worst_psd = std::max(worst_psd, scaled);
    c.Expect(scaled <= 1e-8, tag + " block matrix not PSD");
    const double gf = std::abs(multicoupling_cost(joint) - frechet_functional(r.mean, fam));
    worst_gf = std::max(worst_gf, gf);
    c.Expect(gf <= 1e-8, tag + " |G - F| " + Fmt(gf));
  }
  return c.Finish("30 families: max marginal error " + Fmt(worst_marginal) +
                  ", max -lambda_min/(1+tr) " + Fmt(worst_psd) + ", max |G - F| " +
                  Fmt(worst_gf));
}

Outcome GenerativeIdentifiability() {
  Check c;
  Rng rng(1009);
  double worst_res = 0.0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 5;
    const Index d = 2 + trial % 6;
    const double eps = trial % 2 ? 0.1 : 0.3;
    const Covariance templ = testing::RandomSpd(rng, d, 0.5, 3.0);
    const DeformationFamily fam =
        deformation_family(templ, n, eps, {static_cast<std::uint64_t>(500 + trial), "deform"});
    const std::string tag = "family " + std::to_string(trial);
    const double res = fixed_point_residual(templ, fam.deformed);
    worst_res = std::max(worst_res, res);
    c.Expect(res <= 1e-8, tag + " template residual " + Fmt(res));
    Logged("deformation", mean_fixed_point(fam.deformed), true);

    const double at_template = frechet_functional(templ, fam.deformed);
    for (int k = 0; k < 50; ++k) {
      Matrix e = testing::RandomSymmetric(rng, d);
      e /= norms(SymMatrix(e)).op_norm;
      const double delta = k % 2 ? 0.01 : 0.1;
      const Covariance moved = make_covariance(templ.matrix() + delta * e);
      const double margin = frechet_functional(moved, fam.deformed) - at_template;
      worst_margin = std::min(worst_margin, margin);
      c.Expect(margin >= 0.0, tag + " perturbation " + std::to_string(k) + " lowers F");
    }
  }
  return c.Finish("20 families x 50 perturbations: max template residual " + Fmt(worst_res) +
                  ", min F(perturbed) - F(template) " + Fmt(worst_margin));
}

Outcome ProjectionStability() {
  Check c;
  Rng rng(1010);
  double worst_identity = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index d = 2 + trial % 9;
    const Covariance s = trial % 3 ? testing::RandomSpd(rng, d)
                                   : make_covariance(testing::RandomPsdRankMatrix(rng, d, d / 2 + 1));
    const Basis basis = trial % 2 ? Basis::Standard() : Basis::Eigen();
    for (Index r = 1; r <= d; ++r) {
      const double pi = procrustes_distance(s, project(s, r, basis));
      const double gap = std::abs(projection_error(s, r, basis) - pi * pi);
      worst_identity = std::max(worst_identity, gap);
      c.Expect(gap <= 1e-9, "matrix " + std::to_string(trial) + " rank " + std::to_string(r) +
                                " gap " + Fmt(gap));
    }
  }

  std::vector<Covariance> fam;
  for (int i = 0; i < 5; ++i) fam.push_back(testing::RandomSpd(rng, 8));
  const std::vector<Index> ranks = {2, 4, 6, 8};
  const ProjectionStabilityReport rep = projection_stability_experiment(fam, ranks, Basis::Eigen());
  std::string sequence;
  for (const auto& row : rep.rows) {
    sequence += (sequence.empty() ? "" : ", ") + std::string("r=") + std::to_string(row.rank) + ":" +
                (row.mean_trace_distance ? Fmt(*row.mean_trace_distance) : "n/a") + "/" +
                Fmt(row.pairwise_discrepancy);
  }
  const ProjectionRow& full = rep.rows.back();
  c.Expect(full.mean_trace_distance.has_value() && *full.mean_trace_distance <= 1e-6,
           "full-rank mean differs in trace norm");
  c.Expect(full.pairwise_discrepancy <= 1e-6, "full-rank discrepancy " + Fmt(full.pairwise_discrepancy));
  return c.Finish("max |tr((I-P)S) - Pi^2| " + Fmt(worst_identity) +
                  "; d=8 eigen-basis sequence (mean trace dist/discrepancy) " + sequence);
}

Outcome TangentPca() {
  Check c;
  Rng rng(1011);
  double worst_ortho = 0.0;
  double worst_recon = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 2 + trial % 5;
    const Index n = 3 + trial % 6;
    std::vector<Covariance> fam;
    for (Index i = 0; i < n; ++i) fam.push_back(testing::RandomSpd(rng, d));
    const MeanResult m = Logged("tpca", mean_fixed_point(fam), true);
    const PcaResult pca = tangent_pca(lift(fam, m.mean), m.mean,
                                      std::min<Index>(n, d * (d + 1) / 2));
    const std::string tag = "family " + std::to_string(trial);
    for (std::size_t a = 0; a < pca.components.size(); ++a) {
      for (std::size_t b = 0; b < pca.components.size(); ++b) {
        const double g = tangent_inner(m.mean, pca.components[a], pca.components[b]);
        const double e = std::abs(g - (a == b ? 1.0 : 0.0));
        worst_ortho = std::max(worst_ortho, e);
        c.Expect(e <= 1e-8, tag + " components not orthonormal");
      }
    }
    for (Index i = 0; i < n; ++i) {
      const double e = max_abs(reconstruct(m.mean, pca, i, pca.effective_rank).matrix() -
                               fam[i].matrix()) /
                       (1.0 + fam[i].trace());
      worst_recon = std::max(worst_recon, e);
      c.Expect(e <= 1e-7, tag + " member " + std::to_string(i) + " reconstruction " + Fmt(e));
    }
  }
  int single = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 2 + trial % 5;
    const Covariance a = testing::RandomSpd(rng, d);
    const Covariance b = testing::RandomSpd(rng, d);
    std::vector<Covariance> fam;
    for (double t : {0.0, 0.2, 0.5, 0.7, 1.0}) fam.push_back(geodesic(a, b, t));
    const PcaResult pca = tangent_pca(lift(fam, fam[2]), fam[2], 3);
    int above = 0;
    for (double v : pca.variances) above += v > 1e-10;
    single += above == 1;
    c.Expect(above == 1, "geodesic family " + std::to_string(trial) + " has " +
                             std::to_string(above) + " variances above 1e-10");
  }
  return c.Finish("20 families: max orthonormality error " + Fmt(worst_ortho) +
                  ", max scaled reconstruction error " + Fmt(worst_recon) + "; " +
                  std::to_string(single) + "/10 geodesic families with one variance");
}

Outcome FourthMoment() {
  Check c;
  Rng rng(1012);
  std::string zs;
  for (int trial = 0; trial < 6; ++trial) {
    const Index d = 1 + trial;
    const bool rank_one = trial % 2 == 1;
    const Covariance s = rank_one ? make_covariance(testing::RandomPsdRankMatrix(rng, d, 1))
                                  : testing::RandomSpd(rng, d);
    const FourthMomentReport r =
        fourth_moment_check(s, 100000, {static_cast<std::uint64_t>(trial), "acceptance"});
    const bool expect_equality = rank_one || d == 1;
    const std::string tag = "d=" + std::to_string(d);
    c.Expect(std::abs(r.z_score) <= 5.0, tag + " z = " + Fmt(r.z_score));
    c.Expect(r.exact <= 3.0 * s.trace() * s.trace() + 1e-12, tag + " bound violated");
    c.Expect(r.equality_case == expect_equality, tag + " equality flag wrong");
    zs += (zs.empty() ? "" : ", ") + tag + (expect_equality ? "(rank 1)" : "") + ":" +
          Fmt(r.z_score);
  }
  return c.Finish("n = 1e5, z-scores " + zs);
}

Outcome Counterexample() {
  Check c;
  double previous = std::numeric_limits<double>::infinity();
  std::string summary;
  for (int m = 1; m <= 5; ++m) {
    const CounterexampleFamily fam = counterexample_family(m);
    double smallest = std::numeric_limits<double>::infinity();
    for (double t : fam.thresholds) {
      c.Expect(t > 0.0, "m=" + std::to_string(m) + " non-positive threshold");
      smallest = std::min(smallest, t);
    }
    c.Expect(fam.recovery_distance <= 1e-6,
             "m=" + std::to_string(m) + " recovery " + Fmt(fam.recovery_distance));
    c.Expect(smallest < previous, "m=" + std::to_string(m) + " threshold not decreasing");
    previous = smallest;
    summary += (summary.empty() ? "" : ", ") + std::string("m=") + std::to_string(m) + ":" +
               Fmt(smallest) + "/" + Fmt(fam.recovery_distance);
  }
  return c.Finish("threshold/recovery " + summary);
}

struct CliResult {
  int code;
  std::string out;
};

CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "covgeom");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str()};
}

std::string Fixture(const std::string& name) {
  return (fs::path(COVGEOM_FIXTURE_DIR) / name).string();
}

Outcome CliContract() {
  Check c;
  const fs::path scratch = fs::temp_directory_path() / "covgeom_acceptance";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  // Round trip: random bit patterns, a fixture with awkward values, and a
  // matrix produced by the tool compared against its own report.
  std::mt19937_64 gen(77);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 1 + trial % 6;
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j <= i; ++j) {
        double v;
        do {
          const std::uint64_t bits = gen();
          std::memcpy(&v, &bits, sizeof v);
        } while (!std::isfinite(v));
        m(i, j) = m(j, i) = v;
      }
    }
    const Matrix back = cli::ParseMatrix(cli::FormatMatrix(m), "roundtrip");
    mismatches += std::memcmp(back.data(), m.data(), sizeof(double) * d * d) != 0;
  }
  const Matrix awkward = cli::ReadMatrixFile(Fixture("awkward.csv"));
  cli::WriteMatrixFile(scratch / "awkward.csv", awkward);
  const Matrix reread = cli::ReadMatrixFile(scratch / "awkward.csv");
  mismatches += std::memcmp(reread.data(), awkward.data(), sizeof(double) * awkward.size()) != 0;
  const CliResult mean = Cli({"mean", Fixture("skew_family.json"), "--output", scratch.string()});
  const auto report = nlohmann::json::parse(mean.out);
  const Matrix written = cli::ReadMatrixFile(scratch / "mean.csv");
  for (Index i = 0; i < written.rows(); ++i) {
    for (Index j = 0; j < written.cols(); ++j) {
      const double v = report["results"]["mean"][i][j].get<double>();
      mismatches += std::memcmp(&v, &written(i, j), sizeof v) != 0;
    }
  }
  c.Expect(mismatches == 0, std::to_string(mismatches) + " round-trip mismatches");

  // Determinism under a fixed seed, and sensitivity to the seed.
  const std::vector<std::string> deform = {"simulate", "deform", "--template",
                                           Fixture("diag321.csv"), "--seed", "3", "--output",
                                           (scratch / "deform").string()};
  const std::vector<std::string> moments = {"simulate", "moments", "--input", Fixture("skew.csv"),
                                            "--n", "20000", "--seed", "3"};
  for (const auto& cmd : {deform, moments}) {
    const CliResult a = Cli(cmd);
    const CliResult b = Cli(cmd);
    c.Expect(a.code == 0 && a.out == b.out, cmd[1] + " report not reproducible");
  }
  auto reseeded = moments;
  reseeded.back() = "4";
  c.Expect(Cli(reseeded).out != Cli(moments).out, "seed has no effect");

  // Documented exit codes.
  const std::string out = (scratch / "exit").string();
  const std::vector<std::pair<std::vector<std::string>, int>> cases = {
      {{"distance", Fixture("diag41.csv"), Fixture("diag14.csv")}, 0},
      {{"distance", Fixture("diag41.csv")}, 1},
      {{"distance", Fixture("bad_number.csv"), Fixture("diag14.csv")}, 2},
      {{"distance", Fixture("nonsquare.csv"), Fixture("diag14.csv")}, 2},
      {{"distance", Fixture("ident3.csv"), Fixture("diag14.csv")}, 3},
      {{"mean", Fixture("mixed_dims.json"), "--output", out}, 3},
      {{"distance", Fixture("not_psd.csv"), Fixture("diag14.csv")}, 4},
      {{"geodesic", Fixture("kernel_source.csv"), Fixture("kernel_target.csv"), "--output", out}, 5},
      {{"mean", Fixture("skew_family.json"), "--max-iter", "1", "--output", out}, 6},
  };
  std::string codes;
  for (const auto& [args, expected] : cases) {
    const int got = Cli(args).code;
    codes += std::to_string(got);
    c.Expect(got == expected, args[0] + " on " + fs::path(args[1]).filename().string() +
                                  " exited " + std::to_string(got) + ", expected " +
                                  std::to_string(expected));
  }
  fs::remove_all(scratch);
  return c.Finish("bit-exact round trips (" + std::to_string(mismatches) +
                  " mismatches), seeded reports reproducible, exit codes " + codes +
                  " for ok/usage/parse/parse/dim/dim/psd/kernel/max-iter");
}

// Runs last: inspects every solver run recorded above.
Outcome DescentDiagnostics() {
  Check c;
  std::size_t checked = 0;
  std::size_t init_drops = 0;
  double worst_f = 0.0;
  double worst_t = 0.0;
  for (const SolverRun& run : SolverLog()) {
    const MeanResult& r = run.result;
    ++checked;
    for (std::size_t k = 1; k < r.functional_trace.size(); ++k) {
      const double rise = r.functional_trace[k] - r.functional_trace[k - 1];
      worst_f = std::max(worst_f, rise);
      c.Expect(rise <= 1e-12, run.origin + " functional rose by " + Fmt(rise));
      // From the Euclidean mean the first image always has smaller trace:
      // that start is not an image of the averaged map.
      if (run.euclidean_init && k == 1) {
        init_drops += r.trace_of_iterates[1] < r.trace_of_iterates[0];
        continue;
      }
      const double drop = r.trace_of_iterates[k - 1] - r.trace_of_iterates[k];
      worst_t = std::max(worst_t, drop);
      c.Expect(drop <= 1e-10, run.origin + " trace fell by " + Fmt(drop));
    }
  }
  c.Expect(checked > 0, "no solver runs recorded");
  return c.Finish(std::to_string(checked) + " solver runs: max functional rise " + Fmt(worst_f) +
                  ", max trace drop between iterates " + Fmt(worst_t) + " (" +
                  std::to_string(init_drops) +
                  " runs drop from the Euclidean-mean start to iterate 1, as they must)");
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;  // 0 means no limit
};

}  // namespace
}  // namespace covgeom

int main() {
  using namespace covgeom;
  const std::vector<Criterion> criteria = {
      {1, "distance correctness", DistanceCorrectness, 10.0},
      {2, "transport pushforward", TransportPushforward, 0.0},
      {3, "geodesic constant speed", GeodesicConstantSpeed, 0.0},
      {4, "exp/log inversion", ExpLogInversion, 0.0},
      {5, "Frechet mean optimality", FrechetMeanOptimality, 60.0},
      {7, "commuting one-step", CommutingOneStep, 0.0},
      {8, "multicoupling", Multicoupling, 0.0},
      {9, "generative identifiability", GenerativeIdentifiability, 0.0},
      {10, "projection identities and stability", ProjectionStability, 0.0},
      {11, "tangent PCA", TangentPca, 0.0},
      {12, "fourth moment", FourthMoment, 20.0},
      {13, "counterexample family", Counterexample, 0.0},
      {14, "CLI contract", CliContract, 0.0},
      {6, "descent diagnostics", DescentDiagnostics, 0.0},
  };

  struct Line {
    int id;
    std::string text;
    bool pass;
  };
  std::vector<Line> lines;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += " | over the " + Fmt(c.budget_seconds) + " s budget";
    }
    char timing[48];
    std::snprintf(timing, sizeof timing, " [%.2f s]", secs);
    lines.push_back({c.id,
                     std::string(o.pass ? "PASS" : "FAIL") + "  AC" + std::to_string(c.id) + " " +
                         c.name + ": " + o.detail + timing,
                     o.pass});
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failed = 0;
  for (const auto& l : lines) {
    std::printf("%s\n", l.text.c_str());
    failed += !l.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return failed == 0 ? 0 : 1;
}
