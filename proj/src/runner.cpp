#include "barabanov/runner.hpp"

#include "barabanov/baranorm.hpp"
#include "barabanov/constructions.hpp"
#include "barabanov/error.hpp"
#include "barabanov/jsr.hpp"
#include "barabanov/report.hpp"
#include "barabanov/semigroup.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace barabanov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    f << text;
    if (!f) throw Error("write failed: " + (dir_ / name).string());
    files.push_back(name);
  }

  std::vector<std::string> files;

 private:
  fs::path dir_;
};

UniquenessConfig uniqueness_config(const RunConfig& c) {
  UniquenessConfig u;
  u.jsr_depth = c.depth;
  u.prune_ratio = c.prune_ratio;
  u.jsr_rel_tol = c.jsr_rel_tol;
  u.sample = {c.min_length, c.max_length, c.power_length, c.keep_threshold, c.dedupe_tol};
  u.pairs = c.pairs;
  u.tol = c.tol;
  u.seed = c.seed;
  u.family = {c.count, c.min_distance, c.residual_tol, c.grid};
  return u;
}

SeedNorm seed_norm(const std::string& name) {
  return name == "sup" ? SeedNorm::sup() : SeedNorm::euclidean();
}

json write_family(Output& out, const std::string& prefix, const std::vector<PolygonNorm>& norms,
                  const std::vector<std::string>& labels, const std::vector<double>& residuals,
                  const std::vector<double>& kappas, const Matrix& distances,
                  const PerturbationPair* pair) {
  json entries = json::array();
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const std::string name = prefix + "_" + std::to_string(i) + ".csv";
    out.write(name, norms[i].to_csv());
    json e{{"file", name}, {"label", labels[i]}, {"residual", number(residuals[i])},
           {"vertices", norms[i].size()}};
    e["kappa"] = (i < kappas.size() && kappas[i] > 0.0) ? number(kappas[i]) : json(nullptr);
    entries.push_back(e);
  }
  json manifest{{"schema", "manifest-v1"}, {"norms", entries}, {"distances", to_json(distances)}};
  manifest["xi"] = pair ? number(pair->xi) : json(nullptr);
  manifest["k_const"] = pair ? number(pair->k_const) : json(nullptr);
  manifest["kappa_max"] = pair ? number(pair->kappa_max) : json(nullptr);
  out.write("manifest.json", dump_report(manifest));
  return {{"manifest", "manifest.json"}, {"norms", entries}, {"distances", to_json(distances)}};
}

int verdict_exit(const UniquenessVerdict& v) {
  return v.kind == UniquenessVerdict::Kind::Undetermined ? kExitUndetermined : kExitCertified;
}

json run_unique(const RunConfig& c, const MatrixSet& set, Output& out, int& exit_code) {
  auto u = uniqueness_config(c);
  auto v = uniqueness_verdict(set, u);
  json escalations = json::array();
  // Undetermined after a failed transitivity check: longer power orbits
  // refine the sample of the limit semigroup.
  while (c.escalate && v.kind == UniquenessVerdict::Kind::Undetermined && v.transitivity &&
         !v.transitivity->satisfied && u.sample.power_length < 65536) {
    escalations.push_back({{"power_length", u.sample.power_length},
                           {"worst_error", number(v.transitivity->worst_error)}});
    u.sample.power_length = std::min<std::size_t>(4 * std::max<std::size_t>(u.sample.power_length, 1), 65536);
    v = uniqueness_verdict(set, u);
  }
  json results = to_json(v);
  results["escalations"] = escalations;
  if (v.family) {
    const auto& f = *v.family;
    results["family"] = write_family(out, "norm", f.norms, f.labels, f.residuals, f.kappas, f.distances, nullptr);
  } else {
    results["family"] = nullptr;
  }
  exit_code = verdict_exit(v);
  return results;
}

PolygonNorm companion_for(const RunConfig& c, const Matrix& b2, const AngleSpec& angle) {
  if (!angle.is_rational())
    throw Error("a polygon companion needs an exact rational rotation angle for B2");
  const std::int64_t k = std::lcm<std::int64_t>(angle.rotation_order(), 2);
  const PolygonNorm seed = c.companion == "hexagon" ? PolygonNorm::regular(6) : PolygonNorm::square();
  PolygonNorm body = group_closure(seed, k);
  const auto frame = eigen_frame(b2);
  if ((frame.s - Matrix::Identity(2, 2)).norm() != 0.0) body = body.transformed(frame.s);
  return body;
}

json run_perturb(const RunConfig& c, Output& out) {
  const Matrix b1 = to_matrix(c.set.b1);
  const Matrix b2 = to_matrix(c.set.b2);
  if (!c.set.b2_angle) throw Error("perturb needs b2_angle");
  const PolygonNorm companion = companion_for(c, b2, *c.set.b2_angle);
  const auto pair = perturbation_pair(b1, b2, companion, c.set.b2_angle);
  std::vector<double> kappas = c.kappas;
  if (kappas.empty()) kappas = {0.25 * pair.kappa_max, 0.5 * pair.kappa_max, 0.75 * pair.kappa_max};
  const auto fam = kappa_family(pair, companion, kappas, c.grid);

  std::vector<PolygonNorm> norms;
  std::vector<std::string> labels;
  std::vector<double> residuals, ks;
  json margins = json::array();
  for (const auto& k : fam) {
    norms.push_back(k.polygon);
    labels.push_back("kappa=" + json(k.kappa).dump());
    residuals.push_back(k.residual);
    ks.push_back(k.kappa);
    margins.push_back(number(k.margin));
  }
  Matrix dist = Matrix::Zero(static_cast<Eigen::Index>(norms.size()), static_cast<Eigen::Index>(norms.size()));
  for (std::size_t i = 0; i < norms.size(); ++i)
    for (std::size_t j = i + 1; j < norms.size(); ++j)
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
              norm_distance(norms[i], norms[j], Vec2::UnitX());
  json results{{"pair", to_json(pair)}, {"companion", c.companion}, {"margins", margins}};
  results["family"] = write_family(out, "kappa", norms, labels, residuals, ks, dist, &pair);
  return results;
}

std::string utc_timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

RunResult run(const RunConfig& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const MatrixSet set = build_set(c.set);
  Output out(c.out_dir);
  RunResult res;
  std::string schema = "uniqueness-report-v1";
  json results;

  if (c.command == "jsr") {
    schema = "jsr-report-v1";
    results = to_json(jsr_bounds(set, c.depth, c.prune_ratio));
  } else if (c.command == "norm") {
    schema = "norm-report-v1";
    const auto b = jsr_bounds(set, c.depth, c.prune_ratio);
    const double rho = c.rho_hat ? *c.rho_hat : b.lower;
    const GaugeApprox g(set, rho, c.horizon, seed_norm(c.seed_norm));
    const PolygonNorm poly = polygon_from_gauge(g, c.grid);
    out.write("norm.csv", poly.to_csv());
    results = {{"jsr", to_json(b)},
               {"rho_hat", number(rho)},
               {"horizon", c.horizon},
               {"seed_norm", c.seed_norm},
               {"residual", to_json(residual(set, rho, poly, c.grid))},
               {"polygon", {{"file", "norm.csv"}, {"vertices", poly.size()}}}};
  } else if (c.command == "semigroup") {
    schema = "semigroup-report-v1";
    const auto b = jsr_bounds(set, c.depth, c.prune_ratio);
    const auto u = uniqueness_config(c);
    const auto sample = sample_limit_semigroup(set, b.lower, u.sample);
    results = {{"jsr", to_json(b)}, {"sample", to_json(sample, true)}};
    results["rotation_subgroup"] = set.dim() == 2 ? to_json(detect_rotation_subgroup(sample)) : json(nullptr);
    results["rank_one"] = rank_one_diagnostic(sample, 1e-9);
    results["transitivity"] =
        sample.empty() ? json(nullptr) : to_json(transitivity_check(sample, c.pairs, c.tol, c.seed), sample);
  } else if (c.command == "perturb") {
    schema = "perturb-report-v1";
    results = run_perturb(c, out);
  } else if (c.command == "unique") {
    results = run_unique(c, set, out, res.exit_code);
  } else if (c.command == "reproduce") {
    results = run_unique(c, set, out, res.exit_code);
    json extra = json::object();
    if (c.recipe == "example2" || c.recipe == "example1") {
      extra["euclidean_residual"] = to_json(residual(set, 1.0, PolygonNorm::euclidean(c.grid), c.grid));
    }
    if (c.recipe == "theorem2") {
      try {
        const Matrix b2 = to_matrix(c.set.b2);
        const PolygonNorm companion = c.set.b2_angle && c.set.b2_angle->is_rational()
                                          ? companion_for(c, b2, *c.set.b2_angle)
                                          : c_norm(eigen_frame(b2), c.grid);
        extra["pair"] = to_json(perturbation_pair(to_matrix(c.set.b1), b2, companion, c.set.b2_angle));
      } catch (const NotInPerturbationSetError& e) {
        extra["pair"] = nullptr;
        extra["pair_error"] = e.what();
      }
    }
    results["reproduction"] = extra;
  } else {
    throw ConfigError("unknown command '" + c.command + "'");
  }

  json report{{"schema", schema}, {"library_version", BARABANOV_VERSION}};
  report["command"] = c.recipe.empty() ? json{{"name", c.command}} : json{{"name", c.command}, {"recipe", c.recipe}};
  report["config"] = to_json(c);
  report["results"] = results;
  report["exit_code"] = res.exit_code;
  std::vector<std::string> files = out.files;
  report["files"] = files;
  if (c.timestamp) {
    report["timestamp"] = utc_timestamp();
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  out.write("report.json", dump_report(report));
  res.report = std::move(report);
  res.files = out.files;
  return res;
}

}  // namespace barabanov
