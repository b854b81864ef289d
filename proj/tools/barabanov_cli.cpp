// Command-line front end: each subcommand builds a RunConfig (from --config
// and/or flags) and hands it to barabanov::run.

#include "barabanov/config.hpp"
#include "barabanov/error.hpp"
#include "barabanov/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using barabanov::RunConfig;

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> depth;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> grid;
  std::optional<double> tol;
  bool no_timestamp = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "config-v1 JSON file")->check(CLI::ExistingFile);
  app->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "RNG seed for transitivity pairs");
  app->add_option("--depth", c.depth, "JSR branch-and-bound depth")->check(CLI::PositiveNumber);
  app->add_option("--horizon", c.horizon, "finite gauge horizon");
  app->add_option("--grid", c.grid, "angular grid size (even, >= 16)");
  app->add_option("--tol", c.tol, "transitivity tolerance")->check(CLI::PositiveNumber);
  app->add_flag("--no-timestamp", c.no_timestamp, "omit timestamp and wall-clock from report.json");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw barabanov::ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Starts from --config (whose command must agree) or from defaults.
RunConfig base_config(const Common& c, const std::string& command, const std::string& recipe = "") {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    cfg = barabanov::parse_config(read_file(c.config_path));
    if (command != "run" && (cfg.command != command || cfg.recipe != recipe))
      throw barabanov::ConfigError("config command '" + cfg.command +
                                   (cfg.recipe.empty() ? "" : " " + cfg.recipe) +
                                   "' does not match the subcommand");
  } else {
    cfg.command = command;
    cfg.recipe = recipe;
  }
  return cfg;
}

void apply_common(const Common& c, RunConfig& cfg) {
  cfg.out_dir = c.out_dir;
  if (c.seed) cfg.seed = *c.seed;
  if (c.depth) cfg.depth = *c.depth;
  if (c.horizon) cfg.horizon = *c.horizon;
  if (c.grid) {
    if (*c.grid < 16 || *c.grid % 2 != 0) throw barabanov::ConfigError("--grid must be even and >= 16");
    cfg.grid = *c.grid;
  }
  if (c.tol) cfg.tol = *c.tol;
  cfg.timestamp = !c.no_timestamp;
}

void set_inline_matrices(RunConfig& cfg, const std::vector<std::string>& mats) {
  if (mats.empty()) return;
  cfg.set = {};
  cfg.set.kind = barabanov::SetSpec::Kind::Matrices;
  for (const auto& m : mats) cfg.set.matrices.push_back(barabanov::parse_inline_matrix(m));
  cfg.set.angles.assign(mats.size(), std::nullopt);
}

void require_set(const RunConfig& cfg, const Common& c) {
  if (c.config_path.empty() && cfg.set.kind == barabanov::SetSpec::Kind::Matrices && cfg.set.matrices.empty())
    throw barabanov::ConfigError("no matrix set: pass --config or --matrix");
}

void summarize(const barabanov::RunResult& r, const RunConfig& cfg) {
  const auto& res = r.report["results"];
  std::cout << r.report["schema"].get<std::string>();
  if (res.contains("verdict")) std::cout << " verdict=" << res["verdict"].get<std::string>();
  if (res.contains("lower") && res.contains("upper"))
    std::cout << " lower=" << res["lower"].dump() << " upper=" << res["upper"].dump();
  std::cout << " files=" << r.files.size() << " out=" << cfg.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint spectral radius bounds, Barabanov norms and uniqueness verdicts"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BARABANOV_VERSION));

  std::vector<Common> commons(12);
  std::size_t ci = 0;
  std::vector<std::string> matrices;

  auto* run_cmd = app.add_subcommand("run", "execute the command named in --config");
  Common& c_run = commons[ci++];
  add_common(run_cmd, c_run);

  struct Plain {
    const char* name;
    const char* help;
  };
  std::vector<std::pair<CLI::App*, Common*>> plain;
  for (const Plain& p : {Plain{"jsr", "joint spectral radius bracket"},
                         Plain{"norm", "finite-horizon Barabanov gauge as a polygon"},
                         Plain{"unique", "uniqueness verdict for the Barabanov norm"},
                         Plain{"semigroup", "limit semigroup sample and transitivity check"}}) {
    auto* sub = app.add_subcommand(p.name, p.help);
    Common& c = commons[ci++];
    add_common(sub, c);
    sub->add_option("--matrix", matrices, "generator as \"a,b;c,d\" (repeatable)");
    plain.emplace_back(sub, &c);
  }

  std::string b1, b2, b2_angle, companion;
  std::vector<double> kappas;
  bool irrational = false;
  auto* perturb = app.add_subcommand("perturb", "perturbation construction for a pair (B1, B2)");
  Common& c_perturb = commons[ci++];
  add_common(perturb, c_perturb);
  perturb->add_option("--b1", b1, "B1 as \"a,b;c,d\"");
  perturb->add_option("--b2", b2, "B2 as \"a,b;c,d\"");
  perturb->add_option("--b2-angle", b2_angle, "rotation angle of B2 in units of pi (p/q)");
  perturb->add_option("--companion", companion, "square | hexagon")->check(CLI::IsMember({"square", "hexagon"}));
  perturb->add_option("--kappa", kappas, "kappa values (repeatable)");

  auto* reproduce = app.add_subcommand("reproduce", "run a built-in example end to end");
  reproduce->require_subcommand(1);
  std::string theta;
  std::size_t max_n = 3;
  auto* ex1 = reproduce->add_subcommand("example1", "{diag(1,0), R(theta*pi)}");
  Common& c_ex1 = commons[ci++];
  add_common(ex1, c_ex1);
  ex1->add_option("--theta", theta, "angle in units of pi: p/q, or a decimal with --irrational");
  ex1->add_flag("--irrational", irrational, "declare theta irrational");
  auto* ex2 = reproduce->add_subcommand("example2", "{I} and R(pi/2^n), n <= maxN");
  Common& c_ex2 = commons[ci++];
  add_common(ex2, c_ex2);
  ex2->add_option("--maxN", max_n, "truncation level")->check(CLI::Range(1, 60));
  auto* th2 = reproduce->add_subcommand("theorem2", "pair (B1, B2) near the perturbation set");
  Common& c_th2 = commons[ci++];
  add_common(th2, c_th2);
  th2->add_option("--b1", b1, "B1 as \"a,b;c,d\"");
  th2->add_option("--b2", b2, "B2 as \"a,b;c,d\"");
  th2->add_option("--b2-angle", b2_angle, "rotation angle of B2 in units of pi");
  th2->add_flag("--irrational", irrational, "declare the B2 angle irrational");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : barabanov::kExitError;
  }

  try {
    RunConfig cfg;
    const Common* common = nullptr;
    if (run_cmd->parsed()) {
      if (c_run.config_path.empty()) throw barabanov::ConfigError("run needs --config");
      cfg = base_config(c_run, "run");
      common = &c_run;
    }
    for (auto& [sub, c] : plain) {
      if (!sub->parsed()) continue;
      cfg = base_config(*c, sub->get_name());
      set_inline_matrices(cfg, matrices);
      require_set(cfg, *c);
      common = c;
    }
    auto theorem2_set = [&](RunConfig& r) {
      if (b1.empty() && b2.empty()) return;
      if (b1.empty() || b2.empty()) throw barabanov::ConfigError("--b1 and --b2 go together");
      r.set = {};
      r.set.kind = barabanov::SetSpec::Kind::Theorem2;
      r.set.b1 = barabanov::parse_inline_matrix(b1);
      r.set.b2 = barabanov::parse_inline_matrix(b2);
      if (!b2_angle.empty()) r.set.b2_angle = barabanov::parse_angle_over_pi(b2_angle, irrational);
    };
    if (perturb->parsed()) {
      cfg = base_config(c_perturb, "perturb");
      theorem2_set(cfg);
      if (!companion.empty()) cfg.companion = companion;
      if (!kappas.empty()) cfg.kappas = kappas;
      if (cfg.set.kind != barabanov::SetSpec::Kind::Theorem2)
        throw barabanov::ConfigError("perturb needs --b1/--b2 or a theorem2 config");
      common = &c_perturb;
    }
    if (ex1->parsed()) {
      cfg = base_config(c_ex1, "reproduce", "example1");
      if (!theta.empty()) {
        cfg.set = {};
        cfg.set.kind = barabanov::SetSpec::Kind::Example1;
        cfg.set.theta = barabanov::parse_angle_over_pi(theta, irrational);
      } else if (c_ex1.config_path.empty()) {
        throw barabanov::ConfigError("example1 needs --theta");
      }
      common = &c_ex1;
    }
    if (ex2->parsed()) {
      cfg = base_config(c_ex2, "reproduce", "example2");
      if (c_ex2.config_path.empty() || ex2->count("--maxN")) {
        cfg.set = {};
        cfg.set.kind = barabanov::SetSpec::Kind::Example2;
        cfg.set.max_n = max_n;
      }
      common = &c_ex2;
    }
    if (th2->parsed()) {
      cfg = base_config(c_th2, "reproduce", "theorem2");
      theorem2_set(cfg);
      if (cfg.set.kind != barabanov::SetSpec::Kind::Theorem2)
        throw barabanov::ConfigError("theorem2 needs --b1/--b2 or a theorem2 config");
      common = &c_th2;
    }
    if (!common) throw barabanov::ConfigError("no command given");
    apply_common(*common, cfg);
    // Round trip through the config validator so flags get the same checks
    // as config files.
    const std::string out_dir = cfg.out_dir;
    const bool timestamp = cfg.timestamp;
    cfg = barabanov::config_from_json(barabanov::to_json(cfg));
    cfg.out_dir = out_dir;
    cfg.timestamp = timestamp;

    const auto result = barabanov::run(cfg);
    summarize(result, cfg);
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return barabanov::kExitError;
  }
}
