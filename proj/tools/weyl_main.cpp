// Command-line entry point: root-system info, character evaluation, kernel
// batches, and the verification scans.
//
// Exit codes: 0 success/pass, 2 usage or config error, 3 numeric-domain
// error (e.g. a wall-gated evaluation), 4 verification bound-growth failure.

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "weyl/characters.hpp"
#include "weyl/kernel.hpp"
#include "weyl/report.hpp"
#include "weyl/rootsys.hpp"
#include "weyl/suite.hpp"
#include "weyl/verify.hpp"

namespace {

using namespace weyl;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumericDomain = 3;
constexpr int kExitBoundFailure = 4;

std::vector<std::int64_t> parse_ladder(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  if (out.empty()) throw PreconditionError("empty N ladder");
  return out;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::int64_t> parse_ints(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  return out;
}

GroupSpec parse_group(const std::string& name) {
  if (name.size() < 2) throw PreconditionError("group must look like A1, B2, ...");
  auto series = series_from_string(name.substr(0, 1));
  if (!series) throw PreconditionError("invalid series in group " + name);
  GroupSpec g;
  g.series = *series;
  g.rank = std::stoi(name.substr(1));
  return g;
}

json rootsys_info_json(const RootSystem& rs) {
  json j;
  j["schema"] = "weyl.rootsys/1";
  j["series"] = std::string(1, series_to_char(rs.series()));
  j["rank"] = rs.rank();
  j["dimension"] = rs.dimension();
  j["positive_root_count"] = rs.num_positive_roots();
  j["weyl_order"] = rs.weyl_group().size();
  j["lattice_period"] = rs.lattice_period();
  j["center_order"] = rs.lattice_cosets().size();
  json roots = json::array();
  for (const IVec& a : rs.positive_roots_root()) roots.push_back(a);
  j["positive_roots"] = roots;  // simple-root coordinates
  json cartan = json::array();
  for (int i = 0; i < rs.rank(); ++i) {
    json row = json::array();
    for (int k = 0; k < rs.rank(); ++k) row.push_back(rs.cartan().at(i, k));
    cartan.push_back(row);
  }
  j["cartan"] = cartan;
  json gram = json::array();
  for (int i = 0; i < rs.rank(); ++i) {
    json row = json::array();
    for (int k = 0; k < rs.rank(); ++k) row.push_back(to_string(rs.gram_root().at(i, k)));
    gram.push_back(row);
  }
  j["gram_simple"] = gram;
  json rho = json::array();
  for (const Rational& c : rs.rho_root()) rho.push_back(to_string(c));
  j["rho_simple_root_coords"] = rho;
  j["rho_weight_coords"] = rs.rho_weight();
  j["longest_word"] = rs.longest_word();
  json cosets = json::array();
  for (const IVec& rep : rs.lattice_cosets()) cosets.push_back(rep);
  j["coset_representatives"] = cosets;
  j["normalization"] = weyl::detail::normalization_to_string(rs.form().tag);
  j["scale"] = to_string(rs.form().scale);
  return j;
}

struct GroupFlags {
  std::string group = "A1";
  std::string normalization = "standard";
  std::string scale = "1";
  std::string beta = "1";
  int rank_ceiling = 4;

  GroupSpec resolve() const {
    GroupSpec g = parse_group(group);
    g.normalization = weyl::detail::normalization_from_string(normalization);
    g.scale = parse_rational(scale);
    g.beta = parse_rational(beta);
    g.rank_ceiling = rank_ceiling;
    return g;
  }
};

void add_group_flags(CLI::App* cmd, GroupFlags& flags) {
  cmd->add_option("--group", flags.group, "root system, e.g. A1, A2, B2, G2");
  cmd->add_option("--normalization", flags.normalization,
                  "standard | killing_dual | custom");
  cmd->add_option("--scale", flags.scale, "rational scale for custom normalization");
  cmd->add_option("--beta", flags.beta, "rational metric scale on the eigenvalues");
  cmd->add_option("--rank-ceiling", flags.rank_ceiling, "maximum admitted rank");
}

int cmd_rootsys_info(const std::string& series, int rank, const GroupFlags& flags) {
  auto s = series_from_string(series);
  if (!s) {
    std::cerr << "error: invalid series '" << series << "' (use A-G)\n";
    return kExitUsage;
  }
  GroupSpec g = flags.resolve();
  g.series = *s;
  g.rank = rank;
  RootSystem rs = g.build();
  std::cout << rootsys_info_json(rs).dump(2) << "\n";
  return kExitOk;
}

int cmd_character(const GroupFlags& flags, const std::string& lambda_str,
                  const std::string& h_str, double su2_theta, const std::string& method,
                  int order) {
  GroupSpec g = flags.resolve();
  RootSystem rs = g.build();
  IVec lambda = parse_ints(lambda_str);
  if (static_cast<int>(lambda.size()) != rs.rank())
    throw PreconditionError("lambda has wrong rank");
  std::vector<double> coords;
  if (!h_str.empty())
    coords = parse_doubles(h_str);
  else
    coords = {su2_theta / 2.0};
  if (static_cast<int>(coords.size()) != rs.rank())
    throw PreconditionError("H has wrong rank");
  TorusPoint h = make_torus_point(rs, coords);

  Complex value;
  if (method == "quotient") {
    value = character_quotient(rs, lambda, h);
  } else if (method == "stable") {
    value = character_stable(rs, lambda, h);
  } else if (method == "series") {
    value = character_series_near_wall(rs, lambda, h, order).value;
  } else {
    throw PreconditionError("method must be quotient, stable, or series");
  }
  std::cout << "value " << fmt_double(value.real()) << (value.imag() < 0 ? " - " : " + ")
            << fmt_double(std::fabs(value.imag())) << "i  method=" << method
            << "  min_wall_distance=" << fmt_double(h.min_wall_distance()) << "\n";
  return kExitOk;
}

int cmd_kernel_batch(const std::string& config_path, const std::string& out_path) {
  json j;
  {
    std::ifstream in(config_path);
    if (!in) throw PreconditionError("cannot open config " + config_path);
    in >> j;
  }
  std::set<std::string> known = {"group", "N", "method", "t", "H", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw PreconditionError("unknown field: " + it.key());
  GroupSpec g = group_spec_from_json(j.at("group"));
  RootSystem rs = g.build();
  std::vector<std::int64_t> ladder = j.at("N").get<std::vector<std::int64_t>>();
  std::string method_name = j.value("method", "weight_lattice");
  KernelMethod method = KernelMethod::weight_lattice;
  for (KernelMethod m : {KernelMethod::weight_chamber, KernelMethod::weight_lattice,
                         KernelMethod::root_coset, KernelMethod::stable_multiplicity})
    if (kernel_method_name(m) == method_name) method = m;
  std::uint64_t seed = j.value("seed", 7ULL);

  GridParams params;
  if (j.contains("t")) {
    const auto& tj = j.at("t");
    params.q_max = tj.value("q_max", std::int64_t(4));
    params.arc_edges = tj.value("edges", true);
    params.random_t = tj.value("random", 2);
  }
  int per_scenario = 4;
  std::vector<std::vector<double>> h_list;
  if (j.contains("H")) {
    const auto& hj = j.at("H");
    per_scenario = hj.value("per_scenario", 4);
    if (hj.contains("points"))
      h_list = hj.at("points").get<std::vector<std::vector<double>>>();
  }
  params.per_scenario = per_scenario;

  std::uint64_t config_hash = fnv1a(j.dump());
  CsvWriter csv("kernel_batch", config_hash, seed,
                {"N", "t", "H", "re", "im", "abs", "method", "terms"});
  for (std::int64_t n : ladder) {
    SplitMix64 rng(seed ^ (0x1234ULL * n));
    KernelSpec spec;
    spec.N = n;
    spec.beta = g.beta;
    spec.method = method;
    KernelEvaluator eval(rs, spec);
    std::vector<TorusPoint> points;
    if (!h_list.empty()) {
      for (const auto& coords : h_list) points.push_back(make_torus_point(rs, coords));
    } else {
      for (const auto& s : build_h_grid(rs, n, params, rng)) points.push_back(s.h);
    }
    auto times = build_t_samples(kernel_period_over_2pi(rs, g.beta), n, params, rng);
    for (const auto& ts : times)
      for (const auto& h : points) {
        KernelValue v = eval.evaluate(ts.t, h, method);
        std::string coords;
        for (size_t i = 0; i < h.coords.size(); ++i)
          coords += (i ? ";" : "") + fmt_double(h.coords[i]);
        csv.row({fmt_int(n), fmt_double(ts.t), coords, fmt_double(v.value.real()),
                 fmt_double(v.value.imag()), fmt_double(std::abs(v.value)),
                 kernel_method_name(v.method_used), fmt_int(v.terms_summed)});
      }
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    csv.write(out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return kExitOk;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("WEYL_OUT_DIR")) return env;
  return "weyl-out";
}

int cmd_verify(const std::string& scan, const std::string& config_path,
               const GroupFlags& group_flags, bool group_given, const std::string& ladder,
               double p, int trials, int samples, std::uint64_t seed, bool seed_given,
               const std::string& out_dir, int threads, const std::string& circles) {
  SuiteConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw PreconditionError("cannot open config " + config_path);
    json j;
    in >> j;
    config = suite_config_from_json(j);
  } else {
    config.out_dir = default_out_dir();
  }
  // flags win over the config file
  if (group_given || config_path.empty()) config.group = group_flags.resolve();
  if (scan != "suite") config.scans = {scan};
  if (!ladder.empty()) {
    auto l = parse_ladder(ladder);
    if (scan == "suite") {
      for (auto& [k, v] : config.n_ladders) v = l;
    } else {
      config.n_ladders[scan] = l;
    }
  }
  if (p > 0) {
    config.lp_p = p;
    config.levelset_p = p;
  }
  if (trials > 0) config.trials = trials;
  if (samples > 0) config.counting_samples = samples;
  if (seed_given) config.seed = seed;
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (threads > 0) config.threads = threads;
  if (!circles.empty()) {
    config.circles.clear();
    std::stringstream ss(circles);
    std::string item;
    while (std::getline(ss, item, ',')) config.circles.push_back(parse_rational(item));
  }

  SuiteResult result = run_suite(config);
  for (const auto& e : result.entries)
    std::cout << (e.pass ? "PASS " : "FAIL ") << e.name << ": " << e.detail << "\n";
  std::cout << "bundle: " << config.out_dir << " (" << result.files.size() << " files)\n";
  return result.all_pass ? kExitOk : kExitBoundFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmonic analysis on compact Lie groups: root systems, Weyl "
               "characters, Schrodinger kernels, and major-arc experiments"};
  app.require_subcommand(1);

  // rootsys info
  auto* rootsys_cmd = app.add_subcommand("rootsys", "root system data");
  rootsys_cmd->require_subcommand(1);
  auto* info_cmd = rootsys_cmd->add_subcommand("info", "print a JSON summary");
  std::string info_series;
  int info_rank = 1;
  GroupFlags info_flags;
  info_cmd->add_option("series", info_series, "series letter A-G")->required();
  info_cmd->add_option("rank", info_rank, "rank")->required();
  info_cmd->add_option("--normalization", info_flags.normalization,
                       "standard | killing_dual | custom");
  info_cmd->add_option("--scale", info_flags.scale, "rational scale for custom");
  info_cmd->add_option("--rank-ceiling", info_flags.rank_ceiling, "maximum admitted rank");

  // character
  auto* char_cmd = app.add_subcommand("character", "evaluate a Weyl character");
  GroupFlags char_flags;
  std::string char_lambda = "1";
  std::string char_h;
  double char_theta = 0;
  std::string char_method = "stable";
  int char_order = 40;
  add_group_flags(char_cmd, char_flags);
  char_cmd->add_option("--lambda", char_lambda, "weight coordinates, comma separated")
      ->required();
  char_cmd->add_option("--H", char_h, "torus point in simple-root coordinates");
  char_cmd->add_option("--su2-theta", char_theta, "rank-1 shortcut: H = theta w");
  char_cmd->add_option("--method", char_method, "quotient | stable | series");
  char_cmd->add_option("--order", char_order, "series truncation order");

  // kernel batch
  auto* kernel_cmd = app.add_subcommand("kernel", "evaluate kernel batches from a job file");
  std::string kernel_config, kernel_out;
  kernel_cmd->add_option("--config", kernel_config, "job description (JSON)")->required();
  kernel_cmd->add_option("--out", kernel_out, "output CSV path (default stdout)");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run verification scans");
  verify_cmd->require_subcommand(1);
  std::string v_config, v_ladder, v_out, v_circles;
  GroupFlags v_flags;
  double v_p = 0;
  int v_trials = 0, v_samples = 0, v_threads = 0;
  std::uint64_t v_seed = 0;
  std::vector<CLI::App*> scan_cmds;
  for (const char* name :
       {"dispersive", "lp", "counting", "weylsum", "levelset", "suite", "product"}) {
    auto* c = verify_cmd->add_subcommand(name, std::string("run the ") + name + " scan");
    c->add_option("--config", v_config, "suite configuration file (JSON)");
    add_group_flags(c, v_flags);
    c->add_option("--N", v_ladder, "dyadic ladder, comma separated");
    c->add_option("--p", v_p, "Lebesgue exponent");
    c->add_option("--trials", v_trials, "random data draws");
    c->add_option("--samples", v_samples, "counting time samples");
    c->add_option("--seed", v_seed, "master seed");
    c->add_option("--out", v_out, "output directory");
    c->add_option("--threads", v_threads, "worker thread budget");
    c->add_option("--circles", v_circles, "circle scales for product groups");
    scan_cmds.push_back(c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (info_cmd->parsed()) return cmd_rootsys_info(info_series, info_rank, info_flags);
    if (char_cmd->parsed())
      return cmd_character(char_flags, char_lambda, char_h, char_theta, char_method,
                           char_order);
    if (kernel_cmd->parsed()) return cmd_kernel_batch(kernel_config, kernel_out);
    if (verify_cmd->parsed()) {
      for (CLI::App* c : scan_cmds)
        if (c->parsed())
          return cmd_verify(c->get_name(), v_config, v_flags,
                            c->count("--group") > 0, v_ladder, v_p, v_trials, v_samples,
                            v_seed, c->count("--seed") > 0, v_out, v_threads, v_circles);
    }
  } catch (const WallTooCloseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericDomain;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericDomain;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NotRationalMetricError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericDomain;
  }
  return kExitUsage;
}
