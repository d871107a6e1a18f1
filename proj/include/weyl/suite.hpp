#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "weyl/report.hpp"
#include "weyl/verify.hpp"

namespace weyl {

struct GroupSpec {
  Series series = Series::A;
  int rank = 1;
  FormNormalization normalization = FormNormalization::standard_long_root_2;
  Rational scale = 1;   // custom_scale multiplier
  Rational beta = 1;    // metric scale applied to the eigenvalues
  int rank_ceiling = 4;

  RootSystem build() const {
    RootSystemConfig cfg;
    cfg.normalization = normalization;
    cfg.custom_scale = scale;
    cfg.rank_ceiling = rank_ceiling;
    return RootSystem::build(series, rank, cfg);
  }
};

struct SuiteConfig {
  GroupSpec group;
  std::vector<Rational> circles;       // optional circle factors (scales)
  std::vector<std::string> scans = {"dispersive", "lp", "counting", "weylsum"};
  std::map<std::string, std::vector<std::int64_t>> n_ladders = {
      {"dispersive", {8, 16, 32, 64}}, {"lp", {8, 16, 32}},
      {"counting", {16, 64, 256}},     {"weylsum", {8, 16, 32}},
      {"levelset", {8, 16}},           {"product", {8, 16}}};
  double lp_p = 4.0;
  double levelset_p = 6.0;
  int trials = 32;
  int counting_samples = 10000;
  std::uint64_t seed = 7;
  int threads = 1;
  GridParams grid;
  std::string out_dir = "weyl-out";
};

namespace detail {

inline FormNormalization normalization_from_string(const std::string& s) {
  if (s == "standard") return FormNormalization::standard_long_root_2;
  if (s == "killing_dual") return FormNormalization::killing_dual;
  if (s == "custom") return FormNormalization::custom_scale;
  throw PreconditionError("unknown normalization: " + s);
}

inline std::string normalization_to_string(FormNormalization n) {
  switch (n) {
    case FormNormalization::standard_long_root_2: return "standard";
    case FormNormalization::killing_dual: return "killing_dual";
    case FormNormalization::custom_scale: return "custom";
  }
  return "?";
}

}  // namespace detail

inline GroupSpec group_spec_from_json(const nlohmann::json& j) {
  GroupSpec g;
  std::set<std::string> known = {"series", "rank", "normalization", "scale", "beta",
                                 "rank_ceiling"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw PreconditionError("unknown group field: " + it.key());
  if (j.contains("series")) {
    auto s = series_from_string(j.at("series").get<std::string>());
    if (!s) throw PreconditionError("invalid series");
    g.series = *s;
  }
  if (j.contains("rank")) g.rank = j.at("rank").get<int>();
  if (j.contains("normalization"))
    g.normalization = detail::normalization_from_string(j.at("normalization").get<std::string>());
  if (j.contains("scale")) g.scale = parse_rational(j.at("scale").get<std::string>());
  if (j.contains("beta")) g.beta = parse_rational(j.at("beta").get<std::string>());
  if (j.contains("rank_ceiling")) g.rank_ceiling = j.at("rank_ceiling").get<int>();
  return g;
}

// Parse-validate: unknown fields are rejected.
inline SuiteConfig suite_config_from_json(const nlohmann::json& j) {
  SuiteConfig c;
  std::set<std::string> known = {"group",    "circles",         "scans",  "N",
                                 "lp_p",     "levelset_p",      "trials", "counting_samples",
                                 "seed",     "threads",         "grid",   "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw PreconditionError("unknown config field: " + it.key());
  if (j.contains("group")) c.group = group_spec_from_json(j.at("group"));
  if (j.contains("circles"))
    for (const auto& e : j.at("circles"))
      c.circles.push_back(parse_rational(e.get<std::string>()));
  if (j.contains("scans")) c.scans = j.at("scans").get<std::vector<std::string>>();
  if (j.contains("N")) {
    for (auto it = j.at("N").begin(); it != j.at("N").end(); ++it)
      c.n_ladders[it.key()] = it.value().get<std::vector<std::int64_t>>();
  }
  if (j.contains("lp_p")) c.lp_p = j.at("lp_p").get<double>();
  if (j.contains("levelset_p")) c.levelset_p = j.at("levelset_p").get<double>();
  if (j.contains("trials")) c.trials = j.at("trials").get<int>();
  if (j.contains("counting_samples")) c.counting_samples = j.at("counting_samples").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) c.threads = j.at("threads").get<int>();
  if (j.contains("grid")) {
    std::set<std::string> gknown = {"per_scenario", "q_max", "arc_edges", "random_t"};
    for (auto it = j.at("grid").begin(); it != j.at("grid").end(); ++it)
      if (!gknown.count(it.key()))
        throw PreconditionError("unknown grid field: " + it.key());
    const auto& gj = j.at("grid");
    if (gj.contains("per_scenario")) c.grid.per_scenario = gj.at("per_scenario").get<int>();
    if (gj.contains("q_max")) c.grid.q_max = gj.at("q_max").get<std::int64_t>();
    if (gj.contains("arc_edges")) c.grid.arc_edges = gj.at("arc_edges").get<bool>();
    if (gj.contains("random_t")) c.grid.random_t = gj.at("random_t").get<int>();
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

inline nlohmann::json suite_config_to_json(const SuiteConfig& c) {
  nlohmann::json j;
  j["group"] = {{"series", std::string(1, series_to_char(c.group.series))},
                {"rank", c.group.rank},
                {"normalization", detail::normalization_to_string(c.group.normalization)},
                {"scale", to_string(c.group.scale)},
                {"beta", to_string(c.group.beta)},
                {"rank_ceiling", c.group.rank_ceiling}};
  nlohmann::json circles = nlohmann::json::array();
  for (const Rational& a : c.circles) circles.push_back(to_string(a));
  j["circles"] = circles;
  j["scans"] = c.scans;
  nlohmann::json ladders;
  for (const auto& [k, v] : c.n_ladders) ladders[k] = v;
  j["N"] = ladders;
  j["lp_p"] = c.lp_p;
  j["levelset_p"] = c.levelset_p;
  j["trials"] = c.trials;
  j["counting_samples"] = c.counting_samples;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["grid"] = {{"per_scenario", c.grid.per_scenario},
               {"q_max", c.grid.q_max},
               {"arc_edges", c.grid.arc_edges},
               {"random_t", c.grid.random_t}};
  j["out_dir"] = c.out_dir;
  return j;
}

struct SuiteResult {
  struct Entry {
    std::string name;
    bool pass = true;
    std::string detail;
  };
  std::vector<Entry> entries;
  std::vector<std::string> files;
  bool all_pass = true;
};

namespace detail {

inline const std::vector<std::string>& scan_columns() {
  static const std::vector<std::string> cols = {"N",     "t",        "a",     "q",
                                                "offset", "value",    "envelope", "ratio",
                                                "scenario"};
  return cols;
}

inline void write_bound_report(const BoundReport& report, const std::filesystem::path& path,
                               std::uint64_t config_hash, std::uint64_t seed) {
  CsvWriter csv(report.estimate, config_hash, seed, scan_columns());
  for (const auto& row : report.rows) csv.row(row);
  csv.write(path);
}

}  // namespace detail

// Runs the selected scans, writes one CSV per scan plus a JSON summary, and
// reports pass/fail per estimate.  Sub-scan failures are recorded and the
// bundle is still produced.
inline SuiteResult run_suite(const SuiteConfig& config) {
  namespace fs = std::filesystem;
  SuiteResult result;
  // the hash identifies the experiment, not its delivery location
  nlohmann::json canonical = suite_config_to_json(config);
  canonical.erase("out_dir");
  std::uint64_t config_hash = fnv1a(canonical.dump());
  RootSystem rs = config.group.build();
  KernelSpec base;
  base.beta = config.group.beta;

  nlohmann::json summary;
  summary["tool_version"] = kToolVersion;
  {
    char hash_buf[24];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    summary["config_hash"] = hash_buf;
  }
  summary["seed"] = config.seed;
  summary["group"] = rs.name();
  summary["estimates"] = nlohmann::json::array();

  auto record = [&](const std::string& name, bool pass, const std::string& detail,
                    const nlohmann::json& extra) {
    result.entries.push_back({name, pass, detail});
    nlohmann::json e = extra;
    e["name"] = name;
    e["pass"] = pass;
    e["detail"] = detail;
    summary["estimates"].push_back(e);
    if (!pass) result.all_pass = false;
  };

  auto growth_json = [](const BoundReport& r) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& [key, val] : r.growth)
      g.push_back({{"N", key.first}, {"scenario", key.second}, {"growth", val}});
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [key, cell] : r.cells)
      cells.push_back({{"N", key.first},
                       {"scenario", key.second},
                       {"max_ratio", cell.max_ratio},
                       {"samples", cell.samples}});
    return nlohmann::json{{"growth", g}, {"cells", cells}};
  };

  for (const std::string& scan : config.scans) {
    try {
      if (scan == "dispersive") {
        BoundReport r = dispersive_scan(rs, base, config.n_ladders.at("dispersive"),
                                        config.grid, config.seed, config.threads);
        fs::path f = fs::path(config.out_dir) / "dispersive.csv";
        detail::write_bound_report(r, f, config_hash, config.seed);
        result.files.push_back(f.string());
        record("dispersive", r.pass, "sup |K_N| vs major-arc envelope", growth_json(r));
      } else if (scan == "lp") {
        BoundReport r = lp_scan(rs, base, config.n_ladders.at("lp"), config.lp_p,
                                config.grid, config.seed, config.threads);
        fs::path f = fs::path(config.out_dir) / "lp.csv";
        detail::write_bound_report(r, f, config_hash, config.seed);
        result.files.push_back(f.string());
        record("lp", r.pass, "L^p norm vs envelope at p = " + std::to_string(config.lp_p),
               growth_json(r));
      } else if (scan == "counting") {
        BoundReport r = counting_scan(config.n_ladders.at("counting"),
                                      config.counting_samples, config.seed);
        fs::path f = fs::path(config.out_dir) / "counting.csv";
        detail::write_bound_report(r, f, config_hash, config.seed);
        result.files.push_back(f.string());
        record("counting", r.pass, "reciprocal-distance sums vs arc envelope",
               growth_json(r));
      } else if (scan == "weylsum") {
        BoundReport r = weylsum_scan(rs, config.n_ladders.at("weylsum"), config.grid,
                                     config.seed);
        fs::path f = fs::path(config.out_dir) / "weylsum.csv";
        detail::write_bound_report(r, f, config_hash, config.seed);
        result.files.push_back(f.string());
        record("weylsum", r.pass, "lattice exponential sums vs envelope", growth_json(r));
      } else if (scan == "levelset") {
        LevelsetReport r = levelset_check(rs, base, config.n_ladders.at("levelset"),
                                          config.levelset_p, config.trials, config.seed);
        CsvWriter csv("levelset", config_hash, config.seed,
                      {"N", "multiplier", "trial", "lambda", "measure", "bound", "ratio"});
        for (const auto& row : r.rows) csv.row(row);
        fs::path f = fs::path(config.out_dir) / "levelset.csv";
        csv.write(f);
        result.files.push_back(f.string());
        nlohmann::json g = nlohmann::json::array();
        for (const auto& [key, val] : r.growth)
          g.push_back({{"N", key.first}, {"multiplier", key.second}, {"growth", val}});
        record("levelset", r.pass, "superlevel measure vs distributional bound",
               nlohmann::json{{"growth", g}});
      } else if (scan == "product") {
        if (config.circles.empty())
          throw PreconditionError("product scan needs at least one circle factor");
        ProductMetric metric = ProductMetric::create(config.circles, {config.group.beta});
        ProductScanResult r =
            product_dispersive_scan(metric, {&rs}, base, config.n_ladders.at("product"),
                                    config.grid, config.seed);
        fs::path f = fs::path(config.out_dir) / "product.csv";
        detail::write_bound_report(r.report, f, config_hash, config.seed);
        result.files.push_back(f.string());
        nlohmann::json extra = growth_json(r.report);
        extra["flow_period_over_2pi"] = to_string(r.period_over_2pi);
        extra["period_defect"] = r.period_defect;
        record("product", r.report.pass && r.period_pass,
               "product kernel vs product envelope; flow period", extra);
      } else {
        record(scan, false, "unknown scan", {});
      }
    } catch (const Error& e) {
      record(scan, false, std::string("error: ") + e.what(), {});
    }
  }

  fs::path sf = fs::path(config.out_dir) / "summary.json";
  write_text_atomic(sf, summary.dump(2) + "\n");
  result.files.push_back(sf.string());
  return result;
}

}  // namespace weyl
