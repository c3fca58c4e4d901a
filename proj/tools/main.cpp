// bsl: branching subordinator lab
//
// Configuration-driven experiment runner. Every subcommand writes a JSON run
// manifest; CSV artifacts carry the manifest reference in their first line
// and are byte-stable under reruns of the same configuration.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bsl/analysis.hpp"
#include "bsl/csv.hpp"
#include "bsl/engine.hpp"
#include "bsl/errors.hpp"
#include "bsl/families.hpp"
#include "bsl/measures.hpp"
#include "bsl/random.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunContext {
  json config;
  std::string command;
  fs::path out_dir;
  std::string run_id;
  std::vector<std::string> artifacts;
  json extra;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

std::string hash_id(const std::string& text) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (unsigned char c : text) h = mix64(h ^ c);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double get_num(const json& j, const std::string& key, std::optional<double> fallback = {}) {
  if (j.contains(key) && !j.at(key).is_null()) return j.at(key).get<double>();
  if (fallback) return *fallback;
  throw bsl::InvalidParams("missing configuration key: " + key);
}

bsl::CharacteristicCouple couple_from(const json& cfg) {
  bsl::CharacteristicCouple couple;
  couple.drift = get_num(cfg, "drift", 0.0);
  const std::string family = cfg.value("family", std::string("bp"));
  if (family == "bp") {
    couple.family = bsl::FamilyDescriptor::bp(get_num(cfg, "r"), get_num(cfg, "rho"));
  } else if (family == "ri") {
    couple.family = bsl::FamilyDescriptor::ri(get_num(cfg, "alpha"), get_num(cfg, "beta"));
  } else if (family == "mb") {
    couple.family = bsl::FamilyDescriptor::mb(get_num(cfg, "alpha"), get_num(cfg, "theta"));
  } else if (family == "mt") {
    couple.family = bsl::FamilyDescriptor::mt(get_num(cfg, "alpha"), get_num(cfg, "theta"));
  } else if (family == "custom") {
    bsl::CustomMeasure m;
    const json& c = cfg.at("custom");
    for (const json& jj : c.value("jumps", json::array())) {
      m.jumps.push_back({jj.at("rate").get<double>(), jj.at("size").get<double>()});
    }
    for (const json& jb : c.value("branches", json::array())) {
      bsl::DisplacementAtom atom;
      for (const json& e : jb.at("atom")) atom.entries.push_back(e.get<double>());
      m.branches.push_back({jb.at("rate").get<double>(), std::move(atom)});
    }
    couple.family = bsl::FamilyDescriptor::custom_measure(std::move(m));
  } else {
    throw bsl::InvalidParams("unknown family: " + family);
  }
  bsl::validate(couple);
  return couple;
}

std::vector<double> grid_from(const json& cfg, const std::string& key) {
  std::vector<double> grid;
  if (cfg.contains(key)) {
    for (const json& v : cfg.at(key)) grid.push_back(v.get<double>());
  }
  return grid;
}

std::uint64_t seed_from(const json& cfg) {
  if (const char* env = std::getenv("BSL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return static_cast<std::uint64_t>(get_num(cfg, "seed", 1.0));
}

bsl::SimConfig sim_config_from(const json& cfg) {
  bsl::SimConfig sim;
  sim.truncation = get_num(cfg, "truncation");
  sim.horizon = get_num(cfg, "horizon");
  // the barrier defaults to the truncation level; "cap": null disables it
  if (cfg.contains("cap")) {
    if (!cfg.at("cap").is_null()) sim.cap = cfg.at("cap").get<double>();
  } else {
    sim.cap = sim.truncation;
  }
  sim.adaptive_barrier = cfg.value("adaptive", false);
  if (sim.adaptive_barrier) {
    sim.cap.reset();
    sim.window = get_num(cfg, "window", 2.0);
    sim.sync_interval = get_num(cfg, "sync_interval", 0.0);
    sim.select_lowest = static_cast<std::size_t>(get_num(cfg, "select_lowest", 0.0));
  }
  sim.max_particles = static_cast<std::size_t>(get_num(cfg, "max_particles", 5e6));
  sim.master_seed = seed_from(cfg);
  sim.query_times = grid_from(cfg, "query_times");
  sim.record_events = cfg.value("record_events", true);
  return sim;
}

std::ofstream open_artifact(RunContext& ctx, const std::string& name) {
  const std::string file = ctx.command + "-" + ctx.run_id + "-" + name;
  fs::create_directories(ctx.out_dir);
  std::ofstream os(ctx.out_dir / file, std::ios::binary);
  if (!os) throw bsl::Error("cannot open artifact file for writing: " + file);
  ctx.artifacts.push_back(file);
  return os;
}

std::string preamble(const RunContext& ctx) {
  return "run=" + ctx.run_id + " manifest=" + ctx.command + "-" + ctx.run_id +
         ".manifest.json";
}

void write_manifest(RunContext& ctx) {
  const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - ctx.started);
  json m;
  m["run_id"] = ctx.run_id;
  m["command"] = ctx.command;
  m["seed"] = seed_from(ctx.config);
  m["config"] = ctx.config;
  m["artifacts"] = ctx.artifacts;
  m["wall_ms"] = wall.count();
  if (!ctx.extra.is_null()) m["result"] = ctx.extra;
  fs::create_directories(ctx.out_dir);
  std::ofstream os(ctx.out_dir / (ctx.command + "-" + ctx.run_id + ".manifest.json"));
  os << m.dump(2) << "\n";
}

json counters_json(const bsl::SimCounters& c) {
  json j;
  j["branch_events"] = c.branch_events;
  j["candidates"] = c.candidates;
  j["born"] = c.born;
  j["pruned"] = c.pruned;
  j["culled"] = c.culled;
  j["peak_alive"] = c.peak_alive;
  j["final_alive"] = c.final_alive;
  j["end_time"] = c.end_time;
  j["saturated"] = c.saturated;
  return j;
}

std::vector<double> lambda_grid_from(const json& cfg) {
  std::vector<double> grid = grid_from(cfg, "lambda_grid");
  if (!grid.empty()) return grid;
  const double lo = get_num(cfg, "lambda_min", 0.0);
  const double hi = get_num(cfg, "lambda_max", 16.0);
  const int n = static_cast<int>(get_num(cfg, "lambda_count", 33.0));
  for (int i = 0; i < n; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / std::max(1, n - 1));
  }
  return grid;
}

int run_command(RunContext& ctx) {
  const json& cfg = ctx.config;

  if (ctx.command == "validate") {
    const auto couple = couple_from(cfg);
    const auto rep = bsl::validate(couple);
    std::cout << rep.summary() << "\n";
    ctx.extra["valid"] = rep.ok();
    ctx.extra["a0"] = rep.a0;
  } else if (ctx.command == "laplace") {
    const auto couple = couple_from(cfg);
    const auto table = bsl::laplace_table(couple, get_num(cfg, "truncation"),
                                          lambda_grid_from(cfg));
    auto os = open_artifact(ctx, "table.csv");
    bsl::write_csv(bsl::laplace_csv(table), os, preamble(ctx));
    std::cout << "limit=" << table.limit_value << "\n";
    ctx.extra["limit"] = table.limit_value;
  } else if (ctx.command == "classify") {
    const auto v = bsl::classify(couple_from(cfg));
    const char* name = v.verdict == bsl::Verdict::infinite_limit ? "InfiniteLimit"
                       : v.verdict == bsl::Verdict::finite_limit ? "FiniteLimit"
                                                                 : "Indeterminate";
    std::cout << "verdict=" << name << " L=" << v.limit << "\n";
    ctx.extra["verdict"] = name;
    ctx.extra["L"] = v.limit;
  } else if (ctx.command == "audit") {
    const auto couple = couple_from(cfg);
    const auto rep = bsl::audit_regularity(couple, get_num(cfg, "sigma"), get_num(cfg, "c1"),
                                           get_num(cfg, "c2"), grid_from(cfg, "a_grid"));
    auto os = open_artifact(ctx, "audit.csv");
    bsl::write_csv(bsl::audit_csv(rep), os, preamble(ctx));
    std::cout << "consistent=" << rep.consistent() << "\n";
    ctx.extra["consistent"] = rep.consistent();
    ctx.extra["mass_growth_bounded"] = rep.mass_growth_bounded;
    ctx.extra["mass_growth_positive"] = rep.mass_growth_positive;
    ctx.extra["moment_high_bounded"] = rep.moment_high_bounded;
    ctx.extra["moment_low_positive"] = rep.moment_low_positive;
    ctx.extra["variance_bounded"] = rep.variance_bounded;
  } else if (ctx.command == "envelope") {
    const auto rep = bsl::mb_envelope_check(get_num(cfg, "theta"), get_num(cfg, "ell"),
                                            grid_from(cfg, "a_grid"));
    auto os = open_artifact(ctx, "envelope.csv");
    bsl::write_csv(bsl::envelope_csv(rep), os, preamble(ctx));
    std::cout << "upper_margin=" << rep.worst_upper_margin
              << " lower_margin=" << rep.worst_lower_margin << "\n";
    ctx.extra["worst_upper_margin"] = rep.worst_upper_margin;
    ctx.extra["worst_lower_margin"] = rep.worst_lower_margin;
  } else if (ctx.command == "simulate" || ctx.command == "leftmost") {
    const auto couple = couple_from(cfg);
    const auto sim = sim_config_from(cfg);
    const auto res = bsl::simulate(couple, sim);
    if (ctx.command == "simulate" && sim.record_events) {
      auto os = open_artifact(ctx, "events.csv");
      bsl::write_events_csv(res, os, preamble(ctx));
      const auto snap = bsl::snapshot_bytes(res);
      auto bs = open_artifact(ctx, "snapshot.bin");
      bs.write(reinterpret_cast<const char*>(snap.data()),
               static_cast<std::streamsize>(snap.size()));
    }
    if (!res.trace.times.empty()) {
      auto os = open_artifact(ctx, "trace.csv");
      bsl::write_trace_csv(res.trace, os, preamble(ctx));
    }
    ctx.extra["counters"] = counters_json(res.counters);
    std::cout << "events=" << res.counters.branch_events << " born=" << res.counters.born
              << " final_alive=" << res.counters.final_alive
              << " saturated=" << res.counters.saturated << "\n";
    write_manifest(ctx);
    return res.counters.saturated ? 3 : 0;
  } else if (ctx.command == "exponent") {
    const auto couple = couple_from(cfg);
    bsl::SimConfig tmpl = sim_config_from(cfg);
    const auto replicas = static_cast<std::size_t>(get_num(cfg, "replicas", 32.0));
    const int k_lo = static_cast<int>(get_num(cfg, "k_lo", 4.0));
    const int k_hi = static_cast<int>(get_num(cfg, "k_hi", 10.0));
    const auto fit = bsl::estimate_growth_exponent(couple, replicas, k_lo, k_hi, tmpl);
    bsl::CsvTable plot;
    plot.columns = {"log_t", "log_median_min"};
    for (std::size_t i = 0; i < fit.log_t.size(); ++i) {
      plot.rows.push_back({fit.log_t[i], fit.log_median[i]});
    }
    auto os = open_artifact(ctx, "plot.csv");
    bsl::write_csv(plot, os, preamble(ctx));
    std::cout << "slope=" << fit.slope << " se=" << fit.slope_se
              << " invalid_fraction=" << fit.invalid_fraction << "\n";
    ctx.extra["slope"] = fit.slope;
    ctx.extra["slope_se"] = fit.slope_se;
    ctx.extra["invalid_fraction"] = fit.invalid_fraction;
    try {
      ctx.extra["predicted"] = bsl::predicted_growth_exponent(couple.family);
    } catch (const bsl::Unsupported&) {
    }
  } else if (ctx.command == "bp-law") {
    const int kmax = static_cast<int>(get_num(cfg, "kmax", 5.0));
    const auto tail = bsl::bp_min_tail(get_num(cfg, "r"), get_num(cfg, "rho"), kmax);
    bsl::CsvTable t;
    t.columns = {"k", "tail_probability"};
    for (std::size_t k = 0; k < tail.size(); ++k) {
      t.rows.push_back({static_cast<double>(k), tail[k]});
    }
    auto os = open_artifact(ctx, "tail.csv");
    bsl::write_csv(t, os, preamble(ctx));
    std::cout << "P(min>=1)=" << (tail.size() > 1 ? tail[1] : 1.0) << "\n";
  } else if (ctx.command == "bp-oracle") {
    const auto replicas = static_cast<std::uint64_t>(get_num(cfg, "replicas", 10000.0));
    const int threshold = static_cast<int>(get_num(cfg, "threshold", 30.0));
    const int kmax = static_cast<int>(get_num(cfg, "kmax", 5.0));
    const auto res = bsl::bp_min_tail_mc(get_num(cfg, "r"), get_num(cfg, "rho"), replicas,
                                         threshold, bsl::RandomStream(seed_from(cfg)));
    const auto tail = res.tail(kmax);
    bsl::CsvTable t;
    t.columns = {"k", "tail_probability"};
    for (std::size_t k = 0; k < tail.size(); ++k) {
      t.rows.push_back({static_cast<double>(k), tail[k]});
    }
    auto os = open_artifact(ctx, "tail.csv");
    bsl::write_csv(t, os, preamble(ctx));
    std::cout << "replicas=" << res.replicas << " aborted=" << res.aborted << "\n";
    ctx.extra["aborted"] = res.aborted;
  } else if (ctx.command == "speed") {
    const double v = bsl::linear_speed(couple_from(cfg));
    std::cout << "speed=" << v << "\n";
    ctx.extra["speed"] = v;
  } else if (ctx.command == "bound") {
    const double v = bsl::linear_speed_upper_bound(couple_from(cfg), grid_from(cfg, "a_grid"),
                                                   lambda_grid_from(cfg));
    std::cout << "bound=" << v << "\n";
    ctx.extra["bound"] = v;
  } else if (ctx.command == "deviation") {
    const auto couple = couple_from(cfg);
    const double sigma = get_num(cfg, "sigma");
    const double c1 = get_num(cfg, "c1");
    const double m = get_num(cfg, "m");
    std::vector<double> ts = grid_from(cfg, "t_grid");
    if (ts.empty()) ts.push_back(get_num(cfg, "t"));
    bsl::CsvTable t;
    t.columns = {"t", "log_probability_bound"};
    for (double tt : ts) {
      t.rows.push_back({tt, bsl::lower_deviation_exponent(couple, m, tt, sigma, c1)});
    }
    auto os = open_artifact(ctx, "bound.csv");
    bsl::write_csv(t, os, preamble(ctx));
    std::cout << "points=" << t.rows.size() << "\n";
  } else {
    throw bsl::InvalidParams("unknown command: " + ctx.command);
  }
  write_manifest(ctx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branching subordinator lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON configuration file (flags override keys)");
  app.add_option("--out", out_dir, "output directory for artifacts and manifests");

  const std::vector<std::string> keys = {
      "family",     "r",           "rho",          "alpha",         "beta",
      "theta",      "drift",       "seed",         "truncation",    "horizon",
      "cap",        "window",      "sigma",        "c1",            "c2",
      "ell",        "m",           "t",            "kmax",          "replicas",
      "threshold",  "k_lo",        "k_hi",         "lambda_min",    "lambda_max",
      "lambda_count", "select_lowest", "sync_interval", "max_particles"};
  std::map<std::string, std::string> flag_values;
  bool adaptive_flag = false;
  bool no_events_flag = false;
  bool no_cap_flag = false;

  for (const std::string& c :
       {"validate", "laplace", "classify", "audit", "envelope", "simulate", "leftmost",
        "exponent", "bp-law", "bp-oracle", "speed", "bound", "deviation"}) {
    CLI::App* sub = app.add_subcommand(c);
    sub->fallthrough();  // --config/--out may follow the subcommand
    for (const std::string& k : keys) {
      sub->add_option("--" + k, flag_values[k]);
    }
    sub->add_flag("--adaptive", adaptive_flag, "front-tracking barrier mode");
    sub->add_flag("--no-record-events", no_events_flag, "skip the event log");
    sub->add_flag("--no-cap", no_cap_flag, "disable the absorbing barrier");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  RunContext ctx;
  ctx.out_dir = out_dir;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw bsl::InvalidParams("cannot read config file: " + config_path);
      in >> ctx.config;
    }
    CLI::App* sub = app.get_subcommands().front();
    ctx.command = sub->get_name();
    for (const auto& [k, v] : flag_values) {
      if (sub->count("--" + k) > 0) {
        try {
          std::size_t pos = 0;
          const double num = std::stod(v, &pos);
          if (pos == v.size()) {
            ctx.config[k] = num;
          } else {
            ctx.config[k] = v;
          }
        } catch (...) {
          ctx.config[k] = v;
        }
      }
    }
    if (adaptive_flag) ctx.config["adaptive"] = true;
    if (no_events_flag) ctx.config["record_events"] = false;
    if (no_cap_flag) ctx.config["cap"] = nullptr;
    ctx.config["command"] = ctx.command;
    ctx.run_id = hash_id(ctx.config.dump());
    return run_command(ctx);
  } catch (const bsl::InvalidParams& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const bsl::NoOpMeasure& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const bsl::TruncationTooSmall& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const bsl::InsufficientData& e) {
    std::cerr << "saturation-dominated study: " << e.what() << "\n";
    return 3;
  } catch (const bsl::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
