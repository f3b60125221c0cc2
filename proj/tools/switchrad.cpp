// Command-line front end for the switchrad library.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "switchrad/switchrad.hpp"

namespace {

using namespace switchrad;

int precision_from_env() {
  const char* env = std::getenv("SWITCHRAD_PRECISION");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 15 || v > 45) {
    throw Error(Errc::invalid_config, std::string("SWITCHRAD_PRECISION must be an integer in [15, 45], got '") + env + "'");
  }
  return static_cast<int>(v);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::invalid_config, "cannot write " + path);
  out << text;
}

Json envelope(const std::string& command, Json config) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "switchrad";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  return j;
}

SearchOptions search_options(std::uint64_t max_products, unsigned workers) {
  SearchOptions opt;
  opt.max_products = max_products;
  opt.workers = workers;
  return opt;
}

struct RadiusArgs {
  std::string system;
  std::string alpha;
  std::int64_t l_cap = 10000;
  std::string out;
};

int run_radius(const RadiusArgs& a, int precision) {
  const SystemFile file = load_system(a.system);
  const SingularRotationSystem sys = as_singular_rotation(file);
  const Reduction red = reduce_system(sys);
  RealInput alpha;
  if (!a.alpha.empty()) {
    alpha = parse_real(a.alpha, precision);
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17f", red.params.rotation_angle);
    alpha = RealInput::from_decimal(buf, precision > 0 ? precision : 15);
  }
  RadiusConfig cfg;
  cfg.l_cap = a.l_cap;
  cfg.precision_digits = precision;
  const RadiusResult r = exact_radius(red.params, alpha, cfg);
  Json config;
  config["system"] = a.system;
  config["alpha"] = alpha.describe();
  config["l_cap"] = a.l_cap;
  config["precision_digits"] = precision > 0 ? precision : alpha.precision_digits;
  Json j = envelope("radius", std::move(config));
  j["params"] = params_to_json(red.params);
  j["result"] = radius_to_json(r);
  write_output(a.out, j.dump(2) + "\n");
  return 0;
}

struct ScanArgs {
  std::int64_t grid = 0;
  std::string alphas;
  std::size_t sample = 0;
  bool uniform = false;
  std::uint64_t seed = 1;
  std::int64_t max_den = 1001;
  std::string system;
  std::int64_t l_cap = 10000;
  std::string out;
};

int run_scan(const ScanArgs& a, int precision) {
  std::vector<RealInput> alphas;
  const int modes = (a.grid > 0) + (!a.alphas.empty()) + (a.sample > 0);
  if (modes != 1) throw Error(Errc::invalid_config, "give exactly one of --grid N, --alphas LIST, --sample N");
  if (a.grid > 0) {
    alphas = uniform_rational_grid(a.grid);
  } else if (!a.alphas.empty()) {
    std::stringstream ss(a.alphas);
    for (std::string tok; std::getline(ss, tok, ',');) {
      if (tok.find_first_not_of(" \t") == std::string::npos) continue;
      alphas.push_back(parse_real(tok, precision));
    }
    if (alphas.empty()) throw Error(Errc::invalid_config, "empty alpha list");
  } else {
    alphas = a.uniform ? uniform_decimal_sample(a.sample, a.seed) : odd_denominator_sample(a.sample, a.seed, a.max_den);
  }
  std::optional<CanonicalParams> base;
  if (!a.system.empty()) base = reduce_system(as_singular_rotation(load_system(a.system))).params;
  RadiusConfig cfg;
  cfg.l_cap = a.l_cap;
  cfg.precision_digits = precision;
  cfg.consistency_tolerance = 1.0;
  std::vector<ScanRow> rows;
  for (const auto& alpha : alphas) {
    CanonicalParams p = base ? *base : example7_params(alpha.to_double());
    p.rotation_angle = alpha.to_double();
    rows.push_back({alpha, exact_radius(p, alpha, cfg)});
  }
  write_output(a.out, scan_csv(rows));
  return 0;
}

struct SetArgs {
  std::string set;
  std::size_t depth = 0;
  std::string objective = "sr";
  std::string products;
  std::size_t grid = 10000;
  double margin = 0.0;
  std::string table;
  std::uint64_t max_products = 10'000'000;
  unsigned workers = 0;
  std::string out;
};

Json set_config(const SetArgs& a) {
  Json c;
  c["set"] = a.set;
  c["max_products"] = a.max_products;
  c["workers"] = a.workers;
  return c;
}

int run_estimate(const SetArgs& a) {
  const SystemFile file = load_system(a.set);
  const auto report = enumerate_rates(file.set, a.depth, search_options(a.max_products, a.workers));
  Json c = set_config(a);
  c["depth"] = a.depth;
  Json j = envelope("estimate", std::move(c));
  j["m"] = file.set.size();
  j["n"] = file.set.dim();
  j["report"] = product_report_to_json(report);
  j["subradius_lower_bound_on_stabilizability_radius"] =
      theorem1_lower_bound(report.min_sr_rate.rate, file.set.size());
  write_output(a.out, j.dump(2) + "\n");
  return 0;
}

int run_search(const SetArgs& a) {
  const SystemFile file = load_system(a.set);
  Objective obj;
  if (a.objective == "sr") {
    obj = Objective::spectral_radius;
  } else if (a.objective == "norm") {
    obj = Objective::norm;
  } else {
    throw Error(Errc::invalid_config, "objective must be sr or norm");
  }
  const auto r = optimal_sequence_search(file.set, a.depth, obj, search_options(a.max_products, a.workers));
  Json c = set_config(a);
  c["length"] = a.depth;
  c["objective"] = a.objective;
  Json j = envelope("search", std::move(c));
  j["sequence"] = sequence_to_json(r.sequence);
  j["value"] = r.value;
  j["rate"] = r.rate;
  Json ties = Json::array();
  for (const auto& s : r.ties) ties.push_back(render_sequence(s));
  j["ties"] = std::move(ties);
  j["ties_truncated"] = r.ties_truncated;
  write_output(a.out, j.dump(2) + "\n");
  return 0;
}

int run_certify(const SetArgs& a) {
  const SystemFile file = load_system(a.set);
  const auto products = parse_products(a.products, file.set.size());
  const auto r = stabilizability_certificate(file.set, products, a.grid, a.margin);
  Json c = set_config(a);
  c["products"] = a.products;
  c["grid"] = a.grid;
  c["margin"] = a.margin;
  Json j = envelope("certify", std::move(c));
  j["certificate"] = certificate_to_json(r, products);
  if (!a.table.empty()) write_output(a.table, certificate_csv(r));
  write_output(a.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizability radius of switched linear systems"};
  app.set_version_flag("--version", std::string(switchrad::kVersion));
  app.require_subcommand(1);

  RadiusArgs radius;
  auto* rc = app.add_subcommand("radius", "Exact radius of a singular/rotation pair");
  rc->add_option("--system", radius.system, "JSON system file with roles")->required();
  rc->add_option("--alpha", radius.alpha, "rotation angle in units of pi: p/q, decimal, or cf:[a1,...]");
  rc->add_option("--l-cap", radius.l_cap, "exhaustive scan limit for irrational angles");
  rc->add_option("--out", radius.out, "output file (default stdout)");

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "Radius over many rotation angles, as CSV");
  sc->add_option("--grid", scan.grid, "uniform rationals k/(N+1), k = 1..N");
  sc->add_option("--alphas", scan.alphas, "comma-separated angle list");
  sc->add_option("--sample", scan.sample, "random sample size (odd-denominator rationals by default)");
  sc->add_flag("--uniform", scan.uniform, "sample uniform random decimals instead");
  sc->add_option("--seed", scan.seed, "random seed");
  sc->add_option("--max-den", scan.max_den, "largest denominator for rational sampling");
  sc->add_option("--system", scan.system, "template system (default: diag(2,0) with a unit rotation)");
  sc->add_option("--l-cap", scan.l_cap, "exhaustive scan limit for irrational angles");
  sc->add_option("--out", scan.out, "output CSV (default stdout)");

  SetArgs est;
  auto* ec = app.add_subcommand("estimate", "Exhaustive norm and spectral-radius rates up to a depth");
  ec->add_option("--set", est.set, "JSON matrix set")->required();
  ec->add_option("--depth", est.depth, "product length T")->required();

  SetArgs srch;
  auto* qc = app.add_subcommand("search", "Best switching sequence of a fixed length");
  qc->add_option("--set", srch.set, "JSON matrix set")->required();
  qc->add_option("--length", srch.depth, "sequence length")->required();
  qc->add_option("--objective", srch.objective, "sr or norm");

  SetArgs cert;
  auto* cc = app.add_subcommand("certify", "Check that listed products contract every initial direction");
  cc->add_option("--set", cert.set, "JSON matrix set (2x2)")->required();
  cc->add_option("--products", cert.products, "products newest-first, comma separated, e.g. A2A1,A2A1A1")->required();
  cc->add_option("--grid", cert.grid, "number of angle samples over [0, pi]");
  cc->add_option("--margin", cert.margin, "require norms below 1 - margin");
  cc->add_option("--table", cert.table, "write the per-angle table as CSV");

  for (auto [cmd, args] : {std::pair{ec, &est}, std::pair{qc, &srch}, std::pair{cc, &cert}}) {
    cmd->add_option("--max-products", args->max_products, "enumeration guard on m^T");
    cmd->add_option("--workers", args->workers, "worker threads (0: all cores)");
    cmd->add_option("--out", args->out, "output file (default stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const int precision = precision_from_env();
    if (rc->parsed()) return run_radius(radius, precision);
    if (sc->parsed()) return run_scan(scan, precision);
    if (ec->parsed()) return run_estimate(est);
    if (qc->parsed()) return run_search(srch);
    if (cc->parsed()) return run_certify(cert);
  } catch (const switchrad::Error& e) {
    std::cerr << "switchrad: " << e.what() << "\n";
    return switchrad::exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "switchrad: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
