// ncfourier: command-line front end.
//
//   ncfourier transform   --group su2 --band 4 --in f.csv --out fhat.json
//   ncfourier synthesize  --in fhat.json --out f.csv
//   ncfourier grid        --group t2 --band 3
//   ncfourier check hm    --zoo riesz --cutoffs 8,16,32
//   ncfourier check class --zoo sublaplacian-parametrix --m -1 --rho 0.5 --cutoffs 8,16,32
//   ncfourier check noninv --file full.json --p 2 --cutoff 2
//   ncfourier zoo symbol  --op sublaplacian --cutoff 16 --out sym.json
//   ncfourier zoo exceptional --axis 3 --window 2
//   ncfourier zoo parametrix --op heat --cutoff 8
//   ncfourier probe opnorm  --zoo riesz --p 4 --bands 4,8,16
//   ncfourier probe apriori --kind subelliptic --p 2 --bands 8,16,32
//
// Settings come from flags, then --config (key=value lines or a JSON
// object), then defaults. Every run writes run_config.json to --out-dir.
//
// Exit codes: 0 success / pass, 2 check failed, 3 inconclusive,
// 64 malformed input, 65 input cannot support the request, 1 other errors.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ncfourier.hpp"

namespace fs = std::filesystem;
using namespace ncf;

namespace {

constexpr int exit_fail = 2;
constexpr int exit_inconclusive = 3;
constexpr int exit_usage = 64;
constexpr int exit_data = 65;

// ---- settings ------------------------------------------------------------

class Settings {
 public:
  void set_default(const std::string& k, const std::string& v) { defaults_[k] = v; }
  void set_config(const std::string& k, const std::string& v) { config_[k] = v; }
  void set_flag(const std::string& k, const std::string& v) { flags_[k] = v; }

  bool has(const std::string& k) const { return flags_.count(k) || config_.count(k) || defaults_.count(k); }
  std::string str(const std::string& k) const {
    if (auto it = flags_.find(k); it != flags_.end()) return it->second;
    if (auto it = config_.find(k); it != config_.end()) return it->second;
    if (auto it = defaults_.find(k); it != defaults_.end()) return it->second;
    throw parse_error("missing required setting --" + k);
  }
  bool given(const std::string& k) const { return flags_.count(k) || config_.count(k); }

  double num(const std::string& k) const {
    const std::string s = str(k);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw parse_error("--" + k + ": expected a number, got '" + s + "'");
  }
  int integer(const std::string& k) const {
    const double v = num(k);
    if (v != std::floor(v)) throw parse_error("--" + k + ": expected an integer, got '" + str(k) + "'");
    return static_cast<int>(v);
  }
  std::uint64_t seed() const {
    const std::string s = str("seed");
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw parse_error("--seed: expected a nonnegative integer, got '" + s + "'");
  }
  HalfInt band(const std::string& k) const { return HalfInt::parse(str(k)); }
  std::vector<HalfInt> bands(const std::string& k) const {
    std::vector<HalfInt> out;
    std::stringstream ss(str(k));
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(HalfInt::parse(item));
    if (out.empty()) throw parse_error("--" + k + ": expected a comma-separated list");
    return out;
  }
  cplx complex(const std::string& k) const {
    const std::string s = str(k);
    const auto comma = s.find(',');
    try {
      if (comma == std::string::npos) return {std::stod(s), 0.0};
      return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
      throw parse_error("--" + k + ": expected 're' or 're,im', got '" + s + "'");
    }
  }

  json resolved() const {
    std::map<std::string, std::string> all = defaults_;
    for (const auto& [k, v] : config_) all[k] = v;
    for (const auto& [k, v] : flags_) all[k] = v;
    json j = json::object();
    for (const auto& [k, v] : all) j[k] = v;
    return j;
  }

 private:
  std::map<std::string, std::string> defaults_, config_, flags_;
};

void load_config(const std::string& path, Settings& s) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = parse_json_text(text, path);
    for (const auto& [k, v] : j.items()) s.set_config(k, v.is_string() ? v.get<std::string>() : v.dump());
    return;
  }
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw parse_error(path + ":" + std::to_string(n) + ": expected key=value");
    auto trim = [](std::string v) {
      const auto x = v.find_first_not_of(" \t\r"), y = v.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : v.substr(x, y - x + 1);
    };
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    s.set_config(key, trim(line.substr(eq + 1)));
  }
}

// String options registered with CLI11; only options actually given count as flags.
struct Options {
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    opts.emplace_back(name, app->add_option("--" + name, values[name], help));
  }
  void collect(Settings& s) const {
    for (const auto& [name, opt] : opts)
      if (opt->count() > 0) s.set_flag(name, values.at(name));
  }
};

fs::path out_path(const Settings& s, const std::string& key, const std::string& fallback) {
  if (s.given(key)) return s.str(key);
  return fs::path(s.str("out-dir")) / fallback;
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_text_file(p.string(), text);
}

void write_run_config(const Settings& s, const std::string& command) {
  json j;
  j["command"] = command;
  j["settings"] = s.resolved();
  write_file(fs::path(s.str("out-dir")) / "run_config.json", j.dump(2) + "\n");
}

// ---- symbols from files or the zoo ----------------------------------------------------------

template <CompactGroup G>
InvariantSymbol<G> zoo_symbol(const G& g, const std::string& id, HalfInt cutoff, const Settings& s) {
  auto su2_only = [&]() {
    if constexpr (!std::is_same_v<G, SU2>) throw parse_error("zoo symbol '" + id + "' is only available on su2");
  };
  if (id == "identity") return identity_symbol(g, cutoff);
  if (id == "growing")
    return spectral_multiplier(g, cutoff, [&](const typename G::Label& l) { return g.casimir_weight(l); });
  if (id == "laplacian") return named_symbol(g, NamedOperator::laplacian(), cutoff);
  if (id == "vector") return named_symbol(g, NamedOperator::vector_field(s.integer("axis")), cutoff);
  if (id == "xplusc") return named_symbol(g, NamedOperator::x_plus_c(s.integer("axis"), s.complex("c")), cutoff);
  if constexpr (std::is_same_v<G, SU2>) {
    if (id == "sublaplacian") return named_symbol(g, NamedOperator::sub_laplacian(), cutoff);
    if (id == "heat") return named_symbol(g, NamedOperator::heat(), cutoff);
    if (id == "riesz") return riesz_symbol(cutoff);
    if (id == "sublaplacian-parametrix") return parametrix_symbol(NamedOperator::sub_laplacian(), cutoff);
    if (id == "heat-parametrix") return parametrix_symbol(NamedOperator::heat(), cutoff);
    if (id == "xplusc-inverse") return invert_x_plus_c(s.integer("axis"), s.complex("c"), cutoff);
  } else {
    if (id == "sublaplacian" || id == "heat" || id == "riesz" || id == "sublaplacian-parametrix" ||
        id == "heat-parametrix" || id == "xplusc-inverse")
      su2_only();
  }
  throw parse_error("unknown zoo symbol '" + id +
                    "' (identity, growing, laplacian, vector, xplusc, sublaplacian, heat, riesz, "
                    "sublaplacian-parametrix, heat-parametrix, xplusc-inverse)");
}

AnyGroup group_of_source(const Settings& s) {
  if (s.given("file")) {
    const auto path = s.str("file");
    return parse_group(json_group(parse_json_text(read_text_file(path), path), path));
  }
  return parse_group(s.str("group"));
}

template <CompactGroup G>
InvariantSymbol<G> load_invariant(const G& g, const Settings& s, HalfInt zoo_cutoff) {
  if (s.given("file")) {
    const auto path = s.str("file");
    return invariant_symbol_from_json(g, parse_json_text(read_text_file(path), path), path);
  }
  if (!s.given("zoo")) throw parse_error("either --file or --zoo is required");
  return zoo_symbol(g, s.str("zoo"), zoo_cutoff, s);
}

std::vector<HalfInt> cutoffs_of(const Settings& s) {
  if (s.given("cutoffs")) return s.bands("cutoffs");
  if (s.given("cutoff")) return {s.band("cutoff")};
  throw parse_error("--cutoff or --cutoffs is required");
}

HalfInt max_of(const std::vector<HalfInt>& v) { return *std::max_element(v.begin(), v.end()); }

// ---- commands ------------------------------------------------------------------------------

int cmd_transform(const Settings& s) {
  return std::visit(
      [&](const auto& g) {
        const auto grid = haar_grid(g, s.band("band"));
        const auto path = s.str("in");
        const auto f = grid_function_from_csv(grid, read_text_file(path), path);
        const HalfInt out_band = s.given("out-band") ? s.band("out-band") : grid->band();
        const auto c = forward(f, out_band);
        const auto p = out_path(s, "out", "coefficients.json");
        write_file(p, to_json(c).dump(2) + "\n");
        std::cout << "wrote " << p.string() << " (" << c.entries.size() << " labels)\n";
        return 0;
      },
      parse_group(s.str("group")));
}

int cmd_synthesize(const Settings& s) {
  const auto path = s.str("in");
  const json j = parse_json_text(read_text_file(path), path);
  return std::visit(
      [&](const auto& g) {
        const auto c = coefficients_from_json(g, j, path);
        const HalfInt band = s.given("band") ? s.band("band") : c.support_limit;
        const auto f = inverse(c, haar_grid(g, band));
        const auto p = out_path(s, "out", "function.csv");
        write_file(p, grid_function_to_csv(f));
        std::cout << "wrote " << p.string() << " (" << f.size() << " nodes)\n";
        return 0;
      },
      parse_group(json_group(j, path)));
}

int cmd_grid(const Settings& s) {
  return std::visit(
      [&](const auto& g) {
        const auto grid = haar_grid(g, s.band("band"));
        const auto p = out_path(s, "out", "grid.csv");
        write_file(p, grid_to_csv(*grid));
        std::cout << "wrote " << p.string() << " (" << grid->size() << " nodes)\n";
        return 0;
      },
      parse_group(s.str("group")));
}

int report_exit(const MultiplierReport& r, const Settings& s, const std::string& stem) {
  const fs::path dir = s.str("out-dir");
  write_file(dir / (stem + ".json"), to_json(r).dump(2) + "\n");
  write_file(dir / (stem + ".csv"), report_to_csv(r));
  std::cout << "check " << r.check << " on " << r.group << ": " << to_string(r.verdict) << " (max constant "
            << format_number(r.max_constant()) << ", cap " << format_number(r.cap) << ", instability "
            << format_number(r.instability) << ")\n"
            << "report: " << (dir / (stem + ".json")).string() << ", " << (dir / (stem + ".csv")).string() << "\n";
  switch (r.verdict) {
    case Verdict::pass: return 0;
    case Verdict::fail: return exit_fail;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return 1;
}

int cmd_check(const Settings& s, const std::string& kind) {
  const auto cutoffs = cutoffs_of(s);
  CheckOptions opt{cutoffs, std::nullopt};
  if (s.given("cap")) opt.cap = s.num("cap");
  return std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        const HalfInt unit = delta0_set(g).max_label_band;
        const int kap = kappa(g.dimension()).kappa;
        if (kind == "hm") {
          const auto sym = load_invariant(g, s, max_of(cutoffs) + unit * std::max(kap - 1, kap / 2));
          return report_exit(check_hm(sym, opt), s, "check_hm");
        }
        if (kind == "class") {
          const int order = s.integer("order");
          const auto sym = load_invariant(g, s, max_of(cutoffs) + unit * order);
          return report_exit(check_class(sym, s.num("m"), s.num("rho"), order, opt), s, "check_class");
        }
        // noninv: a full symbol file, or a zoo symbol repeated at every node of a small grid
        FullSymbol<G> full;
        if (s.given("file")) {
          const auto path = s.str("file");
          full = full_symbol_from_json(g, parse_json_text(read_text_file(path), path), path);
        } else {
          const auto inv = load_invariant(g, s, max_of(cutoffs) + unit * kap);
          full = {haar_grid(g, s.band("grid-band")), inv.cutoff, inv.trusted_cutoff, {}};
          full.entries.assign(full.grid->size(), inv.entries);
        }
        return report_exit(check_noninvariant(full, s.num("p"), opt), s, "check_noninv");
      },
      group_of_source(s));
}

int cmd_zoo_symbol(const Settings& s) {
  return std::visit(
      [&](const auto& g) {
        const auto sym = zoo_symbol(g, s.str("op"), s.band("cutoff"), s);
        const auto p = out_path(s, "out", "symbol.json");
        write_file(p, to_json(sym).dump(2) + "\n");
        std::cout << "wrote " << p.string() << "\n";
        return 0;
      },
      parse_group(s.str("group")));
}

std::string format_imaginary(double v) {
  if (v == 0.0) return "0";
  std::ostringstream os;
  os << v << "i";
  return os.str();
}

int cmd_zoo_exceptional(const Settings& s) {
  const auto e = exceptional_set(SU2{}, s.integer("axis"), s.num("window"));
  json j;
  j["group"] = "su2";
  j["axis"] = s.integer("axis");
  j["window"] = e.window;
  j["lattice"] = {{"offset", e.offset}, {"step", e.step}};
  json members = json::array();
  for (const auto& c : e.members) {
    members.push_back({{"re", c.real()}, {"im", c.imag()}});
    std::cout << format_imaginary(c.imag()) << "\n";
  }
  j["members"] = members;
  write_file(out_path(s, "out", "exceptional.json"), j.dump(2) + "\n");
  return 0;
}

int cmd_zoo_parametrix(const Settings& s) {
  const std::string op = s.str("op");
  NamedOperator named;
  if (op == "sublaplacian")
    named = NamedOperator::sub_laplacian();
  else if (op == "heat")
    named = NamedOperator::heat();
  else
    throw parse_error("--op must be sublaplacian or heat");
  const auto sym = parametrix_symbol(named, s.band("cutoff"));
  const auto p = out_path(s, "out", "parametrix.json");
  write_file(p, to_json(sym).dump(2) + "\n");
  std::cout << "wrote " << p.string() << "\n";
  return 0;
}

int probe_out(const ProbeResult& r, const Settings& s) {
  const fs::path dir = s.str("out-dir");
  const std::string stem = "probe_" + r.kind;
  write_file(dir / (stem + ".json"), to_json(r).dump(2) + "\n");
  write_file(dir / (stem + ".csv"), probe_to_csv(r));
  write_file(dir / (stem + ".dat"), probe_to_gnuplot(r));
  std::cout << probe_to_csv(r);
  return 0;
}

double p_of(const Settings& s) {
  const std::string v = s.str("p");
  if (v == "inf" || v == "infinity") return p_infinity;
  return s.num("p");
}

int cmd_probe(const Settings& s, const std::string& kind) {
  const auto bands = s.bands("bands");
  const int trials = s.integer("trials");
  if (kind == "opnorm") {
    return std::visit(
        [&](const auto& g) {
          const auto sym = load_invariant(g, s, max_of(bands));
          return probe_out(opnorm_lower_bound(sym, p_of(s), bands, trials, s.seed()), s);
        },
        group_of_source(s));
  }
  const std::string k = s.str("kind");
  AprioriKind ak;
  if (k == "subelliptic") {
    const std::string op = s.str("op");
    if (op != "sublaplacian" && op != "heat") throw parse_error("--op must be sublaplacian or heat");
    ak = AprioriKind::sub_elliptic(op == "heat" ? NamedOperator::heat() : NamedOperator::sub_laplacian());
  } else if (k == "xplusc") {
    ak = AprioriKind::x_plus_c(s.integer("axis"), s.complex("c"));
  } else {
    throw parse_error("--kind must be subelliptic or xplusc");
  }
  return probe_out(apriori_ratio(ak, p_of(s), bands, trials, s.seed()), s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier analysis and symbol calculus on SU(2) and tori"};
  app.require_subcommand(1);
  std::string config_path, threads;
  Options global;
  app.add_option("--config", config_path, "settings file (key=value lines or JSON object)");
  global.add(&app, "out-dir", "directory for reports and run_config.json");
  global.add(&app, "seed", "master seed for random test functions");
  app.add_option("--threads", threads, "worker threads (overrides NONCOMM_FOURIER_THREADS)");

  Settings s;
  s.set_default("out-dir", ".");
  s.set_default("seed", "12345");

  std::map<CLI::App*, Options> sub_opts;
  std::map<CLI::App*, std::string> names;
  auto reg = [&](CLI::App* a, const std::string& name, std::initializer_list<std::pair<const char*, const char*>> opts) {
    names[a] = name;
    for (const auto& [o, h] : opts) sub_opts[a].add(a, o, h);
  };

  auto* transform = app.add_subcommand("transform", "grid values (CSV) -> Fourier coefficients (JSON)");
  reg(transform, "transform",
      {{"group", "su2 or tN"}, {"band", "grid band limit"}, {"in", "CSV with re,im columns in node order"},
       {"out", "output JSON"}, {"out-band", "largest label to keep (default: grid band)"}});
  auto* synth = app.add_subcommand("synthesize", "Fourier coefficients (JSON) -> grid values (CSV)");
  reg(synth, "synthesize", {{"in", "coefficients JSON"}, {"band", "grid band (default: support limit)"}, {"out", "output CSV"}});
  auto* grid = app.add_subcommand("grid", "dump quadrature nodes and weights (CSV)");
  reg(grid, "grid", {{"group", "su2 or tN"}, {"band", "band limit"}, {"out", "output CSV"}});

  auto* check = app.add_subcommand("check", "multiplier condition checks");
  check->require_subcommand(1);
  const std::initializer_list<std::pair<const char*, const char*>> source = {
      {"file", "symbol JSON"}, {"zoo", "built-in symbol id"}, {"group", "group for --zoo"},
      {"axis", "axis for vector/xplusc symbols"}, {"c", "constant 're,im' for xplusc symbols"},
      {"cutoff", "label cutoff"}, {"cutoffs", "comma-separated cutoffs"}, {"cap", "cap on constants"}};
  auto* hm = check->add_subcommand("hm", "Hoermander-Mikhlin type conditions");
  reg(hm, "check hm", source);
  auto* cls = check->add_subcommand("class", "symbol class S^m_rho conditions");
  reg(cls, "check class", source);
  for (const auto& [o, h] : std::initializer_list<std::pair<const char*, const char*>>{
           {"m", "order m"}, {"rho", "type rho in [0,1]"}, {"order", "largest |alpha|"}})
    sub_opts[cls].add(cls, o, h);
  auto* noninv = check->add_subcommand("noninv", "x-dependent symbol conditions");
  reg(noninv, "check noninv", source);
  for (const auto& [o, h] : std::initializer_list<std::pair<const char*, const char*>>{
           {"p", "exponent 1 < p < inf"}, {"grid-band", "x-grid band for --zoo symbols"}})
    sub_opts[noninv].add(noninv, o, h);

  auto* zoo = app.add_subcommand("zoo", "built-in operators");
  zoo->require_subcommand(1);
  auto* zsym = zoo->add_subcommand("symbol", "write the symbol of a named operator");
  reg(zsym, "zoo symbol",
      {{"op", "operator id"}, {"group", "su2 or tN"}, {"cutoff", "label cutoff"}, {"axis", "axis"},
       {"c", "constant 're,im'"}, {"out", "output JSON"}});
  auto* zexc = zoo->add_subcommand("exceptional", "exceptional set of D_axis + c on su2");
  reg(zexc, "zoo exceptional", {{"axis", "axis 1..3"}, {"window", "|Im c| window"}, {"out", "output JSON"}});
  auto* zpar = zoo->add_subcommand("parametrix", "parametrix symbol of the sub-Laplacian or heat operator");
  reg(zpar, "zoo parametrix", {{"op", "sublaplacian or heat"}, {"cutoff", "label cutoff"}, {"out", "output JSON"}});

  auto* probe = app.add_subcommand("probe", "L^p experiments");
  probe->require_subcommand(1);
  auto* popn = probe->add_subcommand("opnorm", "randomized L^p operator norm lower bound");
  reg(popn, "probe opnorm",
      {{"file", "symbol JSON"}, {"zoo", "built-in symbol id"}, {"group", "group for --zoo"}, {"axis", "axis"},
       {"c", "constant 're,im'"}, {"p", "exponent (or inf)"}, {"bands", "band limits"}, {"trials", "trials per band"}});
  auto* papr = probe->add_subcommand("apriori", "a-priori inequality ratios");
  reg(papr, "probe apriori",
      {{"kind", "subelliptic or xplusc"}, {"op", "sublaplacian or heat"}, {"axis", "axis"}, {"c", "constant 're,im'"},
       {"p", "exponent"}, {"bands", "band limits"}, {"trials", "trials per band"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  CLI::App* leaf = nullptr;
  for (auto& [a, n] : names)
    if (a->parsed()) leaf = a;

  for (const auto& [k, v] : std::initializer_list<std::pair<const char*, const char*>>{
           {"group", "su2"}, {"axis", "3"}, {"c", "1,0"}, {"m", "0"}, {"rho", "1"}, {"order", "2"}, {"p", "2"},
           {"grid-band", "1"}, {"trials", "8"}, {"window", "2"}, {"op", "sublaplacian"}, {"kind", "subelliptic"}})
    s.set_default(k, v);

  try {
    if (!threads.empty()) set_thread_count(std::stoi(threads));
    if (!config_path.empty()) load_config(config_path, s);
    global.collect(s);
    sub_opts[leaf].collect(s);
    const std::string cmd = names[leaf];
    write_run_config(s, cmd);
    int rc = 1;
    if (cmd == "transform") rc = cmd_transform(s);
    else if (cmd == "synthesize") rc = cmd_synthesize(s);
    else if (cmd == "grid") rc = cmd_grid(s);
    else if (cmd == "check hm") rc = cmd_check(s, "hm");
    else if (cmd == "check class") rc = cmd_check(s, "class");
    else if (cmd == "check noninv") rc = cmd_check(s, "noninv");
    else if (cmd == "zoo symbol") rc = cmd_zoo_symbol(s);
    else if (cmd == "zoo exceptional") rc = cmd_zoo_exceptional(s);
    else if (cmd == "zoo parametrix") rc = cmd_zoo_parametrix(s);
    else if (cmd == "probe opnorm") rc = cmd_probe(s, "opnorm");
    else if (cmd == "probe apriori") rc = cmd_probe(s, "apriori");
    return rc;
  } catch (const parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const invalid_label_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad argument: " << e.what() << "\n";
    return exit_usage;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
