#pragma once

// JSON and CSV formats.
//
// Coefficients and symbols:
//   {"group": "su2" | "tN", "support_limit": B,
//    "kind": "invariant" | "full" (symbols only), "trusted_cutoff": ..., "grid_band": ... (full only),
//    "entries": [{"label": l | [k1,..,kn], "node_index": i (full only),
//                 "matrix_re": [[...]], "matrix_im": [[...]]}]}
// SU(2) labels and band limits are written as numbers (0.5, 1, ...); strings
// such as "1/2" are accepted on input.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/fourier.hpp"
#include "ncfourier/lp_probe.hpp"
#include "ncfourier/multiplier_check.hpp"
#include "ncfourier/symbols.hpp"

namespace ncf {

using json = nlohmann::ordered_json;
using AnyGroup = std::variant<SU2, Torus>;

inline AnyGroup parse_group(const std::string& s) {
  if (s == "su2") return SU2{};
  if (s.size() >= 2 && s[0] == 't') {
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(s.substr(1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() - 1 && n >= 1) return Torus(n);
  }
  throw parse_error("unknown group '" + s + "' (expected su2 or tN)");
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot write " + path);
  out << text;
  if (!out) throw error("write failed for " + path);
}

// ---- labels and bands ----------------------------------------------------

inline json band_to_json(HalfInt b) {
  if (b.is_integer()) return b.twice() / 2;
  return b.value();
}

inline HalfInt band_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return HalfInt(j.get<int>());
  if (j.is_number()) return HalfInt::from_double(j.get<double>());
  if (j.is_string()) return HalfInt::parse(j.get<std::string>());
  throw parse_error(where + ": expected a number");
}

inline json label_to_json(const SU2&, const HalfInt& l) { return band_to_json(l); }
inline json label_to_json(const Torus&, const Torus::Label& k) { return k; }

inline HalfInt label_from_json(const SU2& g, const json& j, const std::string& where) {
  const HalfInt l = band_from_json(j, where);
  if (!g.valid(l)) throw parse_error(where + ": invalid spin " + l.str());
  return l;
}

inline Torus::Label label_from_json(const Torus& g, const json& j, const std::string& where) {
  if (!j.is_array()) throw parse_error(where + ": torus label must be an integer array");
  Torus::Label k;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw parse_error(where + ": torus label must be an integer array");
    k.push_back(v.get<int>());
  }
  if (!g.valid(k)) throw parse_error(where + ": label has " + std::to_string(k.size()) + " components for " + g.name());
  return k;
}

// ---- matrices ---------------------------------------------------------------

inline void matrix_to_json(json& rec, const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  rec["matrix_re"] = std::move(re);
  rec["matrix_im"] = std::move(im);
}

inline Matrix matrix_from_json(const json& rec, int d, const std::string& where) {
  if (!rec.contains("matrix_re") || !rec.contains("matrix_im"))
    throw parse_error(where + ": missing matrix_re/matrix_im");
  const auto& re = rec["matrix_re"];
  const auto& im = rec["matrix_im"];
  auto check = [&](const json& a, const char* name) {
    if (!a.is_array() || static_cast<int>(a.size()) != d)
      throw parse_error(where + ": " + name + " must be a " + std::to_string(d) + "x" + std::to_string(d) + " array");
    for (const auto& row : a) {
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw parse_error(where + ": " + name + " must be a " + std::to_string(d) + "x" + std::to_string(d) + " array");
      for (const auto& v : row)
        if (!v.is_number()) throw parse_error(where + ": " + name + " has a non-numeric entry");
    }
  };
  check(re, "matrix_re");
  check(im, "matrix_im");
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(re[i][j].get<double>(), im[i][j].get<double>());
  return m;
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(source + ": " + e.what());
  }
}

inline std::string json_group(const json& j, const std::string& source) {
  if (!j.is_object() || !j.contains("group") || !j["group"].is_string())
    throw parse_error(source + ": missing \"group\"");
  return j["group"].get<std::string>();
}

// ---- coefficients ---------------------------------------------------------------

template <CompactGroup G>
json to_json(const FourierCoefficients<G>& c) {
  json j;
  j["group"] = c.group.name();
  j["support_limit"] = band_to_json(c.support_limit);
  json entries = json::array();
  const auto labels = c.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    json rec;
    rec["label"] = label_to_json(c.group, labels[i]);
    matrix_to_json(rec, c.entries[i]);
    entries.push_back(std::move(rec));
  }
  j["entries"] = std::move(entries);
  return j;
}

namespace detail {

template <CompactGroup G>
void fill_entries(const G& g, const json& j, HalfInt support, std::vector<Matrix>& out, std::vector<bool>* seen,
                  const std::string& source) {
  if (!j.contains("entries") || !j["entries"].is_array()) throw parse_error(source + ": missing \"entries\" array");
  std::size_t idx = 0;
  for (const auto& rec : j["entries"]) {
    const std::string where = source + ": entries[" + std::to_string(idx++) + "]";
    if (!rec.is_object() || !rec.contains("label")) throw parse_error(where + ": missing label");
    const auto l = label_from_json(g, rec["label"], where);
    if (g.label_band(l) > support)
      throw parse_error(where + ": label " + g.format_label(l) + " exceeds support_limit " + support.str());
    const std::size_t k = g.label_index(l, support);
    out[k] = matrix_from_json(rec, g.dim(l), where);
    if (seen) {
      if ((*seen)[k]) throw parse_error(where + ": duplicate label " + g.format_label(l));
      (*seen)[k] = true;
    }
  }
}

}  // namespace detail

template <CompactGroup G>
FourierCoefficients<G> coefficients_from_json(const G& g, const json& j, const std::string& source = "input") {
  if (json_group(j, source) != g.name())
    throw parse_error(source + ": group " + json_group(j, source) + " does not match " + g.name());
  if (!j.contains("support_limit")) throw parse_error(source + ": missing \"support_limit\"");
  const HalfInt support = band_from_json(j["support_limit"], source + ": support_limit");
  auto c = FourierCoefficients<G>::zeros(g, support);
  detail::fill_entries(g, j, support, c.entries, nullptr, source);
  return c;
}

// ---- symbols --------------------------------------------------------------------

template <CompactGroup G>
json to_json(const InvariantSymbol<G>& s) {
  json j;
  j["group"] = s.group.name();
  j["kind"] = "invariant";
  j["support_limit"] = band_to_json(s.cutoff);
  j["trusted_cutoff"] = band_to_json(s.trusted_cutoff);
  if (s.declared_order) j["declared_order"] = *s.declared_order;
  json entries = json::array();
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    json rec;
    rec["label"] = label_to_json(s.group, labels[i]);
    matrix_to_json(rec, s.entries[i]);
    entries.push_back(std::move(rec));
  }
  j["entries"] = std::move(entries);
  return j;
}

template <CompactGroup G>
json to_json(const FullSymbol<G>& s) {
  const G g = s.group();
  json j;
  j["group"] = g.name();
  j["kind"] = "full";
  j["support_limit"] = band_to_json(s.cutoff);
  j["trusted_cutoff"] = band_to_json(s.trusted_cutoff);
  j["grid_band"] = band_to_json(s.grid->band());
  json entries = json::array();
  const auto labels = s.labels();
  for (std::size_t n = 0; n < s.entries.size(); ++n)
    for (std::size_t i = 0; i < labels.size(); ++i) {
      json rec;
      rec["node_index"] = n;
      rec["label"] = label_to_json(g, labels[i]);
      matrix_to_json(rec, s.entries[n][i]);
      entries.push_back(std::move(rec));
    }
  j["entries"] = std::move(entries);
  return j;
}

template <CompactGroup G>
InvariantSymbol<G> invariant_symbol_from_json(const G& g, const json& j, const std::string& source = "input") {
  if (json_group(j, source) != g.name())
    throw parse_error(source + ": group " + json_group(j, source) + " does not match " + g.name());
  if (j.contains("kind") && j["kind"] != "invariant") throw parse_error(source + ": expected an invariant symbol");
  if (!j.contains("support_limit")) throw parse_error(source + ": missing \"support_limit\"");
  const HalfInt cutoff = band_from_json(j["support_limit"], source + ": support_limit");
  auto s = zero_symbol(g, cutoff);
  if (j.contains("trusted_cutoff")) s.trusted_cutoff = band_from_json(j["trusted_cutoff"], source + ": trusted_cutoff");
  if (s.trusted_cutoff > cutoff) throw parse_error(source + ": trusted_cutoff exceeds support_limit");
  if (j.contains("declared_order")) {
    if (!j["declared_order"].is_number()) throw parse_error(source + ": declared_order must be a number");
    s.declared_order = j["declared_order"].get<double>();
  }
  std::vector<bool> seen(s.entries.size(), false);
  detail::fill_entries(g, j, cutoff, s.entries, &seen, source);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i]) throw parse_error(source + ": symbol has no entry for label " + g.format_label(labels[i]));
  return s;
}

template <CompactGroup G>
FullSymbol<G> full_symbol_from_json(const G& g, const json& j, const std::string& source = "input") {
  if (json_group(j, source) != g.name())
    throw parse_error(source + ": group " + json_group(j, source) + " does not match " + g.name());
  if (j.value("kind", "") != "full") throw parse_error(source + ": expected a full symbol");
  for (const char* key : {"support_limit", "grid_band"})
    if (!j.contains(key)) throw parse_error(source + ": missing \"" + std::string(key) + "\"");
  const HalfInt cutoff = band_from_json(j["support_limit"], source + ": support_limit");
  const auto grid = haar_grid(g, band_from_json(j["grid_band"], source + ": grid_band"));
  FullSymbol<G> s{grid, cutoff, cutoff, {}};
  if (j.contains("trusted_cutoff")) s.trusted_cutoff = band_from_json(j["trusted_cutoff"], source + ": trusted_cutoff");
  const auto labels = g.labels(cutoff);
  s.entries.assign(grid->size(), {});
  for (auto& row : s.entries)
    for (const auto& l : labels) row.push_back(Matrix::Zero(g.dim(l), g.dim(l)));
  std::vector<bool> seen(grid->size() * labels.size(), false);
  if (!j.contains("entries") || !j["entries"].is_array()) throw parse_error(source + ": missing \"entries\" array");
  std::size_t idx = 0;
  for (const auto& rec : j["entries"]) {
    const std::string where = source + ": entries[" + std::to_string(idx++) + "]";
    if (!rec.is_object() || !rec.contains("label") || !rec.contains("node_index"))
      throw parse_error(where + ": missing label or node_index");
    if (!rec["node_index"].is_number_unsigned() || rec["node_index"].get<std::size_t>() >= grid->size())
      throw parse_error(where + ": node_index out of range");
    const std::size_t n = rec["node_index"].get<std::size_t>();
    const auto l = label_from_json(g, rec["label"], where);
    if (g.label_band(l) > cutoff) throw parse_error(where + ": label exceeds support_limit");
    const std::size_t k = g.label_index(l, cutoff);
    s.entries[n][k] = matrix_from_json(rec, g.dim(l), where);
    seen[n * labels.size() + k] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw parse_error(source + ": missing entry for node " + std::to_string(i / labels.size()) + ", label " +
                        g.format_label(labels[i % labels.size()]));
  return s;
}

// ---- grid functions as CSV -----------------------------------------------------

template <CompactGroup G>
std::string coordinates_header(const G& g) {
  if constexpr (std::is_same_v<G, SU2>) {
    return "alpha,beta,gamma";
  } else {
    std::string h;
    for (int a = 1; a <= g.dimension(); ++a) h += (a > 1 ? ",x" : "x") + std::to_string(a);
    return h;
  }
}

inline std::string coordinates_csv(const EulerAngles& x) {
  return format_number(x.alpha) + "," + format_number(x.beta) + "," + format_number(x.gamma);
}
inline std::string coordinates_csv(const std::vector<double>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + format_number(x[i]);
  return s;
}

template <class Grid>
std::string grid_to_csv(const Grid& grid) {
  std::string out = "index," + coordinates_header(grid.group()) + ",weight\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    out += std::to_string(i) + "," + coordinates_csv(grid.node(i)) + "," + format_number(grid.weight(i)) + "\n";
  return out;
}

template <CompactGroup G>
std::string grid_function_to_csv(const GridFunction<G>& f) {
  std::string out = "index," + coordinates_header(f.group()) + ",re,im\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out += std::to_string(i) + "," + coordinates_csv(f.grid->node(i)) + "," + format_number(f.values[i].real()) + "," +
           format_number(f.values[i].imag()) + "\n";
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
  }
  return out;
}

// Values in node order from a CSV with "re" and "im" columns (other
// columns are ignored; a missing "im" column means real data).
template <class Grid, CompactGroup G = decltype(std::declval<Grid>().group())>
GridFunction<G> grid_function_from_csv(std::shared_ptr<const Grid> grid, const std::string& text,
                                       const std::string& source = "input") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw parse_error(source + ": empty file");
  const auto header = split_csv_line(line);
  int re = -1, im = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "re") re = static_cast<int>(i);
    if (header[i] == "im") im = static_cast<int>(i);
  }
  if (re < 0) throw parse_error(source + ": header needs an 're' column");
  std::vector<cplx> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    auto num = [&](int col) {
      if (col >= static_cast<int>(cells.size())) throw parse_error(source + ": row " + std::to_string(row) + " is short");
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[col], &used);
        if (used != cells[col].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        throw parse_error(source + ": row " + std::to_string(row) + ": bad number '" + cells[col] + "'");
      }
    };
    values.emplace_back(num(re), im >= 0 ? num(im) : 0.0);
  }
  if (values.size() != grid->size())
    throw parse_error(source + ": " + std::to_string(values.size()) + " values for a grid of " +
                      std::to_string(grid->size()) + " nodes");
  return {std::move(grid), std::move(values), std::nullopt};
}

// ---- reports ------------------------------------------------------------------------

inline json to_json(const MultiplierReport& r) {
  json j;
  j["check"] = r.check;
  j["group"] = r.group;
  json cuts = json::array();
  for (auto c : r.cutoffs) cuts.push_back(band_to_json(c));
  j["cutoffs"] = cuts;
  j["kappa"] = r.kappa;
  if (r.m) j["m"] = *r.m;
  if (r.rho) j["rho"] = *r.rho;
  if (r.max_order) j["max_order"] = *r.max_order;
  if (r.p) j["p"] = *r.p;
  if (r.l) j["l"] = *r.l;
  j["cap"] = r.cap;
  j["cap_defaulted"] = r.cap_defaulted;
  j["verdict"] = to_string(r.verdict);
  j["instability"] = r.instability;
  j["caveat"] = r.caveat;
  json conds = json::array();
  for (const auto& c : r.conditions) {
    json k;
    k["condition"] = c.id;
    k["alpha"] = c.alpha;
    if (r.check == "noninv") k["beta"] = c.beta;
    k["alpha_order"] = c.alpha_order;
    if (r.check == "noninv") k["beta_order"] = c.beta_order;
    if (c.laplace_power) k["laplace_power"] = c.laplace_power;
    k["weight_exponent"] = c.weight_exponent;
    k["constants"] = c.constants;
    k["argmax_label"] = c.argmax;
    if (r.check == "noninv") k["argmax_node"] = c.argmax_node;
    k["instability"] = c.instability;
    conds.push_back(std::move(k));
  }
  j["conditions"] = std::move(conds);
  return j;
}

inline std::string report_to_csv(const MultiplierReport& r) {
  std::string out = "condition,alpha,beta,weight_exponent,cutoff,constant,argmax_label,argmax_node,instability\n";
  auto quote = [](const std::string& s) { return s.find_first_of(",\" ") == std::string::npos ? s : "\"" + s + "\""; };
  for (const auto& c : r.conditions) {
    const std::string id = c.id == "laplace" ? "laplace^" + std::to_string(c.laplace_power) : c.id;
    for (std::size_t k = 0; k < r.cutoffs.size(); ++k)
      out += id + "," + quote(c.alpha) + "," + quote(c.beta) + "," + format_number(c.weight_exponent) + "," +
             r.cutoffs[k].str() + "," + format_number(c.constants[k]) + "," + quote(c.argmax[k]) + "," +
             std::to_string(c.argmax_node[k]) + "," + format_number(c.instability) + "\n";
  }
  return out;
}

inline json to_json(const ProbeResult& r) {
  json j;
  j["kind"] = r.kind;
  j["group"] = r.group;
  j["p"] = r.p;
  j["r"] = r.r;
  json bands = json::array();
  for (auto b : r.band_limits) bands.push_back(band_to_json(b));
  j["band_limits"] = bands;
  j["statistic"] = r.statistic;
  j["sampled"] = r.sampled;
  json ex = json::array();
  for (const auto& e : r.exact) ex.push_back(e ? json(*e) : json(nullptr));
  j["exact"] = ex;
  j["trend"] = r.trend ? json(*r.trend) : json(nullptr);
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  return j;
}

inline std::string probe_to_csv(const ProbeResult& r) {
  std::string out = "band_limit,statistic,sampled,exact\n";
  for (std::size_t i = 0; i < r.band_limits.size(); ++i)
    out += r.band_limits[i].str() + "," + format_number(r.statistic[i]) + "," + format_number(r.sampled[i]) + "," +
           (r.exact[i] ? format_number(*r.exact[i]) : "") + "\n";
  return out;
}

inline std::string probe_to_gnuplot(const ProbeResult& r) {
  std::string out = "# band_limit statistic\n";
  for (std::size_t i = 0; i < r.band_limits.size(); ++i)
    out += format_number(r.band_limits[i].value()) + " " + format_number(r.statistic[i]) + "\n";
  return out;
}

}  // namespace ncf
