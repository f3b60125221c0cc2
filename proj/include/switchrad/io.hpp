#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "switchrad/diophantine.hpp"
#include "switchrad/error.hpp"
#include "switchrad/exact_radius.hpp"
#include "switchrad/matrix.hpp"
#include "switchrad/product_search.hpp"

namespace switchrad {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct Roles {
  std::size_t singular = 0;  // 0-based
  std::size_t rotation = 0;
};

struct SystemFile {
  MatrixSet set;
  std::optional<Roles> roles;
};

inline SystemFile parse_system_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!doc.is_object() || !doc.contains("matrices") || !doc["matrices"].is_array()) {
    throw Error(Errc::validation_error, "document must be an object with a \"matrices\" array");
  }
  std::vector<Matrix> members;
  std::size_t index = 0;
  for (const auto& mj : doc["matrices"]) {
    ++index;
    if (!mj.is_array() || mj.empty()) {
      throw Error(Errc::validation_error, "matrix " + std::to_string(index) + " must be a nonempty array of rows");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& rj : mj) {
      if (!rj.is_array()) throw Error(Errc::validation_error, "matrix " + std::to_string(index) + " has a non-array row");
      std::vector<double> row;
      for (const auto& v : rj) {
        if (!v.is_number()) {
          throw Error(Errc::validation_error, "matrix " + std::to_string(index) + " has a non-numeric entry");
        }
        row.push_back(v.get<double>());
      }
      rows.push_back(std::move(row));
    }
    members.push_back(Matrix::from_rows(rows));
  }
  SystemFile out{MatrixSet(std::move(members)), std::nullopt};
  if (doc.contains("roles")) {
    const auto& r = doc["roles"];
    auto role = [&](const char* key) {
      if (!r.is_object() || !r.contains(key) || !r[key].is_number_integer()) {
        throw Error(Errc::validation_error, std::string("roles.") + key + " must be a 1-based matrix index");
      }
      const auto i = r[key].get<std::int64_t>();
      if (i < 1 || static_cast<std::size_t>(i) > out.set.size()) {
        throw Error(Errc::validation_error, std::string("roles.") + key + " = " + std::to_string(i) + " is out of range");
      }
      return static_cast<std::size_t>(i - 1);
    };
    out.roles = Roles{role("singular"), role("rotation")};
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SystemFile load_system(const std::string& path) {
  try {
    return parse_system_json(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

/// Extracts the singular/rotation pair named by the roles and checks its invariants.
inline SingularRotationSystem as_singular_rotation(const SystemFile& f) {
  if (!f.roles) throw Error(Errc::validation_error, "system file has no roles for the singular/rotation pair");
  SingularRotationSystem sys{f.set[f.roles->singular], f.set[f.roles->rotation]};
  try {
    reduce_system(sys);
  } catch (const Error& e) {
    if (e.code() == Errc::not_singular) throw Error(Errc::validation_error, std::string("singularity: ") + e.what());
    if (e.code() == Errc::not_complex_spectrum) {
      throw Error(Errc::validation_error, std::string("complex spectrum: ") + e.what());
    }
    throw;
  }
  return sys;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string emit_system_json(const MatrixSet& set, const std::optional<Roles>& roles = std::nullopt) {
  Json doc;
  doc["matrices"] = Json::array();
  for (const auto& m : set) doc["matrices"].push_back(matrix_to_json(m));
  if (roles) doc["roles"] = {{"singular", roles->singular + 1}, {"rotation", roles->rotation + 1}};
  return doc.dump(2) + "\n";
}

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

inline std::int64_t parse_int(std::string_view s, std::string_view what) {
  const std::string t = trim(s);
  if (t.empty()) throw Error(Errc::parse_error, "empty " + std::string(what));
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw Error(Errc::parse_error, "malformed " + std::string(what) + " '" + t + "'");
  }
  if (used != t.size()) throw Error(Errc::parse_error, "malformed " + std::string(what) + " '" + t + "'");
  return v;
}

}  // namespace detail

/// Reads "p/q", "cf:[a1,a2,...]" (purely periodic expansion), or a decimal.
/// Decimals with fewer than 15 significant digits are taken as exact rationals.
inline RealInput parse_real(std::string_view text, int precision_override = 0) {
  const std::string s = detail::trim(text);
  if (s.rfind("cf:", 0) == 0) {
    std::string body = detail::trim(std::string_view(s).substr(3));
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
      throw Error(Errc::parse_error, "expected cf:[a1,a2,...], got '" + s + "'");
    }
    body = body.substr(1, body.size() - 2);
    std::vector<std::int64_t> digits;
    std::stringstream ss(body);
    for (std::string tok; std::getline(ss, tok, ',');) digits.push_back(detail::parse_int(tok, "cf digit"));
    RealInput in = RealInput::from_cf(std::move(digits));
    if (precision_override > 0) in.precision_digits = precision_override;
    return in;
  }
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::int64_t p = detail::parse_int(std::string_view(s).substr(0, slash), "numerator");
    const std::int64_t q = detail::parse_int(std::string_view(s).substr(slash + 1), "denominator");
    if (q <= 0) throw Error(Errc::parse_error, "denominator must be positive in '" + s + "'");
    return RealInput::from_rational(p, q);
  }
  std::size_t significant = 0;
  bool leading = true;
  std::size_t frac = 0;
  bool point = false;
  for (char ch : s) {
    if (ch == '.') {
      point = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      if (point) ++frac;
      if (ch != '0') leading = false;
      if (!leading) ++significant;
    } else if (ch != '-' && ch != '+') {
      throw Error(Errc::parse_error, "malformed number '" + s + "'");
    }
  }
  if (significant >= 15 || precision_override >= 15) return RealInput::from_decimal(s, precision_override);
  if (frac > 18) throw Error(Errc::parse_error, "too many decimal places in '" + s + "'");
  std::string digits;
  for (char ch : s) {
    if (std::isdigit(static_cast<unsigned char>(ch))) digits.push_back(ch);
  }
  if (digits.empty()) throw Error(Errc::parse_error, "malformed number '" + s + "'");
  std::int64_t num = detail::parse_int(digits, "number");
  if (!s.empty() && s.front() == '-') num = -num;
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac; ++i) den *= 10;
  return RealInput::from_rational(num, den);
}

/// Parses products written newest-first, e.g. "A2A1A1" or "M3 M2^2". Products
/// are separated by commas or semicolons. Returns oldest-first 0-based sequences.
inline std::vector<Sequence> parse_products(std::string_view text, std::size_t members) {
  std::vector<Sequence> out;
  std::string cur;
  auto flush = [&] {
    const std::string t = detail::trim(cur);
    cur.clear();
    if (t.empty()) return;
    Sequence newest_first;
    std::size_t i = 0;
    while (i < t.size()) {
      if (std::isspace(static_cast<unsigned char>(t[i]))) {
        ++i;
        continue;
      }
      if (!std::isalpha(static_cast<unsigned char>(t[i]))) {
        throw Error(Errc::parse_error, "expected a matrix letter in product '" + t + "'");
      }
      ++i;
      std::size_t j = i;
      while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
      if (j == i) throw Error(Errc::parse_error, "missing matrix index in product '" + t + "'");
      const std::int64_t idx = detail::parse_int(std::string_view(t).substr(i, j - i), "matrix index");
      if (idx < 1 || static_cast<std::size_t>(idx) > members) {
        throw Error(Errc::validation_error, "matrix index " + std::to_string(idx) + " out of range in '" + t + "'");
      }
      i = j;
      std::int64_t power = 1;
      if (i < t.size() && t[i] == '^') {
        j = ++i;
        while (j < t.size() && std::isdigit(static_cast<unsigned char>(t[j]))) ++j;
        power = detail::parse_int(std::string_view(t).substr(i, j - i), "exponent");
        if (power < 1) throw Error(Errc::parse_error, "exponent must be positive in '" + t + "'");
        i = j;
      }
      newest_first.insert(newest_first.end(), static_cast<std::size_t>(power), static_cast<std::size_t>(idx - 1));
    }
    out.emplace_back(newest_first.rbegin(), newest_first.rend());
  };
  for (char ch : text) {
    if (ch == ',' || ch == ';') {
      flush();
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

/// Newest-first rendering with 1-based indices: "M3 M2 M1".
inline std::string render_sequence(const Sequence& seq, char letter = 'M') {
  std::string s;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    if (!s.empty()) s += ' ';
    s += letter;
    s += std::to_string(*it + 1);
  }
  return s;
}

/// Newest-first 1-based indices.
inline std::vector<std::size_t> newest_first_indices(const Sequence& seq) {
  std::vector<std::size_t> out;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) out.push_back(*it + 1);
  return out;
}

/// k/(n+1) for k = 1..n.
inline std::vector<RealInput> uniform_rational_grid(std::int64_t n) {
  if (n <= 0) throw Error(Errc::invalid_config, "grid size must be positive");
  std::vector<RealInput> out;
  for (std::int64_t k = 1; k <= n; ++k) out.push_back(RealInput::from_rational(k, n + 1));
  return out;
}

/// Distinct reduced p/q in (0, 1) with odd q <= max_den, drawn in mirrored
/// pairs (p/q and 1 - p/q) and returned in increasing order.
inline std::vector<RealInput> odd_denominator_sample(std::size_t count, std::uint64_t seed,
                                                     std::int64_t max_den = 1001) {
  if (count == 0) throw Error(Errc::invalid_config, "sample size must be positive");
  if (max_den < 3) throw Error(Errc::invalid_config, "maximum denominator must be at least 3");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> qdist(1, (max_den - 1) / 2);
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  std::vector<std::pair<std::int64_t, std::int64_t>> picked;
  std::size_t attempts = 0;
  while (picked.size() < count) {
    if (++attempts > 1000 * count) throw Error(Errc::budget_exceeded, "not enough distinct odd-denominator rationals");
    const std::int64_t q = 2 * qdist(rng) + 1;
    const std::int64_t p = std::uniform_int_distribution<std::int64_t>(1, q - 1)(rng);
    if (std::gcd(p, q) != 1 || seen.count({p, q})) continue;
    seen.insert({p, q});
    seen.insert({q - p, q});
    picked.emplace_back(p, q);
    if (picked.size() < count) picked.emplace_back(q - p, q);
  }
  std::ranges::sort(picked, [](const auto& x, const auto& y) {
    return static_cast<__int128>(x.first) * y.second < static_cast<__int128>(y.first) * x.second;
  });
  std::vector<RealInput> out;
  for (const auto& [p, q] : picked) out.push_back(RealInput::from_rational(p, q));
  return out;
}

/// Uniform random decimals in (0, 1) with 17 significant digits.
inline std::vector<RealInput> uniform_decimal_sample(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw Error(Errc::invalid_config, "sample size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(1, 99'999'999'999'999'999LL);
  std::vector<RealInput> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string s = std::to_string(dist(rng));
    s = "0." + std::string(17 - s.size(), '0') + s;
    out.push_back(RealInput::from_decimal(s, 17));
  }
  return out;
}

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct ScanRow {
  RealInput alpha;
  RadiusResult result;
};

inline std::string scan_csv_header() { return "alpha,value,case,witness_l,certified\n"; }

inline std::string scan_csv_row(const ScanRow& row) {
  return format_g12(row.alpha.to_double()) + "," + format_g12(row.result.value) + "," + row.result.case_name() + "," +
         std::to_string(row.result.witness()) + "," + (row.result.finite() ? "1" : "0") + "\n";
}

inline std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = scan_csv_header();
  for (const auto& r : rows) out += scan_csv_row(r);
  return out;
}

inline Json radius_to_json(const RadiusResult& r) {
  Json j;
  j["value"] = r.value;
  j["case"] = r.case_name();
  j["finite"] = r.finite();
  if (const auto* z = std::get_if<ExactZero>(&r.outcome)) {
    j["witness_l"] = z->witness_l;
  } else if (const auto* f = std::get_if<FiniteAttained>(&r.outcome)) {
    j["l_star"] = f->l_star;
  } else {
    const auto& t = std::get<Truncated>(r.outcome);
    j["l_values"] = t.l_values;
    j["best_index"] = t.best_index;
    j["certified_upper"] = t.certified_upper;
    j["zero_within_tolerance"] = t.zero_within_tolerance;
  }
  return j;
}

inline Json params_to_json(const CanonicalParams& p) {
  Json j;
  j["image_eigenvalue"] = p.image_eigenvalue;
  j["rotation_modulus"] = p.rotation_modulus;
  j["rotation_angle"] = p.rotation_angle;
  j["kernel_angle"] = p.kernel_angle;
  j["kernel_angle_exact"] = p.kernel_angle_exact.has_value();
  return j;
}

inline Json sequence_to_json(const Sequence& seq) {
  Json j;
  j["indices"] = newest_first_indices(seq);
  j["product"] = render_sequence(seq);
  return j;
}

inline Json product_report_to_json(const ProductSearchReport& r) {
  Json j;
  j["depth"] = r.depth;
  j["visited"] = r.visited;
  j["S_T"] = r.s_of_t;
  auto witness = [](const RateWitness& w) {
    Json x;
    x["rate"] = w.rate;
    x["sequence"] = sequence_to_json(w.sequence);
    return x;
  };
  j["min_norm_rate"] = witness(r.min_norm_rate);
  j["max_norm_rate"] = witness(r.max_norm_rate);
  j["min_sr_rate"] = witness(r.min_sr_rate);
  j["max_sr_rate"] = witness(r.max_sr_rate);
  Json depths = Json::array();
  for (const auto& d : r.per_depth) {
    Json x;
    x["t"] = d.depth;
    x["visited"] = d.visited;
    x["min_norm"] = d.min_norm;
    x["max_norm"] = d.max_norm;
    x["min_sr"] = d.min_sr;
    x["max_sr"] = d.max_sr;
    depths.push_back(std::move(x));
  }
  j["per_depth"] = std::move(depths);
  return j;
}

inline Json certificate_to_json(const CertificateReport& r, const std::vector<Sequence>& products) {
  Json j;
  Json prods = Json::array();
  for (const auto& p : products) prods.push_back(render_sequence(p, 'A'));
  j["products"] = std::move(prods);
  j["grid_size"] = r.theta.size();
  j["covered"] = r.covered;
  j["worst_best_norm"] = r.worst;
  Json wins = Json::array();
  for (std::size_t k = 0; k < products.size(); ++k) {
    wins.push_back(std::count(r.winner.begin(), r.winner.end(), static_cast<int>(k)));
  }
  j["samples_won"] = std::move(wins);
  Json gaps = Json::array();
  for (const auto& [a, b] : r.uncovered_intervals) gaps.push_back({a, b});
  j["uncovered_intervals"] = std::move(gaps);
  return j;
}

/// Per-sample certificate table: theta,best_norm,winner,norm_1,...,norm_k.
inline std::string certificate_csv(const CertificateReport& r) {
  std::string out = "theta,best_norm,winner";
  for (std::size_t k = 0; k < r.norms.size(); ++k) out += ",norm_" + std::to_string(k + 1);
  out += "\n";
  for (std::size_t i = 0; i < r.theta.size(); ++i) {
    out += format_g12(r.theta[i]) + "," + format_g12(r.best_norm[i]) + "," +
           std::to_string(r.winner[i] < 0 ? 0 : r.winner[i] + 1);
    for (const auto& col : r.norms) out += "," + format_g12(col[i]);
    out += "\n";
  }
  return out;
}

}  // namespace switchrad
