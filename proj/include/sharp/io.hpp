#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sharp/channels.hpp"
#include "sharp/error.hpp"
#include "sharp/sectors.hpp"
#include "sharp/spectral.hpp"
#include "sharp/statespace.hpp"

namespace sharp::io {

using json = nlohmann::json;

namespace detail {

[[noreturn]] inline void schema(const std::string& path, const std::string& what) {
  throw Error(Errc::schema_error, "at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) schema(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) schema(path, "missing key \"" + key + "\"");
  return *it;
}

inline std::size_t index_value(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) schema(path, "expected a non-negative integer");
  const auto v = j.get<long long>();
  if (v < 0) schema(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

inline cplx scalar(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "/0"), number(j[1], path + "/1")};
  schema(path, "expected a number or [re, im]");
}

inline json scalar_json(cplx z, Field field) {
  if (field == Field::real) return z.real();
  return json::array({z.real(), z.imag()});
}

}  // namespace detail

// ---- systems ---------------------------------------------------------------

inline SystemKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "quantum") return SystemKind::quantum;
  if (s == "classical") return SystemKind::classical;
  if (s == "coherent") return SystemKind::coherent;
  if (s == "mirror") return SystemKind::mirror;
  if (s == "composite") return SystemKind::composite;
  detail::schema(path, "unknown kind \"" + s + "\"");
}

inline Field parse_field(const std::string& s, const std::string& path) {
  if (s == "real") return Field::real;
  if (s == "complex") return Field::complex;
  detail::schema(path, "unknown field \"" + s + "\"");
}

inline json to_json(const SystemDescriptor& d) {
  json j;
  j["kind"] = std::string(to_string(d.kind()));
  j["field"] = std::string(to_string(d.field()));
  j["sectors"] = d.sectors();
  if (d.is_composite()) j["factors"] = json::array({to_json(d.factor(0)), to_json(d.factor(1))});
  return j;
}

inline SystemDescriptor parse_theory(std::string_view text);

inline SystemDescriptor descriptor_from_json(const json& j, const std::string& path = "") {
  if (j.is_string()) {
    try {
      return parse_theory(j.get<std::string>());
    } catch (const Error& e) {
      detail::schema(path, e.what());
    }
  }
  const auto kind_s = detail::member(j, "kind", path);
  if (!kind_s.is_string()) detail::schema(path + "/kind", "expected a string");
  const SystemKind kind = parse_kind(kind_s.get<std::string>(), path + "/kind");
  Field field = Field::complex;
  if (j.contains("field")) {
    if (!j["field"].is_string()) detail::schema(path + "/field", "expected a string");
    field = parse_field(j["field"].get<std::string>(), path + "/field");
  }
  const json& secs = detail::member(j, "sectors", path);
  if (!secs.is_array()) detail::schema(path + "/sectors", "expected an array");
  std::vector<SystemDescriptor::Sector> sectors;
  for (std::size_t s = 0; s < secs.size(); ++s) {
    const std::string sp = path + "/sectors/" + std::to_string(s);
    if (!secs[s].is_array()) detail::schema(sp, "expected an array of indices");
    SystemDescriptor::Sector sec;
    for (std::size_t k = 0; k < secs[s].size(); ++k)
      sec.push_back(detail::index_value(secs[s][k], sp + "/" + std::to_string(k)));
    sectors.push_back(std::move(sec));
  }
  try {
    if (kind == SystemKind::composite) {
      const json& f = detail::member(j, "factors", path);
      if (!f.is_array() || f.size() != 2) detail::schema(path + "/factors", "expected two factors");
      SystemDescriptor d = compose(descriptor_from_json(f[0], path + "/factors/0"),
                                   descriptor_from_json(f[1], path + "/factors/1"));
      auto sorted = sectors;
      for (auto& s : sorted) std::sort(s.begin(), s.end());
      if (sorted != d.sectors()) detail::schema(path + "/sectors", "sectors disagree with the composition rule");
      if (d.field() != field) detail::schema(path + "/field", "field disagrees with the factors");
      return d;
    }
    return SystemDescriptor::from_sectors(kind, field, std::move(sectors));
  } catch (const Error& e) {
    if (e.code() == Errc::schema_error) throw;
    detail::schema(path, e.what());
  }
}

// ---- theory expressions ------------------------------------------------------
//
// expr := term ('*' term)* ; term := '(' expr ')' | atom
// atom := preset | kind ':' n [ '@real' ] | 'real:' n | 'mirror:' n (',' n)*
// presets: qubit, qutrit, rebit, cbit, cobit, cbit-cobit. '*' is left-associative.

namespace detail {

class TheoryParser {
 public:
  explicit TheoryParser(std::string_view s) : s_(s) {}

  SystemDescriptor parse() {
    SystemDescriptor d = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return d;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::schema_error, "theory \"" + std::string(s_) + "\" at " + std::to_string(pos_) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  SystemDescriptor expr() {
    SystemDescriptor d = term();
    for (;;) {
      skip();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        d = compose(d, term());
      } else {
        return d;
      }
    }
  }

  SystemDescriptor term() {
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      SystemDescriptor d = expr();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return d;
    }
    return atom();
  }

  std::string word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::size_t integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a dimension");
    return std::stoul(std::string(s_.substr(start, pos_ - start)));
  }

  SystemDescriptor atom() {
    skip();
    const std::string w = word();
    if (w.empty()) fail("expected a system");
    if (w == "qubit") return SystemDescriptor::quantum(2);
    if (w == "qutrit") return SystemDescriptor::quantum(3);
    if (w == "rebit") return SystemDescriptor::quantum(2, Field::real);
    if (w == "cbit") return SystemDescriptor::classical(2);
    if (w == "cobit") return SystemDescriptor::coherent(2);
    if (w == "cbit-cobit") return compose(SystemDescriptor::classical(2), SystemDescriptor::coherent(2));
    if (pos_ >= s_.size() || s_[pos_] != ':') fail("unknown preset \"" + w + "\"");
    ++pos_;
    if (w == "mirror") {
      std::vector<std::size_t> dims{integer()};
      while (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        dims.push_back(integer());
      }
      return SystemDescriptor::mirror(dims, field_suffix());
    }
    const std::size_t d = integer();
    if (w == "quantum") return SystemDescriptor::quantum(d, field_suffix());
    if (w == "real") return SystemDescriptor::quantum(d, Field::real);
    if (w == "classical") return SystemDescriptor::classical(d, field_suffix());
    if (w == "coherent") return SystemDescriptor::coherent(d, field_suffix());
    fail("unknown kind \"" + w + "\"");
  }

  Field field_suffix() {
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      const std::string f = word();
      if (f == "real") return Field::real;
      if (f == "complex") return Field::complex;
      fail("unknown field \"" + f + "\"");
    }
    return Field::complex;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a theory expression such as "cbit*cobit" or "quantum:2*(classical:3*coherent:3)",
/// or a JSON descriptor when the text starts with '{'.
inline SystemDescriptor parse_theory(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(Errc::schema_error, std::string("malformed descriptor JSON: ") + e.what());
    }
    return descriptor_from_json(j);
  }
  return detail::TheoryParser(text).parse();
}

// ---- operators ---------------------------------------------------------------

template <Role R>
json blocks_json(const BlockOperator<R>& x) {
  json blocks = json::array();
  for (const auto& b : x.blocks()) {
    json flat = json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c) flat.push_back(detail::scalar_json(b(r, c), x.system().field()));
    blocks.push_back(std::move(flat));
  }
  return blocks;
}

template <Role R>
json to_json(const BlockOperator<R>& x) {
  return json{{"system", to_json(x.system())}, {"blocks", blocks_json(x)}};
}

/// Blocks as flat row-major entry lists, or as lists of rows.
inline std::vector<Matrix> blocks_from_json(const json& j, const SystemDescriptor& sys, const std::string& path) {
  if (!j.is_array()) detail::schema(path, "expected an array of blocks");
  if (j.size() != sys.sector_count())
    detail::schema(path, "expected " + std::to_string(sys.sector_count()) + " blocks, got " + std::to_string(j.size()));
  std::vector<Matrix> out;
  for (std::size_t s = 0; s < j.size(); ++s) {
    const std::string bp = path + "/" + std::to_string(s);
    const auto n = static_cast<Eigen::Index>(sys.sector_dim(s));
    const json& b = j[s];
    if (!b.is_array()) detail::schema(bp, "expected an array");
    Matrix m(n, n);
    const bool nested_single = n == 1 && b.size() == 1 && b[0].is_array() && b[0].size() == 1;
    if (b.size() == static_cast<std::size_t>(n * n) && !nested_single) {
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
          const auto k = static_cast<std::size_t>(r * n + c);
          m(r, c) = detail::scalar(b[k], bp + "/" + std::to_string(k));
        }
    } else if (b.size() == static_cast<std::size_t>(n)) {
      for (Eigen::Index r = 0; r < n; ++r) {
        const json& row = b[static_cast<std::size_t>(r)];
        const std::string rp = bp + "/" + std::to_string(r);
        if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) detail::schema(rp, "expected a row");
        for (Eigen::Index c = 0; c < n; ++c)
          m(r, c) = detail::scalar(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
      }
    } else {
      detail::schema(bp, "block must have " + std::to_string(n * n) + " entries");
    }
    out.push_back(std::move(m));
  }
  return out;
}

template <Role R>
BlockOperator<R> operator_from_json(const json& j, const std::string& path = "",
                                    const SystemDescriptor* system = nullptr) {
  SystemDescriptor sys = system && !(j.is_object() && j.contains("system"))
                             ? *system
                             : descriptor_from_json(detail::member(j, "system", path), path + "/system");
  const json& blocks = j.is_array() ? j : detail::member(j, "blocks", path);
  auto mats = blocks_from_json(blocks, sys, j.is_array() ? path : path + "/blocks");
  try {
    return BlockOperator<R>(std::move(sys), std::move(mats));
  } catch (const Error& e) {
    if (e.code() == Errc::schema_error) throw;
    throw Error(e.code(), "at " + (path.empty() ? std::string("/") : path) + ": " + e.what());
  }
}

inline json to_json(const PureVector& v) {
  json amps = json::array();
  for (Eigen::Index k = 0; k < v.amplitudes().size(); ++k)
    amps.push_back(detail::scalar_json(v.amplitudes()(k), v.system().field()));
  return json{{"sector", v.sector()}, {"amplitudes", std::move(amps)}};
}

inline PureVector pure_from_json(const json& j, const SystemDescriptor& sys, const std::string& path) {
  const std::size_t sector = detail::index_value(detail::member(j, "sector", path), path + "/sector");
  const json& a = detail::member(j, "amplitudes", path);
  if (!a.is_array()) detail::schema(path + "/amplitudes", "expected an array");
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = detail::scalar(a[k], path + "/amplitudes/" + std::to_string(k));
  try {
    return PureVector(sys, sector, std::move(v));
  } catch (const Error& e) {
    throw Error(e.code(), "at " + path + ": " + e.what());
  }
}

inline json matrix_json(const Matrix& m, Field field) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(detail::scalar_json(m(r, c), field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& path) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(rows)) detail::schema(path, "expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "/" + std::to_string(r);
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) detail::schema(rp, "expected " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = detail::scalar(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
  }
  return m;
}

inline json to_json(const Channel& c) {
  json k = json::array();
  for (const auto& m : c.kraus()) k.push_back(matrix_json(m, c.input().field()));
  json j{{"kind", std::string(to_string(c.kind()))},
         {"input", to_json(c.input())},
         {"output", to_json(c.output())},
         {"kraus", std::move(k)}};
  if (c.kind() == ChannelKind::rare) j["weights"] = c.rare_weights();
  return j;
}

inline Channel channel_from_json(const json& j, const std::string& path = "") {
  const SystemDescriptor in = descriptor_from_json(detail::member(j, "input", path), path + "/input");
  const SystemDescriptor out =
      j.contains("output") ? descriptor_from_json(j["output"], path + "/output") : in;
  const json& ks = detail::member(j, "kraus", path);
  if (!ks.is_array()) detail::schema(path + "/kraus", "expected an array");
  std::vector<Matrix> kraus;
  for (std::size_t i = 0; i < ks.size(); ++i)
    kraus.push_back(matrix_from_json(ks[i], static_cast<Eigen::Index>(out.dim()), static_cast<Eigen::Index>(in.dim()),
                                     path + "/kraus/" + std::to_string(i)));
  ChannelKind kind = ChannelKind::general;
  if (j.contains("kind")) {
    const std::string k = j["kind"].get<std::string>();
    if (k == "reversible") kind = ChannelKind::reversible;
    else if (k == "rare" || k == "general") kind = ChannelKind::general;
    else detail::schema(path + "/kind", "unknown channel kind \"" + k + "\"");
  }
  try {
    return Channel(in, out, std::move(kraus), kind);
  } catch (const Error& e) {
    throw Error(e.code(), "at " + (path.empty() ? std::string("/") : path) + ": " + e.what());
  }
}

// ---- spectral results ----------------------------------------------------------

inline json to_json(const Diagonalization& d) {
  json states = json::array();
  for (const auto& v : d.eigenstates) states.push_back(to_json(v));
  json grouped = json::array();
  for (const auto& g : d.grouped) grouped.push_back(json{{"lambda", g.lambda}, {"projector", blocks_json(g.projector)}});
  return json{{"system", to_json(d.system)},
              {"eigenvalues", d.eigenvalues},
              {"eigenstates", std::move(states)},
              {"grouped", std::move(grouped)}};
}

/// sum_i p_i alpha_i from a diagonalization record.
inline State recompose_from_json(const json& j, const std::string& path = "") {
  const SystemDescriptor sys = descriptor_from_json(detail::member(j, "system", path), path + "/system");
  const json& ev = detail::member(j, "eigenvalues", path);
  const json& es = detail::member(j, "eigenstates", path);
  if (!ev.is_array() || !es.is_array() || ev.size() != es.size())
    detail::schema(path, "eigenvalues and eigenstates must be arrays of equal length");
  auto blocks = StateVector::zero(sys).blocks();
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double p = detail::number(ev[i], path + "/eigenvalues/" + std::to_string(i));
    const PureVector v = pure_from_json(es[i], sys, path + "/eigenstates/" + std::to_string(i));
    blocks[v.sector()] += p * v.projector_block();
  }
  return State(sys, std::move(blocks));
}

inline json to_json(const SchmidtDecomposition& s, const SystemDescriptor& composite) {
  json a = json::array(), b = json::array();
  for (const auto& v : s.a) a.push_back(to_json(v));
  for (const auto& v : s.b) b.push_back(to_json(v));
  return json{{"system", to_json(composite)}, {"rank", s.rank}, {"p", s.p}, {"a", std::move(a)}, {"b", std::move(b)}};
}

}  // namespace sharp::io
