#pragma once

/// @file
/// Problem files (JSON) and CSV output.
///
/// Problem schema:
///   { "n": 2,
///     "f": { "Q": [[1,0],[0,1]], "q": [-1, 1], "r": 1 },
///     "g": { "pieces": [ {"a": [..], "b": 0} ],
///            "domain": { "A_ineq": [[..]], "b_ineq": [..], "A_eq": [[..]], "b_eq": [..] } },
///     "meta": { "name": "..", "known_minimizer": [..], "known_alpha": 0.5, "known_gamma": 1 } }
/// `f.r`, `g`, `g.pieces`, every domain field and `meta` are optional. The rows
/// -x ≤ 0 are always appended to the domain.

#include "sqlift/polyfunc.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace sqlift::io {

using json = nlohmann::json;

/// ParseError or ValidationError with the offending field and, when it can be
/// located in the source text, its line.
class FileError : public Error {
public:
  FileError(ErrorKind kind, std::string field, int line, const std::string &what)
      : Error(kind, format(field, line, what)), field_(std::move(field)), line_(line) {}
  const std::string &field() const { return field_; }
  int line() const { return line_; }

private:
  static std::string format(const std::string &field, int line, const std::string &what) {
    std::string s;
    if (line > 0) s += "line " + std::to_string(line) + ": ";
    if (!field.empty()) s += "field '" + field + "': ";
    return s + what;
  }
  std::string field_;
  int line_;
};

struct ProblemMeta {
  std::optional<std::string> name;
  std::optional<Vector> known_minimizer;
  std::optional<double> known_alpha;
  std::optional<double> known_gamma;
};

struct ProblemFile {
  QuadraticProblem problem;
  ProblemMeta meta;
};

namespace detail {

class Reader {
public:
  explicit Reader(std::string text) : text_(std::move(text)) {}

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error &e) {
      throw FileError(ErrorKind::ParseError, "", line_of_byte(e.byte), e.what());
    }
  }

  [[noreturn]] void fail(ErrorKind kind, const std::string &path, const std::string &what) const {
    throw FileError(kind, path, line_of_key(path), what);
  }

  double number(const json &j, const std::string &path) const {
    if (!j.is_number()) fail(ErrorKind::ParseError, path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ErrorKind::ValidationError, path, "must be finite");
    return v;
  }

  Vector vector(const json &j, const std::string &path) const {
    if (!j.is_array()) fail(ErrorKind::ParseError, path, "expected an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
      v(static_cast<Index>(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
    return v;
  }

  /// Array of row arrays; `[]` is a matrix with zero rows and `cols` columns.
  Matrix matrix(const json &j, const std::string &path, Index cols) const {
    if (!j.is_array()) fail(ErrorKind::ParseError, path, "expected an array of rows");
    Matrix m(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
      const std::string rp = path + "[" + std::to_string(r) + "]";
      const Vector row = vector(j[r], rp);
      if (row.size() != cols)
        fail(ErrorKind::ValidationError, rp,
             "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
      m.row(static_cast<Index>(r)) = row.transpose();
    }
    return m;
  }

private:
  int line_of_byte(std::size_t byte) const {
    int line = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text_.size(); ++i)
      if (text_[i] == '\n') ++line;
    return line;
  }
  /// Line of the first occurrence of the last key named in `path`, or 0.
  int line_of_key(const std::string &path) const {
    std::string key = path;
    const auto bracket = key.find('[');
    if (bracket != std::string::npos) key = key.substr(0, bracket);
    const auto dot = key.rfind('.');
    if (dot != std::string::npos) key = key.substr(dot + 1);
    if (key.empty()) return 0;
    const auto pos = text_.find("\"" + key + "\"");
    if (pos == std::string::npos) return 0;
    return line_of_byte(pos + 1);
  }
  std::string text_;
};

} // namespace detail

inline ProblemFile parse_problem_text(const std::string &text) {
  const detail::Reader rd(text);
  const json root = rd.parse();
  if (!root.is_object()) rd.fail(ErrorKind::ParseError, "", "top level must be an object");
  if (!root.contains("n")) rd.fail(ErrorKind::ParseError, "n", "missing");
  if (!root["n"].is_number_integer()) rd.fail(ErrorKind::ParseError, "n", "expected an integer");
  const long long nn = root["n"].get<long long>();
  if (nn < 1) rd.fail(ErrorKind::ValidationError, "n", "must be ≥ 1");
  const Index n = static_cast<Index>(nn);

  if (!root.contains("f") || !root["f"].is_object())
    rd.fail(ErrorKind::ParseError, "f", "missing or not an object");
  const json &jf = root["f"];
  if (!jf.contains("Q")) rd.fail(ErrorKind::ParseError, "f.Q", "missing");
  if (!jf.contains("q")) rd.fail(ErrorKind::ParseError, "f.q", "missing");
  const json &jQ = jf["Q"];
  if (!jQ.is_array()) rd.fail(ErrorKind::ParseError, "f.Q", "expected an array of rows");
  if (static_cast<Index>(jQ.size()) != n)
    rd.fail(ErrorKind::ValidationError, "f.Q", "Q must be n×n (has " + std::to_string(jQ.size()) + " rows)");
  Matrix Q(n, n);
  for (std::size_t r = 0; r < jQ.size(); ++r) {
    const std::string rp = "f.Q[" + std::to_string(r) + "]";
    const Vector row = rd.vector(jQ[r], rp);
    if (row.size() != n) rd.fail(ErrorKind::ValidationError, "f.Q", "Q must be square n×n");
    Q.row(static_cast<Index>(r)) = row.transpose();
  }
  const Vector q = rd.vector(jf["q"], "f.q");
  if (q.size() != n) rd.fail(ErrorKind::ValidationError, "f.q", "length must be n");
  const double r = jf.contains("r") ? rd.number(jf["r"], "f.r") : 0.0;

  std::vector<AffinePiece> pieces;
  Matrix A_ineq(0, n), A_eq(0, n);
  Vector b_ineq(0), b_eq(0);
  if (root.contains("g")) {
    const json &jg = root["g"];
    if (!jg.is_object()) rd.fail(ErrorKind::ParseError, "g", "expected an object");
    if (jg.contains("pieces")) {
      const json &jp = jg["pieces"];
      if (!jp.is_array()) rd.fail(ErrorKind::ParseError, "g.pieces", "expected an array");
      for (std::size_t k = 0; k < jp.size(); ++k) {
        const std::string pp = "g.pieces[" + std::to_string(k) + "]";
        if (!jp[k].is_object() || !jp[k].contains("a"))
          rd.fail(ErrorKind::ParseError, pp, "expected {a, b}");
        AffinePiece piece{rd.vector(jp[k]["a"], pp + ".a"),
                          jp[k].contains("b") ? rd.number(jp[k]["b"], pp + ".b") : 0.0};
        if (piece.a.size() != n) rd.fail(ErrorKind::ValidationError, pp + ".a", "length must be n");
        pieces.push_back(std::move(piece));
      }
    }
    if (jg.contains("domain")) {
      const json &jd = jg["domain"];
      if (!jd.is_object()) rd.fail(ErrorKind::ParseError, "g.domain", "expected an object");
      if (jd.contains("A_ineq")) A_ineq = rd.matrix(jd["A_ineq"], "g.domain.A_ineq", n);
      if (jd.contains("b_ineq")) b_ineq = rd.vector(jd["b_ineq"], "g.domain.b_ineq");
      if (jd.contains("A_eq")) A_eq = rd.matrix(jd["A_eq"], "g.domain.A_eq", n);
      if (jd.contains("b_eq")) b_eq = rd.vector(jd["b_eq"], "g.domain.b_eq");
      if (b_ineq.size() != A_ineq.rows())
        rd.fail(ErrorKind::ValidationError, "g.domain.b_ineq", "length must match A_ineq rows");
      if (b_eq.size() != A_eq.rows())
        rd.fail(ErrorKind::ValidationError, "g.domain.b_eq", "length must match A_eq rows");
    }
  }

  ProblemMeta meta;
  if (root.contains("meta")) {
    const json &jm = root["meta"];
    if (!jm.is_object()) rd.fail(ErrorKind::ParseError, "meta", "expected an object");
    if (jm.contains("name")) {
      if (!jm["name"].is_string()) rd.fail(ErrorKind::ParseError, "meta.name", "expected a string");
      meta.name = jm["name"].get<std::string>();
    }
    if (jm.contains("known_minimizer")) {
      meta.known_minimizer = rd.vector(jm["known_minimizer"], "meta.known_minimizer");
      if (meta.known_minimizer->size() != n)
        rd.fail(ErrorKind::ValidationError, "meta.known_minimizer", "length must be n");
    }
    if (jm.contains("known_alpha")) meta.known_alpha = rd.number(jm["known_alpha"], "meta.known_alpha");
    if (jm.contains("known_gamma")) meta.known_gamma = rd.number(jm["known_gamma"], "meta.known_gamma");
  }

  try {
    SmoothQuadratic f(Q, q, r);
    PolyhedralFunction g(std::move(pieces), Polyhedron(A_ineq, b_ineq, A_eq, b_eq));
    return {QuadraticProblem(std::move(f), std::move(g)), meta};
  } catch (const FileError &) {
    throw;
  } catch (const Error &e) {
    throw FileError(ErrorKind::ValidationError, "", 0, e.what());
  }
}

inline std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ProblemFile parse_problem_file(const std::string &path) {
  return parse_problem_text(read_text_file(path));
}

namespace detail {
inline json to_json(const Vector &v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}
inline json to_json(const Matrix &m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(to_json(Vector(m.row(r).transpose())));
  return a;
}
} // namespace detail

/// Serialised form, with the full domain (including the appended -x ≤ 0 rows).
inline json to_json(const ProblemFile &pf) {
  const auto &p = pf.problem;
  json root;
  root["n"] = p.dimension();
  root["f"] = {{"Q", detail::to_json(p.f().Q())}, {"q", detail::to_json(p.f().q())}, {"r", p.f().r()}};
  json pieces = json::array();
  for (const auto &piece : p.g().pieces())
    pieces.push_back({{"a", detail::to_json(piece.a)}, {"b", piece.b}});
  const Polyhedron &d = p.g().domain();
  root["g"] = {{"pieces", pieces},
               {"domain",
                {{"A_ineq", detail::to_json(d.A_ineq())},
                 {"b_ineq", detail::to_json(d.b_ineq())},
                 {"A_eq", detail::to_json(d.A_eq())},
                 {"b_eq", detail::to_json(d.b_eq())}}}};
  if (pf.meta.name || pf.meta.known_minimizer || pf.meta.known_alpha || pf.meta.known_gamma) {
    json m = json::object();
    if (pf.meta.name) m["name"] = *pf.meta.name;
    if (pf.meta.known_minimizer) m["known_minimizer"] = detail::to_json(*pf.meta.known_minimizer);
    if (pf.meta.known_alpha) m["known_alpha"] = *pf.meta.known_alpha;
    if (pf.meta.known_gamma) m["known_gamma"] = *pf.meta.known_gamma;
    root["meta"] = m;
  }
  return root;
}

inline std::string serialize_problem(const ProblemFile &pf) { return to_json(pf).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> comments; // written as "# ..." lines before the header
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {
inline std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}
} // namespace detail

inline std::string render_csv(const CsvTable &t) {
  std::string out;
  for (const auto &c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out += (i ? "," : "") + detail::csv_field(t.header[i]);
  out += "\n";
  for (const auto &row : t.rows) {
    if (row.size() != t.header.size())
      throw Error(ErrorKind::DimensionMismatch, "CSV row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

/// Writes the table; "-" means standard output.
inline void emit_csv(const CsvTable &t, const std::string &path) {
  const std::string text = render_csv(t);
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IOError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IOError, "write failed for " + path);
}

inline CsvTable parse_csv(const std::string &text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  auto split = [](const std::string &s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (quoted) {
        if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    if (!have_header && line.rfind("# ", 0) == 0) {
      t.comments.push_back(line.substr(2));
      continue;
    }
    if (!have_header) {
      t.header = split(line);
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto &field : split(line)) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception &) {
        throw Error(ErrorKind::ParseError, "CSV field is not a number: " + field);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable read_csv(const std::string &path) { return parse_csv(read_text_file(path)); }

} // namespace sqlift::io
