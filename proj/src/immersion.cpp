#include "dsurf/immersion.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace dsurf {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int value_column = 0;  // 1-based column where the value starts
};

std::string_view trim(std::string_view s, size_t* lead = nullptr) {
  size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (lead) *lead = b;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

constexpr const char* kKnownKeys[] = {"name", "params", "x1", "x2", "x3",
                                      "x4", "domain", "periodic", "frame_rotation"};

bool known_key(const std::string& key) {
  for (const char* k : kKnownKeys) {
    if (key == k) return true;
  }
  return false;
}

Expr parse_at(const Entry& e, const std::array<std::string, 2>& params) {
  try {
    return parse_expression(e.value, params);
  } catch (const ParseError& err) {
    const int col = err.column() > 0 ? err.column() + e.value_column - 1 : 0;
    throw ParseError(err.message(), e.line, col);
  }
}

double parse_bound(const std::string& text, int line) {
  Expr e;
  try {
    e = parse_expression(text, {"", ""});
  } catch (const ParseError& err) {
    throw ParseError("malformed domain bound '" + text + "': " + err.message(), line, 0);
  }
  const double v = eval(e, Vec2::Zero());
  if (!std::isfinite(v)) throw ParseError("malformed domain: non-finite bound", line, 0);
  return v;
}

bool parse_bool(const std::string& text, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ParseError("malformed periodic flag '" + text + "' (expected true|false)", line, 0);
}

}  // namespace

ImmersionSpec parse_immersion(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (trim(raw).empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto colon = raw.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected 'key: value'", line_no, 0);
    const std::string key(trim(raw.substr(0, colon)));
    size_t lead = 0;
    const std::string_view value = trim(raw.substr(colon + 1), &lead);
    if (!known_key(key)) throw ParseError("unknown key: " + key, line_no, 0);
    if (entries.count(key)) throw ParseError("duplicate key: " + key, line_no, 0);
    if (value.empty()) throw ParseError("empty value for key: " + key, line_no, 0);
    entries[key] = Entry{std::string(value), line_no, static_cast<int>(colon + 1 + lead) + 1};
    if (end == text.size()) break;
  }

  for (const char* k : {"name", "params", "x1", "x2", "x3", "x4", "domain", "periodic"}) {
    if (!entries.count(k)) throw ParseError(std::string("missing key: ") + k, 0, 0);
  }

  ImmersionSpec spec;
  spec.name = entries["name"].value;

  {
    const Entry& e = entries["params"];
    const auto toks = split_ws(e.value);
    if (toks.size() != 2) throw ParseError("params needs exactly two identifiers", e.line, 0);
    for (const auto& t : toks) {
      if (t == "pi" || !(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_'))
        throw ParseError("invalid parameter name: " + t, e.line, 0);
    }
    if (toks[0] == toks[1]) throw ParseError("parameter names must differ", e.line, 0);
    spec.params = {toks[0], toks[1]};
  }

  for (int i = 0; i < 4; ++i) {
    spec.coords[i] = parse_at(entries["x" + std::to_string(i + 1)], spec.params);
  }

  {
    const Entry& e = entries["domain"];
    const auto toks = split_ws(e.value);
    if (toks.size() != 6) throw ParseError("malformed domain: expected '<p1> lo hi <p2> lo hi'", e.line, 0);
    for (int a = 0; a < 2; ++a) {
      if (toks[3 * a] != spec.params[a]) {
        throw ParseError("malformed domain: expected parameter '" + spec.params[a] + "', got '" +
                             toks[3 * a] + "'",
                         e.line, 0);
      }
      Interval iv{parse_bound(toks[3 * a + 1], e.line), parse_bound(toks[3 * a + 2], e.line)};
      if (!(iv.lo < iv.hi)) throw ParseError("malformed domain: empty interval", e.line, 0);
      spec.domain[a] = iv;
    }
  }

  {
    const Entry& e = entries["periodic"];
    const auto toks = split_ws(e.value);
    if (toks.size() != 2) throw ParseError("periodic needs two flags", e.line, 0);
    spec.periodic = {parse_bool(toks[0], e.line), parse_bool(toks[1], e.line)};
  }

  if (entries.count("frame_rotation")) {
    spec.frame_rotation = parse_at(entries["frame_rotation"], spec.params);
    spec.has_frame_rotation = true;
  }
  return spec;
}

ImmersionSpec load_immersion(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path, 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_immersion(ss.str());
}

}  // namespace dsurf
