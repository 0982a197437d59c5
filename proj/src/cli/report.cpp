#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace dsurf::cli {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string scalar(const Json& j) {
  switch (j.type()) {
    case Json::value_t::number_float:
      return number(j.get<double>());
    case Json::value_t::string:
    case Json::value_t::boolean:
    case Json::value_t::null:
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
      return j.dump();
    default:
      return "";
  }
}

void write(const Json& j, std::ostringstream& os, int indent) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << inner << Json(it.key()).dump() << ": ";
      write(it.value(), os, indent + 2);
    }
    os << "\n" << pad << "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    // Arrays of scalars stay on one line.
    bool flat = true;
    for (const auto& e : j) flat = flat && !e.is_structured();
    if (flat) {
      os << "[";
      for (size_t k = 0; k < j.size(); ++k) os << (k ? ", " : "") << scalar(j[k]);
      os << "]";
      return;
    }
    os << "[\n";
    for (size_t k = 0; k < j.size(); ++k) {
      if (k) os << ",\n";
      os << inner;
      write(j[k], os, indent + 2);
    }
    os << "\n" << pad << "]";
  } else {
    os << scalar(j);
  }
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "_" + it.key(), out);
  } else if (j.is_array()) {
    for (size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "_" + std::to_string(k), out);
  } else {
    std::string v = scalar(j);
    if (j.is_string()) v = j.get<std::string>();
    out.emplace_back(prefix, v);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::string to_json_text(const Json& doc) {
  std::ostringstream os;
  write(doc, os, 0);
  os << "\n";
  return os.str();
}

std::string to_csv(const Json& rows) {
  std::ostringstream os;
  std::vector<std::string> header;
  for (size_t r = 0; r < rows.size(); ++r) {
    std::vector<std::pair<std::string, std::string>> cells;
    flatten(rows[r], "", cells);
    if (r == 0) {
      for (size_t k = 0; k < cells.size(); ++k) {
        header.push_back(cells[k].first);
        os << (k ? "," : "") << csv_field(cells[k].first);
      }
      os << "\n";
    }
    for (size_t k = 0; k < header.size(); ++k) {
      std::string v;
      for (const auto& c : cells) {
        if (c.first == header[k]) {
          v = c.second;
          break;
        }
      }
      os << (k ? "," : "") << csv_field(v);
    }
    os << "\n";
  }
  return os.str();
}

bool all_finite(const Json& doc) {
  if (doc.is_number_float()) return std::isfinite(doc.get<double>());
  if (doc.is_structured()) {
    for (const auto& e : doc) {
      if (!all_finite(e)) return false;
    }
  }
  return true;
}

}  // namespace dsurf::cli
