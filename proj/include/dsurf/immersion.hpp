#pragma once

#include <array>
#include <string>
#include <string_view>

#include "dsurf/expr.hpp"

namespace dsurf {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// A surface x: (s1, s2) -> E^4 given by four coordinate expressions.
struct ImmersionSpec {
  std::string name;
  std::array<std::string, 2> params;
  std::array<Expr, 4> coords;
  std::array<Interval, 2> domain;
  std::array<bool, 2> periodic{false, false};
  // Rotation angle (radians) applied to the normal frame; constant 0 when absent.
  Expr frame_rotation = Expr::constant(0.0);
  bool has_frame_rotation = false;

  bool in_domain(const Vec2& s) const {
    return domain[0].contains(s[0]) && domain[1].contains(s[1]);
  }
};

// Line-oriented `key: value` format, `#` comments.
//   name, params, x1..x4, domain, periodic   required
//   frame_rotation                            optional
ImmersionSpec parse_immersion(std::string_view text);

ImmersionSpec load_immersion(const std::string& path);

}  // namespace dsurf
