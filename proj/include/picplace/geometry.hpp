#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace picplace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

enum class Axis : std::uint8_t { X, Y };

// Port orientation. Only the four axis-aligned unit vectors are legal.
enum class Dir : std::uint8_t { E, N, W, S };

constexpr Vec2 unit(Dir d) {
  switch (d) {
    case Dir::E: return {1.0, 0.0};
    case Dir::N: return {0.0, 1.0};
    case Dir::W: return {-1.0, 0.0};
    case Dir::S: return {0.0, -1.0};
  }
  return {};
}

constexpr Dir opposite(Dir d) {
  switch (d) {
    case Dir::E: return Dir::W;
    case Dir::N: return Dir::S;
    case Dir::W: return Dir::E;
    case Dir::S: return Dir::N;
  }
  return d;
}

constexpr bool is_horizontal(Dir d) { return d == Dir::E || d == Dir::W; }

constexpr char dir_letter(Dir d) {
  constexpr char letters[] = {'E', 'N', 'W', 'S'};
  return letters[static_cast<int>(d)];
}

// Axis-aligned rectangle given by its lower-left and upper-right corners.
struct Rect {
  double xl = 0.0;
  double yl = 0.0;
  double xh = 0.0;
  double yh = 0.0;

  static constexpr Rect from_corner(double x, double y, double w, double h) {
    return {x, y, x + w, y + h};
  }

  constexpr double width() const { return xh - xl; }
  constexpr double height() const { return yh - yl; }
  constexpr double area() const { return width() * height(); }
  constexpr Vec2 center() const { return {0.5 * (xl + xh), 0.5 * (yl + yh)}; }

  constexpr Rect inflated(double margin) const {
    return {xl - margin, yl - margin, xh + margin, yh + margin};
  }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

inline double overlap_length(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

inline double overlap_area(const Rect& a, const Rect& b) {
  return overlap_length(a.xl, a.xh, b.xl, b.xh) * overlap_length(a.yl, a.yh, b.yl, b.yh);
}

// Strict interior overlap; rectangles that only touch do not overlap.
inline bool overlaps(const Rect& a, const Rect& b) {
  return a.xl < b.xh && b.xl < a.xh && a.yl < b.yh && b.yl < a.yh;
}

inline bool contains(const Rect& outer, const Rect& inner) {
  return inner.xl >= outer.xl && inner.yl >= outer.yl && inner.xh <= outer.xh &&
         inner.yh <= outer.yh;
}

}  // namespace picplace
