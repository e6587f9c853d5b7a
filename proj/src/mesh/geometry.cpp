#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "qad/core.hpp"
#include "qad/mesh.hpp"
#include "triangulator.hpp"

namespace qad {

namespace {

using Vec = Eigen::Vector2d;
using detail::SizeField;
constexpr double pi = std::numbers::pi;

struct SegInfo {
  BoundaryTag tag = BoundaryTag::free;
  bool internal = false;  // symmetry line or material interface
};

constexpr SegInfo mirror_line{BoundaryTag::free, true};

// A boundary primitive ending at `end`. Arcs run from angle a0 to a1 around
// `center`; the sign of (a1 - a0) is the direction of travel.
struct Piece {
  bool arc = false;
  Vec end;
  Vec center{0.0, 0.0};
  double radius = 0.0;
  double a0 = 0.0;
  double a1 = 0.0;
  SegInfo seg{};
};

struct Chain {
  Vec start;
  std::vector<Piece> pieces;

  Vec back() const { return pieces.empty() ? start : pieces.back().end; }
  void line_to(const Vec& p, SegInfo s = {}) { pieces.push_back({false, p, {}, 0.0, 0.0, 0.0, s}); }
  void arc_to(const Vec& center, double r, double a0, double a1, const Vec& end, SegInfo s = {}) {
    pieces.push_back({true, end, center, r, a0, a1, s});
  }
  void append(const Chain& other) {
    for (const auto& p : other.pieces) pieces.push_back(p);
  }
};

Chain reversed(const Chain& c) {
  Chain out{c.back(), {}};
  for (std::size_t i = c.pieces.size(); i-- > 0;) {
    Piece p = c.pieces[i];
    p.end = i == 0 ? c.start : c.pieces[i - 1].end;
    std::swap(p.a0, p.a1);
    out.pieces.push_back(p);
  }
  return out;
}

// Mirror X -> 2*at - X. Travel direction is preserved (the chain is not reversed).
Chain mirrored_x(const Chain& c, double at) {
  auto m = [&](const Vec& p) { return Vec(2.0 * at - p.x(), p.y()); };
  Chain out{m(c.start), {}};
  for (Piece p : c.pieces) {
    p.end = m(p.end);
    p.center = m(p.center);
    p.a0 = pi - p.a0;
    p.a1 = pi - p.a1;
    out.pieces.push_back(p);
  }
  return out;
}

Chain mirrored_y(const Chain& c) {
  auto m = [](const Vec& p) { return Vec(p.x(), -p.y()); };
  Chain out{m(c.start), {}};
  for (Piece p : c.pieces) {
    p.end = m(p.end);
    p.center = m(p.center);
    p.a0 = -p.a0;
    p.a1 = -p.a1;
    out.pieces.push_back(p);
  }
  return out;
}

struct Loop {
  std::vector<Vec> points;
  std::vector<SegInfo> segs;  // segs[i] labels (i, i+1)
  double arc_correction = 0.0;

  double polygon_area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec& p = points[i];
      const Vec& q = points[(i + 1) % points.size()];
      a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
  }
  double exact_area() const { return polygon_area() + arc_correction; }
};

// Polygonalizes a closed chain. Arcs get chord error <= h/4 and chord length <= h.
Loop polygonize(const Chain& closed, const SizeField& size) {
  Loop loop;
  loop.points.push_back(closed.start);
  for (const auto& p : closed.pieces) {
    if (!p.arc) {
      loop.segs.push_back(p.seg);
      loop.points.push_back(p.end);
      continue;
    }
    const double sweep = p.a1 - p.a0;
    double h = std::numeric_limits<double>::max();
    for (int k = 0; k <= 8; ++k) {
      const double a = p.a0 + sweep * k / 8.0;
      h = std::min(h, size(p.center + p.radius * Vec(std::cos(a), std::sin(a))));
    }
    const double by_chord_error = 2.0 * std::acos(std::max(-1.0, 1.0 - h / (4.0 * p.radius)));
    const double by_length = 2.0 * std::asin(std::min(1.0, h / (2.0 * p.radius)));
    const double step = std::min(by_chord_error, by_length);
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(sweep) / step)));
    const double d = std::abs(sweep) / n;
    for (int k = 1; k <= n; ++k) {
      loop.segs.push_back(p.seg);
      if (k == n) {
        loop.points.push_back(p.end);
      } else {
        const double a = p.a0 + sweep * k / n;
        loop.points.push_back(p.center + p.radius * Vec(std::cos(a), std::sin(a)));
      }
    }
    loop.arc_correction += (sweep > 0.0 ? 1.0 : -1.0) * n * 0.5 * p.radius * p.radius * (d - std::sin(d));
  }
  // the chain closes on its start point
  if ((loop.points.back() - loop.points.front()).norm() == 0.0) loop.points.pop_back();
  return loop;
}

// Splits straight segments so no piece exceeds the local size.
detail::PlanarGraph to_graph(const Loop& loop, const SizeField& size, const std::vector<std::pair<Vec, Vec>>& interfaces) {
  detail::PlanarGraph g;
  const std::size_t n = loop.points.size();
  std::vector<int> seg_first;  // per loop segment: index of first subsegment
  auto add_point = [&](const Vec& p) {
    g.points.push_back(p);
    return static_cast<int>(g.points.size()) - 1;
  };
  auto subdivide = [&](const Vec& a, const Vec& b) {
    const double len = (b - a).norm();
    double h = std::numeric_limits<double>::max();
    for (int k = 0; k <= 8; ++k) h = std::min(h, size(a + (b - a) * (k / 8.0)));
    return std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
  };
  std::vector<int> loop_ids(n);
  for (std::size_t i = 0; i < n; ++i) loop_ids[i] = add_point(loop.points[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec a = loop.points[i];
    const Vec b = loop.points[(i + 1) % n];
    const int pieces = subdivide(a, b);
    int prev = loop_ids[i];
    for (int k = 1; k <= pieces; ++k) {
      const int next = k == pieces ? loop_ids[(i + 1) % n] : add_point(a + (b - a) * (static_cast<double>(k) / pieces));
      g.segments.push_back({prev, next, loop.segs[i].tag, !loop.segs[i].internal, -1});
      prev = next;
    }
  }
  for (const auto& [a, b] : interfaces) {
    const int pieces = subdivide(a, b);
    int prev = -1;
    for (int k = 0; k <= pieces; ++k) {
      const Vec p = a + (b - a) * (static_cast<double>(k) / pieces);
      // reuse loop points that coincide with interface end points
      int id = -1;
      for (std::size_t j = 0; j < g.points.size(); ++j) {
        if ((g.points[j] - p).norm() == 0.0) id = static_cast<int>(j);
      }
      if (id < 0) id = add_point(p);
      if (prev >= 0) g.segments.push_back({prev, id, BoundaryTag::free, false, -1});
      prev = id;
    }
  }
  return g;
}

// ---------------------------------------------------------------- mirroring
template <class TagMap>
Mesh mirror_merge(const Mesh& m, bool across_x, double at, TagMap tag_map) {
  Mesh out = m;
  std::vector<int> image(m.nodes.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const Vec& p = m.nodes[i];
    const double c = across_x ? p.x() : p.y();
    if (c == at) {
      image[i] = static_cast<int>(i);
      continue;
    }
    Vec q = p;
    if (across_x) {
      q.x() = 2.0 * at - p.x();
    } else {
      q.y() = 2.0 * at - p.y();
    }
    image[i] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(q);
  }
  for (const auto& e : m.elements) out.elements.push_back({image[e[0]], image[e[2]], image[e[1]]});
  for (const auto& b : m.boundary) out.boundary.push_back({image[b.b], image[b.a], tag_map(b.tag)});
  return out;
}

BoundaryTag same_tag(BoundaryTag t) { return t; }

BoundaryTag swap_periodic(BoundaryTag t) {
  if (t == BoundaryTag::periodic_left) return BoundaryTag::periodic_right;
  if (t == BoundaryTag::periodic_right) return BoundaryTag::periodic_left;
  return t;
}

void pair_periodic_nodes(Mesh& mesh) {
  std::vector<int> left = mesh.nodes_with_tag(BoundaryTag::periodic_left);
  std::vector<int> right = mesh.nodes_with_tag(BoundaryTag::periodic_right);
  std::map<double, int> right_by_y;
  for (int r : right) right_by_y[mesh.nodes[r].y()] = r;
  std::sort(left.begin(), left.end(), [&](int a, int b) { return mesh.nodes[a].y() < mesh.nodes[b].y(); });
  mesh.periodic_pairs.clear();
  for (int l : left) {
    auto it = right_by_y.find(mesh.nodes[l].y());
    if (it == right_by_y.end()) throw Error("periodic edges are not node-matched");
    mesh.periodic_pairs.emplace_back(l, it->second);
  }
  if (left.size() != right.size()) throw Error("periodic edges are not node-matched");
}

// ---------------------------------------------------------------- geometry
[[noreturn]] void self_intersection(const std::string& why) { throw Error("geometry self-intersection: " + why); }
[[noreturn]] void unresolved(const std::string& why) { throw Error("feature unresolved: " + why); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) self_intersection(std::string(name) + " must be positive");
}

// Waist arc plus flank, from (0, waist/2) rising to Y = top, for X >= 0.
Chain taper_chain(double waist, double curvature, double half_angle, double top, double* x_end) {
  require_positive(waist, "waist");
  require_positive(curvature, "curvature");
  if (!(half_angle > 0.0 && half_angle < pi / 2)) self_intersection("opening angle outside (0, pi/2)");
  if (waist >= 2.0 * curvature) self_intersection("d >= 2r'");
  const Vec c(0.0, waist / 2 + curvature);
  const Vec arc_end(curvature * std::sin(half_angle), waist / 2 + curvature * (1.0 - std::cos(half_angle)));
  if (!(arc_end.y() < top)) self_intersection("waist arc reaches the block height");
  Chain chain{Vec(0.0, waist / 2), {}};
  chain.arc_to(c, curvature, -pi / 2, -pi / 2 + half_angle, arc_end);
  const double xf = arc_end.x() + (top - arc_end.y()) / std::tan(half_angle);
  chain.line_to(Vec(xf, top));
  *x_end = xf;
  return chain;
}

void check_cell(const UnitCellGeometry& g) {
  require_positive(g.lattice, "A");
  require_positive(g.neck, "B");
  require_positive(g.radius, "R");
  if (g.neck >= g.lattice) self_intersection("B >= A");
  if (g.neck / 2 + g.radius >= g.lattice / 2) self_intersection("slot does not fit: B/2 + R >= A/2");
  if (2.0 * g.radius >= g.lattice) self_intersection("2R >= A");
}

// One crystal period of the top boundary, left to right, starting at the
// neck (x0, B/2) and ending at the next neck.
void append_cell(Chain& chain, const UnitCellGeometry& g, double x0) {
  const double A = g.lattice, B = g.neck, R = g.radius;
  const double yc = B / 2 + R;
  chain.arc_to(Vec(x0, yc), R, -pi / 2, 0.0, Vec(x0 + R, yc));
  chain.line_to(Vec(x0 + R, A / 2));
  chain.line_to(Vec(x0 + A - R, A / 2));
  chain.line_to(Vec(x0 + A - R, yc));
  chain.arc_to(Vec(x0 + A, yc), R, pi, 1.5 * pi, Vec(x0 + A, B / 2));
}

// Right half of the cavity's top boundary, from the waist to the outer end.
Chain cavity_half_chain(const CavityGeometry& g, double* x_end) {
  check_cell(g.cell);
  require_positive(g.block_flat, "c");
  require_positive(g.block_height, "e");
  if (g.cells_per_side < 1) self_intersection("need at least one crystal cell per side");
  const double B = g.cell.neck, R = g.cell.radius;
  if (!(g.block_height / 2 > B / 2 + R)) self_intersection("block height e/2 must exceed B/2 + R");
  if (!(g.waist < B)) self_intersection("waist d must be narrower than the crystal neck B");
  double xf = 0.0;
  Chain chain = taper_chain(g.waist, g.curvature, g.half_angle, g.block_height / 2, &xf);
  const double xw = xf + g.block_flat;
  const double xj = xw + R;
  chain.line_to(Vec(xw, g.block_height / 2));
  chain.line_to(Vec(xw, B / 2 + R));
  chain.arc_to(Vec(xj, B / 2 + R), R, pi, 1.5 * pi, Vec(xj, B / 2));
  for (int k = 0; k < g.cells_per_side; ++k) append_cell(chain, g.cell, xj + k * g.cell.lattice);
  *x_end = xj + g.cells_per_side * g.cell.lattice;
  return chain;
}

Chain bridge_half_chain(const BridgeGeometry& g) {
  require_positive(g.length, "length");
  require_positive(g.height, "height");
  double xf = 0.0;
  Chain chain = taper_chain(g.waist, g.curvature, g.half_angle, g.height / 2, &xf);
  if (!(xf < g.length / 2)) self_intersection("flank does not reach the bridge height within its length");
  chain.line_to(Vec(g.length / 2, g.height / 2));
  return chain;
}

// Closed loop of the symmetry-reduced domain, plus what to do afterwards.
struct Fundamental {
  Chain loop;
  std::vector<std::pair<Vec, Vec>> interfaces;
  bool mirror_y = false;
  bool mirror_x = false;
  double mirror_x_at = 0.0;
  BoundaryTag (*x_tag_map)(BoundaryTag) = same_tag;
  Vec hot_spot{0.0, 0.0};
  bool has_hot_spot = false;
};

BoundaryTag bridge_tag_map(BoundaryTag t) { return t == BoundaryTag::load ? BoundaryTag::clamped : t; }

Fundamental fundamental(const GeometryShape& shape) {
  Fundamental f;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RectangleGeometry>) {
          require_positive(g.width, "width");
          require_positive(g.height, "height");
          const BoundaryTag left = g.periodic ? BoundaryTag::periodic_left : g.left;
          const BoundaryTag right = g.periodic ? BoundaryTag::periodic_right : g.right;
          Chain c{Vec(0.0, 0.0), {}};
          c.line_to(Vec(g.width, 0.0), {g.bottom});
          c.line_to(Vec(g.width, g.height), {right});
          c.line_to(Vec(0.0, g.height), {g.top});
          c.line_to(Vec(0.0, 0.0), {left});
          f.loop = c;
          for (double x : g.layer_cuts) {
            if (!(x > 0.0 && x < g.width)) self_intersection("layer cut outside the rectangle");
            f.interfaces.emplace_back(Vec(x, 0.0), Vec(x, g.height));
          }
        } else if constexpr (std::is_same_v<T, WedgeGeometry>) {
          require_positive(g.tip_width, "tip width");
          require_positive(g.length, "length");
          if (!(g.half_angle > 0.0 && g.half_angle < pi / 2)) self_intersection("opening angle outside (0, pi/2)");
          Chain c{Vec(0.0, 0.0), {}};
          c.line_to(Vec(g.length, 0.0), mirror_line);
          c.line_to(Vec(g.length, g.tip_width / 2 + g.length * std::tan(g.half_angle)), {BoundaryTag::clamped});
          c.line_to(Vec(0.0, g.tip_width / 2), {BoundaryTag::free});
          c.line_to(Vec(0.0, 0.0), {BoundaryTag::load});
          f.loop = c;
          f.mirror_y = true;
          f.has_hot_spot = true;
        } else if constexpr (std::is_same_v<T, BridgeGeometry>) {
          Chain half = bridge_half_chain(g);
          Chain c{Vec(0.0, 0.0), {}};
          c.line_to(Vec(g.length / 2, 0.0), mirror_line);
          c.line_to(Vec(g.length / 2, g.height / 2), {BoundaryTag::load});
          c.append(reversed(half));
          c.line_to(Vec(0.0, 0.0), mirror_line);
          f.loop = c;
          f.mirror_y = f.mirror_x = true;
          f.x_tag_map = bridge_tag_map;
          f.has_hot_spot = true;
        } else if constexpr (std::is_same_v<T, UnitCellGeometry>) {
          check_cell(g);
          const double A = g.lattice, B = g.neck, R = g.radius;
          Chain half{Vec(0.0, B / 2), {}};
          half.arc_to(Vec(0.0, B / 2 + R), R, -pi / 2, 0.0, Vec(R, B / 2 + R));
          half.line_to(Vec(R, A / 2));
          half.line_to(Vec(0.5 * A, A / 2));
          Chain c{Vec(0.0, 0.0), {}};
          c.line_to(Vec(0.5 * A, 0.0), mirror_line);
          c.line_to(Vec(0.5 * A, A / 2), mirror_line);
          c.append(reversed(half));
          c.line_to(Vec(0.0, 0.0), {BoundaryTag::periodic_left});
          f.loop = c;
          f.mirror_y = f.mirror_x = true;
          f.mirror_x_at = 0.5 * A;
          f.x_tag_map = swap_periodic;
        } else if constexpr (std::is_same_v<T, CavityGeometry>) {
          double x_end = 0.0;
          Chain half = cavity_half_chain(g, &x_end);
          Chain c{Vec(0.0, 0.0), {}};
          c.line_to(Vec(x_end, 0.0), mirror_line);
          c.line_to(Vec(x_end, g.cell.neck / 2), {g.termination});
          c.append(reversed(half));
          c.line_to(Vec(0.0, 0.0), mirror_line);
          f.loop = c;
          f.mirror_y = f.mirror_x = true;
          f.has_hot_spot = true;
        }
      },
      shape);
  return f;
}

SizeField make_size_field(const GeometrySpec& spec, const Fundamental& f) {
  const double h = spec.h;
  const double h_hot = spec.h / std::max(1.0, spec.refinement);
  const double grading = spec.grading;
  if (!f.has_hot_spot || spec.refinement <= 1.0) {
    return [h](const Vec&) { return h; };
  }
  const Vec hot = f.hot_spot;
  return [=](const Vec& p) { return std::min(h, h_hot + grading * (p - hot).norm()); };
}

void check_resolution(const GeometrySpec& spec, const SizeField& size) {
  if (!(spec.h > 0.0) || !std::isfinite(spec.h)) unresolved("element size must be positive");
  if (spec.refinement < 1.0) unresolved("refinement factor must be >= 1");
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RectangleGeometry>) {
          double smallest = std::min(g.width, g.height);
          std::vector<double> xs{0.0, g.width};
          xs.insert(xs.end(), g.layer_cuts.begin(), g.layer_cuts.end());
          std::sort(xs.begin(), xs.end());
          for (std::size_t i = 1; i < xs.size(); ++i) smallest = std::min(smallest, xs[i] - xs[i - 1]);
          if (spec.h > smallest) unresolved("h exceeds the smallest rectangle dimension");
        } else if constexpr (std::is_same_v<T, WedgeGeometry>) {
          if (size(Vec(0.0, 0.0)) > g.tip_width) unresolved("tip width smaller than the local element size");
        } else if constexpr (std::is_same_v<T, BridgeGeometry>) {
          if (size(Vec(0.0, 0.0)) > g.waist) unresolved("waist smaller than the local element size");
        } else if constexpr (std::is_same_v<T, UnitCellGeometry>) {
          if (spec.h > std::min(g.neck, g.radius)) unresolved("h exceeds the neck width or slot radius");
        } else if constexpr (std::is_same_v<T, CavityGeometry>) {
          if (size(Vec(0.0, 0.0)) > g.waist) unresolved("waist smaller than the local element size");
          if (spec.h > std::min(g.cell.neck, g.cell.radius)) unresolved("h exceeds the neck width or slot radius");
        }
      },
      spec.shape);
}

int copies(const Fundamental& f) { return (f.mirror_x ? 2 : 1) * (f.mirror_y ? 2 : 1); }

// Full closed chain (all mirror images), counter-clockwise.
Chain full_chain(const GeometryShape& shape) {
  return std::visit(
      [&](const auto& g) -> Chain {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RectangleGeometry>) {
          return fundamental(shape).loop;
        } else if constexpr (std::is_same_v<T, WedgeGeometry>) {
          const double y = g.tip_width / 2 + g.length * std::tan(g.half_angle);
          Chain c{Vec(0.0, -g.tip_width / 2), {}};
          c.line_to(Vec(g.length, -y));
          c.line_to(Vec(g.length, y), {BoundaryTag::clamped});
          c.line_to(Vec(0.0, g.tip_width / 2));
          c.line_to(Vec(0.0, -g.tip_width / 2), {BoundaryTag::load});
          return c;
        } else {
          Chain right_half;
          double x_end = 0.0;
          double end_y = 0.0;
          BoundaryTag right_tag = BoundaryTag::free, left_tag = BoundaryTag::free;
          double mirror_at = 0.0;
          if constexpr (std::is_same_v<T, BridgeGeometry>) {
            right_half = bridge_half_chain(g);
            x_end = g.length / 2;
            end_y = g.height / 2;
            right_tag = BoundaryTag::load;
            left_tag = BoundaryTag::clamped;
          } else if constexpr (std::is_same_v<T, UnitCellGeometry>) {
            check_cell(g);
            right_half = Chain{Vec(0.0, g.neck / 2), {}};
            append_cell(right_half, g, 0.0);
            x_end = g.lattice;
            end_y = g.neck / 2;
            right_tag = BoundaryTag::periodic_right;
            left_tag = BoundaryTag::periodic_left;
            mirror_at = 0.5 * g.lattice;
          } else {
            right_half = cavity_half_chain(g, &x_end);
            end_y = g.cell.neck / 2;
            right_tag = left_tag = g.termination;
          }
          // top boundary from left end to right end
          Chain top;
          if constexpr (std::is_same_v<T, UnitCellGeometry>) {
            top = right_half;
          } else {
            top = reversed(mirrored_x(right_half, mirror_at));
            top.append(right_half);
          }
          const double x_start = top.start.x();
          Chain bottom = mirrored_y(top);
          Chain c{bottom.start, {}};
          c.append(bottom);
          c.line_to(Vec(x_end, end_y), {right_tag});
          c.append(reversed(top));
          c.line_to(Vec(x_start, -end_y), {left_tag});
          return c;
        }
      },
      shape);
}

}  // namespace

UnitCellGeometry default_unit_cell() { return {1.925e-6, 0.2e-6, 0.29e-6}; }

CavityLayout cavity_layout(const CavityGeometry& g) {
  CavityLayout layout{};
  cavity_half_chain(g, &layout.end);
  double xf = 0.0;
  taper_chain(g.waist, g.curvature, g.half_angle, g.block_height / 2, &xf);
  layout.taper_end = xf;
  layout.junction = xf + g.block_flat + g.cell.radius;
  return layout;
}

CavityGeometry default_cavity() {
  CavityGeometry g;
  g.waist = 50e-9;
  g.block_flat = 400e-9;
  g.block_height = 960e-9;
  g.curvature = 375e-9;
  g.half_angle = 0.15 * pi;
  g.cell = default_unit_cell();
  return g;
}

double Outline::area() const {
  double a = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto& q = points[(i + 1) % points.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

Outline outline(const GeometrySpec& spec) {
  const Fundamental f = fundamental(spec.shape);
  const SizeField size = make_size_field(spec, f);
  const Loop loop = polygonize(full_chain(spec.shape), size);
  Outline out;
  out.points = loop.points;
  for (const auto& s : loop.segs) out.tags.push_back(s.tag);
  return out;
}

double analytic_area(const GeometryShape& shape) {
  const Fundamental f = fundamental(shape);
  // arcs are exact after the chord correction, so any h works
  const SizeField coarse = [](const Vec&) { return 1.0; };
  return copies(f) * polygonize(f.loop, coarse).exact_area();
}

Mesh generate(const GeometrySpec& spec) {
  const Fundamental f = fundamental(spec.shape);
  const SizeField size = make_size_field(spec, f);
  check_resolution(spec, size);
  const Loop loop = polygonize(f.loop, size);
  if (!(loop.polygon_area() > 0.0)) self_intersection("outline is not counter-clockwise");
  const detail::PlanarGraph graph = to_graph(loop, size, f.interfaces);

  // Rectangles with periodic sides pair their left/right segments directly.
  detail::PlanarGraph g = graph;
  if (const auto* rect = std::get_if<RectangleGeometry>(&spec.shape); rect && rect->periodic) {
    std::vector<int> left, right;
    for (std::size_t i = 0; i < g.segments.size(); ++i) {
      if (g.segments[i].tag == BoundaryTag::periodic_left) left.push_back(static_cast<int>(i));
      if (g.segments[i].tag == BoundaryTag::periodic_right) right.push_back(static_cast<int>(i));
    }
    // right runs upward, left runs downward: pair i-th from the bottom
    std::reverse(left.begin(), left.end());
    if (left.size() != right.size()) throw Error("periodic edges are not node-matched");
    for (std::size_t i = 0; i < left.size(); ++i) {
      g.segments[left[i]].partner = right[i];
      g.segments[right[i]].partner = left[i];
      // identical Y for partner end points
      const auto& sl = g.segments[left[i]];
      const auto& sr = g.segments[right[i]];
      g.points[sl.b].y() = g.points[sr.a].y();
      g.points[sl.a].y() = g.points[sr.b].y();
    }
  }

  Mesh mesh = detail::refine_delaunay(g, size);
  if (f.mirror_y) mesh = mirror_merge(mesh, false, 0.0, same_tag);
  if (f.mirror_x) mesh = mirror_merge(mesh, true, f.mirror_x_at, f.x_tag_map);
  pair_periodic_nodes(mesh);
  mesh.validate();
  return mesh;
}

}  // namespace qad
