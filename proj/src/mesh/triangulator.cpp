#include "triangulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "qad/core.hpp"

namespace qad::detail {

namespace {

using Vec = Eigen::Vector2d;

double orient(const Vec& a, const Vec& b, const Vec& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle abc.
double incircle(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Vec circumcenter(const Vec& a, const Vec& b, const Vec& c) {
  const Vec ba = b - a;
  const Vec ca = c - a;
  const double d = 2.0 * (ba.x() * ca.y() - ba.y() * ca.x());
  const double b2 = ba.squaredNorm();
  const double c2 = ca.squaredNorm();
  return a + Vec((ca.y() * b2 - ba.y() * c2) / d, (ba.x() * c2 - ca.x() * b2) / d);
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct Tri {
  std::array<int, 3> v{};
  std::array<int, 3> n{-1, -1, -1};  // n[i] lies across edge (v[i+1], v[i+2])
  bool alive = true;
  bool interior = false;
};

struct SubSeg {
  int a;
  int b;
  BoundaryTag tag;
  bool boundary;
  int partner;
  bool alive = true;
};

struct BoundaryEdgeOfCavity {
  int a;
  int b;
  int outer;
  bool interior;
};

class Refiner {
 public:
  Refiner(const PlanarGraph& graph, const SizeField& size, const RefineOptions& options)
      : graph_(graph), size_(size), options_(options) {}

  Mesh run() {
    build_super_triangle();
    for (std::size_t i = 0; i < graph_.points.size(); ++i) {
      insert_free(graph_.points[i]);
    }
    recover_segments();
    flood_interior();
    split_encroached_all();
    refine_triangles();
    return extract();
  }

 private:
  const PlanarGraph& graph_;
  const SizeField& size_;
  RefineOptions options_;

  std::vector<Vec> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_tris_;
  std::vector<SubSeg> segs_;
  std::unordered_map<std::uint64_t, int> seg_of_edge_;
  int last_tri_ = 0;
  int super_[3] = {0, 1, 2};
  std::vector<char> in_cavity_;
  std::deque<int> new_tris_;
  bool collect_new_ = false;

  // ---------------------------------------------------------------- basics
  void build_super_triangle() {
    double xmin = std::numeric_limits<double>::max(), ymin = xmin;
    double xmax = -xmin, ymax = -xmin;
    for (const auto& p : graph_.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
    const Vec c(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
    const double r = std::max(xmax - xmin, ymax - ymin) * 20.0 + 1e-30;
    pts_.push_back(c + Vec(-r, -r));
    pts_.push_back(c + Vec(r, -r));
    pts_.push_back(c + Vec(0.0, r));
    Tri t;
    t.v = {0, 1, 2};
    tris_.push_back(t);
  }

  int edge_index(const Tri& t, int a, int b) const {
    for (int i = 0; i < 3; ++i) {
      const int p = t.v[(i + 1) % 3], q = t.v[(i + 2) % 3];
      if ((p == a && q == b) || (p == b && q == a)) return i;
    }
    return -1;
  }

  bool is_constrained(int a, int b) const { return seg_of_edge_.count(edge_key(a, b)) != 0; }

  int find_any_alive() const {
    if (last_tri_ >= 0 && last_tri_ < static_cast<int>(tris_.size()) && tris_[last_tri_].alive) return last_tri_;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive) return static_cast<int>(i);
    }
    throw Error("triangulation lost all triangles");
  }

  bool contains(const Tri& t, const Vec& p) const {
    for (int i = 0; i < 3; ++i) {
      if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) < 0.0) return false;
    }
    return true;
  }

  int locate(const Vec& p, int start) const {
    int cur = start;
    const std::size_t max_steps = tris_.size() + 16;
    for (std::size_t step = 0; step < max_steps; ++step) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + step) % 3);
        if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) < 0.0) {
          next = t.n[i];
          break;
        }
      }
      if (next < 0) {
        if (contains(t, p)) return cur;
        break;
      }
      cur = next;
    }
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive && contains(tris_[i], p)) return static_cast<int>(i);
    }
    throw Error("point location failed");
  }

  int new_tri(const Tri& t) {
    int id;
    if (!free_tris_.empty()) {
      id = free_tris_.back();
      free_tris_.pop_back();
      tris_[id] = t;
    } else {
      id = static_cast<int>(tris_.size());
      tris_.push_back(t);
    }
    if (collect_new_) new_tris_.push_back(id);
    return id;
  }

  // --------------------------------------------------------- Bowyer-Watson
  // Grows the cavity of p from the seed triangles without crossing
  // constrained edges (other than `split_edge`). Returns false if the cavity
  // cannot be made star-shaped around p.
  bool cavity(const Vec& p, const std::vector<int>& seeds, std::uint64_t split_edge, std::vector<int>& out,
              std::vector<BoundaryEdgeOfCavity>& boundary) {
    if (in_cavity_.size() < tris_.size()) in_cavity_.resize(tris_.size() * 2, 0);
    out.clear();
    for (int s : seeds) {
      if (!in_cavity_[s]) {
        in_cavity_[s] = 1;
        out.push_back(s);
      }
    }
    for (std::size_t qi = 0; qi < out.size(); ++qi) {
      const Tri& t = tris_[out[qi]];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (nb < 0 || in_cavity_[nb]) continue;
        const int a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
        const std::uint64_t key = edge_key(a, b);
        if (key != split_edge && seg_of_edge_.count(key)) continue;
        const Tri& u = tris_[nb];
        if (incircle(pts_[u.v[0]], pts_[u.v[1]], pts_[u.v[2]], p) > 0.0) {
          in_cavity_[nb] = 1;
          out.push_back(nb);
        }
      }
    }
    // Remove triangles that break star-shapedness (round-off near cocircular sets).
    for (int pass = 0; pass < 64; ++pass) {
      bool changed = false;
      boundary.clear();
      for (std::size_t k = 0; k < out.size(); ++k) {
        const int ti = out[k];
        if (ti < 0) continue;
        const Tri& t = tris_[ti];
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb >= 0 && in_cavity_[nb]) continue;
          const int a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
          if (orient(pts_[a], pts_[b], p) <= 0.0) {
            const bool seed = std::find(seeds.begin(), seeds.end(), ti) != seeds.end();
            if (seed) {
              clear_marks(out);
              return false;
            }
            in_cavity_[ti] = 0;
            out[k] = -1;
            changed = true;
            break;
          }
          boundary.push_back({a, b, nb, t.interior});
        }
      }
      if (!changed) {
        out.erase(std::remove(out.begin(), out.end(), -1), out.end());
        return true;
      }
      // a removed triangle may disconnect others; keep only those reachable from seeds
      std::vector<int> kept;
      std::vector<int> stack(seeds.begin(), seeds.end());
      std::vector<char> seen(tris_.size(), 0);
      for (int s : seeds) seen[s] = 1;
      while (!stack.empty()) {
        const int ti = stack.back();
        stack.pop_back();
        kept.push_back(ti);
        const Tri& t = tris_[ti];
        for (int i = 0; i < 3; ++i) {
          const int nb = t.n[i];
          if (nb < 0 || !in_cavity_[nb] || seen[nb]) continue;
          const std::uint64_t key = edge_key(t.v[(i + 1) % 3], t.v[(i + 2) % 3]);
          if (key != split_edge && seg_of_edge_.count(key)) continue;
          seen[nb] = 1;
          stack.push_back(nb);
        }
      }
      for (int ti : out) {
        if (ti >= 0) in_cavity_[ti] = 0;
      }
      std::sort(kept.begin(), kept.end());
      for (int ti : kept) in_cavity_[ti] = 1;
      out = kept;
    }
    clear_marks(out);
    return false;
  }

  void clear_marks(const std::vector<int>& tris) {
    for (int ti : tris) {
      if (ti >= 0) in_cavity_[ti] = 0;
    }
  }

  // Replaces the cavity by a fan around the new vertex.
  int fill_cavity(int vid, const std::vector<int>& cav, const std::vector<BoundaryEdgeOfCavity>& boundary) {
    for (int ti : cav) {
      tris_[ti].alive = false;
      in_cavity_[ti] = 0;
    }
    for (int ti : cav) free_tris_.push_back(ti);
    std::unordered_map<int, int> starts_at;  // boundary edge a -> new tri
    std::unordered_map<int, int> ends_at;
    std::vector<int> created;
    created.reserve(boundary.size());
    for (const auto& e : boundary) {
      Tri t;
      t.v = {e.a, e.b, vid};
      t.n = {-1, -1, e.outer};
      t.interior = e.interior;
      const int id = new_tri(t);
      created.push_back(id);
      starts_at[e.a] = id;
      ends_at[e.b] = id;
      if (e.outer >= 0) {
        Tri& o = tris_[e.outer];
        const int k = edge_index(o, e.a, e.b);
        o.n[k] = id;
      }
    }
    for (std::size_t k = 0; k < created.size(); ++k) {
      Tri& t = tris_[created[k]];
      // edge opposite v[0]=a is (b, vid): shared with the tri starting at b
      t.n[0] = starts_at.at(t.v[1]);
      // edge opposite v[1]=b is (vid, a): shared with the tri ending at a
      t.n[1] = ends_at.at(t.v[0]);
    }
    last_tri_ = created.empty() ? last_tri_ : created.front();
    return vid;
  }

  int add_point(const Vec& p) {
    pts_.push_back(p);
    if (pts_.size() > options_.max_vertices) throw Error("mesh refinement exceeded vertex budget");
    return static_cast<int>(pts_.size()) - 1;
  }

  int insert_free(const Vec& p) {
    const int t = locate(p, find_any_alive());
    std::vector<int> cav;
    std::vector<BoundaryEdgeOfCavity> bnd;
    if (!cavity(p, {t}, 0, cav, bnd)) throw Error("degenerate point insertion");
    return fill_cavity(add_point(p), cav, bnd);
  }

  // Splits the constrained edge of subsegment s at its midpoint.
  int split_segment_once(int s) {
    const SubSeg seg = segs_[s];
    const Vec m = 0.5 * (pts_[seg.a] + pts_[seg.b]);
    const std::uint64_t key = edge_key(seg.a, seg.b);
    std::vector<int> seeds;
    for (const auto& [k, pair] : adjacent_tris(seg.a, seg.b)) {
      (void)k;
      seeds.push_back(pair);
    }
    std::vector<int> cav;
    std::vector<BoundaryEdgeOfCavity> bnd;
    if (!cavity(m, seeds, key, cav, bnd)) throw Error("degenerate segment split");
    const int vid = add_point(m);
    seg_of_edge_.erase(key);
    segs_[s].alive = false;
    const int s1 = static_cast<int>(segs_.size());
    segs_.push_back({seg.a, vid, seg.tag, seg.boundary, -1});
    segs_.push_back({vid, seg.b, seg.tag, seg.boundary, -1});
    seg_of_edge_[edge_key(seg.a, vid)] = s1;
    seg_of_edge_[edge_key(vid, seg.b)] = s1 + 1;
    fill_cavity(vid, cav, bnd);
    return s1;
  }

  // Triangles sharing edge (a, b), found from a's fan.
  std::vector<std::pair<int, int>> adjacent_tris(int a, int b) {
    std::vector<std::pair<int, int>> out;
    // Walk from any triangle containing vertex a: locate with a point nudged
    // towards b, then collect both sides of the edge.
    const Vec pa = pts_[a], pb = pts_[b];
    const Vec probe = pa + 1e-3 * (pb - pa);
    int t = locate(probe, find_any_alive());
    // t contains the probe point, which lies on edge ab; t or its neighbour has the edge
    auto add_if = [&](int ti) {
      if (ti < 0) return;
      const int k = edge_index(tris_[ti], a, b);
      if (k >= 0) {
        if (std::none_of(out.begin(), out.end(), [&](auto& pr) { return pr.second == ti; })) out.push_back({k, ti});
        const int nb = tris_[ti].n[k];
        if (nb >= 0 && std::none_of(out.begin(), out.end(), [&](auto& pr) { return pr.second == nb; })) {
          out.push_back({edge_index(tris_[nb], a, b), nb});
        }
      }
    };
    add_if(t);
    if (out.empty()) {
      for (int i = 0; i < 3; ++i) add_if(tris_[t].n[i]);
    }
    if (out.empty()) {
      for (std::size_t i = 0; i < tris_.size() && out.empty(); ++i) {
        if (tris_[i].alive) add_if(static_cast<int>(i));
      }
    }
    if (out.empty()) throw Error("constrained edge missing from triangulation");
    return out;
  }

  bool edge_exists(int a, int b) {
    const Vec pa = pts_[a], pb = pts_[b];
    const Vec probe = pa + 1e-3 * (pb - pa);
    const int t = locate(probe, find_any_alive());
    if (edge_index(tris_[t], a, b) >= 0) return true;
    for (int i = 0; i < 3; ++i) {
      const int nb = tris_[t].n[i];
      if (nb >= 0 && edge_index(tris_[nb], a, b) >= 0) return true;
    }
    return false;
  }

  // Splits s and its periodic partner in lockstep; returns the new subsegments.
  std::vector<int> split_segment(int s) {
    const int partner = segs_[s].partner;
    const int c1 = split_segment_once(s);
    std::vector<int> out{c1, c1 + 1};
    if (partner >= 0 && segs_[partner].alive) {
      const int c2 = split_segment_once(partner);
      out.push_back(c2);
      out.push_back(c2 + 1);
      pair_children(c1, c2);
    }
    return out;
  }

  void pair_children(int c1, int c2) {
    auto mid_y = [&](int s) { return 0.5 * (pts_[segs_[s].a].y() + pts_[segs_[s].b].y()); };
    for (int i = c1; i < c1 + 2; ++i) {
      for (int j = c2; j < c2 + 2; ++j) {
        if (mid_y(i) == mid_y(j)) {
          segs_[i].partner = j;
          segs_[j].partner = i;
        }
      }
    }
  }

  // ------------------------------------------------------- segment recovery
  void recover_segments() {
    for (const auto& in : graph_.segments) {
      segs_.push_back({in.a + 3, in.b + 3, in.tag, in.boundary, in.partner});
    }
    std::deque<int> queue;
    for (std::size_t i = 0; i < segs_.size(); ++i) queue.push_back(static_cast<int>(i));
    // first register every segment that is already an edge
    std::vector<int> missing;
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      if (!segs_[s].alive) continue;
      const auto& seg = segs_[s];
      if (edge_exists(seg.a, seg.b)) {
        seg_of_edge_[edge_key(seg.a, seg.b)] = s;
        continue;
      }
      const int partner = seg.partner;
      const int c1 = split_unconstrained(s, queue);
      if (partner >= 0 && segs_[partner].alive) {
        const int c2 = split_unconstrained(partner, queue);
        pair_children(c1, c2);
      }
    }
  }

  int split_unconstrained(int s, std::deque<int>& queue) {
    SubSeg seg = segs_[s];
    if (seg_of_edge_.count(edge_key(seg.a, seg.b))) seg_of_edge_.erase(edge_key(seg.a, seg.b));
    segs_[s].alive = false;
    const Vec m = 0.5 * (pts_[seg.a] + pts_[seg.b]);
    const int vid = insert_free(m);
    const int s1 = static_cast<int>(segs_.size());
    segs_.push_back({seg.a, vid, seg.tag, seg.boundary, -1});
    segs_.push_back({vid, seg.b, seg.tag, seg.boundary, -1});
    queue.push_back(s1);
    queue.push_back(s1 + 1);
    return s1;
  }

  void flood_interior() {
    for (auto& t : tris_) t.interior = true;
    std::vector<int> stack;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& t = tris_[i];
      if (!t.alive) continue;
      for (int v : t.v) {
        if (v < 3) {
          stack.push_back(static_cast<int>(i));
          break;
        }
      }
    }
    for (int s : stack) tris_[s].interior = false;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      const Tri& t = tris_[ti];
      for (int i = 0; i < 3; ++i) {
        const int nb = t.n[i];
        if (nb < 0 || !tris_[nb].interior || !tris_[nb].alive) continue;
        if (is_constrained(t.v[(i + 1) % 3], t.v[(i + 2) % 3])) continue;
        tris_[nb].interior = false;
        stack.push_back(nb);
      }
    }
  }

  // ------------------------------------------------------- encroachment
  static bool encroaches(const Vec& p, const Vec& a, const Vec& b) { return (a - p).dot(b - p) < 0.0; }

  bool segment_encroached(int s) {
    const auto& seg = segs_[s];
    for (const auto& [k, ti] : adjacent_tris(seg.a, seg.b)) {
      const Tri& t = tris_[ti];
      if (!t.interior) continue;
      const int apex = t.v[k];
      if (encroaches(pts_[apex], pts_[seg.a], pts_[seg.b])) return true;
    }
    return false;
  }

  void split_encroached(std::deque<int> queue) {
    while (!queue.empty()) {
      const int s = queue.front();
      queue.pop_front();
      if (!segs_[s].alive) continue;
      if (!segment_encroached(s)) continue;
      for (int c : split_segment(s)) queue.push_back(c);
    }
  }

  void split_encroached_all() {
    std::deque<int> queue;
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      if (segs_[i].alive) queue.push_back(static_cast<int>(i));
    }
    split_encroached(std::move(queue));
  }

  // ------------------------------------------------------- quality
  bool is_bad(const Tri& t) const {
    const Vec& a = pts_[t.v[0]];
    const Vec& b = pts_[t.v[1]];
    const Vec& c = pts_[t.v[2]];
    const double ab = (b - a).squaredNorm(), bc = (c - b).squaredNorm(), ca = (a - c).squaredNorm();
    const double shortest2 = std::min({ab, bc, ca});
    const double area2 = orient(a, b, c);
    if (area2 <= 0.0) return false;
    const double r = std::sqrt(ab * bc * ca) / (2.0 * area2);
    const Vec centroid = (a + b + c) / 3.0;
    const double h = size_(centroid);
    if (r > h / std::sqrt(3.0)) return true;
    return r * r > options_.max_radius_edge_ratio * options_.max_radius_edge_ratio * shortest2;
  }

  // Walks the straight line from the centroid of t towards p. Returns the
  // containing triangle, or -(1 + subsegment) if a constrained edge blocks it.
  int walk_to(int t, const Vec& p) const {
    const Tri& t0 = tris_[t];
    const Vec q = (pts_[t0.v[0]] + pts_[t0.v[1]] + pts_[t0.v[2]]) / 3.0;
    int cur = t;
    int came_from = -1;
    for (std::size_t step = 0; step < tris_.size() + 16; ++step) {
      const Tri& tc = tris_[cur];
      int exit = -1;
      for (int i = 0; i < 3; ++i) {
        if (tc.n[i] == came_from && came_from >= 0) continue;
        const Vec& a = pts_[tc.v[(i + 1) % 3]];
        const Vec& b = pts_[tc.v[(i + 2) % 3]];
        if (orient(a, b, p) >= 0.0) continue;
        const double oa = orient(q, p, a), ob = orient(q, p, b);
        if ((oa <= 0.0 && ob >= 0.0) || (oa >= 0.0 && ob <= 0.0)) {
          exit = i;
          break;
        }
      }
      if (exit < 0) {
        if (contains(tc, p)) return cur;
        // fall back to any edge facing p
        for (int i = 0; i < 3; ++i) {
          if (orient(pts_[tc.v[(i + 1) % 3]], pts_[tc.v[(i + 2) % 3]], p) < 0.0) {
            exit = i;
            break;
          }
        }
        if (exit < 0) return cur;
      }
      const int a = tc.v[(exit + 1) % 3], b = tc.v[(exit + 2) % 3];
      auto it = seg_of_edge_.find(edge_key(a, b));
      if (it != seg_of_edge_.end()) return -(1 + it->second);
      if (tc.n[exit] < 0) return -1 - static_cast<int>(segs_.size());
      came_from = cur;
      cur = tc.n[exit];
    }
    return -1 - static_cast<int>(segs_.size());
  }

  void refine_triangles() {
    std::deque<int> queue;
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      if (tris_[i].alive && tris_[i].interior) queue.push_back(static_cast<int>(i));
    }
    collect_new_ = true;
    std::vector<int> cav;
    std::vector<BoundaryEdgeOfCavity> bnd;
    std::size_t guard = 0;
    while (!queue.empty()) {
      if (++guard > 50 * options_.max_vertices) throw Error("mesh refinement did not terminate");
      const int ti = queue.front();
      queue.pop_front();
      if (!tris_[ti].alive || !tris_[ti].interior) continue;
      const Tri t = tris_[ti];
      if (!is_bad(t)) continue;
      const Vec c = circumcenter(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]);
      const int where = walk_to(ti, c);
      if (where < 0) {
        const int s = -where - 1;
        if (s < static_cast<int>(segs_.size()) && segs_[s].alive) {
          split_and_recheck(s, queue);
          queue.push_back(ti);
        }
        continue;
      }
      if (!tris_[where].interior) continue;
      if (!cavity(c, {where}, 0, cav, bnd)) continue;
      std::vector<int> encroached;
      for (const auto& e : bnd) {
        auto it = seg_of_edge_.find(edge_key(e.a, e.b));
        if (it != seg_of_edge_.end() && encroaches(c, pts_[e.a], pts_[e.b])) encroached.push_back(it->second);
      }
      if (!encroached.empty()) {
        clear_marks(cav);
        std::sort(encroached.begin(), encroached.end());
        encroached.erase(std::unique(encroached.begin(), encroached.end()), encroached.end());
        for (int s : encroached) {
          if (segs_[s].alive) split_and_recheck(s, queue);
        }
        queue.push_back(ti);
        continue;
      }
      new_tris_.clear();
      fill_cavity(add_point(c), cav, bnd);
      drain_new(queue);
    }
    collect_new_ = false;
  }

  void split_and_recheck(int s, std::deque<int>& queue) {
    new_tris_.clear();
    std::deque<int> segq;
    for (int c : split_segment(s)) segq.push_back(c);
    drain_new(queue);
    while (!segq.empty()) {
      const int cs = segq.front();
      segq.pop_front();
      if (!segs_[cs].alive || !segment_encroached(cs)) continue;
      new_tris_.clear();
      for (int c : split_segment(cs)) segq.push_back(c);
      drain_new(queue);
    }
  }

  void drain_new(std::deque<int>& queue) {
    for (int id : new_tris_) {
      if (tris_[id].alive && tris_[id].interior) queue.push_back(id);
    }
    new_tris_.clear();
  }

  // ------------------------------------------------------- output
  Mesh extract() const {
    Mesh mesh;
    std::vector<int> remap(pts_.size(), -1);
    auto node = [&](int v) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(pts_[v]);
      }
      return remap[v];
    };
    for (const auto& t : tris_) {
      if (!t.alive || !t.interior) continue;
      mesh.elements.push_back({node(t.v[0]), node(t.v[1]), node(t.v[2])});
    }
    for (const auto& s : segs_) {
      if (!s.alive || !s.boundary) continue;
      if (remap[s.a] < 0 || remap[s.b] < 0) throw Error("boundary segment detached from mesh");
      mesh.boundary.push_back({remap[s.a], remap[s.b], s.tag});
    }
    return mesh;
  }
};

}  // namespace

Mesh refine_delaunay(const PlanarGraph& graph, const SizeField& size, const RefineOptions& options) {
  Refiner refiner(graph, size, options);
  return refiner.run();
}

}  // namespace qad::detail
