#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qad/core.hpp"
#include "qad/mesh.hpp"

namespace qad {

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::free: return "free";
    case BoundaryTag::clamped: return "clamped";
    case BoundaryTag::periodic_left: return "periodic_left";
    case BoundaryTag::periodic_right: return "periodic_right";
    case BoundaryTag::load: return "load";
  }
  return "free";
}

BoundaryTag boundary_tag_from_string(const std::string& name) {
  static const std::map<std::string, BoundaryTag> tags{{"free", BoundaryTag::free},
                                                       {"clamped", BoundaryTag::clamped},
                                                       {"periodic_left", BoundaryTag::periodic_left},
                                                       {"periodic_right", BoundaryTag::periodic_right},
                                                       {"load", BoundaryTag::load}};
  auto it = tags.find(name);
  if (it == tags.end()) throw Error("unknown boundary tag '" + name + "'");
  return it->second;
}

double Mesh::signed_area(std::size_t e) const {
  const auto& t = elements[e];
  const Eigen::Vector2d a = nodes[t[1]] - nodes[t[0]];
  const Eigen::Vector2d b = nodes[t[2]] - nodes[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::area() const {
  double sum = 0.0;
  for (std::size_t e = 0; e < elements.size(); ++e) sum += signed_area(e);
  return sum;
}

Eigen::Vector2d Mesh::centroid(std::size_t e) const {
  const auto& t = elements[e];
  return (nodes[t[0]] + nodes[t[1]] + nodes[t[2]]) / 3.0;
}

std::array<double, 4> Mesh::bounding_box() const {
  std::array<double, 4> box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                            -std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  for (const auto& p : nodes) {
    box[0] = std::min(box[0], p.x());
    box[1] = std::min(box[1], p.y());
    box[2] = std::max(box[2], p.x());
    box[3] = std::max(box[3], p.y());
  }
  return box;
}

double Mesh::diameter() const {
  if (nodes.empty()) return 0.0;
  const auto b = bounding_box();
  return std::hypot(b[2] - b[0], b[3] - b[1]);
}

std::optional<double> Mesh::lattice_constant() const {
  if (periodic_pairs.empty()) return std::nullopt;
  const auto& [l, r] = periodic_pairs.front();
  return nodes[r].x() - nodes[l].x();
}

std::vector<int> Mesh::nodes_with_tag(BoundaryTag tag) const {
  std::set<int> out;
  for (const auto& e : boundary) {
    if (e.tag == tag) {
      out.insert(e.a);
      out.insert(e.b);
    }
  }
  return {out.begin(), out.end()};
}

namespace {
[[noreturn]] void invalid(const std::string& why) { throw Error("invalid mesh: " + why); }

std::uint64_t key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}
}  // namespace

void Mesh::validate() const {
  if (nodes.empty() || elements.empty()) invalid("empty mesh");
  const int n = static_cast<int>(nodes.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (int v : elements[e]) {
      if (v < 0 || v >= n) invalid("element " + std::to_string(e) + " references missing node " + std::to_string(v));
    }
    if (!(signed_area(e) > 0.0)) invalid("element " + std::to_string(e) + " has non-positive signed area");
  }

  // minimum node spacing
  const double tol = 1e-6 * diameter();
  std::vector<int> order(nodes.size());
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return nodes[a].x() < nodes[b].x(); });
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (nodes[order[j]].x() - nodes[order[i]].x() >= tol) break;
      if ((nodes[order[j]] - nodes[order[i]]).norm() < tol) {
        invalid("nodes " + std::to_string(order[i]) + " and " + std::to_string(order[j]) + " coincide");
      }
    }
  }

  // boundary edges are element edges with a single owner, forming closed loops
  std::map<std::uint64_t, int> owners;
  for (const auto& t : elements) {
    for (int i = 0; i < 3; ++i) ++owners[key(t[i], t[(i + 1) % 3])];
  }
  std::map<int, int> degree;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const auto& b = boundary[i];
    if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n) invalid("boundary edge " + std::to_string(i) + " references a missing node");
    auto it = owners.find(key(b.a, b.b));
    if (it == owners.end() || it->second != 1) invalid("boundary edge " + std::to_string(i) + " is not on the mesh boundary");
    ++degree[b.a];
    ++degree[b.b];
  }
  for (const auto& [node, d] : degree) {
    if (d != 2) invalid("boundary edges do not form closed loops at node " + std::to_string(node));
  }

  // periodic pairing
  const auto left = nodes_with_tag(BoundaryTag::periodic_left);
  const auto right = nodes_with_tag(BoundaryTag::periodic_right);
  if (left.empty() && right.empty() && periodic_pairs.empty()) return;
  if (periodic_pairs.size() != left.size() || left.size() != right.size()) {
    invalid("periodic pairs do not cover the periodic edges");
  }
  const double lattice = *lattice_constant();
  std::set<int> seen_left, seen_right;
  for (const auto& [l, r] : periodic_pairs) {
    if (!std::binary_search(left.begin(), left.end(), l) || !std::binary_search(right.begin(), right.end(), r)) {
      invalid("periodic pair (" + std::to_string(l) + ", " + std::to_string(r) + ") is not on the periodic edges");
    }
    if (!seen_left.insert(l).second || !seen_right.insert(r).second) invalid("periodic node paired twice");
    if (std::abs(nodes[l].y() - nodes[r].y()) > 1e-9 || std::abs(nodes[r].x() - nodes[l].x() - lattice) > 1e-9) {
      invalid("periodic pair (" + std::to_string(l) + ", " + std::to_string(r) + ") is not a lattice translate");
    }
  }
}

// ---------------------------------------------------------------- text I/O

namespace {
[[noreturn]] void parse_error(std::size_t line, const std::string& why) {
  throw Error("parse error at line " + std::to_string(line) + ": " + why);
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) parse_error(line, "bad number '" + tok + "'");
  return v;
}

int parse_index(const std::string& tok, std::size_t line) {
  int v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v < 0) parse_error(line, "bad index '" + tok + "'");
  return v;
}
}  // namespace

std::string to_text(const Mesh& mesh, const std::string& header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) {
    std::istringstream lines(header_comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << '\n';
  }
  for (const auto& p : mesh.nodes) out << "v " << format_number(p.x()) << ' ' << format_number(p.y()) << '\n';
  for (const auto& t : mesh.elements) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& b : mesh.boundary) out << "b " << b.a << ' ' << b.b << ' ' << to_string(b.tag) << '\n';
  for (const auto& [l, r] : mesh.periodic_pairs) out << "p " << l << ' ' << r << '\n';
  return out.str();
}

Mesh from_text(const std::string& text) {
  Mesh mesh;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  int stage = 0;  // v, t, b, p
  bool any = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    any = true;
    const std::string& kind = tok[0];
    const int this_stage = kind == "v" ? 0 : kind == "t" ? 1 : kind == "b" ? 2 : kind == "p" ? 3 : -1;
    if (this_stage < 0) parse_error(line_no, "unknown record '" + kind + "'");
    if (this_stage < stage) parse_error(line_no, "record '" + kind + "' out of order");
    stage = this_stage;
    const std::size_t expected = kind == "v" ? 3 : kind == "t" ? 4 : kind == "b" ? 4 : 3;
    if (tok.size() != expected) parse_error(line_no, "expected " + std::to_string(expected - 1) + " fields");
    if (kind == "v") {
      mesh.nodes.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no));
    } else if (kind == "t") {
      mesh.elements.push_back({parse_index(tok[1], line_no), parse_index(tok[2], line_no), parse_index(tok[3], line_no)});
    } else if (kind == "b") {
      BoundaryTag tag;
      try {
        tag = boundary_tag_from_string(tok[3]);
      } catch (const Error& e) {
        parse_error(line_no, e.what());
      }
      mesh.boundary.push_back({parse_index(tok[1], line_no), parse_index(tok[2], line_no), tag});
    } else {
      mesh.periodic_pairs.emplace_back(parse_index(tok[1], line_no), parse_index(tok[2], line_no));
    }
  }
  if (!any) parse_error(1, "empty mesh file");
  mesh.validate();
  return mesh;
}

void save(const Mesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << to_text(mesh);
}

Mesh load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

}  // namespace qad
