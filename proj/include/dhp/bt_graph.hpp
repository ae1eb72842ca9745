#pragma once

// Finite balls of the Bruhat-Tits trees: PGL2(F) on homothety classes, PU(C) on
// vertex lattices. Graph export, rooted comparison and the SL2(F) action.

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "hermitian.hpp"
#include "json.hpp"
#include "quaternion.hpp"
#include "report.hpp"

namespace dhp {

inline constexpr int64_t kMaxBallVertices = 200'000;

struct TreeVertex {
  int id = 0;
  std::string type;   // "class", "type0" or "type2"
  std::string basis;  // canonical representative
  int depth = 0;
  bool operator==(const TreeVertex&) const = default;
};

struct TreeEdge {
  int a = 0, b = 0;  // a < b
  std::string witness;
  bool operator==(const TreeEdge&) const = default;
};

/// kind: "pgl2", "unramified" or "ramified".
struct TreeGraph {
  int64_t q = 0;
  std::string kind;
  int radius = 0;
  int root = 0;
  std::vector<TreeVertex> vertices;
  std::vector<TreeEdge> edges;
  bool operator==(const TreeGraph&) const = default;

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& e : edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    return adj;
  }
};

/// Closed-form size of a radius-r ball in the (q+1)-regular tree.
inline int64_t regular_ball_size(int64_t q, int r) {
  int64_t n = 1, shell = q + 1;
  for (int d = 1; d <= r; ++d, shell *= q) n += shell;
  return n;
}

/// Graph plus the lattices behind it; lattices[i] is vertex i, witnesses[j] belongs to edge j.
template <class Elem>
struct LatticeBall {
  TreeGraph graph;
  std::vector<Lattice<Elem>> lattices;
  std::vector<Lattice<Elem>> witnesses;
  std::map<Lattice<Elem>, int> index;

  std::optional<int> find(const Lattice<Elem>& L) const {
    auto it = index.find(L);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

namespace detail {

inline void check_radius(int64_t q, int r) {
  if (r < 0) fail(ErrorCode::ConfigError, "radius must be non-negative");
  if (r > 40 || regular_ball_size(q, r) > kMaxBallVertices)
    fail(ErrorCode::RadiusTooLarge, "ball of radius " + std::to_string(r) + " exceeds " + std::to_string(kMaxBallVertices) + " vertices");
}

/// Breadth-first ball; `nbrs(L)` returns (neighbour, edge witness) pairs.
template <class Elem, class Nbrs, class TypeOf>
LatticeBall<Elem> build_ball(const Lattice<Elem>& center, int r, int64_t q, std::string kind, Nbrs&& nbrs,
                             TypeOf&& type_of) {
  check_radius(q, r);
  std::map<Lattice<Elem>, int> depth{{center, 0}};
  std::map<std::pair<Lattice<Elem>, Lattice<Elem>>, Lattice<Elem>> edges;
  std::vector<Lattice<Elem>> level{center};
  for (int d = 0; d < r; ++d) {
    std::vector<Lattice<Elem>> next;
    for (const auto& L : level)
      for (const auto& [N, w] : nbrs(L)) {
        if (depth.emplace(N, d + 1).second) next.push_back(N);
        edges.emplace(std::minmax(L, N), w);
      }
    level = std::move(next);
  }
  LatticeBall<Elem> out;
  out.graph.q = q;
  out.graph.kind = std::move(kind);
  out.graph.radius = r;
  for (const auto& [L, d] : depth) {
    const int id = static_cast<int>(out.lattices.size());
    out.index.emplace(L, id);
    out.lattices.push_back(L);
    out.graph.vertices.push_back({id, type_of(L), L.to_string(), d});
    if (d == 0) out.graph.root = id;
  }
  for (const auto& [ab, w] : edges) {
    out.graph.edges.push_back({out.index.at(ab.first), out.index.at(ab.second), w.to_string()});
    out.witnesses.push_back(w);
  }
  return out;
}

/// Representative of the homothety class: shift 0 with a primitive Hermite basis.
inline UnrLattice homothety_canonical(const UnrLattice& L) { return L.scaled(L.shift()); }

inline std::vector<std::pair<UnrLattice, UnrLattice>> pgl2_neighbours(const ArithmeticContext& ctx, const UnrLattice& L) {
  std::vector<std::pair<UnrLattice, UnrLattice>> out;
  for (const auto& l : projective_line(*GaloisRing::make(ctx.p, ctx.f, 1))) {
    const auto sub = L.sub_from_line(lift_line_rational(*ctx.OF, l));
    out.emplace_back(homothety_canonical(sub), sub);
  }
  return out;
}

inline std::vector<std::pair<UnrLattice, UnrLattice>> unr_pu_neighbours(const ArithmeticContext& ctx, const UnrLattice& L) {
  const bool t0 = vertex_type(L, build_C_unramified(ctx)) == VertexType::Type0;
  std::vector<std::pair<UnrLattice, UnrLattice>> out;
  for (const auto& N : unramified_neighbours(ctx, L)) out.emplace_back(N, t0 ? L : N);
  return out;
}

inline std::vector<std::pair<RamLattice, RamLattice>> ram_pu_neighbours(const ArithmeticContext& ctx, const RamLattice& L1) {
  std::vector<std::pair<RamLattice, RamLattice>> out;
  for (const auto& L0 : type0_inside(ctx, L1))
    for (const auto& N : type2_containing(ctx, L0))
      if (N != L1) out.emplace_back(N, L0);
  return out;
}

inline UnrLattice unramified_center(const ArithmeticContext& ctx) { return UnrLattice::standard(2, ctx.OE->one()); }

inline RamLattice ramified_center(const ArithmeticContext& ctx) {
  auto c = type2_containing(ctx, RamLattice::standard(2, RamElem::from_base(ctx.OF->one())));
  return *std::min_element(c.begin(), c.end());
}

}  // namespace detail

/// Vertex lattices within tree distance r of a vertex lattice (type-2 only in the ramified case).
inline std::vector<UnrLattice> enumerate_vertex_lattices(const ArithmeticContext& ctx, const UnrLattice& center, int r) {
  if (!ctx.unramified()) fail(ErrorCode::ConfigError, "O_E lattices need the unramified case");
  auto b = detail::build_ball(center, r, ctx.q, "unramified", [&](const UnrLattice& L) { return detail::unr_pu_neighbours(ctx, L); },
                              [](const UnrLattice&) { return std::string(); });
  return b.lattices;
}

inline std::vector<RamLattice> enumerate_vertex_lattices(const ArithmeticContext& ctx, const RamLattice& center, int r) {
  if (ctx.unramified()) fail(ErrorCode::ConfigError, "O_F[Pi] lattices need the ramified case");
  if (vertex_type(center, build_C_ramified(ctx)) != VertexType::Type2) fail(ErrorCode::WrongType, "centre must have type 2");
  auto b = detail::build_ball(center, r, ctx.q, "ramified", [&](const RamLattice& L) { return detail::ram_pu_neighbours(ctx, L); },
                              [](const RamLattice&) { return std::string(); });
  return b.lattices;
}

inline LatticeBall<GRElem> build_pgl2_ball(const ArithmeticContext& ctx, int r) {
  return detail::build_ball(UnrLattice::standard(2, ctx.OF->one()), r, ctx.q, "pgl2",
                            [&](const UnrLattice& L) { return detail::pgl2_neighbours(ctx, L); },
                            [](const UnrLattice&) { return std::string("class"); });
}

inline LatticeBall<GRElem> build_pu_ball_unramified(const ArithmeticContext& ctx, int r) {
  const auto C = build_C_unramified(ctx);
  return detail::build_ball(detail::unramified_center(ctx), r, ctx.q, "unramified",
                            [&](const UnrLattice& L) { return detail::unr_pu_neighbours(ctx, L); },
                            [&](const UnrLattice& L) { return std::string(to_string(vertex_type(L, C))); });
}

inline LatticeBall<RamElem> build_pu_ball_ramified(const ArithmeticContext& ctx, int r) {
  return detail::build_ball(detail::ramified_center(ctx), r, ctx.q, "ramified",
                            [&](const RamLattice& L) { return detail::ram_pu_neighbours(ctx, L); },
                            [](const RamLattice&) { return std::string("type2"); });
}

inline TreeGraph build_pgl2_tree(const ArithmeticContext& ctx, int r) { return build_pgl2_ball(ctx, r).graph; }

inline TreeGraph build_pu_tree(const ArithmeticContext& ctx, int r) {
  return ctx.unramified() ? build_pu_ball_unramified(ctx, r).graph : build_pu_ball_ramified(ctx, r).graph;
}

// ---------------------------------------------------------------------------
// Adjacency and the group action

/// PGL2 classes: some representatives nested with index one.
inline bool pgl2_adjacent(const UnrLattice& A, const UnrLattice& B) {
  auto nested = [](const UnrLattice& X, const UnrLattice& Y) {
    const int d = X.volume() + 1 - Y.volume();
    if (d % 2 != 0) return false;
    const auto Y2 = Y.scaled(d / 2);
    return X.contains(Y2) && Y2.volume() - X.volume() == 1;
  };
  return nested(A, B) || nested(B, A);
}

/// Unramified: Lambda0 within Lambda1 within pi^{-1} Lambda0 for vertex lattices of types 0 and 2.
inline bool unr_pu_adjacent(const ArithmeticContext& ctx, const UnrLattice& A, const UnrLattice& B) {
  const auto C = build_C_unramified(ctx);
  const auto ta = vertex_type(A, C), tb = vertex_type(B, C);
  if (ta == tb || ta == VertexType::None || tb == VertexType::None) return false;
  const auto& L0 = ta == VertexType::Type0 ? A : B;
  const auto& L1 = ta == VertexType::Type0 ? B : A;
  return L1.contains(L0) && L0.scaled(-1).contains(L1);
}

/// Ramified: distinct type-2 lattices meeting in a type-0 lattice.
inline bool ram_pu_adjacent(const ArithmeticContext& ctx, const RamLattice& A, const RamLattice& B) {
  const auto C = build_C_ramified(ctx);
  if (A == B || vertex_type(A, C) != VertexType::Type2 || vertex_type(B, C) != VertexType::Type2) return false;
  return vertex_type(A.intersect(B), C) == VertexType::Type0;
}

namespace detail {
template <class E>
void require_special_unitary(const ArithmeticContext& ctx, const QuatAlgebra<E>* alg, const MatF& g) {
  if (!su_check(ctx, alg, exceptional_iso(ctx, alg, g))) fail(ErrorCode::NotUnimodular, "g does not land in SU");
}
}  // namespace detail

/// g in SL2(F), checked to give an element of SU through the exceptional isomorphism.
inline void require_su(const ArithmeticContext& ctx, const MatF& g) {
  if (ctx.unramified()) detail::require_special_unitary(ctx, make_quat_algebra_unramified(ctx).get(), g);
  else detail::require_special_unitary(ctx, make_quat_algebra_ramified(ctx).get(), g);
}

namespace detail {
/// A L for integral A, refusing when det(A) and the pivots of L outrun the working precision.
template <class Elem>
Lattice<Elem> checked_image(const Lattice<Elem>& L, const Mat<Elem>& A, int a_shift) {
  const Elem d = A.det();
  int need = d.val();
  for (int a : L.pivots()) need += a;
  if (need >= d.prec()) fail(ErrorCode::PrecisionExhausted, "g has denominators too large for the working precision");
  return L.image(A, a_shift, nullptr);
}
}  // namespace detail

inline UnrLattice act_pgl2(const ArithmeticContext& ctx, const MatF& g, const UnrLattice& L) {
  int s = 0;
  for (const auto& row : g)
    for (const auto& e : row) s = std::max(s, e.shift);
  Mat<GRElem> m(2, 2, ctx.OF->one());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = g[i][j].raised_to(s).x;
  return detail::homothety_canonical(detail::checked_image(L, m, s));
}

inline UnrLattice act_pu(const ArithmeticContext& ctx, const MatF& g, const UnrLattice& L) {
  const auto c = sl2_to_C(ctx, g);
  return detail::checked_image(L, c.unr, c.shift);
}

inline RamLattice act_pu(const ArithmeticContext& ctx, const MatF& g, const RamLattice& L) {
  const auto c = sl2_to_C(ctx, g);
  return detail::checked_image(L, c.ram, c.shift);
}

/// g . v for a vertex of the ball; OutOfBall if the image leaves it.
template <class Elem>
int act(const ArithmeticContext& ctx, const LatticeBall<Elem>& ball, const MatF& g, int v) {
  require_su(ctx, g);
  Lattice<Elem> img;
  if constexpr (std::is_same_v<Elem, GRElem>) {
    img = ball.graph.kind == "pgl2" ? act_pgl2(ctx, g, ball.lattices.at(v)) : act_pu(ctx, g, ball.lattices.at(v));
  } else {
    img = act_pu(ctx, g, ball.lattices.at(v));
  }
  const auto id = ball.find(img);
  if (!id) fail(ErrorCode::OutOfBall, "image " + img.to_string() + " is outside the ball");
  return *id;
}

// ---------------------------------------------------------------------------
// Structure checks

/// Two-colouring of the graph, if it has one.
inline std::optional<std::vector<int>> bipartition(const TreeGraph& t) {
  const auto adj = t.adjacency();
  std::vector<int> colour(t.vertices.size(), -1);
  for (size_t s = 0; s < colour.size(); ++s) {
    if (colour[s] >= 0) continue;
    colour[s] = 0;
    std::queue<int> todo;
    todo.push(static_cast<int>(s));
    while (!todo.empty()) {
      const int v = todo.front();
      todo.pop();
      for (int w : adj[v]) {
        if (colour[w] < 0) {
          colour[w] = 1 - colour[v];
          todo.push(w);
        } else if (colour[w] == colour[v]) {
          return std::nullopt;
        }
      }
    }
  }
  return colour;
}

/// BFS distances from the root (-1 when unreachable).
inline std::vector<int> root_distances(const TreeGraph& t) {
  const auto adj = t.adjacency();
  std::vector<int> dist(t.vertices.size(), -1);
  if (t.vertices.empty()) return dist;
  std::queue<int> todo;
  dist[t.root] = 0;
  todo.push(t.root);
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop();
    for (int w : adj[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        todo.push(w);
      }
  }
  return dist;
}

/// Tree axioms, valences and closed-form size of a ball.
inline std::vector<CheckResult> check_tree_shape(const TreeGraph& t) {
  std::vector<CheckResult> out;
  const auto dist = root_distances(t);
  const bool connected = std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
  const auto nv = static_cast<int64_t>(t.vertices.size()), ne = static_cast<int64_t>(t.edges.size());
  out.push_back(make_check("ball is a tree", "tree.acyclic", connected && ne == nv - 1,
                           "vertices " + std::to_string(nv) + ", edges " + std::to_string(ne) +
                               (connected ? "" : ", disconnected"),
                           std::to_string(nv) + " vertices"));
  const auto adj = t.adjacency();
  CheckTally valence("interior valence q+1", "tree.valence"), depth("depth matches distance", "tree.depth");
  for (const auto& v : t.vertices) {
    if (v.depth < t.radius)
      valence.record(static_cast<int64_t>(adj[v.id].size()) == t.q + 1,
                     "vertex " + std::to_string(v.id) + " has valence " + std::to_string(adj[v.id].size()));
    depth.record(dist[v.id] == v.depth && v.depth <= t.radius, "vertex " + std::to_string(v.id));
  }
  out.push_back(valence.result());
  out.push_back(depth.result());
  const int64_t expect = regular_ball_size(t.q, t.radius);
  out.push_back(make_check("ball size matches closed form", "tree.ball_size", nv == expect,
                           std::to_string(nv) + " != " + std::to_string(expect), std::to_string(expect)));
  if (t.kind == "unramified") {
    const auto bp = bipartition(t);
    bool ok = bp.has_value();
    if (ok)
      for (const auto& e : t.edges) ok = ok && t.vertices[e.a].type != t.vertices[e.b].type;
    out.push_back(make_check("types alternate along edges", "tree.bipartite", ok, "edge joins equal types"));
  }
  return out;
}

/// Re-verify every edge witness with lattice operations.
inline CheckResult check_witnesses(const ArithmeticContext& ctx, const LatticeBall<GRElem>& b) {
  CheckTally tally("edge witnesses verify", "tree.witness");
  for (size_t j = 0; j < b.graph.edges.size(); ++j) {
    const auto& e = b.graph.edges[j];
    const auto &A = b.lattices[e.a], &B = b.lattices[e.b], &W = b.witnesses[j];
    bool ok;
    if (b.graph.kind == "pgl2") {
      auto check = [&](const UnrLattice& X, const UnrLattice& Y) {
        return X.contains(W) && W.volume() - X.volume() == 1 && detail::homothety_canonical(W) == Y;
      };
      ok = check(A, B) || check(B, A);
    } else {
      ok = unr_pu_adjacent(ctx, A, B) && vertex_type(W, build_C_unramified(ctx)) == VertexType::Type0 && (W == A || W == B);
    }
    tally.record(ok, "edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
  }
  return tally.result();
}

inline CheckResult check_witnesses(const ArithmeticContext& ctx, const LatticeBall<RamElem>& b) {
  CheckTally tally("edge witnesses verify", "tree.witness");
  const auto C = build_C_ramified(ctx);
  for (size_t j = 0; j < b.graph.edges.size(); ++j) {
    const auto& e = b.graph.edges[j];
    const auto& W = b.witnesses[j];
    auto over = type2_containing(ctx, W);
    std::sort(over.begin(), over.end());
    const bool ok = vertex_type(W, C) == VertexType::Type0 && W == b.lattices[e.a].intersect(b.lattices[e.b]) &&
                    over == std::vector<RamLattice>{b.lattices[e.a], b.lattices[e.b]};
    tally.record(ok, "edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
  }
  return tally.result();
}

// ---------------------------------------------------------------------------
// Rooted comparison

struct BallComparison {
  bool isomorphic = false;
  std::string failure;
  std::vector<int> map;  // vertex of t1 -> vertex of t2
};

namespace detail {
struct RootedShape {
  std::vector<std::vector<int>> children;
  std::vector<std::string> code;
};

/// Children by BFS from the root and canonical (AHU) codes bottom-up.
inline RootedShape rooted_shape(const TreeGraph& t) {
  RootedShape s;
  const auto adj = t.adjacency();
  const auto dist = root_distances(t);
  const size_t n = t.vertices.size();
  s.children.resize(n);
  s.code.resize(n);
  std::vector<int> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });
  for (size_t v = 0; v < n; ++v)
    for (int w : adj[v])
      if (dist[w] == dist[v] + 1) s.children[v].push_back(w);
  for (int v : order) {
    std::vector<std::string> cs;
    for (int w : s.children[v]) cs.push_back(s.code[w]);
    std::sort(cs.begin(), cs.end());
    std::string c = "(";
    for (const auto& x : cs) c += x;
    s.code[v] = c + ")";
  }
  return s;
}
}  // namespace detail

/// Rooted isomorphism of two balls, types ignored.
inline BallComparison compare_balls(const TreeGraph& t1, const TreeGraph& t2) {
  BallComparison r;
  if (t1.q != t2.q) {
    r.failure = "q differs: " + std::to_string(t1.q) + " vs " + std::to_string(t2.q);
    return r;
  }
  if (t1.radius != t2.radius) {
    r.failure = "radius differs: " + std::to_string(t1.radius) + " vs " + std::to_string(t2.radius);
    return r;
  }
  if (t1.vertices.size() != t2.vertices.size() || t1.edges.size() != t2.edges.size()) {
    r.failure = "sizes differ";
    return r;
  }
  if (t1.vertices.empty()) {
    r.isomorphic = true;
    return r;
  }
  const auto s1 = detail::rooted_shape(t1), s2 = detail::rooted_shape(t2);
  if (s1.code[t1.root] != s2.code[t2.root]) {
    r.failure = "rooted shapes differ";
    return r;
  }
  r.map.assign(t1.vertices.size(), -1);
  std::vector<std::pair<int, int>> todo{{t1.root, t2.root}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    r.map[a] = b;
    auto c1 = s1.children[a], c2 = s2.children[b];
    std::sort(c1.begin(), c1.end(), [&](int x, int y) { return s1.code[x] < s1.code[y]; });
    std::sort(c2.begin(), c2.end(), [&](int x, int y) { return s2.code[x] < s2.code[y]; });
    for (size_t i = 0; i < c1.size(); ++i) todo.emplace_back(c1[i], c2[i]);
  }
  std::set<std::pair<int, int>> e2;
  for (const auto& e : t2.edges) e2.insert(std::minmax(e.a, e.b));
  for (const auto& e : t1.edges) {
    if (r.map[e.a] < 0 || r.map[e.b] < 0 || !e2.count(std::minmax(r.map[e.a], r.map[e.b]))) {
      r.failure = "edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " is not preserved";
      r.map.clear();
      return r;
    }
  }
  r.isomorphic = true;
  return r;
}

// ---------------------------------------------------------------------------
// Export

inline std::string to_json_string(const TreeGraph& t) {
  nlohmann::ordered_json j;
  j["q"] = t.q;
  j["case"] = t.kind;
  j["radius"] = t.radius;
  j["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : t.vertices) {
    nlohmann::ordered_json x;
    x["id"] = v.id;
    x["type"] = v.type;
    x["basis"] = v.basis;
    x["depth"] = v.depth;
    j["vertices"].push_back(x);
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : t.edges) {
    nlohmann::ordered_json x;
    x["a"] = e.a;
    x["b"] = e.b;
    x["witness"] = e.witness;
    j["edges"].push_back(x);
  }
  return j.dump(2) + "\n";
}

/// Inverse of to_json_string; the root is the depth-0 vertex.
inline TreeGraph tree_from_json(const std::string& s) {
  TreeGraph t;
  try {
    const auto j = nlohmann::json::parse(s);
    t.q = j.at("q").get<int64_t>();
    t.kind = j.at("case").get<std::string>();
    t.radius = j.at("radius").get<int>();
    for (const auto& x : j.at("vertices")) {
      t.vertices.push_back({x.at("id").get<int>(), x.at("type").get<std::string>(), x.at("basis").get<std::string>(),
                            x.at("depth").get<int>()});
      if (t.vertices.back().depth == 0) t.root = t.vertices.back().id;
    }
    for (const auto& x : j.at("edges"))
      t.edges.push_back({x.at("a").get<int>(), x.at("b").get<int>(), x.at("witness").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("bad tree json: ") + e.what());
  }
  return t;
}

inline std::string to_dot(const TreeGraph& t) {
  auto quote = [](const std::string& s) {
    std::string r = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') r += '\\';
      r += c;
    }
    return r + "\"";
  };
  auto colour = [](const std::string& type) {
    if (type == "type0") return "lightblue";
    if (type == "type2") return "salmon";
    return "white";
  };
  std::string out = "graph " + quote(t.kind + "_q" + std::to_string(t.q) + "_r" + std::to_string(t.radius)) + " {\n";
  out += "  node [style=filled];\n";
  for (const auto& v : t.vertices)
    out += "  v" + std::to_string(v.id) + " [label=" + quote(v.basis) + ", type=" + quote(v.type) +
           ", depth=" + std::to_string(v.depth) + ", fillcolor=" + colour(v.type) + "];\n";
  for (const auto& e : t.edges)
    out += "  v" + std::to_string(e.a) + " -- v" + std::to_string(e.b) + " [witness=" + quote(e.witness) + "];\n";
  return out + "}\n";
}

}  // namespace dhp
