#include "causalcat/treks.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace causalcat {

VertexSet Trek::members() const {
  VertexSet out;
  for (Vertex v : vertices) out.insert(v);
  return out;
}

std::string Trek::format(const Dag& dag) const {
  std::string out = dag.name(vertices.front());
  bool before_top = vertices.front() != top;
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    out += before_top ? "<-" : "->";
    out += dag.name(vertices[i]);
    if (vertices[i] == top) before_top = false;
  }
  return out;
}

void require_disjoint(const Dag& dag, VertexSet x, VertexSet y, VertexSet z) {
  if (!dag.vertices().contains(x | y | z)) throw UnknownVertex("vertex set outside the Dag");
  if (x.intersects(y) || x.intersects(z) || y.intersects(z)) {
    throw OverlapError("vertex sets must be pairwise disjoint");
  }
}

namespace {

// Enumerates proper treks avoiding `blocked` (which always contains from ∪ to).
// The callback returns false to stop the enumeration.
class TrekEnumerator {
 public:
  TrekEnumerator(const Dag& dag, VertexSet from, VertexSet to, VertexSet avoid)
      : dag_(dag), from_(from), to_(to), blocked_(from | to | avoid) {}

  void forward(const std::function<bool(Trek)>& emit) {
    for (Vertex i : from_) {
      path_.assign(1, i);
      if (!down(VertexSet::of(i), [&](const std::vector<Vertex>& leg) {
            return emit(Trek{TrekKind::forward, leg, i});
          })) {
        return;
      }
    }
  }

  void backward(const std::function<bool(Trek)>& emit) {
    for (Vertex i : from_) {
      std::vector<Vertex> up_leg{i};
      if (!up(up_leg, emit)) return;
    }
  }

 private:
  // Extends path_ downward; calls `done` with each completed path ending in `to_`.
  bool down(VertexSet on_path, const std::function<bool(const std::vector<Vertex>&)>& done) {
    Vertex tail = path_.back();
    for (Vertex c : dag_.children(tail)) {
      if (on_path.contains(c)) continue;
      if (to_.contains(c)) {
        path_.push_back(c);
        bool go_on = done(path_);
        path_.pop_back();
        if (!go_on) return false;
        continue;
      }
      if (blocked_.contains(c)) continue;
      path_.push_back(c);
      VertexSet next = on_path;
      next.insert(c);
      bool go_on = down(next, done);
      path_.pop_back();
      if (!go_on) return false;
    }
    return true;
  }

  bool up(std::vector<Vertex>& up_leg, const std::function<bool(Trek)>& emit) {
    Vertex tail = up_leg.back();
    for (Vertex p : dag_.parents(tail)) {
      if (to_.contains(p)) {
        std::vector<Vertex> seq = up_leg;
        seq.push_back(p);
        if (!emit(Trek{TrekKind::backward, seq, p})) return false;
        continue;
      }
      if (blocked_.contains(p)) continue;
      up_leg.push_back(p);
      VertexSet on_leg;
      for (Vertex v : up_leg) on_leg.insert(v);
      // p as the top of a fork i <- ... <- p -> ... -> j.
      path_.assign(1, p);
      bool go_on = down(on_leg, [&](const std::vector<Vertex>& leg) {
        std::vector<Vertex> seq = up_leg;
        seq.insert(seq.end(), leg.begin() + 1, leg.end());
        return emit(Trek{TrekKind::backward, seq, p});
      });
      if (go_on) go_on = up(up_leg, emit);
      up_leg.pop_back();
      if (!go_on) return false;
    }
    return true;
  }

  const Dag& dag_;
  VertexSet from_;
  VertexSet to_;
  VertexSet blocked_;
  std::vector<Vertex> path_;
};

// Vertices reached from `sources` in one or more steps along children (or
// parents), continuing only through vertices outside `blocked`.
VertexSet reach_down(const Dag& dag, VertexSet sources, VertexSet blocked) {
  VertexSet reached;
  VertexSet frontier = sources;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex v : frontier) next |= dag.children(v);
    next -= reached;
    reached |= next;
    frontier = next - blocked;
  }
  return reached;
}

VertexSet reach_up(const Dag& dag, VertexSet sources, VertexSet blocked) {
  VertexSet reached;
  VertexSet frontier = sources;
  while (!frontier.empty()) {
    VertexSet next;
    for (Vertex v : frontier) next |= dag.parents(v);
    next -= reached;
    reached |= next;
    frontier = next - blocked;
  }
  return reached;
}

}  // namespace

std::vector<Trek> proper_treks(const Dag& dag, VertexSet from, VertexSet to, TrekKind kind) {
  require_disjoint(dag, from, to, VertexSet{});
  std::vector<Trek> out;
  TrekEnumerator e(dag, from, to, VertexSet{});
  auto collect = [&](Trek t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
    return true;
  };
  if (kind == TrekKind::forward) {
    e.forward(collect);
  } else {
    e.backward(collect);
  }
  return out;
}

std::optional<Trek> unblocked_trek(const Dag& dag, VertexSet x, VertexSet y, VertexSet z, TrekKind kind) {
  require_disjoint(dag, x, y, z);
  std::optional<Trek> found;
  TrekEnumerator e(dag, x, y, z);
  auto first = [&](Trek t) {
    found = std::move(t);
    return false;
  };
  if (kind == TrekKind::forward) {
    e.forward(first);
  } else {
    e.backward(first);
  }
  return found;
}

bool forward_t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z) {
  require_disjoint(dag, x, y, z);
  return !reach_down(dag, x, x | y | z).intersects(y);
}

bool backward_t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z) {
  require_disjoint(dag, x, y, z);
  const VertexSet blocked = x | y | z;
  const VertexSet up = reach_up(dag, x, blocked);
  if (up.intersects(y)) return false;
  // Forks: any free ancestor reached above may serve as the top.
  return !reach_down(dag, up - blocked, blocked).intersects(y);
}

bool t_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z) {
  return forward_t_separated(dag, x, y, z) && backward_t_separated(dag, x, y, z);
}

bool d_separated(const Dag& dag, VertexSet x, VertexSet y, VertexSet z) {
  require_disjoint(dag, x, y, z);
  const VertexSet anc_z = ancestors(dag, z);
  // Traversal states: (vertex, arrived_from_child). Arriving "up" means the
  // ball came from a child and travels against edge direction.
  std::vector<std::uint8_t> seen(dag.size() * 2, 0);
  std::deque<std::pair<Vertex, bool>> queue;
  for (Vertex v : x) queue.emplace_back(v, true);
  VertexSet reached;
  while (!queue.empty()) {
    auto [v, from_child] = queue.front();
    queue.pop_front();
    auto& mark = seen[v.index() * 2 + (from_child ? 1 : 0)];
    if (mark) continue;
    mark = 1;
    const bool observed = z.contains(v);
    if (!observed) reached.insert(v);
    if (from_child) {
      if (!observed) {
        for (Vertex p : dag.parents(v)) queue.emplace_back(p, true);
        for (Vertex c : dag.children(v)) queue.emplace_back(c, false);
      }
    } else {
      if (!observed) {
        for (Vertex c : dag.children(v)) queue.emplace_back(c, false);
      }
      if (anc_z.contains(v)) {
        for (Vertex p : dag.parents(v)) queue.emplace_back(p, true);
      }
    }
  }
  return !reached.intersects(y);
}

}  // namespace causalcat
