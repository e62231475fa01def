#include "accelbmc/oracle.hpp"

#include "accelbmc/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>
#include <unordered_set>

namespace accelbmc {

StateSpace::StateSpace(std::vector<VarDecl> v) : vars(std::move(v))
{
  for (const auto& d : vars) {
    if (d.width > max_width) {
      throw StateSpaceTooLarge("variable " + d.name + " has width " + std::to_string(d.width) +
                               ", above " + std::to_string(max_width));
    }
    offset.push_back(bits);
    bits += d.width;
    if (bits > max_bits) {
      throw StateSpaceTooLarge("state space exceeds 2^" + std::to_string(max_bits) + " states");
    }
  }
}

std::uint64_t StateSpace::pack(const Env& env) const
{
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto it = env.find(vars[i].name);
    Wide v = it == env.end() ? 0 : it->second & width_mask(vars[i].width);
    s |= static_cast<std::uint64_t>(v) << offset[i];
  }
  return s;
}

Wide StateSpace::get(std::uint64_t s, std::size_t var) const
{
  return (s >> offset[var]) & ((std::uint64_t{1} << vars[var].width) - 1);
}

Env StateSpace::unpack(std::uint64_t s) const
{
  Env env;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    env[vars[i].name] = get(s, i);
  }
  return env;
}

std::vector<std::uint64_t> StateSpace::initial_states() const
{
  std::uint64_t free_mask = 0;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].nondet_init) {
      free_mask |= ((std::uint64_t{1} << vars[i].width) - 1) << offset[i];
    }
  }
  // Enumerate all submasks of free_mask.
  std::vector<std::uint64_t> out;
  std::uint64_t s = 0;
  do {
    out.push_back(s);
    s = (s - free_mask) & free_mask;
  } while (s != 0);
  std::sort(out.begin(), out.end());
  return out;
}

Reachability::Reachability(const Cfa& cfa) : space_(StateSpace::of(cfa))
{
  auto succ = cfa.successors();

  auto expand = [&](int v, std::uint64_t s, auto&& visit) {
    Env env = space_.unpack(s);
    for (int eid : succ[v]) {
      const Edge& e = cfa.edge(eid);
      for (const Env& post : post_states(e.stmt, env)) {
        visit(e, space_.pack(post));
      }
    }
  };

  std::deque<std::pair<int, std::uint64_t>> queue;
  for (std::uint64_t s : space_.initial_states()) {
    dist_[index(cfa.initial(), s)] = 0;
    queue.emplace_back(cfa.initial(), s);
  }
  while (!queue.empty()) {
    auto [v, s] = queue.front();
    queue.pop_front();
    ++count_;
    if (cfa.is_error(v)) {
      error_reachable_ = true;
    }
    const int d = dist_[index(v, s)];
    expand(v, s, [&](const Edge& e, std::uint64_t t) {
      if (dist_.emplace(index(e.dst, t), d + 1).second) {
        queue.emplace_back(e.dst, t);
      }
    });
  }

  // 0-1 BFS for the weighted measure.
  for (std::uint64_t s : space_.initial_states()) {
    wdist_[index(cfa.initial(), s)] = 0;
    queue.emplace_back(cfa.initial(), s);
  }
  std::unordered_set<std::uint64_t> done;
  while (!queue.empty()) {
    auto [v, s] = queue.front();
    queue.pop_front();
    if (!done.insert(index(v, s)).second) {
      continue;
    }
    const int d = wdist_.at(index(v, s));
    expand(v, s, [&](const Edge& e, std::uint64_t t) {
      int w = trace_weight(e.kind);
      auto [it, fresh] = wdist_.emplace(index(e.dst, t), d + w);
      if (fresh || d + w < it->second) {
        it->second = d + w;
        if (w == 0) {
          queue.emplace_front(e.dst, t);
        } else {
          queue.emplace_back(e.dst, t);
        }
      }
    });
  }
}

bool Reachability::reachable(int vertex, std::uint64_t state) const
{
  return dist_.count(index(vertex, state)) != 0;
}

int Reachability::distance(int vertex, std::uint64_t state) const
{
  auto it = dist_.find(index(vertex, state));
  return it == dist_.end() ? unreached : it->second;
}

int Reachability::weighted_distance(int vertex, std::uint64_t state) const
{
  auto it = wdist_.find(index(vertex, state));
  return it == wdist_.end() ? unreached : it->second;
}

std::vector<std::pair<int, std::uint64_t>> Reachability::configs() const
{
  std::vector<std::pair<int, std::uint64_t>> out;
  out.reserve(dist_.size());
  for (auto [key, d] : dist_) {
    out.emplace_back(static_cast<int>(key >> space_.bits), key & (space_.size() - 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::size_t> var_indices(const StateSpace& space, const std::vector<std::string>& names)
{
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    std::size_t i = 0;
    while (i < space.vars.size() && space.vars[i].name != n) {
      ++i;
    }
    if (i == space.vars.size()) {
      throw std::invalid_argument("unknown variable " + n);
    }
    out.push_back(i);
  }
  return out;
}

std::map<ProjectedConfig, Diameter> projected_distances(const Reachability& r, int num_vertices,
                                                        const std::vector<std::string>& vars)
{
  auto idx = var_indices(r.space(), vars);
  std::map<ProjectedConfig, Diameter> best;
  for (auto [v, s] : r.configs()) {
    if (v >= num_vertices) {
      continue;
    }
    std::vector<Wide> vals;
    for (std::size_t i : idx) {
      vals.push_back(r.space().get(s, i));
    }
    Diameter d{r.distance(v, s), r.weighted_distance(v, s)};
    auto [it, fresh] = best.emplace(ProjectedConfig{v, std::move(vals)}, d);
    if (!fresh) {
      it->second.edges = std::min(it->second.edges, d.edges);
      it->second.weighted = std::min(it->second.weighted, d.weighted);
    }
  }
  return best;
}

} // namespace

std::set<ProjectedConfig> project(const Reachability& r, int num_vertices,
                                  const std::vector<std::string>& vars)
{
  std::set<ProjectedConfig> out;
  for (auto& [cfg, d] : projected_distances(r, num_vertices, vars)) {
    out.insert(cfg);
  }
  return out;
}

Diameter exact_diameter(const Reachability& r, int num_vertices,
                        const std::vector<std::string>& vars)
{
  Diameter out;
  for (auto& [cfg, d] : projected_distances(r, num_vertices, vars)) {
    out.edges = std::max(out.edges, d.edges);
    out.weighted = std::max(out.weighted, d.weighted);
  }
  return out;
}

Diameter exact_diameter(const Cfa& cfa)
{
  Reachability r(cfa);
  std::vector<std::string> names;
  for (const auto& d : cfa.vars()) {
    names.push_back(d.name);
  }
  return exact_diameter(r, cfa.num_vertices(), names);
}

std::optional<int> max_unwinding(const Cfa& cfa, int cap)
{
  StateSpace space = StateSpace::of(cfa);
  LoopInfo loops = analyze_loops(cfa);
  const int h = static_cast<int>(loops.heads.size());
  auto succ = cfa.successors();
  using Key = std::tuple<int, std::uint64_t, std::vector<int>>;
  std::set<Key> seen;
  std::deque<Key> queue;
  for (std::uint64_t s : space.initial_states()) {
    Key k{cfa.initial(), s, std::vector<int>(h, 0)};
    seen.insert(k);
    queue.push_back(k);
  }
  int best = 0;
  while (!queue.empty()) {
    auto [v, s, counts] = queue.front();
    queue.pop_front();
    Env env = space.unpack(s);
    for (int eid : succ[v]) {
      const Edge& e = cfa.edge(eid);
      std::vector<int> c = counts;
      for (int hi = 0; hi < h; ++hi) {
        bool in_src = loops.loop_contains(hi, e.src);
        bool in_dst = loops.loop_contains(hi, e.dst);
        if (loops.is_back_edge[eid] && e.dst == loops.heads[hi]) {
          ++c[hi];
        } else if (in_src != in_dst || e.dst == loops.heads[hi]) {
          c[hi] = 0;
        }
      }
      for (const Env& post : post_states(e.stmt, env)) {
        for (int x : c) {
          if (x > cap) {
            return std::nullopt;
          }
          best = std::max(best, x);
        }
        Key k{e.dst, space.pack(post), c};
        if (seen.insert(k).second) {
          queue.push_back(k);
        }
      }
    }
  }
  return best;
}

Relation enum_relation(const std::vector<Stmt>& stmts, const StateSpace& space)
{
  Relation out;
  for (std::uint64_t pre = 0; pre < space.size(); ++pre) {
    std::set<std::uint64_t> cur{pre};
    for (const Stmt& st : stmts) {
      std::set<std::uint64_t> next;
      for (std::uint64_t s : cur) {
        for (const Env& post : post_states(st, space.unpack(s))) {
          next.insert(space.pack(post));
        }
      }
      cur = std::move(next);
    }
    for (std::uint64_t post : cur) {
      out.emplace(pre, post);
    }
  }
  return out;
}

Relation compose(const Relation& a, const Relation& b)
{
  std::map<std::uint64_t, std::vector<std::uint64_t>> from;
  for (auto [p, q] : b) {
    from[p].push_back(q);
  }
  Relation out;
  for (auto [p, q] : a) {
    auto it = from.find(q);
    if (it != from.end()) {
      for (std::uint64_t r : it->second) {
        out.emplace(p, r);
      }
    }
  }
  return out;
}

Relation identity(const StateSpace& space)
{
  Relation out;
  for (std::uint64_t s = 0; s < space.size(); ++s) {
    out.emplace_hint(out.end(), s, s);
  }
  return out;
}

Relation project(const Relation& r, const StateSpace& space, const std::vector<std::size_t>& keep)
{
  auto squash = [&](std::uint64_t s) {
    std::uint64_t out = 0;
    unsigned at = 0;
    for (std::size_t i : keep) {
      out |= static_cast<std::uint64_t>(space.get(s, i)) << at;
      at += space.vars[i].width;
    }
    return out;
  };
  Relation out;
  for (auto [p, q] : r) {
    out.emplace(squash(p), squash(q));
  }
  return out;
}

} // namespace accelbmc
