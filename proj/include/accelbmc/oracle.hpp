#pragma once

#include "accelbmc/cfa.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <unordered_map>

namespace accelbmc {

class StateSpaceTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Concrete states packed into an integer, first variable in the low bits.
struct StateSpace {
  static constexpr unsigned max_width = 6;
  static constexpr unsigned max_bits = 20;

  std::vector<VarDecl> vars;
  std::vector<unsigned> offset;
  unsigned bits = 0;

  /// Throws StateSpaceTooLarge when a variable is wider than max_width or
  /// the product of the domains exceeds 2^max_bits.
  explicit StateSpace(std::vector<VarDecl> vars);
  static StateSpace of(const Cfa& cfa) { return StateSpace(cfa.vars()); }

  std::uint64_t size() const { return std::uint64_t{1} << bits; }
  std::uint64_t pack(const Env& env) const;
  Env unpack(std::uint64_t s) const;
  Wide get(std::uint64_t s, std::size_t var) const;
  /// States for every value of the nondet-initialized variables, others 0.
  std::vector<std::uint64_t> initial_states() const;
};

/// BFS over (vertex, state) pairs with havocs expanded to all values.
class Reachability {
public:
  static constexpr int unreached = -1;

  explicit Reachability(const Cfa& cfa);

  const StateSpace& space() const { return space_; }
  std::size_t num_reachable() const { return count_; }
  bool reachable(int vertex, std::uint64_t state) const;
  bool error_reachable() const { return error_reachable_; }
  /// Fewest edges on a trace reaching the configuration.
  int distance(int vertex, std::uint64_t state) const;
  /// Fewest trace-weighted edges: bookkeeping edges count 0 and an
  /// accelerator path counts 1.
  int weighted_distance(int vertex, std::uint64_t state) const;

  std::vector<std::pair<int, std::uint64_t>> configs() const;

private:
  std::uint64_t index(int vertex, std::uint64_t state) const
  {
    return (static_cast<std::uint64_t>(vertex) << space_.bits) | state;
  }

  StateSpace space_;
  std::unordered_map<std::uint64_t, int> dist_;
  std::unordered_map<std::uint64_t, int> wdist_;
  std::size_t count_ = 0;
  bool error_reachable_ = false;
};

/// A reachable configuration restricted to some vertices and variables.
using ProjectedConfig = std::pair<int, std::vector<Wide>>;

/// Configurations on vertices below `num_vertices`, keeping only `vars`.
std::set<ProjectedConfig> project(const Reachability& r, int num_vertices,
                                  const std::vector<std::string>& vars);

struct Diameter {
  int edges = 0;     // longest shortest trace, counting every edge
  int weighted = 0;  // same, counting trace-weighted edges
};

/// Reachability diameter over the projected configurations: for each one
/// the shortest trace reaching any configuration that projects onto it.
Diameter exact_diameter(const Reachability& r, int num_vertices,
                        const std::vector<std::string>& vars);
Diameter exact_diameter(const Cfa& cfa);

/// Largest number of consecutive traversals of one loop's back edges on
/// any execution, counting per loop head and resetting when the loop is
/// entered afresh. Empty when some execution exceeds `cap`.
std::optional<int> max_unwinding(const Cfa& cfa, int cap = 64);

/// Pairs (pre, post) of packed states over `space` such that executing
/// `stmts` from pre can end in post.
using Relation = std::set<std::pair<std::uint64_t, std::uint64_t>>;
Relation enum_relation(const std::vector<Stmt>& stmts, const StateSpace& space);
Relation compose(const Relation& a, const Relation& b);
Relation identity(const StateSpace& space);
/// Pairs with both states projected onto a subset of the variables of
/// `space` (given by index), repacked densely in that order.
Relation project(const Relation& r, const StateSpace& space, const std::vector<std::size_t>& keep);

} // namespace accelbmc
