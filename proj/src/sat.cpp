#include "accelbmc/sat.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>
#include <sys/wait.h>

namespace accelbmc {

std::string to_dimacs(const Cnf& cnf)
{
  std::ostringstream os;
  for (const auto& c : cnf.comments) {
    os << "c " << c << "\n";
  }
  os << "p cnf " << cnf.num_vars << " " << cnf.clauses.size() << "\n";
  for (const auto& cl : cnf.clauses) {
    for (Lit l : cl) {
      os << l << " ";
    }
    os << "0\n";
  }
  return os.str();
}

Cnf parse_dimacs(const std::string& text)
{
  Cnf cnf;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t expected = 0;
  std::vector<Lit> current;
  while (std::getline(in, line)) {
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) {
      continue;
    }
    if (line[start] == 'c') {
      std::string rest = line.size() > start + 2 ? line.substr(start + 2) : "";
      if (!header) {
        cnf.comments.push_back(rest);
      }
      continue;
    }
    if (line[start] == 'p') {
      std::istringstream hs(line.substr(start));
      std::string p, fmt;
      long nv = -1;
      long nc = -1;
      hs >> p >> fmt >> nv >> nc;
      if (fmt != "cnf" || nv < 0 || nc < 0 || header) {
        throw std::runtime_error("malformed DIMACS header: " + line);
      }
      header = true;
      cnf.num_vars = static_cast<int>(nv);
      expected = static_cast<std::size_t>(nc);
      continue;
    }
    if (!header) {
      throw std::runtime_error("clause before DIMACS header");
    }
    std::istringstream ls(line);
    long lit;
    while (ls >> lit) {
      if (lit == 0) {
        cnf.clauses.push_back(current);
        current.clear();
      } else {
        if (std::labs(lit) > cnf.num_vars) {
          throw std::runtime_error("literal out of range: " + std::to_string(lit));
        }
        current.push_back(static_cast<Lit>(lit));
      }
    }
    if (!ls.eof()) {
      throw std::runtime_error("malformed DIMACS clause line: " + line);
    }
  }
  if (!header) {
    throw std::runtime_error("missing DIMACS header");
  }
  if (!current.empty()) {
    throw std::runtime_error("unterminated DIMACS clause");
  }
  if (cnf.clauses.size() != expected) {
    throw std::runtime_error("DIMACS clause count mismatch");
  }
  return cnf;
}

const char* to_string(SatResult r)
{
  switch (r) {
  case SatResult::Sat: return "SAT";
  case SatResult::Unsat: return "UNSAT";
  case SatResult::Unknown: return "UNKNOWN";
  }
  return "?";
}

namespace {

// Internal literal encoding: 2*v for +v, 2*v+1 for -v.
inline int enc(Lit l) { return l > 0 ? 2 * l : 2 * (-l) + 1; }
inline int var_of(int x) { return x >> 1; }
inline int neg(int x) { return x ^ 1; }
inline bool sign_of(int x) { return (x & 1) != 0; }

constexpr signed char kUndef = -1;

struct Clause {
  std::vector<int> lits;
  bool learnt = false;
  bool deleted = false;
  double activity = 0;
  int lbd = 0;
};

struct Watcher {
  int cref;
  int blocker;
};

} // namespace

struct Solver::Impl {
  SolverOptions opts;
  SolverStats stats;
  bool ok = true;

  std::vector<Clause> clauses;
  std::vector<int> learnts;
  std::vector<std::vector<Watcher>> watches;  // per internal literal

  std::vector<signed char> assign;  // per var: 0 false, 1 true, -1 undef
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<bool> phase;
  std::vector<double> activity;
  std::vector<int> trail;
  std::vector<int> trail_lim;
  std::size_t qhead = 0;
  double var_inc = 1.0;
  double cla_inc = 1.0;

  // Binary max-heap on activity.
  std::vector<int> heap;
  std::vector<int> heap_pos;

  std::vector<bool> seen;
  std::vector<bool> model;
  std::mt19937_64 rng;

  explicit Impl(SolverOptions o) : opts(o), rng(o.seed)
  {
    new_var();  // variable 0 is a placeholder
  }

  int nvars() const { return static_cast<int>(assign.size()) - 1; }

  int new_var()
  {
    int v = static_cast<int>(assign.size());
    assign.push_back(kUndef);
    level.push_back(0);
    reason.push_back(-1);
    phase.push_back(false);
    // Tiny seeded perturbation so that ties between untouched variables
    // are broken deterministically per seed.
    std::uniform_real_distribution<double> jitter(0.0, 1e-6);
    activity.push_back(opts.seed == 0 ? 0.0 : jitter(rng));
    seen.push_back(false);
    watches.emplace_back();
    watches.emplace_back();
    heap_pos.push_back(-1);
    if (v > 0) {
      heap_insert(v);
    }
    return v;
  }

  void ensure_var(int v)
  {
    while (nvars() < v) {
      new_var();
    }
  }

  signed char lit_value(int x) const
  {
    signed char a = assign[var_of(x)];
    if (a == kUndef) {
      return kUndef;
    }
    return static_cast<signed char>(sign_of(x) ? 1 - a : a);
  }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  // Heap helpers.
  bool heap_less(int a, int b) const
  {
    if (activity[a] != activity[b]) {
      return activity[a] > activity[b];
    }
    return a < b;
  }

  void heap_up(int i)
  {
    int v = heap[i];
    while (i > 0) {
      int p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) {
        break;
      }
      heap[i] = heap[p];
      heap_pos[heap[i]] = i;
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }

  void heap_down(int i)
  {
    int v = heap[i];
    int n = static_cast<int>(heap.size());
    for (;;) {
      int c = 2 * i + 1;
      if (c >= n) {
        break;
      }
      if (c + 1 < n && heap_less(heap[c + 1], heap[c])) {
        ++c;
      }
      if (!heap_less(heap[c], v)) {
        break;
      }
      heap[i] = heap[c];
      heap_pos[heap[i]] = i;
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = i;
  }

  void heap_insert(int v)
  {
    if (heap_pos[v] >= 0) {
      return;
    }
    heap.push_back(v);
    heap_pos[v] = static_cast<int>(heap.size()) - 1;
    heap_up(heap_pos[v]);
  }

  int heap_pop()
  {
    int v = heap[0];
    heap_pos[v] = -1;
    int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return v;
  }

  void bump_var(int v)
  {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (double& a : activity) {
        a *= 1e-100;
      }
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) {
      heap_up(heap_pos[v]);
    }
  }

  void bump_clause(Clause& c)
  {
    c.activity += cla_inc;
    if (c.activity > 1e20) {
      for (int cr : learnts) {
        clauses[cr].activity *= 1e-20;
      }
      cla_inc *= 1e-20;
    }
  }

  void enqueue(int x, int from)
  {
    int v = var_of(x);
    assign[v] = sign_of(x) ? 0 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(x);
  }

  void attach(int cr)
  {
    const Clause& c = clauses[cr];
    watches[neg(c.lits[0])].push_back({cr, c.lits[1]});
    watches[neg(c.lits[1])].push_back({cr, c.lits[0]});
  }

  void add_clause(const std::vector<Lit>& in)
  {
    if (!ok) {
      return;
    }
    std::vector<int> lits;
    for (Lit l : in) {
      if (l == 0) {
        throw std::invalid_argument("literal 0 in clause");
      }
      ensure_var(std::abs(l));
      lits.push_back(enc(l));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<int> kept;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) {
        return;  // tautology
      }
      signed char val = lit_value(lits[i]);
      if (val == 1 && level[var_of(lits[i])] == 0) {
        return;
      }
      if (val == 0 && level[var_of(lits[i])] == 0) {
        continue;
      }
      kept.push_back(lits[i]);
    }
    if (kept.empty()) {
      ok = false;
      return;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], -1);
      if (propagate() >= 0) {
        ok = false;
      }
      return;
    }
    Clause c;
    c.lits = std::move(kept);
    clauses.push_back(std::move(c));
    attach(static_cast<int>(clauses.size()) - 1);
  }

  // Returns the conflicting clause, or -1.
  int propagate()
  {
    int conflict = -1;
    while (qhead < trail.size()) {
      int p = trail[qhead++];  // p became true; visit clauses watching ¬p
      ++stats.propagations;
      auto& ws = watches[p];
      std::size_t i = 0;
      std::size_t j = 0;
      const int false_lit = neg(p);
      while (i < ws.size()) {
        Watcher w = ws[i];
        if (lit_value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        Clause& c = clauses[w.cref];
        if (c.deleted) {
          ++i;
          continue;
        }
        if (c.lits[0] == false_lit) {
          std::swap(c.lits[0], c.lits[1]);
        }
        ++i;
        int first = c.lits[0];
        if (first != w.blocker && lit_value(first) == 1) {
          ws[j++] = {w.cref, first};
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.lits.size(); ++k) {
          if (lit_value(c.lits[k]) != 0) {
            std::swap(c.lits[1], c.lits[k]);
            watches[neg(c.lits[1])].push_back({w.cref, first});
            moved = true;
            break;
          }
        }
        if (moved) {
          continue;
        }
        ws[j++] = {w.cref, first};
        if (lit_value(first) == 0) {
          conflict = w.cref;
          qhead = trail.size();
          while (i < ws.size()) {
            ws[j++] = ws[i++];
          }
        } else {
          enqueue(first, w.cref);
        }
      }
      ws.resize(j);
      if (conflict >= 0) {
        break;
      }
    }
    return conflict;
  }

  void cancel_until(int lvl)
  {
    if (decision_level() <= lvl) {
      return;
    }
    for (std::size_t k = trail.size(); k-- > static_cast<std::size_t>(trail_lim[lvl]);) {
      int v = var_of(trail[k]);
      phase[v] = assign[v] == 1;
      assign[v] = kUndef;
      reason[v] = -1;
      heap_insert(v);
    }
    trail.resize(trail_lim[lvl]);
    trail_lim.resize(lvl);
    qhead = trail.size();
  }

  bool redundant(int x, std::vector<int>& touched)
  {
    // Local minimization: x is implied by other literals of the learned
    // clause (all marked seen) or by level-0 facts.
    int r = reason[var_of(x)];
    if (r < 0) {
      return false;
    }
    for (int y : clauses[r].lits) {
      int v = var_of(y);
      if (v == var_of(x)) {
        continue;
      }
      if (!seen[v] && level[v] > 0) {
        return false;
      }
    }
    (void)touched;
    return true;
  }

  void analyze(int confl, std::vector<int>& out, int& back_level)
  {
    out.clear();
    out.push_back(-1);
    int pending = 0;
    int p = -1;
    std::size_t index = trail.size();
    std::vector<int> touched;
    do {
      Clause& c = clauses[confl];
      if (c.learnt) {
        bump_clause(c);
      }
      for (int q : c.lits) {
        if (p >= 0 && q == p) {
          continue;
        }
        int v = var_of(q);
        if (!seen[v] && level[v] > 0) {
          seen[v] = true;
          touched.push_back(v);
          bump_var(v);
          if (level[v] >= decision_level()) {
            ++pending;
          } else {
            out.push_back(q);
          }
        }
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      confl = reason[var_of(p)];
      seen[var_of(p)] = false;
      --pending;
    } while (pending > 0);
    out[0] = neg(p);

    std::size_t j = 1;
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (!redundant(out[i], touched)) {
        out[j++] = out[i];
      }
    }
    out.resize(j);

    back_level = 0;
    if (out.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t i = 2; i < out.size(); ++i) {
        if (level[var_of(out[i])] > level[var_of(out[max_i])]) {
          max_i = i;
        }
      }
      std::swap(out[1], out[max_i]);
      back_level = level[var_of(out[1])];
    }
    for (int v : touched) {
      seen[v] = false;
    }
  }

  int compute_lbd(const std::vector<int>& lits)
  {
    std::vector<int> lv;
    for (int x : lits) {
      lv.push_back(level[var_of(x)]);
    }
    std::sort(lv.begin(), lv.end());
    return static_cast<int>(std::unique(lv.begin(), lv.end()) - lv.begin());
  }

  bool locked(int cr) const
  {
    const Clause& c = clauses[cr];
    int v = var_of(c.lits[0]);
    return reason[v] == cr && lit_value(c.lits[0]) == 1;
  }

  void reduce_learnts()
  {
    std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
      const Clause& ca = clauses[a];
      const Clause& cb = clauses[b];
      if (ca.lbd != cb.lbd) {
        return ca.lbd > cb.lbd;
      }
      return ca.activity < cb.activity;
    });
    std::size_t half = learnts.size() / 2;
    std::vector<int> kept;
    for (std::size_t i = 0; i < learnts.size(); ++i) {
      int cr = learnts[i];
      Clause& c = clauses[cr];
      if (i < half && c.lbd > 2 && c.lits.size() > 2 && !locked(cr)) {
        c.deleted = true;
        c.lits.shrink_to_fit();
        ++stats.deleted;
      } else {
        kept.push_back(cr);
      }
    }
    learnts = std::move(kept);
    for (auto& ws : watches) {
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return clauses[w.cref].deleted; }),
               ws.end());
    }
  }

  int pick_branch()
  {
    while (!heap.empty()) {
      int v = heap_pop();
      if (assign[v] == kUndef) {
        return phase[v] ? 2 * v : 2 * v + 1;
      }
    }
    return -1;
  }

  bool out_of_resources(bool check_clock = false) const
  {
    if (opts.conflict_budget >= 0 &&
        stats.conflicts >= static_cast<std::uint64_t>(opts.conflict_budget)) {
      return true;
    }
    if (opts.deadline && (check_clock || (stats.conflicts & 63) == 0) &&
        std::chrono::steady_clock::now() > *opts.deadline) {
      return true;
    }
    return false;
  }

  SatResult search(const std::vector<int>& assumps, std::uint64_t conflict_limit,
                   double& max_learnts)
  {
    std::uint64_t local = 0;
    std::vector<int> learnt;
    for (;;) {
      int confl = propagate();
      if (confl >= 0) {
        ++stats.conflicts;
        ++local;
        if (decision_level() == 0) {
          ok = false;
          return SatResult::Unsat;
        }
        int back_level = 0;
        analyze(confl, learnt, back_level);
        cancel_until(back_level);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          Clause c;
          c.lits = learnt;
          c.learnt = true;
          c.lbd = compute_lbd(learnt);
          clauses.push_back(std::move(c));
          int cr = static_cast<int>(clauses.size()) - 1;
          attach(cr);
          learnts.push_back(cr);
          bump_clause(clauses[cr]);
          enqueue(learnt[0], cr);
          ++stats.learned;
        }
        var_inc /= 0.95;
        cla_inc /= 0.999;
        if (out_of_resources()) {
          return SatResult::Unknown;
        }
        continue;
      }
      if (local >= conflict_limit) {
        cancel_until(0);
        ++stats.restarts;
        return SatResult::Unknown;
      }
      if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= max_learnts) {
        reduce_learnts();
        max_learnts *= 1.1;
      }
      int next = -1;
      while (decision_level() < static_cast<int>(assumps.size())) {
        int a = assumps[decision_level()];
        signed char val = lit_value(a);
        if (val == 1) {
          trail_lim.push_back(static_cast<int>(trail.size()));
        } else if (val == 0) {
          return SatResult::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next < 0) {
        next = pick_branch();
        if (next < 0) {
          return SatResult::Sat;
        }
        ++stats.decisions;
      }
      trail_lim.push_back(static_cast<int>(trail.size()));
      enqueue(next, -1);
    }
  }

  SatResult solve(const std::vector<Lit>& assumptions)
  {
    model.clear();
    if (!ok) {
      return SatResult::Unsat;
    }
    std::vector<int> assumps;
    for (Lit l : assumptions) {
      ensure_var(std::abs(l));
      assumps.push_back(enc(l));
    }
    if (propagate() >= 0) {
      ok = false;
      return SatResult::Unsat;
    }
    double max_learnts = std::max(1000.0, static_cast<double>(clauses.size()) / 3.0);
    double restart_limit = 100;
    SatResult result = SatResult::Unknown;
    for (;;) {
      result = search(assumps, static_cast<std::uint64_t>(restart_limit), max_learnts);
      if (result != SatResult::Unknown) {
        break;
      }
      if (out_of_resources(true)) {
        break;
      }
      restart_limit *= 1.5;
    }
    if (result == SatResult::Sat) {
      model.assign(assign.size(), false);
      for (int v = 1; v <= nvars(); ++v) {
        model[v] = assign[v] == 1;
      }
      verify_model();
    }
    cancel_until(0);
    return result;
  }

  void verify_model() const
  {
    for (const auto& c : clauses) {
      if (c.learnt || c.deleted) {
        continue;
      }
      bool sat = false;
      for (int x : c.lits) {
        if (model[var_of(x)] != sign_of(x)) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        throw std::logic_error("solver produced a model violating a clause");
      }
    }
  }
};

Solver::Solver(SolverOptions opts) : impl_(new Impl(opts)) {}

Solver::~Solver() { delete impl_; }

int Solver::new_var() { return impl_->new_var(); }

int Solver::num_vars() const { return impl_->nvars(); }

void Solver::add_clause(const std::vector<Lit>& clause) { impl_->add_clause(clause); }

void Solver::add_cnf(const Cnf& cnf)
{
  impl_->ensure_var(cnf.num_vars);
  for (const auto& c : cnf.clauses) {
    impl_->add_clause(c);
  }
}

SatResult Solver::solve(const std::vector<Lit>& assumptions) { return impl_->solve(assumptions); }

bool Solver::value(int var) const
{
  if (var <= 0 || static_cast<std::size_t>(var) >= impl_->model.size()) {
    return false;
  }
  return impl_->model[var];
}

std::vector<bool> Solver::model() const { return impl_->model; }

const SolverStats& Solver::stats() const { return impl_->stats; }

SatResult solve_external(const Cnf& cnf, const std::string& cmd, std::vector<bool>* model)
{
  char path[] = "/tmp/accelbmc-XXXXXX";
  int fd = mkstemp(path);
  if (fd < 0) {
    throw std::runtime_error("cannot create temporary CNF file");
  }
  close(fd);
  {
    std::ofstream out(path);
    out << to_dimacs(cnf);
  }
  std::string full = cmd + " " + path;
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) {
    std::remove(path);
    throw std::runtime_error("cannot run external solver: " + cmd);
  }
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
    output.append(buf, n);
  }
  int status = pclose(pipe);
  std::remove(path);

  SatResult result = SatResult::Unknown;
  bool have_status = false;
  std::vector<bool> values(static_cast<std::size_t>(cnf.num_vars) + 1, false);
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      have_status = true;
      if (line.find("UNSATISFIABLE") != std::string::npos) {
        result = SatResult::Unsat;
      } else if (line.find("SATISFIABLE") != std::string::npos) {
        result = SatResult::Sat;
      }
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream vs(line.substr(2));
      long lit;
      while (vs >> lit) {
        if (lit > 0 && lit <= cnf.num_vars) {
          values[static_cast<std::size_t>(lit)] = true;
        }
      }
    }
  }
  if (!have_status && WIFEXITED(status)) {
    int code = WEXITSTATUS(status);
    if (code == 10) {
      result = SatResult::Sat;
    } else if (code == 20) {
      result = SatResult::Unsat;
    }
  }
  if (result == SatResult::Sat) {
    for (const auto& c : cnf.clauses) {
      bool sat = false;
      for (Lit l : c) {
        if (values[static_cast<std::size_t>(std::abs(l))] == (l > 0)) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        throw std::runtime_error("external solver returned an invalid model");
      }
    }
    if (model != nullptr) {
      *model = std::move(values);
    }
  }
  return result;
}

} // namespace accelbmc
