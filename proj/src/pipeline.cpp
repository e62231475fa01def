#include "accelbmc/pipeline.hpp"

#include "accelbmc/frontend.hpp"
#include "accelbmc/oracle.hpp"
#include "accelbmc/trace_automata.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace accelbmc {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const char* to_string(Mode m)
{
  switch (m) {
  case Mode::Plain: return "plain";
  case Mode::Accel: return "accel";
  case Mode::AccelTa: return "accel-ta";
  case Mode::Oracle: return "oracle";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s)
{
  if (s == "plain") return Mode::Plain;
  if (s == "accel") return Mode::Accel;
  if (s == "accel-ta" || s == "accel+ta") return Mode::AccelTa;
  if (s == "oracle") return Mode::Oracle;
  return std::nullopt;
}

double Report::size_increase() const
{
  if (edges_instrumented == 0 || edges_accelerated == 0) {
    return 0;
  }
  return 100.0 * (static_cast<double>(edges_instrumented) - static_cast<double>(edges_accelerated)) /
         static_cast<double>(edges_accelerated);
}

int exit_code(const Report& r)
{
  if (!r.verdict) {
    return 3;
  }
  switch (*r.verdict) {
  case VerdictKind::Safe: return 0;
  case VerdictKind::Unsafe: return 1;
  case VerdictKind::Unknown: return 2;
  case VerdictKind::Timeout: return 4;
  }
  return 3;
}

namespace {

double seconds_since(Clock::time_point t)
{
  return std::chrono::duration<double>(Clock::now() - t).count();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot write " + path);
  }
  f << text;
}

std::string edge_text(const Edge& e)
{
  return std::to_string(e.src) + " -> " + std::to_string(e.dst) + "  " + to_string(e.stmt);
}

std::string wide_text(Wide v)
{
  return std::to_string(static_cast<std::uint64_t>(v));
}

// Renders a replayed counterexample. Bookkeeping edges of the automaton are
// left out of the text but kept in the JSON.
void describe_cex(const Cfa& cfa, const Counterexample& cex, const std::vector<std::string>& shown,
                  Report& r)
{
  std::ostringstream init;
  init << "initial:";
  nlohmann::json ji = nlohmann::json::object();
  for (const auto& d : cfa.vars()) {
    if (d.nondet_init) {
      Wide v = cex.initial.count(d.name) ? cex.initial.at(d.name) : 0;
      init << " " << d.name << "=" << wide_text(v);
      ji[d.name] = static_cast<std::uint64_t>(v);
    }
  }
  r.trace.push_back(init.str());
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t k = 0; k < cex.edges.size(); ++k) {
    const Edge& e = cfa.edge(cex.edges[k]);
    const Env& st = cex.states[k];
    nlohmann::json js = {{"edge", e.id}, {"src", e.src}, {"dst", e.dst},
                         {"stmt", to_string(e.stmt)}, {"kind", to_string(e.kind)}};
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& name : shown) {
      vals[name] = static_cast<std::uint64_t>(st.at(name));
    }
    if (e.stmt.kind == StmtKind::Havoc) {
      vals[e.stmt.var()] = static_cast<std::uint64_t>(st.at(e.stmt.var()));
    }
    js["state"] = vals;
    steps.push_back(js);
    if (e.kind == EdgeKind::Guard || e.kind == EdgeKind::Update) {
      continue;
    }
    std::ostringstream line;
    line << "  " << edge_text(e);
    if (e.stmt.kind == StmtKind::Havoc) {
      line << "   [" << e.stmt.var() << "=" << wide_text(st.at(e.stmt.var())) << "]";
    }
    r.trace.push_back(line.str());
  }
  std::vector<std::uint64_t> hv;
  for (Wide h : cex.havocs) {
    hv.push_back(static_cast<std::uint64_t>(h));
  }
  r.counterexample = {{"initial", ji}, {"havocs", hv}, {"steps", steps}};
}

} // namespace

Report run(const RunConfig& cfg, const std::string& path)
{
  Report r;
  r.file = path;
  r.mode = cfg.mode;
  const auto start = Clock::now();
  try {
    if (cfg.effective_unwind() < 0 || (cfg.kmax && *cfg.kmax < 1)) {
      throw std::invalid_argument("unwind must be >= 0 and kmax >= 1");
    }
    Program prog = parse(read_source(path), cfg.width);
    Cfa p = lower(prog, &r.warnings);
    r.edges_original = p.edges().size();
    std::vector<std::string> shown;
    for (const auto& d : p.vars()) {
      shown.push_back(d.name);
    }

    if (cfg.mode == Mode::Oracle) {
      if (!cfg.dump_cfa.empty()) {
        write_file(cfg.dump_cfa, dump_dot(p));
      }
      auto t = Clock::now();
      Reachability reach(p);
      Diameter d = exact_diameter(reach, p.num_vertices(), shown);
      r.oracle = OracleSummary{reach.num_reachable(), d.edges, d.weighted, reach.error_reachable()};
      r.verdict = reach.error_reachable() ? VerdictKind::Unsafe : VerdictKind::Safe;
      r.check_time = seconds_since(t);
      return r;
    }

    const Cfa* target = &p;
    AcceleratedCfa acc;
    InstrumentedCfa inst;
    if (cfg.mode != Mode::Plain) {
      auto t = Clock::now();
      acc = accelerate_cfa(p, cfg.max_loop_paths);
      r.accelerators = static_cast<int>(acc.accels.size());
      r.notes = acc.report;
      r.warnings.insert(r.warnings.end(), acc.warnings.begin(), acc.warnings.end());
      r.edges_accelerated = acc.cfa.edges().size();
      target = &acc.cfa;
      if (cfg.mode == Mode::AccelTa) {
        Dfa dfa = determinize(build_restriction_nfa(acc));
        inst = inline_automaton(acc, dfa);
        r.dfa_states = dfa.num_states();
        r.edges_instrumented = inst.cfa.edges().size();
        target = &inst.cfa;
        if (!cfg.dump_ta.empty()) {
          std::vector<std::string> names;
          for (int s = 0; s < inst.alphabet.size(); ++s) {
            names.push_back(inst.alphabet.name(acc, s));
          }
          write_file(cfg.dump_ta, dump_dot(dfa, names));
        }
      }
      r.accel_time = seconds_since(t);
    }
    if (!cfg.dump_cfa.empty()) {
      write_file(cfg.dump_cfa, dump_dot(*target));
    }

    BmcOptions opts;
    opts.solver.seed = cfg.seed;
    if (cfg.timeout > 0) {
      opts.solver.deadline =
          start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout));
    }
    opts.external_solver = cfg.external_solver;
    opts.dimacs_path = cfg.dimacs;

    auto t = Clock::now();
    Verdict v;
    if (cfg.kmax) {
      v = find_proof_bound(*target, *cfg.kmax, opts).verdict;
    } else {
      v = check_safety(*target, cfg.effective_unwind(), opts);
    }
    r.check_time = seconds_since(t);
    r.verdict = v.kind;
    r.bound = v.bound;
    r.cnf_vars = v.cnf_vars;
    r.cnf_clauses = v.cnf_clauses;
    for (int e : v.live_back_edges) {
      r.live_back_edges.push_back(edge_text(target->edge(e)));
    }
    if (v.cex) {
      describe_cex(*target, *v.cex, shown, r);
    }
  } catch (const std::exception& e) {
    r.verdict.reset();
    r.error = e.what();
  }
  return r;
}

nlohmann::json to_json(const Report& r)
{
  nlohmann::json j;
  j["file"] = r.file;
  j["mode"] = to_string(r.mode);
  j["verdict"] = r.verdict ? nlohmann::json(to_string(*r.verdict)) : nlohmann::json("ERROR");
  j["exit_code"] = exit_code(r);
  j["error"] = r.error.empty() ? nlohmann::json() : nlohmann::json(r.error);
  j["bound"] = r.bound;
  j["accel_time_s"] = r.accel_time;
  j["check_time_s"] = r.check_time;
  j["edges"] = {{"original", r.edges_original},
                {"accelerated", r.edges_accelerated},
                {"instrumented", r.edges_instrumented}};
  j["size_increase_pct"] = r.size_increase();
  j["accelerators"] = r.accelerators;
  j["dfa_states"] = r.dfa_states;
  j["cnf"] = {{"vars", r.cnf_vars}, {"clauses", r.cnf_clauses}};
  j["live_back_edges"] = r.live_back_edges;
  j["notes"] = r.notes;
  j["warnings"] = r.warnings;
  j["counterexample"] = r.counterexample;
  if (r.oracle) {
    j["oracle"] = {{"reachable", r.oracle->reachable},
                   {"diameter_edges", r.oracle->diameter_edges},
                   {"diameter_weighted", r.oracle->diameter_weighted},
                   {"error_reachable", r.oracle->error_reachable}};
  } else {
    j["oracle"] = nullptr;
  }
  return j;
}

std::string to_text(const Report& r)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << r.file << ": ";
  if (!r.verdict) {
    os << "ERROR " << r.error << "\n";
    return os.str();
  }
  os << to_string(*r.verdict);
  if (r.mode != Mode::Oracle) {
    os << " (" << to_string(r.mode) << ", bound " << r.bound << ")";
  }
  os << "\n";
  for (const auto& w : r.warnings) {
    os << "  warning: " << w << "\n";
  }
  if (r.oracle) {
    os << "  reachable configurations: " << r.oracle->reachable << "\n"
       << "  diameter: " << r.oracle->diameter_edges << " edges, " << r.oracle->diameter_weighted
       << " weighted\n"
       << "  error reachable: " << (r.oracle->error_reachable ? "yes" : "no") << "\n"
       << "  time: " << r.check_time << " s\n";
    return os.str();
  }
  for (const auto& n : r.notes) {
    os << "  " << n << "\n";
  }
  os << "  edges: " << r.edges_original;
  if (r.mode != Mode::Plain) {
    os << " -> " << r.edges_accelerated;
  }
  if (r.mode == Mode::AccelTa) {
    os << " -> " << r.edges_instrumented << " (" << std::setprecision(1) << r.size_increase()
       << "% increase, " << r.dfa_states << " automaton states)" << std::setprecision(3);
  }
  os << "\n";
  os << "  acceleration time: " << r.accel_time << " s, checking time: " << r.check_time << " s\n";
  os << "  cnf: " << r.cnf_vars << " vars, " << r.cnf_clauses << " clauses\n";
  for (const auto& e : r.live_back_edges) {
    os << "  not exhausted: " << e << "\n";
  }
  if (!r.trace.empty()) {
    os << "  counterexample:\n";
    for (const auto& line : r.trace) {
      os << "  " << line << "\n";
    }
  }
  return os.str();
}

std::optional<Expectation> read_expectation(const std::string& path)
{
  std::ifstream f(path);
  std::string line;
  while (std::getline(f, line)) {
    auto at = line.find("EXPECT:");
    if (line.rfind("//", 0) != 0) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      break;
    }
    if (at == std::string::npos) {
      continue;
    }
    std::string word;
    std::istringstream(line.substr(at + 7)) >> word;
    if (word == "safe") return Expectation::Safe;
    if (word == "unsafe") return Expectation::Unsafe;
    return std::nullopt;
  }
  return std::nullopt;
}

bool BenchEntry::correct() const
{
  if (!report.verdict) {
    return false;
  }
  return (expected == Expectation::Safe && *report.verdict == VerdictKind::Safe) ||
         (expected == Expectation::Unsafe && *report.verdict == VerdictKind::Unsafe);
}

bool BenchEntry::mismatch() const
{
  if (!report.verdict) {
    return true;
  }
  return (expected == Expectation::Safe && *report.verdict == VerdictKind::Unsafe) ||
         (expected == Expectation::Unsafe && *report.verdict == VerdictKind::Safe);
}

bool BenchSummary::ok() const
{
  for (const auto& e : entries) {
    if (e.mismatch()) {
      return false;
    }
  }
  return true;
}

BenchSummary bench(const std::string& dir, const RunConfig& cfg, int jobs)
{
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument(dir + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& ent : fs::recursive_directory_iterator(dir)) {
    if (ent.is_regular_file() && ent.path().extension() == ".imp") {
      files.push_back(ent.path());
    }
  }
  std::sort(files.begin(), files.end());

  BenchSummary out;
  for (const auto& f : files) {
    auto exp = read_expectation(f.string());
    if (!exp) {
      out.skipped.push_back(f.string());
      continue;
    }
    BenchEntry e;
    e.category = f.parent_path().lexically_relative(dir).generic_string();
    if (e.category.empty() || e.category == ".") {
      e.category = ".";
    }
    e.expected = *exp;
    e.report.file = f.string();
    out.entries.push_back(std::move(e));
  }

  // Dump paths would be overwritten by every file.
  RunConfig per_file = cfg;
  per_file.dump_cfa.clear();
  per_file.dump_ta.clear();
  per_file.dimacs.clear();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < out.entries.size(); i = next++) {
      out.entries[i].report = run(per_file, out.entries[i].report.file);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::max(1, jobs); ++j) {
    pool.emplace_back(worker);
  }
  worker();
  for (auto& t : pool) {
    t.join();
  }
  return out;
}

std::string format_table(const BenchSummary& s)
{
  struct Row {
    int files = 0, correct = 0, wrong = 0, unknown = 0, timeout = 0, error = 0;
    double accel = 0, check = 0;
  };
  std::map<std::string, Row> rows;
  Row total;
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (const auto& e : s.entries) {
    const Report& r = e.report;
    os << (e.correct() ? "ok       " : e.mismatch() ? "MISMATCH " : "-        ") << r.file << "  "
       << (r.verdict ? to_string(*r.verdict) : "ERROR") << " (expected "
       << (e.expected == Expectation::Safe ? "SAFE" : "UNSAFE") << ")";
    if (!r.error.empty()) {
      os << "  " << r.error;
    }
    os << "\n";
    for (Row* row : {&rows[e.category], &total}) {
      ++row->files;
      row->accel += r.accel_time;
      row->check += r.check_time;
      if (!r.verdict) {
        ++row->error;
      } else if (e.correct()) {
        ++row->correct;
      } else if (e.mismatch()) {
        ++row->wrong;
      } else if (*r.verdict == VerdictKind::Timeout) {
        ++row->timeout;
      } else {
        ++row->unknown;
      }
    }
  }
  for (const auto& f : s.skipped) {
    os << "skipped  " << f << "  (no EXPECT header)\n";
  }
  auto line = [&](const std::string& name, const Row& r) {
    os << std::left << std::setw(24) << name << std::right << std::setw(6) << r.files
       << std::setw(9) << r.correct << std::setw(7) << r.wrong << std::setw(9) << r.unknown
       << std::setw(9) << r.timeout << std::setw(7) << r.error << std::setw(12) << r.accel
       << std::setw(12) << r.check << "\n";
  };
  os << "\n"
     << std::left << std::setw(24) << "category" << std::right << std::setw(6) << "files"
     << std::setw(9) << "correct" << std::setw(7) << "wrong" << std::setw(9) << "unknown"
     << std::setw(9) << "timeout" << std::setw(7) << "error" << std::setw(12) << "accel (s)"
     << std::setw(12) << "check (s)" << "\n";
  for (const auto& [name, r] : rows) {
    line(name, r);
  }
  line("total", total);
  return os.str();
}

} // namespace accelbmc
