// Command-line driver: `accelbmc [options] FILE` and `accelbmc bench DIR`.

#include "accelbmc/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace accelbmc;

namespace {

struct Flags {
  std::string mode = "accel-ta";
  RunConfig cfg;
  std::string json_path;
};

void add_run_options(CLI::App& app, Flags& f)
{
  app.add_option("--mode", f.mode, "plain | accel | accel-ta | oracle")
      ->check(CLI::IsMember({"plain", "accel", "accel-ta", "accel+ta", "oracle"}));
  app.add_option("--unwind", f.cfg.unwind, "unwinding bound (default 100 plain, 3 otherwise)");
  app.add_option("--kmax", f.cfg.kmax, "try bounds 1..K until a decisive verdict");
  app.add_option("--width", f.cfg.width, "override the bit-width of all variables")
      ->check(CLI::Range(1, 64));
  app.add_option("--timeout", f.cfg.timeout, "seconds per file, 0 disables");
  app.add_option("--max-loop-paths", f.cfg.max_loop_paths, "looping traces considered per loop head");
  app.add_option("--dump-cfa", f.cfg.dump_cfa, "write the checked CFA as DOT");
  app.add_option("--dump-ta", f.cfg.dump_ta, "write the trace automaton as DOT");
  app.add_option("--dimacs", f.cfg.dimacs, "write the BMC formula as DIMACS");
  app.add_option("--external-solver", f.cfg.external_solver,
                 "shell command reading DIMACS on stdin (SAT competition output)");
  app.add_option("--seed", f.cfg.seed, "solver seed");
  app.add_option("--json", f.json_path, "append JSON-lines reports to this file ('-' for stdout)");
}

class JsonSink {
public:
  explicit JsonSink(const std::string& path)
  {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::app);
      if (!file_) {
        throw std::runtime_error("cannot open " + path);
      }
    }
    enabled_ = !path.empty();
  }
  void write(const Report& r)
  {
    if (!enabled_) {
      return;
    }
    std::ostream& os = file_.is_open() ? file_ : std::cout;
    os << to_json(r).dump() << "\n";
  }

private:
  bool enabled_ = false;
  std::ofstream file_;
};

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Bounded model checking with trace automata for unsigned bit-vector programs"};
  Flags top;
  std::string file;
  add_run_options(app, top);
  app.add_option("FILE", file, "program to check");

  CLI::App* bench_cmd = app.add_subcommand("bench", "run every .imp file below DIR");
  Flags bf;
  std::string dir;
  int jobs = 1;
  add_run_options(*bench_cmd, bf);
  bench_cmd->add_option("DIR", dir, "benchmark directory")->required();
  bench_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (bench_cmd->parsed()) {
      bf.cfg.mode = *parse_mode(bf.mode);
      JsonSink sink(bf.json_path);
      BenchSummary s = bench(dir, bf.cfg, jobs);
      for (const auto& e : s.entries) {
        sink.write(e.report);
      }
      std::cout << format_table(s);
      return s.ok() ? 0 : 1;
    }
    if (file.empty()) {
      std::cerr << "accelbmc: no input file\n" << app.help();
      return 3;
    }
    top.cfg.mode = *parse_mode(top.mode);
    JsonSink sink(top.json_path);
    Report r = run(top.cfg, file);
    sink.write(r);
    (r.verdict ? std::cout : std::cerr) << to_text(r);
    return exit_code(r);
  } catch (const std::exception& e) {
    std::cerr << "accelbmc: " << e.what() << "\n";
    return 3;
  }
}
