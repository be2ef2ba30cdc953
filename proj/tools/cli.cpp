#include "cli.hpp"

#include "swing/dap.hpp"
#include "swing/lifter.hpp"
#include "swing/load.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <unistd.h>

namespace swing::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string loc_text(const SourceLoc &l) {
  return std::to_string(l.start_line) + ":" + std::to_string(l.start_col) + "-" + std::to_string(l.end_line) + ":" +
         std::to_string(l.end_col);
}

json loc_json(const std::optional<SourceLoc> &l) {
  if (!l)
    return nullptr;
  return {{"start", {l->start_line, l->start_col}}, {"end", {l->end_line, l->end_col}}};
}

struct VerifyFlags {
  std::string file;
  std::vector<std::string> procs;
  bool no_logging = false;
  std::string log_path;
  bool dump_tree = false;
  bool dump_gil = false;
  bool json = false;
  std::string mode = "auto";
};

std::unique_ptr<reports::ReportStore> make_store(const VerifyFlags &f, const std::string &proc) {
  if (f.no_logging)
    return std::make_unique<reports::NullStore>();
  std::string dir = f.log_path;
  if (dir.empty())
    if (const char *env = std::getenv("SWING_LOG_DIR"))
      dir = env;
  if (dir.empty())
    return std::make_unique<reports::MemoryStore>();
  return std::make_unique<reports::NdjsonStore>(dir, fs::path(f.file).stem().string() + "." + proc);
}

ProcSummary verify_proc(const std::shared_ptr<const gil::Program> &prog, const std::string &proc,
                        const VerifyFlags &f) {
  engine::Options opts;
  opts.mode = f.mode == "manual" ? engine::Mode::Manual : engine::Mode::Auto;
  auto store = make_store(f, proc);
  if (f.dump_tree) {
    auto t0 = Clock::now();
    lifter::Explorer ex(prog, proc, std::move(store), opts);
    ex.run_all();
    auto s = summarize(proc, ex.session().outcomes(), since(t0));
    s.tree = ex.tree().to_json();
    return s;
  }
  opts.snapshots = store->retains();
  auto t0 = Clock::now();
  auto outcomes = engine::verify(prog, proc, *store, opts);
  return summarize(proc, outcomes, since(t0));
}

void print_human(std::ostream &out, const ProcSummary &s) {
  std::string verdict = s.verdict;
  std::transform(verdict.begin(), verdict.end(), verdict.begin(), ::toupper);
  out << "  " << s.proc << ": " << verdict << "  " << s.branches << (s.branches == 1 ? " branch" : " branches")
      << " (" << s.verified << " verified)  " << std::fixed << std::setprecision(1) << s.ms << " ms\n";
  for (const auto &fl : s.failures) {
    out << "    " << fl.kind;
    if (!fl.atom.empty())
      out << ": cannot match `" << fl.atom << "`";
    else
      out << ": " << fl.message;
    if (fl.loc)
      out << " at " << loc_text(*fl.loc);
    out << "\n";
  }
  if (s.tree)
    out << s.tree->dump(2) << "\n";
}

int verify(const VerifyFlags &f, std::ostream &out, std::ostream &err) {
  std::shared_ptr<const gil::Program> prog;
  try {
    prog = load_program(f.file);
  } catch (const LoadError &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  auto targets = f.procs.empty() ? engine::default_targets(*prog) : f.procs;
  for (const auto &p : targets) {
    auto it = prog->procs.find(p);
    if (it == prog->procs.end() || !it->second.spec) {
      err << "error: " << f.file << ": no specified procedure '" << p << "'\n";
      return 2;
    }
  }

  std::vector<ProcSummary> results;
  for (const auto &p : targets)
    results.push_back(verify_proc(prog, p, f));
  bool ok = std::all_of(results.begin(), results.end(), [](const ProcSummary &s) { return s.verdict == "verified"; });

  if (f.json) {
    json doc = {{"schema", kJsonSchema}, {"file", f.file}, {"verified", ok}, {"procs", json::array()}};
    for (const auto &s : results)
      doc["procs"].push_back(to_json(s));
    if (f.dump_gil)
      doc["gil"] = gil::dump(*prog);
    out << doc.dump(2) << "\n";
  } else {
    if (f.dump_gil)
      out << gil::dump(*prog);
    out << f.file << "\n";
    for (const auto &s : results)
      print_human(out, s);
  }
  return ok ? 0 : 1;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  auto n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
}

// One verification run of every target in the program; the verdict string
// covers every outcome so that any divergence between runs shows.
std::pair<double, std::string> bench_once(const std::shared_ptr<const gil::Program> &prog,
                                          const std::vector<std::string> &targets, const fs::path *log_dir,
                                          const std::string &stem) {
  double ms = 0;
  std::string verdict;
  for (const auto &p : targets) {
    std::unique_ptr<reports::ReportStore> store;
    if (log_dir)
      store = std::make_unique<reports::NdjsonStore>(*log_dir, stem + "." + p);
    else
      store = std::make_unique<reports::NullStore>();
    engine::Options opts;
    opts.snapshots = store->retains();
    auto t0 = Clock::now();
    auto outcomes = engine::verify(prog, p, *store, opts);
    ms += since(t0);
    auto s = summarize(p, outcomes, 0);
    verdict += p + "=" + s.verdict + "/" + std::to_string(s.branches) + "/" + std::to_string(s.verified) + ";";
  }
  return {ms, verdict};
}

int bench(const std::vector<std::string> &files, int repeat, std::ostream &out, std::ostream &err) {
  fs::path dir = fs::temp_directory_path() / ("swing-bench-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int code = 0;
  out << std::left << std::setw(28) << "file" << std::right << std::setw(12) << "no logs ms" << std::setw(12)
      << "file ms" << std::setw(10) << "factor"
      << "  verdict\n";
  for (const auto &file : files) {
    std::shared_ptr<const gil::Program> prog;
    try {
      prog = load_program(file);
    } catch (const LoadError &e) {
      err << "error: " << e.what() << "\n";
      code = 2;
      continue;
    }
    auto targets = engine::default_targets(*prog);
    std::vector<double> null_ms, file_ms;
    std::set<std::string> verdicts;
    std::string stem = fs::path(file).stem().string();
    for (int i = 0; i < repeat; ++i) {
      auto [a, va] = bench_once(prog, targets, nullptr, stem);
      auto [b, vb] = bench_once(prog, targets, &dir, stem);
      null_ms.push_back(a);
      file_ms.push_back(b);
      verdicts.insert(va);
      verdicts.insert(vb);
    }
    double n = median(null_ms), f = median(file_ms);
    bool all_ok = verdicts.size() == 1 && verdicts.begin()->find("=failed") == std::string::npos &&
                  verdicts.begin()->find("=error") == std::string::npos;
    out << std::left << std::setw(28) << fs::path(file).filename().string() << std::right << std::fixed
        << std::setprecision(2) << std::setw(12) << n << std::setw(12) << f << std::setw(9)
        << (n > 0 ? f / n : 0.0) << "x  " << (verdicts.size() != 1 ? "NONDETERMINISTIC" : all_ok ? "verified" : "failed")
        << "\n";
    if (verdicts.size() != 1) {
      err << "error: " << file << ": verdicts differ across runs or logging modes\n";
      code = 2;
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return code;
}

int adapter(bool stdio, std::optional<int> port, std::ostream &out, std::ostream &err) {
  if (stdio && port) {
    err << "error: --stdio and --port are mutually exclusive\n";
    return 2;
  }
  if (!port) {
    dap::serve(std::cin, std::cout);
    return 0;
  }
  try {
    dap::serve_tcp(*port, [&](int p) { out << "listening on 127.0.0.1:" << p << std::endl; });
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

} // namespace

ProcSummary summarize(const std::string &proc, const std::vector<engine::Outcome> &outcomes, double ms) {
  ProcSummary s;
  s.proc = proc;
  s.ms = ms;
  s.branches = outcomes.size();
  bool error = false;
  for (const auto &o : outcomes) {
    if (o.kind == engine::Outcome::Kind::VerifiedBranch) {
      ++s.verified;
      continue;
    }
    error |= o.kind == engine::Outcome::Kind::EngineError;
    s.failures.push_back({engine::to_string(o.kind), o.failed_atom, o.message, o.atom_loc});
  }
  s.verdict = error ? "error" : s.failures.empty() && !outcomes.empty() ? "verified" : "failed";
  if (outcomes.empty())
    s.failures.push_back({"EngineError", "", "no path reached the end of the procedure", std::nullopt});
  return s;
}

json to_json(const ProcSummary &s) {
  json fails = json::array();
  for (const auto &f : s.failures)
    fails.push_back({{"kind", f.kind},
                     {"atom", f.atom.empty() ? json(nullptr) : json(f.atom)},
                     {"message", f.message},
                     {"loc", loc_json(f.loc)}});
  json j = {{"proc", s.proc},   {"verdict", s.verdict}, {"branches", s.branches},
            {"verified", s.verified}, {"failures", fails}, {"time_ms", s.ms}};
  if (s.tree)
    j["tree"] = *s.tree;
  return j;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"WISL compositional symbolic execution: verifier and debug adapter", "swing"};
  app.require_subcommand(1);

  VerifyFlags vf;
  auto *verify_cmd = app.add_subcommand("verify", "verify the specified procedures of a WISL file");
  verify_cmd->add_option("file", vf.file, "WISL source file")->required();
  verify_cmd->add_option("--proc", vf.procs, "procedure to verify (repeatable; default: all specified)");
  auto *nolog = verify_cmd->add_flag("--no-logging", vf.no_logging, "discard execution reports");
  verify_cmd->add_option("--log-path", vf.log_path, "directory for report logs (default: $SWING_LOG_DIR)")
      ->excludes(nolog);
  verify_cmd->add_flag("--dump-tree", vf.dump_tree, "print the lifted execution tree");
  verify_cmd->add_flag("--dump-gil", vf.dump_gil, "print the compiled GIL with per-command records");
  verify_cmd->add_flag("--json", vf.json, "machine-readable summary");
  verify_cmd->add_option("--mode", vf.mode, "fold/unfold automation")->check(CLI::IsMember({"auto", "manual"}));

  std::vector<std::string> bench_files;
  int repeat = 5;
  auto *bench_cmd = app.add_subcommand("bench", "time verification with and without report logging");
  bench_cmd->add_option("files", bench_files, "WISL source files")->required();
  bench_cmd->add_option("--repeat", repeat, "runs per mode")->check(CLI::PositiveNumber);

  bool stdio = false;
  std::optional<int> port;
  auto *adapter_cmd = app.add_subcommand("adapter", "run the debug adapter");
  adapter_cmd->add_flag("--stdio", stdio, "serve on standard streams (default)");
  adapter_cmd->add_option("--port", port, "serve on 127.0.0.1:N; 0 picks a free port")->check(CLI::Range(0, 65535));

  std::vector<const char *> argv{"swing"};
  for (const auto &a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return 2;
  }

  if (*verify_cmd)
    return verify(vf, out, err);
  if (*bench_cmd)
    return bench(bench_files, repeat, out, err);
  return adapter(stdio, port, out, err);
}

} // namespace swing::cli
