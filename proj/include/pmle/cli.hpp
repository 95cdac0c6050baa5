#ifndef PMLE_CLI_HPP
#define PMLE_CLI_HPP

// Command-line front end. Needs CLI11.hpp on the include path.

#include <CLI11.hpp>

#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pmle/pmle.hpp"

namespace pmle::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

/// Usage or IO problem; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw UsageError("cannot write '" + path + "'");
}

// "-" or empty means the given stream.
inline void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << text;
  } else {
    write_file(path, text);
  }
}

inline Configuration load_config(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return deserialize(text);
  } catch (const ParseError& e) {
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " + e.what());
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

inline Support checked_support(std::vector<Cell> cells) {
  Support s = [&] {
    try {
      return Support(std::move(cells));
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid shape: ") + e.what());
    }
  }();
  const auto hs = holes(s);
  if (!hs.empty()) {
    const Cell h = hs.front().front();
    throw UsageError("not simply connected: hole at (" + std::to_string(h.q) + "," + std::to_string(h.r) + ")");
  }
  return s;
}

inline std::string cell_text(const Cell& c) { return "(" + std::to_string(c.q) + "," + std::to_string(c.r) + ")"; }

// Applies f to every item, items sharded round-robin over `jobs` threads.
template <class T, class R>
std::vector<R> sharded_map(const std::vector<T>& items, int jobs, const std::function<R(const T&)>& f) {
  std::vector<R> out(items.size());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(items.size(), 1))));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](int w) {
    try {
      for (std::size_t k = static_cast<std::size_t>(w); k < items.size(); k += static_cast<std::size_t>(jobs))
        out[k] = f(items[k]);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Subcommands

struct GenOptions {
  std::string shape;
  int random_n = 0;
  std::string file;
  std::string init = "erosion";
  std::uint64_t seed = 1;
  double conflict_prob = 0.1;
  std::string portmaps = "identity";
  std::string out;
};

inline int cmd_gen(const GenOptions& o, std::ostream& out) {
  const int sources = !o.shape.empty() + (o.random_n > 0) + !o.file.empty();
  if (sources != 1) throw UsageError("gen: give exactly one of --shape, --random, --file");
  Support s = [&] {
    if (!o.shape.empty()) {
      std::vector<Cell> cells;
      try {
        cells = named_support(o.shape).cells();
      } catch (const std::exception& e) {
        throw UsageError(std::string("invalid shape: ") + e.what());
      }
      return detail::checked_support(cells);
    }
    if (o.random_n > 0) return random_support(o.random_n, o.seed);
    const std::string text = detail::read_file(o.file);
    try {
      return detail::checked_support(parse_shape(text));
    } catch (const ParseError& e) {
      throw UsageError(o.file + ":" + std::to_string(e.line()) + ": " + e.what());
    }
  }();

  std::vector<PortMap> pm;
  if (o.portmaps == "identity") {
    pm = identity_portmaps(s.size());
  } else if (o.portmaps == "random") {
    pm = random_portmaps(s.size(), o.seed ^ 0x9e3779b97f4a7c15ULL);
  } else {
    throw UsageError("gen: --portmaps must be identity or random");
  }

  const Configuration c = [&] {
    if (o.init == "erosion") return erosion_orientation(s, pm);
    if (o.init == "all-in") return Configuration::all_in(s, pm);
    if (o.init == "random") {
      if (o.conflict_prob < 0.0 || o.conflict_prob > 1.0) throw UsageError("gen: --conflict-prob outside [0, 1]");
      return random_registers(s, o.seed, o.conflict_prob, pm);
    }
    throw UsageError("gen: --init must be erosion, all-in or random");
  }();
  detail::emit(o.out, serialize(c), out);
  return kExitOk;
}

struct RunOptions {
  std::string config;
  std::string scheduler = "random";
  std::uint64_t seed = 1;
  std::int64_t max_steps = kDefaultStepCap;
  std::string trace;
  double inclusion = 0.5;
  bool local = false;
};

inline int cmd_run(const RunOptions& o, std::ostream& out) {
  const Configuration c0 = detail::load_config(o.config);
  SchedulerKind kind;
  if (o.scheduler == "random") {
    kind = RandomSequential{o.seed};
  } else if (o.scheduler == "roundrobin") {
    kind = RoundRobin{};
  } else if (o.scheduler == "concurrent") {
    kind = ConcurrentRandomSet{o.seed, o.inclusion};
  } else if (o.scheduler.rfind("script:", 0) == 0) {
    const std::string path = o.scheduler.substr(7);
    std::vector<Cell> script;
    try {
      script = parse_shape(detail::read_file(path));
    } catch (const ParseError& e) {
      throw UsageError(path + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    for (const Cell& cell : script)
      if (!c0.support().contains(cell)) throw UsageError(path + ": script cell " + detail::cell_text(cell) + " is not occupied");
    kind = Scripted{std::move(script)};
  } else {
    throw UsageError("run: --scheduler must be random, roundrobin, concurrent or script:PATH");
  }
  if (o.max_steps < 0) throw UsageError("run: --max-steps must be non-negative");

  std::ofstream trace_file;
  std::unique_ptr<TextTraceWriter> writer;
  if (!o.trace.empty()) {
    trace_file.open(o.trace, std::ios::binary);
    if (!trace_file) throw UsageError("cannot write trace '" + o.trace + "'");
    writer = std::make_unique<TextTraceWriter>(trace_file);
  }
  const ExecutionResult res = run(c0, kind, o.max_steps, writer.get(), o.local ? R4Route::Local : R4Route::Omniscient);
  if (writer && !trace_file.flush()) throw UsageError("cannot write trace '" + o.trace + "'");

  if (!res.final()) {
    out << "CAP steps=" << res.steps << '\n';
    return kExitOk;
  }
  const auto k = sinks(res.configuration).size();
  out << "FINAL steps=" << res.steps << " sinks=" << k << '\n';
  if (!is_valid(res.configuration) || k != 1) {
    out << "final configuration violates the rules or has " << k << " sinks\n";
    return kExitViolation;
  }
  return kExitOk;
}

inline int cmd_verify(const std::string& config, bool per_particle, std::ostream& out) {
  const Configuration c = detail::load_config(config);
  const RuleReport rep = rule_report(c);
  out << format_report(rep, per_particle);
  return rep.valid && rep.sinks.size() == 1 ? kExitOk : kExitViolation;
}

struct EnumOptions {
  int n = 0;
  std::string check;
  int jobs = 1;
  bool symmetry = false;
  std::string engine = "packed";
  std::string dump;
};

namespace detail {

struct EnumItem {
  bool applicable = true;
  bool ok = true;
  std::uint64_t a = 0, b = 0, c = 0;  // check-specific counts
  std::string artifact;               // serialized counterexample or shape
  std::string note;
};

}  // namespace detail

inline int cmd_enum(const EnumOptions& o, std::ostream& out) {
  if (o.n < 1) throw UsageError("enum: --n must be at least 1");
  if (o.jobs < 1) throw UsageError("enum: --jobs must be at least 1");
  const std::vector<Support> supports = enumerate_supports(o.n, o.symmetry);
  std::function<detail::EnumItem(const Support&)> f;
  if (o.check == "theorem1") {
    f = [](const Support& s) {
      const Theorem1Report r = check_theorem1(s);
      detail::EnumItem it{true, r.ok(), r.orientations, r.valid, 0, {}, {}};
      if (!r.ok()) it.artifact = serialize(r.counterexamples.front());
      return it;
    };
  } else if (o.check == "silence") {
    f = [](const Support& s) {
      const SilenceReport r = check_silence(s);
      detail::EnumItem it{true, r.ok(), r.states, r.valid, r.final, {}, {}};
      if (!r.ok()) it.artifact = serialize(r.counterexamples.front());
      return it;
    };
  } else if (o.check == "reach") {
    Engine engine;
    if (o.engine == "packed") {
      engine = Engine::Packed;
    } else if (o.engine == "reference") {
      engine = Engine::Reference;
    } else {
      throw UsageError("enum: --engine must be packed or reference");
    }
    f = [engine](const Support& s) {
      const ReachabilityReport r = check_reachability(s, engine);
      detail::EnumItem it{true, r.ok(), r.states, r.can_reach, r.valid_final, {}, {}};
      if (!r.ok()) it.artifact = serialize(r.unreachable.front());
      return it;
    };
  } else if (o.check == "obs1") {
    f = [](const Support& s) {
      detail::EnumItem it;
      if (s.size() < 3 || !is_two_connected(s)) {
        it.applicable = false;
        return it;
      }
      const AngleCensus census = angle_census(s);
      it.ok = census.formula() == 6;
      if (!it.ok) {
        it.artifact = format_shape(s);
        it.note = "formula=" + std::to_string(census.formula());
      }
      return it;
    };
  } else if (o.check == "lemma1") {
    f = [](const Support& s) {
      detail::EnumItem it;
      if (s.size() < 2) {
        it.applicable = false;
        return it;
      }
      try {
        it.a = static_cast<std::uint64_t>(lemma1_witness(s).which);
      } catch (const std::logic_error& e) {
        it.ok = false;
        it.artifact = format_shape(s);
        it.note = e.what();
      }
      return it;
    };
  } else if (o.check == "erosion") {
    f = [](const Support& s) {
      detail::EnumItem it;
      const Configuration c = erosion_orientation(s);
      it.ok = is_valid(c) && sinks(c).size() == 1;
      if (!it.ok) it.artifact = serialize(c);
      return it;
    };
  } else {
    throw UsageError("enum: --check must be theorem1, silence, reach, obs1, lemma1 or erosion");
  }

  const auto items = detail::sharded_map<Support, detail::EnumItem>(supports, o.jobs, f);
  std::uint64_t applicable = 0, failures = 0, a = 0, b = 0, c = 0;
  std::uint64_t cases[4] = {0, 0, 0, 0};
  const detail::EnumItem* first_bad = nullptr;
  for (const auto& it : items) {
    if (!it.applicable) continue;
    ++applicable;
    a += it.a;
    b += it.b;
    c += it.c;
    if (o.check == "lemma1" && it.ok && it.a < 4) ++cases[it.a];
    if (!it.ok) {
      ++failures;
      if (!first_bad) first_bad = &it;
    }
  }
  out << "n=" << o.n << " supports=" << supports.size() << " applicable=" << applicable << '\n';
  if (o.check == "theorem1") out << "orientations=" << a << " valid=" << b << '\n';
  if (o.check == "silence") out << "states=" << a << " valid=" << b << " final=" << c << '\n';
  if (o.check == "reach") out << "states=" << a << " can_reach=" << b << " valid_final=" << c << '\n';
  if (o.check == "lemma1") out << "pending=" << cases[1] << " angle60=" << cases[2] << " chain=" << cases[3] << '\n';
  out << failures << " counterexamples\n";
  if (failures == 0) {
    if (o.check == "silence") out << "final ⟺ valid holds on all states\n";
    if (o.check == "obs1") out << "formula = 6 on all " << applicable << " 2-connected supports\n";
    return kExitOk;
  }
  const std::string path = o.dump.empty() ? "enum-" + o.check + "-counterexample.txt" : o.dump;
  try {
    detail::write_file(path, first_bad->artifact);
    out << "counterexample written to " << path << (first_bad->note.empty() ? "" : " (" + first_bad->note + ")") << '\n';
  } catch (const UsageError& e) {
    out << e.what() << '\n';
  }
  return kExitViolation;
}

struct SearchOptions {
  int max_n = 8;
  std::string space = "conflict-free";
  std::string out;
  std::string script;
};

inline int cmd_search_unfair(const SearchOptions& o, std::ostream& out) {
  StateSpace space;
  if (o.space == "conflict-free") {
    space = StateSpace::ConflictFree;
  } else if (o.space == "full") {
    space = StateSpace::Full;
  } else {
    throw UsageError("search-unfair: --space must be conflict-free or full");
  }
  const UnfairSearchResult res = search_unfair(o.max_n, space);
  if (!res.cycle) {
    out << "no unfair cycle for n <= " << o.max_n << " (" << res.supports_tried << " supports searched)\n";
    return kExitViolation;
  }
  const CycleReport rep = analyze_cycle(window_from_script(res.cycle->initial, res.cycle->script));
  std::size_t stable = 0;
  for (const auto& e : rep.edges) stable += e.stable;
  out << "found n=" << res.n << " period=" << res.cycle->script.size() << " stable_edges=" << stable << '/'
      << rep.edges.size() << " lemma5=" << (rep.lemma5_holds ? "ok" : "violated")
      << " lemma6=" << (rep.lemma6_holds ? "ok" : "violated") << '\n';
  std::ostringstream script;
  for (const Cell& c : res.cycle->script) script << c.q << ' ' << c.r << '\n';
  if (o.out.empty() && o.script.empty()) {
    out << serialize(res.cycle->initial) << "# script\n" << script.str();
  } else {
    detail::emit(o.out, serialize(res.cycle->initial), out);
    detail::emit(o.script, script.str(), out);
  }
  return kExitOk;
}

struct RenderOptions {
  std::string config;
  std::string out;
  std::string trace;
  std::int64_t frame = -1;
};

inline int cmd_render(const RenderOptions& o, std::ostream& out) {
  Configuration c = detail::load_config(o.config);
  if (!o.trace.empty()) {
    std::istringstream in(detail::read_file(o.trace));
    TraceLog log;
    try {
      log = read_trace(in);
    } catch (const ParseError& e) {
      throw UsageError(o.trace + ":" + std::to_string(e.line()) + ": " + e.what());
    }
    const std::int64_t frames = o.frame < 0 ? std::numeric_limits<std::int64_t>::max() : o.frame;
    c = replay(c, log.records, frames);
  }
  std::ostringstream svg;
  const SvgStats st = render_svg(c, svg);
  detail::emit(o.out, svg.str(), out);
  if (!o.out.empty() && o.out != "-")
    out << "nodes=" << st.nodes << " arrows=" << st.arrows << " dashed=" << st.dashed
        << " conflicts=" << st.conflicts << " sinks=" << st.sinks << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Leader election on programmable matter: generate, run, verify, enumerate, search, render"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Write a configuration file");
  g->add_option("--shape", gen.shape, "Named shape: hexagonK, lineN, parallelogramWxH, triangle3, rhombus, ring18");
  g->add_option("--random", gen.random_n, "Random simply connected support with this many cells");
  g->add_option("--file", gen.file, "Shape file");
  g->add_option("--init", gen.init, "erosion | all-in | random");
  g->add_option("--seed", gen.seed, "Seed for random shapes, registers and port maps");
  g->add_option("--conflict-prob", gen.conflict_prob, "Probability of an out/out edge under --init random");
  g->add_option("--portmaps", gen.portmaps, "identity | random");
  g->add_option("--out", gen.out, "Output path (default stdout)");

  RunOptions runo;
  auto* r = app.add_subcommand("run", "Execute the algorithm under a scheduler");
  r->add_option("--config", runo.config, "Configuration file")->required();
  r->add_option("--scheduler", runo.scheduler, "random | roundrobin | concurrent | script:PATH");
  r->add_option("--seed", runo.seed, "Scheduler seed");
  r->add_option("--max-steps", runo.max_steps, "Step cap");
  r->add_option("--trace", runo.trace, "Trace output path");
  r->add_option("--inclusion", runo.inclusion, "Inclusion probability for the concurrent scheduler");
  r->add_flag("--local", runo.local, "Evaluate R4 from views instead of the global frame");

  std::string verify_config;
  bool per_particle = false;
  auto* v = app.add_subcommand("verify", "Check R1-R4 and count sinks");
  v->add_option("--config", verify_config, "Configuration file")->required();
  v->add_flag("--per-particle", per_particle, "One line per particle");

  EnumOptions en;
  auto* e = app.add_subcommand("enum", "Sweep all supports of one size with an exhaustive check");
  e->add_option("--n", en.n, "Support size")->required();
  e->add_option("--check", en.check, "theorem1 | silence | reach | obs1 | lemma1 | erosion")->required();
  e->add_option("--jobs", en.jobs, "Worker threads");
  e->add_flag("--symmetry", en.symmetry, "One support per rotation/reflection class");
  e->add_option("--engine", en.engine, "Successor engine for reach: packed | reference");
  e->add_option("--dump", en.dump, "Where to write a counterexample");

  SearchOptions so;
  auto* su = app.add_subcommand("search-unfair", "Find a periodic execution avoiding valid configurations");
  su->add_option("--max-n", so.max_n, "Largest support size to try");
  su->add_option("--space", so.space, "conflict-free | full");
  su->add_option("--out", so.out, "Initial configuration output path");
  su->add_option("--script", so.script, "Activation script output path");

  RenderOptions ro;
  auto* re = app.add_subcommand("render", "Draw a configuration as SVG");
  re->add_option("--config", ro.config, "Configuration file")->required();
  re->add_option("--out", ro.out, "SVG output path (default stdout)");
  re->add_option("--trace", ro.trace, "Trace to replay first");
  re->add_option("--frame", ro.frame, "Number of trace steps to replay (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen, out);
    if (*r) return cmd_run(runo, out);
    if (*v) return cmd_verify(verify_config, per_particle, out);
    if (*e) return cmd_enum(en, out);
    if (*su) return cmd_search_unfair(so, out);
    if (*re) return cmd_render(ro, out);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"pmle"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pmle::cli

#endif  // PMLE_CLI_HPP
