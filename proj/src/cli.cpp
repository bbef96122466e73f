#include "plcsynth/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "plcsynth/bench.hpp"
#include "plcsynth/engine.hpp"
#include "plcsynth/lang.hpp"

namespace plcsynth {

namespace fs = std::filesystem;

Lang lang_of(const fs::path &path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".il" ? Lang::IL : Lang::ST;
}

Block load_block(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read block file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_block(text.str(), lang_of(path));
}

namespace {

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot write " + path.string());
  out << text;
  if (!out)
    throw IoError("failed writing " + path.string());
}

} // namespace

void save_block(const Block &block, const fs::path &path, Lang lang) {
  write_text(path, emit(block, lang));
}

ProjectLayout ProjectLayout::load(const fs::path &root) {
  ProjectLayout p;
  p.root = root;
  const fs::path blocks = root / "blocks";
  const fs::path constraints = root / "constraints";
  if (!fs::is_directory(blocks))
    throw IoError("project has no blocks directory: " + blocks.string());
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(blocks)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".st" || ext == ".il"))
      files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto &f : files) {
    Block b = load_block(f);
    auto [it, fresh] = p.blocks.emplace(b.name, f);
    if (!fresh)
      throw TypeError("block '" + b.name.str() + "' is defined in both " + it->second.string() +
                      " and " + f.string());
  }
  if (fs::is_directory(constraints)) {
    files.clear();
    for (const auto &e : fs::directory_iterator(constraints))
      if (e.is_regular_file() && e.path().extension() == ".xml")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
      ConstraintList list = load_constraints(f);
      if (!p.blocks.count(list.block_name))
        throw TypeError(f.string() + " refers to unknown block '" + list.block_name.str() + "'");
      p.constraints.emplace(f, std::move(list));
    }
  }
  return p;
}

namespace {

std::string millis(std::chrono::duration<double> d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << std::chrono::duration<double, std::milli>(d).count() << " ms";
  return os.str();
}

std::string summary(const std::string &what, const SynthesisResult &r, bool changes) {
  std::ostringstream os;
  os << what << " " << r.block.name.str() << ": slots=" << r.slots_used << " iterations=" << r.iterations;
  if (changes)
    os << " nodes_changed=" << r.nodes_changed;
  os << " time=" << millis(r.wall_time);
  return os.str();
}

std::optional<Lang> parse_lang(const std::string &text) {
  if (text == "st")
    return Lang::ST;
  if (text == "il")
    return Lang::IL;
  return std::nullopt;
}

void deliver(const Block &block, const std::string &out_path, Lang lang, std::ostream &out) {
  if (out_path.empty())
    out << emit(block, lang);
  else
    save_block(block, out_path, lang);
}

struct Options {
  std::string constraints;
  std::string block;
  std::string out;
  std::string lang;
  std::string to;
  std::string scenario;
  std::uint64_t seed = 0;
  int max_slots = 31;
  int cycles = 1;
  int repeat = 10;
  bool joint = false;
  bool symbolic_init = false;
};

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Synthesis, verification and repair of PLC blocks from constraint lists", "plcsynth"};
  app.require_subcommand(1);
  Options o;

  auto *synth = app.add_subcommand("synth", "Generate a block from a constraint list");
  synth->add_option("--constraints", o.constraints, "Constraint list (.xml)")->required();
  synth->add_option("--out", o.out, "Output block file");
  synth->add_option("--lang", o.lang, "Output language")->check(CLI::IsMember({"st", "il"}));
  synth->add_option("--seed", o.seed, "Solver seed");
  synth->add_option("--max-slots", o.max_slots, "Largest program size tried")->check(CLI::PositiveNumber);
  synth->add_flag("--joint", o.joint, "Synthesize all outputs in one run");

  auto *verify_cmd = app.add_subcommand("verify", "Check a block against a constraint list");
  verify_cmd->add_option("--block", o.block, "Block file (.st or .il)")->required();
  verify_cmd->add_option("--constraints", o.constraints, "Constraint list (.xml)")->required();
  verify_cmd->add_option("--cycles", o.cycles, "Scan cycles to unroll")->check(CLI::PositiveNumber);
  verify_cmd->add_flag("--symbolic-init", o.symbolic_init, "Leave the initial state unconstrained");

  auto *repair_cmd = app.add_subcommand("repair", "Fix a block so it meets a constraint list");
  repair_cmd->add_option("--block", o.block, "Block file (.st or .il)")->required();
  repair_cmd->add_option("--constraints", o.constraints, "Constraint list (.xml)")->required();
  repair_cmd->add_option("--out", o.out, "Output block file");
  repair_cmd->add_option("--seed", o.seed, "Solver seed");

  auto *simplify_cmd = app.add_subcommand("simplify", "Shrink a block without changing its behavior");
  simplify_cmd->add_option("--block", o.block, "Block file (.st or .il)")->required();
  simplify_cmd->add_option("--out", o.out, "Output block file");
  simplify_cmd->add_option("--seed", o.seed, "Solver seed");

  auto *extend_cmd = app.add_subcommand("extend", "Add behavior to a block with minimal edits");
  extend_cmd->add_option("--block", o.block, "Block file (.st or .il)")->required();
  extend_cmd->add_option("--constraints", o.constraints, "Additional constraints (.xml)")->required();
  extend_cmd->add_option("--out", o.out, "Output block file");
  extend_cmd->add_option("--seed", o.seed, "Solver seed");

  auto *translate_cmd = app.add_subcommand("translate", "Convert a block to another language");
  translate_cmd->add_option("--block", o.block, "Block file (.st or .il)")->required();
  translate_cmd->add_option("--to", o.to, "Target language")->required()->check(CLI::IsMember({"st", "il"}));
  translate_cmd->add_option("--out", o.out, "Output block file");

  auto *bench_cmd = app.add_subcommand("bench", "Time repeated synthesis of a warehouse component");
  bench_cmd->add_option("--scenario", o.scenario, "Component")
      ->required()
      ->check(CLI::IsMember({"magnet", "row", "signal-light"}));
  bench_cmd->add_option("--repeat", o.repeat, "Repetitions (at least 2)");
  bench_cmd->add_option("--seed", o.seed, "Seed of the first repetition");

  auto *check_cmd = app.add_subcommand("check", "Report conflicting truth-table rows");
  check_cmd->add_option("--constraints", o.constraints, "Constraint list (.xml)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return exit_code::kUsage;
  }

  try {
    SynthConfig cfg;
    cfg.seed = o.seed;

    if (*synth) {
      const ConstraintList list = load_constraints(o.constraints);
      cfg.max_slots = o.max_slots;
      cfg.per_output = !o.joint;
      Lang lang = o.lang.empty() ? (o.out.empty() ? Lang::ST : lang_of(o.out)) : *parse_lang(o.lang);
      SynthesisResult r = synthesize(list, cfg);
      r.block.lang = lang;
      deliver(r.block, o.out, lang, out);
      (o.out.empty() ? err : out) << summary("synthesized", r, false) << "\n";
      return exit_code::kOk;
    }
    if (*verify_cmd) {
      const Block block = load_block(o.block);
      const SpecFormula spec = compile_spec(load_constraints(o.constraints));
      cfg.unwind_cycles = o.cycles;
      cfg.symbolic_init = o.symbolic_init;
      const VerifyResult r = verify(block, spec, cfg);
      if (r.is_verified()) {
        out << "Verified (" << r.bound() << (r.bound() == 1 ? " cycle" : " cycles") << ")\n";
        return exit_code::kOk;
      }
      out << "Violated\n" << format_counterexample(r.counterexample());
      return exit_code::kViolated;
    }
    if (*repair_cmd) {
      const Block block = load_block(o.block);
      const SpecFormula spec = compile_spec(load_constraints(o.constraints));
      SynthesisResult r = repair(block, spec, cfg);
      const Lang lang = o.out.empty() ? block.lang : lang_of(o.out);
      deliver(r.block, o.out, lang, out);
      if (r.iterations == 0 && r.block == block)
        (o.out.empty() ? err : out) << "block " << block.name.str()
                                    << " already satisfies the constraints\n";
      else
        (o.out.empty() ? err : out) << summary("repaired", r, true) << "\n";
      return exit_code::kOk;
    }
    if (*simplify_cmd) {
      const Block block = load_block(o.block);
      const SynthesisResult r = simplify(block, cfg);
      const Lang lang = o.out.empty() ? block.lang : lang_of(o.out);
      deliver(r.block, o.out, lang, out);
      (o.out.empty() ? err : out) << summary("simplified", r, false) << "\n";
      return exit_code::kOk;
    }
    if (*extend_cmd) {
      const Block block = load_block(o.block);
      const ConstraintList extra = load_constraints(o.constraints);
      const SynthesisResult r = extend(block, extra, cfg);
      const Lang lang = o.out.empty() ? block.lang : lang_of(o.out);
      deliver(r.block, o.out, lang, out);
      (o.out.empty() ? err : out) << summary("extended", r, true) << "\n";
      return exit_code::kOk;
    }
    if (*translate_cmd) {
      const Block block = load_block(o.block);
      const Lang target = *parse_lang(o.to);
      const Block result = translate(block, target);
      const VerifyResult same = equivalent(block, result);
      if (!same.is_verified())
        throw InternalError("translation changed behavior: " + same.counterexample().violated);
      deliver(result, o.out, target, out);
      if (!o.out.empty())
        out << "translated " << block.name.str() << " to " << to_string(target) << "\n";
      return exit_code::kOk;
    }
    if (*bench_cmd) {
      const Scenario s = *parse_scenario(o.scenario);
      const BenchReport report = bench_run(s, o.repeat, cfg);
      for (std::size_t i = 0; i < report.repeats.size(); ++i) {
        const auto &r = report.repeats[i];
        out << "repeat " << i + 1 << ": seed=" << r.seed << " calls=" << r.synthesis_calls
            << " slots=" << r.slots << " iterations=" << r.iterations << " time=" << millis(r.time) << "\n";
      }
      out << to_string(s) << ": n=" << report.stats.n << " mean=" << millis(report.stats.mean)
          << " stddev=" << millis(report.stats.stddev) << " (all programs match the table)\n";
      return exit_code::kOk;
    }
    if (*check_cmd) {
      const ConstraintList list = load_constraints(o.constraints);
      const ConsistencyReport report = check_consistency(list);
      if (report.consistent()) {
        out << "consistent: " << list.constraints.size() << " constraints\n";
        return exit_code::kOk;
      }
      for (const auto &c : report.conflicts) {
        out << "conflict: constraint " << c.first + 1 << " and constraint " << c.second + 1
            << " disagree on " << c.output.str();
        const auto w = c.witness.to_string();
        if (!w.empty())
          out << " for " << w;
        out << "\n";
      }
      return exit_code::kViolated;
    }
  } catch (const Unsatisfiable &e) {
    err << e.what() << "\n";
    return exit_code::kViolated;
  } catch (const SizeBoundExceeded &e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  } catch (const InternalError &e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::kFailure;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::kFailure;
  } catch (...) {
    err << "internal error: unknown exception\n";
    return exit_code::kFailure;
  }
  return exit_code::kUsage;
}

} // namespace plcsynth
