#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fieldcalc/adequacy.hpp"
#include "fieldcalc/dag.hpp"
#include "fieldcalc/denot.hpp"
#include "fieldcalc/json_io.hpp"
#include "fieldcalc/network.hpp"
#include "fieldcalc/parser.hpp"
#include "fieldcalc/stdlib.hpp"
#include "fieldcalc/typer.hpp"

namespace fc = fieldcalc;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// File and usage problems, reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool color() {
  const char* c = std::getenv("FIELDC_COLOR");
  return c && std::string(c) != "0" && std::string(c) != "";
}

fc::SourceFile read_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("cannot read '" + path + "'");
  return fc::read_source(path);
}

json read_json(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw UsageError("cannot read '" + path + "'");
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<fc::SourceFile> library(const std::vector<std::string>& libs) {
  std::vector<fc::SourceFile> files;
  for (const auto& l : libs) {
    if (std::filesystem::is_directory(l)) {
      auto lib = fc::corpus_library(fc::load_corpus(l));
      files.insert(files.end(), lib.begin(), lib.end());
    } else {
      files.push_back(read_file(l));
    }
  }
  return files;
}

struct Loaded {
  fc::Program program;
  fc::TypeScheme type;
};

// Parses and type checks a program with a main expression.
Loaded load_program(const std::string& path, const std::vector<std::string>& libs) {
  auto files = library(libs);
  files.push_back(read_file(path));
  fc::SourceUnit u = fc::parse_units(files);
  if (!u.main) throw fc::ParseError({{path, {}, "error", "missing main expression", ""}});
  Loaded l;
  l.program.decls = std::move(u.decls);
  l.program.main = u.main;
  l.type = fc::typecheck_program(l.program);
  return l;
}

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw UsageError("cannot write '" + path + "'");
    os = &file;
  }
};

std::string csv_cell(const fc::Value& v) {
  if (!v.is_field()) {
    if (fc::as_number(v.local()) || fc::as_bool(v.local())) return fc::scalar_text(v);
  }
  std::string s = fc::to_json(v).dump();
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

fc::Scenario load_scenario(const std::string& path, std::optional<double> decay,
                           std::optional<double> radius) {
  json j = read_json(path);
  if (decay) j["decay"] = *decay;
  if (radius) j["radius"] = *radius;
  try {
    return fc::scenario_from_json(j);
  } catch (const std::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

struct Common {
  std::vector<std::string> libs;
  std::string out;
  std::int64_t fuel = fc::kDefaultFuel;
  std::optional<std::uint64_t> seed;
  std::optional<double> decay;
  std::optional<double> radius;
};

int cmd_typecheck(const std::vector<std::string>& paths, const Common& c, bool as_json) {
  auto files = library(c.libs);
  for (const auto& p : paths) files.push_back(read_file(p));
  fc::SourceUnit u = fc::parse_units(files);
  fc::TypeScheme t = fc::typecheck_unit(u);
  Output out(c.out);
  if (as_json)
    *out.os << json{{"type", fc::to_string(t)}}.dump() << "\n";
  else
    *out.os << fc::to_string(t) << "\n";
  return kOk;
}

int cmd_run(const std::string& prog, const std::string& scen, const Common& c,
            const std::string& format) {
  Loaded l = load_program(prog, c.libs);
  fc::Scenario s = load_scenario(scen, c.decay, c.radius);
  fc::RunOptions ro;
  ro.fuel = c.fuel;
  ro.seed = c.seed;
  fc::FireTrace trace = fc::run_scenario(s, l.program, ro);
  Output out(c.out);
  if (format == "csv") *out.os << "time,device,root\n";
  for (const auto& f : trace.fires) {
    if (format == "csv") {
      *out.os << f.t.seconds() << "," << f.device << "," << csv_cell(f.tree->root) << "\n";
    } else {
      json j{{"time", f.t.seconds()},
             {"device", f.device},
             {"root", fc::to_json(f.tree->root)},
             {"tree", fc::to_json(f.tree)}};
      *out.os << j.dump() << "\n";
    }
  }
  return kOk;
}

int cmd_denot(const std::string& prog, const std::string& input, const Common& c,
              const std::string& format) {
  Loaded l = load_program(prog, c.libs);
  json j = read_json(input);
  fc::EventDAG dag;
  std::unique_ptr<fc::EventSensors> sensors;
  if (j.contains("events")) {
    try {
      dag = fc::dag_from_json(j);
    } catch (const std::exception& e) {
      throw UsageError(input + ": " + e.what());
    }
    sensors = fc::table_sensors({});
  } else {
    fc::Scenario s = load_scenario(input, c.decay, c.radius);
    dag = fc::dag_from_scenario(s);
    sensors = fc::scenario_sensors(s);
  }
  fc::validate_dag(dag);
  fc::DenotOptions opts;
  opts.fuel = c.fuel * 50;
  fc::Denotation d(dag, l.program, *sensors, opts);
  fc::FieldEvolution phi = d.eval(dag.all(), {}, l.program.main);
  Output out(c.out);
  if (format == "csv") *out.os << "event,device,time,value\n";
  for (const auto& [e, v] : phi.values) {
    const fc::Event& ev = dag.events[e];
    if (format == "csv")
      *out.os << e << "," << ev.device << "," << ev.time.seconds() << "," << csv_cell(v) << "\n";
    else
      *out.os << json{{"event", e},
                      {"device", ev.device},
                      {"time", ev.time.seconds()},
                      {"value", fc::to_json(v)}}
                     .dump()
              << "\n";
  }
  return kOk;
}

int cmd_adequacy(const std::string& prog, const std::string& scen, const Common& c,
                 bool as_json) {
  Loaded l = load_program(prog, c.libs);
  fc::Scenario s = load_scenario(scen, c.decay, c.radius);
  fc::AdequacyOptions opts;
  opts.fuel = c.fuel;
  fc::AdequacyReport r = fc::check_adequacy(s, l.program, opts);
  Output out(c.out);
  if (as_json) {
    *out.os << fc::to_json(r).dump() << "\n";
  } else {
    *out.os << r.equal_count << "/" << r.verdicts.size() << " events equal\n";
    if (r.first_mismatch) {
      const auto& v = r.verdicts[*r.first_mismatch];
      *out.os << "first mismatch at event " << v.event << " (device " << v.device << ", time "
              << v.time.seconds() << "): operational " << fc::to_string(v.operational)
              << ", denotational " << fc::to_string(v.denotational) << "\n";
    }
    if (r.stats.alignment_violations)
      *out.os << r.stats.alignment_violations << " alignment violations: "
              << r.stats.first_violation << "\n";
  }
  return r.ok() && r.stats.alignment_violations == 0 ? kOk : kFailure;
}

int cmd_corpus(const std::string& dir, const Common& c) {
  auto corpus = fc::load_corpus(dir);
  Output out(c.out);
  int status = kOk;
  for (const auto& e : corpus) {
    try {
      fc::TypeScheme t = fc::infer_entry(corpus, e.name);
      bool ok = fc::alpha_equivalent(t, e.declared_type) &&
                fc::annotation_consistent(t, e.annotated_type);
      *out.os << e.name << ": " << fc::to_string(t);
      if (!ok) *out.os << "  (expected " << fc::to_string(e.declared_type) << ")";
      *out.os << "\n";
      if (!ok) status = kFailure;
    } catch (const fc::TypeError& err) {
      *out.os << e.name << ": " << err.diagnostic(e.path).format(color()) << "\n";
      status = kFailure;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order field calculus toolkit"};
  app.require_subcommand(1);
  Common c;
  std::string format = "json";
  bool as_json = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--lib", c.libs, "Library source file or corpus directory (repeatable)");
    sub->add_option("--out", c.out, "Write output to this file");
    sub->add_option("--fuel", c.fuel, "Evaluation step budget per fire")
        ->check(CLI::PositiveNumber);
  };
  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Seed for pick-hood (least id when absent)");
    sub->add_option("--decay", c.decay, "Override the scenario decay, in seconds")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--radius", c.radius, "Override the scenario radius")
        ->check(CLI::NonNegativeNumber);
  };

  std::vector<std::string> tc_files;
  auto* tc = app.add_subcommand("typecheck", "Print the principal type");
  tc->add_option("files", tc_files, "Source files, checked together")->required();
  tc->add_flag("--json", as_json, "Emit JSON");
  add_common(tc);

  std::string prog, scen;
  auto* run = app.add_subcommand("run", "Simulate a program over a scenario");
  run->add_option("program", prog)->required();
  run->add_option("scenario", scen)->required();
  run->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  add_common(run);
  add_scenario(run);

  auto* den = app.add_subcommand("denot", "Evaluate a program over an event structure");
  den->add_option("program", prog)->required();
  den->add_option("input", scen, "Event structure or scenario JSON")->required();
  den->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  add_common(den);
  add_scenario(den);

  auto* adq = app.add_subcommand("check-adequacy", "Compare operational and denotational runs");
  adq->add_option("program", prog)->required();
  adq->add_option("scenario", scen)->required();
  adq->add_flag("--json", as_json, "Emit the report as JSON");
  add_common(adq);
  add_scenario(adq);

  std::string dir = fc::corpus_dir();
  auto* corp = app.add_subcommand("corpus-test", "Check every corpus entry's type");
  corp->add_option("--corpus", dir, "Corpus directory");
  corp->add_option("--out", c.out, "Write output to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*tc) return cmd_typecheck(tc_files, c, as_json);
    if (*run) return cmd_run(prog, scen, c, format);
    if (*den) return cmd_denot(prog, scen, c, format);
    if (*adq) return cmd_adequacy(prog, scen, c, as_json);
    if (*corp) return cmd_corpus(dir, c);
  } catch (const UsageError& e) {
    std::cerr << "fieldc: " << e.what() << "\n";
    return kUsage;
  } catch (const fc::ParseError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d.format(color()) << "\n";
    return kFailure;
  } catch (const fc::TypeError& e) {
    std::string path = tc_files.empty() ? prog : tc_files.back();
    std::cerr << e.diagnostic(path).format(color()) << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "fieldc: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
