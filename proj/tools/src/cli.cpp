#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "qmrpm/errors.hpp"
#include "suites.hpp"

namespace qmrpm::cli {

namespace {

std::string subject_of(const CheckReport& r) {
  for (const auto& [k, v] : r.inputs) {
    if (k == "subject") return v;
  }
  return "";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

std::string decimal(const Rational& v) {
  std::ostringstream os;
  os << std::setprecision(12) << to_double(v);
  return os.str();
}

void print_summary(std::ostream& out, const std::vector<CheckReport>& checks) {
  out << std::left << std::setw(20) << "check" << std::setw(24) << "subject" << std::setw(7) << "result"
      << std::setw(13) << "comparisons" << "max_discrepancy\n";
  std::size_t passed = 0;
  for (const auto& r : checks) {
    passed += r.pass ? 1 : 0;
    out << std::left << std::setw(20) << r.check << std::setw(24) << subject_of(r) << std::setw(7)
        << (r.pass ? "PASS" : "FAIL") << std::setw(13) << r.comparisons << to_string(r.max_discrepancy);
    if (r.max_abs_z) out << "  (max |z| " << std::setprecision(3) << std::fixed << *r.max_abs_z << std::defaultfloat << ")";
    out << "\n";
  }
  out << checks.size() << " checks, " << passed << " passed, " << checks.size() - passed << " failed\n";
}

}  // namespace

json::Json assemble_report(const std::string& command, std::uint64_t seed, unsigned moment_order,
                           std::uint64_t budget, const std::vector<CheckReport>& checks,
                           const std::vector<CheckReport>& diagnostics, bool with_timing) {
  json::Json doc;
  doc["schema"] = 1;
  doc["command"] = command;
  doc["seed"] = seed;
  doc["moment_order"] = moment_order;
  doc["budget"] = budget;
  std::size_t passed = 0;
  for (const auto& r : checks) passed += r.pass ? 1 : 0;
  doc["summary"] = {{"checks", checks.size()}, {"passed", passed}, {"failed", checks.size() - passed}};
  json::Json list = json::Json::array();
  for (const auto& r : checks) list.push_back(json::report(r, with_timing));
  doc["checks"] = list;
  json::Json diag = json::Json::array();
  for (const auto& r : diagnostics) diag.push_back(json::report(r, with_timing));
  doc["diagnostics"] = diag;
  return doc;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move report into place at " + path.string() + ": " + ec.message());
  }
}

std::string render_table_csv(const std::vector<CheckReport>& checks) {
  std::ostringstream os;
  os << "check,subject,pass,comparisons,max_discrepancy,max_discrepancy_decimal,max_abs_z,witnesses\n";
  for (const auto& r : checks) {
    os << csv_field(r.check) << ',' << csv_field(subject_of(r)) << ',' << (r.pass ? "true" : "false") << ','
       << r.comparisons << ',' << to_string(r.max_discrepancy) << ',' << decimal(r.max_discrepancy) << ',';
    if (r.max_abs_z) os << std::setprecision(6) << *r.max_abs_z;
    os << ',' << r.witnesses.size() << '\n';
  }
  return os.str();
}

void emit_tables(const std::vector<CheckReport>& checks, const std::filesystem::path& path) {
  write_atomically(path, render_table_csv(checks));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact verification of Markov random probability measures", "qmrpm"};
  app.require_subcommand(1);

  std::string config_path, out_path, csv_path;
  std::uint64_t seed = 0, budget = 0;
  unsigned moment_order = 0, jobs = 0;
  bool timings = false;
  app.add_option("--config", config_path, "Config JSON document")->required();
  auto* out_opt = app.add_option("--out", out_path, "Report path");
  auto* seed_opt = app.add_option("--seed", seed, "Monte Carlo seed");
  auto* order_opt = app.add_option("--moment-order", moment_order, "Maximum moment order")->check(CLI::PositiveNumber);
  auto* budget_opt = app.add_option("--budget", budget, "Enumeration budget");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--csv", csv_path, "Also write a CSV table of the checks");
  app.add_flag("--timings", timings, "Include wall times in the report");

  auto* verify = app.add_subcommand("verify", "Run one check suite");
  verify->require_subcommand(1);
  verify->fallthrough();
  for (const auto& name : suite_names()) {
    if (name == "sample") continue;
    verify->add_subcommand(name)->fallthrough();
  }
  app.add_subcommand("sample", "Monte Carlo cross-check against the oracle")->fallthrough();
  app.add_subcommand("all", "Run every suite")->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "qmrpm: " << e.what() << "\n";
    return kConfigError;
  }

  std::string command;
  std::vector<std::string> suites;
  const auto* selected = app.get_subcommands().front();
  if (selected->get_name() == "verify") {
    const std::string name = selected->get_subcommands().front()->get_name();
    command = "verify " + name;
    suites = {name};
  } else {
    command = selected->get_name();
  }

  try {
    std::optional<RunConfig> loaded;
    try {
      loaded.emplace(load_config(config_path));
    } catch (const ResourceError&) {
      throw;
    } catch (const Error& e) {
      err << "qmrpm: config error: " << e.what() << "\n";
      return kConfigError;
    }
    RunConfig& config = *loaded;
    if (*seed_opt) config.seed = seed;
    if (*order_opt) config.moment_order = moment_order;
    if (*budget_opt) config.budget = budget;
    if (*jobs_opt) config.jobs = jobs;
    if (*out_opt) config.out = out_path;
    if (command == "sample") suites = {"sample"};
    if (command == "all") suites = config.checks.empty() ? suite_names() : config.checks;

    const std::vector<Task> tasks = build_tasks(config, suites);
    const std::vector<CheckReport> results = run_tasks(tasks, config.jobs);
    std::vector<CheckReport> checks, diagnostics;
    for (std::size_t i = 0; i < tasks.size(); ++i) (tasks[i].diagnostic ? diagnostics : checks).push_back(results[i]);

    const json::Json doc =
        assemble_report(command, config.seed, config.moment_order, config.budget, checks, diagnostics, timings);
    try {
      write_atomically(config.out, doc.dump(2) + "\n");
      if (!csv_path.empty()) emit_tables(checks, csv_path);
    } catch (const std::runtime_error& e) {
      err << "qmrpm: " << e.what() << "\n";
      return kConfigError;
    }

    print_summary(out, checks);
    out << "report: " << config.out << "\n";
    for (const auto& r : checks) {
      if (r.pass) continue;
      for (const auto& w : r.witnesses) {
        err << r.check << " " << subject_of(r) << ": " << w.where << " expected " << w.expected << " got " << w.actual << "\n";
      }
    }
    for (const auto& r : checks) {
      if (!r.pass) return kCheckFailed;
    }
    return kPass;
  } catch (const ResourceError& e) {
    err << "qmrpm: resource budget exceeded: " << e.what() << "\n";
    return kResourceExceeded;
  }
}

}  // namespace qmrpm::cli
