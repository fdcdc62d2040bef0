// SPDX-License-Identifier: Apache-2.0
#include "mltc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "mltc/compiler.hpp"
#include "mltc/converter.hpp"
#include "mltc/csv.hpp"
#include "mltc/error.hpp"

namespace mltc {

namespace {

struct CliConfig {
  std::string subcommand;
  std::string model;
  std::string input;
  std::string output;
  std::string profile = "cpu-avx2";
  std::string passes = "all";
  std::size_t random_rows = 0;
  std::uint64_t seed = 0;
  bool dump_passes = false;
};

void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kIo, std::string(what) + " '" + path + "' is not a readable file");
  }
}

void validate_paths(const CliConfig& c) {
  require_file(c.model, "model");
  if (!c.input.empty()) require_file(c.input, "input");
  if (!c.output.empty()) {
    const auto parent = std::filesystem::absolute(c.output).parent_path();
    std::error_code ec;
    if (!std::filesystem::is_directory(parent, ec)) {
      throw Error(ErrorCode::kIo, "output directory '" + parent.string() + "' does not exist");
    }
  }
}

// Predictions as a matrix: label vectors become one column.
Tensor as_matrix(const Tensor& t) {
  if (t.rank() == 2) return t;
  const std::vector<double> v = t.to_doubles();
  std::vector<float> f(v.begin(), v.end());
  return Tensor::from_floats({t.numel(), 1}, std::move(f));
}

void print_reports(std::ostream& out, const std::vector<PassReport>& reports) {
  if (reports.empty()) out << "passes: none\n";
  for (const PassReport& r : reports) out << format_report(r) << '\n';
}

struct Session {
  TrainedModel model;
  HardwareProfile profile;
  PassSet passes;
  Compiled compiled;
};

Session open_session(const CliConfig& c) {
  validate_paths(c);
  Session s;
  s.passes = PassSet::parse(c.passes);
  s.profile = load_profile(c.profile);
  s.model = load_model_file(c.model);
  s.compiled = compile_model(s.model, s.profile, s.passes);
  return s;
}

int cmd_compile(const CliConfig& c, std::ostream& out) {
  const Session s = open_session(c);
  out << "model: " << model_kind_name(s.model.kind) << " features=" << s.model.n_features << '\n';
  out << "profile: " << s.profile.name << " passes: " << s.passes.to_string() << '\n';
  print_reports(out, s.compiled.reports);
  if (c.dump_passes) {
    // Replays the pipeline one pass at a time so every intermediate graph is visible.
    Ecg g = s.compiled.unoptimized;
    out << "# input graph\n" << dump_ecg(g);
    const PassSet single[] = {{true, false, false}, {false, true, false}, {false, false, true}};
    const bool enabled[] = {s.passes.re, s.passes.dr, s.passes.sor};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!enabled[i]) continue;
      const PipelineResult r = run_pipeline(g, s.profile, single[i]);
      g = r.graph;
      out << "# after " << r.reports.front().pass << '\n' << dump_ecg(g);
    }
  }
  out << "# plan\n" << dump_plan(s.compiled.plan);
  return kExitOk;
}

int cmd_run(const CliConfig& c, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw Error(ErrorCode::kUsage, "run needs --input");
  const Session s = open_session(c);
  if (c.dump_passes) print_reports(err, s.compiled.reports);
  const Tensor x = read_csv_file(c.input, s.model.n_features);
  const Tensor y = as_matrix(predict(s.compiled, x));
  if (c.output.empty()) {
    write_csv(out, y);
    return kExitOk;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write '" + c.output + "'");
  write_csv(f, y);
  if (!f.flush()) throw Error(ErrorCode::kIo, "cannot write '" + c.output + "'");
  return kExitOk;
}

// Stacks two row blocks of the same width.
Tensor concat_rows(const Tensor& a, const Tensor& b) {
  std::vector<double> v = a.to_doubles();
  const std::vector<double> w = b.to_doubles();
  v.insert(v.end(), w.begin(), w.end());
  std::vector<float> f(v.begin(), v.end());
  return Tensor::from_floats({a.rows() + b.rows(), a.cols()}, std::move(f));
}

int cmd_verify(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const Session s = open_session(c);
  if (c.dump_passes) print_reports(err, s.compiled.reports);
  Tensor x;
  std::mt19937_64 rng(c.seed);
  if (!c.input.empty()) {
    x = read_csv_file(c.input, s.model.n_features);
    out << "inputs: " << x.rows() << " rows from " << c.input << '\n';
  } else {
    const std::size_t n = c.random_rows ? c.random_rows : 1000;
    const Tensor random = random_inputs(rng, n, s.model.n_features);
    const Tensor boundary = boundary_inputs(s.model, rng);
    x = concat_rows(random, boundary);
    out << "inputs: " << n << " random + " << boundary.rows() << " boundary rows (seed " << c.seed << ")\n";
  }
  const Divergence d = compare_to_oracle(predict(s.compiled, x), oracle_predict(s.model, x), is_classifier(s.model.kind));
  std::ostringstream max_abs, max_rel;
  max_abs << std::setprecision(9) << d.max_abs;
  max_rel << std::setprecision(9) << d.max_rel;
  out << "compared: " << d.compared << " values\n";
  if (d.classifier) out << "label mismatches: " << d.label_mismatches << '\n';
  out << "max abs divergence: " << max_abs.str() << '\n';
  out << "max rel divergence: " << max_rel.str() << '\n';
  const bool ok = d.passed();
  out << "result: " << (ok ? "PASS" : "FAIL") << " (tolerance 1e-05)\n";
  if (ok) return kExitOk;
  err << "error: " << error_code_name(ErrorCode::kVerificationFailed) << ": ";
  if (!d.shape_ok) err << "output shapes differ\n";
  else if (d.label_mismatches) err << d.label_mismatches << " label mismatches\n";
  else err << "max relative divergence " << max_rel.str() << " exceeds 1e-05\n";
  return kExitVerifyFailed;
}

int cmd_dump_ecg(const CliConfig& c, std::ostream& out) {
  const Session s = open_session(c);
  out << "# before optimisation\n" << dump_ecg(s.compiled.unoptimized);
  out << "# after " << s.passes.to_string() << " on " << s.profile.name << '\n' << dump_ecg(s.compiled.optimized);
  if (c.dump_passes) print_reports(out, s.compiled.reports);
  return kExitOk;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Compiles trained classical ML models into tensor kernel plans.", "mltc"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", c.model, "Model JSON file")->required();
    sub->add_option("--profile", c.profile, "Built-in profile (cpu-avx2, plain) or JSON file")
        ->capture_default_str();
    sub->add_option("--passes", c.passes, "Comma-separated subset of re,dr,sor, or all/none")
        ->capture_default_str();
    sub->add_flag("--dump-passes", c.dump_passes, "Print a report for every pass");
  };
  CLI::App* compile = app.add_subcommand("compile", "Compile and print pass reports and the kernel plan");
  common(compile);
  CLI::App* run = app.add_subcommand("run", "Compile, then predict rows of a CSV file");
  common(run);
  run->add_option("--input", c.input, "Headerless CSV of feature rows")->required();
  run->add_option("--output", c.output, "Prediction CSV (stdout when omitted)");
  CLI::App* verify = app.add_subcommand("verify", "Compare compiled predictions with the scalar reference");
  common(verify);
  auto* input = verify->add_option("--input", c.input, "Headerless CSV of feature rows");
  verify->add_option("--random", c.random_rows, "Random rows in [-10, 10] (default 1000)")->excludes(input);
  verify->add_option("--seed", c.seed, "Random generator seed")->capture_default_str();
  CLI::App* dump = app.add_subcommand("dump-ecg", "Print the graph before and after optimisation");
  common(dump);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << error_code_name(ErrorCode::kUsage) << ": " << one_line(e.what()) << '\n';
    err << "run 'mltc --help' for usage\n";
    return kExitError;
  }

  try {
    if (compile->parsed()) return cmd_compile(c, out);
    if (run->parsed()) return cmd_run(c, out, err);
    if (verify->parsed()) return cmd_verify(c, out, err);
    return cmd_dump_ecg(c, out);
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << one_line(e.what()) << '\n';
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
  }
  return kExitError;
}

}  // namespace mltc
