#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cpn/algebra.hpp"
#include "cpn/selftest.hpp"
#include "cpn/textio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIo = 2;

bool use_color() {
  return isatty(fileno(stderr)) != 0 && std::getenv("CPN_NO_COLOR") == nullptr;
}

void print_diagnostics(const std::string& path, const std::vector<cpn::ParseDiagnostic>& diags) {
  bool color = use_color();
  for (const cpn::ParseDiagnostic& d : diags) {
    const char* label = d.severity == cpn::Severity::Error ? "error" : "warning";
    const char* tint = d.severity == cpn::Severity::Error ? "\033[1;31m" : "\033[1;33m";
    std::cerr << path << ":" << d.span.line << ":" << d.span.column << ": ";
    if (color) std::cerr << tint << label << "\033[0m";
    else std::cerr << label;
    std::cerr << ": " << d.message << "\n";
  }
}

int read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cpn: cannot open '" << path << "'\n";
    return kExitIo;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return kExitOk;
}

int load_document(const std::string& path, cpn::Document& doc) {
  std::string text;
  if (int rc = read_file(path, text); rc != kExitOk) return rc;
  cpn::ParseResult parsed = cpn::parse_net(text);
  if (!parsed.ok()) {
    print_diagnostics(path, parsed.diagnostics);
    return kExitInput;
  }
  doc = std::move(*parsed.document);
  return kExitOk;
}

int cmd_check(const std::string& path) {
  cpn::Document doc;
  if (int rc = load_document(path, doc); rc != kExitOk) return rc;
  try {
    cpn::validate(doc.net);
  } catch (const cpn::Error& e) {
    std::cerr << path << ": error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

struct RunConfig {
  std::string path;
  int steps = 100;
  std::string mode = "sequential";
  std::string trace_path;
  int dot_every = 0;
};

int cmd_run(const RunConfig& config) {
  cpn::Document doc;
  if (int rc = load_document(config.path, doc); rc != kExitOk) return rc;

  std::ofstream trace_file;
  std::ostream* trace = &std::cout;
  if (!config.trace_path.empty()) {
    trace_file.open(config.trace_path, std::ios::binary);
    if (!trace_file) {
      std::cerr << "cpn: cannot write '" << config.trace_path << "'\n";
      return kExitIo;
    }
    trace = &trace_file;
  }

  cpn::StepMode mode =
      config.mode == "greedy" ? cpn::StepMode::Greedy : cpn::StepMode::Sequential;

  bool dot_failed = false;
  cpn::StepObserver observer = [&](const cpn::PetriNet& net, const cpn::TraceEvent& event) {
    for (const cpn::RuleWarning& w : event.warnings) *trace << cpn::rule_warning_json(w) << "\n";
    *trace << cpn::trace_event_json(event) << "\n";
    if (config.dot_every > 0 && event.step % config.dot_every == 0) {
      std::string out_path = config.path + "." + std::to_string(event.step) + ".dot";
      std::ofstream dot(out_path, std::ios::binary);
      if (!dot) {
        std::cerr << "cpn: cannot write '" << out_path << "'\n";
        dot_failed = true;
        return;
      }
      dot << cpn::export_dot(net);
    }
  };

  cpn::RunResult result = cpn::run(doc.net, doc.rules, config.steps, mode, observer);
  if (dot_failed) return kExitIo;
  trace->flush();
  if (trace == &std::cout) std::cout << "---\n";
  std::cout << cpn::render_canonical(result.net, doc.rules);
  return kExitOk;
}

int cmd_defuse(const std::string& path, const std::string& at) {
  cpn::Document doc;
  if (int rc = load_document(path, doc); rc != kExitOk) return rc;
  cpn::DefusionResult parts;
  try {
    parts = cpn::defuse(doc.net, at.empty() ? std::optional<std::string>{} : at);
  } catch (const cpn::Error& e) {
    std::cerr << path << ": error: " << e.what() << "\n";
    return kExitInput;
  }
  std::string out;
  if (parts.residual) out = cpn::render_units(*parts.residual);
  for (const cpn::PetriNet& fragment : parts.unit_fragments) {
    if (!out.empty()) out += " ∘ ";
    out += cpn::render_units(fragment);
  }
  std::cout << out << "\n";
  return kExitOk;
}

int cmd_dot(const std::string& path, const std::string& out_path) {
  cpn::Document doc;
  if (int rc = load_document(path, doc); rc != kExitOk) return rc;
  std::string dot = cpn::export_dot(doc.net);
  if (out_path.empty()) {
    std::cout << dot;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cpn: cannot write '" << out_path << "'\n";
    return kExitIo;
  }
  out << dot;
  return out.good() ? kExitOk : kExitIo;
}

int cmd_selftest(long long iterations) {
  bool ok = true;
  for (const cpn::selftest::SuiteReport& report : cpn::selftest::run_all(iterations)) {
    std::cout << report.name << ": cases=" << report.cases << " failures=" << report.failures
              << (report.ok() ? " [pass]" : " [FAIL]") << "\n";
    for (const std::string& sample : report.samples) std::cout << "  " << sample << "\n";
    ok = ok && report.ok();
  }
  return ok ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"creative petri nets: check, simulate, defuse and export .cpn files"};
  app.require_subcommand(1);

  std::string check_path;
  CLI::App* check = app.add_subcommand("check", "parse and validate a net file");
  check->add_option("file", check_path, "input .cpn file")->required();

  RunConfig run_config;
  CLI::App* run = app.add_subcommand("run", "simulate a net");
  run->add_option("file", run_config.path, "input .cpn file")->required();
  run->add_option("--steps", run_config.steps, "number of steps")->check(CLI::NonNegativeNumber);
  run->add_option("--mode", run_config.mode, "greedy or sequential")
      ->check(CLI::IsMember({"greedy", "sequential"}));
  run->add_option("--trace", run_config.trace_path, "write the JSON-lines trace here");
  run->add_option("--dot-every", run_config.dot_every, "DOT snapshot every K steps (0 = off)")
      ->check(CLI::NonNegativeNumber);

  std::string defuse_path, defuse_at;
  CLI::App* defuse = app.add_subcommand("defuse", "decompose a net into structural units");
  defuse->add_option("file", defuse_path, "input .cpn file")->required();
  defuse->add_option("--at", defuse_at, "partial defusion at this node");

  std::string dot_path, dot_out;
  CLI::App* dot = app.add_subcommand("dot", "export a net as a DOT digraph");
  dot->add_option("file", dot_path, "input .cpn file")->required();
  dot->add_option("-o,--out", dot_out, "output path (stdout when omitted)");

  long long selftest_iterations = 1000;
  CLI::App* selftest = app.add_subcommand("selftest", "run the randomized property suites");
  selftest->add_option("--iterations", selftest_iterations, "cases per suite")
      ->check(CLI::PositiveNumber);
  selftest->group("");  // hidden; used by CI

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (check->parsed()) return cmd_check(check_path);
    if (run->parsed()) return cmd_run(run_config);
    if (defuse->parsed()) return cmd_defuse(defuse_path, defuse_at);
    if (dot->parsed()) return cmd_dot(dot_path, dot_out);
    if (selftest->parsed()) return cmd_selftest(selftest_iterations);
  } catch (const cpn::Error& e) {
    std::cerr << "cpn: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "cpn: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
