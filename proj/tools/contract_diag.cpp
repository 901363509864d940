#include "contract_diag/contract_diag.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace cd = contract_diag;

namespace {

constexpr int kOk = 0;
constexpr int kFaults = 1;
constexpr int kInputError = 2;

bool use_color() {
  const char* env = std::getenv("CONTRACT_DIAG_COLOR");
  if (env && std::string(env) == "0") return false;
  if (env && std::string(env) == "1") return true;
  return isatty(STDOUT_FILENO) != 0;
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cd::IoError("cannot write '" + path + "'");
  out << text;
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

struct ComposeArgs {
  std::string spec;
  std::string out;
  std::string dot;
};

struct DiagnoseArgs {
  std::string spec;
  std::string log;
  std::string guarantee = "all";
  std::string format = "text";
  bool partial = false;
};

struct StatusArgs {
  std::string spec;
  std::string log;
  std::string component;
};

struct GenArgs {
  std::uint64_t seed = 1;
  int n = 3;
  std::string theory = "linear";
  std::vector<std::string> inject;
  std::string out_spec = "-";
  std::string out_log;
};

template <typename Theory>
int compose(const cd::SystemSpec& spec, const ComposeArgs& args) {
  auto order = cd::to_order<Theory>(spec);
  auto build = cd::build_system(order);
  std::size_t component_terms = 0;
  for (const auto& c : order.contracts) component_terms += c.term_count();
  std::cout << cd::describe(build.system);
  std::cout << "components: " << order.contracts.size() << ", component terms: " << component_terms
            << ", system terms: " << build.system.term_count() << "\n";
  if (!args.out.empty()) {
    cd::SystemSpec single;
    single.theory = spec.theory;
    cd::ComponentSpec c;
    c.name = build.system.name();
    c.inputs.assign(build.system.inputs().begin(), build.system.inputs().end());
    c.outputs.assign(build.system.outputs().begin(), build.system.outputs().end());
    for (const auto& e : build.system.assumptions()) c.assumptions.push_back(Theory::render(e.term));
    for (const auto& e : build.system.guarantees()) c.guarantees.push_back(Theory::render(e.term));
    single.components.push_back(c);
    single.composition_order.push_back(c.name);
    write_text(args.out, cd::render_spec(single));
  }
  if (!args.dot.empty()) write_text(args.dot, cd::export_dot(build.graph));
  return kOk;
}

template <typename Theory>
int diagnose(const cd::SystemSpec& spec, const DiagnoseArgs& args) {
  auto order = cd::to_order<Theory>(spec);
  auto build = cd::build_system(order);
  auto log = cd::load_log<Theory>(args.log, spec, {.require_total = !args.partial});
  cd::Diagnoser<Theory> d(order, build, log);
  if (args.guarantee == "all") {
    d.diagnose_all();
  } else {
    std::string id = args.guarantee;
    if (id.find('.') == std::string::npos) id = build.system.name() + "." + id;
    d.diagnose(cd::parse_term_id(id));
  }
  const auto& report = d.report();
  auto format = args.format == "json" ? cd::ReportFormat::json : cd::ReportFormat::text;
  std::cout << cd::render_report(report, format, format == cd::ReportFormat::text && use_color());
  return report.faulty_components.empty() ? kOk : kFaults;
}

template <typename Theory>
int status(const cd::SystemSpec& spec, const StatusArgs& args) {
  auto order = cd::to_order<Theory>(spec);
  auto log = cd::load_log<Theory>(args.log, spec);
  if (!args.component.empty() && !spec.find(args.component))
    throw cd::IoError("unknown component '" + args.component + "'");
  for (const auto& c : order.contracts) {
    if (!args.component.empty() && c.name() != args.component) continue;
    auto st = cd::evaluate_status(c, log);
    std::cout << c.name() << " " << cd::to_string(st.status);
    for (const auto& f : st.failing) std::cout << " " << f.str();
    std::cout << "\n";
  }
  return kOk;
}

template <typename Theory>
int inject(const cd::SystemSpec& spec, const GenArgs& args) {
  std::set<std::string> targets(args.inject.begin(), args.inject.end());
  auto log = cd::inject_fault<Theory>(spec, args.seed, targets);
  if (!log) {
    std::cerr << "no-witness: no valuation found for targets";
    for (const auto& t : targets) std::cerr << " " << t;
    std::cerr << "\n";
    return kFaults;
  }
  write_text(args.out_log, cd::log_to_csv<Theory>(*log));
  return kOk;
}

template <typename Fn>
int dispatch(const cd::SystemSpec& spec, Fn&& fn) {
  if (spec.theory == "linear") return fn(cd::LinearTheory{});
  return fn(cd::PropTheory{});
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const cd::ParseError*>(&e)) return "parse";
  if (dynamic_cast<const cd::MissingVariableError*>(&e)) return "missing-variable";
  if (dynamic_cast<const cd::ContractError*>(&e)) return "contract";
  if (dynamic_cast<const cd::CompositionError*>(&e)) return "composition";
  if (dynamic_cast<const cd::DiagnosisError*>(&e)) return "diagnosis";
  if (dynamic_cast<const cd::CapacityError*>(&e)) return "capacity";
  if (dynamic_cast<const cd::EliminationError*>(&e)) return "elimination";
  if (dynamic_cast<const cd::IoError*>(&e)) return "io";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "usage";
  return "internal";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compose IO contracts with provenance and trace system-level failures to faulty components."};
  app.require_subcommand(1);

  ComposeArgs ca;
  auto* c_cmd = app.add_subcommand("compose", "Compose the system contract and print it");
  c_cmd->add_option("spec", ca.spec, "System spec (JSON)")->required();
  c_cmd->add_option("--out", ca.out, "Write the system contract as a one-component spec ('-' for stdout)");
  c_cmd->add_option("--dot", ca.dot, "Write the diagnostics graph in DOT ('-' for stdout)");

  DiagnoseArgs da;
  auto* d_cmd = app.add_subcommand("diagnose", "Trace violated system guarantees to faulty components");
  d_cmd->add_option("spec", da.spec, "System spec (JSON)")->required();
  d_cmd->add_option("log", da.log, "Log (CSV table or JSON)")->required();
  d_cmd->add_option("--guarantee", da.guarantee, "Term id (M1.g0, comp_3.g0), system shorthand (g0) or 'all'");
  d_cmd->add_option("--format", da.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  d_cmd->add_flag("--partial", da.partial, "Accept logs that leave declared variables out");

  StatusArgs sa;
  auto* s_cmd = app.add_subcommand("status", "Print IDLE/ACTIVE/FAIL per component");
  s_cmd->add_option("spec", sa.spec, "System spec (JSON)")->required();
  s_cmd->add_option("log", sa.log, "Log (CSV table or JSON)")->required();
  s_cmd->add_option("--component", sa.component, "Only this component");

  GenArgs ga;
  auto* g_cmd = app.add_subcommand("gen", "Generate a random system and optionally a faulty log");
  g_cmd->add_option("--seed", ga.seed, "Generator seed");
  g_cmd->add_option("--n", ga.n, "Number of components (3..8)");
  g_cmd->add_option("--theory", ga.theory, "Theory")->check(CLI::IsMember({"linear", "prop"}));
  g_cmd->add_option("--inject", ga.inject, "Components to make faulty")->delimiter(',');
  g_cmd->add_option("--out-spec", ga.out_spec, "Spec destination ('-' for stdout)");
  g_cmd->add_option("--out-log", ga.out_log, "Log destination, required with --inject");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return kInputError;
  }

  try {
    if (*c_cmd) {
      auto spec = cd::load_spec(ca.spec);
      return dispatch(spec, [&](auto theory) { return compose<decltype(theory)>(spec, ca); });
    }
    if (*d_cmd) {
      auto spec = cd::load_spec(da.spec);
      return dispatch(spec, [&](auto theory) { return diagnose<decltype(theory)>(spec, da); });
    }
    if (*s_cmd) {
      auto spec = cd::load_spec(sa.spec);
      return dispatch(spec, [&](auto theory) { return status<decltype(theory)>(spec, sa); });
    }
    if (*g_cmd) {
      if (!ga.inject.empty() && ga.out_log.empty()) throw std::invalid_argument("--inject needs --out-log");
      auto spec = cd::gen_system(ga.seed, ga.n, ga.theory);
      write_text(ga.out_spec, cd::render_spec(spec));
      if (ga.inject.empty()) return kOk;
      return dispatch(spec, [&](auto theory) { return inject<decltype(theory)>(spec, ga); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << error_kind(e) << ": " << one_line(e.what()) << "\n";
    return kInputError;
  }
  return kInputError;
}
