#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <unistd.h>

#include "gredo/error.hpp"
#include "gredo/shell.hpp"

int main(int argc, char** argv) {
  using namespace gredo;
  CLI::App app{"gredo: relational, document and graph data in one engine"};
  std::string db_dir, opt = "on", format = "table";
  std::vector<std::string> rule_args, commands;
  std::size_t workers = 1;
  double cost_io = CostConstants{}.io, cost_cpu = CostConstants{}.cpu;
  std::uint64_t seed = 42;
  std::string script;
  app.add_option("--db", db_dir, "database directory (in-memory when omitted)");
  app.add_option("--opt", opt, "optimizer on|off")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--rule", rule_args, "toggle a rewrite rule: --rule <name> on|off")->expected(2)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--workers", workers, "analytics worker threads")->check(CLI::PositiveNumber);
  app.add_option("--cost-io", cost_io, "cost of one record read");
  app.add_option("--cost-cpu", cost_cpu, "cost of one tuple operation");
  app.add_option("--format", format, "result format")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--seed", seed, "fixture seed for .bench");
  app.add_option("-c,--command", commands, "run a command and exit (repeatable)");
  app.add_option("script", script, "script file to run instead of stdin");
  CLI11_PARSE(app, argc, argv);

  SessionConfig cfg;
  if (!db_dir.empty()) cfg.db_dir = db_dir;
  cfg.query.mode = opt == "on" ? ExecMode::Full : ExecMode::OptimizerOff;
  for (std::size_t i = 0; i + 1 < rule_args.size(); i += 2) {
    const std::string& v = rule_args[i + 1];
    if (v != "on" && v != "off") {
      std::cerr << "error [syntax]: --rule expects on|off, got '" << v << "'\n";
      return 1;
    }
    if (!cfg.query.rules.set(rule_args[i], v == "on")) {
      std::cerr << "error [schema]: unknown rule '" << rule_args[i] << "'\n";
      return 1;
    }
  }
  cfg.workers = workers;
  cfg.query.costs.io = cost_io;
  cfg.query.costs.cpu = cost_cpu;
  cfg.format = *parse_output_format(format);
  cfg.seed = seed;

  std::unique_ptr<Session> session;
  try {
    session = std::make_unique<Session>(cfg);
  } catch (const Error& e) {
    std::cerr << "error [" << category_name(e.category()) << "]: " << e.what() << "\n";
    return 1;
  }

  int status = 0;
  auto run = [&](const std::string& text) {
    CommandResult r = session->run_command(text);
    (r.exit_code == 0 ? std::cout : std::cerr) << r.output << std::flush;
    status = std::max(status, r.exit_code);
  };

  if (!commands.empty()) {
    for (const auto& c : commands) {
      for (const auto& cmd : split_commands(c)) run(cmd);
    }
    return status;
  }
  if (!script.empty()) {
    std::ifstream in(script);
    if (!in) {
      std::cerr << "error [io]: cannot open '" << script << "'\n";
      return 1;
    }
    std::string text{std::istreambuf_iterator<char>(in), {}};
    for (const auto& cmd : split_commands(text)) run(cmd);
    return status;
  }

  // interactive or piped: a command is complete at ';' or, for dot commands, at the newline
  const bool tty = isatty(0);
  std::string pending;
  for (std::string line;;) {
    if (tty) std::cout << (pending.empty() ? "gredo> " : "  ...> ") << std::flush;
    if (!std::getline(std::cin, line)) break;
    pending += line + "\n";
    auto cmds = split_commands(pending);
    bool complete = pending.find_first_not_of(" \t\r\n") == std::string::npos ||
                    pending[pending.find_first_not_of(" \t\r\n")] == '.' ||
                    line.find(';') != std::string::npos;
    if (!complete) continue;
    for (const auto& cmd : cmds) run(cmd);
    pending.clear();
  }
  for (const auto& cmd : split_commands(pending)) run(cmd);
  return status;
}
