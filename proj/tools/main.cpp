#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hypervekua/io.hpp"

using namespace hypervekua;
using namespace hypervekua::cli;

namespace {

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("HYPERVEKUA_THREADS"); env && *env) {
    double v = 0;
    try {
      v = parse_real(env);
    } catch (const FormatError&) {
    }
    if (!(v >= 1) || v != static_cast<int>(v)) {
      throw ConfigInvalid(std::string("HYPERVEKUA_THREADS must be a positive integer, got '") +
                          env + "'");
    }
    return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int report_error(const Error& e, const std::filesystem::path& out) {
  nlohmann::json body = {{"code", e.code()}, {"message", e.what()}};
  if (const auto* d = dynamic_cast<const DetailedError*>(&e)) body.update(d->details());
  const std::string text = nlohmann::json{{"error", body}}.dump() + "\n";
  std::cerr << text;
  try {
    write_file_atomic(out / "error.json", text);
  } catch (const std::exception&) {
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic pseudoanalytic functions and Zakharov-Shabat formal powers"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  double tol = 0.0;
  int threads = 0;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--tol", tol, "Residual tolerance for pass/fail checks (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Worker threads (fallback: HYPERVEKUA_THREADS)")
      ->check(CLI::PositiveNumber);

  using Command = bool (*)(const Context&);
  const std::pair<const char*, const char*> descriptions[] = {
      {"powers", "Formal-power tables with closed-form comparison and Vekua residuals"},
      {"modes", "Coupling-mode tables n+, n- with transport-system residuals"},
      {"spectral", "RK4 spectral solutions, conservation drift and Fourier-bridge residuals"},
      {"sequence", "Generating pairs F_m, G_m and their characteristic coefficients"},
      {"check", "Run the full acceptance property suite"},
  };
  const Command commands[] = {cmd_powers, cmd_modes, cmd_spectral, cmd_sequence, cmd_check};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : descriptions) subs.push_back(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::filesystem::path out = out_dir.empty() ? std::string("hypervekua_out") : out_dir;
  try {
    Context ctx;
    if (!config_path.empty()) ctx.config = RunConfig::load(config_path);
    if (!out_dir.empty()) ctx.config.out = out_dir;
    if (tol > 0.0) ctx.config.tol.residual = tol;
    out = ctx.config.out;
    ctx.config.validate();
    ctx.threads = resolve_threads(threads);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return commands[i](ctx) ? 0 : 1;
    }
    return 2;
  } catch (const Error& e) {
    return report_error(e, out);
  } catch (const std::exception& e) {
    return report_error(Error("INTERNAL", e.what()), out);
  }
}
