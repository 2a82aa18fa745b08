#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "fbp/errors.hpp"
#include "fbp/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Free boundary solver for u_t = u^2 (D u_xx - u_x)"};
  std::string command, config, out;
  bool emit_field = false;
  app.add_option("command", command, "certify | solve | verify | mms")->required();
  app.add_option("--config", config, "configuration file")->required();
  app.add_option("--out", out, "output directory");
  app.add_flag("--emit-field", emit_field, "also write field.csv");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fbp::exit_usage;
  }
  try {
    const auto cmd = fbp::parse_command(command);
    auto cfg = fbp::load_config(config);
    if (emit_field) cfg.emit_field = true;
    std::filesystem::path dir = !out.empty() ? out : !cfg.out_dir.empty() ? cfg.out_dir : "out";
    return fbp::run_command(cmd, cfg, dir, std::cout);
  } catch (const fbp::InvalidData& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fbp::exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fbp::exit_usage;
  }
}
