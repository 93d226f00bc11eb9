#include <cstdlib>
#include <iostream>

#include "cli.hpp"
#include "meshless/errors.hpp"

int main(int argc, char** argv) {
  namespace cli = meshless::cli;
  try {
    const char* env = std::getenv("MESHLESS_SEED");
    const auto spec =
        cli::parse_args(argc, argv, env ? std::optional<std::string>(env) : std::nullopt);
    const auto artifacts = cli::run_command(spec, std::cerr);
    cli::emit_outputs(artifacts, spec);
    std::cerr << "wrote " << artifacts.size() + 1 << " files to " << spec.out_dir.string() << '\n';
    return 0;
  } catch (const cli::UsageError& e) {
    (e.exit_code() == 0 ? std::cout : std::cerr) << e.what() << '\n';
    return e.exit_code();
  } catch (const meshless::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
