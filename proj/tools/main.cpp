#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "cli_config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const ergocli::ExperimentConfig config = ergocli::parse_config(args);
    return ergocli::run(config);
  } catch (const ergocli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    std::cerr << "commands:";
    for (const auto& c : ergocli::known_commands()) std::cerr << " " << c;
    std::cerr << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
