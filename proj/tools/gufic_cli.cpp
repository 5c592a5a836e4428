#include "cli.hpp"

int main(int argc, char** argv) {
  return gufic::cli::run_scenario_cli({argv + 1, argv + argc});
}
