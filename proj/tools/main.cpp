#include <vector>

#include "degen/cli.hpp"

int main(int argc, char** argv) {
  return degen::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
