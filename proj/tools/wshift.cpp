#include <string>
#include <vector>

#include "wshift/cli.hpp"

int main(int argc, char** argv) {
  return wshift::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
