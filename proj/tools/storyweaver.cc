#include <iostream>

#include "storyweaver/cli.h"

int main(int argc, char** argv) {
  return storyweaver::run_cli(argc, argv, std::cout, std::cerr);
}
