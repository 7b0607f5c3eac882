#include "polarmm/cli.hpp"

int main(int argc, char** argv) { return polarmm::cli::run(argc, argv); }
