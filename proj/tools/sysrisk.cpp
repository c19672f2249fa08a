#include "sysrisk/cli.hpp"

int main(int argc, char** argv) { return sysrisk::cli::run(argc, argv); }
