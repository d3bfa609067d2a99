#include "gcnet/cli/commands.hpp"

int main(int argc, char** argv) { return gcnet::cli::run(argc, argv); }
