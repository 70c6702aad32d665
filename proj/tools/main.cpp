#include "eprc/cli.hpp"

int main(int argc, char** argv) { return eprc::cli::main_entry(argc, argv); }
