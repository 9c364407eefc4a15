#include "loggas/cli.hpp"

int main(int argc, char** argv) { return loggas::cli::run_cli(argc, argv); }
