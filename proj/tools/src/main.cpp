#include "palm_forge_cli/cli.hpp"

int main(int argc, char** argv) { return palm_forge::cli::run_cli(argc, argv); }
