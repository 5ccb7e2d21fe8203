#include "idealpoint/cli/commands.hpp"

int main(int argc, char** argv) { return idealpoint::cli::run_cli(argc, argv); }
