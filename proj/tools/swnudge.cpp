#include "swnudge/cli.hpp"

int main(int argc, char** argv) { return swnudge::run_cli(argc, argv); }
