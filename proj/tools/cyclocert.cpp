#include "cyclocert/cli.hpp"

int main(int argc, char** argv) { return cyclocert::run_cli(argc, argv); }
