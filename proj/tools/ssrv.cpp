#include "ssrv/cli.hpp"

int main(int argc, char** argv) { return ssrv::run_cli(argc, argv); }
