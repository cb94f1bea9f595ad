#include "sshqfi/cli.hpp"

int main(int argc, char** argv) { return sshqfi::run_cli(argc, argv); }
