#include "fbpool/harness.hpp"

int main(int argc, char** argv) { return fbpool::cli_main(argc, argv); }
