#include "demsim/runner.hpp"

int main(int argc, char** argv) { return demsim::cli_dispatch(argc, argv); }
