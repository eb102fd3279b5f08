#include "arcfbp/harness.hpp"

int main(int argc, char** argv) { return arcfbp::harness::run_cli(argc, argv); }
