#include "bregkt/io.hpp"

int main(int argc, char** argv) { return bregkt::run_cli(argc, argv); }
