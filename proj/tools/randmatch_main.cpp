#include "randmatch/io.hpp"

int main(int argc, char** argv) { return randmatch::cli_main(argc, argv); }
