#include "hrtool_cli.hpp"

int main(int argc, char** argv) { return hrtool::run(argc, argv, std::cout, std::cerr); }
