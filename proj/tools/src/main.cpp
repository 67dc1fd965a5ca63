#include <iostream>

#include "cmosb_cli/app.hpp"

int main(int argc, char** argv) { return cmosb::cli::run(argc, argv, std::cout, std::cerr); }
