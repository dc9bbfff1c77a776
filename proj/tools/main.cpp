#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv)
{
    logcc::cli::apply_thread_limit();
    return logcc::cli::run(argc, argv, std::cout, std::cerr);
}
