#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    urvc::cli::configure_logging();
    return urvc::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
