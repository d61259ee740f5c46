#include "bikind/cli/cli.hpp"

#include <iostream>

int main( int argc, char** argv )
{
    return bikind::cli::run( argc, argv, std::cout, std::cerr );
}
