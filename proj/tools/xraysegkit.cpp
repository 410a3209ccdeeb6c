#include <xraysegkit/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return xraysegkit::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
