#include "hdlt/cli.hpp"

int main(int argc, char** argv)
{
    return hdlt::cli::run(argc, argv);
}
